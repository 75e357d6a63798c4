#pragma once

// Exhaustive computations on tiny instances: exact MAP local-decoding error
// from probed codeword bits (with or without the full side information Y^n),
// the binary rate-distortion floor, and the exact block-MAP error of the
// level-0 block code.

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "swlocal/binning.hpp"
#include "swlocal/source_model.hpp"

namespace swlocal {

// Codeword for every x^n in X^n, x^n enumerated lexicographically with x_0
// most significant. Bit j of a codeword is (code >> (bits - 1 - j)) & 1.
struct EncoderTable {
  int alphabet = 2;
  std::size_t n = 0;
  std::size_t bits = 0;
  std::vector<std::uint64_t> codes;

  static EncoderTable from_bin_hash(int alphabet, std::size_t n, std::size_t bits,
                                    const BinningKey& key);
  // Binary only: the codeword is x^n itself.
  static EncoderTable identity(std::size_t n);

  bool bit(std::size_t x_index, std::size_t j) const { return (codes[x_index] >> (bits - 1 - j)) & 1u; }
};

// Non-adaptive probe sets: sets[i] lists the codeword bits read for position i.
struct ProbeSetFamily {
  std::vector<std::vector<std::uint32_t>> sets;

  // I_i = {0, .., r-1} for every i.
  static ProbeSetFamily prefix(std::size_t n, std::size_t r);
  std::size_t max_size() const;
};

inline constexpr double kOracleMaxLog2States = 26.0;

enum class SideInformation { Full, None };

// Sum over (c, y^n) of P(c, y^n) - max_a P(X_i = a, c, y^n). With
// SideInformation::None the y^n coordinate is dropped. Requires k = 2.
double exact_local_map_error(const JointPmf& pmf, const EncoderTable& table,
                             const ProbeSetFamily& probes, std::size_t position,
                             SideInformation side = SideInformation::Full);

struct MaxLocalError {
  std::size_t position = 0;
  double error = 0.0;
  std::vector<double> per_position;
};

MaxLocalError max_local_error(const JointPmf& pmf, const EncoderTable& table,
                              const ProbeSetFamily& probes,
                              SideInformation side = SideInformation::Full);

// Binary uniform source: inverse of h2 on [0, 1/2] at 1 - rate.
double rd_delta(double rate);

struct RdFloorReport {
  std::vector<double> per_position;  // MAP error of X_i from C_{I_i} alone
  double average_error = 0.0;
  double floor = 0.0;                // rd_delta(bits / n), 0 when bits >= n
  bool satisfied = false;
};

RdFloorReport verify_rd_floor(const JointPmf& pmf, const EncoderTable& table,
                              const ProbeSetFamily& probes);

// Exact block error of sw_block_map_decode for one key: 1 - sum over bin
// tuples of the largest tuple probability in that bin.
double exact_block_map_error(const BlockCodeParams& params, const BinningKey& key);

struct OracleReport {
  std::size_t n = 0;
  double rate = 0.0;
  std::size_t probe_budget = 0;
  MaxLocalError local;
  std::optional<RdFloorReport> rd;
};

OracleReport oracle_report(const JointPmf& pmf, const EncoderTable& table,
                           const ProbeSetFamily& probes);
nlohmann::json to_json(const OracleReport& report);

}  // namespace swlocal
