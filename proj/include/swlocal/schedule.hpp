#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "swlocal/binning.hpp"
#include "swlocal/digest.hpp"
#include "swlocal/source_model.hpp"

namespace swlocal {

struct LevelParams {
  int level = 0;
  double epsilon = 0.0;                      // eps_l = eps_0 / 2^l
  std::uint64_t sub_blocks = 0;              // b_l = g^l * b_0
  std::uint64_t length = 0;                  // n_l = b_l * n_{l-1}, n_0 = b_0
  std::uint64_t max_differing = 0;           // floor(eps_l * b_l); 0 at level 0
  std::vector<std::uint64_t> codeword_bits;  // k_l^(s)
};

struct ScheduleOptions {
  std::vector<double> rates;
  double epsilon0 = 0.25;
  std::uint64_t b0 = 4;
  std::uint64_t growth = 16;
  int max_level = 0;
  double beta = 0.5;
  Seed128 seed;
  // True source length. 0 binds n to n_{max_level} (one top-level superblock).
  std::uint64_t n = 0;
};

class CodecSchedule {
 public:
  const JointPmf& pmf() const noexcept { return pmf_; }
  const ScheduleOptions& options() const noexcept { return opts_; }
  int k() const noexcept { return pmf_.k(); }
  int max_level() const noexcept { return opts_.max_level; }
  const LevelParams& level(int l) const { return levels_.at(l); }
  const std::vector<LevelParams>& levels() const noexcept { return levels_; }

  std::uint64_t true_n() const noexcept { return opts_.n; }
  std::uint64_t padded_n() const noexcept { return padded_n_; }
  // Number of level-l codeword blocks per source (padded_n / n_l).
  std::uint64_t blocks_at(int l) const { return padded_n_ / levels_.at(l).length; }

  BlockCodeParams level0_params() const;

  // r(l) for l = 0..max_level.
  const std::vector<std::uint64_t>& probe_budgets() const noexcept { return budgets_; }

  // Sum over l >= 1 of k_l^(s) / n_l.
  double hierarchy_overhead(int source) const;

  // Same schedule bound to a different true length.
  CodecSchedule with_length(std::uint64_t n) const;

  // Canonical serialization: JSON with sorted keys, compact.
  nlohmann::json to_json() const;
  std::string canonical() const { return to_json().dump(); }
  Digest256 digest() const { return sha256(canonical()); }

  // Rebuilds from the stored inputs and checks every derived field.
  static CodecSchedule from_json(const nlohmann::json& j);

 private:
  friend CodecSchedule build_schedule(const JointPmf&, const ScheduleOptions&);

  JointPmf pmf_;
  ScheduleOptions opts_;
  std::vector<LevelParams> levels_;
  std::vector<std::uint64_t> budgets_;
  std::uint64_t padded_n_ = 0;
};

CodecSchedule build_schedule(const JointPmf& pmf, const ScheduleOptions& options);

// Bits probed by a local decode at level_d:
// sum_{l<=level_d} (n_{level_d}/n_l) * sum_s k_l^(s).
std::uint64_t probe_budget(const CodecSchedule& schedule, int level_d);

// Constant gamma with probe_budget(l) <= n_l * (sum_s R_s + gamma * eps_0) for
// every l <= max_level, assembled from per-term upper bounds of the level
// parameters (ceilings included).
double probe_growth_constant(const CodecSchedule& schedule);

}  // namespace swlocal
