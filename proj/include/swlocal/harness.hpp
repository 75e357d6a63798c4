#pragma once

// Experiment configuration, the Monte Carlo locality runner, round-trip
// measurement and result serialization.
//
// Every trial t draws its randomness from SHA-256(master_seed || t): bytes
// 0..15 seed the codec, bytes 16..23 seed the source sampler and bytes 24..31
// seed position sampling. Results are therefore independent of the thread
// count and of scheduling order.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "swlocal/digest.hpp"
#include "swlocal/hier_codec.hpp"
#include "swlocal/oracle.hpp"

namespace swlocal {

enum class Scheme { Naive, Hier, Oracle };
enum class PositionPolicy {
  Random,   // one uniform position per trial
  Default,  // uniform position plus first, last and one block boundary per level
};

struct ExperimentConfig {
  std::string pmf = "dsbs:0.1";
  Scheme scheme = Scheme::Naive;
  std::vector<double> rates{0.75, 1.25};
  double epsilon0 = 0.25;

  // naive: swept block sizes
  std::vector<std::uint64_t> block_lengths{4, 8, 12};

  // hier: schedule and swept decode levels
  std::uint64_t b0 = 4;
  std::uint64_t growth = 4;
  int max_level = 1;
  double beta = 0.5;
  std::vector<int> levels{0, 1};

  std::uint64_t n = 0;  // 0 picks 4 * max block length (naive) or n_{max_level} (hier)
  std::uint64_t trials = 1000;
  Seed128 seed = Seed128::from_u64(1);
  PositionPolicy positions = PositionPolicy::Default;
  unsigned threads = 0;  // 0: hardware concurrency, capped by SWLOCAL_THREADS
  double max_search_work = kMaxSearchWork;

  // oracle
  std::size_t oracle_n = 8;
  double oracle_rate = 0.5;
  long oracle_probe_bits = -1;  // -1 probes the full codeword

  std::string output;  // empty: stdout
};

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::json config_to_json(const ExperimentConfig& config);
void validate_config(const ExperimentConfig& config);

Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme scheme);

// Worker count: requested (or hardware concurrency) capped by SWLOCAL_THREADS.
unsigned resolve_threads(unsigned requested);

// Wilson score interval at 95%.
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t rows);

struct TrialRecord {
  std::uint64_t trial = 0;
  std::uint64_t position = 0;  // zero-based
  std::int64_t param = 0;      // block length (naive) or decode level (hier)
  std::uint64_t probes = 0;
  std::vector<bool> correct;   // per source
  bool fallback = false;

  bool error() const;
};

struct LocalitySummary {
  std::int64_t param = 0;
  std::uint64_t rows = 0;
  std::uint64_t errors = 0;
  std::uint64_t fallbacks = 0;
  std::uint64_t probes = 0;  // closed-form budget, equal for every row
  double pe_loc = 0.0;
  double wilson_lo = 0.0;
  double wilson_hi = 0.0;
  double fallback_rate = 0.0;
};

struct BenchResult {
  Scheme scheme = Scheme::Naive;
  std::vector<TrialRecord> rows;
  std::vector<LocalitySummary> summary;
};

BenchResult bench_locality(const ExperimentConfig& config);
std::vector<LocalitySummary> summarize(const std::vector<TrialRecord>& rows);

// CSV with a "# swlocal-csv v1" header line; columns:
// row,scheme,param,trial,position,probes,correct,fallback,rows,errors,pe_loc,wilson_lo,wilson_hi,fallback_rate
std::string to_csv(const BenchResult& result);

struct RoundtripSummary {
  std::uint64_t trials = 0;
  std::uint64_t n = 0;
  std::uint64_t full_recoveries = 0;
  double full_recovery_rate = 0.0;
  double symbol_error_rate = 0.0;
  double fallback_rate = 0.0;
  std::vector<double> achieved_rate;   // container bits per source / true n
  std::vector<double> nominal_rate;    // R_s + eps_0
  std::vector<double> level0_rate;     // k_0^(s) / b_0
  std::vector<double> overhead_bound;  // sum_{l>=1} k_l^(s) / n_l
};

RoundtripSummary roundtrip(const ExperimentConfig& config);
nlohmann::json to_json(const RoundtripSummary& summary);

OracleReport run_oracle(const ExperimentConfig& config);

// The schedule a hier experiment uses for a given codec seed.
CodecSchedule experiment_schedule(const ExperimentConfig& config, const Seed128& seed);

}  // namespace swlocal
