#include "swlocal/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "swlocal/errors.hpp"
#include "swlocal/naive_codec.hpp"

namespace swlocal {

namespace {

struct TrialSeeds {
  Seed128 codec;
  std::uint64_t sampler = 0;
  std::uint64_t positions = 0;
};

TrialSeeds trial_seeds(const Seed128& master, std::uint64_t trial) {
  const auto d = derive_trial_digest(master, trial);
  TrialSeeds s;
  std::copy(d.begin(), d.begin() + 16, s.codec.bytes.begin());
  s.sampler = get_u64_be(d.data() + 16);
  s.positions = get_u64_be(d.data() + 24);
  return s;
}

template <class F>
void parallel_for(std::uint64_t count, unsigned threads, F&& body) {
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    while (true) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::min<std::uint64_t>(threads, count); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<std::uint64_t> trial_positions(const ExperimentConfig& config, std::uint64_t n,
                                           std::uint64_t boundary, std::mt19937_64& rng) {
  std::set<std::uint64_t> pos{rng() % n};
  if (config.positions == PositionPolicy::Default) {
    pos.insert(0);
    pos.insert(n - 1);
    if (boundary < n) pos.insert(boundary);
  }
  return {pos.begin(), pos.end()};
}

TrialRecord make_record(std::uint64_t trial, std::int64_t param, const LocalDecodeResult& r,
                        const std::vector<Sequence>& truth) {
  TrialRecord rec;
  rec.trial = trial;
  rec.position = r.position;
  rec.param = param;
  rec.probes = r.probes.count();
  for (std::size_t s = 0; s < truth.size(); ++s) rec.correct.push_back(r.symbols[s] == truth[s][r.position]);
  rec.fallback = r.fallback;
  return rec;
}

void check_probes(const TrialRecord& rec, std::uint64_t budget) {
  if (rec.probes != budget) {
    throw std::logic_error("probe count " + std::to_string(rec.probes) +
                           " differs from closed-form budget " + std::to_string(budget));
  }
}

std::uint64_t naive_default_n(const ExperimentConfig& config) {
  return 4 * *std::max_element(config.block_lengths.begin(), config.block_lengths.end());
}

}  // namespace

Scheme parse_scheme(const std::string& name) {
  if (name == "naive") return Scheme::Naive;
  if (name == "hier") return Scheme::Hier;
  if (name == "oracle") return Scheme::Oracle;
  throw Error(Errc::InvalidConfig, "unknown scheme '" + name + "'");
}

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Naive: return "naive";
    case Scheme::Hier: return "hier";
    case Scheme::Oracle: return "oracle";
  }
  return "?";
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c) {
  try {
    if (j.contains("pmf")) c.pmf = j["pmf"].is_string() ? j["pmf"].get<std::string>() : j["pmf"].dump();
    if (j.contains("scheme")) c.scheme = parse_scheme(j["scheme"].get<std::string>());
    if (j.contains("rates")) c.rates = j["rates"].get<std::vector<double>>();
    if (j.contains("epsilon0")) c.epsilon0 = j["epsilon0"].get<double>();
    if (j.contains("block_lengths")) c.block_lengths = j["block_lengths"].get<std::vector<std::uint64_t>>();
    if (j.contains("b0")) c.b0 = j["b0"].get<std::uint64_t>();
    if (j.contains("growth")) c.growth = j["growth"].get<std::uint64_t>();
    if (j.contains("max_level")) c.max_level = j["max_level"].get<int>();
    if (j.contains("beta")) c.beta = j["beta"].get<double>();
    if (j.contains("levels")) c.levels = j["levels"].get<std::vector<int>>();
    if (j.contains("n")) c.n = j["n"].get<std::uint64_t>();
    if (j.contains("trials")) {
      if (!j["trials"].is_number_integer() || j["trials"].get<std::int64_t>() < 0) {
        throw Error(Errc::InvalidConfig, "trials must be a nonnegative integer");
      }
      c.trials = j["trials"].get<std::uint64_t>();
    }
    if (j.contains("seed")) {
      c.seed = j["seed"].is_string() ? Seed128::parse(j["seed"].get<std::string>())
                                     : Seed128::from_u64(j["seed"].get<std::uint64_t>());
    }
    if (j.contains("positions")) {
      const auto p = j["positions"].get<std::string>();
      if (p == "random") c.positions = PositionPolicy::Random;
      else if (p == "default") c.positions = PositionPolicy::Default;
      else throw Error(Errc::InvalidConfig, "positions must be 'random' or 'default'");
    }
    if (j.contains("threads")) c.threads = j["threads"].get<unsigned>();
    if (j.contains("max_search_work")) c.max_search_work = j["max_search_work"].get<double>();
    if (j.contains("oracle_n")) c.oracle_n = j["oracle_n"].get<std::size_t>();
    if (j.contains("oracle_rate")) c.oracle_rate = j["oracle_rate"].get<double>();
    if (j.contains("oracle_probe_bits")) c.oracle_probe_bits = j["oracle_probe_bits"].get<long>();
    if (j.contains("output")) c.output = j["output"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("config: ") + e.what());
  }
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["pmf"] = c.pmf;
  j["scheme"] = scheme_name(c.scheme);
  j["rates"] = c.rates;
  j["epsilon0"] = c.epsilon0;
  j["block_lengths"] = c.block_lengths;
  j["b0"] = c.b0;
  j["growth"] = c.growth;
  j["max_level"] = c.max_level;
  j["beta"] = c.beta;
  j["levels"] = c.levels;
  j["n"] = c.n;
  j["trials"] = c.trials;
  j["seed"] = c.seed.hex();
  j["positions"] = c.positions == PositionPolicy::Random ? "random" : "default";
  j["threads"] = c.threads;
  j["max_search_work"] = c.max_search_work;
  j["oracle_n"] = c.oracle_n;
  j["oracle_rate"] = c.oracle_rate;
  j["oracle_probe_bits"] = c.oracle_probe_bits;
  j["output"] = c.output;
  return j;
}

void validate_config(const ExperimentConfig& c) {
  if (c.trials == 0 && c.scheme != Scheme::Oracle) {
    throw Error(Errc::InvalidConfig, "at least one decoding trial is required");
  }
  if (c.scheme == Scheme::Naive) {
    if (c.block_lengths.empty()) throw Error(Errc::InvalidConfig, "no block lengths given");
    for (auto b : c.block_lengths)
      if (b == 0) throw Error(Errc::InvalidConfig, "block length must be >= 1");
  }
  if (c.scheme == Scheme::Hier) {
    if (c.levels.empty()) throw Error(Errc::InvalidConfig, "no decode levels given");
    for (int l : c.levels) {
      if (l < 0 || l > c.max_level) {
        throw Error(Errc::LevelOutOfRange, "decode level " + std::to_string(l) + " outside [0, " +
                                               std::to_string(c.max_level) + "]");
      }
    }
  }
  if (c.scheme == Scheme::Oracle && c.oracle_n == 0) {
    throw Error(Errc::InvalidConfig, "oracle_n must be >= 1");
  }
}

unsigned resolve_threads(unsigned requested) {
  unsigned t = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SWLOCAL_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap >= 1) t = std::min<unsigned>(t, static_cast<unsigned>(cap));
  }
  return std::max(1u, t);
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t rows) {
  if (rows == 0) return {0.0, 1.0};
  constexpr double z = 1.959963984540054;
  const double nn = static_cast<double>(rows);
  const double p = static_cast<double>(errors) / nn;
  const double denom = 1.0 + z * z / nn;
  const double centre = (p + z * z / (2 * nn)) / denom;
  const double half = z * std::sqrt(p * (1 - p) / nn + z * z / (4 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

bool TrialRecord::error() const {
  return std::any_of(correct.begin(), correct.end(), [](bool ok) { return !ok; });
}

CodecSchedule experiment_schedule(const ExperimentConfig& config, const Seed128& seed) {
  ScheduleOptions o;
  o.rates = config.rates;
  o.epsilon0 = config.epsilon0;
  o.b0 = config.b0;
  o.growth = config.growth;
  o.max_level = config.max_level;
  o.beta = config.beta;
  o.seed = seed;
  o.n = config.n;
  return build_schedule(pmf_from_spec(config.pmf), o);
}

std::vector<LocalitySummary> summarize(const std::vector<TrialRecord>& rows) {
  std::map<std::int64_t, LocalitySummary> by_param;
  for (const auto& r : rows) {
    auto& s = by_param[r.param];
    s.param = r.param;
    s.rows += 1;
    s.errors += r.error() ? 1 : 0;
    s.fallbacks += r.fallback ? 1 : 0;
    s.probes = r.probes;
  }
  std::vector<LocalitySummary> out;
  for (auto& [param, s] : by_param) {
    s.pe_loc = static_cast<double>(s.errors) / static_cast<double>(s.rows);
    std::tie(s.wilson_lo, s.wilson_hi) = wilson_interval(s.errors, s.rows);
    s.fallback_rate = static_cast<double>(s.fallbacks) / static_cast<double>(s.rows);
    out.push_back(s);
  }
  return out;
}

BenchResult bench_locality(const ExperimentConfig& config) {
  validate_config(config);
  if (config.scheme == Scheme::Oracle) {
    throw Error(Errc::InvalidConfig, "bench-locality runs the naive or hier scheme");
  }
  const auto pmf = pmf_from_spec(config.pmf);
  const unsigned threads = resolve_threads(config.threads);
  std::vector<std::vector<TrialRecord>> per_trial(config.trials);

  if (config.scheme == Scheme::Naive) {
    const std::uint64_t n = config.n ? config.n : naive_default_n(config);
    // Fail fast on invalid rates before spawning workers.
    naive_schedule(pmf, NaiveParams{config.block_lengths[0], config.rates, config.epsilon0, config.seed}, n);
    parallel_for(config.trials, threads, [&](std::uint64_t t) {
      const auto seeds = trial_seeds(config.seed, t);
      const auto truth = sample(pmf, n, seeds.sampler);
      std::mt19937_64 rng(seeds.positions);
      auto& out = per_trial[t];
      for (auto b : config.block_lengths) {
        const NaiveParams params{b, config.rates, config.epsilon0, seeds.codec};
        const auto encoded = naive_encode(pmf, truth, params);
        std::uint64_t budget = 0;
        for (auto bits : encoded.schedule.level(0).codeword_bits) budget += bits;
        for (auto i : trial_positions(config, n, b, rng)) {
          auto rec = make_record(t, static_cast<std::int64_t>(b), naive_local_decode(encoded, i), truth);
          check_probes(rec, budget);
          out.push_back(std::move(rec));
        }
      }
    });
  } else {
    const auto probe_sched = experiment_schedule(config, config.seed);
    const std::uint64_t n = probe_sched.true_n();
    parallel_for(config.trials, threads, [&](std::uint64_t t) {
      const auto seeds = trial_seeds(config.seed, t);
      const auto schedule = experiment_schedule(config, seeds.codec);
      const auto truth = sample(pmf, n, seeds.sampler);
      const auto container = hier_encode(schedule, truth);
      std::mt19937_64 rng(seeds.positions);
      auto& out = per_trial[t];
      for (int ld : config.levels) {
        const std::uint64_t boundary = schedule.level(ld).length;
        for (auto i : trial_positions(config, n, boundary, rng)) {
          const auto res = hier_local_decode(schedule, container, i, ld, config.max_search_work);
          auto rec = make_record(t, ld, res, truth);
          check_probes(rec, schedule.probe_budgets()[ld]);
          out.push_back(std::move(rec));
        }
      }
    });
  }

  BenchResult result;
  result.scheme = config.scheme;
  for (auto& v : per_trial) {
    for (auto& r : v) result.rows.push_back(std::move(r));
  }
  std::sort(result.rows.begin(), result.rows.end(), [](const TrialRecord& a, const TrialRecord& b) {
    return std::tie(a.trial, a.position, a.param) < std::tie(b.trial, b.position, b.param);
  });
  result.summary = summarize(result.rows);
  return result;
}

std::string to_csv(const BenchResult& result) {
  std::ostringstream os;
  const std::string scheme = scheme_name(result.scheme);
  os << "# swlocal-csv v1\n";
  os << "row,scheme,param,trial,position,probes,correct,fallback,rows,errors,pe_loc,wilson_lo,"
        "wilson_hi,fallback_rate\n";
  for (const auto& r : result.rows) {
    std::string correct;
    for (bool ok : r.correct) correct.push_back(ok ? '1' : '0');
    os << "trial," << scheme << ',' << r.param << ',' << r.trial << ',' << r.position << ','
       << r.probes << ',' << correct << ',' << (r.fallback ? 1 : 0) << ",,,,,,\n";
  }
  for (const auto& s : result.summary) {
    os << "summary," << scheme << ',' << s.param << ",,," << s.probes << ",,," << s.rows << ','
       << s.errors << ',' << fmt_double(s.pe_loc) << ',' << fmt_double(s.wilson_lo) << ','
       << fmt_double(s.wilson_hi) << ',' << fmt_double(s.fallback_rate) << '\n';
  }
  return os.str();
}

RoundtripSummary roundtrip(const ExperimentConfig& config) {
  validate_config(config);
  const auto pmf = pmf_from_spec(config.pmf);
  const unsigned threads = resolve_threads(config.threads);

  // Naive round trips use the one-level schedule at the first block length.
  ExperimentConfig cfg = config;
  if (config.scheme == Scheme::Naive) {
    cfg.b0 = config.block_lengths.at(0);
    cfg.max_level = 0;
    cfg.growth = 16;
    if (cfg.n == 0) cfg.n = naive_default_n(config);
  } else if (config.scheme != Scheme::Hier) {
    throw Error(Errc::InvalidConfig, "roundtrip runs the naive or hier scheme");
  }
  const auto reference = experiment_schedule(cfg, cfg.seed);
  const std::uint64_t n = reference.true_n();

  struct Outcome {
    bool recovered = false;
    bool fallback = false;
    std::uint64_t symbol_errors = 0;
  };
  std::vector<Outcome> outcomes(config.trials);
  parallel_for(config.trials, threads, [&](std::uint64_t t) {
    const auto seeds = trial_seeds(config.seed, t);
    const auto schedule = experiment_schedule(cfg, seeds.codec);
    const auto truth = sample(pmf, n, seeds.sampler);
    const auto container = hier_encode(schedule, truth);
    const auto decoded = hier_full_decode(schedule, container, config.max_search_work);
    Outcome o;
    o.fallback = decoded.fallback;
    for (std::uint64_t i = 0; i < n; ++i) {
      bool bad = false;
      for (int s = 0; s < pmf.k(); ++s) bad |= decoded.sequences[s][i] != truth[s][i];
      o.symbol_errors += bad ? 1 : 0;
    }
    o.recovered = o.symbol_errors == 0;
    outcomes[t] = o;
  });

  RoundtripSummary sum;
  sum.trials = config.trials;
  sum.n = n;
  std::uint64_t sym_err = 0;
  std::uint64_t fallbacks = 0;
  for (const auto& o : outcomes) {
    sum.full_recoveries += o.recovered ? 1 : 0;
    sym_err += o.symbol_errors;
    fallbacks += o.fallback ? 1 : 0;
  }
  const double trials = static_cast<double>(config.trials);
  sum.full_recovery_rate = static_cast<double>(sum.full_recoveries) / trials;
  sum.symbol_error_rate = static_cast<double>(sym_err) / (trials * static_cast<double>(n));
  sum.fallback_rate = static_cast<double>(fallbacks) / trials;
  for (int s = 0; s < pmf.k(); ++s) {
    std::uint64_t bits = 0;
    for (int l = 0; l <= reference.max_level(); ++l) {
      bits += reference.blocks_at(l) * reference.level(l).codeword_bits[s];
    }
    sum.achieved_rate.push_back(static_cast<double>(bits) / static_cast<double>(n));
    sum.nominal_rate.push_back(cfg.rates[s] + cfg.epsilon0);
    sum.level0_rate.push_back(static_cast<double>(reference.level(0).codeword_bits[s]) /
                              static_cast<double>(reference.options().b0));
    sum.overhead_bound.push_back(reference.hierarchy_overhead(s));
  }
  return sum;
}

nlohmann::json to_json(const RoundtripSummary& s) {
  nlohmann::json j;
  j["trials"] = s.trials;
  j["n"] = s.n;
  j["full_recoveries"] = s.full_recoveries;
  j["full_recovery_rate"] = s.full_recovery_rate;
  j["symbol_error_rate"] = s.symbol_error_rate;
  j["fallback_rate"] = s.fallback_rate;
  j["achieved_rate"] = s.achieved_rate;
  j["nominal_rate"] = s.nominal_rate;
  j["level0_rate"] = s.level0_rate;
  j["overhead_bound"] = s.overhead_bound;
  return j;
}

OracleReport run_oracle(const ExperimentConfig& config) {
  validate_config(config);
  const auto pmf = pmf_from_spec(config.pmf);
  if (pmf.k() != 2) throw Error(Errc::BadShape, "oracle requires k = 2");
  const std::size_t bits = std::max<std::uint64_t>(
      1, ceil_tolerant(config.oracle_rate * static_cast<double>(config.oracle_n)));
  const double log2_states =
      static_cast<double>(config.oracle_n) *
      std::log2(static_cast<double>(pmf.alphabet_size(0)) * pmf.alphabet_size(1));
  if (log2_states > kOracleMaxLog2States + 1e-12) {
    throw Error(Errc::InstanceTooLarge, "oracle instance above 2^26 joint states");
  }
  const auto table = EncoderTable::from_bin_hash(pmf.alphabet_size(0), config.oracle_n, bits,
                                                 BinningKey{config.seed, 0, 0, 0});
  const std::size_t r = config.oracle_probe_bits < 0
                            ? bits
                            : std::min<std::size_t>(bits, static_cast<std::size_t>(config.oracle_probe_bits));
  return oracle_report(pmf, table, ProbeSetFamily::prefix(config.oracle_n, r));
}

}  // namespace swlocal
