#include "swlocal/schedule.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "swlocal/errors.hpp"

namespace swlocal {

namespace {

constexpr std::uint64_t kMaxLength = std::uint64_t{1} << 62;

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
  if (a != 0 && b > kMaxLength / a) {
    throw Error(Errc::OverflowingLevel, std::string(what) + " overflows 2^62");
  }
  return a * b;
}

}  // namespace

CodecSchedule build_schedule(const JointPmf& pmf, const ScheduleOptions& options) {
  const int k = pmf.k();
  if (options.rates.size() != static_cast<std::size_t>(k)) {
    throw Error(Errc::BadShape, "expected " + std::to_string(k) + " rates");
  }
  if (!(options.epsilon0 > 0.0) || options.epsilon0 >= 1.0) {
    throw Error(Errc::InvalidConfig, "epsilon0 must lie in (0, 1)");
  }
  if (options.b0 == 0) throw Error(Errc::InvalidConfig, "b0 must be >= 1");
  if (options.growth < 2 || options.growth % 2 != 0) {
    throw Error(Errc::InvalidConfig, "growth factor must be even and >= 2");
  }
  if (options.max_level < 0 || options.max_level > 16) {
    throw Error(Errc::LevelOutOfRange, "max_level outside [0, 16]");
  }
  if (!(options.beta > 0.0)) throw Error(Errc::InvalidConfig, "beta must be positive");

  const auto report = entropy_stats(pmf);
  const auto region = sw_region_contains(report, options.rates);
  if (!region.inside) {
    throw Error(Errc::RatesOutsideRegion,
                "rates violate " + std::to_string(region.violated.size()) + " subset constraint(s)");
  }

  CodecSchedule sched;
  sched.pmf_ = pmf;
  sched.opts_ = options;

  LevelParams l0;
  l0.level = 0;
  l0.epsilon = options.epsilon0;
  l0.sub_blocks = options.b0;
  l0.length = options.b0;
  for (int s = 0; s < k; ++s) {
    l0.codeword_bits.push_back(std::max<std::uint64_t>(
        1, ceil_tolerant((options.rates[s] + options.epsilon0) * static_cast<double>(options.b0))));
  }
  sched.levels_.push_back(std::move(l0));

  for (int l = 1; l <= options.max_level; ++l) {
    const auto& prev = sched.levels_.back();
    LevelParams lp;
    lp.level = l;
    lp.epsilon = options.epsilon0 / std::ldexp(1.0, l);
    lp.sub_blocks = checked_mul(prev.sub_blocks, options.growth, "b_l");
    lp.length = checked_mul(lp.sub_blocks, prev.length, "n_l");
    lp.max_differing = floor_tolerant(lp.epsilon * static_cast<double>(lp.sub_blocks));
    if (lp.max_differing == 0) {
      throw Error(Errc::DegenerateLevel,
                  "floor(eps_l * b_l) = 0 at level " + std::to_string(l));
    }
    const double tail = lp.epsilon * static_cast<double>(lp.sub_blocks) *
                        std::log2(std::numbers::e * std::ldexp(1.0, l) / options.epsilon0);
    for (int s = 0; s < k; ++s) {
      const double body = lp.epsilon * static_cast<double>(lp.length) *
                          (options.beta + std::log2(static_cast<double>(pmf.alphabet_size(s))));
      lp.codeword_bits.push_back(ceil_tolerant(body + tail));
    }
    sched.levels_.push_back(std::move(lp));
  }

  const std::uint64_t top = sched.levels_.back().length;
  if (sched.opts_.n == 0) sched.opts_.n = top;
  const std::uint64_t n = sched.opts_.n;
  const std::uint64_t n_b0 = (n + options.b0 - 1) / options.b0 * options.b0;
  if (top > n_b0) {
    throw Error(Errc::OverflowingLevel, "n_" + std::to_string(options.max_level) + " = " +
                                            std::to_string(top) + " exceeds the source length " +
                                            std::to_string(n_b0));
  }
  sched.padded_n_ = checked_mul((n + top - 1) / top, top, "padded n");

  for (int ld = 0; ld <= options.max_level; ++ld) sched.budgets_.push_back(probe_budget(sched, ld));
  return sched;
}

std::uint64_t probe_budget(const CodecSchedule& schedule, int level_d) {
  if (level_d < 0 || level_d > schedule.max_level()) {
    throw Error(Errc::LevelOutOfRange, "level " + std::to_string(level_d));
  }
  const std::uint64_t top = schedule.level(level_d).length;
  std::uint64_t total = 0;
  for (int l = 0; l <= level_d; ++l) {
    const auto& lp = schedule.level(l);
    std::uint64_t per_block = 0;
    for (auto bits : lp.codeword_bits) per_block += bits;
    total += (top / lp.length) * per_block;
  }
  return total;
}

double probe_growth_constant(const CodecSchedule& schedule) {
  const auto& o = schedule.options();
  const double k = schedule.k();
  // Level 0: ceil((R+eps0) b0) / b0 <= R + eps0 + 1/b0.
  double gamma = k + k / (o.epsilon0 * static_cast<double>(o.b0));
  for (int l = 1; l <= schedule.max_level(); ++l) {
    const auto& lp = schedule.level(l);
    const double two_l = std::ldexp(1.0, l);
    const double ratio = static_cast<double>(lp.sub_blocks) / static_cast<double>(lp.length);
    for (int s = 0; s < schedule.k(); ++s) {
      const double log_m = std::log2(static_cast<double>(schedule.pmf().alphabet_size(s)));
      gamma += (o.beta + log_m) / two_l;
      gamma += ratio * std::log2(std::numbers::e * two_l / o.epsilon0) / two_l;
      gamma += 1.0 / (o.epsilon0 * static_cast<double>(lp.length));
    }
  }
  return gamma;
}

BlockCodeParams CodecSchedule::level0_params() const {
  BlockCodeParams p{pmf_, static_cast<std::size_t>(opts_.b0), {}};
  for (auto bits : levels_[0].codeword_bits) p.codeword_bits.push_back(bits);
  return p;
}

double CodecSchedule::hierarchy_overhead(int source) const {
  double total = 0.0;
  for (int l = 1; l <= max_level(); ++l) {
    total += static_cast<double>(levels_[l].codeword_bits.at(source)) /
             static_cast<double>(levels_[l].length);
  }
  return total;
}

CodecSchedule CodecSchedule::with_length(std::uint64_t n) const {
  auto o = opts_;
  o.n = n;
  return build_schedule(pmf_, o);
}

nlohmann::json CodecSchedule::to_json() const {
  nlohmann::json j;
  j["format"] = "swlocal-schedule";
  j["version"] = 1;
  j["pmf"] = pmf_to_json(pmf_);
  j["rates"] = opts_.rates;
  j["epsilon0"] = opts_.epsilon0;
  j["b0"] = opts_.b0;
  j["growth"] = opts_.growth;
  j["max_level"] = opts_.max_level;
  j["beta"] = opts_.beta;
  j["seed"] = opts_.seed.hex();
  j["n"] = opts_.n;
  j["padded_n"] = padded_n_;
  auto levels = nlohmann::json::array();
  for (const auto& lp : levels_) {
    nlohmann::json e;
    e["level"] = lp.level;
    e["epsilon"] = lp.epsilon;
    e["sub_blocks"] = lp.sub_blocks;
    e["length"] = lp.length;
    e["max_differing"] = lp.max_differing;
    e["codeword_bits"] = lp.codeword_bits;
    levels.push_back(std::move(e));
  }
  j["levels"] = std::move(levels);
  j["probe_budgets"] = budgets_;
  return j;
}

CodecSchedule CodecSchedule::from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "swlocal-schedule" || j.value("version", 0) != 1) {
      throw Error(Errc::InvalidConfig, "not a swlocal-schedule v1 document");
    }
    ScheduleOptions o;
    o.rates = j.at("rates").get<std::vector<double>>();
    o.epsilon0 = j.at("epsilon0").get<double>();
    o.b0 = j.at("b0").get<std::uint64_t>();
    o.growth = j.at("growth").get<std::uint64_t>();
    o.max_level = j.at("max_level").get<int>();
    o.beta = j.at("beta").get<double>();
    o.seed = Seed128::parse(j.at("seed").get<std::string>());
    o.n = j.at("n").get<std::uint64_t>();
    auto sched = build_schedule(pmf_from_json(j.at("pmf")), o);
    if (sched.to_json() != j) {
      throw Error(Errc::InvalidConfig, "schedule derived fields disagree with their inputs");
    }
    return sched;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("schedule JSON: ") + e.what());
  }
}

}  // namespace swlocal
