#include "swlocal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "swlocal/errors.hpp"

namespace swlocal {

namespace {

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r *= base;
  return r;
}

void check_instance(const JointPmf& pmf, const EncoderTable& table, const ProbeSetFamily& probes) {
  if (pmf.k() != 2) throw Error(Errc::BadShape, "oracle requires k = 2");
  if (table.alphabet != pmf.alphabet_size(0)) {
    throw Error(Errc::BadShape, "encoder table alphabet does not match X");
  }
  if (probes.sets.size() != table.n) throw Error(Errc::BadShape, "need one probe set per position");
  for (const auto& set : probes.sets) {
    if (set.size() > 24) throw Error(Errc::InstanceTooLarge, "probe set larger than 24 bits");
    for (auto j : set) {
      if (j >= table.bits) throw Error(Errc::BadShape, "probe index beyond codeword length");
    }
  }
  const double states = static_cast<double>(table.n) *
                        std::log2(static_cast<double>(pmf.alphabet_size(0)) * pmf.alphabet_size(1));
  if (states > kOracleMaxLog2States + 1e-12) {
    throw Error(Errc::InstanceTooLarge, "n log2(|X||Y|) = " + std::to_string(states) + " > 26");
  }
}

// probed[x] = the bits of codeword(x) at `set`, packed MSB-first.
std::vector<std::uint32_t> probed_values(const EncoderTable& table,
                                         const std::vector<std::uint32_t>& set) {
  std::vector<std::uint32_t> out(table.codes.size());
  for (std::size_t x = 0; x < table.codes.size(); ++x) {
    std::uint32_t c = 0;
    for (auto j : set) c = (c << 1) | static_cast<std::uint32_t>(table.bit(x, j));
    out[x] = c;
  }
  return out;
}

// Accumulates P(X_i = a, c) for one slice and adds sum - max to `error`.
double slice_error(const std::vector<double>& weights, const std::vector<std::uint32_t>& probed,
                   std::size_t groups, int alphabet, std::size_t digit_div,
                   std::vector<double>& acc) {
  std::fill(acc.begin(), acc.end(), 0.0);
  for (std::size_t x = 0; x < weights.size(); ++x) {
    const std::size_t a = (x / digit_div) % alphabet;
    acc[probed[x] * alphabet + a] += weights[x];
  }
  double err = 0.0;
  for (std::size_t g = 0; g < groups; ++g) {
    double sum = 0.0;
    double best = 0.0;
    for (int a = 0; a < alphabet; ++a) {
      const double v = acc[g * alphabet + a];
      sum += v;
      best = std::max(best, v);
    }
    err += sum - best;
  }
  return err;
}

}  // namespace

EncoderTable EncoderTable::from_bin_hash(int alphabet, std::size_t n, std::size_t bits,
                                         const BinningKey& key) {
  if (bits == 0 || bits > 64) throw Error(Errc::InvalidConfig, "encoder table bits outside [1, 64]");
  EncoderTable t{alphabet, n, bits, {}};
  const std::size_t count = ipow(static_cast<std::size_t>(alphabet), n);
  t.codes.resize(count);
  BinHasher hasher(key, bits);
  BitString out(bits);
  Sequence seq(n, 0);
  for (std::size_t x = 0; x < count; ++x) {
    std::size_t v = x;
    for (std::size_t j = n; j-- > 0;) {
      seq[j] = static_cast<Symbol>(v % alphabet);
      v /= alphabet;
    }
    hasher.hash(seq, out);
    std::uint64_t code = 0;
    for (std::size_t j = 0; j < bits; ++j) code = (code << 1) | (out.get(j) ? 1u : 0u);
    t.codes[x] = code;
  }
  return t;
}

EncoderTable EncoderTable::identity(std::size_t n) {
  EncoderTable t{2, n, n, {}};
  t.codes.resize(ipow(2, n));
  for (std::size_t x = 0; x < t.codes.size(); ++x) t.codes[x] = x;
  return t;
}

ProbeSetFamily ProbeSetFamily::prefix(std::size_t n, std::size_t r) {
  ProbeSetFamily f;
  std::vector<std::uint32_t> set(r);
  for (std::size_t j = 0; j < r; ++j) set[j] = static_cast<std::uint32_t>(j);
  f.sets.assign(n, set);
  return f;
}

std::size_t ProbeSetFamily::max_size() const {
  std::size_t m = 0;
  for (const auto& s : sets) m = std::max(m, s.size());
  return m;
}

double exact_local_map_error(const JointPmf& pmf, const EncoderTable& table,
                             const ProbeSetFamily& probes, std::size_t position,
                             SideInformation side) {
  check_instance(pmf, table, probes);
  if (position >= table.n) throw Error(Errc::IndexOutOfRange, "position beyond n");
  const int mx = pmf.alphabet_size(0);
  const int my = pmf.alphabet_size(1);
  const std::size_t n = table.n;
  const auto& set = probes.sets[position];
  const auto probed = probed_values(table, set);
  const std::size_t groups = std::size_t{1} << set.size();
  const std::size_t digit_div = ipow(static_cast<std::size_t>(mx), n - 1 - position);
  std::vector<double> acc(groups * mx);

  if (side == SideInformation::None) {
    const auto px = pmf.marginal(0);
    std::vector<double> w{1.0};
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> next(w.size() * mx);
      for (std::size_t v = 0; v < w.size(); ++v)
        for (int a = 0; a < mx; ++a) next[v * mx + a] = w[v] * px[a];
      w = std::move(next);
    }
    return slice_error(w, probed, groups, mx, digit_div, acc);
  }

  // Outer loop over y^n; the x^n weights p(x^n, y^n) are built by expansion.
  double error = 0.0;
  const std::size_t ycount = ipow(static_cast<std::size_t>(my), n);
  Sequence y(n, 0);
  std::vector<double> w;
  w.reserve(table.codes.size());
  for (std::size_t yi = 0; yi < ycount; ++yi) {
    std::size_t v = yi;
    for (std::size_t j = n; j-- > 0;) {
      y[j] = static_cast<Symbol>(v % my);
      v /= my;
    }
    w.assign(1, 1.0);
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<double> next(w.size() * mx);
      for (std::size_t u = 0; u < w.size(); ++u)
        for (int a = 0; a < mx; ++a)
          next[u * mx + a] = w[u] * pmf.at(static_cast<std::size_t>(a) * my + y[j]);
      w = std::move(next);
    }
    error += slice_error(w, probed, groups, mx, digit_div, acc);
  }
  return error;
}

MaxLocalError max_local_error(const JointPmf& pmf, const EncoderTable& table,
                              const ProbeSetFamily& probes, SideInformation side) {
  MaxLocalError out;
  for (std::size_t i = 0; i < table.n; ++i) {
    const double e = exact_local_map_error(pmf, table, probes, i, side);
    out.per_position.push_back(e);
    if (i == 0 || e > out.error) {
      out.error = e;
      out.position = i;
    }
  }
  return out;
}

double rd_delta(double rate) {
  if (!(rate >= 0.0)) throw Error(Errc::InvalidConfig, "rate must be nonnegative");
  if (rate >= 1.0) throw Error(Errc::RateNotBelowEntropy, "rate >= H(X) = 1");
  const double target = 1.0 - rate;
  double lo = 0.0;
  double hi = 0.5;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (binary_entropy(mid) < target) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

RdFloorReport verify_rd_floor(const JointPmf& pmf, const EncoderTable& table,
                              const ProbeSetFamily& probes) {
  check_instance(pmf, table, probes);
  const auto px = pmf.marginal(0);
  if (pmf.alphabet_size(0) != 2 || std::abs(px[0] - 0.5) > kNormalizationTolerance) {
    throw Error(Errc::InvalidConfig, "rate-distortion floor needs a uniform binary X");
  }
  RdFloorReport r;
  for (std::size_t i = 0; i < table.n; ++i) {
    r.per_position.push_back(exact_local_map_error(pmf, table, probes, i, SideInformation::None));
    r.average_error += r.per_position.back();
  }
  r.average_error /= static_cast<double>(table.n);
  r.floor = table.bits >= table.n
                ? 0.0
                : rd_delta(static_cast<double>(table.bits) / static_cast<double>(table.n));
  r.satisfied = r.average_error >= r.floor - 1e-9;
  return r;
}

double exact_block_map_error(const BlockCodeParams& params, const BinningKey& key) {
  const int k = params.pmf.k();
  const std::size_t b = params.block_length;
  double log2_states = 0.0;
  for (int s = 0; s < k; ++s) log2_states += b * std::log2(params.pmf.alphabet_size(s));
  if (log2_states > kOracleMaxLog2States + 1e-12) {
    throw Error(Errc::InstanceTooLarge, "block tuple space above 2^26");
  }

  // Every sequence of every source with its codeword as a byte string.
  std::vector<std::vector<std::string>> codes(k);
  std::vector<std::size_t> counts(k);
  for (int s = 0; s < k; ++s) {
    const int m = params.pmf.alphabet_size(s);
    counts[s] = ipow(static_cast<std::size_t>(m), b);
    Sequence seq(b);
    for (std::size_t x = 0; x < counts[s]; ++x) {
      std::size_t v = x;
      for (std::size_t j = b; j-- > 0;) {
        seq[j] = static_cast<Symbol>(v % m);
        v /= m;
      }
      const auto h = bin_hash(key.with_source(s), seq, params.codeword_bits[s]);
      codes[s].emplace_back(h.to_string());
    }
  }

  std::map<std::string, double> best;
  std::vector<std::size_t> idx(k, 0);
  std::vector<Symbol> column(k);
  while (true) {
    double p = 1.0;
    for (std::size_t j = 0; j < b && p > 0.0; ++j) {
      for (int s = 0; s < k; ++s) {
        const std::size_t div = ipow(static_cast<std::size_t>(params.pmf.alphabet_size(s)), b - 1 - j);
        column[s] = static_cast<Symbol>((idx[s] / div) % params.pmf.alphabet_size(s));
      }
      p *= params.pmf.prob(column);
    }
    std::string bin;
    for (int s = 0; s < k; ++s) bin += codes[s][idx[s]] + "|";
    auto& slot = best[bin];
    slot = std::max(slot, p);
    int s = k - 1;
    while (s >= 0 && ++idx[s] == counts[s]) idx[s--] = 0;
    if (s < 0) break;
  }
  double correct = 0.0;
  for (const auto& [bin, p] : best) correct += p;
  return 1.0 - correct;
}

OracleReport oracle_report(const JointPmf& pmf, const EncoderTable& table,
                           const ProbeSetFamily& probes) {
  OracleReport r;
  r.n = table.n;
  r.rate = static_cast<double>(table.bits) / static_cast<double>(table.n);
  r.probe_budget = probes.max_size();
  r.local = max_local_error(pmf, table, probes);
  const auto px = pmf.marginal(0);
  if (pmf.alphabet_size(0) == 2 && std::abs(px[0] - 0.5) <= kNormalizationTolerance) {
    r.rd = verify_rd_floor(pmf, table, probes);
  }
  return r;
}

nlohmann::json to_json(const OracleReport& report) {
  nlohmann::json j;
  j["n"] = report.n;
  j["rate"] = report.rate;
  j["probe_budget"] = report.probe_budget;
  j["per_i_error"] = report.local.per_position;
  j["max_i"] = report.local.position;
  j["max_error"] = report.local.error;
  if (report.rd) {
    j["rd_floor"] = report.rd->floor;
    j["rd_average_error"] = report.rd->average_error;
    j["floor_satisfied"] = report.rd->satisfied;
  } else {
    j["rd_floor"] = nullptr;
    j["rd_average_error"] = nullptr;
    j["floor_satisfied"] = nullptr;
  }
  return j;
}

}  // namespace swlocal
