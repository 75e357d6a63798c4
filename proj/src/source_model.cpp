#include "swlocal/source_model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "swlocal/errors.hpp"

namespace swlocal {

namespace {

double xlog2x(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size()) {
    throw Error(Errc::InvalidConfig,
                "cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

void flatten(const nlohmann::json& node, const std::vector<int>& sizes, std::size_t depth,
             std::vector<double>& out) {
  if (depth == sizes.size()) {
    if (!node.is_number()) throw Error(Errc::BadShape, "pmf leaf is not a number");
    out.push_back(node.get<double>());
    return;
  }
  if (!node.is_array() || node.size() != static_cast<std::size_t>(sizes[depth])) {
    throw Error(Errc::BadShape, "pmf nesting at depth " + std::to_string(depth) +
                                    " does not match alphabet size " +
                                    std::to_string(sizes[depth]));
  }
  for (const auto& child : node) flatten(child, sizes, depth + 1, out);
}

nlohmann::json nest(const JointPmf& pmf, std::size_t depth, std::size_t offset) {
  const auto& sizes = pmf.alphabet_sizes();
  auto arr = nlohmann::json::array();
  const std::size_t stride = pmf.stride(static_cast<int>(depth));
  for (int x = 0; x < sizes[depth]; ++x) {
    const std::size_t at = offset + static_cast<std::size_t>(x) * stride;
    if (depth + 1 == sizes.size()) arr.push_back(pmf.at(at));
    else arr.push_back(nest(pmf, depth + 1, at));
  }
  return arr;
}

// Sum of the pmf onto the sources selected by `mask`, in increasing source order.
std::vector<double> subset_marginal(const JointPmf& pmf, std::uint32_t mask) {
  std::size_t size = 1;
  for (int s = 0; s < pmf.k(); ++s)
    if (mask & (1u << s)) size *= static_cast<std::size_t>(pmf.alphabet_size(s));
  std::vector<double> out(size, 0.0);
  for (std::size_t flat = 0; flat < pmf.size(); ++flat) {
    const auto t = pmf.tuple_of(flat);
    std::size_t idx = 0;
    for (int s = 0; s < pmf.k(); ++s)
      if (mask & (1u << s)) idx = idx * pmf.alphabet_size(s) + t[s];
    out[idx] += pmf.at(flat);
  }
  return out;
}

}  // namespace

JointPmf JointPmf::create(std::vector<int> alphabet_sizes, std::vector<double> probs,
                          SupportCheck check) {
  if (alphabet_sizes.size() < 2) throw Error(Errc::BadShape, "need at least 2 sources");
  if (alphabet_sizes.size() > 16) throw Error(Errc::BadShape, "at most 16 sources supported");
  std::size_t total = 1;
  for (int m : alphabet_sizes) {
    if (m < 2 || m > 256) {
      throw Error(Errc::BadShape, "alphabet size " + std::to_string(m) + " outside [2, 256]");
    }
    if (total > (std::size_t{1} << 40) / static_cast<std::size_t>(m)) {
      throw Error(Errc::BadShape, "joint alphabet too large");
    }
    total *= static_cast<std::size_t>(m);
  }
  if (probs.size() != total) {
    throw Error(Errc::BadShape, "expected " + std::to_string(total) + " probabilities, got " +
                                    std::to_string(probs.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!std::isfinite(probs[i]) || probs[i] < 0.0) {
      throw Error(Errc::NegativeProbability,
                  "entry " + std::to_string(i) + " is negative or not finite");
    }
    sum += probs[i];
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << sum;
    throw Error(Errc::NotNormalized, os.str());
  }
  // Rescale only visible deviations so that serialize/parse is idempotent.
  if (std::abs(sum - 1.0) > 1e-14) {
    for (auto& p : probs) p /= sum;
  }

  JointPmf pmf;
  pmf.sizes_ = std::move(alphabet_sizes);
  pmf.strides_.assign(pmf.sizes_.size(), 1);
  for (int s = pmf.k() - 2; s >= 0; --s) pmf.strides_[s] = pmf.strides_[s + 1] * pmf.sizes_[s + 1];
  pmf.probs_ = std::move(probs);
  pmf.log2_probs_.resize(pmf.probs_.size());
  for (std::size_t i = 0; i < pmf.probs_.size(); ++i) {
    pmf.log2_probs_[i] = pmf.probs_[i] > 0.0 ? std::log2(pmf.probs_[i])
                                              : -std::numeric_limits<double>::infinity();
  }

  if (check == SupportCheck::Strict) {
    for (int s = 0; s < pmf.k(); ++s) {
      const auto m = pmf.marginal(s);
      for (std::size_t x = 0; x < m.size(); ++x) {
        if (!(m[x] > 0.0)) {
          throw Error(Errc::ZeroMarginal, "source " + std::to_string(s) + " symbol " +
                                              std::to_string(x) + " has zero marginal");
        }
      }
    }
  }
  return pmf;
}

std::size_t JointPmf::flat_index(std::span<const Symbol> tuple) const {
  std::size_t idx = 0;
  for (std::size_t s = 0; s < sizes_.size(); ++s) idx += tuple[s] * strides_[s];
  return idx;
}

std::vector<Symbol> JointPmf::tuple_of(std::size_t flat) const {
  std::vector<Symbol> t(sizes_.size());
  for (std::size_t s = 0; s < sizes_.size(); ++s) {
    t[s] = static_cast<Symbol>(flat / strides_[s]);
    flat %= strides_[s];
  }
  return t;
}

std::vector<double> JointPmf::marginal(int source) const {
  std::vector<double> m(sizes_.at(source), 0.0);
  for (std::size_t flat = 0; flat < probs_.size(); ++flat) {
    m[(flat / strides_[source]) % sizes_[source]] += probs_[flat];
  }
  return m;
}

JointPmf validate_pmf(std::vector<int> alphabet_sizes, std::vector<double> probs) {
  return JointPmf::create(std::move(alphabet_sizes), std::move(probs), SupportCheck::Strict);
}

JointPmf dsbs(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw Error(Errc::InvalidConfig, "dsbs: rho outside [0, 1]");
  return validate_pmf({2, 2}, {0.5 * (1 - rho), 0.5 * rho, 0.5 * rho, 0.5 * (1 - rho)});
}

JointPmf zchannel(double p, double eps) {
  if (!(p > 0.0 && p < 1.0) || !(eps >= 0.0 && eps < 1.0)) {
    throw Error(Errc::InvalidConfig, "zchannel: need 0 < p < 1 and 0 <= eps < 1");
  }
  // Input 0 always reaches output 0; input 1 flips to 0 with probability eps.
  return validate_pmf({2, 2}, {1 - p, 0.0, p * eps, p * (1 - eps)});
}

JointPmf identity_channel(int m) {
  if (m < 2 || m > 256) throw Error(Errc::BadShape, "identity: m outside [2, 256]");
  std::vector<double> probs(static_cast<std::size_t>(m) * m, 0.0);
  for (int x = 0; x < m; ++x) probs[static_cast<std::size_t>(x) * m + x] = 1.0 / m;
  return validate_pmf({m, m}, std::move(probs));
}

JointPmf pmf_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("alphabet_sizes") || !j.contains("probs")) {
    throw Error(Errc::BadShape, "pmf JSON needs 'alphabet_sizes' and 'probs'");
  }
  std::vector<int> sizes;
  for (const auto& v : j.at("alphabet_sizes")) {
    if (!v.is_number_integer()) throw Error(Errc::BadShape, "alphabet size must be an integer");
    sizes.push_back(v.get<int>());
  }
  for (int m : sizes) {
    if (m < 2 || m > 256) throw Error(Errc::BadShape, "alphabet size outside [2, 256]");
  }
  std::vector<double> flat;
  flatten(j.at("probs"), sizes, 0, flat);
  const bool relaxed = j.value("allow_zero_marginals", false);
  return JointPmf::create(std::move(sizes), std::move(flat),
                          relaxed ? SupportCheck::Relaxed : SupportCheck::Strict);
}

nlohmann::json pmf_to_json(const JointPmf& pmf) {
  nlohmann::json j;
  j["alphabet_sizes"] = pmf.alphabet_sizes();
  j["probs"] = nest(pmf, 0, 0);
  for (int s = 0; s < pmf.k(); ++s) {
    for (double p : pmf.marginal(s)) {
      if (!(p > 0.0)) j["allow_zero_marginals"] = true;
    }
  }
  return j;
}

JointPmf pmf_from_spec(std::string_view spec) {
  const auto parts = split(spec, ':');
  if (parts[0] == "dsbs" && parts.size() == 2) return dsbs(parse_double(parts[1], "rho"));
  if (parts[0] == "zchannel" && parts.size() == 3) {
    return zchannel(parse_double(parts[1], "p"), parse_double(parts[2], "eps"));
  }
  if (parts[0] == "identity" && parts.size() == 2) {
    return identity_channel(static_cast<int>(parse_double(parts[1], "m")));
  }
  const auto first = spec.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && spec[first] == '{') {
    try {
      return pmf_from_json(nlohmann::json::parse(spec));
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::BadShape, std::string("inline pmf JSON: ") + e.what());
    }
  }
  const std::filesystem::path path{std::string(spec)};
  std::ifstream in(path);
  if (!in) throw Error(Errc::Io, "cannot open pmf '" + std::string(spec) + "'");
  try {
    return pmf_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::BadShape, "pmf file '" + std::string(spec) + "': " + e.what());
  }
}

double binary_entropy(double p) { return xlog2x(p) + xlog2x(1.0 - p); }

EntropyReport entropy_stats(const JointPmf& pmf) {
  EntropyReport r;
  r.k = pmf.k();
  const std::uint32_t full = r.full_mask();
  r.subset_entropy.assign(full + 1, 0.0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    double h = 0.0;
    for (double p : subset_marginal(pmf, mask)) h += xlog2x(p);
    r.subset_entropy[mask] = h;
  }
  r.joint = r.subset_entropy[full];
  for (int s = 0; s < r.k; ++s) r.marginal.push_back(r.subset_entropy[1u << s]);
  r.conditional.assign(full + 1, 0.0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    // Clamp tiny negative rounding; conditional entropies are nonnegative.
    r.conditional[mask] = std::max(0.0, r.joint - r.subset_entropy[full & ~mask]);
  }
  return r;
}

RegionCheck sw_region_contains(const EntropyReport& report, std::span<const double> rates) {
  if (rates.size() != static_cast<std::size_t>(report.k)) {
    throw Error(Errc::BadShape, "expected " + std::to_string(report.k) + " rates");
  }
  for (double r : rates) {
    if (!(r >= 0.0)) throw Error(Errc::InvalidConfig, "rates must be nonnegative");
  }
  RegionCheck out;
  for (std::uint32_t mask = 1; mask <= report.full_mask(); ++mask) {
    double sum = 0.0;
    for (int s = 0; s < report.k; ++s)
      if (mask & (1u << s)) sum += rates[s];
    if (sum < report.conditional[mask] - kRegionTolerance) out.violated.push_back(mask);
  }
  out.inside = out.violated.empty();
  return out;
}

ConfusabilityReport is_confusable(const JointPmf& pmf, int source) {
  if (source < 0 || source >= pmf.k()) {
    throw Error(Errc::IndexOutOfRange, "source index " + std::to_string(source));
  }
  ConfusabilityReport rep;
  rep.source = source;
  const int m = pmf.alphabet_size(source);
  const std::size_t stride = pmf.stride(source);
  // Enumerate completions of the other sources as flat indices with the
  // source's own digit set to zero, in lexicographic order.
  std::vector<std::size_t> completions;
  for (std::size_t flat = 0; flat < pmf.size(); ++flat) {
    if ((flat / stride) % m == 0) completions.push_back(flat);
  }
  rep.confusable = true;
  for (int a = 0; a < m; ++a) {
    for (int b = a + 1; b < m; ++b) {
      bool found = false;
      for (std::size_t base : completions) {
        if (pmf.at(base + a * stride) > 0.0 && pmf.at(base + b * stride) > 0.0) {
          PairWitness w{static_cast<Symbol>(a), static_cast<Symbol>(b), {}};
          const auto t = pmf.tuple_of(base);
          for (int s = 0; s < pmf.k(); ++s)
            if (s != source) w.completion.push_back(t[s]);
          rep.pair_witnesses.push_back(std::move(w));
          found = true;
          break;
        }
      }
      if (!found && rep.confusable) {
        rep.confusable = false;
        rep.witness_pair = std::pair{static_cast<Symbol>(a), static_cast<Symbol>(b)};
      }
    }
  }
  return rep;
}

SquareMatrix coupling(const JointPmf& pmf) {
  if (pmf.k() != 2) throw Error(Errc::BadShape, "coupling requires k = 2");
  const int mx = pmf.alphabet_size(0);
  const int my = pmf.alphabet_size(1);
  const auto py = pmf.marginal(1);
  SquareMatrix c{mx, std::vector<double>(static_cast<std::size_t>(mx) * mx, 0.0)};
  for (int y = 0; y < my; ++y) {
    if (!(py[y] > 0.0)) continue;
    for (int x = 0; x < mx; ++x) {
      const double pxy = pmf.at(static_cast<std::size_t>(x) * my + y);
      if (pxy == 0.0) continue;
      for (int xt = 0; xt < mx; ++xt) {
        c.values[static_cast<std::size_t>(x) * mx + xt] +=
            pxy * pmf.at(static_cast<std::size_t>(xt) * my + y) / py[y];
      }
    }
  }
  return c;
}

bool coupling_full_support(const JointPmf& pmf) {
  const auto c = coupling(pmf);
  return std::all_of(c.values.begin(), c.values.end(), [](double v) { return v > 0.0; });
}

ReductionSpec build_reduction(const JointPmf& pmf) {
  if (pmf.k() != 2) throw Error(Errc::BadShape, "reduction requires k = 2");
  const auto conf = is_confusable(pmf, 0);
  if (conf.confusable) {
    throw Error(Errc::SourceIsConfusable, "every X symbol pair shares a Y symbol");
  }
  const auto [x1, x2] = *conf.witness_pair;
  const int mx = pmf.alphabet_size(0);
  const int my = pmf.alphabet_size(1);

  ReductionSpec spec;
  spec.merged_first = x1;
  spec.merged_second = x2;
  spec.forward.resize(mx);
  for (int x = 0; x < mx; ++x) spec.forward[x] = static_cast<Symbol>(x);
  spec.forward[x1] = x2;
  spec.disambiguation.resize(my);
  for (int y = 0; y < my; ++y) {
    const bool second_only = pmf.at(static_cast<std::size_t>(x1) * my + y) == 0.0 &&
                             pmf.at(static_cast<std::size_t>(x2) * my + y) > 0.0;
    spec.disambiguation[y] = second_only ? x2 : x1;
  }
  const auto px = pmf.marginal(0);
  std::vector<double> pu(mx, 0.0);
  for (int x = 0; x < mx; ++x) pu[spec.forward[x]] += px[x];
  for (int x = 0; x < mx; ++x) {
    spec.reduced_entropy += xlog2x(pu[x]);
    spec.source_entropy += xlog2x(px[x]);
  }
  return spec;
}

Symbol reconstruct_from_reduction(const ReductionSpec& spec, Symbol u, Symbol y) {
  if (u == spec.merged_symbol()) return spec.disambiguation.at(y);
  return u;
}

nlohmann::json reduction_to_json(const ReductionSpec& spec) {
  nlohmann::json j;
  j["merged_pair"] = {spec.merged_first, spec.merged_second};
  j["forward"] = spec.forward;
  j["disambiguation"] = spec.disambiguation;
  j["reduced_entropy"] = spec.reduced_entropy;
  j["source_entropy"] = spec.source_entropy;
  return j;
}

std::vector<Sequence> sample(const JointPmf& pmf, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(Errc::InvalidConfig, "sample length must be >= 1");
  std::vector<double> cdf(pmf.size());
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < pmf.size(); ++i) {
    acc += pmf.at(i);
    cdf[i] = acc;
    if (pmf.at(i) > 0.0) last_positive = i;
  }
  std::vector<Sequence> out(pmf.k(), Sequence(n));
  std::mt19937_64 rng(seed);
  for (std::size_t t = 0; t < n; ++t) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    std::size_t flat = it == cdf.end() ? last_positive : static_cast<std::size_t>(it - cdf.begin());
    for (int s = 0; s < pmf.k(); ++s) {
      out[s][t] = static_cast<Symbol>((flat / pmf.stride(s)) % pmf.alphabet_size(s));
    }
  }
  return out;
}

}  // namespace swlocal
