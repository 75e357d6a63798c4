#pragma once

// Finite-alphabet joint sources: validation, entropies, the Slepian-Wolf
// region, confusability, the X - Y - X~ coupling, the non-confusable symbol
// merge, and i.i.d. sampling.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace swlocal {

using Symbol = std::uint8_t;
using Sequence = std::vector<Symbol>;

inline constexpr double kNormalizationTolerance = 1e-9;
inline constexpr double kRegionTolerance = 1e-12;

enum class SupportCheck {
  Strict,   // every marginal symbol must have positive probability
  Relaxed,  // allow zero-probability marginal symbols (point masses etc.)
};

// Joint pmf over k sources with alphabets 0..m_s-1, stored row-major with
// source 0 the most significant index.
class JointPmf {
 public:
  static JointPmf create(std::vector<int> alphabet_sizes, std::vector<double> probs,
                         SupportCheck check = SupportCheck::Strict);

  int k() const noexcept { return static_cast<int>(sizes_.size()); }
  const std::vector<int>& alphabet_sizes() const noexcept { return sizes_; }
  int alphabet_size(int source) const { return sizes_.at(source); }
  std::size_t size() const noexcept { return probs_.size(); }

  const std::vector<double>& probs() const noexcept { return probs_; }
  // log2 of every entry; -inf for zero entries.
  const std::vector<double>& log2_probs() const noexcept { return log2_probs_; }

  double at(std::size_t flat) const { return probs_[flat]; }
  double prob(std::span<const Symbol> tuple) const { return probs_[flat_index(tuple)]; }

  std::size_t flat_index(std::span<const Symbol> tuple) const;
  std::vector<Symbol> tuple_of(std::size_t flat) const;
  std::size_t stride(int source) const { return strides_.at(source); }

  std::vector<double> marginal(int source) const;

  friend bool operator==(const JointPmf& a, const JointPmf& b) {
    return a.sizes_ == b.sizes_ && a.probs_ == b.probs_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::vector<double> probs_;
  std::vector<double> log2_probs_;
};

// Strict validation (rejects zero marginals).
JointPmf validate_pmf(std::vector<int> alphabet_sizes, std::vector<double> probs);

// Built-in generators.
JointPmf dsbs(double rho);
JointPmf zchannel(double p, double eps);
JointPmf identity_channel(int m);

// Nested-array JSON: {"alphabet_sizes":[2,2],"probs":[[...],[...]]}.
// An optional "allow_zero_marginals": true relaxes the support check.
JointPmf pmf_from_json(const nlohmann::json& j);
nlohmann::json pmf_to_json(const JointPmf& pmf);

// Accepts a generator name (dsbs:<rho>, zchannel:<p>:<eps>, identity:<m>),
// inline JSON, or a path to a JSON file.
JointPmf pmf_from_spec(std::string_view spec);

double binary_entropy(double p);

struct EntropyReport {
  int k = 0;
  std::vector<double> marginal;         // H(X_s)
  double joint = 0.0;                   // H(X_1..X_k)
  std::vector<double> subset_entropy;   // H(X_T) indexed by bitmask T
  std::vector<double> conditional;      // H(X_S | X_{S^c}) indexed by bitmask S

  double conditional_of(std::uint32_t subset_mask) const { return conditional.at(subset_mask); }
  std::uint32_t full_mask() const { return (1u << k) - 1u; }
};

EntropyReport entropy_stats(const JointPmf& pmf);

struct RegionCheck {
  bool inside = false;
  std::vector<std::uint32_t> violated;  // subset bitmasks S with R(S) < H(X_S|X_{S^c})
};

RegionCheck sw_region_contains(const EntropyReport& report, std::span<const double> rates);

struct PairWitness {
  Symbol first = 0;
  Symbol second = 0;
  std::vector<Symbol> completion;  // symbols of the other sources, in source order
};

struct ConfusabilityReport {
  int source = 0;
  bool confusable = false;
  // Lowest lexicographic pair with no completing tuple (when not confusable).
  std::optional<std::pair<Symbol, Symbol>> witness_pair;
  // One completing tuple per confusable pair.
  std::vector<PairWitness> pair_witnesses;
};

ConfusabilityReport is_confusable(const JointPmf& pmf, int source);

// |X| x |X| coupling matrix p(x, x~), row-major. Requires k = 2.
struct SquareMatrix {
  int dim = 0;
  std::vector<double> values;
  double operator()(int r, int c) const { return values[static_cast<std::size_t>(r) * dim + c]; }
};

SquareMatrix coupling(const JointPmf& pmf);
bool coupling_full_support(const JointPmf& pmf);

struct ReductionSpec {
  Symbol merged_first = 0;   // x_1
  Symbol merged_second = 0;  // x_2; both map to this reduced symbol
  std::vector<Symbol> forward;         // u(x) for every X symbol
  std::vector<Symbol> disambiguation;  // d(y) for every Y symbol
  double reduced_entropy = 0.0;        // H(U)
  double source_entropy = 0.0;         // H(X)

  Symbol merged_symbol() const noexcept { return merged_second; }
};

ReductionSpec build_reduction(const JointPmf& pmf);
Symbol reconstruct_from_reduction(const ReductionSpec& spec, Symbol u, Symbol y);
nlohmann::json reduction_to_json(const ReductionSpec& spec);

// k i.i.d. sequences of length n; inverse CDF over the flattened tensor.
std::vector<Sequence> sample(const JointPmf& pmf, std::size_t n, std::uint64_t seed);

}  // namespace swlocal
