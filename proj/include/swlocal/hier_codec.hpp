#pragma once

// Hierarchical multilevel codec. Level 0 is the concatenation of b0-block
// Slepian-Wolf codes; level l >= 1 stores one random hash per n_l-superblock
// and per source. A local decode at level l_d reads every codeword of the
// enclosing n_{l_d}-superblock, MAP-decodes level 0, then refines level by
// level with a bounded-distance candidate search.

#include <cstdint>
#include <span>
#include <vector>

#include "swlocal/bits.hpp"
#include "swlocal/container.hpp"
#include "swlocal/schedule.hpp"

namespace swlocal {

struct LocalDecodeResult {
  std::uint64_t position = 0;  // zero-based
  int level = 0;
  std::vector<Symbol> symbols;  // one per source
  ProbeLog probes;
  bool fallback = false;  // some level's search returned the zero block
};

CompressedContainer hier_encode(const CodecSchedule& schedule, std::span<const Sequence> sequences);

// Codewords read for one local decode, grouped by level and block.
struct ProbedSuperblock {
  int level_d = 0;
  std::uint64_t superblock = 0;  // index of the level-l_d block holding i
  // codewords[l][m][s]: m-th level-l block inside the superblock, source s.
  std::vector<std::vector<std::vector<BitString>>> codewords;
};

// Probing phase of the local decoder: reads, through the probe log only, all
// level-0..l_d codewords covering the superblock of position i.
ProbedSuperblock gather_superblock(const CodecSchedule& schedule,
                                   const CompressedContainer& container, std::uint64_t position,
                                   int level_d, ProbeLog& log);

// Parameters of one refinement step, independent of a schedule so that tiny
// hash lengths can be exercised directly.
struct CandidateSearchSpec {
  std::vector<int> alphabet_sizes;
  std::uint64_t sub_length = 0;     // n_{l-1}
  std::uint64_t sub_blocks = 0;     // b_l
  std::uint64_t max_differing = 0;  // t = floor(eps_l b_l)
  std::vector<std::uint64_t> codeword_bits;

  static CandidateSearchSpec from_schedule(const CodecSchedule& schedule, int level);
};

enum class SearchOutcome { Unique, Ambiguous, None };

struct CandidateSearchResult {
  SearchOutcome outcome = SearchOutcome::None;
  std::vector<Sequence> block;  // accepted candidate, or all-zero on fallback
  std::uint64_t hashes = 0;     // hash evaluations performed
};

// Default cap on hash evaluations per candidate search.
inline constexpr double kMaxSearchWork = double(1u << 26);

// Hash evaluations the filter-join search performs in the worst case:
// sum_{w<=t} C(b_l, w) * sum_s |X_s|^(w n_{l-1}).
double candidate_search_work(const CandidateSearchSpec& spec);

// Number of candidates in the search set:
// sum_{w<=t} C(b_l, w) * (prod_s |X_s|^(n_{l-1}) - 1)^w.
long double candidate_search_space_size(const CandidateSearchSpec& spec);

// Accepts candidates that differ from `previous` in at most t sub-block
// positions (a position differs when any source differs there) and match all
// k hashes. Enumeration: weight, then positions, then values, lexicographic;
// stops at the second acceptance. Throws InstanceTooLarge above `max_work`.
CandidateSearchResult candidate_search(const CandidateSearchSpec& spec, const BinningKey& key,
                                       std::span<const Sequence> previous,
                                       std::span<const BitString> codewords,
                                       double max_work = kMaxSearchWork);

// i is zero-based.
LocalDecodeResult hier_local_decode(const CodecSchedule& schedule,
                                    const CompressedContainer& container, std::uint64_t position,
                                    int level_d, double max_work = kMaxSearchWork);

struct FullDecodeResult {
  std::vector<Sequence> sequences;
  bool fallback = false;
};

FullDecodeResult hier_full_decode(const CodecSchedule& schedule,
                                  const CompressedContainer& container,
                                  double max_work = kMaxSearchWork);

}  // namespace swlocal
