#include "swlocal/hier_codec.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "swlocal/binning.hpp"
#include "swlocal/errors.hpp"

namespace swlocal {

namespace {

double binomial(std::uint64_t n, std::uint64_t r) {
  double c = 1.0;
  for (std::uint64_t i = 0; i < r; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

bool next_combination(std::vector<std::uint64_t>& pos, std::uint64_t n) {
  const std::size_t w = pos.size();
  for (std::size_t i = w; i-- > 0;) {
    if (pos[i] < n - (w - i)) {
      ++pos[i];
      for (std::size_t j = i + 1; j < w; ++j) pos[j] = pos[j - 1] + 1;
      return true;
    }
  }
  return false;
}

bool next_values(Sequence& v, int alphabet) {
  for (std::size_t i = v.size(); i-- > 0;) {
    if (++v[i] < alphabet) return true;
    v[i] = 0;
  }
  return false;
}

std::vector<Sequence> pad_sequences(const CodecSchedule& schedule, std::span<const Sequence> seqs) {
  if (seqs.size() != static_cast<std::size_t>(schedule.k())) {
    throw Error(Errc::LengthMismatch, "expected " + std::to_string(schedule.k()) + " sequences");
  }
  std::vector<Sequence> padded;
  for (int s = 0; s < schedule.k(); ++s) {
    if (seqs[s].size() != schedule.true_n()) {
      throw Error(Errc::LengthMismatch, "sequence " + std::to_string(s) + " has length " +
                                            std::to_string(seqs[s].size()) + ", schedule n = " +
                                            std::to_string(schedule.true_n()));
    }
    for (Symbol x : seqs[s]) {
      if (x >= schedule.pmf().alphabet_size(s)) {
        throw Error(Errc::BadShape, "symbol outside alphabet of source " + std::to_string(s));
      }
    }
    Sequence p(seqs[s]);
    p.resize(schedule.padded_n(), 0);
    padded.push_back(std::move(p));
  }
  return padded;
}

struct SuperblockEstimate {
  std::vector<Sequence> symbols;
  bool fallback = false;
};

SuperblockEstimate decode_superblock(const CodecSchedule& schedule, const ProbedSuperblock& probed,
                                     double max_work) {
  const int k = schedule.k();
  const int ld = probed.level_d;
  const std::uint64_t span_len = schedule.level(ld).length;
  const std::uint64_t start = probed.superblock * span_len;
  const Seed128& seed = schedule.options().seed;

  SuperblockEstimate est;
  est.symbols.assign(k, Sequence(span_len, 0));

  const auto params = schedule.level0_params();
  const std::uint64_t b0 = schedule.options().b0;
  for (std::uint64_t m = 0; m < span_len / b0; ++m) {
    const BinningKey key{seed, 0, 0, start / b0 + m};
    const auto blocks = sw_block_map_decode(params, key, probed.codewords[0][m]);
    for (int s = 0; s < k; ++s) std::copy(blocks[s].begin(), blocks[s].end(), est.symbols[s].begin() + m * b0);
  }

  for (int l = 1; l <= ld; ++l) {
    const auto spec = CandidateSearchSpec::from_schedule(schedule, l);
    const std::uint64_t len = schedule.level(l).length;
    for (std::uint64_t m = 0; m < span_len / len; ++m) {
      std::vector<Sequence> prev(k);
      for (int s = 0; s < k; ++s) {
        prev[s].assign(est.symbols[s].begin() + m * len, est.symbols[s].begin() + (m + 1) * len);
      }
      const BinningKey key{seed, 0, static_cast<std::uint8_t>(l), start / len + m};
      const auto res = candidate_search(spec, key, prev, probed.codewords[l][m], max_work);
      est.fallback |= res.outcome != SearchOutcome::Unique;
      for (int s = 0; s < k; ++s) {
        std::copy(res.block[s].begin(), res.block[s].end(), est.symbols[s].begin() + m * len);
      }
    }
  }
  return est;
}

}  // namespace

CompressedContainer hier_encode(const CodecSchedule& schedule, std::span<const Sequence> sequences) {
  const auto padded = pad_sequences(schedule, sequences);
  auto container = CompressedContainer::allocate(schedule);
  const Seed128& seed = schedule.options().seed;
  for (int l = 0; l <= schedule.max_level(); ++l) {
    const std::uint64_t len = schedule.level(l).length;
    for (int s = 0; s < schedule.k(); ++s) {
      const std::uint64_t bits = schedule.level(l).codeword_bits[s];
      BitString cw(bits);
      auto& arr = container.array(s, l);
      for (std::uint64_t j = 0; j < schedule.blocks_at(l); ++j) {
        BinningKey key{seed, static_cast<std::uint8_t>(s), static_cast<std::uint8_t>(l), j};
        cw = bin_hash(key, std::span<const Symbol>(padded[s]).subspan(j * len, len), bits);
        arr.copy_from(cw, 0, j * bits, bits);
      }
    }
  }
  return container;
}

ProbedSuperblock gather_superblock(const CodecSchedule& schedule,
                                   const CompressedContainer& container, std::uint64_t position,
                                   int level_d, ProbeLog& log) {
  if (level_d < 0 || level_d > schedule.max_level()) {
    throw Error(Errc::LevelOutOfRange, "level " + std::to_string(level_d));
  }
  if (position >= schedule.true_n()) {
    throw Error(Errc::IndexOutOfRange, "position " + std::to_string(position) + " outside [0, " +
                                           std::to_string(schedule.true_n()) + ")");
  }
  ProbedSuperblock out;
  out.level_d = level_d;
  const std::uint64_t span_len = schedule.level(level_d).length;
  out.superblock = position / span_len;
  ProbeReader reader(container, log);
  out.codewords.resize(level_d + 1);
  for (int l = 0; l <= level_d; ++l) {
    const std::uint64_t len = schedule.level(l).length;
    const std::uint64_t count = span_len / len;
    const std::uint64_t first = out.superblock * count;
    for (std::uint64_t m = 0; m < count; ++m) {
      std::vector<BitString> cws;
      for (int s = 0; s < schedule.k(); ++s) {
        const std::uint64_t bits = schedule.level(l).codeword_bits[s];
        cws.push_back(reader.read(s, l, (first + m) * bits, bits));
      }
      out.codewords[l].push_back(std::move(cws));
    }
  }
  return out;
}

CandidateSearchSpec CandidateSearchSpec::from_schedule(const CodecSchedule& schedule, int level) {
  if (level < 1 || level > schedule.max_level()) {
    throw Error(Errc::LevelOutOfRange, "candidate search level " + std::to_string(level));
  }
  const auto& lp = schedule.level(level);
  return {schedule.pmf().alphabet_sizes(), schedule.level(level - 1).length, lp.sub_blocks,
          lp.max_differing, lp.codeword_bits};
}

double candidate_search_work(const CandidateSearchSpec& spec) {
  double work = 0.0;
  for (std::uint64_t w = 0; w <= spec.max_differing; ++w) {
    double per_pattern = 0.0;
    for (int m : spec.alphabet_sizes) {
      per_pattern += std::pow(static_cast<double>(m), static_cast<double>(w * spec.sub_length));
    }
    work += binomial(spec.sub_blocks, w) * per_pattern;
  }
  return work;
}

long double candidate_search_space_size(const CandidateSearchSpec& spec) {
  long double joint = 1.0L;
  for (int m : spec.alphabet_sizes) {
    joint *= std::pow(static_cast<long double>(m), static_cast<long double>(spec.sub_length));
  }
  long double total = 0.0L;
  for (std::uint64_t w = 0; w <= spec.max_differing; ++w) {
    total += static_cast<long double>(binomial(spec.sub_blocks, w)) *
             std::pow(joint - 1.0L, static_cast<long double>(w));
  }
  return total;
}

CandidateSearchResult candidate_search(const CandidateSearchSpec& spec, const BinningKey& key,
                                       std::span<const Sequence> previous,
                                       std::span<const BitString> codewords, double max_work) {
  const std::size_t k = spec.alphabet_sizes.size();
  const std::uint64_t sub = spec.sub_length;
  const std::uint64_t len = sub * spec.sub_blocks;
  if (previous.size() != k || codewords.size() != k) {
    throw Error(Errc::LengthMismatch, "candidate search: expected one block per source");
  }
  for (std::size_t s = 0; s < k; ++s) {
    if (previous[s].size() != len || codewords[s].size() != spec.codeword_bits[s]) {
      throw Error(Errc::LengthMismatch, "candidate search: block or codeword length mismatch");
    }
  }
  if (spec.max_differing > 64) throw Error(Errc::InstanceTooLarge, "t > 64");
  const double work = candidate_search_work(spec);
  if (!(work <= max_work)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "candidate search needs ~%.3g hash evaluations (cap %.3g)", work,
                  max_work);
    throw Error(Errc::InstanceTooLarge, buf);
  }

  CandidateSearchResult result;
  std::vector<BinHasher> hashers;
  for (std::size_t s = 0; s < k; ++s) {
    hashers.emplace_back(key.with_source(static_cast<int>(s)), spec.codeword_bits[s]);
  }
  std::vector<Sequence> accepted;
  int accepted_count = 0;

  // Weight 0: the previous estimate itself.
  {
    bool all = true;
    for (std::size_t s = 0; s < k && all; ++s) {
      ++result.hashes;
      all = hashers[s].matches(previous[s], codewords[s]);
    }
    if (all) {
      accepted.assign(previous.begin(), previous.end());
      accepted_count = 1;
    }
  }

  std::vector<Sequence> work_blocks(previous.begin(), previous.end());
  for (std::uint64_t w = 1; w <= spec.max_differing && w <= spec.sub_blocks && accepted_count < 2; ++w) {
    std::vector<std::uint64_t> pos(w);
    for (std::uint64_t i = 0; i < w; ++i) pos[i] = i;
    const std::uint64_t full_mask = w == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << w) - 1;
    do {
      // Per-source filter: every assignment at the chosen positions whose
      // modified block matches that source's hash, with a mask of positions
      // where it departs from the previous estimate.
      std::vector<std::vector<std::pair<Sequence, std::uint64_t>>> lists(k);
      bool empty = false;
      for (std::size_t s = 0; s < k && !empty; ++s) {
        const int m = spec.alphabet_sizes[s];
        Sequence vals(w * sub, 0);
        auto& blk = work_blocks[s];
        do {
          std::uint64_t diff = 0;
          for (std::uint64_t q = 0; q < w; ++q) {
            for (std::uint64_t j = 0; j < sub; ++j) {
              const Symbol v = vals[q * sub + j];
              blk[pos[q] * sub + j] = v;
              if (v != previous[s][pos[q] * sub + j]) diff |= std::uint64_t{1} << q;
            }
          }
          ++result.hashes;
          if (hashers[s].matches(blk, codewords[s])) lists[s].emplace_back(vals, diff);
        } while (next_values(vals, m));
        for (std::uint64_t q = 0; q < w; ++q) {
          std::copy(previous[s].begin() + pos[q] * sub, previous[s].begin() + (pos[q] + 1) * sub,
                    blk.begin() + pos[q] * sub);
        }
        empty = lists[s].empty();
      }
      if (empty) continue;

      // Join in lexicographic order; every chosen position must differ jointly.
      std::vector<std::size_t> idx(k, 0);
      while (accepted_count < 2) {
        std::uint64_t mask = 0;
        for (std::size_t s = 0; s < k; ++s) mask |= lists[s][idx[s]].second;
        if (mask == full_mask) {
          std::vector<Sequence> cand(previous.begin(), previous.end());
          for (std::size_t s = 0; s < k; ++s) {
            const auto& vals = lists[s][idx[s]].first;
            for (std::uint64_t q = 0; q < w; ++q) {
              std::copy(vals.begin() + q * sub, vals.begin() + (q + 1) * sub,
                        cand[s].begin() + pos[q] * sub);
            }
          }
          accepted = std::move(cand);
          ++accepted_count;
        }
        std::size_t s = k;
        while (s > 0 && ++idx[s - 1] == lists[s - 1].size()) idx[--s] = 0;
        if (s == 0) break;
      }
    } while (accepted_count < 2 && next_combination(pos, spec.sub_blocks));
  }

  if (accepted_count == 1) {
    result.outcome = SearchOutcome::Unique;
    result.block = std::move(accepted);
  } else {
    result.outcome = accepted_count == 0 ? SearchOutcome::None : SearchOutcome::Ambiguous;
    result.block.assign(k, Sequence(len, 0));
  }
  return result;
}

LocalDecodeResult hier_local_decode(const CodecSchedule& schedule,
                                    const CompressedContainer& container, std::uint64_t position,
                                    int level_d, double max_work) {
  LocalDecodeResult r;
  r.position = position;
  r.level = level_d;
  const auto probed = gather_superblock(schedule, container, position, level_d, r.probes);
  const auto est = decode_superblock(schedule, probed, max_work);
  const std::uint64_t offset = position - probed.superblock * schedule.level(level_d).length;
  for (int s = 0; s < schedule.k(); ++s) r.symbols.push_back(est.symbols[s][offset]);
  r.fallback = est.fallback;
  return r;
}

FullDecodeResult hier_full_decode(const CodecSchedule& schedule,
                                  const CompressedContainer& container, double max_work) {
  const int top = schedule.max_level();
  const std::uint64_t span_len = schedule.level(top).length;
  FullDecodeResult out;
  out.sequences.assign(schedule.k(), Sequence());
  for (std::uint64_t j = 0; j < schedule.padded_n() / span_len; ++j) {
    ProbeLog log;
    const auto probed = gather_superblock(schedule, container, j * span_len, top, log);
    const auto est = decode_superblock(schedule, probed, max_work);
    out.fallback |= est.fallback;
    for (int s = 0; s < schedule.k(); ++s) {
      out.sequences[s].insert(out.sequences[s].end(), est.symbols[s].begin(), est.symbols[s].end());
    }
  }
  for (auto& seq : out.sequences) seq.resize(schedule.true_n());
  return out;
}

}  // namespace swlocal
