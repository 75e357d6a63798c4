#include "swlocal/binning.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "swlocal/errors.hpp"

namespace swlocal {

namespace {

constexpr char kTag[8] = {'S', 'W', 'L', 'O', 'C', 'A', 'L', '1'};
constexpr std::size_t kPrefixSize = 8 + 16 + 1 + 1 + 8;

void write_prefix(const BinningKey& key, std::uint8_t* out) {
  std::copy(std::begin(kTag), std::end(kTag), out);
  std::copy(key.seed.bytes.begin(), key.seed.bytes.end(), out + 8);
  out[24] = key.source;
  out[25] = key.level;
  put_u64_be(out + 26, key.block);
}

void expand_digest(const Digest256& first, BitString& out) {
  const std::size_t nbits = out.size();
  const std::size_t head = std::min<std::size_t>(nbits, 256);
  for (std::size_t i = 0; i < head; ++i) out.set(i, (first[i >> 3] >> (7 - (i & 7))) & 1u);
  std::array<std::uint8_t, 36> ext{};
  std::copy(first.begin(), first.end(), ext.begin());
  for (std::uint32_t counter = 1; counter * 256ull < nbits; ++counter) {
    ext[32] = static_cast<std::uint8_t>(counter >> 24);
    ext[33] = static_cast<std::uint8_t>(counter >> 16);
    ext[34] = static_cast<std::uint8_t>(counter >> 8);
    ext[35] = static_cast<std::uint8_t>(counter);
    const auto d = sha256(ext);
    const std::size_t base = counter * 256ull;
    for (std::size_t i = 0; i < 256 && base + i < nbits; ++i) {
      out.set(base + i, (d[i >> 3] >> (7 - (i & 7))) & 1u);
    }
  }
}

// Advance `seq` to the next sequence in lexicographic order; false on wrap.
bool next_sequence(Sequence& seq, int alphabet) {
  for (std::size_t i = seq.size(); i-- > 0;) {
    if (++seq[i] < alphabet) return true;
    seq[i] = 0;
  }
  return false;
}

}  // namespace

BitString bin_hash(const BinningKey& key, std::span<const Symbol> seq, std::size_t out_bits) {
  BinHasher h(key, out_bits);
  BitString out(out_bits);
  h.hash(seq, out);
  return out;
}

BinHasher::BinHasher(const BinningKey& key, std::size_t out_bits)
    : buffer_(kPrefixSize), prefix_size_(kPrefixSize), out_bits_(out_bits), scratch_(out_bits) {
  if (out_bits == 0) throw Error(Errc::InvalidConfig, "bin_hash: out_bits must be >= 1");
  write_prefix(key, buffer_.data());
}

void BinHasher::hash(std::span<const Symbol> seq, BitString& out) {
  buffer_.resize(prefix_size_);
  buffer_.insert(buffer_.end(), seq.begin(), seq.end());
  expand_digest(sha256(buffer_), out);
}

bool BinHasher::matches(std::span<const Symbol> seq, const BitString& codeword) {
  hash(seq, scratch_);
  return scratch_ == codeword;
}

std::uint64_t ceil_tolerant(double x) {
  return static_cast<std::uint64_t>(std::ceil(x - 1e-9));
}

std::uint64_t floor_tolerant(double x) {
  return static_cast<std::uint64_t>(std::floor(x + 1e-9));
}

BlockCodeParams BlockCodeParams::from_rates(JointPmf pmf, std::size_t block_length,
                                            std::span<const double> rates, double epsilon0) {
  if (block_length == 0) throw Error(Errc::InvalidConfig, "block length must be >= 1");
  if (rates.size() != static_cast<std::size_t>(pmf.k())) {
    throw Error(Errc::BadShape, "expected one rate per source");
  }
  BlockCodeParams p{std::move(pmf), block_length, {}};
  for (double r : rates) {
    p.codeword_bits.push_back(
        std::max<std::uint64_t>(1, ceil_tolerant((r + epsilon0) * static_cast<double>(block_length))));
  }
  return p;
}

std::vector<BitString> sw_block_encode(const BlockCodeParams& params, const BinningKey& key,
                                       std::span<const Sequence> blocks) {
  if (blocks.size() != params.codeword_bits.size()) {
    throw Error(Errc::LengthMismatch, "expected one block per source");
  }
  std::vector<BitString> out;
  out.reserve(blocks.size());
  for (std::size_t s = 0; s < blocks.size(); ++s) {
    if (blocks[s].size() != params.block_length) {
      throw Error(Errc::LengthMismatch, "block length " + std::to_string(blocks[s].size()) +
                                            " != " + std::to_string(params.block_length));
    }
    out.push_back(bin_hash(key.with_source(static_cast<int>(s)), blocks[s], params.codeword_bits[s]));
  }
  return out;
}

double block_log2_prob(const JointPmf& pmf, std::span<const Sequence> blocks) {
  const auto& lp = pmf.log2_probs();
  double total = 0.0;
  const std::size_t len = blocks[0].size();
  for (std::size_t j = 0; j < len; ++j) {
    std::size_t flat = 0;
    for (std::size_t s = 0; s < blocks.size(); ++s) flat += blocks[s][j] * pmf.stride(static_cast<int>(s));
    total += lp[flat];
  }
  return total;
}

std::vector<Sequence> sw_block_map_decode(const BlockCodeParams& params, const BinningKey& key,
                                          std::span<const BitString> codewords) {
  const int k = params.pmf.k();
  if (codewords.size() != static_cast<std::size_t>(k)) {
    throw Error(Errc::LengthMismatch, "expected one codeword per source");
  }
  const std::size_t b = params.block_length;
  std::vector<Sequence> zeros(k, Sequence(b, 0));

  // Per-source filter: every sequence whose own hash matches, in lexicographic order.
  std::vector<std::vector<Sequence>> lists(k);
  for (int s = 0; s < k; ++s) {
    if (codewords[s].size() != params.codeword_bits[s]) {
      throw Error(Errc::LengthMismatch, "codeword length mismatch for source " + std::to_string(s));
    }
    const int m = params.pmf.alphabet_size(s);
    if (std::pow(static_cast<double>(m), static_cast<double>(b)) > kMaxPerSourceEnumeration) {
      throw Error(Errc::InstanceTooLarge, "MAP decode: |X|^b0 exceeds enumeration cap");
    }
    BinHasher hasher(key.with_source(s), params.codeword_bits[s]);
    Sequence seq(b, 0);
    do {
      if (hasher.matches(seq, codewords[s])) lists[s].push_back(seq);
    } while (next_sequence(seq, m));
    if (lists[s].empty()) return zeros;
  }

  // Join in lexicographic order of the concatenated tuple (source 0 outermost).
  std::vector<std::size_t> idx(k, 0);
  std::vector<Sequence> current(k);
  std::vector<Sequence> best;
  double best_lp = -std::numeric_limits<double>::infinity();
  bool have = false;
  while (true) {
    for (int s = 0; s < k; ++s) current[s] = lists[s][idx[s]];
    const double lp = block_log2_prob(params.pmf, current);
    if (!have || lp > best_lp + 1e-12) {
      best = current;
      best_lp = lp;
      have = true;
    }
    int s = k - 1;
    while (s >= 0 && ++idx[s] == lists[s].size()) idx[s--] = 0;
    if (s < 0) break;
  }
  return best;
}

}  // namespace swlocal
