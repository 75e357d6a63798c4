#pragma once

// Random binning realized as a keyed SHA-256 PRF, and the level-0
// Slepian-Wolf block code with exact MAP decoding over the bins.

#include <cstdint>
#include <span>
#include <vector>

#include "swlocal/bits.hpp"
#include "swlocal/digest.hpp"
#include "swlocal/source_model.hpp"

namespace swlocal {

struct BinningKey {
  Seed128 seed;
  std::uint8_t source = 0;
  std::uint8_t level = 0;
  std::uint64_t block = 0;

  BinningKey with_source(int s) const {
    BinningKey k = *this;
    k.source = static_cast<std::uint8_t>(s);
    return k;
  }
};

// SHA-256("SWLOCAL1" || seed || source || level || block(u64 BE) || symbols),
// truncated MSB-first to out_bits; beyond 256 bits the stream continues with
// SHA-256(digest || counter(u32 BE)) for counter = 1, 2, ...
BitString bin_hash(const BinningKey& key, std::span<const Symbol> seq, std::size_t out_bits);

// Reusable hasher for one key: avoids re-encoding the fixed prefix when the
// same key hashes many candidate sequences.
class BinHasher {
 public:
  BinHasher(const BinningKey& key, std::size_t out_bits);

  // Hash into a preallocated bit string of size out_bits.
  void hash(std::span<const Symbol> seq, BitString& out);
  // True iff hash(seq) equals `codeword`.
  bool matches(std::span<const Symbol> seq, const BitString& codeword);

  std::size_t out_bits() const noexcept { return out_bits_; }

 private:
  std::vector<std::uint8_t> buffer_;
  std::size_t prefix_size_;
  std::size_t out_bits_;
  BitString scratch_;
};

// ceil(x) that ignores floating-point noise just above an integer.
std::uint64_t ceil_tolerant(double x);
std::uint64_t floor_tolerant(double x);

struct BlockCodeParams {
  JointPmf pmf;
  std::size_t block_length = 0;             // b0
  std::vector<std::size_t> codeword_bits;   // k0_s per source

  // k0_s = ceil((R_s + eps0) * b0).
  static BlockCodeParams from_rates(JointPmf pmf, std::size_t block_length,
                                    std::span<const double> rates, double epsilon0);
};

std::vector<BitString> sw_block_encode(const BlockCodeParams& params, const BinningKey& key,
                                       std::span<const Sequence> blocks);

// Upper bound on per-source enumeration performed by the MAP decoder.
inline constexpr double kMaxPerSourceEnumeration = 1u << 24;

// Exact MAP decode over the bins: argmax of the i.i.d. joint probability over
// all block tuples whose per-source hashes equal the codewords, ties broken by
// lexicographic order of the concatenated tuple. All-zero blocks if nothing
// matches. Throws InstanceTooLarge when |X_s|^b0 exceeds the enumeration cap.
std::vector<Sequence> sw_block_map_decode(const BlockCodeParams& params, const BinningKey& key,
                                          std::span<const BitString> codewords);

// Sum of log2 p over the columns of a block tuple.
double block_log2_prob(const JointPmf& pmf, std::span<const Sequence> blocks);

}  // namespace swlocal
