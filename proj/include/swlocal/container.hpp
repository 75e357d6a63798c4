#pragma once

// Container layout (all integers big-endian):
//
//   offset  size  field
//   0       4     magic "SWLC"
//   4       2     version (1)
//   6       2     flags (0)
//   8       8     true n
//   16      16    master seed
//   32      32    SHA-256 of the canonical schedule JSON
//   64      ...   for s = 0..k-1, for l = 0..max_level: the (s, l) bit array,
//                 MSB-first, zero-padded to a byte boundary
//
// Block j of level l, source s occupies bits [j*k_l^(s), (j+1)*k_l^(s)) of the
// (s, l) array. Bit addresses reported by ProbeLog are absolute bit offsets
// into the serialized container.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "swlocal/bits.hpp"
#include "swlocal/schedule.hpp"

namespace swlocal {

inline constexpr std::size_t kHeaderBytes = 64;
inline constexpr std::uint16_t kContainerVersion = 1;

class CompressedContainer {
 public:
  // Zero-filled arrays sized for the schedule.
  static CompressedContainer allocate(const CodecSchedule& schedule);
  // Parses and checks magic, version, length, seed and schedule digest.
  static CompressedContainer parse(std::span<const std::uint8_t> bytes,
                                   const CodecSchedule& schedule);

  std::vector<std::uint8_t> serialize() const;

  int k() const noexcept { return k_; }
  int level_count() const noexcept { return levels_; }
  std::uint64_t true_n() const noexcept { return true_n_; }
  const Seed128& seed() const noexcept { return seed_; }
  const Digest256& schedule_digest() const noexcept { return digest_; }

  BitString& array(int source, int level) { return arrays_.at(index(source, level)); }
  const BitString& array(int source, int level) const { return arrays_.at(index(source, level)); }

  // Absolute bit address of the first bit of the (source, level) array.
  std::uint64_t array_address(int source, int level) const {
    return bit_offsets_.at(index(source, level));
  }
  std::uint64_t total_bits() const noexcept { return total_bytes_ * 8; }
  std::uint64_t payload_bits() const;  // sum of unpadded array lengths

  friend bool operator==(const CompressedContainer&, const CompressedContainer&) = default;

 private:
  std::size_t index(int source, int level) const {
    return static_cast<std::size_t>(source) * levels_ + level;
  }

  int k_ = 0;
  int levels_ = 0;
  std::uint64_t true_n_ = 0;
  Seed128 seed_;
  Digest256 digest_{};
  std::vector<BitString> arrays_;
  std::vector<std::uint64_t> bit_offsets_;
  std::uint64_t total_bytes_ = 0;
};

// The only path by which decoders touch compressed bits; every bit read is
// recorded in the log.
class ProbeReader {
 public:
  ProbeReader(const CompressedContainer& container, ProbeLog& log)
      : container_(container), log_(log) {}

  BitString read(int source, int level, std::uint64_t bit_offset, std::uint64_t count);

 private:
  const CompressedContainer& container_;
  ProbeLog& log_;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace swlocal
