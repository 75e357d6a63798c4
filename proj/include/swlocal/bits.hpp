#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace swlocal {

// Growable bit string, most-significant-bit-first within each byte.
class BitString {
 public:
  BitString() = default;
  explicit BitString(std::size_t nbits) : bytes_((nbits + 7) / 8, 0), size_(nbits) {}

  std::size_t size() const noexcept { return size_; }
  bool empty() const noexcept { return size_ == 0; }

  bool get(std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u; }

  void set(std::size_t i, bool v) {
    const auto mask = static_cast<std::uint8_t>(0x80u >> (i & 7));
    if (v) bytes_[i >> 3] |= mask;
    else bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
  }

  void push_back(bool v) {
    if ((size_ & 7) == 0) bytes_.push_back(0);
    ++size_;
    set(size_ - 1, v);
  }

  void append(const BitString& other) {
    for (std::size_t i = 0; i < other.size(); ++i) push_back(other.get(i));
  }

  // Copy `count` bits of `src` starting at `src_offset` into position `dst_offset`.
  void copy_from(const BitString& src, std::size_t src_offset, std::size_t dst_offset,
                 std::size_t count) {
    for (std::size_t i = 0; i < count; ++i) set(dst_offset + i, src.get(src_offset + i));
  }

  std::span<const std::uint8_t> bytes() const noexcept { return bytes_; }

  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits);
  static BitString from_string(const std::string& zeros_and_ones);
  std::string to_string() const;

  friend bool operator==(const BitString& a, const BitString& b) {
    return a.size_ == b.size_ && a.bytes_ == b.bytes_;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

// Distinct compressed-bit addresses read by one local-decode query.
class ProbeLog {
 public:
  void record(std::uint64_t address, int level) {
    if (addresses_.insert(address).second) ++per_level_[level];
  }
  std::uint64_t count() const noexcept { return addresses_.size(); }
  const std::set<std::uint64_t>& addresses() const noexcept { return addresses_; }
  const std::map<int, std::uint64_t>& per_level() const noexcept { return per_level_; }
  void reset() {
    addresses_.clear();
    per_level_.clear();
  }

  friend bool operator==(const ProbeLog&, const ProbeLog&) = default;

 private:
  std::set<std::uint64_t> addresses_;
  std::map<int, std::uint64_t> per_level_;
};

}  // namespace swlocal
