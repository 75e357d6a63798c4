#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace swlocal {

using Digest256 = std::array<std::uint8_t, 32>;

// One-shot SHA-256 (OpenSSL backed). Thread safe.
Digest256 sha256(std::span<const std::uint8_t> data);
Digest256 sha256(std::string_view data);

std::string to_hex(std::span<const std::uint8_t> bytes);

// 128-bit master seed. Parsed from a decimal u64 (placed big-endian in the
// low 8 bytes) or from exactly 32 hex digits.
struct Seed128 {
  std::array<std::uint8_t, 16> bytes{};

  static Seed128 from_u64(std::uint64_t v);
  static Seed128 parse(std::string_view text);

  std::string hex() const;
  std::uint64_t low64() const;

  friend bool operator==(const Seed128&, const Seed128&) = default;
};

// Per-trial sub-seed: SHA-256(master || trial as u64 big-endian).
Digest256 derive_trial_digest(const Seed128& master, std::uint64_t trial);

inline void put_u64_be(std::uint8_t* out, std::uint64_t v) {
  for (int b = 7; b >= 0; --b) {
    out[b] = static_cast<std::uint8_t>(v & 0xff);
    v >>= 8;
  }
}

inline std::uint64_t get_u64_be(const std::uint8_t* in) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v = (v << 8) | in[b];
  return v;
}

}  // namespace swlocal
