#include "swlocal/bits.hpp"

#include <stdexcept>

namespace swlocal {

BitString BitString::from_bytes(std::span<const std::uint8_t> bytes, std::size_t nbits) {
  if (bytes.size() * 8 < nbits) throw std::out_of_range("BitString::from_bytes: too few bytes");
  BitString b(nbits);
  for (std::size_t i = 0; i < nbits; ++i) b.set(i, (bytes[i >> 3] >> (7 - (i & 7))) & 1u);
  return b;
}

BitString BitString::from_string(const std::string& s) {
  BitString b(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("BitString: expected 0/1");
    b.set(i, s[i] == '1');
  }
  return b;
}

std::string BitString::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i) s[i] = get(i) ? '1' : '0';
  return s;
}

}  // namespace swlocal
