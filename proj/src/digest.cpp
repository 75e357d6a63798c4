#include "swlocal/digest.hpp"

#include <openssl/evp.h>

#include <cctype>
#include <charconv>
#include <memory>

#include "swlocal/errors.hpp"

namespace swlocal {

namespace {

struct MdCtxDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

const EVP_MD* sha256_md() {
  // Explicit fetch once; implicit fetching through EVP_sha256() on every call
  // is measurably slower on OpenSSL 3.
  static EVP_MD* md = EVP_MD_fetch(nullptr, "SHA256", nullptr);
  return md;
}

}  // namespace

Digest256 sha256(std::span<const std::uint8_t> data) {
  thread_local std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx(EVP_MD_CTX_new());
  Digest256 out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), sha256_md(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    throw std::runtime_error("sha256: OpenSSL digest failure");
  }
  return out;
}

Digest256 sha256(std::string_view data) {
  return sha256(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()),
                                              data.size()));
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

Seed128 Seed128::from_u64(std::uint64_t v) {
  Seed128 s;
  put_u64_be(s.bytes.data() + 8, v);
  return s;
}

Seed128 Seed128::parse(std::string_view text) {
  if (text.size() == 32) {
    Seed128 s;
    for (std::size_t i = 0; i < 16; ++i) {
      unsigned v = 0;
      auto [p, ec] = std::from_chars(text.data() + 2 * i, text.data() + 2 * i + 2, v, 16);
      if (ec != std::errc{} || p != text.data() + 2 * i + 2) {
        throw Error(Errc::InvalidConfig, "seed: bad hex digit in '" + std::string(text) + "'");
      }
      s.bytes[i] = static_cast<std::uint8_t>(v);
    }
    return s;
  }
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 10);
  if (text.empty() || ec != std::errc{} || p != text.data() + text.size()) {
    throw Error(Errc::InvalidConfig,
                "seed must be a decimal u64 or 32 hex digits, got '" + std::string(text) + "'");
  }
  return from_u64(v);
}

std::string Seed128::hex() const { return to_hex(bytes); }

std::uint64_t Seed128::low64() const { return get_u64_be(bytes.data() + 8); }

Digest256 derive_trial_digest(const Seed128& master, std::uint64_t trial) {
  std::array<std::uint8_t, 24> buf{};
  std::copy(master.bytes.begin(), master.bytes.end(), buf.begin());
  put_u64_be(buf.data() + 16, trial);
  return sha256(buf);
}

}  // namespace swlocal
