#include "swlocal/container.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iterator>

#include "swlocal/errors.hpp"

namespace swlocal {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'W', 'L', 'C'};

}  // namespace

CompressedContainer CompressedContainer::allocate(const CodecSchedule& schedule) {
  CompressedContainer c;
  c.k_ = schedule.k();
  c.levels_ = schedule.max_level() + 1;
  c.true_n_ = schedule.true_n();
  c.seed_ = schedule.options().seed;
  c.digest_ = schedule.digest();
  std::uint64_t byte_offset = kHeaderBytes;
  for (int s = 0; s < c.k_; ++s) {
    for (int l = 0; l < c.levels_; ++l) {
      const std::uint64_t bits = schedule.blocks_at(l) * schedule.level(l).codeword_bits[s];
      c.arrays_.emplace_back(bits);
      c.bit_offsets_.push_back(byte_offset * 8);
      byte_offset += (bits + 7) / 8;
    }
  }
  c.total_bytes_ = byte_offset;
  return c;
}

std::uint64_t CompressedContainer::payload_bits() const {
  std::uint64_t total = 0;
  for (const auto& a : arrays_) total += a.size();
  return total;
}

std::vector<std::uint8_t> CompressedContainer::serialize() const {
  std::vector<std::uint8_t> out(kHeaderBytes, 0);
  std::copy(std::begin(kMagic), std::end(kMagic), out.begin());
  out[4] = static_cast<std::uint8_t>(kContainerVersion >> 8);
  out[5] = static_cast<std::uint8_t>(kContainerVersion & 0xff);
  // flags stay zero
  put_u64_be(out.data() + 8, true_n_);
  std::copy(seed_.bytes.begin(), seed_.bytes.end(), out.begin() + 16);
  std::copy(digest_.begin(), digest_.end(), out.begin() + 32);
  out.reserve(total_bytes_);
  for (const auto& a : arrays_) out.insert(out.end(), a.bytes().begin(), a.bytes().end());
  return out;
}

CompressedContainer CompressedContainer::parse(std::span<const std::uint8_t> bytes,
                                               const CodecSchedule& schedule) {
  auto c = allocate(schedule);
  if (bytes.size() < kHeaderBytes || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw Error(Errc::BadContainer, "missing SWLC magic");
  }
  const auto version = static_cast<std::uint16_t>((bytes[4] << 8) | bytes[5]);
  if (version != kContainerVersion) {
    throw Error(Errc::BadContainer, "unsupported container version " + std::to_string(version));
  }
  if (get_u64_be(bytes.data() + 8) != c.true_n_) {
    throw Error(Errc::BadContainer, "true n does not match the schedule");
  }
  if (!std::equal(c.seed_.bytes.begin(), c.seed_.bytes.end(), bytes.begin() + 16)) {
    throw Error(Errc::BadContainer, "seed does not match the schedule");
  }
  if (!std::equal(c.digest_.begin(), c.digest_.end(), bytes.begin() + 32)) {
    throw Error(Errc::BadContainer, "schedule digest mismatch");
  }
  if (bytes.size() != c.total_bytes_) {
    throw Error(Errc::BadContainer, "expected " + std::to_string(c.total_bytes_) +
                                        " bytes, got " + std::to_string(bytes.size()));
  }
  for (std::size_t a = 0; a < c.arrays_.size(); ++a) {
    const std::size_t start = c.bit_offsets_[a] / 8;
    const std::size_t nbytes = (c.arrays_[a].size() + 7) / 8;
    c.arrays_[a] = BitString::from_bytes(bytes.subspan(start, nbytes), c.arrays_[a].size());
  }
  return c;
}

BitString ProbeReader::read(int source, int level, std::uint64_t bit_offset, std::uint64_t count) {
  const auto& arr = container_.array(source, level);
  if (bit_offset + count > arr.size()) {
    throw Error(Errc::IndexOutOfRange, "probe past the end of array (" + std::to_string(source) +
                                           ", " + std::to_string(level) + ")");
  }
  const std::uint64_t base = container_.array_address(source, level);
  BitString out(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    log_.record(base + bit_offset + i, level);
    out.set(i, arr.get(bit_offset + i));
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "short write to '" + path.string() + "'");
}

}  // namespace swlocal
