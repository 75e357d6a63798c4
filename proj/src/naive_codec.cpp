#include "swlocal/naive_codec.hpp"

#include <string>

#include "swlocal/binning.hpp"
#include "swlocal/errors.hpp"

namespace swlocal {

CodecSchedule naive_schedule(const JointPmf& pmf, const NaiveParams& params, std::uint64_t n) {
  ScheduleOptions o;
  o.rates = params.rates;
  o.epsilon0 = params.epsilon0;
  o.b0 = params.block_length;
  o.max_level = 0;
  o.seed = params.seed;
  o.n = n;
  return build_schedule(pmf, o);
}

NaiveContainer naive_encode(const JointPmf& pmf, std::span<const Sequence> sequences,
                            const NaiveParams& params) {
  if (sequences.size() != static_cast<std::size_t>(pmf.k())) {
    throw Error(Errc::LengthMismatch, "expected one sequence per source");
  }
  const std::uint64_t n = sequences[0].size();
  auto schedule = naive_schedule(pmf, params, n);
  auto container = CompressedContainer::allocate(schedule);
  const auto code = schedule.level0_params();
  const std::uint64_t b = params.block_length;

  std::vector<Sequence> blocks(pmf.k(), Sequence(b));
  for (std::uint64_t j = 0; j < schedule.blocks_at(0); ++j) {
    for (int s = 0; s < pmf.k(); ++s) {
      if (sequences[s].size() != n) throw Error(Errc::LengthMismatch, "sequence lengths differ");
      for (std::uint64_t t = 0; t < b; ++t) {
        const std::uint64_t at = j * b + t;
        blocks[s][t] = at < n ? sequences[s][at] : Symbol{0};
      }
    }
    const auto cws = sw_block_encode(code, BinningKey{params.seed, 0, 0, j}, blocks);
    for (int s = 0; s < pmf.k(); ++s) {
      container.array(s, 0).copy_from(cws[s], 0, j * code.codeword_bits[s], code.codeword_bits[s]);
    }
  }
  return {std::move(schedule), std::move(container)};
}

LocalDecodeResult naive_local_decode(const NaiveContainer& encoded, std::uint64_t position) {
  const auto& sched = encoded.schedule;
  if (position >= sched.true_n()) {
    throw Error(Errc::IndexOutOfRange, "position " + std::to_string(position) + " outside [0, " +
                                           std::to_string(sched.true_n()) + ")");
  }
  const auto code = sched.level0_params();
  const std::uint64_t b = code.block_length;
  const std::uint64_t j = position / b;

  LocalDecodeResult r;
  r.position = position;
  r.level = 0;
  ProbeReader reader(encoded.container, r.probes);
  std::vector<BitString> cws;
  for (int s = 0; s < sched.k(); ++s) {
    const auto bits = code.codeword_bits[s];
    cws.push_back(reader.read(s, 0, j * bits, bits));
  }
  const auto blocks = sw_block_map_decode(code, BinningKey{sched.options().seed, 0, 0, j}, cws);
  for (int s = 0; s < sched.k(); ++s) r.symbols.push_back(blocks[s][position % b]);
  return r;
}

}  // namespace swlocal
