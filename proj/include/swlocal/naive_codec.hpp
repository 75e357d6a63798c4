#pragma once

// Concatenation baseline: independent Slepian-Wolf coding of consecutive
// b-blocks. A local query at position i reads exactly the codewords of the
// block holding i. Containers use the hierarchical format with one level.

#include <cstdint>
#include <span>
#include <vector>

#include "swlocal/container.hpp"
#include "swlocal/hier_codec.hpp"
#include "swlocal/schedule.hpp"

namespace swlocal {

struct NaiveParams {
  std::uint64_t block_length = 4;
  std::vector<double> rates;
  double epsilon0 = 0.25;
  Seed128 seed;
};

struct NaiveContainer {
  CodecSchedule schedule;  // max_level = 0, b0 = block length
  CompressedContainer container;
};

// Level-0 schedule for the concatenation scheme at true length n.
CodecSchedule naive_schedule(const JointPmf& pmf, const NaiveParams& params, std::uint64_t n);

NaiveContainer naive_encode(const JointPmf& pmf, std::span<const Sequence> sequences,
                            const NaiveParams& params);

// Position is zero-based.
LocalDecodeResult naive_local_decode(const NaiveContainer& encoded, std::uint64_t position);

}  // namespace swlocal
