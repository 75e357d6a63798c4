#include <gtest/gtest.h>

#include <map>

#include "reference.hpp"
#include "swlocal/errors.hpp"
#include "swlocal/oracle.hpp"

using namespace swlocal;

namespace {

// Direct enumeration over (x^n, y^n): group by (probed bits, y^n) and keep
// the largest posterior mass for X_i.
double brute_local_error(const JointPmf& pmf, const EncoderTable& table,
                         const std::vector<std::uint32_t>& set, std::size_t i, bool side) {
  const auto xs = ref::all_sequences(pmf.alphabet_size(0), table.n);
  const auto ys = ref::all_sequences(pmf.alphabet_size(1), table.n);
  std::map<std::pair<std::string, std::size_t>, std::vector<double>> groups;
  for (std::size_t xi = 0; xi < xs.size(); ++xi) {
    std::string key;
    for (auto j : set) key.push_back(table.bit(xi, j) ? '1' : '0');
    for (std::size_t yi = 0; yi < ys.size(); ++yi) {
      double p = 1;
      for (std::size_t t = 0; t < table.n; ++t) {
        const Symbol col[2] = {xs[xi][t], ys[yi][t]};
        p *= pmf.prob(col);
      }
      auto& g = groups[{key, side ? yi : 0}];
      g.resize(pmf.alphabet_size(0), 0.0);
      g[xs[xi][i]] += p;
    }
  }
  double err = 0;
  for (const auto& [k, g] : groups) {
    double sum = 0, best = 0;
    for (double v : g) {
      sum += v;
      best = std::max(best, v);
    }
    err += sum - best;
  }
  return err;
}

JointPmf uniform_bsc(double rho) { return dsbs(rho); }

}  // namespace

TEST(Oracle, SingleSymbolCases) {
  const auto pmf = dsbs(0.1);
  const auto table = EncoderTable::identity(1);
  EXPECT_NEAR(exact_local_map_error(pmf, table, ProbeSetFamily::prefix(1, 0), 0), 0.1, 1e-12);
  EXPECT_NEAR(exact_local_map_error(pmf, table, ProbeSetFamily::prefix(1, 1), 0), 0.0, 1e-12);
  EXPECT_NEAR(exact_local_map_error(pmf, table, ProbeSetFamily::prefix(1, 0), 0, SideInformation::None),
              0.5, 1e-12);
}

TEST(Oracle, MatchesBruteForce) {
  for (double rho : {0.1, 0.3}) {
    const auto pmf = dsbs(rho);
    for (std::size_t bits : {1u, 2u, 3u}) {
      const auto table = EncoderTable::from_bin_hash(2, 4, bits, BinningKey{Seed128::from_u64(bits), 0, 0, 0});
      for (std::size_t r = 0; r <= bits; ++r) {
        const auto probes = ProbeSetFamily::prefix(4, r);
        for (std::size_t i = 0; i < 4; ++i) {
          for (auto side : {SideInformation::Full, SideInformation::None}) {
            EXPECT_NEAR(exact_local_map_error(pmf, table, probes, i, side),
                        brute_local_error(pmf, table, probes.sets[i], i, side == SideInformation::Full),
                        1e-12);
          }
        }
      }
    }
  }
}

TEST(Oracle, MoreProbesAndSideInformationHelp) {
  const auto pmf = dsbs(0.2);
  const auto table = EncoderTable::from_bin_hash(2, 6, 5, BinningKey{Seed128::from_u64(9), 0, 0, 0});
  for (std::size_t i = 0; i < 6; ++i) {
    double prev = 1.0;
    for (std::size_t r = 0; r <= 5; ++r) {
      const auto probes = ProbeSetFamily::prefix(6, r);
      const double full = exact_local_map_error(pmf, table, probes, i);
      const double none = exact_local_map_error(pmf, table, probes, i, SideInformation::None);
      EXPECT_LE(full, none + 1e-12);
      EXPECT_LE(full, prev + 1e-12);
      prev = full;
    }
  }
}

TEST(Oracle, MaxLocalErrorPicksWorstPosition) {
  const auto pmf = dsbs(0.1);
  const auto table = EncoderTable::from_bin_hash(2, 5, 2, BinningKey{Seed128::from_u64(2), 0, 0, 0});
  const auto probes = ProbeSetFamily::prefix(5, 2);
  const auto m = max_local_error(pmf, table, probes);
  ASSERT_EQ(m.per_position.size(), 5u);
  EXPECT_GT(m.error, 0.0);
  for (double e : m.per_position) EXPECT_LE(e, m.error);
  EXPECT_EQ(m.per_position[m.position], m.error);
}

TEST(Oracle, RdDelta) {
  EXPECT_NEAR(rd_delta(0.75), 0.0416926902736567, 1e-12);
  EXPECT_NEAR(rd_delta(0.5), 0.11002786443835956, 1e-12);
  EXPECT_NEAR(rd_delta(0.0), 0.5, 1e-8);  // h2 is flat at 1/2
  EXPECT_NEAR(ref::h2(rd_delta(0.3)), 0.7, 1e-12);
  EXPECT_THROW(rd_delta(1.0), Error);
  EXPECT_THROW(rd_delta(-0.1), Error);
}

TEST(Oracle, RdFloorHoldsForHashCodes) {
  const auto pmf = uniform_bsc(0.1);
  for (std::size_t n : {4u, 6u}) {
    for (std::size_t bits = 1; bits < n; ++bits) {
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto table = EncoderTable::from_bin_hash(2, n, bits, BinningKey{Seed128::from_u64(seed), 0, 0, 0});
        const auto rep = verify_rd_floor(pmf, table, ProbeSetFamily::prefix(n, bits));
        EXPECT_TRUE(rep.satisfied);
        EXPECT_NEAR(rep.floor, rd_delta(double(bits) / n), 1e-12);
        EXPECT_GE(rep.average_error + 1e-12, rep.floor) << n << " " << bits;
      }
    }
  }
  // Identity code at full rate: no error, floor 0.
  const auto id = verify_rd_floor(pmf, EncoderTable::identity(4), ProbeSetFamily::prefix(4, 4));
  EXPECT_EQ(id.floor, 0.0);
  EXPECT_NEAR(id.average_error, 0.0, 1e-12);
}

TEST(Oracle, RdFloorRequiresUniformBinary) {
  EXPECT_THROW(verify_rd_floor(zchannel(0.3, 0.2), EncoderTable::identity(2), ProbeSetFamily::prefix(2, 1)),
               Error);
}

TEST(Oracle, ExactBlockErrorMatchesEnumeration) {
  const auto pmf = dsbs(0.1);
  const auto params = BlockCodeParams::from_rates(pmf, 3, std::vector<double>{0.75, 1.25}, 0.25);
  const BinningKey key{Seed128::from_u64(4), 0, 0, 0};
  // Error = mass of tuples that the brute-force MAP decoder gets wrong.
  double err = 0;
  const auto xs = ref::all_sequences(2, 3);
  for (const auto& x : xs)
    for (const auto& y : xs) {
      std::vector<Sequence> t{x, y};
      const auto cws = sw_block_encode(params, key, t);
      if (ref::brute_map_decode(params, key, cws) != t) err += std::exp2(block_log2_prob(pmf, t));
    }
  EXPECT_NEAR(exact_block_map_error(params, key), err, 1e-12);
}

TEST(Oracle, InstanceLimits) {
  EXPECT_THROW(EncoderTable::from_bin_hash(2, 4, 0, BinningKey{}), Error);
  const auto big = EncoderTable::from_bin_hash(2, 14, 4, BinningKey{});
  try {
    exact_local_map_error(dsbs(0.1), big, ProbeSetFamily::prefix(14, 2), 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InstanceTooLarge);
  }
}

TEST(Oracle, ReportJson) {
  const auto table = EncoderTable::from_bin_hash(2, 4, 2, BinningKey{});
  const auto rep = oracle_report(dsbs(0.1), table, ProbeSetFamily::prefix(4, 2));
  const auto j = to_json(rep);
  EXPECT_EQ(j.at("n"), 4);
  EXPECT_EQ(j.at("per_i_error").size(), 4u);
  EXPECT_DOUBLE_EQ(j.at("max_error").get<double>(), rep.local.error);
}
