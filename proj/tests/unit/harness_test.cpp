#include <gtest/gtest.h>

#include <sstream>

#include "reference.hpp"
#include "swlocal/errors.hpp"
#include "swlocal/harness.hpp"

using namespace swlocal;

namespace {

ExperimentConfig naive_config() {
  ExperimentConfig c;
  c.scheme = Scheme::Naive;
  c.block_lengths = {4, 8};
  c.trials = 150;
  c.threads = 1;
  return c;
}

ExperimentConfig hier_config() {
  ExperimentConfig c;
  c.scheme = Scheme::Hier;
  c.rates = {1.25, 1.75};
  c.beta = 1.5;
  c.max_level = 1;
  c.levels = {0, 1};
  c.trials = 60;
  c.threads = 1;
  return c;
}

Errc code_of(const ExperimentConfig& c) {
  try {
    validate_config(c);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::Io;
}

}  // namespace

TEST(Harness, ConfigValidation) {
  auto c = naive_config();
  c.trials = 0;
  EXPECT_EQ(code_of(c), Errc::InvalidConfig);
  c = hier_config();
  c.levels = {0, 2};
  EXPECT_EQ(code_of(c), Errc::LevelOutOfRange);
  c = naive_config();
  EXPECT_EQ(code_of(c), Errc::Io);  // valid
  EXPECT_THROW(parse_scheme("bogus"), Error);
}

TEST(Harness, ConfigJsonRoundTrip) {
  auto c = hier_config();
  c.seed = Seed128::from_u64(99);
  c.positions = PositionPolicy::Random;
  const auto j = config_to_json(c);
  const auto back = config_from_json(j);
  EXPECT_EQ(config_to_json(back), j);
  EXPECT_THROW(config_from_json(nlohmann::json::parse(R"({"trials":"many"})")), std::exception);
}

TEST(Harness, Wilson) {
  for (auto [e, n] : std::vector<std::pair<int, int>>{{0, 10}, {5, 100}, {41, 1000}, {100, 100}}) {
    const auto [lo, hi] = wilson_interval(e, n);
    const auto [rlo, rhi] = ref::wilson(e, n);
    EXPECT_NEAR(lo, rlo, 1e-12);
    EXPECT_NEAR(hi, rhi, 1e-12);
  }
}

TEST(Harness, SummaryMatchesRows) {
  const auto r = bench_locality(naive_config());
  ASSERT_EQ(r.summary.size(), 2u);
  for (const auto& s : r.summary) {
    std::uint64_t rows = 0, errors = 0;
    for (const auto& t : r.rows) {
      if (t.param != s.param) continue;
      ++rows;
      errors += t.error();
      EXPECT_EQ(t.probes, s.probes);
    }
    EXPECT_EQ(rows, s.rows);
    EXPECT_EQ(errors, s.errors);
    EXPECT_DOUBLE_EQ(s.pe_loc, double(errors) / rows);
    // Default positions: one random plus first, last and a boundary.
    EXPECT_GE(rows, 150u * 3);
  }
  EXPECT_EQ(r.summary[0].probes, 4u + 6u);  // ceil(1.0 * 4) + ceil(1.5 * 4)
}

TEST(Harness, CsvLayout) {
  const auto r = bench_locality(naive_config());
  const auto csv = to_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# swlocal-csv v1");
  std::getline(in, line);
  EXPECT_EQ(line,
            "row,scheme,param,trial,position,probes,correct,fallback,rows,errors,pe_loc,wilson_lo,"
            "wilson_hi,fallback_rate");
  std::size_t trial_rows = 0, summary_rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("trial,", 0) == 0) ++trial_rows;
    if (line.rfind("summary,", 0) == 0) ++summary_rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 13) << line;
  }
  EXPECT_EQ(trial_rows, r.rows.size());
  EXPECT_EQ(summary_rows, 2u);
}

TEST(Harness, ThreadCountDoesNotChangeResults) {
  auto c = hier_config();
  const auto one = to_csv(bench_locality(c));
  c.threads = 4;
  EXPECT_EQ(to_csv(bench_locality(c)), one);
  auto n = naive_config();
  const auto a = to_csv(bench_locality(n));
  n.threads = 3;
  EXPECT_EQ(to_csv(bench_locality(n)), a);
}

TEST(Harness, HierProbesFollowBudget) {
  const auto c = hier_config();
  const auto r = bench_locality(c);
  const auto sched = experiment_schedule(c, Seed128::from_u64(1));
  ASSERT_EQ(r.summary.size(), 2u);
  EXPECT_EQ(r.summary[0].probes, probe_budget(sched, 0));
  EXPECT_EQ(r.summary[1].probes, probe_budget(sched, 1));
}

TEST(Harness, RoundtripReport) {
  auto c = hier_config();
  c.trials = 20;
  const auto s = roundtrip(c);
  EXPECT_EQ(s.trials, 20u);
  EXPECT_EQ(s.n, 64u);
  ASSERT_EQ(s.achieved_rate.size(), 2u);
  // Level 0 at (6, 8) bits per 4 symbols, level 1 at 29 bits per 64.
  EXPECT_NEAR(s.achieved_rate[0], 6.0 / 4 + 29.0 / 64, 1e-12);
  EXPECT_NEAR(s.achieved_rate[1], 8.0 / 4 + 29.0 / 64, 1e-12);
  EXPECT_NEAR(s.overhead_bound[0], 29.0 / 64, 1e-12);
  EXPECT_GE(s.full_recovery_rate, 0.8);
  const auto j = to_json(s);
  EXPECT_TRUE(j.contains("full_recovery_rate"));
}

TEST(Harness, OracleRun) {
  ExperimentConfig c;
  c.scheme = Scheme::Oracle;
  c.trials = 0;
  c.oracle_n = 4;
  c.oracle_rate = 0.5;
  const auto rep = run_oracle(c);
  EXPECT_EQ(rep.n, 4u);
  EXPECT_GT(rep.local.error, 0.0);
}
