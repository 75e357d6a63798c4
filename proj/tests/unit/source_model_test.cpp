#include <gtest/gtest.h>

#include <random>

#include "reference.hpp"
#include "swlocal/errors.hpp"
#include "swlocal/source_model.hpp"

using namespace swlocal;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::Io;
}

JointPmf from_table(const ref::Table2& t) {
  return validate_pmf({t.rows(), t.cols()}, t.flat());
}

const ref::Table2 kDsbs{{{0.45, 0.05}, {0.05, 0.45}}};
const ref::Table2 kZ{{{0.5, 0.0}, {0.25, 0.25}}};
const ref::Table2 kIdentity{{{0.5, 0.0}, {0.0, 0.5}}};
const ref::Table2 kThreeByTwo{{{0.3, 0.0}, {0.0, 0.3}, {0.2, 0.2}}};

}  // namespace

TEST(ValidatePmf, AcceptsUniformAndDsbs) {
  const auto u = validate_pmf({2, 2}, {0.25, 0.25, 0.25, 0.25});
  EXPECT_EQ(u.k(), 2);
  const auto d = validate_pmf({2, 2}, {0.45, 0.05, 0.05, 0.45});
  EXPECT_EQ(d, dsbs(0.1));
}

TEST(ValidatePmf, Errors) {
  EXPECT_EQ(code_of([] { validate_pmf({2, 2}, {0.5, 0.5, 0.0, 0.0}); }), Errc::ZeroMarginal);
  EXPECT_EQ(code_of([] { validate_pmf({2, 2}, {0.6, -0.1, 0.25, 0.25}); }), Errc::NegativeProbability);
  EXPECT_EQ(code_of([] { validate_pmf({2, 2}, {0.3, 0.3, 0.3, 0.3}); }), Errc::NotNormalized);
  EXPECT_EQ(code_of([] { validate_pmf({2, 3}, {0.25, 0.25, 0.25, 0.25}); }), Errc::BadShape);
  EXPECT_EQ(code_of([] { validate_pmf({1, 4}, {0.25, 0.25, 0.25, 0.25}); }), Errc::BadShape);
}

TEST(ValidatePmf, ZeroMarginalNamesSourceAndSymbol) {
  try {
    validate_pmf({2, 2}, {0.5, 0.5, 0.0, 0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("source 0 symbol 1"), std::string::npos);
  }
}

TEST(ValidatePmf, RenormalizesSmallDeviation) {
  const auto p = validate_pmf({2, 2}, {0.25 + 4e-10, 0.25, 0.25, 0.25});
  double sum = 0;
  for (double v : p.probs()) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-15);
}

TEST(ValidatePmf, JsonRoundTrip) {
  const auto p = validate_pmf({2, 3}, {0.1, 0.2, 0.05, 0.15, 0.25, 0.25});
  const auto j = pmf_to_json(p);
  EXPECT_EQ(j["probs"][1][2].get<double>(), 0.25);
  EXPECT_EQ(pmf_from_json(j), p);
  EXPECT_EQ(pmf_from_spec(j.dump()), p);
}

TEST(ValidatePmf, RelaxedPointMassViaJson) {
  const auto j = nlohmann::json::parse(
      R"({"alphabet_sizes":[2,2],"probs":[[1.0,0.0],[0.0,0.0]],"allow_zero_marginals":true})");
  const auto p = pmf_from_json(j);
  EXPECT_EQ(p.at(0), 1.0);
  EXPECT_TRUE(pmf_to_json(p).value("allow_zero_marginals", false));
}

TEST(ValidatePmf, Generators) {
  EXPECT_EQ(pmf_from_spec("dsbs:0.1"), from_table(kDsbs));
  EXPECT_EQ(pmf_from_spec("zchannel:0.5:0.5"), from_table(kZ));
  EXPECT_EQ(pmf_from_spec("identity:2"), from_table(kIdentity));
  EXPECT_EQ(code_of([] { pmf_from_spec("dsbs:x"); }), Errc::InvalidConfig);
  EXPECT_EQ(code_of([] { pmf_from_spec("/nonexistent/pmf.json"); }), Errc::Io);
}

TEST(EntropyStats, Dsbs) {
  const auto e = entropy_stats(dsbs(0.1));
  const double h = ref::h2(0.1);
  EXPECT_NEAR(h, 0.468996, 1e-6);
  EXPECT_NEAR(e.marginal[0], 1.0, 1e-12);
  EXPECT_NEAR(e.marginal[1], 1.0, 1e-12);
  EXPECT_NEAR(e.conditional_of(1), 0.468996, 1e-6);
  EXPECT_NEAR(e.conditional_of(2), h, 1e-12);
  EXPECT_NEAR(e.joint, 1.468996, 1e-6);
  EXPECT_NEAR(e.conditional_of(3), e.joint, 1e-12);
}

TEST(EntropyStats, IndependentAndIdentity) {
  const auto ind = entropy_stats(validate_pmf({2, 2}, {0.25, 0.25, 0.25, 0.25}));
  EXPECT_NEAR(ind.conditional_of(1), 1.0, 1e-12);
  const auto id = entropy_stats(identity_channel(2));
  EXPECT_NEAR(id.conditional_of(1), 0.0, 1e-12);
  EXPECT_NEAR(id.joint, 1.0, 1e-12);
}

TEST(EntropyStats, ChainRuleAndBoundsOnRandomPmfs) {
  std::mt19937_64 rng(11);
  for (int it = 0; it < 300; ++it) {
    const auto t = ref::random_3x3(rng);
    const auto e = entropy_stats(from_table(t));
    EXPECT_NEAR(e.joint, t.hxy(), 1e-9);
    EXPECT_NEAR(e.marginal[0], t.hx(), 1e-9);
    // H(X,Y) = H(X) + H(Y|X)
    EXPECT_NEAR(e.joint, e.marginal[0] + e.conditional_of(2), 1e-9);
    for (std::uint32_t m = 1; m <= 3; ++m) {
      EXPECT_GE(e.conditional_of(m), 0.0);
      EXPECT_LE(e.conditional_of(m), e.subset_entropy[m] + 1e-12);
    }
    EXPECT_LE(e.marginal[0], std::log2(3.0) + 1e-12);
  }
}

TEST(EntropyStats, ThreeSources) {
  // X, Y independent uniform bits; Z = X xor Y.
  std::vector<double> p(8, 0.0);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) p[x * 4 + y * 2 + (x ^ y)] = 0.25;
  const auto e = entropy_stats(validate_pmf({2, 2, 2}, p));
  EXPECT_NEAR(e.joint, 2.0, 1e-12);
  EXPECT_NEAR(e.conditional_of(0b001), 0.0, 1e-12);
  EXPECT_NEAR(e.conditional_of(0b011), 1.0, 1e-12);
  EXPECT_NEAR(e.conditional_of(0b111), 2.0, 1e-12);
}

TEST(SwRegion, DsbsExamples) {
  const auto e = entropy_stats(dsbs(0.1));
  const std::vector<double> in{0.6, 1.0};
  const std::vector<double> out{0.4, 1.0};
  EXPECT_TRUE(sw_region_contains(e, in).inside);
  const auto r = sw_region_contains(e, out);
  EXPECT_FALSE(r.inside);
  // R_1 < H(X|Y) and R_1 + R_2 = 1.4 < H(X,Y) = 1.469.
  EXPECT_EQ(r.violated, (std::vector<std::uint32_t>{1u, 3u}));
  const std::vector<double> trivial{1.0, 1.0};
  EXPECT_TRUE(sw_region_contains(e, trivial).inside);
}

TEST(SwRegion, BoundaryIsInside) {
  const auto e = entropy_stats(dsbs(0.1));
  const std::vector<double> edge{e.conditional_of(1), 1.0};
  EXPECT_TRUE(sw_region_contains(e, edge).inside);
}

TEST(SwRegion, MonotoneInRates) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.6);
  for (int it = 0; it < 200; ++it) {
    const auto e = entropy_stats(from_table(ref::random_3x3(rng)));
    std::vector<double> r{u(rng), u(rng)};
    const bool before = sw_region_contains(e, r).inside;
    r[it % 2] += 0.1;
    if (before) {
      EXPECT_TRUE(sw_region_contains(e, r).inside);
    }
  }
}

TEST(Confusability, StandardExamples) {
  const auto full = validate_pmf({2, 2}, {0.4, 0.1, 0.2, 0.3});
  EXPECT_TRUE(is_confusable(full, 0).confusable);
  EXPECT_TRUE(is_confusable(full, 1).confusable);

  const auto z = is_confusable(from_table(kZ), 0);
  EXPECT_TRUE(z.confusable);
  ASSERT_EQ(z.pair_witnesses.size(), 1u);
  EXPECT_EQ(z.pair_witnesses[0].completion, std::vector<Symbol>{0});

  const auto id = is_confusable(identity_channel(2), 0);
  EXPECT_FALSE(id.confusable);
  ASSERT_TRUE(id.witness_pair);
  EXPECT_EQ(id.witness_pair->first, 0);
  EXPECT_EQ(id.witness_pair->second, 1);
}

TEST(Confusability, LowestLexicographicWitness) {
  // Pairs (0,1) share y=0, (0,2) share y=1, (1,2) share nothing.
  const auto p = validate_pmf({3, 2}, {0.2, 0.1, 0.3, 0.0, 0.0, 0.4});
  const auto r = is_confusable(p, 0);
  EXPECT_FALSE(r.confusable);
  EXPECT_EQ(r.witness_pair->first, 1);
  EXPECT_EQ(r.witness_pair->second, 2);
}

TEST(Confusability, ThreeSourceJointScan) {
  // X1 pairs are confusable only through (x2, x3) = (1, 1).
  std::vector<double> p(8, 0.0);
  p[0b000] = 0.3;
  p[0b011] = 0.2;
  p[0b111] = 0.2;
  p[0b110] = 0.3;
  const auto pmf = validate_pmf({2, 2, 2}, p);
  const auto r = is_confusable(pmf, 0);
  EXPECT_TRUE(r.confusable);
  EXPECT_EQ(r.pair_witnesses[0].completion, (std::vector<Symbol>{1, 1}));
}

TEST(Coupling, Examples) {
  const auto id = coupling(identity_channel(2));
  EXPECT_NEAR(id(0, 0), 0.5, 1e-15);
  EXPECT_EQ(id(0, 1), 0.0);
  const auto ind = coupling(validate_pmf({2, 2}, {0.25, 0.25, 0.25, 0.25}));
  for (double v : ind.values) EXPECT_NEAR(v, 0.25, 1e-15);
  const auto d = coupling(dsbs(0.1));
  EXPECT_NEAR(d(0, 0), 0.41, 1e-12);
  EXPECT_NEAR(d(0, 1), 0.09, 1e-12);
  EXPECT_NEAR(d(1, 0), 0.09, 1e-12);
  EXPECT_NEAR(d(1, 1), 0.41, 1e-12);
  EXPECT_TRUE(coupling_full_support(from_table(kZ)));
  EXPECT_FALSE(coupling_full_support(identity_channel(2)));
}

TEST(Coupling, MatchesReferenceAndMarginals) {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 100; ++it) {
    const auto t = ref::random_3x3(rng);
    const auto c = coupling(from_table(t));
    const auto r = ref::coupling(t);
    for (int a = 0; a < 3; ++a) {
      double row = 0, col = 0;
      for (int b = 0; b < 3; ++b) {
        EXPECT_NEAR(c(a, b), r[a][b], 1e-12);
        row += c(a, b);
        col += c(b, a);
      }
      EXPECT_NEAR(row, t.px(a), 1e-9);
      EXPECT_NEAR(col, t.px(a), 1e-9);
    }
  }
}

TEST(Confusability, EquivalentToCouplingSupportOnRandomPmfs) {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  int confusable = 0;
  for (int it = 0; it < 1000; ++it) {
    const auto t = ref::random_3x3(rng);
    const auto pmf = from_table(t);
    const bool c = is_confusable(pmf, 0).confusable;
    mismatches += c != coupling_full_support(pmf);
    mismatches += c != ref::confusable_x(t);
    confusable += c;
  }
  EXPECT_EQ(mismatches, 0);
  // Both classes occur.
  EXPECT_GT(confusable, 50);
  EXPECT_LT(confusable, 950);
}

TEST(Reduction, IdentityChannel) {
  const auto r = build_reduction(identity_channel(2));
  EXPECT_EQ(r.merged_first, 0);
  EXPECT_EQ(r.merged_second, 1);
  EXPECT_EQ(r.forward[0], r.forward[1]);
  EXPECT_NEAR(r.reduced_entropy, 0.0, 1e-15);
  EXPECT_NEAR(r.source_entropy, 1.0, 1e-15);
  EXPECT_EQ(r.disambiguation[0], 0);
  EXPECT_EQ(r.disambiguation[1], 1);
  EXPECT_EQ(reconstruct_from_reduction(r, r.merged_symbol(), 1), 1);
}

TEST(Reduction, ThreeByTwo) {
  const auto pmf = from_table(kThreeByTwo);
  const auto r = build_reduction(pmf);
  EXPECT_EQ(r.merged_first, 0);
  EXPECT_EQ(r.merged_second, 1);
  // U takes the merged value with probability 0.6 and symbol 2 with 0.4.
  EXPECT_NEAR(r.reduced_entropy, ref::h2(0.6), 1e-12);
  EXPECT_NEAR(r.source_entropy, ref::plogp(0.3) * 2 + ref::plogp(0.4), 1e-12);
  EXPECT_LT(r.reduced_entropy, r.source_entropy - 1e-9);
  EXPECT_EQ(reconstruct_from_reduction(r, r.merged_symbol(), 0), 0);
  EXPECT_EQ(reconstruct_from_reduction(r, 2, 0), 2);
  EXPECT_EQ(reconstruct_from_reduction(r, 2, 1), 2);
}

TEST(Reduction, ConfusableRejected) {
  EXPECT_EQ(code_of([] { build_reduction(pmf_from_spec("zchannel:0.5:0.5")); }),
            Errc::SourceIsConfusable);
}

TEST(Reduction, LosslessOnRandomNonConfusablePmfs) {
  std::mt19937_64 rng(99);
  int built = 0;
  for (int it = 0; it < 1000; ++it) {
    const auto t = ref::random_3x3(rng);
    if (ref::confusable_x(t)) continue;
    const auto pmf = from_table(t);
    const auto r = build_reduction(pmf);
    ++built;
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        if (t.p[x][y] > 0) {
          EXPECT_EQ(reconstruct_from_reduction(r, r.forward[x], static_cast<Symbol>(y)), x);
        }
    EXPECT_LT(r.reduced_entropy, r.source_entropy - 1e-9);
  }
  EXPECT_GT(built, 50);
}

TEST(Sample, PointMassAndDeterminism) {
  const auto pm = pmf_from_json(nlohmann::json::parse(
      R"({"alphabet_sizes":[2,2],"probs":[[1.0,0.0],[0.0,0.0]],"allow_zero_marginals":true})"));
  for (const auto& s : sample(pm, 1000, 3)) {
    for (Symbol v : s) EXPECT_EQ(v, 0);
  }
  EXPECT_EQ(sample(dsbs(0.1), 500, 42), sample(dsbs(0.1), 500, 42));
  EXPECT_NE(sample(dsbs(0.1), 500, 42), sample(dsbs(0.1), 500, 43));
}

TEST(Sample, DsbsDisagreementRate) {
  const auto s = sample(dsbs(0.1), 100000, 7);
  std::size_t diff = 0;
  for (std::size_t i = 0; i < s[0].size(); ++i) diff += s[0][i] != s[1][i];
  EXPECT_NEAR(diff / 1e5, 0.1, 0.005);
}

TEST(Sample, NeverDrawsZeroProbabilityTuples) {
  const auto s = sample(pmf_from_spec("zchannel:0.5:0.5"), 20000, 1);
  for (std::size_t i = 0; i < s[0].size(); ++i) {
    EXPECT_FALSE(s[0][i] == 0 && s[1][i] == 1);
  }
}
