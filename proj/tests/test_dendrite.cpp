#include <gtest/gtest.h>

#include <random>

#include "dendra/dendrite.hpp"
#include "dendra/errors.hpp"
#include "dendra/numeric.hpp"

using namespace dendra;

namespace {

SdpParams unit_params(Weight capture, Weight backoff, Weight search, Weight w_max, Weight w_0, Potential theta) {
  SdpParams p;
  p.capture = capture;
  p.backoff = backoff;
  p.search = search;
  p.w_max = w_max;
  p.w_0 = w_0;
  p.threshold = theta;
  p.scale_denominator = 1;
  return p;
}

SpikeVector pattern(std::size_t p, std::initializer_list<std::uint32_t> on) {
  std::vector<std::uint32_t> idx(on);
  return SpikeVector::from_indices(p, idx);
}

std::vector<Weight> column(const WeightMatrix& w, std::size_t j) {
  std::vector<Weight> out;
  for (std::size_t i = 0; i < w.rows(); ++i) out.push_back(w(i, j));
  return out;
}

// The update rule, one synapse at a time.
Weight reference_cell(Weight w, bool x, bool z, const SdpParams& p) {
  if (!x && z) return std::max<Weight>(0, w - p.backoff);
  if (x && !z) return w >= p.w_0 ? w : std::min(p.w_0, w + p.search);
  if (x && z) return std::min(p.w_max, w + p.capture);
  return w;
}

}  // namespace

TEST(Fraction, ParseAndScale) {
  EXPECT_EQ(Fraction::parse("9/16").scaled(256), 144);
  EXPECT_EQ(Fraction::parse("1/256").scaled(256), 1);
  EXPECT_EQ(Fraction::parse("25/256").scaled(256), 25);
  EXPECT_EQ(Fraction::parse("1").scaled(256), 256);
  EXPECT_THROW(Fraction::parse("1/3").scaled(256), DomainError);
  EXPECT_THROW(Fraction::parse("x"), DomainError);
  EXPECT_TRUE(Fraction::parse("2/4") == Fraction::parse("1/2"));
  EXPECT_TRUE(Fraction::parse("1/3") < Fraction::parse("1/2"));
}

TEST(SdpParams, FromRealScalesEverything) {
  auto p = SdpParams::from_real({1, 1}, {9, 16}, {0, 1}, {12, 1}, {8, 1}, {128, 1}, 256);
  EXPECT_EQ(p.capture, 256);
  EXPECT_EQ(p.backoff, 144);
  EXPECT_EQ(p.search, 0);
  EXPECT_EQ(p.w_max, 12 * 256);
  EXPECT_EQ(p.w_0, 8 * 256);
  EXPECT_EQ(p.threshold, 128 * 256);
}

TEST(SdpParams, RejectsW0AtOrAboveWmax) {
  EXPECT_THROW(unit_params(1, 1, 0, 8, 8, 0).validate(), DomainError);
  EXPECT_THROW(unit_params(-1, 1, 0, 8, 4, 0).validate(), DomainError);
  EXPECT_NO_THROW(unit_params(1, 1, 0, 8, 4, 0).validate());
}

TEST(SdpParams, LargeSearchOnlyWarns) {
  auto p = unit_params(4, 2, 2, 16, 8, 0);
  EXPECT_NO_THROW(p.validate());
  EXPECT_FALSE(p.warnings().empty());
  EXPECT_TRUE(unit_params(256, 144, 1, 3072, 2048, 0).warnings().empty());
}

TEST(SegmentEval, PassesPotentialAtOrAboveThreshold) {
  auto x = pattern(12, {0, 1, 2, 3, 4, 5});
  std::vector<Weight> w(12, 5);
  EXPECT_EQ(segment_eval(x, w, 30), 30);
  EXPECT_EQ(segment_eval(x, w, 29), 30);
  EXPECT_EQ(segment_eval(x, w, 31), 0);
}

TEST(SegmentEval, ZeroThresholdIsDot) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Weight> wd(0, 20);
  std::bernoulli_distribution b(0.5);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::uint8_t> bits(20);
    std::vector<Weight> w(20);
    for (int i = 0; i < 20; ++i) {
      bits[i] = b(rng);
      w[i] = wd(rng);
    }
    auto x = SpikeVector::from_bits(bits);
    ASSERT_EQ(segment_eval(x, w, 0), dot(x, w));
  }
}

TEST(Wta, TieGoesToLowestIndex) {
  std::vector<Potential> v{30, 30};
  auto z = wta(v);
  ASSERT_TRUE(z.fired());
  EXPECT_EQ(*z.cid, 0u);
  EXPECT_EQ(z.values, (std::vector<Potential>{30, 0}));
}

TEST(Wta, AllZeroHasNoWinner) {
  std::vector<Potential> v{0, 0, 0};
  auto z = wta(v);
  EXPECT_FALSE(z.fired());
  EXPECT_EQ(z.values, (std::vector<Potential>{0, 0, 0}));
}

TEST(Wta, PicksMaximum) {
  std::vector<Potential> v{26, 30};
  auto z = wta(v);
  EXPECT_EQ(*z.cid, 1u);
  EXPECT_EQ(z.value(), 30);
}

TEST(Wta, OneHotInvariantOnRandomInputs) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<Potential> d(0, 5);
  for (int t = 0; t < 1000; ++t) {
    std::vector<Potential> v(6);
    for (auto& e : v) e = d(rng);
    auto z = wta(v);
    int nonzero = 0;
    for (auto e : z.values) nonzero += e != 0;
    ASSERT_LE(nonzero, 1);
    Potential mx = *std::max_element(v.begin(), v.end());
    if (mx == 0) {
      ASSERT_FALSE(z.fired());
    } else {
      ASSERT_EQ(z.value(), mx);
      ASSERT_EQ(*z.cid, static_cast<std::size_t>(std::find(v.begin(), v.end(), mx) - v.begin()));
    }
  }
}

TEST(Binarize, OneHot) {
  WtaOutput z{{0, 0, 0, 0, 12, 0}, 4};
  EXPECT_EQ(binarize(z).to_string(), "000010");
  EXPECT_EQ(binarize(WtaOutput{{0, 0}, std::nullopt}).to_string(), "00");
}

TEST(DendriteInfer, DisabledProximalGivesNothing) {
  WeightMatrix w(12, 2, 5);
  auto z = dendrite_infer(pattern(12, {0, 1, 2}), false, w, unit_params(1, 1, 0, 12, 5, 0));
  EXPECT_FALSE(z.fired());
  EXPECT_EQ(z.values, (std::vector<Potential>{0, 0}));
}

TEST(DendriteInfer, DimensionMismatchThrows) {
  WeightMatrix w(12, 2, 5);
  EXPECT_THROW(dendrite_infer(SpikeVector(11), true, w, unit_params(1, 1, 0, 12, 5, 0)), DimensionError);
}

TEST(DendriteInfer, ThresholdGatesEverySegment) {
  WeightMatrix w(4, 3, 2);
  w(0, 1) = 9;
  auto x = pattern(4, {0, 1});
  auto z = dendrite_infer(x, true, w, unit_params(1, 1, 0, 12, 5, 6));
  EXPECT_EQ(*z.cid, 1u);
  EXPECT_EQ(z.value(), 11);
  EXPECT_FALSE(dendrite_infer(x, true, w, unit_params(1, 1, 0, 12, 5, 12)).fired());
}

// Worked example with 12 inputs, 6-spike patterns, two segments at w_0 = 5.
class WorkedExample : public ::testing::Test {
 protected:
  SpikeVector a = pattern(12, {0, 1, 2, 3, 4, 5});
  SpikeVector b = pattern(12, {2, 3, 4, 5, 6, 7});
  SpikeVector c = pattern(12, {4, 5, 8, 9, 10, 11});
};

TEST_F(WorkedExample, BackoffOneJoinsThenSplits) {
  Dendrite d(12, 2, unit_params(1, 1, 0, 12, 5, 0));
  EXPECT_EQ(potentials(a, d.weights()), (std::vector<Potential>{30, 30}));
  auto z = d.step(a);
  EXPECT_EQ(*z.cid, 0u);
  EXPECT_EQ(column(d.weights(), 0), (std::vector<Weight>{6, 6, 6, 6, 6, 6, 4, 4, 4, 4, 4, 4}));
  EXPECT_EQ(column(d.weights(), 1), std::vector<Weight>(12, 5));

  EXPECT_EQ(potentials(b, d.weights()), (std::vector<Potential>{32, 30}));
  z = d.step(b);
  EXPECT_EQ(*z.cid, 0u);
  EXPECT_EQ(column(d.weights(), 0), (std::vector<Weight>{5, 5, 7, 7, 7, 7, 5, 5, 3, 3, 3, 3}));

  EXPECT_EQ(potentials(c, d.weights()), (std::vector<Potential>{26, 30}));
  z = d.step(c);
  EXPECT_EQ(*z.cid, 1u);
  EXPECT_EQ(column(d.weights(), 1), (std::vector<Weight>{4, 4, 4, 4, 6, 6, 4, 4, 6, 6, 6, 6}));
}

TEST_F(WorkedExample, BackoffThreeDiverges) {
  Dendrite d(12, 2, unit_params(1, 3, 0, 12, 5, 0));
  auto z = d.step(a);
  EXPECT_EQ(*z.cid, 0u);
  EXPECT_EQ(column(d.weights(), 0), (std::vector<Weight>{6, 6, 6, 6, 6, 6, 2, 2, 2, 2, 2, 2}));

  EXPECT_EQ(potentials(b, d.weights()), (std::vector<Potential>{28, 30}));
  z = d.step(b);
  EXPECT_EQ(*z.cid, 1u);
  EXPECT_EQ(column(d.weights(), 1), (std::vector<Weight>{2, 2, 6, 6, 6, 6, 6, 6, 2, 2, 2, 2}));

  EXPECT_EQ(potentials(c, d.weights()), (std::vector<Potential>{20, 20}));
  z = d.step(c);
  EXPECT_EQ(*z.cid, 0u);
}

TEST(SdpUpdate, NoWinnerNoSearchIsIdentity) {
  WeightMatrix w(6, 3, 4);
  w(2, 1) = 0;
  auto before = w;
  sdp_update(w, pattern(6, {0, 2}), SpikeVector(3), unit_params(1, 1, 0, 8, 4, 0));
  EXPECT_EQ(w, before);
}

TEST(SdpUpdate, RejectsMultiHotOutput) {
  WeightMatrix w(2, 2, 1);
  EXPECT_THROW(sdp_update(w, pattern(2, {0}), pattern(2, {0, 1}), unit_params(1, 1, 0, 8, 4, 0)), DomainError);
}

TEST(SdpUpdate, DimensionMismatchThrows) {
  WeightMatrix w(3, 2, 1);
  EXPECT_THROW(sdp_update(w, SpikeVector(2), SpikeVector(2), unit_params(1, 1, 0, 8, 4, 0)), DimensionError);
  EXPECT_THROW(sdp_update(w, SpikeVector(3), SpikeVector(3), unit_params(1, 1, 0, 8, 4, 0)), DimensionError);
}

TEST(SdpUpdate, MatchesPerCellReference) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 2000; ++t) {
    const Weight w_max = 1 + static_cast<Weight>(rng() % 40);
    const Weight w_0 = static_cast<Weight>(rng() % w_max);
    auto params = unit_params(static_cast<Weight>(rng() % 10), static_cast<Weight>(rng() % 10),
                              static_cast<Weight>(rng() % 10), w_max, w_0, 0);
    const std::size_t p = 1 + rng() % 12, q = 1 + rng() % 5;
    WeightMatrix w(p, q, 0);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < q; ++j) w(i, j) = static_cast<Weight>(rng() % (w_max + 1));
    std::vector<std::uint8_t> xb(p), zb(q, 0);
    for (auto& v : xb) v = rng() & 1;
    if (rng() % 4) zb[rng() % q] = 1;
    auto x = SpikeVector::from_bits(xb);
    auto z = SpikeVector::from_bits(zb);
    auto got = sdp_updated(w, x, z, params);
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < q; ++j)
        ASSERT_EQ(got(i, j), reference_cell(w(i, j), xb[i], zb[j], params)) << "cell " << i << "," << j;
  }
}

TEST(SdpUpdate, SearchStopsAtW0AndNeverLowers) {
  auto params = unit_params(1, 1, 3, 12, 8, 0);
  WeightMatrix w(3, 1, 0);
  w(0, 0) = 7;
  w(1, 0) = 10;
  w(2, 0) = 8;
  sdp_update(w, pattern(3, {0, 1, 2}), SpikeVector(1), params);
  EXPECT_EQ(column(w, 0), (std::vector<Weight>{8, 10, 8}));
}

TEST(SdpUpdate, WeightsStayInBounds) {
  std::mt19937_64 rng(6);
  auto params = unit_params(5, 3, 2, 20, 9, 0);
  Dendrite d(10, 3, params);
  std::bernoulli_distribution b(0.4);
  for (int t = 0; t < 5000; ++t) {
    std::vector<std::uint8_t> bits(10);
    for (auto& v : bits) v = b(rng);
    auto x = SpikeVector::from_bits(bits);
    d.step(x);
    for (auto v : d.weights().data()) ASSERT_TRUE(v >= 0 && v <= params.w_max);
  }
}

TEST(Dendrite, LearningOffLeavesWeights) {
  Dendrite d(6, 2, unit_params(1, 1, 1, 8, 4, 0));
  auto before = d.weights();
  d.step(pattern(6, {1, 2}), true, false);
  d.step(pattern(6, {3}), false, false);
  EXPECT_EQ(d.weights(), before);
}

TEST(Dendrite, DisabledProximalOnlySearches) {
  Dendrite d(4, 2, unit_params(1, 1, 1, 8, 4, 0));
  d.weights()(0, 0) = 1;
  auto z = d.step(pattern(4, {0, 1}), false, true);
  EXPECT_FALSE(z.fired());
  EXPECT_EQ(d.weights()(0, 0), 2);
  EXPECT_EQ(d.weights()(1, 0), 4);
  EXPECT_EQ(d.weights()(2, 0), 4);
}

TEST(Dendrite, SearchRecoversToThreshold) {
  // w_0 = threshold / m: a silent segment climbs back to firing.
  const Weight m = 4, w_0 = 6, search = 2;
  auto params = unit_params(1, 1, search, 12, w_0, m * w_0);
  Dendrite d(8, 1, params);
  for (auto& v : d.weights().data()) v = 1;
  auto x = pattern(8, {0, 2, 4, 6});
  const int bound = (w_0 - 1 + search - 1) / search;
  int presentations = 0;
  while (!d.infer(x).fired()) {
    d.step(x);
    ++presentations;
    ASSERT_LE(presentations, bound);
  }
  EXPECT_EQ(d.infer(x).value(), m * w_0);
}

TEST(SameClusterBound, KnownValues) {
  EXPECT_TRUE(same_cluster_bound(4, 6) == Fraction(2, 1));
  EXPECT_TRUE(same_cluster_bound(0, 5) == Fraction(0, 1));
  EXPECT_THROW(same_cluster_bound(3, 3), DomainError);
  EXPECT_THROW(same_cluster_bound(-1, 3), DomainError);
}

// Two consecutive m-spike patterns with the given overlap on a fresh
// two-segment dendrite: does the second join the first's cluster?
bool co_cluster(int m, int overlap, Weight backoff_sixteenths) {
  const Weight scale = 16;
  auto params = unit_params(scale, backoff_sixteenths, 0, 64 * scale, 32 * scale, 0);
  params.scale_denominator = scale;
  const std::size_t p = static_cast<std::size_t>(2 * m);
  Dendrite d(p, 2, params);
  std::vector<std::uint32_t> first, second;
  for (int i = 0; i < m; ++i) first.push_back(static_cast<std::uint32_t>(i));
  for (int i = 0; i < m; ++i) second.push_back(static_cast<std::uint32_t>(m - overlap + i));
  auto z1 = d.step(SpikeVector::from_indices(p, first));
  auto z2 = d.step(SpikeVector::from_indices(p, second));
  return z1.cid == z2.cid;
}

TEST(SameClusterBound, ExhaustiveSimulationWithLowestIndexTies) {
  // Ties go to the segment that already holds the first pattern, so the
  // boundary itself co-clusters.
  for (int m = 2; m <= 8; ++m)
    for (int o = 0; o < m; ++o)
      for (Weight k = 1; k <= 64; ++k) {
        const bool joins = Fraction{k, 16} <= same_cluster_bound(o, m);
        ASSERT_EQ(co_cluster(m, o, k), joins) << "m=" << m << " overlap=" << o << " backoff=" << k << "/16";
      }
}

TEST(SameClusterBound, StrictBoundHoldsOffTheBoundary) {
  for (int m = 2; m <= 8; ++m)
    for (int o = 0; o < m; ++o)
      for (Weight k = 1; k <= 64; ++k) {
        Fraction b{k, 16};
        if (b == same_cluster_bound(o, m)) continue;
        ASSERT_EQ(co_cluster(m, o, k), b < same_cluster_bound(o, m));
      }
}

TEST(Dendrite, DeterministicTrajectories) {
  auto run = [] {
    std::mt19937_64 rng(99);
    std::bernoulli_distribution b(0.3);
    Dendrite d(30, 4, unit_params(3, 2, 1, 16, 8, 20));
    for (int t = 0; t < 3000; ++t) {
      std::vector<std::uint8_t> bits(30);
      for (auto& v : bits) v = b(rng);
      d.step(SpikeVector::from_bits(bits));
    }
    return d.weights();
  };
  EXPECT_EQ(run(), run());
}
