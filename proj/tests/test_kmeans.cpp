#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "dendra/errors.hpp"
#include "dendra/kernels.hpp"
#include "dendra/kmeans.hpp"
#include "dendra/numeric.hpp"

using namespace dendra;

namespace {

// Two blobs of 6 patterns each: one around the first 8 bits, one around the last 8.
std::vector<SpikeVector> two_blobs() {
  std::vector<SpikeVector> out;
  std::mt19937_64 rng(21);
  for (int blob = 0; blob < 2; ++blob)
    for (int i = 0; i < 6; ++i) {
      std::vector<std::uint8_t> bits(16, 0);
      for (int j = 0; j < 8; ++j) bits[blob * 8 + j] = 1;
      bits[blob * 8 + rng() % 8] = 0;
      bits[(1 - blob) * 8 + rng() % 8] = 1;
      out.push_back(SpikeVector::from_bits(bits));
    }
  return out;
}

std::vector<SpikeVector> random_patterns(std::size_t n, std::size_t p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution b(0.3);
  std::vector<SpikeVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::uint8_t> bits(p);
    for (auto& v : bits) v = b(rng);
    out.push_back(SpikeVector::from_bits(bits));
  }
  return out;
}

}  // namespace

TEST(Kmeans, SingleClusterIsTheMean) {
  auto p = random_patterns(20, 10, 1);
  auto r = kmeans(p, 1, 5);
  EXPECT_EQ(r.centroids.size(), 1u);
  auto c = centroid_of(p);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(r.centroids[0].values[i], c.values[i], 1e-12);
  EXPECT_DOUBLE_EQ(r.convergence, 1.0);
  EXPECT_EQ(r.epochs, 1u);
}

TEST(Kmeans, RecoversBlobsLikeExhaustivePartition) {
  auto p = two_blobs();
  // Exhaustive oracle over all 2-partitions of 12 patterns.
  double best = 1e300;
  for (unsigned mask = 1; mask < (1u << 12) - 1; ++mask) {
    std::vector<std::size_t> a(12);
    for (std::size_t i = 0; i < 12; ++i) a[i] = (mask >> i) & 1;
    auto cs = centroids_of(p, a, 2);
    best = std::min(best, avg_dist(p, a, cs));
  }
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
  auto r = kmeans_multi_seed(p, 2, seeds).best;
  EXPECT_NEAR(r.avg_dist, best, 1e-12);
  for (int i = 1; i < 6; ++i) EXPECT_EQ(r.assignments[i], r.assignments[0]);
  for (int i = 7; i < 12; ++i) EXPECT_EQ(r.assignments[i], r.assignments[6]);
  EXPECT_NE(r.assignments[0], r.assignments[6]);
}

TEST(Kmeans, ReportedConvergenceMatchesDefinition) {
  auto p = random_patterns(200, 24, 2);
  KmeansOptions opt;
  opt.target_convergence = 0.98;
  auto r = kmeans(p, 5, 11, opt);
  std::size_t nearest = 0;
  for (std::size_t n = 0; n < p.size(); ++n) nearest += nearest_centroid(p[n], r.centroids) == r.assignments[n];
  EXPECT_DOUBLE_EQ(r.convergence, static_cast<double>(nearest) / static_cast<double>(p.size()));
  EXPECT_DOUBLE_EQ(r.convergence, kmeans_convergence(p, r.assignments, r.centroids));
  EXPECT_TRUE(r.convergence >= 0.98 || r.epochs == opt.max_epochs);
  EXPECT_NEAR(r.avg_dist, avg_dist(p, r.assignments, r.centroids), 1e-12);
}

TEST(Kmeans, AlwaysKeepsKCentroids) {
  // Many duplicates make empty clusters likely.
  std::vector<SpikeVector> p(30, SpikeVector::from_string("1100"));
  p.push_back(SpikeVector::from_string("0011"));
  p.push_back(SpikeVector::from_string("0110"));
  p.push_back(SpikeVector::from_string("1001"));
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto r = kmeans(p, 3, seed);
    ASSERT_EQ(r.centroids.size(), 3u);
    for (auto a : r.assignments) ASSERT_LT(a, 3u);
  }
}

TEST(Kmeans, DeterministicPerSeed) {
  auto p = random_patterns(150, 20, 3);
  auto a = kmeans(p, 4, 42);
  auto b = kmeans(p, 4, 42);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.epochs, b.epochs);
  EXPECT_EQ(a.avg_dist, b.avg_dist);
}

TEST(Kmeans, SerialAndParallelAgree) {
  auto p = random_patterns(300, 32, 4);
  KmeansOptions s, q;
  s.parallel = false;
  q.parallel = true;
  auto a = kmeans(p, 6, 7, s);
  auto b = kmeans(p, 6, 7, q);
  EXPECT_EQ(a.assignments, b.assignments);
  EXPECT_EQ(a.avg_dist, b.avg_dist);
}

TEST(Kmeans, RejectsBadArguments) {
  auto p = random_patterns(3, 4, 5);
  EXPECT_THROW(kmeans(p, 0, 1), DomainError);
  EXPECT_THROW(kmeans(p, 4, 1), DomainError);
  KmeansOptions bad;
  bad.target_convergence = 0.0;
  EXPECT_THROW(kmeans(p, 2, 1, bad), DomainError);
  std::vector<SpikeVector> none;
  EXPECT_THROW(kmeans(none, 1, 1), DomainError);
}

TEST(KmeansMultiSeed, OneSeedIsPlainKmeans) {
  auto p = random_patterns(80, 16, 6);
  std::vector<std::uint64_t> seeds{9};
  auto m = kmeans_multi_seed(p, 3, seeds);
  auto r = kmeans(p, 3, 9);
  EXPECT_EQ(m.best.assignments, r.assignments);
  EXPECT_EQ(m.best.avg_dist, r.avg_dist);
}

TEST(KmeansMultiSeed, BestIsMinimumOverSeeds) {
  auto p = random_patterns(120, 16, 7);
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8};
  auto m = kmeans_multi_seed(p, 4, seeds);
  ASSERT_EQ(m.avg_dists.size(), seeds.size());
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    EXPECT_LE(m.best.avg_dist, m.avg_dists[i]);
    EXPECT_EQ(m.avg_dists[i], kmeans(p, 4, seeds[i]).avg_dist);
  }
  EXPECT_EQ(m.best.avg_dist, m.avg_dists[m.best_index]);
  std::vector<std::uint64_t> empty;
  EXPECT_THROW(kmeans_multi_seed(p, 4, empty), DomainError);
}

TEST(KmeansMultiSeed, CsvTables) {
  auto p = two_blobs();
  std::vector<std::uint64_t> seeds{1, 2};
  auto m = kmeans_multi_seed(p, 2, seeds);
  std::ostringstream c, s;
  write_centroids_csv(c, m.best.centroids);
  write_seed_table_csv(s, m);
  const auto cs = c.str(), ss = s.str();
  EXPECT_EQ(cs.substr(0, 2), "0,");
  EXPECT_EQ(std::count(cs.begin(), cs.end(), '\n'), 2);
  EXPECT_EQ(std::count(cs.begin(), cs.end(), ','), 32);
  EXPECT_EQ(ss.substr(0, 19), "seed,avg_dist,best\n");
  EXPECT_EQ(std::count(ss.begin(), ss.end(), '\n'), 3);
}

TEST(Kernels, AssignNearestSerialEqualsParallel) {
  auto p = random_patterns(500, 40, 8);
  std::vector<Centroid> cs;
  for (int k = 0; k < 7; ++k) {
    std::vector<SpikeVector> members(p.begin() + k * 10, p.begin() + k * 10 + 10);
    cs.push_back(centroid_of(members));
  }
  std::vector<std::size_t> a(p.size()), b(p.size());
  kernels::assign_nearest_serial(p, cs, a);
  kernels::assign_nearest_parallel(p, cs, b);
  EXPECT_EQ(a, b);
  for (std::size_t n = 0; n < p.size(); ++n) ASSERT_EQ(a[n], nearest_centroid(p[n], cs));
}

TEST(Kernels, AssignNearestValidatesBeforeParallelRegion) {
  auto p = random_patterns(4, 8, 9);
  std::vector<Centroid> bad{Centroid{std::vector<double>(7)}};
  std::vector<std::size_t> out(4);
  EXPECT_THROW(kernels::assign_nearest_parallel(p, bad, out), DimensionError);
  std::vector<Centroid> none;
  EXPECT_THROW(kernels::assign_nearest_parallel(p, none, out), DomainError);
}
