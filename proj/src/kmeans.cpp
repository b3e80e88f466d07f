#include "dendra/kmeans.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <random>

#include "dendra/errors.hpp"
#include "dendra/kernels.hpp"
#include "dendra/numeric.hpp"

namespace dendra {

namespace {

void assign(std::span<const SpikeVector> patterns, std::span<const Centroid> centroids, std::span<std::size_t> out,
            bool parallel) {
  if (parallel)
    kernels::assign_nearest_parallel(patterns, centroids, out);
  else
    kernels::assign_nearest_serial(patterns, centroids, out);
}

std::vector<std::size_t> initial_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  // Partial Fisher-Yates over the pattern indices.
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

Centroid as_centroid(const SpikeVector& x) {
  Centroid c{std::vector<double>(x.size(), 0.0)};
  for (auto i : x.active()) c.values[i] = 1.0;
  return c;
}

}  // namespace

double kmeans_convergence(std::span<const SpikeVector> patterns, std::span<const std::size_t> assignments,
                          std::span<const Centroid> centroids) {
  if (patterns.empty()) return 1.0;
  std::size_t settled = 0;
  for (std::size_t n = 0; n < patterns.size(); ++n)
    if (nearest_centroid(patterns[n], centroids) == assignments[n]) ++settled;
  return static_cast<double>(settled) / static_cast<double>(patterns.size());
}

KmeansResult kmeans(std::span<const SpikeVector> patterns, std::size_t k, std::uint64_t seed,
                    const KmeansOptions& options) {
  if (k == 0) throw DomainError("k must be >= 1");
  if (patterns.empty()) throw DomainError("kmeans over an empty pattern list");
  if (k > patterns.size()) throw DomainError("k exceeds the number of patterns");
  if (!(options.target_convergence > 0.0 && options.target_convergence <= 1.0))
    throw DomainError("target convergence must be in (0, 1]");

  KmeansResult r;
  for (auto i : initial_indices(patterns.size(), k, seed)) r.centroids.push_back(as_centroid(patterns[i]));
  r.assignments.assign(patterns.size(), 0);
  std::vector<std::size_t> nearest(patterns.size());

  while (r.epochs < options.max_epochs) {
    assign(patterns, r.centroids, r.assignments, options.parallel);
    r.centroids = centroids_of(patterns, r.assignments, k);
    ++r.epochs;

    // Reseed empty clusters with the patterns farthest from their centroids.
    std::vector<std::size_t> counts(k, 0);
    for (auto a : r.assignments) ++counts[a];
    if (std::find(counts.begin(), counts.end(), 0) != counts.end()) {
      std::vector<std::pair<double, std::size_t>> far;
      far.reserve(patterns.size());
      for (std::size_t n = 0; n < patterns.size(); ++n)
        far.emplace_back(sad(patterns[n], r.centroids[r.assignments[n]]), n);
      std::stable_sort(far.begin(), far.end(), [](auto& a, auto& b) { return a.first > b.first; });
      std::size_t next = 0;
      for (std::size_t j = 0; j < k; ++j)
        if (counts[j] == 0) r.centroids[j] = as_centroid(patterns[far[next++].second]);
    }

    assign(patterns, r.centroids, nearest, options.parallel);
    std::size_t settled = 0;
    for (std::size_t n = 0; n < patterns.size(); ++n) settled += nearest[n] == r.assignments[n] ? 1 : 0;
    r.convergence = static_cast<double>(settled) / static_cast<double>(patterns.size());
    if (r.convergence >= options.target_convergence) break;
  }
  r.avg_dist = avg_dist(patterns, r.assignments, r.centroids);
  return r;
}

MultiSeedResult kmeans_multi_seed(std::span<const SpikeVector> patterns, std::size_t k,
                                  std::span<const std::uint64_t> seeds, const KmeansOptions& options) {
  if (seeds.empty()) throw DomainError("at least one seed is required");
  if (k == 0 || patterns.empty() || k > patterns.size()) throw DomainError("invalid k for this pattern set");
  MultiSeedResult m;
  m.seeds.assign(seeds.begin(), seeds.end());
  std::vector<KmeansResult> runs(seeds.size());
  KmeansOptions inner = options;
  inner.parallel = false;  // parallel across seeds instead
  const auto n = static_cast<long>(seeds.size());
#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < n; ++s)
    runs[static_cast<std::size_t>(s)] = kmeans(patterns, k, seeds[static_cast<std::size_t>(s)], inner);
  for (std::size_t s = 0; s < runs.size(); ++s) {
    m.avg_dists.push_back(runs[s].avg_dist);
    if (runs[s].avg_dist < runs[m.best_index].avg_dist) m.best_index = s;
  }
  m.best = std::move(runs[m.best_index]);
  return m;
}

void write_centroids_csv(std::ostream& out, std::span<const Centroid> centroids) {
  char buf[32];
  for (std::size_t j = 0; j < centroids.size(); ++j) {
    out << j;
    for (double v : centroids[j].values) {
      std::snprintf(buf, sizeof buf, ",%.6f", v);
      out << buf;
    }
    out << '\n';
  }
}

void write_seed_table_csv(std::ostream& out, const MultiSeedResult& r) {
  char buf[64];
  out << "seed,avg_dist,best\n";
  for (std::size_t s = 0; s < r.seeds.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.6f", r.avg_dists[s]);
    out << r.seeds[s] << ',' << buf << ',' << (s == r.best_index ? 1 : 0) << '\n';
  }
}

}  // namespace dendra
