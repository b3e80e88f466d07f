#ifndef DENDRA_KMEANS_HPP
#define DENDRA_KMEANS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "dendra/spike_vector.hpp"

namespace dendra {

struct KmeansOptions {
  double target_convergence = 0.98;
  std::size_t max_epochs = 200;
  bool parallel = true;  // data-parallel assignment step
};

struct KmeansResult {
  std::vector<Centroid> centroids;
  std::vector<std::size_t> assignments;
  double convergence = 0.0;  // fraction of patterns nearest their own centroid
  std::size_t epochs = 0;
  double avg_dist = 0.0;
};

/**
 * Lloyd-style k-means under sad with arithmetic-mean centroids.
 *
 * Each epoch assigns every pattern to its nearest centroid and then
 * recomputes the means. Stops once the convergence fraction reaches the
 * target or after max_epochs. Initial centroids are k distinct patterns
 * drawn with `seed`. A cluster that empties is reseeded with the pattern
 * farthest from its own centroid.
 *
 * Throws DomainError if k == 0, k exceeds the pattern count, or the target
 * is outside (0, 1].
 */
KmeansResult kmeans(std::span<const SpikeVector> patterns, std::size_t k, std::uint64_t seed,
                    const KmeansOptions& options = {});

/// Fraction of patterns whose nearest centroid is their assigned one.
double kmeans_convergence(std::span<const SpikeVector> patterns, std::span<const std::size_t> assignments,
                          std::span<const Centroid> centroids);

struct MultiSeedResult {
  KmeansResult best;
  std::size_t best_index = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<double> avg_dists;  // one per seed, in seed order
};

/// Runs kmeans once per seed and keeps the lowest avg_dist (ties: earliest seed).
MultiSeedResult kmeans_multi_seed(std::span<const SpikeVector> patterns, std::size_t k,
                                  std::span<const std::uint64_t> seeds, const KmeansOptions& options = {});

/// Row per centroid: "cluster,c0,c1,...".
void write_centroids_csv(std::ostream& out, std::span<const Centroid> centroids);

/// "seed,avg_dist" table.
void write_seed_table_csv(std::ostream& out, const MultiSeedResult& r);

}  // namespace dendra

#endif  // DENDRA_KMEANS_HPP
