#ifndef DENDRA_NUMERIC_HPP
#define DENDRA_NUMERIC_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "dendra/spike_vector.hpp"
#include "dendra/types.hpp"
#include "dendra/weight_matrix.hpp"

/**
 * @file numeric.hpp
 * Centroid arithmetic and the rectilinear-distance identities that the
 * dendrite is tested against.
 */

namespace dendra {

/// Masked sum of w over the spiking positions of x. Throws DimensionError.
Potential dot(const SpikeVector& x, std::span<const Weight> w);

/// Real-valued masked sum, used against centroids.
double dot(const SpikeVector& x, const Centroid& c);

/// Sum of absolute differences (rectilinear distance).
double sad(std::span<const double> a, std::span<const double> b);
double sad(const SpikeVector& x, const Centroid& c);
double sad(const SpikeVector& a, const SpikeVector& b);

/// Component-wise mean. Throws DomainError on an empty list.
Centroid centroid_of(std::span<const SpikeVector> patterns);

/// Mean over the listed members only.
Centroid centroid_of(std::span<const SpikeVector> patterns, std::span<const std::size_t> members);

/// Arithmetic-mean centroids of every cluster in `assignments`, k of them.
/// Empty clusters get an all-zero centroid. Unassigned patterns are skipped.
std::vector<Centroid> centroids_of(std::span<const SpikeVector> patterns,
                                   std::span<const std::size_t> assignments, std::size_t k);

/// Index of the minimum-sad centroid; ties go to the lowest index.
std::size_t nearest_centroid(const SpikeVector& x, std::span<const Centroid> centroids);

/// Mean over patterns of sad(pattern, centroid of its cluster).
/// Throws DomainError if any pattern is unassigned.
double avg_dist(std::span<const SpikeVector> patterns, std::span<const std::size_t> assignments,
                std::span<const Centroid> centroids);

/**
 * Σ w (w_max − w) / (w_max · num_weights), evaluated in real weight units
 * (scaled integers divided by the matrix's scale denominator).
 *
 * Ranges over [0, w_max/4]; 0 when every weight sits at 0 or w_max.
 * `w_max` is in the same scaled units as the matrix. Throws DomainError if a
 * weight falls outside [0, w_max].
 */
double wt_convergence(const WeightMatrix& w, Weight w_max);

}  // namespace dendra

#endif  // DENDRA_NUMERIC_HPP
