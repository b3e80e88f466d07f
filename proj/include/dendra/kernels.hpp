#ifndef DENDRA_KERNELS_HPP
#define DENDRA_KERNELS_HPP

// Hot loops in two flavours: a plain serial reference and an OpenMP
// version. Both must produce identical results for any thread count; the
// tests compare them and bench/ times them.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dendra/classifier.hpp"
#include "dendra/spike_vector.hpp"

namespace dendra::kernels {

/// Thresholded WTA winner without allocating; `scratch` needs w.cols() slots.
std::optional<std::size_t> winner(const SpikeVector& x, const WeightMatrix& w, Potential threshold,
                                  std::span<Potential> scratch);

// Per-unit votes, laid out like the units (group-major). votes.size() must
// be unit_count().
void votes_serial(const Network& net, std::span<const SpikeVector> contexts, std::span<std::uint8_t> votes);
void votes_parallel(const Network& net, std::span<const SpikeVector> contexts, std::span<std::uint8_t> votes);

// Votes plus the SDP update of each group's `label` unit.
void supervise_serial(Network& net, std::span<const SpikeVector> contexts, std::size_t label,
                      std::span<std::uint8_t> votes);
void supervise_parallel(Network& net, std::span<const SpikeVector> contexts, std::size_t label,
                        std::span<std::uint8_t> votes);

/// Sums group votes into per-label counts.
std::vector<std::uint32_t> tally(std::span<const std::uint8_t> votes, std::size_t label_count);

// Nearest-centroid assignment for every pattern.
void assign_nearest_serial(std::span<const SpikeVector> patterns, std::span<const Centroid> centroids,
                           std::span<std::size_t> out);
void assign_nearest_parallel(std::span<const SpikeVector> patterns, std::span<const Centroid> centroids,
                             std::span<std::size_t> out);

/// Threads OpenMP would use; 1 when built without OpenMP.
int max_threads();

}  // namespace dendra::kernels

#endif  // DENDRA_KERNELS_HPP
