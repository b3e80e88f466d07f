#include "dendra/kernels.hpp"

#include <string>

#include "dendra/dendrite.hpp"
#include "dendra/errors.hpp"
#include "dendra/numeric.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace dendra::kernels {

namespace {

void check_contexts(const Network& net, std::span<const SpikeVector> contexts, std::span<std::uint8_t> votes) {
  const auto& s = net.shape();
  if (contexts.size() != s.rf_count)
    throw DimensionError("expected " + std::to_string(s.rf_count) + " contexts, got " +
                         std::to_string(contexts.size()));
  if (votes.size() != s.unit_count()) throw DimensionError("vote buffer does not match the unit count");
  for (const auto& c : contexts)
    if (c.size() != s.inputs) throw DimensionError("context length does not match the network input width");
}

void group_votes(const Network& net, const SpikeVector& x, std::size_t g, std::span<std::uint8_t> votes,
                 std::span<Potential> scratch) {
  const auto labels = net.shape().label_count;
  for (std::size_t l = 0; l < labels; ++l)
    votes[g * labels + l] = winner(x, net.unit(g, l), net.params().threshold, scratch).has_value() ? 1 : 0;
}

// Votes for group g, then the update of its `label` unit. The unit's own
// WTA result doubles as its pre-update inference.
void group_supervise(Network& net, const SpikeVector& x, std::size_t g, std::size_t label,
                     std::span<std::uint8_t> votes, std::span<Potential> scratch) {
  const auto labels = net.shape().label_count;
  const auto& params = net.params();
  std::optional<std::size_t> learner_cid;
  for (std::size_t l = 0; l < labels; ++l) {
    auto cid = winner(x, net.unit(g, l), params.threshold, scratch);
    votes[g * labels + l] = cid.has_value() ? 1 : 0;
    if (l == label) learner_cid = cid;
  }
  SpikeVector z(net.shape().segments);
  if (learner_cid) z.set(*learner_cid, true);
  sdp_update(net.unit(g, label), x, z, params);
}

}  // namespace

std::optional<std::size_t> winner(const SpikeVector& x, const WeightMatrix& w, Potential threshold,
                                  std::span<Potential> scratch) {
  const auto q = w.cols();
  for (std::size_t j = 0; j < q; ++j) scratch[j] = 0;
  for (auto i : x.active()) {
    auto r = w.row(i);
    for (std::size_t j = 0; j < q; ++j) scratch[j] += r[j];
  }
  std::optional<std::size_t> best;
  Potential best_v = 0;
  for (std::size_t j = 0; j < q; ++j) {
    if (scratch[j] >= threshold && scratch[j] > best_v) {
      best_v = scratch[j];
      best = j;
    }
  }
  return best;
}

void votes_serial(const Network& net, std::span<const SpikeVector> contexts, std::span<std::uint8_t> votes) {
  check_contexts(net, contexts, votes);
  std::vector<Potential> scratch(net.shape().segments);
  for (std::size_t g = 0; g < contexts.size(); ++g) group_votes(net, contexts[g], g, votes, scratch);
}

void votes_parallel(const Network& net, std::span<const SpikeVector> contexts, std::span<std::uint8_t> votes) {
  check_contexts(net, contexts, votes);
  const auto groups = static_cast<long>(contexts.size());
#pragma omp parallel
  {
    std::vector<Potential> scratch(net.shape().segments);
#pragma omp for schedule(static)
    for (long g = 0; g < groups; ++g)
      group_votes(net, contexts[static_cast<std::size_t>(g)], static_cast<std::size_t>(g), votes, scratch);
  }
}

void supervise_serial(Network& net, std::span<const SpikeVector> contexts, std::size_t label,
                      std::span<std::uint8_t> votes) {
  check_contexts(net, contexts, votes);
  if (label >= net.shape().label_count) throw DomainError("label out of range");
  std::vector<Potential> scratch(net.shape().segments);
  for (std::size_t g = 0; g < contexts.size(); ++g) group_supervise(net, contexts[g], g, label, votes, scratch);
}

void supervise_parallel(Network& net, std::span<const SpikeVector> contexts, std::size_t label,
                        std::span<std::uint8_t> votes) {
  check_contexts(net, contexts, votes);
  if (label >= net.shape().label_count) throw DomainError("label out of range");
  const auto groups = static_cast<long>(contexts.size());
#pragma omp parallel
  {
    std::vector<Potential> scratch(net.shape().segments);
#pragma omp for schedule(static)
    for (long g = 0; g < groups; ++g)
      group_supervise(net, contexts[static_cast<std::size_t>(g)], static_cast<std::size_t>(g), label, votes,
                      scratch);
  }
}

std::vector<std::uint32_t> tally(std::span<const std::uint8_t> votes, std::size_t label_count) {
  std::vector<std::uint32_t> counts(label_count, 0);
  for (std::size_t u = 0; u < votes.size(); ++u) counts[u % label_count] += votes[u];
  return counts;
}

void assign_nearest_serial(std::span<const SpikeVector> patterns, std::span<const Centroid> centroids,
                           std::span<std::size_t> out) {
  if (out.size() != patterns.size()) throw DimensionError("assignment buffer size mismatch");
  for (std::size_t n = 0; n < patterns.size(); ++n) out[n] = nearest_centroid(patterns[n], centroids);
}

void assign_nearest_parallel(std::span<const SpikeVector> patterns, std::span<const Centroid> centroids,
                             std::span<std::size_t> out) {
  if (out.size() != patterns.size()) throw DimensionError("assignment buffer size mismatch");
  // Exceptions cannot leave the parallel region; validate up front.
  if (centroids.empty()) throw DomainError("nearest_centroid over an empty centroid list");
  for (const auto& c : centroids)
    if (c.size() != centroids.front().size()) throw DimensionError("centroid lengths differ");
  for (const auto& x : patterns)
    if (x.size() != centroids.front().size()) throw DimensionError("pattern length does not match centroids");
  const auto n = static_cast<long>(patterns.size());
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = nearest_centroid(patterns[static_cast<std::size_t>(i)], centroids);
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace dendra::kernels
