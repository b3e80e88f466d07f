#include "dendra/numeric.hpp"

#include <cmath>
#include <string>

#include "dendra/errors.hpp"

namespace dendra {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw DimensionError(std::string(what) + ": length " + std::to_string(a) + " vs " + std::to_string(b));
}

}  // namespace

Potential dot(const SpikeVector& x, std::span<const Weight> w) {
  require_same(x.size(), w.size(), "dot");
  Potential sum = 0;
  for (auto i : x.active()) sum += w[i];
  return sum;
}

double dot(const SpikeVector& x, const Centroid& c) {
  require_same(x.size(), c.size(), "dot");
  double sum = 0.0;
  for (auto i : x.active()) sum += c.values[i];
  return sum;
}

double sad(std::span<const double> a, std::span<const double> b) {
  require_same(a.size(), b.size(), "sad");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum;
}

double sad(const SpikeVector& x, const Centroid& c) {
  require_same(x.size(), c.size(), "sad");
  auto bits = x.bits();
  double sum = 0.0;
  for (std::size_t i = 0; i < bits.size(); ++i) sum += std::abs(static_cast<double>(bits[i]) - c.values[i]);
  return sum;
}

double sad(const SpikeVector& a, const SpikeVector& b) {
  require_same(a.size(), b.size(), "sad");
  return static_cast<double>(a.spike_count() + b.spike_count() - 2 * a.overlap(b));
}

Centroid centroid_of(std::span<const SpikeVector> patterns) {
  if (patterns.empty()) throw DomainError("centroid of an empty cluster");
  Centroid c{std::vector<double>(patterns.front().size(), 0.0)};
  for (const auto& x : patterns) {
    require_same(x.size(), c.size(), "centroid_of");
    for (auto i : x.active()) c.values[i] += 1.0;
  }
  for (auto& v : c.values) v /= static_cast<double>(patterns.size());
  return c;
}

Centroid centroid_of(std::span<const SpikeVector> patterns, std::span<const std::size_t> members) {
  if (members.empty()) throw DomainError("centroid of an empty cluster");
  Centroid c{std::vector<double>(patterns[members.front()].size(), 0.0)};
  for (auto m : members) {
    const auto& x = patterns[m];
    require_same(x.size(), c.size(), "centroid_of");
    for (auto i : x.active()) c.values[i] += 1.0;
  }
  for (auto& v : c.values) v /= static_cast<double>(members.size());
  return c;
}

std::vector<Centroid> centroids_of(std::span<const SpikeVector> patterns,
                                   std::span<const std::size_t> assignments, std::size_t k) {
  require_same(patterns.size(), assignments.size(), "centroids_of");
  std::size_t p = patterns.empty() ? 0 : patterns.front().size();
  std::vector<Centroid> cs(k, Centroid{std::vector<double>(p, 0.0)});
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t n = 0; n < patterns.size(); ++n) {
    auto a = assignments[n];
    if (a == kUnassigned) continue;
    if (a >= k) throw DomainError("cluster index out of range");
    require_same(patterns[n].size(), p, "centroids_of");
    for (auto i : patterns[n].active()) cs[a].values[i] += 1.0;
    ++counts[a];
  }
  for (std::size_t j = 0; j < k; ++j)
    if (counts[j] > 0)
      for (auto& v : cs[j].values) v /= static_cast<double>(counts[j]);
  return cs;
}

std::size_t nearest_centroid(const SpikeVector& x, std::span<const Centroid> centroids) {
  if (centroids.empty()) throw DomainError("nearest_centroid over an empty centroid list");
  std::size_t best = 0;
  double best_d = sad(x, centroids[0]);
  for (std::size_t j = 1; j < centroids.size(); ++j) {
    double d = sad(x, centroids[j]);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

double avg_dist(std::span<const SpikeVector> patterns, std::span<const std::size_t> assignments,
                std::span<const Centroid> centroids) {
  require_same(patterns.size(), assignments.size(), "avg_dist");
  if (patterns.empty()) return 0.0;
  double total = 0.0;
  for (std::size_t n = 0; n < patterns.size(); ++n) {
    auto a = assignments[n];
    if (a == kUnassigned) throw DomainError("avg_dist: pattern " + std::to_string(n) + " is unassigned");
    if (a >= centroids.size()) throw DomainError("avg_dist: cluster index out of range");
    total += sad(patterns[n], centroids[a]);
  }
  return total / static_cast<double>(patterns.size());
}

double wt_convergence(const WeightMatrix& w, Weight w_max) {
  if (w_max <= 0) throw DomainError("w_max must be positive");
  if (w.size() == 0) return 0.0;
  // Integer accumulation is exact: 3072^2 * 10^7 still fits in 64 bits.
  std::int64_t acc = 0;
  for (Weight v : w.data()) {
    if (v < 0 || v > w_max) throw DomainError("weight outside [0, w_max]");
    acc += static_cast<std::int64_t>(v) * (w_max - v);
  }
  double scale = static_cast<double>(w.scale());
  return static_cast<double>(acc) / (static_cast<double>(w_max) * static_cast<double>(w.size()) * scale);
}

}  // namespace dendra
