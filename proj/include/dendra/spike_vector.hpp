#ifndef DENDRA_SPIKE_VECTOR_HPP
#define DENDRA_SPIKE_VECTOR_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace dendra {

/**
 * Binary row vector modelling one spike volley.
 *
 * Both the dense bits and the sorted list of spiking positions are kept.
 * Inner loops walk the sparse list, so a dot product costs O(spike_count)
 * rather than O(size).
 */
class SpikeVector {
 public:
  SpikeVector() = default;

  /// All-zero vector of the given length.
  explicit SpikeVector(std::size_t length);

  /// Throws DomainError if any element is not 0 or 1.
  static SpikeVector from_bits(std::span<const std::uint8_t> bits);

  /// Throws DomainError on an index >= length. Duplicates are merged.
  static SpikeVector from_indices(std::size_t length, std::span<const std::uint32_t> indices);

  /// Parses a string of '0'/'1' characters, ignoring spaces.
  static SpikeVector from_string(const std::string& text);

  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t spike_count() const noexcept { return active_.size(); }
  bool empty() const noexcept { return bits_.empty(); }

  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool value);

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::span<const std::uint32_t> active() const noexcept { return active_; }

  /// Number of positions where both vectors spike.
  std::size_t overlap(const SpikeVector& other) const;

  std::string to_string() const;

  friend bool operator==(const SpikeVector& a, const SpikeVector& b) { return a.bits_ == b.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint32_t> active_;
};

/// Concatenation, used to build distal context vectors from several parts.
SpikeVector concat(std::span<const SpikeVector> parts);

/// Per-component arithmetic mean of a cluster's members.
struct Centroid {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double sum() const;
};

/// Disjoint clusters over an indexed pattern list.
struct ClusterSet {
  std::vector<std::size_t> assignments;  // pattern index -> cluster index or kUnassigned
  std::vector<Centroid> centroids;
};

}  // namespace dendra

#endif  // DENDRA_SPIKE_VECTOR_HPP
