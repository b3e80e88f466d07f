#ifndef DENDRA_CLASSIFIER_HPP
#define DENDRA_CLASSIFIER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dendra/dendrite.hpp"
#include "dendra/encoders.hpp"
#include "dendra/spike_vector.hpp"
#include "dendra/weight_matrix.hpp"

namespace dendra {

enum class Exec { serial, parallel };

struct NetworkShape {
  std::size_t rf_count = 0;     // CV groups
  std::size_t label_count = 0;  // CV units per group
  std::size_t segments = 0;     // segments per CV unit
  std::size_t inputs = 0;       // context bits per RF

  std::size_t unit_count() const { return rf_count * label_count; }
  std::size_t synapse_count() const { return unit_count() * segments * inputs; }
  friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/**
 * Clustering-voter network: one CV group per receptive field, one CV unit
 * (a label-gated dendrite with a binarized output) per label in each group.
 * Unit (g, l) lives at index g * label_count + l.
 */
class Network {
 public:
  Network(const NetworkShape& shape, const SdpParams& params);

  const NetworkShape& shape() const noexcept { return shape_; }
  const SdpParams& params() const noexcept { return params_; }

  WeightMatrix& unit(std::size_t group, std::size_t label) { return units_[group * shape_.label_count + label]; }
  const WeightMatrix& unit(std::size_t group, std::size_t label) const {
    return units_[group * shape_.label_count + label];
  }
  std::span<WeightMatrix> units() noexcept { return units_; }
  std::span<const WeightMatrix> units() const noexcept { return units_; }

  friend bool operator==(const Network& a, const Network& b) {
    return a.shape_ == b.shape_ && a.units_ == b.units_;
  }

 private:
  NetworkShape shape_;
  SdpParams params_;
  std::vector<WeightMatrix> units_;
};

/// All weights at w_0. Throws DomainError on zero sizes.
Network build_network(std::size_t rf_count, std::size_t label_count, std::size_t segments_per_unit,
                      std::size_t inputs_per_rf, const SdpParams& params);

/// A CV unit votes when its dendrite, enabled, produces any output.
bool cv_infer(const SpikeVector& context, const WeightMatrix& unit, const SdpParams& params);

struct VoteTally {
  std::vector<std::uint32_t> counts;  // per label, each in [0, rf_count]
  std::size_t winner = 0;             // argmax, ties to the lowest label
};

/// Votes of every CV unit for one input (all labels enabled), then WTA.
/// `contexts` holds one vector per CV group.
VoteTally classify(std::span<const SpikeVector> contexts, const Network& net, Exec exec = Exec::parallel);

/**
 * Online supervised step. The prediction is taken before any weight moves;
 * then, if learning, each group's unit for `true_label` (the only enabled
 * label line) runs inference and an SDP update. Returns the prediction.
 * Throws DomainError on an invalid label.
 */
VoteTally supervise(std::span<const SpikeVector> contexts, std::size_t true_label, Network& net, bool learning,
                    Exec exec = Exec::parallel);

/// Manifest (shape, params) plus one binary weight dump per unit in a
/// single container file. See README for the layout.
void save_network(const std::string& dir, const Network& net);
Network load_network(const std::string& dir);

}  // namespace dendra

#endif  // DENDRA_CLASSIFIER_HPP
