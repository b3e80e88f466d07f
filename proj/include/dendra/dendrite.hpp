#ifndef DENDRA_DENDRITE_HPP
#define DENDRA_DENDRITE_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dendra/spike_vector.hpp"
#include "dendra/types.hpp"
#include "dendra/weight_matrix.hpp"

namespace dendra {

/// Exact non-negative rational, compared by cross-multiplication.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  /// Accepts "a/b" or a plain integer. Throws DomainError.
  static Fraction parse(const std::string& text);

  /// num * scale / den; throws DomainError unless the product is an integer.
  Weight scaled(Weight scale) const;

  friend std::strong_ordering operator<=>(const Fraction& a, const Fraction& b) {
    return a.num * b.den <=> b.num * a.den;
  }
  friend bool operator==(const Fraction& a, const Fraction& b) { return a.num * b.den == b.num * a.den; }
};

/**
 * Learning and firing parameters shared by every segment of a dendrite.
 *
 * All quantities are scaled integers: a real value v is stored as
 * v * scale_denominator, so capture = 1 at the default scale of 256 is 256
 * and backoff = 9/16 is 144.
 */
struct SdpParams {
  Weight capture = 0;
  Weight backoff = 0;
  Weight search = 0;
  Weight w_max = 0;
  Weight w_0 = 0;
  Potential threshold = 0;
  Weight scale_denominator = 1;

  /// Throws DomainError on negative values, w_0 >= w_max, or scale < 1.
  void validate() const;

  /// Soft-invariant warnings (e.g. search not much smaller than backoff).
  std::vector<std::string> warnings() const;

  static SdpParams from_real(Fraction capture, Fraction backoff, Fraction search, Fraction w_max,
                             Fraction w_0, Fraction threshold, Weight scale_denominator);
};

/// One-hot int output of WTA inhibition; cid is the winning position.
struct WtaOutput {
  std::vector<Potential> values;
  std::optional<std::size_t> cid;

  Potential value() const { return cid ? values[*cid] : 0; }
  bool fired() const noexcept { return cid.has_value(); }
};

/// dot(x, w_col) when it reaches theta, else 0.
Potential segment_eval(const SpikeVector& x, std::span<const Weight> w_col, Potential theta);

/// Passes only the maximum; ties go to the lowest index. All-zero in, all-zero out.
WtaOutput wta(std::span<const Potential> v);

/// Raw potentials of every segment: x · W.
std::vector<Potential> potentials(const SpikeVector& x, const WeightMatrix& w);

/// Enable-gated segment evaluation followed by WTA.
WtaOutput dendrite_infer(const SpikeVector& x, bool proximal, const WeightMatrix& w,
                         const SdpParams& params);

/// Spike at the winning position, if any.
SpikeVector binarize(const WtaOutput& z);

/**
 * SDP update, in place.
 *
 *   x=0 z=0  no change
 *   x=0 z=1  -backoff, floor 0
 *   x=1 z=0  +search, ceiling w_0 (weights already >= w_0 untouched)
 *   x=1 z=1  +capture, ceiling w_max
 *
 * The four cases are disjoint per synapse, so applying them in one sweep is
 * the same as merging the three update networks before adding.
 */
void sdp_update(WeightMatrix& w, const SpikeVector& x, const SpikeVector& z, const SdpParams& params);

/// Pure variant returning the updated copy.
WeightMatrix sdp_updated(const WeightMatrix& w, const SpikeVector& x, const SpikeVector& z,
                         const SdpParams& params);

/// overlap / (m - overlap). Two consecutive m-spike patterns on a fresh
/// dendrite with capture = 1 join the same cluster when backoff is below
/// this bound. Throws DomainError unless 0 <= overlap < m.
Fraction same_cluster_bound(int overlap, int m);

/**
 * A single active dendrite: q segments sharing one input, WTA inhibition,
 * and SDP learning. Weights start at w_0.
 *
 * Inference is const and may run concurrently; learn() must be serialized
 * per dendrite.
 */
class Dendrite {
 public:
  Dendrite(std::size_t inputs, std::size_t segments, const SdpParams& params);
  Dendrite(WeightMatrix weights, const SdpParams& params);

  WtaOutput infer(const SpikeVector& x, bool proximal = true) const;
  void learn(const SpikeVector& x, const WtaOutput& z);

  /// One online cycle: infer, binarize, then update when learning is on.
  WtaOutput step(const SpikeVector& x, bool proximal = true, bool learning = true);

  const WeightMatrix& weights() const noexcept { return weights_; }
  WeightMatrix& weights() noexcept { return weights_; }
  const SdpParams& params() const noexcept { return params_; }

 private:
  WeightMatrix weights_;
  SdpParams params_;
};

}  // namespace dendra

#endif  // DENDRA_DENDRITE_HPP
