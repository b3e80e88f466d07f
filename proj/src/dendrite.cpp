#include "dendra/dendrite.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>

#include "dendra/errors.hpp"
#include "dendra/numeric.hpp"

namespace dendra {

Fraction Fraction::parse(const std::string& text) {
  auto parse_int = [&](std::string_view s) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw DomainError("bad fraction: '" + text + "'");
    return v;
  };
  std::string_view sv(text);
  while (!sv.empty() && sv.front() == ' ') sv.remove_prefix(1);
  while (!sv.empty() && sv.back() == ' ') sv.remove_suffix(1);
  Fraction f;
  auto slash = sv.find('/');
  if (slash == std::string_view::npos) {
    f.num = parse_int(sv);
  } else {
    f.num = parse_int(sv.substr(0, slash));
    f.den = parse_int(sv.substr(slash + 1));
  }
  if (f.den <= 0 || f.num < 0) throw DomainError("fraction must be non-negative with positive denominator: " + text);
  return f;
}

Weight Fraction::scaled(Weight scale) const {
  std::int64_t p = num * scale;
  if (p % den != 0)
    throw DomainError(std::to_string(num) + "/" + std::to_string(den) + " is not representable at scale " +
                      std::to_string(scale));
  return static_cast<Weight>(p / den);
}

void SdpParams::validate() const {
  if (scale_denominator < 1) throw DomainError("scale_denominator must be >= 1");
  if (capture < 0 || backoff < 0 || search < 0 || w_max < 0 || w_0 < 0 || threshold < 0)
    throw DomainError("SDP parameters must be non-negative");
  if (w_0 >= w_max) throw DomainError("w_0 must be below w_max");
}

std::vector<std::string> SdpParams::warnings() const {
  std::vector<std::string> w;
  if (search > 0 && backoff > 0 && search * 4 > backoff)
    w.emplace_back("search is not much smaller than backoff; clusters may not hold");
  if (capture == 0) w.emplace_back("capture is 0; no cluster can form");
  return w;
}

SdpParams SdpParams::from_real(Fraction capture, Fraction backoff, Fraction search, Fraction w_max,
                               Fraction w_0, Fraction threshold, Weight scale_denominator) {
  SdpParams p;
  p.scale_denominator = scale_denominator;
  p.capture = capture.scaled(scale_denominator);
  p.backoff = backoff.scaled(scale_denominator);
  p.search = search.scaled(scale_denominator);
  p.w_max = w_max.scaled(scale_denominator);
  p.w_0 = w_0.scaled(scale_denominator);
  p.threshold = threshold.scaled(scale_denominator);
  p.validate();
  return p;
}

Potential segment_eval(const SpikeVector& x, std::span<const Weight> w_col, Potential theta) {
  Potential v = dot(x, w_col);
  return v >= theta ? v : 0;
}

WtaOutput wta(std::span<const Potential> v) {
  WtaOutput out{std::vector<Potential>(v.size(), 0), std::nullopt};
  Potential best = 0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] > best) {
      best = v[j];
      out.cid = j;
    }
  }
  if (out.cid) out.values[*out.cid] = best;
  return out;
}

std::vector<Potential> potentials(const SpikeVector& x, const WeightMatrix& w) {
  if (x.size() != w.rows())
    throw DimensionError("input length " + std::to_string(x.size()) + " vs " + std::to_string(w.rows()) +
                         " weight rows");
  std::vector<Potential> acc(w.cols(), 0);
  for (auto i : x.active()) {
    auto r = w.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) acc[j] += r[j];
  }
  return acc;
}

WtaOutput dendrite_infer(const SpikeVector& x, bool proximal, const WeightMatrix& w, const SdpParams& params) {
  if (x.size() != w.rows()) throw DimensionError("dendrite input length does not match weight rows");
  if (!proximal) return WtaOutput{std::vector<Potential>(w.cols(), 0), std::nullopt};
  auto v = potentials(x, w);
  for (auto& p : v)
    if (p < params.threshold) p = 0;
  return wta(v);
}

SpikeVector binarize(const WtaOutput& z) {
  SpikeVector s(z.values.size());
  if (z.cid) s.set(*z.cid, true);
  return s;
}

void sdp_update(WeightMatrix& w, const SpikeVector& x, const SpikeVector& z, const SdpParams& params) {
  if (x.size() != w.rows() || z.size() != w.cols()) throw DimensionError("sdp_update shape mismatch");
  const auto winners = z.active();
  if (winners.size() > 1) throw DomainError("sdp_update: z must be at most one-hot");
  const auto zbits = z.bits();
  const auto xbits = x.bits();
  for (std::size_t i = 0; i < w.rows(); ++i) {
    auto r = w.row(i);
    if (xbits[i]) {
      if (params.search > 0) {
        for (std::size_t j = 0; j < r.size(); ++j) {
          if (zbits[j]) continue;
          if (r[j] < params.w_0) r[j] = std::min(r[j] + params.search, params.w_0);
        }
      }
      for (auto j : winners) r[j] = std::min(r[j] + params.capture, params.w_max);
    } else {
      for (auto j : winners) r[j] = std::max(r[j] - params.backoff, Weight{0});
    }
  }
}

WeightMatrix sdp_updated(const WeightMatrix& w, const SpikeVector& x, const SpikeVector& z,
                         const SdpParams& params) {
  WeightMatrix out = w;
  sdp_update(out, x, z, params);
  return out;
}

Fraction same_cluster_bound(int overlap, int m) {
  if (overlap < 0 || overlap >= m) throw DomainError("same_cluster_bound requires 0 <= overlap < m");
  return Fraction{overlap, m - overlap};
}

Dendrite::Dendrite(std::size_t inputs, std::size_t segments, const SdpParams& params)
    : weights_(inputs, segments, params.w_0, params.scale_denominator), params_(params) {
  params_.validate();
}

Dendrite::Dendrite(WeightMatrix weights, const SdpParams& params) : weights_(std::move(weights)), params_(params) {
  params_.validate();
  if (weights_.scale() != params_.scale_denominator)
    throw DomainError("weight matrix scale does not match SDP parameters");
}

WtaOutput Dendrite::infer(const SpikeVector& x, bool proximal) const {
  return dendrite_infer(x, proximal, weights_, params_);
}

void Dendrite::learn(const SpikeVector& x, const WtaOutput& z) { sdp_update(weights_, x, binarize(z), params_); }

WtaOutput Dendrite::step(const SpikeVector& x, bool proximal, bool learning) {
  auto z = infer(x, proximal);
  if (learning) learn(x, z);
  return z;
}

}  // namespace dendra
