#ifndef DENDRA_ENCODERS_HPP
#define DENDRA_ENCODERS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "dendra/spike_vector.hpp"

namespace dendra {

enum class Downsample { mean, max };

/// Framing and downsampling of a detected spike waveform.
struct FrameParams {
  int precision = 5;  // bits of amplitude resolution
  int before = 6;     // output samples before the peak
  int after = 6;      // output samples after the peak
  int stride = 3;     // raw samples between output samples
  int window = 5;     // raw samples averaged per output sample
  Downsample reduce = Downsample::mean;

  void validate() const;
  int levels() const { return 1 << precision; }
  int frame_length() const { return before + after + 1; }
  /// 2^precision * (before + after + 1): synapses per segment.
  std::size_t frame_size() const { return static_cast<std::size_t>(levels()) * frame_length(); }
};

struct FramedWaveform {
  std::vector<int> levels;  // each in [0, 2^precision - 1]
  bool padded = false;      // the frame ran past the signal and was edge-replicated
};

/**
 * Block-downsamples `before + after + 1` windows centred at
 * peak + k * stride (k = -before..after), then linearly rescales the window
 * means from [global_min, global_max] onto [0, 2^precision - 1], rounding
 * half-up and clamping.
 *
 * Throws DomainError if the peak is outside the signal or
 * global_min >= global_max.
 */
FramedWaveform frame_waveform(std::span<const double> samples, std::size_t peak_index, const FrameParams& fp,
                              double global_min, double global_max);

/// Downsampled (unscaled) values; the calibration pass uses these.
std::vector<double> downsample(std::span<const double> samples, std::size_t peak_index, const FrameParams& fp,
                               bool* padded = nullptr);

/// Min and max of the downsampled values over a whole dataset, so the
/// extremes land exactly on levels 0 and 2^precision - 1.
std::pair<double, double> calibrate_range(std::span<const std::vector<double>> waveforms,
                                          std::span<const std::size_t> peaks, const FrameParams& fp);

/// Top-to-bottom amplitude flip: v -> 2^precision - 1 - v.
std::vector<int> flip_levels(std::span<const int> levels, int precision);

/// rows x cols binary grid stored row-major.
struct PixelImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;

  bool at(std::size_t r, std::size_t c) const { return bits[r * cols + c] != 0; }
  std::size_t count() const;
  /// Row-major flattening, the form a dendrite consumes.
  SpikeVector to_spikes() const;
};

/// One-hot amplitude image: column c has its pixel at row = frame[c].
/// Row 0 is amplitude 0. Throws DomainError on out-of-range values.
PixelImage to_pixels(std::span<const int> frame, int precision);

/**
 * Similarity (m-hot) coding: every set pixel is dilated to a neighbourhood
 * `col_hot` pixels tall (along its column, the amplitude axis) and
 * `row_hot` pixels wide (along its row, the time axis), clipped at the
 * image edges; the result is the union.
 *
 * In the spike-sorting configuration col_hot = 3, row_hot = 1 gives a
 * 3-hot code in the amplitude dimension. Throws DomainError unless both
 * are odd and >= 1.
 */
PixelImage similarity_encode(const PixelImage& img, int row_hot, int col_hot);

/// Full spike-sorting encoder: frame, pixels, similarity code, flatten.
struct WaveformEncoder {
  FrameParams frame;
  int row_hot = 1;
  int col_hot = 3;
  double global_min = 0.0;
  double global_max = 1.0;

  std::vector<int> levels(std::span<const double> samples, std::size_t peak) const;
  SpikeVector encode_levels(std::span<const int> levels) const;
  SpikeVector encode(std::span<const double> samples, std::size_t peak) const {
    auto l = levels(samples, peak);
    return encode_levels(l);
  }
};

/// rows x cols binary image, e.g. a thresholded MNIST digit.
struct BinaryImage {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> bits;
};

/// Grayscale -> black-and-white: pixel >= threshold is 1.
BinaryImage threshold_image(std::span<const std::uint8_t> gray, std::size_t rows, std::size_t cols,
                            std::uint8_t threshold = 128);

/// Matrix transpose of an image.
BinaryImage transpose(const BinaryImage& img);

/// Receptive-field layout and encoding.
struct RfEncoding {
  int rf_size = 5;
  std::vector<std::pair<int, int>> mask;  // (row, col) offsets inside the RF
  bool two_rail = true;

  /// The 9-point sublattice of even rows and even columns for rf_size 5;
  /// generally every (even, even) offset.
  static RfEncoding checkerboard(int rf_size = 5);
  /// Every pixel of the RF.
  static RfEncoding full(int rf_size);

  std::size_t bits_per_rf() const { return two_rail ? 2 * mask.size() : mask.size(); }
  std::size_t rf_count(std::size_t rows, std::size_t cols) const;
};

/**
 * One vector per RF position, all overlapping rf_size x rf_size windows at
 * stride 1 in row-major position order (576 for 28x28 at rf_size 5).
 * With two-rail coding each masked bit b becomes the pair [b, 1-b], so every
 * vector has exactly |mask| spikes. Throws DimensionError if the image is
 * smaller than the RF or its bit count does not match its shape.
 */
std::vector<SpikeVector> rf_extract(const BinaryImage& image, const RfEncoding& enc);

}  // namespace dendra

#endif  // DENDRA_ENCODERS_HPP
