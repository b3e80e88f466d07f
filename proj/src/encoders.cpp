#include "dendra/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dendra/errors.hpp"

namespace dendra {

void FrameParams::validate() const {
  if (precision < 1 || precision > 16) throw DomainError("precision must be in [1, 16]");
  if (before < 0 || after < 0) throw DomainError("before/after must be non-negative");
  if (stride < 1 || window < 1) throw DomainError("stride and window must be >= 1");
}

std::vector<double> downsample(std::span<const double> samples, std::size_t peak_index, const FrameParams& fp,
                               bool* padded) {
  fp.validate();
  if (samples.empty() || peak_index >= samples.size()) throw DomainError("peak index outside the waveform");
  const auto n = static_cast<long>(samples.size());
  const long peak = static_cast<long>(peak_index);
  const long half = (fp.window - 1) / 2;
  bool pad = false;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(fp.frame_length()));
  for (long k = -fp.before; k <= fp.after; ++k) {
    const long start = peak + k * fp.stride - half;
    double acc = fp.reduce == Downsample::max ? -std::numeric_limits<double>::infinity() : 0.0;
    for (long t = start; t < start + fp.window; ++t) {
      long idx = t;
      if (idx < 0 || idx >= n) {
        pad = true;
        idx = std::clamp(idx, 0L, n - 1);
      }
      double s = samples[static_cast<std::size_t>(idx)];
      acc = fp.reduce == Downsample::max ? std::max(acc, s) : acc + s;
    }
    out.push_back(fp.reduce == Downsample::max ? acc : acc / fp.window);
  }
  if (padded) *padded = pad;
  return out;
}

FramedWaveform frame_waveform(std::span<const double> samples, std::size_t peak_index, const FrameParams& fp,
                              double global_min, double global_max) {
  if (!(global_min < global_max)) throw DomainError("degenerate amplitude range");
  FramedWaveform f;
  auto values = downsample(samples, peak_index, fp, &f.padded);
  const int top = fp.levels() - 1;
  f.levels.reserve(values.size());
  for (double v : values) {
    double scaled = (v - global_min) / (global_max - global_min) * top;
    int level = static_cast<int>(std::floor(scaled + 0.5));
    f.levels.push_back(std::clamp(level, 0, top));
  }
  return f;
}

std::pair<double, double> calibrate_range(std::span<const std::vector<double>> waveforms,
                                          std::span<const std::size_t> peaks, const FrameParams& fp) {
  if (waveforms.size() != peaks.size()) throw DimensionError("one peak index per waveform required");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < waveforms.size(); ++i) {
    for (double v : downsample(waveforms[i], peaks[i], fp)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(lo < hi)) throw DomainError("calibration found a degenerate amplitude range");
  return {lo, hi};
}

std::vector<int> flip_levels(std::span<const int> levels, int precision) {
  const int top = (1 << precision) - 1;
  std::vector<int> out(levels.size());
  for (std::size_t i = 0; i < levels.size(); ++i) out[i] = top - levels[i];
  return out;
}

std::size_t PixelImage::count() const { return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), 1)); }

SpikeVector PixelImage::to_spikes() const { return SpikeVector::from_bits(bits); }

PixelImage to_pixels(std::span<const int> frame, int precision) {
  if (precision < 1 || precision > 16) throw DomainError("precision must be in [1, 16]");
  PixelImage img;
  img.rows = std::size_t{1} << precision;
  img.cols = frame.size();
  img.bits.assign(img.rows * img.cols, 0);
  for (std::size_t c = 0; c < frame.size(); ++c) {
    int v = frame[c];
    if (v < 0 || static_cast<std::size_t>(v) >= img.rows)
      throw DomainError("frame value " + std::to_string(v) + " outside [0, 2^precision - 1]");
    img.bits[static_cast<std::size_t>(v) * img.cols + c] = 1;
  }
  return img;
}

PixelImage similarity_encode(const PixelImage& img, int row_hot, int col_hot) {
  if (row_hot < 1 || col_hot < 1 || row_hot % 2 == 0 || col_hot % 2 == 0)
    throw DomainError("hotness must be odd and >= 1");
  const long dr = col_hot / 2;  // vertical reach
  const long dc = row_hot / 2;  // horizontal reach
  const long rows = static_cast<long>(img.rows);
  const long cols = static_cast<long>(img.cols);
  PixelImage out{img.rows, img.cols, std::vector<std::uint8_t>(img.bits.size(), 0)};
  for (long r = 0; r < rows; ++r) {
    for (long c = 0; c < cols; ++c) {
      if (!img.bits[static_cast<std::size_t>(r * cols + c)]) continue;
      for (long rr = std::max(0L, r - dr); rr <= std::min(rows - 1, r + dr); ++rr)
        for (long cc = std::max(0L, c - dc); cc <= std::min(cols - 1, c + dc); ++cc)
          out.bits[static_cast<std::size_t>(rr * cols + cc)] = 1;
    }
  }
  return out;
}

std::vector<int> WaveformEncoder::levels(std::span<const double> samples, std::size_t peak) const {
  return frame_waveform(samples, peak, frame, global_min, global_max).levels;
}

SpikeVector WaveformEncoder::encode_levels(std::span<const int> levels) const {
  return similarity_encode(to_pixels(levels, frame.precision), row_hot, col_hot).to_spikes();
}

BinaryImage threshold_image(std::span<const std::uint8_t> gray, std::size_t rows, std::size_t cols,
                            std::uint8_t threshold) {
  if (gray.size() != rows * cols) throw DimensionError("image size does not match its shape");
  BinaryImage img{rows, cols, std::vector<std::uint8_t>(gray.size())};
  for (std::size_t i = 0; i < gray.size(); ++i) img.bits[i] = gray[i] >= threshold ? 1 : 0;
  return img;
}

BinaryImage transpose(const BinaryImage& img) {
  BinaryImage t{img.cols, img.rows, std::vector<std::uint8_t>(img.bits.size())};
  for (std::size_t r = 0; r < img.rows; ++r)
    for (std::size_t c = 0; c < img.cols; ++c) t.bits[c * img.rows + r] = img.bits[r * img.cols + c];
  return t;
}

RfEncoding RfEncoding::checkerboard(int rf_size) {
  if (rf_size < 1) throw DomainError("rf_size must be >= 1");
  RfEncoding e;
  e.rf_size = rf_size;
  for (int r = 0; r < rf_size; r += 2)
    for (int c = 0; c < rf_size; c += 2) e.mask.emplace_back(r, c);
  return e;
}

RfEncoding RfEncoding::full(int rf_size) {
  if (rf_size < 1) throw DomainError("rf_size must be >= 1");
  RfEncoding e;
  e.rf_size = rf_size;
  for (int r = 0; r < rf_size; ++r)
    for (int c = 0; c < rf_size; ++c) e.mask.emplace_back(r, c);
  return e;
}

std::size_t RfEncoding::rf_count(std::size_t rows, std::size_t cols) const {
  auto s = static_cast<std::size_t>(rf_size);
  if (rows < s || cols < s) return 0;
  return (rows - s + 1) * (cols - s + 1);
}

std::vector<SpikeVector> rf_extract(const BinaryImage& image, const RfEncoding& enc) {
  if (image.bits.size() != image.rows * image.cols) throw DimensionError("image size does not match its shape");
  const auto s = static_cast<std::size_t>(enc.rf_size);
  if (image.rows < s || image.cols < s) throw DimensionError("image is smaller than the receptive field");
  for (auto [r, c] : enc.mask)
    if (r < 0 || c < 0 || r >= enc.rf_size || c >= enc.rf_size) throw DomainError("mask offset outside the RF");

  std::vector<SpikeVector> out;
  out.reserve(enc.rf_count(image.rows, image.cols));
  std::vector<std::uint8_t> bits(enc.bits_per_rf());
  for (std::size_t r0 = 0; r0 + s <= image.rows; ++r0) {
    for (std::size_t c0 = 0; c0 + s <= image.cols; ++c0) {
      for (std::size_t k = 0; k < enc.mask.size(); ++k) {
        auto [dr, dc] = enc.mask[k];
        std::uint8_t b = image.bits[(r0 + static_cast<std::size_t>(dr)) * image.cols + c0 + static_cast<std::size_t>(dc)];
        if (enc.two_rail) {
          bits[2 * k] = b;
          bits[2 * k + 1] = static_cast<std::uint8_t>(1 - b);
        } else {
          bits[k] = b;
        }
      }
      out.push_back(SpikeVector::from_bits(bits));
    }
  }
  return out;
}

}  // namespace dendra
