#ifndef DENDRA_DATASETS_HPP
#define DENDRA_DATASETS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dendra {

// --- IDX (MNIST) -----------------------------------------------------------

struct IdxImages {
  std::size_t count = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major per image

  const std::uint8_t* image(std::size_t i) const { return pixels.data() + i * rows * cols; }
};

/// Reads an IDX3 ubyte file (magic 2051, big-endian dims). Gzipped files are
/// read transparently. Throws InputError.
IdxImages read_idx_images(const std::string& path);
/// Reads an IDX1 ubyte file (magic 2049). Throws InputError.
std::vector<std::uint8_t> read_idx_labels(const std::string& path);

void write_idx_images(const std::string& path, const IdxImages& images);
void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels);

// --- Spike waveforms -------------------------------------------------------

struct WaveformRecord {
  std::vector<double> samples;
  std::size_t peak = 0;
  int label = -1;  // ground truth, -1 when absent
};

/**
 * CSV: an optional header row; columns named "label" and "peak" are special
 * and everything else is a sample. Without a header every column is a
 * sample. JSON lines: {"samples": [...], "label": 3, "peak": 20}, with
 * label and peak optional. A missing peak defaults to the index of the
 * largest |sample|. The format is chosen by extension (.jsonl/.json vs
 * anything else). Throws InputError with the offending line number.
 */
std::vector<WaveformRecord> read_waveforms(const std::string& path);
std::vector<WaveformRecord> read_waveforms_csv(std::istream& in);
std::vector<WaveformRecord> read_waveforms_jsonl(std::istream& in);

void write_waveforms_csv(std::ostream& out, const std::vector<WaveformRecord>& records);

/// Index of the largest absolute sample.
std::size_t default_peak(const std::vector<double>& samples);

/**
 * Synthetic stand-in for an extracellular spike-sorting recording: k
 * neuron templates with amplitude jitter and additive noise, streamed with
 * uneven temporal mixing where one neuron or a pair of neurons dominates
 * long stretches.
 */
struct SyntheticSpikeConfig {
  std::size_t count = 10390;
  std::size_t templates = 6;
  std::size_t length = 48;
  std::size_t peak = 20;
  double noise = 0.015;            // additive Gaussian sigma, relative to unit amplitude
  double amplitude_jitter = 0.03;  // multiplicative sigma per spike
  double regime_mean = 400.0;     // mean spikes per dominance period
  double background = 0.05;       // chance a spike comes from any neuron
  std::uint64_t seed = 1;
};

std::vector<WaveformRecord> synthetic_spikes(const SyntheticSpikeConfig& cfg);

/// Noise-free template shapes, one per neuron.
std::vector<std::vector<double>> spike_templates(std::size_t templates, std::size_t length, std::size_t peak);

}  // namespace dendra

#endif  // DENDRA_DATASETS_HPP
