#ifndef DENDRA_HARNESS_HPP
#define DENDRA_HARNESS_HPP

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dendra/classifier.hpp"
#include "dendra/datasets.hpp"
#include "dendra/dendrite.hpp"
#include "dendra/encoders.hpp"
#include "dendra/kmeans.hpp"

namespace dendra {

enum class Mode { cluster, classify };
enum class Transform { none, flip, transpose };

/// Half-open step interval [begin, end) during which learning is on.
struct LearningInterval {
  std::size_t begin = 0;
  std::size_t end = static_cast<std::size_t>(-1);
};

/**
 * Everything one experiment needs. Parsed from a key=value file; every key
 * is also accepted as a `--set key=value` override on the command line.
 * Real-valued SDP quantities are fractions ("9/16") in unscaled weight units
 * and are scaled by `scale` when the run starts.
 */
struct ExperimentConfig {
  Mode mode = Mode::cluster;

  // datasets
  std::string waveforms;  // CSV/JSONL path; empty selects the synthetic generator
  SyntheticSpikeConfig synthetic;
  std::string images;  // IDX paths for classification
  std::string labels;
  std::string test_images;  // optional; appended to the stream and used as the tail
  std::string test_labels;
  std::size_t limit = 0;  // use only the first `limit` records (0 = all)
  std::size_t passes = 1;  // times the dataset is streamed
  std::size_t shuffle_after_first = 0;  // 1: passes after the first are seeded permutations
  std::size_t test_split = 0;  // classification: last N records form the test tail (0 = none)
  std::size_t train_passes = 1;  // classification: passes over the leading training part

  // spike-sorting encoder
  FrameParams frame;
  int row_hot = 1;
  int col_hot = 3;
  std::optional<double> global_min;  // calibrated from the data when absent
  std::optional<double> global_max;

  // image encoder
  int rf_size = 5;
  std::string rf_mask = "checkerboard";  // checkerboard | full
  bool two_rail = true;
  int bw_threshold = 128;

  // SDP
  Fraction capture{1, 1};
  Fraction backoff{9, 16};
  Fraction search{0, 1};
  Fraction w_max{12, 1};
  Fraction w_0{8, 1};
  Fraction threshold{128, 1};
  Weight scale = 256;

  std::size_t segments = 6;
  std::size_t label_count = 10;

  // reporting
  std::size_t block_size = 1000;
  std::size_t tail = 0;          // error over the final `tail` inputs (0: test_split or none)
  std::size_t record_every = 1;  // clustering: wt_convergence sampling period

  Transform transform = Transform::none;
  std::size_t transform_step = 0;
  std::vector<LearningInterval> learning = {LearningInterval{}};

  std::uint64_t seed = 1;
  std::size_t kmeans_seeds = 64;
  bool parallel = true;

  /// Starting values for a mode. Classification uses 16 segments per unit
  /// and a threshold scaled down to the 9-spike receptive-field contexts.
  static ExperimentConfig defaults(Mode mode);

  SdpParams sdp() const;
  RfEncoding rf_encoding() const;
  bool learning_on(std::size_t step) const;
  void validate() const;
};

/// Applies one key=value pair. Throws ConfigError on unknown keys or bad values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void apply_override(ExperimentConfig& cfg, const std::string& assignment);
/// '#' starts a comment; blank lines are ignored. Errors carry the line number.
/// Values not in the file come from defaults() for the file's mode line, or
/// for `fallback` when there is none.
ExperimentConfig parse_config(std::istream& in, Mode fallback = Mode::cluster);
ExperimentConfig load_config(const std::string& path, Mode fallback = Mode::cluster);
/// Canonical key=value dump; reparsing it yields the same config.
void write_config(std::ostream& out, const ExperimentConfig& cfg);

struct StepRecord {
  std::size_t step = 0;
  long cid = -1;
  int label = -1;
  double wt_convergence = 0.0;
};

struct BlockRecord {
  std::size_t block = 0;
  std::size_t first_step = 0;
  std::size_t inputs = 0;
  std::size_t errors = 0;
  double error_rate = 0.0;
};

struct MetricsSeries {
  std::vector<StepRecord> steps;
  std::vector<BlockRecord> blocks;
};

void write_metrics_csv(std::ostream& out, const MetricsSeries& m);

struct ClusteringReport {
  MetricsSeries series;
  WeightMatrix weights;
  std::vector<SpikeVector> final_patterns;  // last pass, as presented
  std::vector<std::size_t> assignments;     // frozen-weight inference over final_patterns
  std::vector<Centroid> centroids;
  std::size_t unfired = 0;  // final-pass patterns with no winner, assigned by nearest centroid
  double avg_dist = 0.0;
  double wt_convergence = 0.0;
  std::size_t num_weights = 0;
  std::size_t frame_size = 0;
};

struct ClassificationReport {
  MetricsSeries series;
  Network network;
  std::size_t inputs = 0;
  std::size_t errors = 0;
  std::size_t tail_inputs = 0;
  std::size_t tail_errors = 0;
  double tail_error = 0.0;
  double mean_labels_voted = 0.0;  // per group per input
  std::size_t synapses = 0;
  std::vector<VoteTally> tail_tallies;  // first few tail inputs, for inspection
};

/// Encoded spike-sorting patterns (first pass, no transform) for k-means.
struct EncodedWaveforms {
  std::vector<SpikeVector> patterns;
  std::vector<std::vector<int>> levels;
  std::vector<int> labels;
  WaveformEncoder encoder;
};
EncodedWaveforms encode_waveforms(const ExperimentConfig& cfg);

ClusteringReport run_clustering(const ExperimentConfig& cfg);
ClassificationReport run_classification(const ExperimentConfig& cfg);

/// k-means over the same encodings the dendrite sees, seeds 1..kmeans_seeds.
MultiSeedResult run_kmeans(const ExperimentConfig& cfg);

/// Identity before `trigger`; afterwards the amplitude flip.
/// Throws ConfigError for a transpose request.
std::vector<int> apply_adaptivity(Transform t, std::size_t trigger, std::size_t step, std::vector<int> levels,
                                  int precision);
/// Identity before `trigger`; afterwards the transpose.
/// Throws ConfigError for a flip request.
BinaryImage apply_adaptivity(Transform t, std::size_t trigger, std::size_t step, BinaryImage image);

/// Grid axes: key -> values (as they would appear in a config file).
using SweepGrid = std::vector<std::pair<std::string, std::vector<std::string>>>;

struct SweepRow {
  std::size_t index = 0;  // position in the grid enumeration
  std::vector<std::pair<std::string, std::string>> point;
  double primary = 0.0;  // avg_dist (cluster) or tail error (classify)
  double secondary = 0.0;  // wt_convergence (cluster) or overall error (classify)
  std::string error;       // non-empty when the run failed
};

/// One run per grid point (in parallel), sorted by primary metric; failed
/// points sort last. Failures become rows, never exceptions.
std::vector<SweepRow> sweep(const ExperimentConfig& base, const SweepGrid& grid);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
/// Parses "key=v1,v2,v3".
std::pair<std::string, std::vector<std::string>> parse_grid_axis(const std::string& text);

}  // namespace dendra

#endif  // DENDRA_HARNESS_HPP
