#include "dendra/harness.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "dendra/errors.hpp"
#include "dendra/numeric.hpp"

namespace dendra {

// ---------------------------------------------------------------------------
// Configuration

namespace {

constexpr std::size_t kForever = static_cast<std::size_t>(-1);

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    long long n = std::stoll(v, &pos);
    if (pos != v.size() || n < 0) throw std::invalid_argument(v);
    return static_cast<std::size_t>(n);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    int n = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return n;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

Fraction to_fraction(const std::string& key, const std::string& v) {
  try {
    return Fraction::parse(v);
  } catch (const DomainError& e) {
    throw ConfigError(key + ": " + e.what());
  }
}

std::vector<LearningInterval> parse_schedule(const std::string& v) {
  if (v == "on" || v == "1" || v == "true") return {LearningInterval{}};
  if (v == "off" || v == "0" || v == "false") return {};
  std::vector<LearningInterval> out;
  std::stringstream ss(v);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    auto dash = part.find('-');
    if (dash == std::string::npos)
      throw ConfigError("learning: intervals look like 'a-b' or 'a-', got '" + part + "'");
    LearningInterval iv;
    iv.begin = to_size("learning", trim(part.substr(0, dash)));
    auto end = trim(part.substr(dash + 1));
    if (!end.empty()) iv.end = to_size("learning", end);
    if (iv.end < iv.begin) throw ConfigError("learning: interval ends before it begins");
    out.push_back(iv);
  }
  return out;
}

std::string schedule_string(const std::vector<LearningInterval>& s) {
  if (s.empty()) return "off";
  if (s.size() == 1 && s[0].begin == 0 && s[0].end == kForever) return "on";
  std::string out;
  for (const auto& iv : s) {
    if (!out.empty()) out += ',';
    out += std::to_string(iv.begin) + "-";
    if (iv.end != kForever) out += std::to_string(iv.end);
  }
  return out;
}

std::string fraction_string(const Fraction& f) {
  return f.den == 1 ? std::to_string(f.num) : std::to_string(f.num) + "/" + std::to_string(f.den);
}

std::string double_string(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

const char* transform_name(Transform t) {
  switch (t) {
    case Transform::flip:
      return "flip";
    case Transform::transpose:
      return "transpose";
    default:
      return "none";
  }
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults(Mode mode) {
  ExperimentConfig c;
  c.mode = mode;
  if (mode == Mode::classify) {
    c.segments = 16;
    c.threshold = Fraction{30, 1};
  }
  return c;
}

SdpParams ExperimentConfig::sdp() const {
  try {
    return SdpParams::from_real(capture, backoff, search, w_max, w_0, threshold, scale);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("SDP parameters: ") + e.what());
  }
}

RfEncoding ExperimentConfig::rf_encoding() const {
  RfEncoding e;
  if (rf_mask == "checkerboard")
    e = RfEncoding::checkerboard(rf_size);
  else if (rf_mask == "full")
    e = RfEncoding::full(rf_size);
  else
    throw ConfigError("rf_mask: expected checkerboard or full, got '" + rf_mask + "'");
  e.two_rail = two_rail;
  return e;
}

bool ExperimentConfig::learning_on(std::size_t step) const {
  for (const auto& iv : learning)
    if (step >= iv.begin && step < iv.end) return true;
  return false;
}

void ExperimentConfig::validate() const {
  try {
    frame.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (row_hot < 1 || col_hot < 1 || row_hot % 2 == 0 || col_hot % 2 == 0)
    throw ConfigError("row_hot and col_hot must be odd and >= 1");
  (void)sdp();
  if (rf_size < 1) throw ConfigError("rf_size must be >= 1");
  (void)rf_encoding();
  if (segments == 0 || label_count == 0) throw ConfigError("segments and label_count must be >= 1");
  if (block_size == 0) throw ConfigError("block_size must be >= 1");
  if (passes == 0 || train_passes == 0) throw ConfigError("passes must be >= 1");
  if (record_every == 0) throw ConfigError("record_every must be >= 1");
  if (bw_threshold < 0 || bw_threshold > 255) throw ConfigError("bw_threshold must be in [0, 255]");
  if (global_min && global_max && !(*global_min < *global_max))
    throw ConfigError("global_min must be below global_max");
  if (mode == Mode::cluster && transform == Transform::transpose)
    throw ConfigError("transpose applies to images; use flip for waveform clustering");
  if (mode == Mode::classify && transform == Transform::flip)
    throw ConfigError("flip applies to waveforms; use transpose for image classification");
  if (mode == Mode::classify && images.empty()) throw ConfigError("classify mode needs images= and labels=");
  if (test_images.empty() != test_labels.empty())
    throw ConfigError("test_images and test_labels go together");
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string v = trim(raw_value);
  if (key == "mode") {
    if (v == "cluster")
      c.mode = Mode::cluster;
    else if (v == "classify")
      c.mode = Mode::classify;
    else
      throw ConfigError("mode: expected cluster or classify, got '" + v + "'");
  } else if (key == "waveforms") {
    c.waveforms = v == "synthetic" ? std::string() : v;
  } else if (key == "synthetic_count") {
    c.synthetic.count = to_size(key, v);
  } else if (key == "synthetic_templates") {
    c.synthetic.templates = to_size(key, v);
  } else if (key == "synthetic_noise") {
    c.synthetic.noise = to_double(key, v);
  } else if (key == "synthetic_jitter") {
    c.synthetic.amplitude_jitter = to_double(key, v);
  } else if (key == "synthetic_regime") {
    c.synthetic.regime_mean = to_double(key, v);
  } else if (key == "synthetic_background") {
    c.synthetic.background = to_double(key, v);
  } else if (key == "images") {
    c.images = v;
  } else if (key == "labels") {
    c.labels = v;
  } else if (key == "test_images") {
    c.test_images = v;
  } else if (key == "test_labels") {
    c.test_labels = v;
  } else if (key == "limit") {
    c.limit = to_size(key, v);
  } else if (key == "passes") {
    c.passes = to_size(key, v);
  } else if (key == "shuffle") {
    c.shuffle_after_first = to_bool(key, v) ? 1 : 0;
  } else if (key == "test_split") {
    c.test_split = to_size(key, v);
  } else if (key == "train_passes") {
    c.train_passes = to_size(key, v);
  } else if (key == "precision") {
    c.frame.precision = to_int(key, v);
  } else if (key == "before") {
    c.frame.before = to_int(key, v);
  } else if (key == "after") {
    c.frame.after = to_int(key, v);
  } else if (key == "stride") {
    c.frame.stride = to_int(key, v);
  } else if (key == "window") {
    c.frame.window = to_int(key, v);
  } else if (key == "downsample") {
    if (v == "mean")
      c.frame.reduce = Downsample::mean;
    else if (v == "max")
      c.frame.reduce = Downsample::max;
    else
      throw ConfigError("downsample: expected mean or max");
  } else if (key == "row_hot") {
    c.row_hot = to_int(key, v);
  } else if (key == "col_hot") {
    c.col_hot = to_int(key, v);
  } else if (key == "global_min") {
    c.global_min = to_double(key, v);
  } else if (key == "global_max") {
    c.global_max = to_double(key, v);
  } else if (key == "rf_size") {
    c.rf_size = to_int(key, v);
  } else if (key == "rf_mask") {
    c.rf_mask = v;
  } else if (key == "two_rail") {
    c.two_rail = to_bool(key, v);
  } else if (key == "bw_threshold") {
    c.bw_threshold = to_int(key, v);
  } else if (key == "capture") {
    c.capture = to_fraction(key, v);
  } else if (key == "capture_num") {
    c.capture.num = static_cast<std::int64_t>(to_size(key, v));
  } else if (key == "capture_den") {
    c.capture.den = static_cast<std::int64_t>(to_size(key, v));
  } else if (key == "backoff") {
    c.backoff = to_fraction(key, v);
  } else if (key == "backoff_num") {
    c.backoff.num = static_cast<std::int64_t>(to_size(key, v));
  } else if (key == "backoff_den") {
    c.backoff.den = static_cast<std::int64_t>(to_size(key, v));
  } else if (key == "search") {
    c.search = to_fraction(key, v);
  } else if (key == "search_num") {
    c.search.num = static_cast<std::int64_t>(to_size(key, v));
  } else if (key == "search_den") {
    c.search.den = static_cast<std::int64_t>(to_size(key, v));
  } else if (key == "w_max") {
    c.w_max = to_fraction(key, v);
  } else if (key == "w_0") {
    c.w_0 = to_fraction(key, v);
  } else if (key == "threshold") {
    c.threshold = to_fraction(key, v);
  } else if (key == "scale") {
    c.scale = static_cast<Weight>(to_size(key, v));
  } else if (key == "segments") {
    c.segments = to_size(key, v);
  } else if (key == "label_count") {
    c.label_count = to_size(key, v);
  } else if (key == "block_size") {
    c.block_size = to_size(key, v);
  } else if (key == "tail") {
    c.tail = to_size(key, v);
  } else if (key == "record_every") {
    c.record_every = to_size(key, v);
  } else if (key == "transform") {
    if (v == "none")
      c.transform = Transform::none;
    else if (v == "flip" || v == "flip_at")
      c.transform = Transform::flip;
    else if (v == "transpose" || v == "transpose_at")
      c.transform = Transform::transpose;
    else
      throw ConfigError("transform: expected none, flip or transpose, got '" + v + "'");
  } else if (key == "transform_step") {
    c.transform_step = to_size(key, v);
  } else if (key == "learning") {
    c.learning = parse_schedule(v);
  } else if (key == "seed") {
    c.seed = static_cast<std::uint64_t>(to_size(key, v));
    c.synthetic.seed = c.seed;
  } else if (key == "kmeans_seeds") {
    c.kmeans_seeds = to_size(key, v);
  } else if (key == "parallel") {
    c.parallel = to_bool(key, v);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
  apply_setting(cfg, assignment.substr(0, eq), assignment.substr(eq + 1));
}

ExperimentConfig parse_config(std::istream& in, Mode fallback) {
  std::vector<std::pair<std::size_t, std::string>> lines;
  std::string line;
  std::size_t line_no = 0;
  Mode mode = fallback;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
    if (trim(line.substr(0, eq)) == "mode") {
      auto v = trim(line.substr(eq + 1));
      if (v == "classify") mode = Mode::classify;
      if (v == "cluster") mode = Mode::cluster;
    }
    lines.emplace_back(line_no, line);
  }
  ExperimentConfig cfg = ExperimentConfig::defaults(mode);
  for (const auto& [n, l] : lines) {
    auto eq = l.find('=');
    try {
      apply_setting(cfg, l.substr(0, eq), l.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(n) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, Mode fallback) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in, fallback);
}

void write_config(std::ostream& out, const ExperimentConfig& c) {
  out << "mode=" << (c.mode == Mode::cluster ? "cluster" : "classify") << '\n'
      << "waveforms=" << (c.waveforms.empty() ? "synthetic" : c.waveforms) << '\n'
      << "synthetic_count=" << c.synthetic.count << '\n'
      << "synthetic_templates=" << c.synthetic.templates << '\n'
      << "synthetic_noise=" << double_string(c.synthetic.noise) << '\n'
      << "synthetic_jitter=" << double_string(c.synthetic.amplitude_jitter) << '\n'
      << "synthetic_regime=" << double_string(c.synthetic.regime_mean) << '\n'
      << "synthetic_background=" << double_string(c.synthetic.background) << '\n';
  if (!c.images.empty()) out << "images=" << c.images << '\n';
  if (!c.labels.empty()) out << "labels=" << c.labels << '\n';
  if (!c.test_images.empty()) out << "test_images=" << c.test_images << '\n';
  if (!c.test_labels.empty()) out << "test_labels=" << c.test_labels << '\n';
  out << "limit=" << c.limit << "\npasses=" << c.passes << "\nshuffle=" << c.shuffle_after_first
      << "\ntest_split=" << c.test_split << "\ntrain_passes=" << c.train_passes << "\nprecision=" << c.frame.precision
      << "\nbefore=" << c.frame.before << "\nafter=" << c.frame.after << "\nstride=" << c.frame.stride
      << "\nwindow=" << c.frame.window << "\ndownsample=" << (c.frame.reduce == Downsample::max ? "max" : "mean")
      << "\nrow_hot=" << c.row_hot << "\ncol_hot=" << c.col_hot << '\n';
  if (c.global_min) out << "global_min=" << double_string(*c.global_min) << '\n';
  if (c.global_max) out << "global_max=" << double_string(*c.global_max) << '\n';
  out << "rf_size=" << c.rf_size << "\nrf_mask=" << c.rf_mask << "\ntwo_rail=" << (c.two_rail ? 1 : 0)
      << "\nbw_threshold=" << c.bw_threshold << "\ncapture=" << fraction_string(c.capture)
      << "\nbackoff=" << fraction_string(c.backoff) << "\nsearch=" << fraction_string(c.search)
      << "\nw_max=" << fraction_string(c.w_max) << "\nw_0=" << fraction_string(c.w_0)
      << "\nthreshold=" << fraction_string(c.threshold) << "\nscale=" << c.scale << "\nsegments=" << c.segments
      << "\nlabel_count=" << c.label_count << "\nblock_size=" << c.block_size << "\ntail=" << c.tail
      << "\nrecord_every=" << c.record_every << "\ntransform=" << transform_name(c.transform)
      << "\ntransform_step=" << c.transform_step << "\nlearning=" << schedule_string(c.learning)
      << "\nseed=" << c.seed << "\nkmeans_seeds=" << c.kmeans_seeds << "\nparallel=" << (c.parallel ? 1 : 0)
      << '\n';
}

// ---------------------------------------------------------------------------
// Metrics

void write_metrics_csv(std::ostream& out, const MetricsSeries& m) {
  char buf[64];
  if (!m.steps.empty()) {
    out << "step,cid,label,wt_convergence\n";
    for (const auto& s : m.steps) {
      std::snprintf(buf, sizeof buf, "%.6f", s.wt_convergence);
      out << s.step << ',' << s.cid << ',' << s.label << ',' << buf << '\n';
    }
  }
  if (!m.blocks.empty()) {
    if (!m.steps.empty()) out << '\n';
    out << "block,first_step,inputs,errors,error_rate\n";
    for (const auto& b : m.blocks) {
      std::snprintf(buf, sizeof buf, "%.6f", b.error_rate);
      out << b.block << ',' << b.first_step << ',' << b.inputs << ',' << b.errors << ',' << buf << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// Adaptivity

std::vector<int> apply_adaptivity(Transform t, std::size_t trigger, std::size_t step, std::vector<int> levels,
                                  int precision) {
  if (t == Transform::transpose) throw ConfigError("transpose is not defined for waveform frames");
  if (t == Transform::none || step < trigger) return levels;
  return flip_levels(levels, precision);
}

BinaryImage apply_adaptivity(Transform t, std::size_t trigger, std::size_t step, BinaryImage image) {
  if (t == Transform::flip) throw ConfigError("flip is not defined for images");
  if (t == Transform::none || step < trigger) return image;
  return transpose(image);
}

// ---------------------------------------------------------------------------
// Clustering

namespace {

std::vector<WaveformRecord> load_waveforms(const ExperimentConfig& cfg) {
  auto records = cfg.waveforms.empty() ? synthetic_spikes(cfg.synthetic) : read_waveforms(cfg.waveforms);
  if (cfg.limit > 0 && records.size() > cfg.limit) records.resize(cfg.limit);
  return records;
}

WaveformEncoder make_encoder(const ExperimentConfig& cfg, const std::vector<WaveformRecord>& records) {
  WaveformEncoder enc;
  enc.frame = cfg.frame;
  enc.row_hot = cfg.row_hot;
  enc.col_hot = cfg.col_hot;
  if (cfg.global_min && cfg.global_max) {
    enc.global_min = *cfg.global_min;
    enc.global_max = *cfg.global_max;
  } else if (!records.empty()) {
    std::vector<std::vector<double>> samples;
    std::vector<std::size_t> peaks;
    samples.reserve(records.size());
    for (const auto& r : records) {
      samples.push_back(r.samples);
      peaks.push_back(r.peak);
    }
    auto [lo, hi] = calibrate_range(samples, peaks, cfg.frame);
    enc.global_min = cfg.global_min.value_or(lo);
    enc.global_max = cfg.global_max.value_or(hi);
  }
  return enc;
}

std::vector<std::size_t> stream_order(std::size_t n, std::size_t passes, bool shuffle, std::uint64_t seed) {
  std::vector<std::size_t> order;
  order.reserve(n * passes);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> idx(n);
  for (std::size_t p = 0; p < passes; ++p) {
    std::iota(idx.begin(), idx.end(), 0);
    if (shuffle && p > 0) std::shuffle(idx.begin(), idx.end(), rng);
    order.insert(order.end(), idx.begin(), idx.end());
  }
  return order;
}

}  // namespace

EncodedWaveforms encode_waveforms(const ExperimentConfig& cfg) {
  cfg.validate();
  auto records = load_waveforms(cfg);
  EncodedWaveforms e;
  e.encoder = make_encoder(cfg, records);
  for (const auto& r : records) {
    e.levels.push_back(e.encoder.levels(r.samples, r.peak));
    e.patterns.push_back(e.encoder.encode_levels(e.levels.back()));
    e.labels.push_back(r.label);
  }
  return e;
}

ClusteringReport run_clustering(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.mode != Mode::cluster) throw ConfigError("run_clustering needs mode=cluster");
  const auto params = cfg.sdp();
  auto records = load_waveforms(cfg);
  const auto enc = make_encoder(cfg, records);

  ClusteringReport rep;
  rep.frame_size = cfg.frame.frame_size();
  rep.num_weights = rep.frame_size * cfg.segments;
  Dendrite dendrite(rep.frame_size, cfg.segments, params);

  // Frames are encoded once; the stream only indexes into them.
  std::vector<std::vector<int>> levels;
  levels.reserve(records.size());
  for (const auto& r : records) levels.push_back(enc.levels(r.samples, r.peak));

  const auto order = stream_order(records.size(), cfg.passes, cfg.shuffle_after_first != 0, cfg.seed);
  const std::size_t final_pass_begin = order.size() - records.size();
  for (std::size_t step = 0; step < order.size(); ++step) {
    const auto i = order[step];
    auto lv = apply_adaptivity(cfg.transform, cfg.transform_step, step, levels[i], cfg.frame.precision);
    auto x = enc.encode_levels(lv);
    auto z = dendrite.step(x, true, cfg.learning_on(step));
    if (step % cfg.record_every == 0 || step + 1 == order.size()) {
      StepRecord s;
      s.step = step;
      s.cid = z.cid ? static_cast<long>(*z.cid) : -1;
      s.label = records[i].label;
      s.wt_convergence = wt_convergence(dendrite.weights(), params.w_max);
      rep.series.steps.push_back(s);
    }
    if (step >= final_pass_begin) rep.final_patterns.push_back(std::move(x));
  }

  rep.weights = dendrite.weights();
  rep.wt_convergence = wt_convergence(rep.weights, params.w_max);
  if (rep.final_patterns.empty()) return rep;

  // Frozen-weight inference, then arithmetic-mean centroids of the result.
  const std::size_t k = cfg.segments;
  rep.assignments.assign(rep.final_patterns.size(), kUnassigned);
  bool any_fired = false;
  for (std::size_t n = 0; n < rep.final_patterns.size(); ++n) {
    auto z = dendrite.infer(rep.final_patterns[n]);
    if (z.cid) {
      rep.assignments[n] = *z.cid;
      any_fired = true;
    }
  }
  if (!any_fired) {
    std::fill(rep.assignments.begin(), rep.assignments.end(), 0);
    rep.unfired = rep.final_patterns.size();
  } else {
    auto fired_centroids = centroids_of(rep.final_patterns, rep.assignments, k);
    std::vector<std::size_t> members(k, 0);
    for (auto a : rep.assignments)
      if (a != kUnassigned) ++members[a];
    std::vector<Centroid> live;
    std::vector<std::size_t> live_index;
    for (std::size_t j = 0; j < k; ++j)
      if (members[j] > 0) {
        live.push_back(fired_centroids[j]);
        live_index.push_back(j);
      }
    for (std::size_t n = 0; n < rep.final_patterns.size(); ++n) {
      if (rep.assignments[n] != kUnassigned) continue;
      rep.assignments[n] = live_index[nearest_centroid(rep.final_patterns[n], live)];
      ++rep.unfired;
    }
  }
  rep.centroids = centroids_of(rep.final_patterns, rep.assignments, k);
  rep.avg_dist = avg_dist(rep.final_patterns, rep.assignments, rep.centroids);
  return rep;
}

MultiSeedResult run_kmeans(const ExperimentConfig& cfg) {
  auto enc = encode_waveforms(cfg);
  if (cfg.kmeans_seeds == 0) throw ConfigError("kmeans_seeds must be >= 1");
  std::vector<std::uint64_t> seeds(cfg.kmeans_seeds);
  std::iota(seeds.begin(), seeds.end(), std::uint64_t{1});
  KmeansOptions opt;
  opt.parallel = cfg.parallel;
  return kmeans_multi_seed(enc.patterns, cfg.segments, seeds, opt);
}

// ---------------------------------------------------------------------------
// Classification

namespace {

struct LabeledImages {
  IdxImages images;
  std::vector<std::uint8_t> labels;
  std::size_t test_count = 0;
};

LabeledImages load_images(const ExperimentConfig& cfg) {
  LabeledImages d;
  d.images = read_idx_images(cfg.images);
  d.labels = read_idx_labels(cfg.labels);
  if (d.labels.size() != d.images.count)
    throw InputError("label/image count mismatch: " + std::to_string(d.labels.size()) + " labels, " +
                     std::to_string(d.images.count) + " images");
  if (cfg.limit > 0 && d.images.count > cfg.limit) {
    d.images.count = cfg.limit;
    d.images.pixels.resize(cfg.limit * d.images.rows * d.images.cols);
    d.labels.resize(cfg.limit);
  }
  if (!cfg.test_images.empty()) {
    auto ti = read_idx_images(cfg.test_images);
    auto tl = read_idx_labels(cfg.test_labels);
    if (tl.size() != ti.count) throw InputError("label/image count mismatch in the test files");
    if (ti.rows != d.images.rows || ti.cols != d.images.cols) throw InputError("test images have a different shape");
    d.images.pixels.insert(d.images.pixels.end(), ti.pixels.begin(), ti.pixels.end());
    d.images.count += ti.count;
    d.labels.insert(d.labels.end(), tl.begin(), tl.end());
    d.test_count = ti.count;
  } else {
    d.test_count = std::min(cfg.test_split, d.images.count);
  }
  for (auto l : d.labels)
    if (l >= cfg.label_count)
      throw InputError("label " + std::to_string(l) + " exceeds label_count " + std::to_string(cfg.label_count));
  return d;
}

// Training part `train_passes` times (first traversal in file order, later
// ones permuted when shuffling), then the test part in order; all of that
// `passes` times.
std::vector<std::size_t> classification_order(const ExperimentConfig& cfg, std::size_t n, std::size_t test_n) {
  const std::size_t train_n = n - test_n;
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order;
  std::vector<std::size_t> idx(train_n);
  bool first = true;
  for (std::size_t p = 0; p < cfg.passes; ++p) {
    for (std::size_t t = 0; t < cfg.train_passes; ++t) {
      std::iota(idx.begin(), idx.end(), 0);
      if (cfg.shuffle_after_first && !first) std::shuffle(idx.begin(), idx.end(), rng);
      first = false;
      order.insert(order.end(), idx.begin(), idx.end());
    }
    for (std::size_t i = train_n; i < n; ++i) order.push_back(i);
  }
  return order;
}

}  // namespace

ClassificationReport run_classification(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.mode != Mode::classify) throw ConfigError("run_classification needs mode=classify");
  const auto params = cfg.sdp();
  const auto enc = cfg.rf_encoding();
  auto data = load_images(cfg);
  const auto rows = data.images.rows;
  const auto cols = data.images.cols;
  const auto rf_count = enc.rf_count(rows, cols);
  if (rf_count == 0) throw ConfigError("images are smaller than the receptive field");
  if (cfg.transform == Transform::transpose && rows != cols)
    throw ConfigError("transpose needs square images");

  ClassificationReport rep{
      .series = {},
      .network = build_network(rf_count, cfg.label_count, cfg.segments, enc.bits_per_rf(), params),
      .tail_tallies = {}};
  rep.synapses = rep.network.shape().synapse_count();
  const Exec exec = cfg.parallel ? Exec::parallel : Exec::serial;

  const auto order = classification_order(cfg, data.images.count, data.test_count);
  const std::size_t tail = cfg.tail > 0 ? std::min(cfg.tail, order.size()) : data.test_count;
  const std::size_t tail_begin = order.size() - tail;
  std::uint64_t votes_in_window = 0;
  std::size_t inputs_in_window = 0;

  BlockRecord block;
  for (std::size_t step = 0; step < order.size(); ++step) {
    const auto i = order[step];
    auto img = threshold_image({data.images.image(i), rows * cols}, rows, cols,
                               static_cast<std::uint8_t>(cfg.bw_threshold));
    img = apply_adaptivity(cfg.transform, cfg.transform_step, step, std::move(img));
    auto contexts = rf_extract(img, enc);
    const std::size_t label = data.labels[i];
    auto t = supervise(contexts, label, rep.network, cfg.learning_on(step), exec);
    const bool wrong = t.winner != label;

    if (block.inputs == 0) block.first_step = step;
    ++block.inputs;
    block.errors += wrong ? 1 : 0;
    if (block.inputs == cfg.block_size || step + 1 == order.size()) {
      block.error_rate = static_cast<double>(block.errors) / static_cast<double>(block.inputs);
      rep.series.blocks.push_back(block);
      block = BlockRecord{rep.series.blocks.size()};
    }

    ++rep.inputs;
    rep.errors += wrong ? 1 : 0;
    const bool in_window = tail > 0 ? step >= tail_begin : true;
    if (in_window) {
      for (auto c : t.counts) votes_in_window += c;
      ++inputs_in_window;
    }
    if (tail > 0 && step >= tail_begin) {
      ++rep.tail_inputs;
      rep.tail_errors += wrong ? 1 : 0;
      if (rep.tail_tallies.size() < 20) rep.tail_tallies.push_back(std::move(t));
    }
  }
  rep.tail_error = rep.tail_inputs ? static_cast<double>(rep.tail_errors) / static_cast<double>(rep.tail_inputs) : 0.0;
  if (inputs_in_window > 0)
    rep.mean_labels_voted = static_cast<double>(votes_in_window) /
                            (static_cast<double>(inputs_in_window) * static_cast<double>(rf_count));
  return rep;
}

// ---------------------------------------------------------------------------
// Sweeps

std::pair<std::string, std::vector<std::string>> parse_grid_axis(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("grid axis must look like key=v1,v2");
  std::pair<std::string, std::vector<std::string>> axis{trim(text.substr(0, eq)), {}};
  std::stringstream ss(text.substr(eq + 1));
  std::string v;
  while (std::getline(ss, v, ',')) axis.second.push_back(trim(v));
  if (axis.second.empty()) throw ConfigError("grid axis '" + axis.first + "' has no values");
  return axis;
}

std::vector<SweepRow> sweep(const ExperimentConfig& base, const SweepGrid& grid) {
  std::size_t total = 1;
  for (const auto& [key, values] : grid) {
    if (values.empty()) throw ConfigError("grid axis '" + key + "' has no values");
    total *= values.size();
  }
  std::vector<SweepRow> rows(total);
  for (std::size_t n = 0; n < total; ++n) {
    rows[n].index = n;
    std::size_t rem = n;
    for (auto it = grid.rbegin(); it != grid.rend(); ++it) {
      rows[n].point.emplace(rows[n].point.begin(), it->first, it->second[rem % it->second.size()]);
      rem /= it->second.size();
    }
  }

  const auto count = static_cast<long>(total);
#pragma omp parallel for schedule(dynamic)
  for (long n = 0; n < count; ++n) {
    auto& row = rows[static_cast<std::size_t>(n)];
    try {
      ExperimentConfig cfg = base;
      cfg.parallel = false;
      for (const auto& [k, v] : row.point) apply_setting(cfg, k, v);
      if (cfg.mode == Mode::cluster) {
        cfg.record_every = std::max<std::size_t>(cfg.record_every, 1000);
        auto rep = run_clustering(cfg);
        row.primary = rep.avg_dist;
        row.secondary = rep.wt_convergence;
      } else {
        auto rep = run_classification(cfg);
        row.primary = rep.tail_inputs ? rep.tail_error
                                      : static_cast<double>(rep.errors) / static_cast<double>(std::max<std::size_t>(rep.inputs, 1));
        row.secondary = static_cast<double>(rep.errors) / static_cast<double>(std::max<std::size_t>(rep.inputs, 1));
      }
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
    if (a.error.empty() != b.error.empty()) return a.error.empty();
    if (a.primary != b.primary) return a.primary < b.primary;
    return a.index < b.index;
  });
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "index";
  if (!rows.empty())
    for (const auto& [k, v] : rows.front().point) out << ',' << k;
  out << ",primary,secondary,error\n";
  char buf[64];
  for (const auto& r : rows) {
    out << r.index;
    for (const auto& [k, v] : r.point) out << ',' << v;
    std::snprintf(buf, sizeof buf, ",%.6f,%.6f,", r.primary, r.secondary);
    out << buf;
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << err << '\n';
  }
}

}  // namespace dendra
