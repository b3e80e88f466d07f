// dendra: command-line front end for the clustering and classification
// experiments. Every verb takes --config FILE and any number of --set k=v.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include "dendra/classifier.hpp"
#include "dendra/errors.hpp"
#include "dendra/harness.hpp"
#include "dendra/kmeans.hpp"
#include "dendra/numeric.hpp"
#include "dendra/weight_matrix.hpp"

namespace fs = std::filesystem;
using namespace dendra;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> sets;
  std::string out = "out";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("-c,--config", c.config, "key=value config file")->check(CLI::ExistingFile);
  cmd->add_option("-s,--set", c.sets, "override one key (key=value), repeatable");
  cmd->add_option("-o,--out", c.out, "output directory")->capture_default_str();
}

// The verb decides the mode; sweep passes nullopt to keep the config's.
ExperimentConfig resolve(const Common& c, std::optional<Mode> mode) {
  const Mode m = mode.value_or(Mode::cluster);
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig::defaults(m) : load_config(c.config, m);
  if (mode && cfg.mode != *mode) throw ConfigError("the config file is for the other mode");
  for (const auto& s : c.sets) apply_override(cfg, s);
  return cfg;
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InputError("cannot write " + p.string());
  return f;
}

void save_config(const fs::path& dir, const ExperimentConfig& cfg) {
  auto f = open_out(dir / "config.txt");
  write_config(f, cfg);
}

int cmd_cluster(const Common& c) {
  auto cfg = resolve(c, Mode::cluster);
  auto rep = run_clustering(cfg);
  fs::create_directories(c.out);
  save_config(c.out, cfg);
  {
    auto f = open_out(fs::path(c.out) / "metrics.csv");
    write_metrics_csv(f, rep.series);
  }
  save_weights((fs::path(c.out) / "weights.bin").string(), rep.weights);
  save_weights((fs::path(c.out) / "weights.csv").string(), rep.weights);
  {
    auto f = open_out(fs::path(c.out) / "centroids.csv");
    write_centroids_csv(f, rep.centroids);
  }
  std::printf("avg_dist %.4f\nwt_convergence %.4f\nnum_weights %zu\nframe_size %zu\nunfired %zu\n", rep.avg_dist,
              rep.wt_convergence, rep.num_weights, rep.frame_size, rep.unfired);
  return 0;
}

int cmd_classify(const Common& c) {
  auto cfg = resolve(c, Mode::classify);
  auto rep = run_classification(cfg);
  fs::create_directories(c.out);
  save_config(c.out, cfg);
  {
    auto f = open_out(fs::path(c.out) / "metrics.csv");
    write_metrics_csv(f, rep.series);
  }
  save_network((fs::path(c.out) / "network").string(), rep.network);
  std::printf("inputs %zu\nerrors %zu\nerror_rate %.4f\n", rep.inputs, rep.errors,
              rep.inputs ? static_cast<double>(rep.errors) / static_cast<double>(rep.inputs) : 0.0);
  if (rep.tail_inputs) std::printf("tail_inputs %zu\ntail_error %.4f\n", rep.tail_inputs, rep.tail_error);
  std::printf("cv_units %zu\nsynapses %zu\nmean_labels_voted %.3f\n", rep.network.shape().unit_count(), rep.synapses,
              rep.mean_labels_voted);
  return 0;
}

int cmd_sweep(const Common& c, std::optional<Mode> mode, const std::vector<std::string>& axes) {
  auto cfg = resolve(c, mode);
  SweepGrid grid;
  for (const auto& a : axes) grid.push_back(parse_grid_axis(a));
  auto rows = sweep(cfg, grid);
  fs::create_directories(c.out);
  save_config(c.out, cfg);
  auto f = open_out(fs::path(c.out) / "sweep.csv");
  write_sweep_csv(f, rows);
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.error.empty() ? 0 : 1;
  if (!rows.empty() && rows.front().error.empty()) {
    std::printf("best");
    for (const auto& [k, v] : rows.front().point) std::printf(" %s=%s", k.c_str(), v.c_str());
    std::printf("  primary %.4f secondary %.4f\n", rows.front().primary, rows.front().secondary);
  }
  std::printf("points %zu failed %zu\n", rows.size(), failed);
  return 0;
}

int cmd_kmeans(const Common& c) {
  auto cfg = resolve(c, Mode::cluster);
  auto r = run_kmeans(cfg);
  fs::create_directories(c.out);
  save_config(c.out, cfg);
  {
    auto f = open_out(fs::path(c.out) / "centroids.csv");
    write_centroids_csv(f, r.best.centroids);
  }
  {
    auto f = open_out(fs::path(c.out) / "seeds.csv");
    write_seed_table_csv(f, r);
  }
  std::printf("best_seed %llu\navg_dist %.4f\nconvergence %.4f\nepochs %zu\n",
              static_cast<unsigned long long>(r.seeds[r.best_index]), r.best.avg_dist, r.best.convergence,
              r.best.epochs);
  return 0;
}

int cmd_encode(const Common& c, std::size_t count) {
  auto cfg = resolve(c, Mode::cluster);
  if (count > 0 && (cfg.limit == 0 || cfg.limit > count)) cfg.limit = count;
  auto enc = encode_waveforms(cfg);
  fs::create_directories(c.out);
  auto f = open_out(fs::path(c.out) / "encodings.csv");
  f << "index,label,levels,spikes\n";
  for (std::size_t i = 0; i < enc.patterns.size(); ++i) {
    f << i << ',' << enc.labels[i] << ',';
    for (std::size_t j = 0; j < enc.levels[i].size(); ++j) f << (j ? " " : "") << enc.levels[i][j];
    f << ',' << enc.patterns[i].to_string() << '\n';
  }
  std::printf("patterns %zu\nbits %zu\nglobal_min %.6g\nglobal_max %.6g\n", enc.patterns.size(),
              enc.patterns.empty() ? std::size_t{0} : enc.patterns.front().size(), enc.encoder.global_min,
              enc.encoder.global_max);
  return 0;
}

// Column j of a frame-sized weight matrix, reshaped to levels x time with
// the highest amplitude on top.
void print_heatmap(const WeightMatrix& w, std::size_t col, std::size_t frame_len) {
  static const char ramp[] = " .:-=+*#%@";
  const std::size_t levels = w.rows() / frame_len;
  Weight hi = 1;
  for (std::size_t i = 0; i < w.rows(); ++i) hi = std::max(hi, w(i, col));
  std::printf("segment %zu\n", col);
  for (std::size_t r = levels; r-- > 0;) {
    for (std::size_t t = 0; t < frame_len; ++t) {
      auto v = w(r * frame_len + t, col);
      std::putchar(ramp[static_cast<std::size_t>(v) * 9 / static_cast<std::size_t>(hi)]);
    }
    std::putchar('\n');
  }
}

int cmd_inspect(const std::string& path, const std::string& csv, std::size_t frame_len, double w_max) {
  if (fs::is_directory(path)) {
    auto net = load_network(path);
    const auto& s = net.shape();
    std::printf("rf_count %zu\nlabel_count %zu\nsegments %zu\ninputs %zu\ncv_units %zu\nsynapses %zu\n", s.rf_count,
                s.label_count, s.segments, s.inputs, s.unit_count(), s.synapse_count());
    return 0;
  }
  auto w = load_weights(path);
  std::printf("rows %zu\ncols %zu\nscale %d\n", w.rows(), w.cols(), w.scale());
  if (w_max > 0)
    std::printf("wt_convergence %.4f\n",
                wt_convergence(w, static_cast<Weight>(w_max * static_cast<double>(w.scale()) + 0.5)));
  if (!csv.empty()) save_weights(csv, w);
  if (frame_len > 0) {
    if (w.rows() % frame_len != 0) throw ConfigError("rows are not a multiple of --frame");
    for (std::size_t j = 0; j < w.cols(); ++j) print_heatmap(w, j, frame_len);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online clustering and classification with active dendrites"};
  app.require_subcommand(1);

  Common cluster_opts, classify_opts, sweep_opts, kmeans_opts, encode_opts;
  auto* cluster = app.add_subcommand("cluster", "stream waveforms through a dendrite");
  add_common(cluster, cluster_opts);
  auto* classify = app.add_subcommand("classify", "online supervised image classification");
  add_common(classify, classify_opts);
  auto* sw = app.add_subcommand("sweep", "run a parameter grid");
  add_common(sw, sweep_opts);
  std::vector<std::string> axes;
  std::string sweep_mode;
  sw->add_option("-g,--grid", axes, "axis as key=v1,v2,... (repeatable)")->required();
  sw->add_option("--mode", sweep_mode, "cluster or classify")->check(CLI::IsMember({"cluster", "classify"}));
  auto* km = app.add_subcommand("kmeans", "multi-seed k-means baseline on the same encodings");
  add_common(km, kmeans_opts);
  auto* enc = app.add_subcommand("encode", "dump waveform encodings");
  add_common(enc, encode_opts);
  std::size_t encode_count = 0;
  enc->add_option("-n,--count", encode_count, "encode only the first n records");
  auto* insp = app.add_subcommand("inspect", "summarize a weight checkpoint or network directory");
  std::string insp_path, insp_csv;
  std::size_t insp_frame = 0;
  double insp_wmax = 0;
  insp->add_option("path", insp_path, "weights.bin, weights.csv or a network directory")->required();
  insp->add_option("--csv", insp_csv, "convert the weights to CSV at this path");
  insp->add_option("--frame", insp_frame, "frame length; prints one heat map per segment");
  insp->add_option("--w-max", insp_wmax, "w_max in real units, to report wt_convergence");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cluster->parsed()) return cmd_cluster(cluster_opts);
    if (classify->parsed()) return cmd_classify(classify_opts);
    if (sw->parsed()) {
      std::optional<Mode> m;
      if (!sweep_mode.empty()) m = sweep_mode == "classify" ? Mode::classify : Mode::cluster;
      return cmd_sweep(sweep_opts, m, axes);
    }
    if (km->parsed()) return cmd_kmeans(kmeans_opts);
    if (enc->parsed()) return cmd_encode(encode_opts, encode_count);
    if (insp->parsed()) return cmd_inspect(insp_path, insp_csv, insp_frame, insp_wmax);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "dendra: config error: %s\n", e.what());
    return 2;
  } catch (const InputError& e) {
    std::fprintf(stderr, "dendra: input error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dendra: %s\n", e.what());
    return 1;
  }
  return 0;
}
