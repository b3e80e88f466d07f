#include "dendra/datasets.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <memory>
#include <random>
#include <sstream>

#include "dendra/errors.hpp"

namespace dendra {

namespace {

struct GzCloser {
  void operator()(gzFile f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

// gzread passes plain files through unchanged, so one reader covers both.
std::vector<std::uint8_t> slurp(const std::string& path) {
  GzHandle f(gzopen(path.c_str(), "rb"));
  if (!f) throw InputError("cannot open " + path);
  std::vector<std::uint8_t> data;
  std::uint8_t buf[1 << 16];
  for (;;) {
    int n = gzread(f.get(), buf, sizeof buf);
    if (n < 0) throw InputError("read error in " + path);
    if (n == 0) break;
    data.insert(data.end(), buf, buf + n);
  }
  return data;
}

std::uint32_t be32(const std::vector<std::uint8_t>& d, std::size_t off) {
  return (std::uint32_t{d[off]} << 24) | (std::uint32_t{d[off + 1]} << 16) | (std::uint32_t{d[off + 2]} << 8) |
         std::uint32_t{d[off + 3]};
}

void put_be32(std::ostream& out, std::uint32_t v) {
  char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
               static_cast<char>(v)};
  out.write(b, 4);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(trim(tok));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double& v) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    v = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

IdxImages read_idx_images(const std::string& path) {
  auto d = slurp(path);
  if (d.size() < 16 || be32(d, 0) != 2051) throw InputError(path + ": not an IDX3 image file");
  IdxImages img;
  img.count = be32(d, 4);
  img.rows = be32(d, 8);
  img.cols = be32(d, 12);
  const std::size_t n = img.count * img.rows * img.cols;
  if (d.size() != 16 + n) throw InputError(path + ": image payload size does not match header");
  img.pixels.assign(d.begin() + 16, d.end());
  return img;
}

std::vector<std::uint8_t> read_idx_labels(const std::string& path) {
  auto d = slurp(path);
  if (d.size() < 8 || be32(d, 0) != 2049) throw InputError(path + ": not an IDX1 label file");
  const std::size_t n = be32(d, 4);
  if (d.size() != 8 + n) throw InputError(path + ": label payload size does not match header");
  return {d.begin() + 8, d.end()};
}

void write_idx_images(const std::string& path, const IdxImages& images) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  put_be32(out, 2051);
  put_be32(out, static_cast<std::uint32_t>(images.count));
  put_be32(out, static_cast<std::uint32_t>(images.rows));
  put_be32(out, static_cast<std::uint32_t>(images.cols));
  out.write(reinterpret_cast<const char*>(images.pixels.data()), static_cast<std::streamsize>(images.pixels.size()));
}

void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  put_be32(out, 2049);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

std::size_t default_peak(const std::vector<double>& samples) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (std::abs(samples[i]) > std::abs(samples[best])) best = i;
  return best;
}

std::vector<WaveformRecord> read_waveforms_csv(std::istream& in) {
  std::vector<WaveformRecord> out;
  std::string line;
  std::size_t line_no = 0;
  long label_col = -1;
  long peak_col = -1;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line[0] == '#') continue;
    auto cols = split_csv(line);
    if (first) {
      first = false;
      double probe = 0;
      if (!parse_double(cols[0], probe)) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
          if (cols[c] == "label") label_col = static_cast<long>(c);
          if (cols[c] == "peak") peak_col = static_cast<long>(c);
        }
        continue;
      }
    }
    WaveformRecord r;
    bool has_peak = false;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      double v = 0;
      if (static_cast<long>(c) == label_col) {
        if (cols[c].empty()) continue;
        if (!parse_double(cols[c], v)) throw InputError("bad label '" + cols[c] + "'", line_no);
        r.label = static_cast<int>(v);
      } else if (static_cast<long>(c) == peak_col) {
        if (cols[c].empty()) continue;
        if (!parse_double(cols[c], v) || v < 0) throw InputError("bad peak '" + cols[c] + "'", line_no);
        r.peak = static_cast<std::size_t>(v);
        has_peak = true;
      } else {
        if (!parse_double(cols[c], v)) throw InputError("bad sample '" + cols[c] + "'", line_no);
        r.samples.push_back(v);
      }
    }
    if (r.samples.empty()) throw InputError("record has no samples", line_no);
    if (!has_peak) r.peak = default_peak(r.samples);
    if (r.peak >= r.samples.size()) throw InputError("peak index outside the waveform", line_no);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<WaveformRecord> read_waveforms_jsonl(std::istream& in) {
  std::vector<WaveformRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    WaveformRecord r;
    try {
      auto j = nlohmann::json::parse(line);
      r.samples = j.at("samples").get<std::vector<double>>();
      if (j.contains("label") && !j["label"].is_null()) r.label = j["label"].get<int>();
      r.peak = j.contains("peak") ? j["peak"].get<std::size_t>() : default_peak(r.samples);
    } catch (const nlohmann::json::exception& e) {
      throw InputError(std::string("bad waveform record: ") + e.what(), line_no);
    }
    if (r.samples.empty()) throw InputError("record has no samples", line_no);
    if (r.peak >= r.samples.size()) throw InputError("peak index outside the waveform", line_no);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<WaveformRecord> read_waveforms(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  if (ends_with(path, ".jsonl") || ends_with(path, ".json")) return read_waveforms_jsonl(in);
  return read_waveforms_csv(in);
}

void write_waveforms_csv(std::ostream& out, const std::vector<WaveformRecord>& records) {
  std::size_t width = 0;
  for (const auto& r : records) width = std::max(width, r.samples.size());
  out << "label,peak";
  for (std::size_t i = 0; i < width; ++i) out << ",s" << i;
  out << '\n';
  char buf[32];
  for (const auto& r : records) {
    if (r.label >= 0) out << r.label;
    out << ',' << r.peak;
    for (double v : r.samples) {
      std::snprintf(buf, sizeof buf, ",%.5f", v);
      out << buf;
    }
    out << '\n';
  }
}

std::vector<std::vector<double>> spike_templates(std::size_t templates, std::size_t length, std::size_t peak) {
  // amplitude, peak width, after-hyperpolarization depth / delay / width,
  // pre-peak dip depth
  struct Shape {
    double amp, width, ahp, ahp_delay, ahp_width, pre;
  };
  static constexpr Shape kShapes[] = {
      {1.00, 1.4, 0.30, 5.0, 3.0, 0.00}, {0.70, 2.6, 0.10, 9.0, 5.0, 0.00}, {0.55, 1.2, 0.40, 4.0, 2.5, 0.10},
      {0.85, 3.6, 0.05, 10.0, 4.0, 0.15}, {0.40, 2.0, 0.25, 11.0, 6.0, 0.00}, {0.30, 4.2, 0.35, 6.0, 2.0, 0.05},
      {0.95, 2.2, 0.00, 8.0, 4.0, 0.30}, {0.60, 1.8, 0.20, 14.0, 5.0, 0.05},
  };
  constexpr std::size_t kBase = sizeof kShapes / sizeof kShapes[0];
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k < templates; ++k) {
    Shape s = kShapes[k % kBase];
    // Past the built-in set, stretch the shapes so every template differs.
    double stretch = 1.0 + 0.35 * static_cast<double>(k / kBase);
    std::vector<double> w(length);
    for (std::size_t t = 0; t < length; ++t) {
      double dt = static_cast<double>(t) - static_cast<double>(peak);
      double main = s.amp * std::exp(-0.5 * dt * dt / (s.width * s.width * stretch));
      double da = dt - s.ahp_delay * stretch;
      double ahp = -s.ahp * std::exp(-0.5 * da * da / (s.ahp_width * s.ahp_width));
      double dp = dt + 5.0;
      double pre = -s.pre * std::exp(-0.5 * dp * dp / 4.0);
      w[t] = main + ahp + pre;
    }
    out.push_back(std::move(w));
  }
  return out;
}

std::vector<WaveformRecord> synthetic_spikes(const SyntheticSpikeConfig& cfg) {
  if (cfg.templates == 0) throw DomainError("synthetic data needs at least one template");
  if (cfg.peak >= cfg.length) throw DomainError("synthetic peak outside the waveform");
  const auto shapes = spike_templates(cfg.templates, cfg.length, cfg.peak);
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> noise(0.0, cfg.noise);
  std::normal_distribution<double> jitter(1.0, cfg.amplitude_jitter);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> any(0, cfg.templates - 1);
  std::exponential_distribution<double> duration(1.0 / std::max(cfg.regime_mean, 1.0));

  std::vector<WaveformRecord> out;
  out.reserve(cfg.count);
  std::vector<std::size_t> dominant;
  std::size_t regime_left = 0;
  while (out.size() < cfg.count) {
    if (regime_left == 0) {
      // One neuron, or a pair, dominates the next stretch.
      dominant = {any(rng)};
      if (cfg.templates > 1 && unit(rng) < 0.5) {
        std::size_t second = any(rng);
        while (second == dominant[0]) second = any(rng);
        dominant.push_back(second);
      }
      regime_left = 1 + static_cast<std::size_t>(duration(rng));
    }
    --regime_left;
    std::size_t who = unit(rng) < cfg.background ? any(rng) : dominant[std::min<std::size_t>(
                                                                  static_cast<std::size_t>(unit(rng) * dominant.size()),
                                                                  dominant.size() - 1)];
    WaveformRecord r;
    r.label = static_cast<int>(who);
    r.peak = cfg.peak;
    double a = jitter(rng);
    r.samples.resize(cfg.length);
    for (std::size_t t = 0; t < cfg.length; ++t) r.samples[t] = a * shapes[who][t] + noise(rng);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace dendra
