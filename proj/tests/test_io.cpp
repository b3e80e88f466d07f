#include <gtest/gtest.h>
#include <zlib.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dendra/datasets.hpp"
#include "dendra/errors.hpp"
#include "dendra/weight_matrix.hpp"

using namespace dendra;
namespace fs = std::filesystem;

namespace {

WeightMatrix random_weights(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  WeightMatrix w(37, 5, 0, 256);
  for (auto& v : w.data()) v = static_cast<Weight>(rng() % 3073);
  return w;
}

fs::path scratch(const std::string& name) { return fs::temp_directory_path() / ("dendra_test_" + name); }

std::size_t error_line(const std::string& text, bool jsonl) {
  std::istringstream in(text);
  try {
    if (jsonl)
      read_waveforms_jsonl(in);
    else
      read_waveforms_csv(in);
  } catch (const InputError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(WeightIo, BinaryRoundTrip) {
  auto w = random_weights(1);
  std::stringstream s;
  write_binary(s, w);
  auto back = read_binary(s);
  EXPECT_TRUE(back == w);
  EXPECT_EQ(back.scale(), 256);
}

TEST(WeightIo, CsvRoundTrip) {
  auto w = random_weights(2);
  std::stringstream s;
  write_csv(s, w);
  auto back = read_csv(s);
  EXPECT_TRUE(back == w);
}

TEST(WeightIo, FormatChosenByExtension) {
  auto w = random_weights(3);
  for (const char* ext : {"w.bin", "w.csv"}) {
    auto p = scratch(ext);
    save_weights(p.string(), w);
    EXPECT_TRUE(load_weights(p.string()) == w) << ext;
    fs::remove(p);
  }
}

TEST(WeightIo, RejectsGarbage) {
  std::stringstream junk("not a matrix");
  EXPECT_THROW(read_binary(junk), InputError);
  std::stringstream csv("p,q,scale_denominator\n2,2,1\n1,2\n");
  EXPECT_THROW(read_csv(csv), InputError);
  std::stringstream truncated;
  write_binary(truncated, random_weights(4));
  auto cut = truncated.str().substr(0, 40);
  std::stringstream t2(cut);
  EXPECT_THROW(read_binary(t2), InputError);
}

TEST(IdxIo, RoundTripImagesAndLabels) {
  IdxImages img{3, 4, 5, {}};
  for (std::size_t i = 0; i < 60; ++i) img.pixels.push_back(static_cast<std::uint8_t>(i * 7));
  std::vector<std::uint8_t> labels{3, 1, 4};
  auto pi = scratch("img.idx"), pl = scratch("lab.idx");
  write_idx_images(pi.string(), img);
  write_idx_labels(pl.string(), labels);
  auto back = read_idx_images(pi.string());
  EXPECT_EQ(back.count, 3u);
  EXPECT_EQ(back.rows, 4u);
  EXPECT_EQ(back.cols, 5u);
  EXPECT_EQ(back.pixels, img.pixels);
  EXPECT_EQ(back.image(2)[0], img.pixels[40]);
  EXPECT_EQ(read_idx_labels(pl.string()), labels);
  EXPECT_THROW(read_idx_labels(pi.string()), InputError);
  EXPECT_THROW(read_idx_images(pl.string()), InputError);
  fs::remove(pi);
  fs::remove(pl);
}

TEST(IdxIo, ReadsGzippedFiles) {
  std::vector<std::uint8_t> labels{9, 8, 7, 6};
  auto plain = scratch("lab_plain.idx");
  write_idx_labels(plain.string(), labels);
  std::ifstream in(plain, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  auto gz = scratch("lab.idx.gz");
  gzFile f = gzopen(gz.string().c_str(), "wb");
  ASSERT_NE(f, nullptr);
  gzwrite(f, bytes.data(), static_cast<unsigned>(bytes.size()));
  gzclose(f);
  EXPECT_EQ(read_idx_labels(gz.string()), labels);
  fs::remove(plain);
  fs::remove(gz);
}

TEST(IdxIo, RejectsTruncatedPayload) {
  auto p = scratch("short.idx");
  {
    std::ofstream out(p, std::ios::binary);
    const unsigned char hdr[] = {0, 0, 8, 1, 0, 0, 0, 5, 1, 2};
    out.write(reinterpret_cast<const char*>(hdr), sizeof hdr);
  }
  EXPECT_THROW(read_idx_labels(p.string()), InputError);
  fs::remove(p);
  EXPECT_THROW(read_idx_labels(p.string()), InputError);
}

TEST(WaveformIo, CsvWithHeaderLabelAndPeak) {
  std::istringstream in("label,peak,s0,s1,s2\n2,1,0.1,0.9,0.2\n,,0.0,-0.5,3.0\n");
  auto r = read_waveforms_csv(in);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].label, 2);
  EXPECT_EQ(r[0].peak, 1u);
  EXPECT_EQ(r[0].samples, (std::vector<double>{0.1, 0.9, 0.2}));
  EXPECT_EQ(r[1].label, -1);
  EXPECT_EQ(r[1].peak, 2u);  // largest |sample|
}

TEST(WaveformIo, HeaderlessCsvIsAllSamples) {
  std::istringstream in("1,2,-7\n");
  auto r = read_waveforms_csv(in);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].samples.size(), 3u);
  EXPECT_EQ(r[0].peak, 2u);
}

TEST(WaveformIo, CsvRoundTrip) {
  std::vector<WaveformRecord> recs{{{0.5, -1.25, 2.0}, 2, 4}, {{1.0, 0.0}, 0, -1}};
  std::stringstream s;
  write_waveforms_csv(s, recs);
  auto back = read_waveforms_csv(s);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].samples, recs[0].samples);
  EXPECT_EQ(back[0].label, 4);
  EXPECT_EQ(back[1].peak, 0u);
  EXPECT_EQ(back[1].label, -1);
}

TEST(WaveformIo, Jsonl) {
  std::istringstream in(R"({"samples": [0, 3, 1], "label": 5}
{"samples": [1, 2], "peak": 0}
)");
  auto r = read_waveforms_jsonl(in);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].peak, 1u);
  EXPECT_EQ(r[0].label, 5);
  EXPECT_EQ(r[1].peak, 0u);
  EXPECT_EQ(r[1].label, -1);
}

TEST(WaveformIo, ErrorsCarryTheLineNumber) {
  EXPECT_EQ(error_line("label,s0\n1,0.5\n2,abc\n", false), 3u);
  EXPECT_EQ(error_line("s0,peak\n1,9\n", false), 2u);
  EXPECT_EQ(error_line("\n{\"samples\": [1]}\n{\"samples\": 4}\n", true), 3u);
  EXPECT_EQ(error_line("{\"samples\": []}\n", true), 1u);
  EXPECT_THROW(read_waveforms("/nonexistent/w.csv"), InputError);
}

TEST(Synthetic, DeterministicAndLabelled) {
  SyntheticSpikeConfig c;
  c.count = 500;
  auto a = synthetic_spikes(c);
  auto b = synthetic_spikes(c);
  ASSERT_EQ(a.size(), 500u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].samples, b[i].samples);
    ASSERT_TRUE(a[i].label >= 0 && a[i].label < 6);
    ASSERT_EQ(a[i].peak, 20u);
    ASSERT_EQ(a[i].samples.size(), 48u);
  }
  c.seed = 2;
  EXPECT_NE(synthetic_spikes(c)[0].samples, a[0].samples);
  c.peak = 48;
  EXPECT_THROW(synthetic_spikes(c), DomainError);
}
