#include "dendra/weight_matrix.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dendra/errors.hpp"

namespace dendra {

WeightMatrix::WeightMatrix(std::size_t rows, std::size_t cols, Weight initial, Weight scale_denominator)
    : rows_(rows), cols_(cols), scale_(scale_denominator), data_(rows * cols, initial) {
  if (scale_denominator < 1) throw DomainError("scale denominator must be positive");
}

std::vector<Weight> WeightMatrix::column(std::size_t j) const {
  if (j >= cols_) throw DimensionError("column index out of range");
  std::vector<Weight> c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

namespace {

constexpr std::array<char, 4> kMagic = {'D', 'W', 'M', '1'};

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw InputError("truncated weight file");
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_binary(std::ostream& out, const WeightMatrix& w) {
  out.write(kMagic.data(), kMagic.size());
  put_u32(out, static_cast<std::uint32_t>(w.rows()));
  put_u32(out, static_cast<std::uint32_t>(w.cols()));
  put_u32(out, static_cast<std::uint32_t>(w.scale()));
  for (Weight v : w.data()) put_u32(out, static_cast<std::uint32_t>(v));
}

WeightMatrix read_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw InputError("not a weight matrix file");
  auto rows = get_u32(in);
  auto cols = get_u32(in);
  auto scale = get_u32(in);
  WeightMatrix w(rows, cols, 0, static_cast<Weight>(scale));
  for (auto& v : w.data()) v = static_cast<Weight>(get_u32(in));
  return w;
}

void write_csv(std::ostream& out, const WeightMatrix& w) {
  out << "p,q,scale_denominator\n" << w.rows() << ',' << w.cols() << ',' << w.scale() << '\n';
  for (std::size_t i = 0; i < w.rows(); ++i) {
    auto r = w.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out << (j ? "," : "") << r[j];
    out << '\n';
  }
}

WeightMatrix read_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) throw InputError("truncated weight csv", line_no + 1);
    ++line_no;
  };
  next();
  if (line.rfind("p,q,scale_denominator", 0) != 0) throw InputError("missing weight csv header", line_no);
  next();
  std::size_t rows = 0, cols = 0;
  long scale = 0;
  char c1 = 0, c2 = 0;
  std::istringstream hs(line);
  if (!(hs >> rows >> c1 >> cols >> c2 >> scale) || c1 != ',' || c2 != ',')
    throw InputError("bad weight csv shape line", line_no);
  WeightMatrix w(rows, cols, 0, static_cast<Weight>(scale));
  for (std::size_t i = 0; i < rows; ++i) {
    next();
    std::istringstream rs(line);
    for (std::size_t j = 0; j < cols; ++j) {
      long v = 0;
      if (!(rs >> v)) throw InputError("bad weight value", line_no);
      w(i, j) = static_cast<Weight>(v);
      if (j + 1 < cols) {
        char comma = 0;
        if (!(rs >> comma) || comma != ',') throw InputError("expected ','", line_no);
      }
    }
  }
  return w;
}

void save_weights(const std::string& path, const WeightMatrix& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open " + path + " for writing");
  if (ends_with(path, ".csv"))
    write_csv(out, w);
  else
    write_binary(out, w);
}

WeightMatrix load_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  return ends_with(path, ".csv") ? read_csv(in) : read_binary(in);
}

}  // namespace dendra
