#ifndef DENDRA_WEIGHT_MATRIX_HPP
#define DENDRA_WEIGHT_MATRIX_HPP

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "dendra/types.hpp"

namespace dendra {

/**
 * p x q synaptic crossbar: one row per input line, one column per segment.
 *
 * Storage is row-major so that a sparse input touches whole contiguous rows;
 * accumulating the rows of the spiking inputs yields every segment's
 * potential in one sweep.
 */
class WeightMatrix {
 public:
  WeightMatrix() = default;
  WeightMatrix(std::size_t rows, std::size_t cols, Weight initial, Weight scale_denominator = 1);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  Weight scale() const noexcept { return scale_; }

  Weight& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  Weight operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<Weight> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const Weight> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  /// Copy of segment j's weights.
  std::vector<Weight> column(std::size_t j) const;

  std::span<Weight> data() noexcept { return data_; }
  std::span<const Weight> data() const noexcept { return data_; }

  friend bool operator==(const WeightMatrix& a, const WeightMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.scale_ == b.scale_ && a.data_ == b.data_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  Weight scale_ = 1;
  std::vector<Weight> data_;
};

// Checkpoint formats.
//
// Binary: "DWM1", then uint32 rows, cols, scale_denominator, then rows*cols
// int32 weights, row-major, all little-endian.
// CSV: a "p,q,scale_denominator" header, one line with those three values,
// then p lines of q comma-separated scaled integers.
void write_binary(std::ostream& out, const WeightMatrix& w);
WeightMatrix read_binary(std::istream& in);
void write_csv(std::ostream& out, const WeightMatrix& w);
WeightMatrix read_csv(std::istream& in);

void save_weights(const std::string& path, const WeightMatrix& w);  // format by extension
WeightMatrix load_weights(const std::string& path);

}  // namespace dendra

#endif  // DENDRA_WEIGHT_MATRIX_HPP
