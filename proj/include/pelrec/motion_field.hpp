#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pelrec/frame.hpp"

namespace pelrec {

/// Dense per-pixel displacement field, row-major.
class MotionField {
 public:
  MotionField(int rows, int cols) : rows_(rows), cols_(cols), vectors_(checked_size(rows, cols)) {}

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }

  const Displacement& at(int row, int col) const { return vectors_[index(row, col)]; }
  Displacement& at(int row, int col) { return vectors_[index(row, col)]; }
  const Displacement& at(Pixel p) const { return at(p.row, p.col); }
  Displacement& at(Pixel p) { return at(p.row, p.col); }

  const std::vector<Displacement>& vectors() const noexcept { return vectors_; }

  bool matches(const Frame& f) const noexcept { return rows_ == f.rows() && cols_ == f.cols(); }

  friend bool operator==(const MotionField&, const MotionField&) = default;

 private:
  static std::size_t checked_size(int rows, int cols);
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  int rows_;
  int cols_;
  std::vector<Displacement> vectors_;
};

/// Text form: "MF <rows> <cols>" then one "<dy> <dx>" line per pixel in raster
/// order, printed with round-trip precision.
std::string encode_motion_field(const MotionField& field);
MotionField decode_motion_field(std::string_view text);

void write_motion_field(const MotionField& field, const std::filesystem::path& path);
MotionField read_motion_field(const std::filesystem::path& path);

}  // namespace pelrec
