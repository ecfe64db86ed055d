#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace pelrec {

/// Integer pixel location (row, col).
struct Pixel {
  int row = 0;
  int col = 0;
};

/// Displacement in pixels. dx runs along columns, dy along rows.
struct Displacement {
  double dx = 0.0;
  double dy = 0.0;

  Displacement& operator+=(const Displacement& o) {
    dx += o.dx;
    dy += o.dy;
    return *this;
  }
  friend Displacement operator+(Displacement a, const Displacement& b) { return a += b; }
  friend Displacement operator-(const Displacement& a, const Displacement& b) {
    return {a.dx - b.dx, a.dy - b.dy};
  }
  friend bool operator==(const Displacement&, const Displacement&) = default;

  double norm() const { return std::hypot(dx, dy); }
};

/// Row-major grid of real intensities; at least 2x2.
class Frame {
 public:
  Frame(int rows, int cols);
  Frame(int rows, int cols, std::vector<double> data);

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double operator()(int row, int col) const { return data_[index(row, col)]; }
  double& operator()(int row, int col) { return data_[index(row, col)]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  bool same_shape(const Frame& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }

  int rows_;
  int cols_;
  std::vector<double> data_;
};

/// Population variance of all intensities.
double variance(const Frame& frame);

}  // namespace pelrec
