#include "pelrec/frame.hpp"

#include <stdexcept>
#include <string>

namespace pelrec {

namespace {

void check_shape(int rows, int cols) {
  if (rows < 2 || cols < 2) {
    throw std::invalid_argument("frame must be at least 2x2, got " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
}

}  // namespace

Frame::Frame(int rows, int cols) : rows_(rows), cols_(cols) {
  check_shape(rows, cols);
  data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0);
}

Frame::Frame(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  check_shape(rows, cols);
  if (data_.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols)) {
    throw std::invalid_argument("frame data length " + std::to_string(data_.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
}

double variance(const Frame& frame) {
  const auto values = frame.data();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(values.size());
}

}  // namespace pelrec
