#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pelrec {

/// Malformed PGM / motion-field / config input.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(byte_offset) + ")"),
        offset_(byte_offset) {}
  explicit ParseError(const std::string& what) : std::runtime_error(what), offset_(0) {}

  std::size_t byte_offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A sampling position fell outside the frame support.
class BoundsError : public std::out_of_range {
 public:
  BoundsError(double x, double y)
      : std::out_of_range("position (" + std::to_string(x) + ", " + std::to_string(y) +
                          ") is outside the frame"),
        x_(x),
        y_(y) {}

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

 private:
  double x_;
  double y_;
};

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pelrec
