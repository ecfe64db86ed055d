#include "pelrec/motion_field.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "pelrec/errors.hpp"

namespace pelrec {

namespace {

void append_double(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, res.ptr);
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  std::size_t offset() const { return pos_; }

  std::string_view next(const char* what) {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError(std::string("unexpected end of input reading ") + what, start);
    return text_.substr(start, pos_ - start);
  }

  template <typename T>
  T number(const char* what) {
    const std::size_t start = pos_;
    const auto tok = next(what);
    T value{};
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
      throw ParseError(std::string("malformed ") + what + " '" + std::string(tok) + "'", start);
    }
    return value;
  }

  bool exhausted() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return pos_ == text_.size();
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::size_t MotionField::checked_size(int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("motion field dimensions must be positive");
  return static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
}

std::string encode_motion_field(const MotionField& field) {
  std::string out = "MF " + std::to_string(field.rows()) + " " + std::to_string(field.cols()) + "\n";
  out.reserve(out.size() + field.vectors().size() * 24);
  for (const Displacement& d : field.vectors()) {
    append_double(out, d.dy);
    out.push_back(' ');
    append_double(out, d.dx);
    out.push_back('\n');
  }
  return out;
}

MotionField decode_motion_field(std::string_view text) {
  Tokenizer tok(text);
  if (tok.next("magic") != "MF") throw ParseError("motion field must start with 'MF'", 0);
  const int rows = tok.number<int>("row count");
  const int cols = tok.number<int>("column count");
  if (rows < 1 || cols < 1) throw ParseError("motion field dimensions must be positive");
  MotionField field(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Displacement& d = field.at(r, c);
      d.dy = tok.number<double>("dy");
      d.dx = tok.number<double>("dx");
    }
  }
  if (!tok.exhausted()) throw ParseError("trailing data after motion field", tok.offset());
  return field;
}

void write_motion_field(const MotionField& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << encode_motion_field(field);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

MotionField read_motion_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_motion_field(text);
}

}  // namespace pelrec
