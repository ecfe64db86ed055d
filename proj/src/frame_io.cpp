#include "pelrec/frame_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "pelrec/errors.hpp"

namespace pelrec {

namespace {

class PgmCursor {
 public:
  explicit PgmCursor(std::string_view bytes) : bytes_(bytes) {}

  std::size_t offset() const { return pos_; }
  bool at_end() const { return pos_ >= bytes_.size(); }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Reads a non-negative decimal integer token.
  long read_uint(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    if (at_end()) throw ParseError(std::string("truncated header: missing ") + what, pos_);
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 1'000'000'000L) throw ParseError(std::string(what) + " out of range", start);
      ++pos_;
    }
    if (pos_ == start) throw ParseError(std::string("expected integer for ") + what, start);
    return value;
  }

  std::string_view take(std::size_t n) {
    const auto view = bytes_.substr(pos_, n);
    pos_ += view.size();
    return view;
  }

  void advance(std::size_t n) { pos_ += n; }
  char peek() const { return bytes_[pos_]; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Frame decode_pgm(std::string_view bytes) {
  PgmCursor cur(bytes);
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("not a P2/P5 PGM (bad magic)", 0);
  }
  const bool binary = bytes[1] == '5';
  cur.advance(2);

  const std::size_t cols_at = cur.offset();
  const long cols = cur.read_uint("width");
  const std::size_t rows_at = cur.offset();
  const long rows = cur.read_uint("height");
  const std::size_t maxval_at = cur.offset();
  const long maxval = cur.read_uint("maxval");
  if (cols < 2) throw ParseError("width must be at least 2", cols_at);
  if (rows < 2) throw ParseError("height must be at least 2", rows_at);
  if (maxval < 1) throw ParseError("maxval must be positive", maxval_at);
  if (maxval > 255) throw ParseError("unsupported maxval " + std::to_string(maxval), maxval_at);

  const std::size_t count = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  std::vector<double> data;
  data.reserve(count);

  if (binary) {
    if (cur.at_end() || !std::isspace(static_cast<unsigned char>(cur.peek()))) {
      throw ParseError("missing whitespace after maxval", cur.offset());
    }
    cur.advance(1);
    const std::size_t payload_at = cur.offset();
    const auto payload = cur.take(count);
    if (payload.size() < count) {
      throw ParseError("truncated payload: expected " + std::to_string(count) + " bytes, got " +
                           std::to_string(payload.size()),
                       payload_at + payload.size());
    }
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = static_cast<unsigned char>(payload[i]);
      if (v > maxval) throw ParseError("sample exceeds maxval", payload_at + i);
      data.push_back(static_cast<double>(v));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      cur.skip_space_and_comments();
      if (cur.at_end()) {
        throw ParseError("truncated payload: expected " + std::to_string(count) +
                             " samples, got " + std::to_string(i),
                         cur.offset());
      }
      const std::size_t at = cur.offset();
      const long v = cur.read_uint("sample");
      if (v > maxval) throw ParseError("sample exceeds maxval", at);
      data.push_back(static_cast<double>(v));
    }
  }
  return Frame(static_cast<int>(rows), static_cast<int>(cols), std::move(data));
}

Frame read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_pgm(bytes);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string encode_pgm(const Frame& frame) {
  std::ostringstream header;
  header << "P5\n" << frame.cols() << ' ' << frame.rows() << "\n255\n";
  std::string out = header.str();
  out.reserve(out.size() + frame.size());
  for (double v : frame.data()) {
    if (!std::isfinite(v)) throw std::invalid_argument("cannot encode non-finite intensity");
    const double rounded = std::floor(std::clamp(v, 0.0, 255.0) + 0.5);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::min(rounded, 255.0))));
  }
  return out;
}

void write_pgm(const Frame& frame, const std::filesystem::path& path) {
  const std::string bytes = encode_pgm(frame);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

Frame add_noise(const Frame& frame, double snr_db, std::uint64_t seed) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("snr_db must be finite");
  const double var = variance(frame);
  if (!(var > 0.0)) throw std::invalid_argument("SNR undefined for constant image");
  const double sigma = std::sqrt(var / std::pow(10.0, snr_db / 10.0));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  Frame out = frame;
  for (double& v : out.data()) v += noise(rng);
  return out;
}

}  // namespace pelrec
