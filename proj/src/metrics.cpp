#include "pelrec/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pelrec/interp.hpp"

namespace pelrec {

namespace {

void check_shapes(const Frame& current, const Frame& previous, const MotionField& field) {
  if (!current.same_shape(previous) || !field.matches(current)) {
    throw std::invalid_argument("frame / motion field dimensions disagree");
  }
}

}  // namespace

double imc_from_sums(double fd_sum, double dfd_sum) {
  if (dfd_sum == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(fd_sum / dfd_sum);
}

PairReport pair_metrics(const Frame& current, const Frame& previous, const MotionField& field) {
  check_shapes(current, previous, field);
  PairReport rep;
  for (int row = 0; row < current.rows(); ++row) {
    for (int col = 0; col < current.cols(); ++col) {
      const Pixel r{row, col};
      const auto compensated = try_dfd(current, previous, r, field.at(r));
      if (!compensated) continue;
      const double fd = current(row, col) - previous(row, col);
      rep.fd_sum += fd * fd;
      rep.dfd_sum += *compensated * *compensated;
      ++rep.support;
    }
  }
  if (rep.support == 0) throw std::invalid_argument("empty motion-compensation support");
  const double rc = static_cast<double>(current.size());
  rep.fd_ms = rep.fd_sum / rc;
  rep.dfd_ms = rep.dfd_sum / rc;
  rep.imc_db = imc_from_sums(rep.fd_sum, rep.dfd_sum);
  return rep;
}

double pooled_imc(const std::vector<PairReport>& pairs) {
  double fd = 0.0, dfd = 0.0;
  for (const auto& p : pairs) {
    fd += p.fd_sum;
    dfd += p.dfd_sum;
  }
  return imc_from_sums(fd, dfd);
}

SequenceReport sequence_metrics(const std::vector<Frame>& frames,
                                const std::vector<MotionField>& fields) {
  if (frames.size() < 2 || fields.size() + 1 != frames.size()) {
    throw std::invalid_argument("need one motion field per consecutive frame pair");
  }
  SequenceReport rep;
  for (std::size_t k = 1; k < frames.size(); ++k) {
    rep.per_pair.push_back(pair_metrics(frames[k], frames[k - 1], fields[k - 1]));
  }
  rep.average_imc_db = pooled_imc(rep.per_pair);
  return rep;
}

Frame error_image(const Frame& current, const Frame& previous, const MotionField& field) {
  check_shapes(current, previous, field);
  Frame out(current.rows(), current.cols());
  std::vector<bool> outside(current.size(), false);
  double max_abs = 0.0;
  for (int row = 0; row < current.rows(); ++row) {
    for (int col = 0; col < current.cols(); ++col) {
      const Pixel r{row, col};
      const auto e = try_dfd(current, previous, r, field.at(r));
      if (!e) {
        outside[static_cast<std::size_t>(row * current.cols() + col)] = true;
        continue;
      }
      out(row, col) = std::abs(*e);
      max_abs = std::max(max_abs, out(row, col));
    }
  }
  auto data = out.data();
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (outside[i]) {
      data[i] = 255.0;
    } else {
      data[i] = max_abs > 0.0 ? data[i] * (255.0 / max_abs) : 0.0;
    }
  }
  return out;
}

std::string format_db(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string metrics_csv(const SequenceReport& report, int first_index) {
  std::string out = "frame_index,fd_ms,dfd_ms,imc_db\n";
  int k = first_index;
  for (const auto& p : report.per_pair) {
    out += std::to_string(k++) + "," + format_db(p.fd_ms) + "," + format_db(p.dfd_ms) + "," +
           format_db(p.imc_db) + "\n";
  }
  out += "average,,," + format_db(report.average_imc_db) + "\n";
  return out;
}

}  // namespace pelrec
