#pragma once

#include <string>
#include <vector>

#include "pelrec/frame.hpp"
#include "pelrec/motion_field.hpp"

namespace pelrec {

/// Improvement in motion compensation for one frame pair.
///
/// The support S holds the pixels whose displaced position lies inside the
/// previous frame; both sums run over S. The mean-squared values divide by
/// rows * cols. imc_db is +infinity when the compensated error vanishes.
struct PairReport {
  double fd_sum = 0.0;   // sum over S of (I_k - I_{k-1})^2
  double dfd_sum = 0.0;  // sum over S of (I_k - I_{k-1}(r - d))^2
  double fd_ms = 0.0;
  double dfd_ms = 0.0;
  double imc_db = 0.0;
  std::size_t support = 0;
};

struct SequenceReport {
  std::vector<PairReport> per_pair;  // pairs (1,2), (2,3), ...
  double average_imc_db = 0.0;       // from pooled sums
};

/// 10 log10(fd / dfd) with the +infinity convention for dfd == 0.
double imc_from_sums(double fd_sum, double dfd_sum);

/// Throws std::invalid_argument on shape mismatch or an empty support.
PairReport pair_metrics(const Frame& current, const Frame& previous, const MotionField& field);

/// fields[i] maps frames[i] -> frames[i + 1]. Sums are pooled across pairs
/// before taking the logarithm.
SequenceReport sequence_metrics(const std::vector<Frame>& frames,
                                const std::vector<MotionField>& fields);

/// Pooled average over already computed pair reports.
double pooled_imc(const std::vector<PairReport>& pairs);

/// |DFD| scaled so the largest value maps to 255; pixels outside S are 255.
Frame error_image(const Frame& current, const Frame& previous, const MotionField& field);

/// "inf" / "-inf" for infinities, shortest round-trip decimal otherwise.
std::string format_db(double value);

/// CSV with header "frame_index,fd_ms,dfd_ms,imc_db", one row per pair
/// (frame_index is that of the current frame, starting at `first_index`),
/// and a closing "average,,,<imc_db>" row.
std::string metrics_csv(const SequenceReport& report, int first_index = 2);

}  // namespace pelrec
