#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pelrec/frame.hpp"
#include "pelrec/metrics.hpp"
#include "pelrec/pel_recursive.hpp"
#include "pelrec/run_config.hpp"

namespace pelrec {

/// Frames entering each estimation pair after ingestion and noise injection.
struct PreparedSequence {
  std::vector<Frame> clean;
  std::vector<Frame> noisy;  // equals `clean` when no noise is configured

  std::size_t pair_count() const { return clean.size() - 1; }
  /// Previous / current frames of pair k (k = 1 .. frame_count - 1).
  const Frame& previous(std::size_t k, NoiseTargets targets) const;
  const Frame& current(std::size_t k) const { return noisy[k]; }
};

/// Reads or synthesizes frames and injects noise. Noise for frame k is seeded
/// from (seed, k) so frames are independent and reproducible.
PreparedSequence prepare_sequence(const RunConfig& config);

struct RunOutcome {
  SequenceReport report;
  std::vector<FieldSummary> summaries;
  std::vector<std::filesystem::path> files;
};

/// Estimates every consecutive pair and writes the selected artifacts:
/// field_<k>.mf, err_<k>.pgm, metrics.csv, diagnostics.json (k is the 1-based
/// index of the current frame). On failure the files written so far are removed.
RunOutcome run(const RunConfig& config, std::ostream& log);

struct CompareOutcome {
  std::vector<std::string> labels;
  std::vector<RunOutcome> runs;
  std::filesystem::path csv_path;
};

/// Runs every estimator on identical inputs, each into its own subdirectory
/// named after the estimator, then writes compare.csv with per-pair IMC and
/// deltas against the first estimator. Requires at least two estimators.
CompareOutcome compare(const RunConfig& config, const std::vector<EstimatorKind>& estimators,
                       std::ostream& log);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

/// Writes frame_NNNN.pgm (from 0001) for every clean synthesized or ingested frame.
std::vector<std::filesystem::path> write_frames(const RunConfig& config, std::ostream& log);

}  // namespace pelrec
