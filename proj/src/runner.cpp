#include "pelrec/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <stdexcept>
#include <system_error>

#include "pelrec/errors.hpp"
#include "pelrec/frame_io.hpp"
#include "pelrec/motion_field.hpp"
#include "pelrec/synthetic.hpp"

namespace pelrec {

namespace fs = std::filesystem;

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over (seed, stream)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Frame> load_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("input directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  std::vector<Frame> frames;
  for (const auto& f : files) {
    frames.push_back(read_pgm(f));
    if (!frames.back().same_shape(frames.front())) {
      throw std::runtime_error("inconsistent frame dimensions in " + f.string());
    }
  }
  return frames;
}

// Removes every registered file unless released.
class OutputGuard {
 public:
  OutputGuard() = default;
  OutputGuard(const OutputGuard&) = delete;
  OutputGuard& operator=(const OutputGuard&) = delete;
  ~OutputGuard() {
    if (released_) return;
    for (const auto& p : files_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

  void write(const fs::path& path, const std::string& bytes) {
    write_file_atomic(path, bytes);
    files_.push_back(path);
  }
  void adopt(const std::vector<fs::path>& paths) {
    files_.insert(files_.end(), paths.begin(), paths.end());
  }
  std::vector<fs::path> release() {
    released_ = true;
    return files_;
  }

 private:
  std::vector<fs::path> files_;
  bool released_ = false;
};

nlohmann::json summary_json(const FieldSummary& s) {
  return {{"pixels_estimated", s.pixels_estimated},
          {"below_threshold_at_init", s.below_threshold_at_init},
          {"converged", s.converged},
          {"exhausted_fallback", s.exhausted_fallback},
          {"out_of_bounds_fallback", s.out_of_bounds_fallback},
          {"fallback_rate", s.fallback_rate},
          {"mean_masks_tried", s.mean_masks_tried},
          {"mean_em_iterations", s.mean_em_iterations},
          {"max_em_iterations", s.max_em_iterations},
          {"mean_abs_dfd", s.mean_abs_dfd}};
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory " + dir.string());
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("failed writing " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move output into place: " + path.string());
  }
}

const Frame& PreparedSequence::previous(std::size_t k, NoiseTargets targets) const {
  return targets == NoiseTargets::kBothFrames ? noisy.at(k - 1) : clean.at(k - 1);
}

PreparedSequence prepare_sequence(const RunConfig& config) {
  config.validate();
  PreparedSequence seq;
  seq.clean = config.synthetic ? generate_sequence(*config.synthetic)
                               : load_directory(*config.input_directory);
  if (seq.clean.size() < 2) throw std::runtime_error("need at least two frames");
  if (config.noise_snr_db) {
    seq.noisy.reserve(seq.clean.size());
    for (std::size_t k = 0; k < seq.clean.size(); ++k) {
      seq.noisy.push_back(add_noise(seq.clean[k], *config.noise_snr_db, mix_seed(config.seed, k)));
    }
  } else {
    seq.noisy = seq.clean;
  }
  return seq;
}

RunOutcome run(const RunConfig& config, std::ostream& log) {
  const PreparedSequence seq = prepare_sequence(config);
  ensure_directory(config.output_directory);
  OutputGuard guard;

  RunOutcome outcome;
  nlohmann::json pairs = nlohmann::json::array();
  std::optional<MotionField> prior;
  for (std::size_t k = 1; k < seq.clean.size(); ++k) {
    const Frame& previous = seq.previous(k, config.noise_targets);
    const Frame& current = seq.current(k);
    const std::string tag = std::to_string(k + 1);

    const auto start = std::chrono::steady_clock::now();
    FieldEstimate est = estimate_field(current, previous, config.estimator,
                                       config.temporal_prior && prior ? &*prior : nullptr);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const PairReport rep = pair_metrics(current, previous, est.field);
    outcome.report.per_pair.push_back(rep);
    outcome.summaries.push_back(est.summary);
    log << "pair " << tag << ": imc " << format_db(rep.imc_db) << " dB, fallback "
        << est.summary.fallback_rate << ", " << seconds << " s\n";

    if (config.emit.fields) {
      guard.write(config.output_directory / ("field_" + tag + ".mf"), encode_motion_field(est.field));
    }
    if (config.emit.error_images) {
      guard.write(config.output_directory / ("err_" + tag + ".pgm"),
                  encode_pgm(error_image(current, previous, est.field)));
    }
    nlohmann::json pj = summary_json(est.summary);
    pj["frame_index"] = k + 1;
    pj["imc_db"] = format_db(rep.imc_db);
    pj["wall_time_s"] = seconds;
    pairs.push_back(std::move(pj));
    prior = std::move(est.field);
  }
  outcome.report.average_imc_db = pooled_imc(outcome.report.per_pair);

  double fd_total = 0.0;
  for (const auto& p : outcome.report.per_pair) fd_total += p.fd_sum;
  if (fd_total == 0.0) {
    log << "warning: consecutive frames are identical; IMC is degenerate and reported as inf\n";
  }

  if (config.emit.metrics_csv) {
    guard.write(config.output_directory / "metrics.csv", metrics_csv(outcome.report));
  }
  if (config.emit.diagnostics_json) {
    const auto all = [&] {
      FieldSummary total;
      double masks = 0, iters = 0, dfd = 0;
      for (const auto& s : outcome.summaries) {
        total.pixels_estimated += s.pixels_estimated;
        total.below_threshold_at_init += s.below_threshold_at_init;
        total.converged += s.converged;
        total.exhausted_fallback += s.exhausted_fallback;
        total.out_of_bounds_fallback += s.out_of_bounds_fallback;
        total.max_em_iterations = std::max(total.max_em_iterations, s.max_em_iterations);
        masks += s.mean_masks_tried * s.pixels_estimated;
        iters += s.mean_em_iterations * s.pixels_estimated;
        dfd += s.mean_abs_dfd * s.pixels_estimated;
      }
      if (total.pixels_estimated > 0) {
        const double n = total.pixels_estimated;
        total.mean_masks_tried = masks / n;
        total.mean_em_iterations = iters / n;
        total.mean_abs_dfd = dfd / n;
        total.fallback_rate = (total.exhausted_fallback + total.out_of_bounds_fallback) / n;
      }
      return total;
    }();
    nlohmann::json doc = {
        {"estimator", std::string(estimator_name(config.estimator.estimator))},
        {"seed", config.seed},
        {"average_imc_db", format_db(outcome.report.average_imc_db)},
        {"totals", summary_json(all)},
        {"pairs", std::move(pairs)},
    };
    guard.write(config.output_directory / "diagnostics.json", doc.dump(2) + "\n");
  }

  outcome.files = guard.release();
  return outcome;
}

CompareOutcome compare(const RunConfig& config, const std::vector<EstimatorKind>& estimators,
                       std::ostream& log) {
  if (estimators.size() < 2) throw ConfigError("compare requires >= 2 estimators");
  config.validate();
  ensure_directory(config.output_directory);

  CompareOutcome out;
  for (EstimatorKind kind : estimators) {
    std::string label(estimator_name(kind));
    const auto base = label;
    for (int n = 2; std::find(out.labels.begin(), out.labels.end(), label) != out.labels.end(); ++n) {
      label = base + "-" + std::to_string(n);
    }
    out.labels.push_back(label);
  }

  OutputGuard guard;
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    RunConfig sub = config;
    sub.estimator.estimator = estimators[i];
    sub.output_directory = config.output_directory / out.labels[i];
    log << "== " << out.labels[i] << "\n";
    out.runs.push_back(run(sub, log));
    guard.adopt(out.runs.back().files);
  }

  std::string csv = "frame_index";
  for (const auto& l : out.labels) csv += ",imc_db_" + l;
  for (std::size_t i = 1; i < out.labels.size(); ++i) {
    csv += ",delta_" + out.labels[0] + "_minus_" + out.labels[i];
  }
  csv += "\n";
  auto delta = [](double a, double b) { return a == b ? 0.0 : a - b; };
  auto row = [&](const std::string& idx, auto value_of) {
    csv += idx;
    for (const auto& r : out.runs) csv += "," + format_db(value_of(r));
    for (std::size_t i = 1; i < out.runs.size(); ++i) {
      csv += "," + format_db(delta(value_of(out.runs[0]), value_of(out.runs[i])));
    }
    csv += "\n";
  };
  const std::size_t pairs = out.runs.front().report.per_pair.size();
  for (std::size_t k = 0; k < pairs; ++k) {
    row(std::to_string(k + 2), [k](const RunOutcome& r) { return r.report.per_pair[k].imc_db; });
  }
  row("average", [](const RunOutcome& r) { return r.report.average_imc_db; });

  out.csv_path = config.output_directory / "compare.csv";
  guard.write(out.csv_path, csv);
  guard.release();
  return out;
}

std::vector<fs::path> write_frames(const RunConfig& config, std::ostream& log) {
  const PreparedSequence seq = prepare_sequence(config);
  ensure_directory(config.output_directory);
  OutputGuard guard;
  for (std::size_t k = 0; k < seq.clean.size(); ++k) {
    // Zero-padded so lexicographic order matches frame order on re-ingestion.
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%04zu.pgm", k + 1);
    const auto path = config.output_directory / name;
    guard.write(path, encode_pgm(seq.clean[k]));
  }
  log << "wrote " << seq.clean.size() << " frames to " << config.output_directory.string() << "\n";
  return guard.release();
}

}  // namespace pelrec
