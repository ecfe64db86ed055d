#include "pelrec/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>
#include <vector>

#include "pelrec/errors.hpp"

namespace pelrec {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    parts.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw ConfigError("key '" + std::string(key) + "': cannot parse '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("key '" + std::string(key) + "': expected true/false, got '" +
                    std::string(value) + "'");
}

std::vector<double> parse_list(std::string_view key, std::string_view value) {
  std::vector<double> out;
  for (auto part : split(value, ',')) out.push_back(parse_number<double>(key, part));
  return out;
}

std::vector<Displacement> parse_motions(std::string_view key, std::string_view value) {
  std::vector<Displacement> out;
  for (auto group : split(value, ';')) {
    const auto xy = parse_list(key, group);
    if (xy.size() != 2) throw ConfigError("key '" + std::string(key) + "': expected dx,dy pairs");
    out.push_back({xy[0], xy[1]});
  }
  return out;
}

std::vector<EmParams> parse_init_sets(std::string_view key, std::string_view value) {
  std::vector<EmParams> out;
  for (auto group : split(value, ';')) {
    const auto v = parse_list(key, group);
    if (v.size() != 3) {
      throw ConfigError("key '" + std::string(key) + "': expected sigma1,sigma2,sigman triples");
    }
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

EmitSet parse_emit(std::string_view key, std::string_view value) {
  EmitSet emit{false, false, false, false};
  for (auto item : split(value, ',')) {
    if (item.empty()) continue;
    if (item == "fields") {
      emit.fields = true;
    } else if (item == "error-images") {
      emit.error_images = true;
    } else if (item == "metrics-csv") {
      emit.metrics_csv = true;
    } else if (item == "diagnostics-json") {
      emit.diagnostics_json = true;
    } else {
      throw ConfigError("key '" + std::string(key) + "': unknown emit target '" +
                        std::string(item) + "'");
    }
  }
  return emit;
}

}  // namespace

void RunConfig::validate() const {
  if (input_directory.has_value() == synthetic.has_value()) {
    throw ConfigError("exactly one input source (directory or synthetic) is required");
  }
  if (!emit.any()) throw ConfigError("output.emit selects no artifacts");
  if (noise_snr_db && !std::isfinite(*noise_snr_db)) throw ConfigError("noise.snr_db must be finite");
  try {
    estimator.validate();
    if (synthetic) synthetic->validate(estimator.max_displacement);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  std::map<std::string, std::string, std::less<>> kv;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(std::string(key), std::string(value)).second) {
      throw ConfigError("line " + std::to_string(line_no) + ": duplicate key '" +
                        std::string(key) + "'");
    }
  }

  auto resolve = [&](std::string_view p) {
    std::filesystem::path path{std::string(p)};
    return path.is_relative() && !base_dir.empty() ? base_dir / path : path;
  };

  RunConfig cfg;
  std::string input_type = kv.contains("input.directory") ? "directory" : "synthetic";
  if (auto it = kv.find("input.type"); it != kv.end()) input_type = it->second;
  SyntheticSpec synth;

  for (const auto& [key, value] : kv) {
    try {
      if (key == "seed") {
        cfg.seed = parse_number<std::uint64_t>(key, value);
      } else if (key == "input.type") {
        if (value != "synthetic" && value != "directory") {
          throw ConfigError("input.type must be synthetic or directory");
        }
      } else if (key == "input.directory") {
        cfg.input_directory = resolve(value);
      } else if (key == "synthetic.rows") {
        synth.rows = parse_number<int>(key, value);
      } else if (key == "synthetic.cols") {
        synth.cols = parse_number<int>(key, value);
      } else if (key == "synthetic.pattern") {
        synth.pattern = parse_pattern(value);
      } else if (key == "synthetic.motion") {
        synth.motions = parse_motions(key, value);
      } else if (key == "synthetic.boundary_col") {
        synth.boundary_col = parse_number<int>(key, value);
      } else if (key == "synthetic.frames") {
        synth.frame_count = parse_number<int>(key, value);
      } else if (key == "synthetic.amplitude") {
        synth.sinusoid_amplitude = parse_number<double>(key, value);
      } else if (key == "noise.snr_db") {
        cfg.noise_snr_db = parse_number<double>(key, value);
      } else if (key == "noise.targets") {
        if (value == "both-frames") {
          cfg.noise_targets = NoiseTargets::kBothFrames;
        } else if (value == "current-only") {
          cfg.noise_targets = NoiseTargets::kCurrentOnly;
        } else {
          throw ConfigError("noise.targets must be both-frames or current-only");
        }
      } else if (key == "estimator.kind") {
        cfg.estimator.estimator = parse_estimator(value);
      } else if (key == "estimator.dfd_threshold_T") {
        cfg.estimator.dfd_threshold = parse_number<double>(key, value);
      } else if (key == "estimator.update_tol_eps") {
        cfg.estimator.update_tol = parse_number<double>(key, value);
      } else if (key == "estimator.param_tol_xi") {
        cfg.estimator.param_tol = parse_number<double>(key, value);
      } else if (key == "estimator.param_rtol_xi") {
        cfg.estimator.param_rtol = parse_number<double>(key, value);
      } else if (key == "estimator.max_iter_I") {
        cfg.estimator.max_iter = parse_number<int>(key, value);
      } else if (key == "estimator.max_displacement") {
        cfg.estimator.max_displacement = parse_number<double>(key, value);
      } else if (key == "estimator.wiener_mu") {
        cfg.estimator.wiener_mu = parse_number<double>(key, value);
      } else if (key == "estimator.init_sets") {
        cfg.estimator.init_sets = parse_init_sets(key, value);
      } else if (key == "estimator.wiener_multi_mask") {
        cfg.estimator.wiener_multi_mask = parse_bool(key, value);
      } else if (key == "estimator.include_all_masks") {
        cfg.estimator.include_all_masks = parse_bool(key, value);
      } else if (key == "estimator.temporal_prior") {
        cfg.temporal_prior = parse_bool(key, value);
      } else if (key == "output.directory") {
        cfg.output_directory = resolve(value);
      } else if (key == "output.emit") {
        cfg.emit = parse_emit(key, value);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError("key '" + key + "': " + e.what());
    }
  }

  if (input_type == "synthetic") {
    synth.seed = cfg.seed;
    cfg.synthetic = synth;
    cfg.input_directory.reset();
  } else if (!cfg.input_directory) {
    throw ConfigError("input.type = directory requires input.directory");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text, path.parent_path());
}

void apply_environment(RunConfig& config) {
  const char* env = std::getenv("PELREC_SEED");
  if (!env || !*env) return;
  config.seed = parse_number<std::uint64_t>("PELREC_SEED", env);
  if (config.synthetic) config.synthetic->seed = config.seed;
}

}  // namespace pelrec
