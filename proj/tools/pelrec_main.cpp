// pelrec: pel-recursive motion estimation driver.
//
//   pelrec run <config>
//   pelrec compare <config> --estimators em-multi-mask,wiener
//   pelrec masks
//   pelrec synth <config>

#include <CLI11.hpp>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "pelrec/observation.hpp"
#include "pelrec/pel_recursive.hpp"
#include "pelrec/run_config.hpp"
#include "pelrec/runner.hpp"

namespace {

void print_masks(std::ostream& os) {
  for (const auto& mask : pelrec::mask_catalog()) {
    os << "mask " << mask.id << " (N=" << mask.offsets.size() << ")\n";
    for (int dy = -1; dy <= 1; ++dy) {
      os << "  ";
      for (int dx = -1; dx <= 1; ++dx) {
        bool on = false;
        for (const auto& o : mask.offsets) on = on || (o.dy == dy && o.dx == dx);
        os << (on ? (dy == 0 && dx == 0 ? 'o' : 'x') : '.');
      }
      os << '\n';
    }
  }
}

pelrec::RunConfig load(const std::string& path) {
  auto cfg = pelrec::load_run_config(path);
  pelrec::apply_environment(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pel-recursive motion estimation with EM variance estimation"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "estimate motion for every frame pair");
  run_cmd->add_option("config", config_path, "key = value config file")->required();

  std::string compare_config;
  std::string estimators = "em-multi-mask,wiener";
  auto* cmp_cmd = app.add_subcommand("compare", "run several estimators on identical inputs");
  cmp_cmd->add_option("config", compare_config, "key = value config file")->required();
  cmp_cmd->add_option("--estimators", estimators, "comma separated estimator list");

  auto* masks_cmd = app.add_subcommand("masks", "print the neighborhood mask catalog");

  std::string synth_config;
  auto* synth_cmd = app.add_subcommand("synth", "write the input frames as PGM files");
  synth_cmd->add_option("config", synth_config, "key = value config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*masks_cmd) {
      print_masks(std::cout);
    } else if (*run_cmd) {
      const auto outcome = pelrec::run(load(config_path), std::cerr);
      std::cout << "average imc_db " << pelrec::format_db(outcome.report.average_imc_db) << "\n";
    } else if (*cmp_cmd) {
      std::vector<pelrec::EstimatorKind> kinds;
      for (const auto& name : CLI::detail::split(estimators, ',')) {
        if (!name.empty()) kinds.push_back(pelrec::parse_estimator(name));
      }
      const auto outcome = pelrec::compare(load(compare_config), kinds, std::cerr);
      std::cout << "wrote " << outcome.csv_path.string() << "\n";
    } else if (*synth_cmd) {
      pelrec::write_frames(load(synth_config), std::cerr);
    }
  } catch (const std::exception& e) {
    std::cerr << "pelrec: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
