// pixelinv: experiment driver for the pixel-based inverse diffusion problem.
//
//   pixelinv <experiment> --config <path> [--out <path>] [--nx N] [--k N] [--seed S]
//
// Exit codes: 0 success, 1 failed checks, 2 usage or configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "pixelinv/assembly.hpp"
#include "pixelinv/config.hpp"
#include "pixelinv/experiments.hpp"
#include "pixelinv/forward.hpp"

namespace {

using namespace pixelinv;

constexpr int kCheckFailure = 1;
constexpr int kUsageError = 2;

struct Output {
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw ConfigError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file.is_open() ? file : std::cout; }
  std::ofstream file;
};

std::string sibling_path(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  const auto slash = path.find_last_of('/');
  const bool has_ext = dot != std::string::npos &&
                       (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + suffix +
         (has_ext ? path.substr(dot) : ".csv");
}

int run(const ExperimentConfig& config) {
  Output out(config.out);
  const std::string& name = config.experiment;
  if (name == "nonuniqueness") {
    write_csv(out.stream(), config, run_nonuniqueness_sweep(config));
  } else if (name == "landscape") {
    const Landscape landscape = run_residual_landscape(config);
    write_csv(out.stream(), config, landscape.grid);
    if (!config.out.empty()) {
      Output diag(sibling_path(config.out, "_diagonal"));
      write_csv(diag.stream(), config, landscape.diagonal);
    }
  } else if (name == "stability") {
    write_csv(out.stream(), config, run_stability_study(config));
  } else if (name == "properties") {
    const PropertyReport report = run_property_suite(config);
    out.stream() << report.to_json(config) << '\n';
    for (const CheckResult& c : report.checks) {
      if (!c.passed) {
        std::cerr << "FAIL " << c.name << ": measured " << format_real(c.measured)
                  << " > tolerance " << format_real(c.tolerance) << " ("
                  << c.reason << ")\n";
      }
    }
    return report.all_passed() ? 0 : kCheckFailure;
  } else if (name == "mesh") {
    const PixelGrid grid(config.nx);
    write_mesh(out.stream(), build_mesh(grid, config.k));
  } else if (name == "stiffness") {
    const PixelGrid grid(config.nx);
    const StiffnessSet set = assemble_pixel_matrices(build_mesh(grid, config.k), grid);
    write_coordinate(out.stream(),
                     global_matrix(set, Sigma::constant(grid.size()).values()));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forward operator, Jacobian and inverse-problem studies for "
               "piecewise-constant diffusion coefficients"};
  std::string experiment;
  std::string config_path;
  std::optional<std::string> out;
  std::optional<int> nx, k;
  std::optional<long> seed;

  app.add_option("experiment", experiment,
                 "nonuniqueness | landscape | stability | properties | mesh | stiffness")
      ->required()
      ->check(CLI::IsMember({"nonuniqueness", "landscape", "stability",
                             "properties", "mesh", "stiffness"}));
  app.add_option("--config", config_path, "key=value config file")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out, "output path (default: stdout)");
  app.add_option("--nx", nx, "pixels per side");
  app.add_option("--k", k, "elements per pixel side");
  app.add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    KeyValueFile file = KeyValueFile::load(config_path);
    if (out) file.set("out", *out);
    if (nx) file.set("nx", std::to_string(*nx));
    if (k) file.set("k", std::to_string(*k));
    if (seed) file.set("seed", std::to_string(*seed));
    return run(ExperimentConfig::from(file, experiment));
  } catch (const ConfigError& e) {
    std::cerr << "pixelinv: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "pixelinv: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "pixelinv: " << e.what() << '\n';
    return kCheckFailure;
  }
}
