// tmrate: run Tikhonov-Mann rate-certification experiments from JSON configs.
//
//   tmrate run configs/examples/box_projection_m3.json --out out/box
//   tmrate suite configs/suite --out out/suite

#include "tmiter/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

void print_result(const std::string& label, const tmiter::ExperimentResult& r) {
  if (r.exit_code == 2) {
    std::cerr << label << ": configuration error: " << r.error << '\n';
    return;
  }
  for (const auto& c : r.checks) {
    if (!c.passed) std::cout << "  FAIL " << c.name << ": " << c.detail << '\n';
  }
  for (const auto& c : r.certifications) {
    if (c.any_failure()) std::cout << "  FAIL certification " << c.rate_name << '\n';
  }
  std::cout << label << ": " << (r.exit_code == 0 ? "pass" : "fail")
            << " (M = " << r.M << ", horizon = " << r.horizon << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tikhonov-Mann iteration: rate computation and certification"};
  app.require_subcommand(1);

  std::optional<tmiter::Index> horizon, k_max;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("--horizon", horizon, "number of iteration steps");
    sub->add_option("--kmax", k_max, "largest k to certify");
    sub->add_option("--seed", seed, "seed for the property samplers");
    sub->add_option("--out", out, "output directory");
  };

  std::string config_path;
  auto* run = app.add_subcommand("run", "run a single experiment config");
  run->add_option("config", config_path, "JSON config file")->required();
  add_overrides(run);

  std::string suite_dir;
  auto* suite = app.add_subcommand("suite", "run every *.json config in a directory");
  suite->add_option("dir", suite_dir, "directory of configs")->required();
  add_overrides(suite);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  tmiter::Overrides ov;
  ov.horizon = horizon;
  ov.k_max = k_max;
  ov.seed = seed;
  if (out) ov.output = *out;

  try {
    if (*run) {
      auto cfg = tmiter::load_config(config_path);
      tmiter::apply_overrides(cfg, ov);
      const auto r = tmiter::run_experiment(cfg);
      print_result(cfg.name, r);
      if (r.exit_code != 2) std::cout << "artifacts in " << cfg.output.string() << '\n';
      return r.exit_code;
    }
    const std::filesystem::path root = out ? std::filesystem::path(*out)
                                           : std::filesystem::path("out") / "suite";
    const auto s = tmiter::run_suite(suite_dir, root, ov);
    for (const auto& e : s.entries) {
      std::cout << (e.exit_code == 0 ? "pass " : e.exit_code == 2 ? "error" : "FAIL ")
                << ' ' << e.config;
      if (!e.message.empty()) std::cout << ": " << e.message;
      std::cout << '\n';
    }
    std::cout << "summary in " << (root / "suite_summary.csv").string() << '\n';
    return s.exit_code;
  } catch (const tmiter::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  }
}
