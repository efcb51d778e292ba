#pragma once

#include "tmiter/errors.hpp"
#include "tmiter/iterate.hpp"
#include "tmiter/rates.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tmiter {

/// One experiment, as read from a JSON config file. Component specs stay as
/// JSON objects until assembly; see README.md for the schema.
struct ExperimentConfig {
  std::string name;
  nlohmann::json space;
  nlohmann::json family;
  nlohmann::json schedule;
  nlohmann::json u;
  nlohmann::json x0;
  std::optional<nlohmann::json> p;
  std::optional<Index> M_override;

  std::optional<Index> horizon;  // nullopt: derived from the rates
  Index max_auto_horizon = 5'000'000;
  Index k_max = 10;
  double tol = 1e-9;
  std::filesystem::path output = "out";
  std::uint64_t seed = 0;

  std::size_t axiom_samples = 10'000;
  std::size_t property_samples = 2'000;
  Index modulus_horizon = 100'000;
  bool trace_points = false;
  Index trace_stride = 1;
};

/// Throws ConfigError with the offending field path (and line, for syntax
/// errors).
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<Index> horizon;
  std::optional<Index> k_max;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> output;
};

void apply_overrides(ExperimentConfig& cfg, const Overrides& o);

SpacePtr build_space(const nlohmann::json& spec);
ParamSchedule build_schedule(const nlohmann::json& spec);
MappingFamily build_family(const nlohmann::json& spec, const Space& space,
                           const ParamSchedule& schedule);
Point build_point(const nlohmann::json& spec, const Space& space);

/// The modulus chi_T the experiment uses: the family's declared one, or the
/// gamma proposition when the family carries a jP2 certificate and the
/// schedule has gamma data. nullopt for uncertified custom families.
std::optional<RateFn> chi_T_for(const ProblemInstance& inst);

/// Every rate the experiment reports, computed from the instance alone.
struct ExperimentRates {
  std::optional<RateBundle> general;
  std::optional<RateFn> example_sigma;    // closed form, example schedule
  std::optional<RateFn> example_sigma_t;  // closed form, example schedule
  std::optional<RateFn> halpern;          // Sigma translated to Halpern
  std::optional<LinearRates> linear;      // linear schedule only
};

ExperimentRates compute_rates(const ProblemInstance& inst);

ProblemInstance assemble_instance(const ExperimentConfig& cfg);

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ExperimentResult {
  int exit_code = 0;  // 0 pass, 1 certification/check failure, 2 config error
  std::string error;  // config error message when exit_code == 2
  std::vector<CheckResult> checks;
  std::vector<CertificationReport> certifications;
  Index horizon = 0;
  Index M = 0;
};

/// Runs one experiment and writes trace.csv, rates.csv, certification.csv
/// and report.txt into cfg.output.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SuiteEntry {
  std::string config;
  int exit_code = 0;
  std::size_t failures = 0;
  std::string message;
};

struct SuiteResult {
  int exit_code = 0;
  std::vector<SuiteEntry> entries;
};

/// Runs every *.json config in `dir` (sorted by name), each into
/// out_root/<stem>/, and writes out_root/suite_summary.csv. A config's
/// own output field is ignored. Throws ConfigError if `dir` has no configs.
SuiteResult run_suite(const std::filesystem::path& dir,
                      const std::filesystem::path& out_root,
                      const Overrides& overrides = {});

}  // namespace tmiter
