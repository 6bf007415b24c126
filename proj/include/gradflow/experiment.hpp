#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gradflow/config.hpp"
#include "gradflow/verify.hpp"

namespace gradflow {

struct ExperimentResult {
  Trajectory trajectory;
  std::optional<RegimeReport> regime;
  std::optional<ConvergenceRates> rates;
  std::optional<ProfilePrediction> profile;
  /// Frobenius distance (up to sign) between the terminal direction and the
  /// predicted profile, or between features and the predicted limit.
  std::optional<double> profile_error;
  std::vector<std::string> notes;
  std::string report;
};

/// Header: step,time,rayleigh_quotient,dirichlet_direction,
/// parametric_energy_direction,log_scale; values with 17 significant digits.
std::string trajectory_csv(const Trajectory& t);

/// Runs the configured model, predicts its regime where a prediction
/// exists, and writes the csv, svg and report files named in cfg.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct BipartiteDemoOptions {
  std::size_t a = 5;
  std::size_t b = 5;
  double tau = 0.5;
  int steps = 60;
  std::uint64_t seed = 7;
  double weight = -1.0;  // the 1x1 channel-mixing weight of the gradient flow
  std::filesystem::path output_prefix;  // files are written only when set
};

struct BipartiteDemoResult {
  bool passed = false;
  std::vector<std::string> failures;
  RegimeReport regime;
  Trajectory gradient_flow;
  Trajectory heat;
  std::string report;
  std::string svg;
};

/// Gradient flow with a negative weight against heat diffusion on K_{a,b}.
/// In the HFD regime it asserts RQ -> 2 for the flow, RQ -> 0 for heat and
/// opposite signs on the two sides of the bipartition.
BipartiteDemoResult run_bipartite_demo(const BipartiteDemoOptions& opts);

struct SuiteOptions {
  std::uint64_t seed = 0;
  /// Size of one extra monotonicity instance; n*d above the assembly limit
  /// raises a resource error.
  std::optional<std::pair<Eigen::Index, Eigen::Index>> monotonicity_size;
  /// Replaces energy_gradient with its negation to exercise failure reporting.
  bool inject_gradient_fault = false;
};

std::vector<CheckReport> run_suite(const SuiteOptions& opts);

void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace gradflow
