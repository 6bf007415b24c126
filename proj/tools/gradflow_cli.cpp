// Command-line driver: run a config, the bipartite demo, the check suite, or
// replay a saved witness.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gradflow/errors.hpp"
#include "gradflow/experiment.hpp"

using namespace gradflow;

namespace {

std::uint64_t seed_with_override(std::uint64_t seed) {
  if (const char* env = std::getenv("GEL_SEED"); env && *env) return parse_seed(env);
  return seed;
}

int cmd_run(const std::string& config_path) {
  ExperimentConfig cfg = load_config(config_path);
  apply_seed_override(cfg);
  const ExperimentResult res = run_experiment(cfg);
  std::cout << res.report;
  return 0;
}

int cmd_bipartite(BipartiteDemoOptions opts) {
  opts.seed = seed_with_override(opts.seed);
  const BipartiteDemoResult res = run_bipartite_demo(opts);
  std::cout << res.report;
  return res.passed ? 0 : 1;
}

int cmd_suite(SuiteOptions opts, const std::string& witness_dir) {
  opts.seed = seed_with_override(opts.seed);
  const auto reports = run_suite(opts);
  int failed = 0;
  int index = 0;
  for (const auto& r : reports) {
    ++index;
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " max_error=" << r.max_error
              << " tolerance=" << r.tolerance;
    if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
    std::cout << "\n";
    if (r.passed) continue;
    ++failed;
    if (r.witness) {
      const std::filesystem::path file =
          std::filesystem::path(witness_dir) / (std::to_string(index) + "_" + r.name + ".witness");
      write_text_file(file, r.witness->serialize());
      std::cout << "  witness: " << file.string() << "\n";
    }
  }
  std::cout << reports.size() - static_cast<std::size_t>(failed) << "/" << reports.size() << " checks passed\n";
  return failed == 0 ? 0 : 1;
}

int cmd_replay(const std::string& witness_path) {
  std::ifstream in(witness_path);
  if (!in) fail(ErrorKind::IO, "cannot open witness " + witness_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const CheckReport r = replay_witness(Witness::parse(buf.str()));
  std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " max_error=" << r.max_error
            << " tolerance=" << r.tolerance << "\n";
  return r.passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph gradient-flow dynamics: experiments, predictions and checks"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required();

  BipartiteDemoOptions demo;
  std::string out_prefix;
  auto* bip = app.add_subcommand("bipartite", "Gradient flow against heat diffusion on K_{a,b}");
  bip->add_option("a", demo.a, "Size of the first side")->required()->check(CLI::PositiveNumber);
  bip->add_option("b", demo.b, "Size of the second side")->required()->check(CLI::PositiveNumber);
  bip->add_option("--tau", demo.tau, "Step size")->check(CLI::PositiveNumber);
  bip->add_option("--steps", demo.steps, "Number of steps")->check(CLI::NonNegativeNumber);
  bip->add_option("--seed", demo.seed, "Seed of the random initial features");
  bip->add_option("--weight", demo.weight, "Channel-mixing weight of the gradient flow");
  bip->add_option("--out", out_prefix, "Prefix for the svg, report and csv outputs");

  SuiteOptions suite;
  std::string witness_dir = "witnesses";
  std::vector<Eigen::Index> mono_size;
  auto* sui = app.add_subcommand("suite", "Run every verification check");
  sui->add_option("--seed", suite.seed, "Seed of the random instances");
  sui->add_option("--witness-dir", witness_dir, "Directory for witnesses of failed checks");
  sui->add_option("--monotonicity-size", mono_size, "Extra monotonicity instance: nodes width")
      ->expected(2);
  sui->add_flag("--inject-gradient-fault", suite.inject_gradient_fault,
                "Negate the analytic gradient to exercise failure reporting");

  std::string witness_path;
  auto* rep = app.add_subcommand("replay", "Rerun the check recorded in a witness file");
  rep->add_option("witness", witness_path, "Witness file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*bip) {
      demo.output_prefix = out_prefix;
      return cmd_bipartite(demo);
    }
    if (*sui) {
      if (mono_size.size() == 2) suite.monotonicity_size = std::make_pair(mono_size[0], mono_size[1]);
      return cmd_suite(suite, witness_dir);
    }
    if (*rep) return cmd_replay(witness_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
