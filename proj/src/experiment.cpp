#include "gradflow/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gradflow/errors.hpp"
#include "gradflow/plot.hpp"

namespace gradflow {

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g10(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Series rayleigh_series(const std::string& label, const Trajectory& t) {
  Series s;
  s.label = label;
  for (const auto& r : t.records) {
    s.x.push_back(static_cast<double>(r.step));
    s.y.push_back(r.rayleigh_quotient);
  }
  return s;
}

bool weights_are_pure_W(const WeightSet& w, Eigen::Index d) {
  const WeightSet r = w.resolved(d);
  return r.Omega.cwiseAbs().maxCoeff() == 0.0 && r.Wtilde.cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IO, "cannot write " + path.string());
  out << contents;
  if (!out) fail(ErrorKind::IO, "write to " + path.string() + " failed");
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream out;
  out << "step,time,rayleigh_quotient,dirichlet_direction,parametric_energy_direction,log_scale\n";
  for (const auto& r : t.records) {
    out << r.step << "," << g17(r.time) << "," << g17(r.rayleigh_quotient) << "," << g17(r.dirichlet_direction)
        << "," << g17(r.parametric_energy_direction) << "," << g17(r.log_scale) << "\n";
  }
  return out.str();
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const GraphOperators ops(resolve_graph(cfg));
  require_connected(ops);
  const Matrix F0 = initial_features(cfg, ops.num_nodes());
  const ModelSpec& spec = cfg.model;
  const Eigen::Index d = F0.cols();

  ExperimentResult res;
  res.trajectory = run_trajectory(spec, ops, F0, cfg.steps);
  const FeatureState& last = res.trajectory.terminal;
  const double lambda_max = ops.laplacian_spectrum().values.maxCoeff();

  auto try_profile = [&](bool compare_limit) {
    try {
      res.profile = asymptotic_profile(spec, ops, F0);
      if (compare_limit) {
        res.profile_error = (last.features() - res.profile->limit).norm();
      } else {
        res.profile_error = direction_distance(last.direction, res.profile->direction);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Degenerate && e.kind() != ErrorKind::NoPrediction) throw;
      res.notes.push_back(std::string("no profile prediction: ") + e.what());
    }
  };

  switch (spec.variant) {
    case Variant::GradientFlow:
      if (weights_are_pure_W(spec.weights, d)) {
        res.regime = classify_regime(ops, spec.weights.resolved(d).W, spec.tau);
        if (res.regime->regime == Regime::HFD) res.rates = convergence_rates(ops, spec.weights.W, spec.tau);
        if (!res.regime->note.empty()) res.notes.push_back(res.regime->note);
        try_profile(false);
      } else {
        res.notes.push_back("regime prediction covers Omega = Wtilde = 0 only");
      }
      break;
    case Variant::NoResidual:
      if (ops.checks().bipartite) {
        res.notes.push_back(
            "hypothesis violation: the no-residual result needs a non-bipartite graph; no regime claim");
      } else {
        try_profile(false);
        if (res.profile && res.profile->period_two) {
          res.notes.push_back("dominant channels have both signs; direction alternates with period two");
        }
      }
      break;
    case Variant::GrandLinear:
    case Variant::Harmonic:
      try_profile(true);
      break;
    case Variant::LaplacianOmegaEqW: {
      const double mu0 = spectral_decomposition(spec.weights.resolved(d).W).values(0);
      res.notes.push_back(mu0 < 0.0 ? "W has a negative eigenvalue: HFD expected"
                                    : "W is positive semidefinite: LFD expected");
      break;
    }
    default:
      res.notes.push_back("no closed-form regime prediction for variant " + variant_name(spec.variant));
  }

  std::ostringstream rep;
  const auto& g = ops.graph();
  rep << "variant: " << variant_name(spec.variant) << "\n";
  rep << "graph: nodes " << g.num_nodes() << " edges " << g.num_edges() << " bipartite "
      << (ops.checks().bipartite ? "yes" : "no") << "\n";
  rep << "lambda_max: " << g10(lambda_max) << "\n";
  rep << "tau: " << g10(spec.tau) << "\n";
  rep << "steps: " << cfg.steps << "\n";
  rep << "seed: " << cfg.seed << "\n";
  rep << "final_rayleigh_quotient: " << g10(res.trajectory.records.back().rayleigh_quotient) << "\n";
  rep << "final_log_scale: " << g10(last.log_scale) << "\n";
  if (res.trajectory.records.size() > 1) {
    const auto& recs = res.trajectory.records;
    rep << "observed_log_growth_per_step: " << g10(recs.back().log_scale - recs[recs.size() - 2].log_scale)
        << "\n";
  }
  if (res.regime) {
    const auto& r = *res.regime;
    rep << "regime: " << regime_name(r.regime) << "\n";
    rep << "rho_minus: " << g10(r.rho_minus) << "\n";
    rep << "mu_top: " << g10(r.mu_top) << "\n";
    rep << "mu_bottom: " << g10(r.mu_bottom) << "\n";
    rep << "step_bound: " << g10(r.step_bound) << "\n";
    rep << "predicted_log_growth_per_step: " << g10(std::log(r.growth)) << "\n";
  }
  if (res.rates) {
    rep << "delta: " << g10(res.rates->delta) << "\n";
    rep << "epsilon: " << g10(res.rates->epsilon) << "\n";
    rep << "contraction_ratio: " << g10(res.rates->contraction_ratio) << "\n";
  }
  if (res.profile) {
    rep << "profile: " << res.profile->description << "\n";
    rep << "profile_regime: " << regime_name(res.profile->regime) << "\n";
  }
  if (res.profile_error) rep << "profile_error: " << g10(*res.profile_error) << "\n";
  for (const auto& note : res.notes) rep << "note: " << note << "\n";
  res.report = rep.str();

  if (!cfg.csv.empty()) write_text_file(cfg.csv, trajectory_csv(res.trajectory));
  if (!cfg.svg.empty()) {
    write_text_file(cfg.svg, line_chart_svg({rayleigh_series(variant_name(spec.variant), res.trajectory)},
                                            lambda_max, "lambda_max = " + g10(lambda_max),
                                            "Rayleigh quotient", "step", "Rayleigh quotient"));
  }
  if (!cfg.report.empty()) write_text_file(cfg.report, res.report);
  return res;
}

BipartiteDemoResult run_bipartite_demo(const BipartiteDemoOptions& opts) {
  const GraphOperators ops(complete_bipartite(opts.a, opts.b));
  const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
  Sampler sampler(opts.seed);
  const Matrix F0 = sampler.gaussian(n, 1);

  ModelSpec flow;
  flow.variant = Variant::GradientFlow;
  flow.tau = opts.tau;
  flow.weights = WeightSet::zeros(1).with_W(Matrix::Constant(1, 1, opts.weight));
  ModelSpec heat;
  heat.variant = Variant::Heat;
  heat.tau = opts.tau;

  BipartiteDemoResult res;
  res.regime = classify_regime(ops, flow.weights.W, opts.tau);
  res.gradient_flow = run_trajectory(flow, ops, F0, opts.steps);
  res.heat = run_trajectory(heat, ops, F0, opts.steps);
  const double rq_flow = res.gradient_flow.records.back().rayleigh_quotient;
  const double rq_heat = res.heat.records.back().rayleigh_quotient;

  std::ostringstream rep;
  rep << "graph: complete_bipartite(" << opts.a << "," << opts.b << ")\n";
  rep << "tau: " << g10(opts.tau) << "\nsteps: " << opts.steps << "\nseed: " << opts.seed << "\n";
  rep << "weight: " << g10(opts.weight) << "\n";
  rep << "regime: " << regime_name(res.regime.regime) << "\n";
  rep << "gradient_flow_final_rq: " << g10(rq_flow) << "\n";
  rep << "heat_final_rq: " << g10(rq_heat) << "\n";

  if (rq_heat > 1e-6) res.failures.push_back("(ii) heat Rayleigh quotient " + g10(rq_heat) + " > 1e-6");
  if (res.regime.regime == Regime::HFD) {
    if (std::abs(rq_flow - 2.0) > 1e-6) {
      res.failures.push_back("(i) gradient-flow Rayleigh quotient " + g10(rq_flow) + " not within 1e-6 of 2");
    }
    const Matrix& dir = res.gradient_flow.terminal.direction;
    const auto& sides = ops.checks().sides;
    const double ref = dir(0, 0);
    bool separated = std::abs(ref) > 1e-8;
    for (Eigen::Index i = 0; i < n && separated; ++i) {
      const double expected = sides[i] == sides[0] ? 1.0 : -1.0;
      separated = dir(i, 0) * ref * expected > 0.0 && std::abs(dir(i, 0)) > 1e-8;
    }
    if (!separated) res.failures.push_back("(iii) the two sides do not carry opposite signs");
    rep << "sign_separation: " << (separated ? "yes" : "no") << "\n";
  } else {
    rep << "note: regime " << regime_name(res.regime.regime)
        << " (step bound " << g10(res.regime.step_bound) << "); no gradient-flow assertion\n";
  }
  res.passed = res.failures.empty();
  for (const auto& f : res.failures) rep << "failed: " << f << "\n";
  rep << "result: " << (res.passed ? "pass" : "fail") << "\n";
  res.report = rep.str();
  res.svg = line_chart_svg({rayleigh_series("gradient flow", res.gradient_flow), rayleigh_series("heat", res.heat)},
                           2.0, "lambda_max = 2", "Rayleigh quotient on K(" + std::to_string(opts.a) + "," +
                                                      std::to_string(opts.b) + ")",
                           "step", "Rayleigh quotient");

  if (!opts.output_prefix.empty()) {
    const std::string p = opts.output_prefix.string();
    write_text_file(p + ".svg", res.svg);
    write_text_file(p + "_report.txt", res.report);
    write_text_file(p + "_gradient_flow.csv", trajectory_csv(res.gradient_flow));
    write_text_file(p + "_heat.csv", trajectory_csv(res.heat));
  }
  return res;
}

}  // namespace gradflow
