#include <array>
#include <cmath>
#include <limits>

#include "gradflow/errors.hpp"
#include "gradflow/experiment.hpp"

namespace gradflow {

namespace {

CheckReport value_check(const std::string& name, double actual, double expected, double tol) {
  CheckReport r;
  r.name = name;
  r.tolerance = tol;
  r.max_error = std::abs(actual - expected);
  r.passed = r.max_error <= tol;
  return r;
}

CheckReport vector_check(const std::string& name, const Vector& actual, const Vector& expected, double tol) {
  CheckReport r;
  r.name = name;
  r.tolerance = tol;
  r.max_error = actual.size() == expected.size() ? (actual - expected).cwiseAbs().maxCoeff()
                                                 : std::numeric_limits<double>::infinity();
  r.passed = r.max_error <= tol;
  return r;
}

WeightSet random_weights(Sampler& s, Eigen::Index d, bool with_source) {
  WeightSet w = WeightSet::zeros(d).with_W(s.symmetric(d)).with_Omega(s.symmetric(d));
  if (with_source) w.Wtilde = s.gaussian(d, d);
  return w;
}

Graph random_graph(Sampler& s, std::optional<bool> bipartite = std::nullopt) {
  const auto n = static_cast<std::size_t>(s.integer(6, 18));
  return s.connected_graph(n, s.uniform(0.25, 0.6), bipartite);
}

/// Runs the plain gradient flow until the dominant block has separated and
/// compares the terminal direction and Rayleigh quotient with the prediction.
CheckReport regime_check(const std::string& name, const GraphOperators& ops, const Matrix& W, double tau,
                         const Matrix& F0, double target_rq) {
  ModelSpec spec;
  spec.tau = tau;
  spec.weights = WeightSet::zeros(W.rows()).with_W(W);
  const ProfilePrediction p = asymptotic_profile(spec, ops, F0);
  const Trajectory t = run_trajectory(spec, ops, F0, 4000);
  CheckReport r;
  r.name = name;
  r.tolerance = 1e-6;
  r.max_error = std::abs(t.records.back().rayleigh_quotient - target_rq);
  const double dist = direction_distance(t.terminal.direction, p.direction);
  r.passed = r.max_error <= r.tolerance && dist <= 1e-5;
  r.detail = regime_name(p.regime) + " direction distance " + std::to_string(dist);
  return r;
}

}  // namespace

std::vector<CheckReport> run_suite(const SuiteOptions& opts) {
  std::vector<CheckReport> out;
  Sampler s(opts.seed);

  {
    const GraphOperators k2(complete_bipartite(1, 1));
    out.push_back(vector_check("spectrum_k2", k2.laplacian_spectrum().values, Vector{{0.0, 2.0}}, 1e-12));
    const GraphOperators k22(complete_bipartite(2, 2));
    out.push_back(
        vector_check("spectrum_k22", k22.laplacian_spectrum().values, Vector{{0.0, 1.0, 1.0, 2.0}}, 1e-12));
    const GraphOperators c3(cycle(3));
    out.push_back(value_check("adjacency_cycle3", c3.adjacency()(0, 1), 0.5, 1e-15));
    out.push_back(value_check("lambda_max_cycle3", c3.laplacian_spectrum().values(2), 1.5, 1e-12));
  }

  for (int k = 0; k < 8; ++k) {
    const GraphOperators ops(random_graph(s));
    const Eigen::Index d = s.integer(1, 5);
    const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
    const WeightSet w = random_weights(s, d, true);
    const Matrix F = s.gaussian(n, d);
    const Matrix F0 = s.gaussian(n, d);
    out.push_back(kronecker_energy_check(ops, F, F0, w));
    GradientFn grad;
    if (opts.inject_gradient_fault) {
      grad = [](const GraphOperators& o, const Matrix& X, const Matrix& X0, const WeightSet& ws) {
        return Matrix(-energy_gradient(o, X, X0, ws));
      };
    }
    CheckReport fd = gradient_fd_check(ops, F, F0, w, 1e-5, grad);
    if (fd.witness && opts.inject_gradient_fault) fd.witness->labels["gradient"] = "sign_flipped";
    out.push_back(fd);
    out.push_back(filter_equivalence_check(ops, w.W, s.uniform(0.1, 1.0), 2, s.engine()()));
  }

  {
    const GraphOperators ops(random_graph(s));
    const Eigen::Index d = 3;
    const Matrix omega = s.symmetric(d);
    const double asym = field_jacobian_asymmetry(ops, omega, s.gaussian(d, d));
    CheckReport r = value_check("curl_asymmetric_detected", asym > 1e-6 ? 0.0 : 1.0, 0.0, 0.0);
    r.max_error = asym;
    out.push_back(r);
    out.push_back(value_check("curl_symmetric_zero", field_jacobian_asymmetry(ops, omega, s.symmetric(d)), 0.0, 1e-8));
  }

  for (const auto& sigma : {Activation::relu(), Activation::tanh()}) {
    for (int k = 0; k < 2; ++k) {
      const GraphOperators ops(random_graph(s));
      const Eigen::Index d = s.integer(1, 4);
      ModelSpec spec;
      spec.variant = Variant::GradientFlowNonlinear;
      spec.sigma = sigma;
      spec.tau = 0.5;
      spec.weights = random_weights(s, d, true);
      const auto rep = monotonicity_check(spec, ops, s.gaussian(static_cast<Eigen::Index>(ops.num_nodes()), d), 200);
      out.push_back(rep.proxy);
      out.back().name += "_" + sigma.name();
      out.push_back(rep.discrete);
      out.back().name += "_" + sigma.name();
    }
  }
  if (opts.monotonicity_size) {
    const auto [n, d] = *opts.monotonicity_size;
    if (n * d > kMaxAssembly) {
      fail(ErrorKind::Resource, "monotonicity instance n*d = " + std::to_string(n * d) +
                                    " exceeds the assembly limit " + std::to_string(kMaxAssembly));
    }
    const GraphOperators ops(s.connected_graph(static_cast<std::size_t>(n), std::min(1.0, 8.0 / n)));
    ModelSpec spec;
    spec.variant = Variant::GradientFlowNonlinear;
    spec.sigma = Activation::relu();
    spec.weights = random_weights(s, d, false);
    const auto rep = monotonicity_check(spec, ops, s.gaussian(n, d), 50);
    out.push_back(rep.proxy);
    out.push_back(rep.discrete);
  }

  for (int k = 0; k < 6; ++k) {
    const GraphOperators ops(random_graph(s));
    const Eigen::Index d = s.integer(1, 4);
    const Matrix W = s.symmetric(d);
    const double tau = std::array{0.25, 0.5, 1.0}[k % 3];
    const int m = s.integer(1, 100);
    const Matrix F0 = s.gaussian(static_cast<Eigen::Index>(ops.num_nodes()), d);
    ModelSpec spec;
    spec.tau = tau;
    spec.weights = WeightSet::zeros(d).with_W(W);
    const auto traj = run_trajectory(spec, ops, F0, m);
    const auto closed = closed_form_features(ops, spec.weights.W, tau, m, F0);
    CheckReport r;
    r.name = "closed_form";
    r.tolerance = 1e-10;
    r.max_error = (traj.terminal.direction - closed.direction).cwiseAbs().maxCoeff();
    const double log_err = std::abs(traj.terminal.log_scale - closed.log_scale);
    r.passed = r.max_error <= r.tolerance && log_err <= 1e-8;
    r.detail = "log_scale error " + std::to_string(log_err);
    if (!r.passed) {
      Witness wit;
      wit.check = "closed_form";
      wit.graph = ops.graph();
      wit.matrices["W"] = spec.weights.W;
      wit.matrices["F0"] = F0;
      wit.params["tau"] = tau;
      wit.params["steps"] = m;
      r.witness = wit;
    }
    out.push_back(r);
  }

  // Regime realization: K_{4,4} and cycle(5) with hand-picked spectra.
  {
    const GraphOperators kb(complete_bipartite(4, 4));
    const Matrix F0 = s.gaussian(8, 2);
    out.push_back(regime_check("regime_hfd_k44", kb, Matrix(Vector{{-1.0, 0.3}}.asDiagonal()), 0.5, F0, 2.0));
    out.push_back(regime_check("regime_lfd_k44", kb, Matrix(Vector{{-0.2, 0.8}}.asDiagonal()), 0.5, F0, 0.0));
    const GraphOperators c5(cycle(5));
    const double lmax = c5.laplacian_spectrum().values(4);
    const Matrix G0 = s.gaussian(5, 2);
    out.push_back(regime_check("regime_hfd_cycle5", c5, Matrix(Vector{{-1.0, 0.1}}.asDiagonal()), 0.5, G0, lmax));
    out.push_back(regime_check("regime_lfd_cycle5", c5, Matrix(Vector{{-0.5, 1.0}}.asDiagonal()), 0.5, G0, 0.0));

    ModelSpec nr;
    nr.variant = Variant::NoResidual;
    nr.tau = 1.0;
    nr.weights = WeightSet::zeros(2).with_W(Matrix(Vector{{2.0, -1.0}}.asDiagonal()));
    const Trajectory t = run_trajectory(nr, c5, G0, 300);
    out.push_back(value_check("no_residual_cycle5", t.records.back().rayleigh_quotient, 0.0, 1e-6));
  }

  {
    const GraphOperators k2(complete_bipartite(1, 1));
    const auto rates = convergence_rates(k2, Matrix::Constant(1, 1, -1.0), 0.5);
    out.push_back(value_check("rates_k2_epsilon", rates.epsilon, 2.0, 1e-12));
    out.push_back(value_check("rates_k2_delta", rates.delta, -1.0, 1e-12));
    out.push_back(value_check("rates_k2_ratio", rates.contraction_ratio, 1.0 / 3.0, 1e-12));
  }

  {
    const auto demo = run_bipartite_demo({});
    CheckReport r;
    r.name = "bipartite_demo_k55";
    r.passed = demo.passed;
    r.max_error = std::abs(demo.gradient_flow.records.back().rayleigh_quotient - 2.0);
    r.tolerance = 1e-6;
    for (const auto& f : demo.failures) r.detail += f + "; ";
    out.push_back(r);
  }
  return out;
}

}  // namespace gradflow
