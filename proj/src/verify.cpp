#include "gradflow/verify.hpp"

#include <cmath>
#include <sstream>

#include "gradflow/errors.hpp"

namespace gradflow {

namespace {

void check_assembly_size(Eigen::Index n, Eigen::Index d) {
  if (n * d > kMaxAssembly) {
    fail(ErrorKind::Resource, "n*d = " + std::to_string(n * d) + " exceeds the assembly limit " +
                                  std::to_string(kMaxAssembly));
  }
}

Witness base_witness(const std::string& check, const GraphOperators& ops) {
  Witness w;
  w.check = check;
  w.graph = ops.graph();
  return w;
}

void add_weights(Witness& wit, const WeightSet& w) {
  wit.matrices["W"] = w.W;
  wit.matrices["Omega"] = w.Omega;
  wit.matrices["Wtilde"] = w.Wtilde;
  if (w.omega_diag) wit.matrices["omega"] = w.omega_diag->transpose();
  wit.params["beta"] = w.beta;
}

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

}  // namespace

Matrix assembled_energy_operator(const GraphOperators& ops, const WeightSet& w) {
  const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
  const Eigen::Index d = w.W.rows();
  check_assembly_size(n, d);
  return kron(w.Omega, Matrix::Identity(n, n)) - kron(w.W, ops.adjacency());
}

double kronecker_oracle_energy(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                               const WeightSet& w) {
  const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
  if (F.rows() != n || F0.rows() != n || F0.cols() != F.cols()) {
    fail(ErrorKind::Validation, "feature shapes do not match the graph");
  }
  check_assembly_size(n, F.cols());
  const WeightSet r = w.resolved(F.cols());
  const Vector f = vec(F);
  const Vector s = kron(r.Wtilde.transpose(), Matrix::Identity(n, n)) * vec(F0);
  return f.dot(assembled_energy_operator(ops, r) * f + 2.0 * s);
}

CheckReport kronecker_energy_check(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                                   const WeightSet& w) {
  CheckReport rep;
  rep.name = "kronecker_energy";
  rep.tolerance = 1e-10;
  const double oracle = kronecker_oracle_energy(ops, F, F0, w);
  const double trace_form = parametric_energy(ops, F, F0, w);
  rep.max_error = std::abs(oracle - trace_form) / std::max(1.0, std::abs(oracle));
  rep.passed = rep.max_error <= rep.tolerance;
  rep.detail = "oracle " + fmt(oracle) + " trace " + fmt(trace_form);
  if (!rep.passed) {
    Witness wit = base_witness(rep.name, ops);
    add_weights(wit, w.resolved(F.cols()));
    wit.matrices["F"] = F;
    wit.matrices["F0"] = F0;
    rep.witness = wit;
  }
  return rep;
}

CheckReport gradient_fd_check(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                              const WeightSet& w, double h, const GradientFn& gradient) {
  if (!(h >= 1e-7 && h <= 1e-3)) fail(ErrorKind::Validation, "finite-difference step must be in [1e-7, 1e-3]");
  const Matrix analytic = -2.0 * (gradient ? gradient(ops, F, F0, w) : energy_gradient(ops, F, F0, w));
  Matrix numeric(F.rows(), F.cols());
  Matrix probe = F;
  for (Eigen::Index j = 0; j < F.cols(); ++j) {
    for (Eigen::Index i = 0; i < F.rows(); ++i) {
      probe(i, j) = F(i, j) + h;
      const double up = parametric_energy(ops, probe, F0, w);
      probe(i, j) = F(i, j) - h;
      const double down = parametric_energy(ops, probe, F0, w);
      probe(i, j) = F(i, j);
      numeric(i, j) = (up - down) / (2.0 * h);
    }
  }
  CheckReport rep;
  rep.name = "gradient_fd";
  rep.tolerance = 1e-5;
  rep.max_error = (numeric - analytic).cwiseAbs().maxCoeff() / std::max(1.0, analytic.norm());
  rep.passed = rep.max_error <= rep.tolerance;
  if (!rep.passed) {
    Witness wit = base_witness(rep.name, ops);
    add_weights(wit, w.resolved(F.cols()));
    wit.matrices["F"] = F;
    wit.matrices["F0"] = F0;
    wit.params["h"] = h;
    rep.witness = wit;
  }
  return rep;
}

double field_jacobian_asymmetry(const GraphOperators& ops, const Matrix& Omega, const Matrix& W) {
  const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
  const Eigen::Index d = W.rows();
  check_assembly_size(n, d);
  // The field is linear, so its Jacobian columns are the images of basis matrices.
  Matrix jac(n * d, n * d);
  Matrix basis = Matrix::Zero(n, d);
  for (Eigen::Index k = 0; k < n * d; ++k) {
    basis(k % n, k / n) = 1.0;
    jac.col(k) = vec(-basis * Omega + ops.adjacency() * basis * W);
    basis(k % n, k / n) = 0.0;
  }
  return (jac - jac.transpose()).cwiseAbs().maxCoeff();
}

MonotonicityReport monotonicity_check(const ModelSpec& spec, const GraphOperators& ops,
                                      const Matrix& F0, int m) {
  switch (spec.variant) {
    case Variant::GradientFlow:
    case Variant::GradientFlowNonlinear:
    case Variant::Graff:
    case Variant::GraffNonlinear:
      break;
    default:
      fail(ErrorKind::Config, "monotonicity check covers gradient_flow and graff variants only");
  }
  if (is_nonlinear(spec.variant) && !spec.sigma.satisfies_sign_condition()) {
    fail(ErrorKind::Hypothesis, "activation " + spec.sigma.name() + " violates x sigma(x) >= 0");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
  const Eigen::Index d = F0.cols();
  check_assembly_size(n, d);
  const WeightSet energy_w = diagnostic_weights(spec, d);

  MonotonicityReport out;
  const Matrix op = assembled_energy_operator(ops, energy_w);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(op, Eigen::EigenvaluesOnly);
  out.c = std::max(0.0, solver.eigenvalues().maxCoeff());

  // Scale-aware slack: a relative 1e-9 of the energy or of ||F||^2.
  auto slack = [](double e_prev, const Matrix& F) { return 1e-9 * std::max(std::abs(e_prev), F.squaredNorm()); };

  auto run = [&](double tau, bool discrete, CheckReport& rep, double* raw_increase) {
    ModelSpec s = spec;
    s.tau = tau;
    Matrix F = F0;
    double e = parametric_energy(ops, F, F0, energy_w);
    rep.passed = true;
    rep.max_error = 0.0;
    for (int k = 1; k <= m; ++k) {
      const Matrix next = step_model(s, ops, F, F0);
      const double e_next = parametric_energy(ops, next, F0, energy_w);
      double excess = e_next - e;
      if (raw_increase) *raw_increase = std::max(*raw_increase, excess);
      if (discrete) excess -= out.c * (next - F).squaredNorm();
      const double allowed = slack(e, F);
      const double ratio = excess / allowed;
      rep.max_error = std::max(rep.max_error, excess);
      if (excess > allowed && rep.passed) {
        rep.passed = false;
        rep.detail = "step " + std::to_string(k) + " excess " + fmt(excess) + " (ratio " + fmt(ratio) + ")";
      }
      F = next;
      e = e_next;
    }
    if (!rep.passed) {
      Witness wit = base_witness("monotonicity", ops);
      add_weights(wit, spec.weights.resolved(d));
      wit.matrices["F0"] = F0;
      wit.params["tau"] = spec.tau;
      wit.params["steps"] = m;
      wit.labels["variant"] = variant_name(spec.variant);
      wit.labels["sigma"] = spec.sigma.name();
      rep.witness = wit;
    }
  };

  out.proxy.name = "monotonicity_proxy";
  out.proxy.tolerance = 1e-9;
  run(std::min(spec.tau, 1e-3), false, out.proxy, nullptr);
  out.discrete.name = "monotonicity_discrete";
  out.discrete.tolerance = 1e-9;
  out.raw_max_increase = -std::numeric_limits<double>::infinity();
  run(spec.tau, true, out.discrete, &out.raw_max_increase);
  return out;
}

CheckReport filter_equivalence_check(const GraphOperators& ops, const Matrix& W, double tau, int trials,
                                     std::uint64_t seed) {
  Sampler sampler(seed);
  ModelSpec spec;
  spec.variant = Variant::GradientFlow;
  spec.tau = tau;
  spec.weights = WeightSet::zeros(W.rows()).with_W(W);
  const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());

  CheckReport rep;
  rep.name = "filter_equivalence";
  rep.tolerance = 1e-12;
  rep.passed = true;
  for (int t = 0; t < trials; ++t) {
    const Matrix F = sampler.gaussian(n, W.rows());
    const Matrix direct = step_model(spec, ops, F, Matrix::Zero(n, W.rows()));
    const Matrix filtered = spectral_filter_step(ops, spec.weights.W, F, tau);
    const double err = (direct - filtered).cwiseAbs().maxCoeff() / std::max(1.0, direct.cwiseAbs().maxCoeff());
    rep.max_error = std::max(rep.max_error, err);
    if (err > rep.tolerance && rep.passed) {
      rep.passed = false;
      Witness wit = base_witness(rep.name, ops);
      wit.matrices["W"] = spec.weights.W;
      wit.matrices["F"] = F;
      wit.params["tau"] = tau;
      rep.witness = wit;
    }
  }
  return rep;
}

double Sampler::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

int Sampler::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

Matrix Sampler::gaussian(Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng_);
  return m;
}

Matrix Sampler::orthogonal(Eigen::Index d) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(d, d));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k)
    if (r(k, k) < 0) q.col(k) = -q.col(k);
  return q;
}

Matrix Sampler::symmetric_with_spectrum(const Vector& mu) {
  const Matrix q = orthogonal(mu.size());
  return symmetrize(q * mu.asDiagonal() * q.transpose());
}

Matrix Sampler::symmetric(Eigen::Index d) {
  const Matrix g = gaussian(d, d);
  return 0.5 * (g + g.transpose());
}

Graph Sampler::connected_graph(std::size_t n, double p, std::optional<bool> bipartite) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Graph g = erdos_renyi(n, p, rng_());
    if (!bipartite || graph_checks(g).bipartite == *bipartite) return g;
  }
  fail(ErrorKind::Generation, "could not sample a graph with the requested bipartite flag");
}

}  // namespace gradflow
