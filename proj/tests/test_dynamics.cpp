#include <doctest.h>

#include <cmath>

#include "gradflow/errors.hpp"
#include "gradflow/verify.hpp"
#include "support/oracles.hpp"

using namespace gradflow;

namespace {

Matrix col(std::initializer_list<double> v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  Eigen::Index i = 0;
  for (double x : v) m(i++, 0) = x;
  return m;
}

ModelSpec flow(const Matrix& W, double tau, Variant v = Variant::GradientFlow) {
  ModelSpec s;
  s.variant = v;
  s.tau = tau;
  s.weights = WeightSet::zeros(W.rows()).with_W(W);
  return s;
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::State;
}

}  // namespace

TEST_CASE("single steps on K2") {
  const GraphOperators k2(complete_bipartite(1, 1));
  const Matrix zero = col({0, 0});
  const Matrix gf = step_model(flow(Matrix::Constant(1, 1, -1.0), 0.5), k2, col({1, 0}), zero);
  CHECK(gf(0, 0) == doctest::Approx(1.0));
  CHECK(gf(1, 0) == doctest::Approx(-0.5));
  const Matrix nr = step_model(flow(Matrix::Constant(1, 1, 1.0), 1.0, Variant::NoResidual), k2, col({1, 0}), zero);
  CHECK(nr(0, 0) == doctest::Approx(0.0));
  CHECK(nr(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("K2 trajectories separate frequencies") {
  const GraphOperators k2(complete_bipartite(1, 1));
  const Matrix hf = col({1, -1}) / std::sqrt(2.0);
  const Trajectory t = run_trajectory(flow(Matrix::Constant(1, 1, -1.0), 0.5), k2, hf, 50);
  CHECK(t.records.size() == 51);
  CHECK(t.records.back().rayleigh_quotient == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(t.terminal.log_scale == doctest::Approx(50 * std::log(1.5)).epsilon(1e-12));
  CHECK(t.records.back().time == doctest::Approx(25.0));

  const Trajectory lf = run_trajectory(flow(Matrix::Constant(1, 1, 1.0), 0.5), k2, col({1, 0}), 60);
  const Matrix expected = col({1, 1}) / std::sqrt(2.0);
  CHECK((lf.terminal.direction - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("GRAND-linear converges to channel means on cycle(3)") {
  const GraphOperators c3(cycle(3));
  ModelSpec spec;
  spec.variant = Variant::GrandLinear;
  spec.tau = 0.1;
  Matrix F0(3, 2);
  F0 << 1, 0, 2, -1, 6, 4;
  const Trajectory t = run_trajectory(spec, c3, F0, 5000);
  const Matrix F = t.terminal.features();
  const Eigen::RowVectorXd mean = F0.colwise().mean();
  for (Eigen::Index i = 0; i < 3; ++i) CHECK((F.row(i) - mean).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("configuration and numeric errors") {
  const GraphOperators c3(cycle(3));
  const Matrix F = Matrix::Ones(3, 2);
  const Matrix zero = Matrix::Zero(3, 2);
  ModelSpec missing;
  missing.variant = Variant::GradientFlow;
  CHECK(kind_of([&] { step_model(missing, c3, F, zero); }) == ErrorKind::Config);
  ModelSpec graff = flow(Matrix::Identity(2, 2), 0.5, Variant::Graff);
  CHECK(kind_of([&] { step_model(graff, c3, F, zero); }) == ErrorKind::Config);
  ModelSpec pde;
  pde.variant = Variant::PdeGcnD;
  CHECK(kind_of([&] { step_model(pde, c3, F, zero); }) == ErrorKind::Config);
  ModelSpec cgnn;
  cgnn.variant = Variant::CGNN;
  CHECK(kind_of([&] { step_model(cgnn, c3, F, zero); }) == ErrorKind::Config);
  ModelSpec diag;
  diag.variant = Variant::DiagNonlinear;
  diag.weights.omega_diag = Vector{{-1.0, 0.5}};
  CHECK(kind_of([&] { step_model(diag, c3, F, zero); }) == ErrorKind::Validation);

  Matrix bad = F;
  bad(0, 0) = std::nan("");
  CHECK(kind_of([&] { step_model(flow(Matrix::Identity(2, 2), 0.5), c3, bad, zero); }) == ErrorKind::Numeric);

  ModelSpec blowup = flow(Matrix::Identity(1, 1) * 1e6, 1.0, Variant::GradientFlowNonlinear);
  blowup.sigma = Activation::relu();
  try {
    run_trajectory(blowup, c3, Matrix::Ones(3, 1), 200);
    FAIL("expected overflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numeric);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }
}

TEST_CASE("activations") {
  for (const auto& a : {Activation::identity(), Activation::relu(), Activation::tanh(), Activation::tanh_relu()}) {
    CHECK(a.satisfies_sign_condition());
  }
  CHECK(Activation::relu()(-2.0) == 0.0);
  CHECK(Activation::tanh_relu()(1.0) == doctest::Approx(std::tanh(1.0)));
  CHECK(Activation::custom([](double x) { return std::cbrt(x); }).satisfies_sign_condition());
  CHECK_FALSE(Activation::custom([](double x) { return -x; }).satisfies_sign_condition());
  CHECK(Activation::parse("tanh").kind() == Activation::Kind::Tanh);
  CHECK(kind_of([] { Activation::parse("gelu"); }) == ErrorKind::Config);
  CHECK(parse_variant("pde_gcn_d") == Variant::PdeGcnD);
  CHECK(variant_name(Variant::LaplacianOmegaEqW) == "laplacian_omega_eq_w");
}

TEST_CASE("every variant matches its explicit update") {
  Sampler s(53);
  const GraphOperators ops(s.connected_graph(9, 0.5));
  const Eigen::Index n = 9, d = 3;
  const Matrix F = s.gaussian(n, d), F0 = s.gaussian(n, d);
  const Matrix& A = ops.adjacency();
  const Matrix L = Matrix::Identity(n, n) - A;
  const Matrix W = s.symmetric(d), Om = s.symmetric(d), Wt = s.gaussian(d, d);
  const Vector omega = -s.gaussian(d, 1).cwiseAbs();
  const double tau = 0.3;
  auto run = [&](ModelSpec spec) { return step_model(spec, ops, F, F0); };
  auto close = [](const Matrix& a, const Matrix& b) { return (a - b).cwiseAbs().maxCoeff() < 1e-12; };

  ModelSpec gf = flow(W, tau);
  gf.weights.with_Omega(Om).with_Wtilde(Wt);
  CHECK(close(run(gf), F + tau * (-F * Om + A * F * W - F0 * Wt)));
  gf.variant = Variant::GradientFlowNonlinear;
  gf.sigma = Activation::tanh();
  CHECK(close(run(gf), F + tau * (-F * Om + A * F * W - F0 * Wt).array().tanh().matrix()));

  ModelSpec graff = flow(W, tau, Variant::Graff);
  graff.weights.omega_diag = omega;
  graff.weights.beta = 0.7;
  CHECK(close(run(graff), F + tau * (-F * omega.asDiagonal() + A * F * W - 0.7 * F0)));

  ModelSpec heat;
  heat.variant = Variant::Heat;
  heat.tau = tau;
  CHECK(close(run(heat), F - tau * L * F));

  ModelSpec lp;
  lp.variant = Variant::LabelPropagation;
  lp.tau = tau;
  lp.mu = 0.4;
  CHECK(close(run(lp), F - tau * (L * F + 0.4 * (F - F0))));

  ModelSpec cg;
  cg.variant = Variant::CGNN;
  cg.tau = tau;
  cg.omega_tilde = Om;
  CHECK(close(run(cg), F + tau * (-L * F + F * Om + F0)));
  cg.cgnn_source = false;
  CHECK(close(run(cg), F + tau * (-L * F + F * Om)));

  ModelSpec pde;
  pde.variant = Variant::PdeGcnD;
  pde.tau = tau;
  pde.ktk = Wt.transpose() * Wt;
  CHECK(close(run(pde), F - tau * L * F * pde.ktk));

  ModelSpec harm = flow(Wt, tau, Variant::Harmonic);
  harm.weights.W = Wt;
  CHECK(close(run(harm), F - tau * L * F * Wt.transpose() * Wt));

  CHECK(close(run(flow(W, tau, Variant::LaplacianOmegaEqW)), F - tau * L * F * W));

  ModelSpec dn;
  dn.variant = Variant::DiagNonlinear;
  dn.tau = tau;
  dn.sigma = Activation::relu();
  dn.weights.omega_diag = omega;
  CHECK(close(run(dn), F + tau * (-L * F * omega.asDiagonal()).cwiseMax(0.0)));

  // GRAND-linear on the self-loop graph: I - D~^-1 (A + I).
  const Matrix adj = adjacency_matrix(ops.graph()) + Matrix::Identity(n, n);
  const Matrix P = adj.rowwise().sum().cwiseInverse().asDiagonal() * adj;
  ModelSpec grand;
  grand.variant = Variant::GrandLinear;
  grand.tau = tau;
  CHECK(close(run(grand), F - tau * (F - P * F)));
}

TEST_CASE("renormalized trajectory equals unnormalized iteration") {
  Sampler s(59);
  for (int k = 0; k < 10; ++k) {
    const GraphOperators ops(s.connected_graph(s.integer(4, 12), 0.5));
    const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
    const Eigen::Index d = s.integer(1, 3);
    ModelSpec spec = flow(s.symmetric(d), 0.5);
    spec.weights.with_Omega(s.symmetric(d));
    spec.weights.Wtilde = s.gaussian(d, d);
    if (k % 2 == 1) {
      spec.variant = Variant::LabelPropagation;
      spec.mu = 0.3;
    }
    const Matrix F0 = s.gaussian(n, d);
    Matrix raw = F0;
    for (int m = 0; m < 20; ++m) raw = step_model(spec, ops, raw, F0);
    const Trajectory t = run_trajectory(spec, ops, F0, 20);
    CHECK((t.terminal.features() - raw).norm() <= 1e-10 * raw.norm());
    CHECK(t.terminal.direction.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const double lmax = ops.laplacian_spectrum().values.maxCoeff();
    for (const auto& r : t.records) {
      CHECK(r.rayleigh_quotient >= -1e-12);
      CHECK(r.rayleigh_quotient <= lmax + 1e-9);
    }
  }
}

TEST_CASE("spectral filter step equals the direct step") {
  Sampler s(61);
  for (int k = 0; k < 20; ++k) {
    const GraphOperators ops(s.connected_graph(s.integer(3, 15), 0.4));
    const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
    const Eigen::Index d = s.integer(1, 5);
    const Matrix W = s.symmetric(d);
    const double tau = s.uniform(0.05, 1.0);
    const Matrix F = s.gaussian(n, d);
    const Matrix direct = step_model(flow(W, tau), ops, F, Matrix::Zero(n, d));
    CHECK((direct - spectral_filter_step(ops, W, F, tau)).cwiseAbs().maxCoeff() <= 1e-12);
    const Matrix kron_step = oracle::gradient_flow_power(ops.adjacency(), W, tau, 1, F);
    CHECK((direct - kron_step).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
