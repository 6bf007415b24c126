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

Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }
Matrix diag(std::initializer_list<double> v) { return col(v).col(0).asDiagonal(); }

ModelSpec spec_for(Variant v, const Matrix& W, double tau) {
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

TEST_CASE("closed form on K2") {
  const GraphOperators k2(complete_bipartite(1, 1));
  const FeatureState fs = closed_form_features(k2, scalar(-1.0), 0.5, 3, col({1, 0}));
  const Matrix F = fs.features();
  CHECK(F(0, 0) == doctest::Approx(1.75).epsilon(1e-12));
  CHECK(F(1, 0) == doctest::Approx(-1.625).epsilon(1e-12));
  const FeatureState same = closed_form_features(k2, scalar(-1.0), 0.5, 0, col({3, 4}));
  CHECK((same.features() - col({3, 4})).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("closed form handles growth beyond double range") {
  const GraphOperators k2(complete_bipartite(1, 1));
  const FeatureState fs = closed_form_features(k2, scalar(-1.0), 1.0, 5000, col({1, 0}));
  CHECK(fs.log_scale == doctest::Approx(5000 * std::log(2.0) + std::log(std::sqrt(0.5))).epsilon(1e-12));
  CHECK(std::abs(fs.direction(0, 0)) == doctest::Approx(std::sqrt(0.5)));
}

TEST_CASE("closed form equals the assembled power iteration") {
  Sampler s(67);
  for (int k = 0; k < 15; ++k) {
    const GraphOperators ops(s.connected_graph(s.integer(3, 10), 0.5));
    const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
    const Eigen::Index d = s.integer(1, 3);
    const Matrix W = s.symmetric(d);
    const int m = s.integer(0, 30);
    const Matrix F0 = s.gaussian(n, d);
    const Matrix expected = oracle::gradient_flow_power(ops.adjacency(), W, 0.5, m, F0);
    const Matrix got = closed_form_features(ops, W, 0.5, m, F0).features();
    CHECK((got - expected).norm() <= 1e-10 * std::max(1.0, expected.norm()));
  }
}

TEST_CASE("regime classification examples") {
  const GraphOperators k2(complete_bipartite(1, 1));
  const RegimeReport hfd = classify_regime(k2, scalar(-1.0), 0.5);
  CHECK(hfd.regime == Regime::HFD);
  CHECK(hfd.rho_minus == doctest::Approx(1.0));
  CHECK(std::isinf(hfd.step_bound));
  CHECK(hfd.growth == doctest::Approx(1.5));

  const GraphOperators c3(cycle(3));
  CHECK(classify_regime(c3, diag({1, -1}), 0.25).regime == Regime::LFD);
  const RegimeReport bad = classify_regime(c3, scalar(-10.0), 1.0);
  CHECK(bad.regime == Regime::StepSizeViolated);
  CHECK(bad.step_bound == doctest::Approx(4.0));

  CHECK(classify_regime(k2, diag({-1, 1}), 0.5).regime == Regime::Boundary);
  CHECK(classify_regime(k2, scalar(1.0), 0.5).regime == Regime::LFD);
  CHECK(kind_of([] { classify_regime(GraphOperators(Graph(4, {{0, 1}, {2, 3}})), scalar(-1.0), 0.5); }) ==
        ErrorKind::Validation);
}

TEST_CASE("convergence rates") {
  const GraphOperators k2(complete_bipartite(1, 1));
  const ConvergenceRates r = convergence_rates(k2, scalar(-1.0), 0.5);
  CHECK(r.epsilon == doctest::Approx(2.0));
  CHECK(r.delta == doctest::Approx(-1.0));
  CHECK(r.contraction_ratio == doctest::Approx(1.0 / 3.0));
  const GraphOperators k55(complete_bipartite(5, 5));
  CHECK(convergence_rates(k55, scalar(-1.0), 0.5).epsilon == doctest::Approx(1.0));
  CHECK(kind_of([&] { convergence_rates(k2, scalar(1.0), 0.5); }) == ErrorKind::State);
}

TEST_CASE("asymptotic profiles") {
  const GraphOperators k2(complete_bipartite(1, 1));
  const ProfilePrediction lfd = asymptotic_profile(spec_for(Variant::GradientFlow, scalar(1.0), 0.5), k2, col({1, 0}));
  CHECK(lfd.regime == Regime::LFD);
  CHECK(lfd.growth == doctest::Approx(1.5));
  CHECK(direction_distance(lfd.direction, col({1, 1})) < 1e-12);

  const ProfilePrediction hfd = asymptotic_profile(spec_for(Variant::GradientFlow, scalar(-1.0), 0.5), k2, col({1, 0}));
  CHECK(direction_distance(hfd.direction, col({1, -1})) < 1e-12);

  CHECK(kind_of([&] { asymptotic_profile(spec_for(Variant::GradientFlow, scalar(-1.0), 0.5), k2, col({1, 1})); }) ==
        ErrorKind::Degenerate);
  CHECK(kind_of([&] { asymptotic_profile(spec_for(Variant::GradientFlow, diag({-1, 1}), 0.5), k2, Matrix::Ones(2, 2)); }) ==
        ErrorKind::NoPrediction);
  CHECK(kind_of([&] { asymptotic_profile(spec_for(Variant::NoResidual, scalar(1.0), 1.0), k2, col({1, 0})); }) ==
        ErrorKind::Hypothesis);
  ModelSpec heat;
  heat.variant = Variant::Heat;
  CHECK(kind_of([&] { asymptotic_profile(heat, k2, col({1, 0})); }) == ErrorKind::Config);
  ModelSpec with_omega = spec_for(Variant::GradientFlow, scalar(-1.0), 0.5);
  with_omega.weights.Omega = scalar(0.2);
  CHECK(kind_of([&] { asymptotic_profile(with_omega, k2, col({1, 0})); }) == ErrorKind::Hypothesis);
}

TEST_CASE("no-residual profile on a non-bipartite graph") {
  const GraphOperators c5(cycle(5));
  Sampler s(71);
  const Matrix F0 = s.gaussian(5, 2);
  const ModelSpec spec = spec_for(Variant::NoResidual, diag({2, -1}), 1.0);
  const ProfilePrediction p = asymptotic_profile(spec, c5, F0);
  CHECK_FALSE(p.period_two);
  CHECK(p.growth == doctest::Approx(2.0));
  const Trajectory t = run_trajectory(spec, c5, F0, 300);
  CHECK(t.records.back().rayleigh_quotient <= 1e-6);
  CHECK(direction_distance(t.terminal.direction, p.direction) < 1e-8);
  CHECK(asymptotic_profile(spec_for(Variant::NoResidual, diag({1, -1}), 1.0), c5, F0).period_two);
}

TEST_CASE("GRAND-linear limit uses the self-loop stationary weights") {
  // Path graph: degrees 1,2,2,1 with self-loops give weights 2,3,3,2.
  const GraphOperators p4(path(4));
  ModelSpec spec;
  spec.variant = Variant::GrandLinear;
  spec.tau = 0.5;
  const Matrix F0 = col({1, 0, 0, 0});
  const ProfilePrediction p = asymptotic_profile(spec, p4, F0);
  CHECK(p.limit(0, 0) == doctest::Approx(0.2));
  const Trajectory t = run_trajectory(spec, p4, F0, 400);
  CHECK((t.terminal.features() - p.limit).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("harmonic limit keeps the kernel of W") {
  const GraphOperators c5(cycle(5));
  Sampler s(73);
  const Matrix F0 = s.gaussian(5, 2);
  Matrix W(2, 2);
  W << 1, 1, 0, 0;  // rank one: kernel of W^T W is span(1, -1)
  ModelSpec spec = spec_for(Variant::Harmonic, Matrix::Identity(2, 2), 0.2);
  spec.weights.W = W;
  const ProfilePrediction p = asymptotic_profile(spec, c5, F0);
  const Trajectory t = run_trajectory(spec, c5, F0, 3000);
  CHECK((t.terminal.features() - p.limit).cwiseAbs().maxCoeff() < 1e-9);
  const Vector k = Vector{{1.0, -1.0}} / std::sqrt(2.0);
  CHECK(((p.limit - F0) * k).cwiseAbs().maxCoeff() < 1e-12);
}
