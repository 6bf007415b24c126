#include "gradflow/predictor.hpp"

#include <cmath>
#include <limits>

#include "gradflow/errors.hpp"

namespace gradflow {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::HFD: return "HFD";
    case Regime::LFD: return "LFD";
    case Regime::Boundary: return "Boundary";
    case Regime::StepSizeViolated: return "StepSizeViolated";
  }
  return "unknown";
}

namespace {

void check_inputs(const GraphOperators& ops, const Matrix& W, double tau) {
  require_symmetric(W, "W");
  if (W.size() == 0) fail(ErrorKind::Validation, "W is empty");
  if (!(tau > 0.0) || !std::isfinite(tau)) fail(ErrorKind::Validation, "tau must be positive");
  (void)ops;
}

bool ties(double a, double b) { return std::abs(a - b) <= kTieTolerance; }

Matrix project(const SpectralPair& lap, const SpectralPair& wsp, const Matrix& F0,
               const std::function<bool(Eigen::Index, Eigen::Index)>& keep) {
  Matrix c = lap.vectors.transpose() * F0 * wsp.vectors;
  for (Eigen::Index l = 0; l < c.rows(); ++l)
    for (Eigen::Index r = 0; r < c.cols(); ++r)
      if (!keep(l, r)) c(l, r) = 0.0;
  return lap.vectors * c * wsp.vectors.transpose();
}

ProfilePrediction from_projection(const Matrix& p, const Matrix& F0, double growth, Regime regime,
                                  std::string description) {
  const double norm = p.norm();
  if (norm < 1e-10 * F0.norm()) {
    fail(ErrorKind::Degenerate, "input has no component in the dominant eigenspace");
  }
  ProfilePrediction out;
  out.direction = p / norm;
  out.growth = growth;
  out.regime = regime;
  out.description = std::move(description);
  return out;
}

}  // namespace

FeatureState closed_form_features(const GraphOperators& ops, const Matrix& W, double tau, int m,
                                  const Matrix& F0) {
  check_inputs(ops, W, tau);
  if (m < 0) fail(ErrorKind::Validation, "step count must be non-negative");
  if (F0.rows() != static_cast<Eigen::Index>(ops.num_nodes()) || F0.cols() != W.rows()) {
    fail(ErrorKind::Validation, "initial features do not match graph and W");
  }
  if (m == 0) return FeatureState::from_features(F0);

  const SpectralPair& lap = ops.laplacian_spectrum();
  const SpectralPair wsp = spectral_decomposition(W);
  const Matrix c = lap.vectors.transpose() * F0 * wsp.vectors;
  const double neg_inf = -std::numeric_limits<double>::infinity();
  Matrix logmag = Matrix::Constant(c.rows(), c.cols(), neg_inf);
  Matrix sign = Matrix::Zero(c.rows(), c.cols());
  double top = neg_inf;
  for (Eigen::Index l = 0; l < c.rows(); ++l) {
    for (Eigen::Index r = 0; r < c.cols(); ++r) {
      const double g = 1.0 + tau * wsp.values(r) * (1.0 - lap.values(l));
      if (c(l, r) == 0.0 || g == 0.0) continue;
      logmag(l, r) = std::log(std::abs(c(l, r))) + m * std::log(std::abs(g));
      const bool flip = g < 0.0 && (m % 2 == 1);
      sign(l, r) = (c(l, r) < 0.0) != flip ? -1.0 : 1.0;
      top = std::max(top, logmag(l, r));
    }
  }
  if (top == neg_inf) fail(ErrorKind::Numeric, "every mode vanished");
  Matrix scaled = Matrix::Zero(c.rows(), c.cols());
  for (Eigen::Index l = 0; l < c.rows(); ++l)
    for (Eigen::Index r = 0; r < c.cols(); ++r)
      if (sign(l, r) != 0.0) scaled(l, r) = sign(l, r) * std::exp(logmag(l, r) - top);
  const Matrix F = lap.vectors * scaled * wsp.vectors.transpose();
  FeatureState out = FeatureState::from_features(F);
  out.log_scale += top;
  return out;
}

RegimeReport classify_regime(const GraphOperators& ops, const Matrix& W, double tau) {
  check_inputs(ops, W, tau);
  require_connected(ops);
  const SpectralPair wsp = spectral_decomposition(W);
  const Vector& lambda = ops.laplacian_spectrum().values;

  RegimeReport r;
  r.lambda_max = lambda(lambda.size() - 1);
  r.mu_bottom = wsp.values(0);
  r.mu_top = wsp.values(wsp.values.size() - 1);
  r.rho_minus = std::max(-r.mu_bottom, 0.0) * (r.lambda_max - 1.0);
  r.step_bound = (2.0 - r.lambda_max <= kTieTolerance)
                     ? std::numeric_limits<double>::infinity()
                     : 2.0 / (tau * (2.0 - r.lambda_max));

  if (std::abs(r.rho_minus - r.mu_top) <= kTieTolerance) {
    r.regime = Regime::Boundary;
    r.growth = 1.0 + tau * r.mu_top;
    r.note = "repulsive and attractive rates tie; no dominant frequency";
  } else if (r.rho_minus > r.mu_top) {
    r.growth = 1.0 + tau * r.rho_minus;
    if (std::abs(r.mu_bottom) < r.step_bound) {
      r.regime = Regime::HFD;
    } else {
      r.regime = Regime::StepSizeViolated;
      r.note = "|mu_0| exceeds the step-size bound 2 / (tau (2 - lambda_max))";
    }
  } else {
    r.growth = 1.0 + tau * r.mu_top;
    // A large negative mu_0 can make the sign-alternating mode at lambda = 0 dominate.
    if (r.mu_bottom >= 0.0 || std::abs(1.0 + tau * r.mu_bottom) < r.growth) {
      r.regime = Regime::LFD;
    } else {
      r.regime = Regime::StepSizeViolated;
      r.note = "|1 + tau mu_0| exceeds 1 + tau mu_top";
    }
  }
  return r;
}

ConvergenceRates convergence_rates(const GraphOperators& ops, const Matrix& W, double tau) {
  const RegimeReport reg = classify_regime(ops, W, tau);
  if (reg.regime != Regime::HFD) {
    fail(ErrorKind::State, "convergence rates need an HFD regime, got " + regime_name(reg.regime));
  }
  const Vector& lambda = ops.laplacian_spectrum().values;
  const Vector mu = spectral_decomposition(W).values;
  const double abs_mu0 = std::abs(reg.mu_bottom);
  const double spread = reg.lambda_max - 1.0;

  // Smallest positive eigenvalue of lambda_max I - Delta and of |mu_0| I + W.
  double gap_lap = -1.0;
  for (Eigen::Index l = lambda.size() - 1; l >= 0; --l) {
    if (reg.lambda_max - lambda(l) > kTieTolerance) {
      gap_lap = reg.lambda_max - lambda(l);
      break;
    }
  }
  double gap_w = -1.0;
  for (Eigen::Index r = 0; r < mu.size(); ++r) {
    if (mu(r) - reg.mu_bottom > kTieTolerance) {
      gap_w = mu(r) - reg.mu_bottom;
      break;
    }
  }

  ConvergenceRates out;
  out.delta = std::max(reg.mu_top, abs_mu0 - 2.0 / tau);
  out.epsilon = reg.rho_minus - reg.mu_top;
  if (gap_lap > 0.0) {
    out.delta = std::max(out.delta, reg.rho_minus - abs_mu0 * gap_lap);
    out.epsilon = std::min(out.epsilon, abs_mu0 * gap_lap);
  }
  if (gap_w > 0.0) {
    out.delta = std::max(out.delta, reg.rho_minus - spread * gap_w);
    out.epsilon = std::min(out.epsilon, gap_w * spread);
  }
  out.contraction_ratio = (1.0 + tau * out.delta) / (1.0 + tau * reg.rho_minus);
  return out;
}

ProfilePrediction asymptotic_profile(const ModelSpec& spec, const GraphOperators& ops, const Matrix& F0) {
  const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
  if (F0.rows() != n || F0.cols() == 0) fail(ErrorKind::Validation, "initial features do not match graph");
  require_connected(ops);
  const Eigen::Index d = F0.cols();
  const SpectralPair& lap = ops.laplacian_spectrum();

  switch (spec.variant) {
    case Variant::GradientFlow: {
      if (spec.weights.W.size() == 0) fail(ErrorKind::Config, "gradient_flow requires parameter W");
      const WeightSet w = spec.weights.resolved(d);
      if (w.Omega.cwiseAbs().maxCoeff() != 0.0 || w.Wtilde.cwiseAbs().maxCoeff() != 0.0) {
        fail(ErrorKind::Hypothesis, "profile prediction covers Omega = Wtilde = 0 only");
      }
      const RegimeReport reg = classify_regime(ops, w.W, spec.tau);
      if (reg.regime == Regime::Boundary || reg.regime == Regime::StepSizeViolated) {
        fail(ErrorKind::NoPrediction, "regime is " + regime_name(reg.regime));
      }
      const SpectralPair wsp = spectral_decomposition(w.W);
      if (reg.regime == Regime::HFD) {
        const Matrix p = project(lap, wsp, F0, [&](Eigen::Index l, Eigen::Index r) {
          return ties(lap.values(l), reg.lambda_max) && ties(wsp.values(r), reg.mu_bottom);
        });
        return from_projection(p, F0, reg.growth, Regime::HFD,
                               "highest-frequency eigenspace paired with the most negative channel");
      }
      const Matrix p = project(lap, wsp, F0, [&](Eigen::Index l, Eigen::Index r) {
        return lap.values(l) <= kTieTolerance && ties(wsp.values(r), reg.mu_top);
      });
      return from_projection(p, F0, reg.growth, Regime::LFD,
                             "kernel profile paired with the most positive channel");
    }
    case Variant::NoResidual: {
      if (spec.weights.W.size() == 0) fail(ErrorKind::Config, "no_residual requires parameter W");
      if (ops.checks().bipartite) {
        fail(ErrorKind::Hypothesis, "the no-residual result needs a non-bipartite graph");
      }
      const WeightSet w = spec.weights.resolved(d);
      const SpectralPair wsp = spectral_decomposition(w.W);
      const double top = wsp.values.cwiseAbs().maxCoeff();
      if (top <= 1e-12) fail(ErrorKind::Degenerate, "W is zero");
      bool has_pos = false, has_neg = false;
      for (Eigen::Index r = 0; r < d; ++r) {
        if (ties(std::abs(wsp.values(r)), top)) (wsp.values(r) > 0 ? has_pos : has_neg) = true;
      }
      const Matrix p = project(lap, wsp, F0, [&](Eigen::Index l, Eigen::Index r) {
        return lap.values(l) <= kTieTolerance && ties(std::abs(wsp.values(r)), top);
      });
      ProfilePrediction out = from_projection(p, F0, spec.tau * top, Regime::LFD,
                                              "kernel profile paired with the largest-|mu| channel");
      out.period_two = has_pos && has_neg;
      return out;
    }
    case Variant::GrandLinear: {
      // Stationary distribution of D~^-1 A~ is proportional to d_i + 1; uniform on regular graphs.
      Vector pi(n);
      for (Eigen::Index i = 0; i < n; ++i) pi(i) = static_cast<double>(ops.graph().degrees()[i]) + 1.0;
      pi /= pi.sum();
      const Eigen::RowVectorXd mean = pi.transpose() * F0;
      ProfilePrediction out;
      out.limit = Matrix::Ones(n, 1) * mean;
      const double norm = out.limit.norm();
      if (norm < 1e-10 * F0.norm()) fail(ErrorKind::Degenerate, "weighted channel means are zero");
      out.direction = out.limit / norm;
      out.regime = Regime::LFD;
      out.description = "constant rows equal to the (d_i + 1)-weighted channel means";
      return out;
    }
    case Variant::Harmonic: {
      if (spec.weights.W.size() == 0) fail(ErrorKind::Config, "harmonic requires parameter W");
      const Matrix& W = spec.weights.W;
      if (W.rows() != d || W.cols() != d) fail(ErrorKind::Validation, "W does not match features");
      const SpectralPair gram = spectral_decomposition(W.transpose() * W);
      const double tol = kTieTolerance * std::max(1.0, gram.values.maxCoeff());
      Matrix p_ker = Matrix::Zero(d, d);
      for (Eigen::Index r = 0; r < d; ++r) {
        if (gram.values(r) <= tol) p_ker += gram.vectors.col(r) * gram.vectors.col(r).transpose();
      }
      const Vector phi0 = lap.vectors.col(0);
      ProfilePrediction out;
      out.limit = phi0 * (phi0.transpose() * F0 * (Matrix::Identity(d, d) - p_ker)) + F0 * p_ker;
      const double norm = out.limit.norm();
      if (norm < 1e-10 * F0.norm()) fail(ErrorKind::Degenerate, "harmonic limit is zero");
      out.direction = out.limit / norm;
      out.regime = Regime::LFD;
      out.description = "kernel profile on the range of W^T W plus the input on its kernel";
      return out;
    }
    default:
      fail(ErrorKind::Config, "no asymptotic profile for variant " + variant_name(spec.variant));
  }
}

double direction_distance(const Matrix& a, const Matrix& b) {
  const Matrix ua = a / a.norm();
  const Matrix ub = b / b.norm();
  return std::min((ua - ub).norm(), (ua + ub).norm());
}

}  // namespace gradflow
