#pragma once

#include <string>

#include "gradflow/dynamics.hpp"

namespace gradflow {

enum class Regime { HFD, LFD, Boundary, StepSizeViolated };

std::string regime_name(Regime r);

/// Discrete-time regime of F <- F + tau Abar F W (Omega = Wtilde = 0).
struct RegimeReport {
  Regime regime = Regime::Boundary;
  double rho_minus = 0.0;   // max(-mu_0, 0) (lambda_{n-1} - 1)
  double mu_top = 0.0;      // largest eigenvalue of W
  double mu_bottom = 0.0;   // smallest eigenvalue of W
  double lambda_max = 0.0;  // largest eigenvalue of the normalized Laplacian
  double step_bound = 0.0;  // 2 / (tau (2 - lambda_max)); +inf on bipartite graphs
  double growth = 0.0;      // per-step growth of the dominant mode
  std::string note;
};

struct ConvergenceRates {
  double delta = 0.0;
  double epsilon = 0.0;
  /// (1 + tau delta) / (1 + tau rho_minus): bound on the per-step shrinkage
  /// of the non-dominant part relative to the dominant one.
  double contraction_ratio = 0.0;
};

/// Features after m steps, evaluated mode by mode in log-magnitude form.
FeatureState closed_form_features(const GraphOperators& ops, const Matrix& W, double tau, int m,
                                  const Matrix& F0);

RegimeReport classify_regime(const GraphOperators& ops, const Matrix& W, double tau);

/// Requires an HFD regime; raises a state error otherwise.
ConvergenceRates convergence_rates(const GraphOperators& ops, const Matrix& W, double tau);

struct ProfilePrediction {
  Matrix direction;      // unit norm
  double growth = 1.0;   // per-step factor of the dominant block
  Matrix limit;          // true limit for convergent variants, else empty
  /// Dominant block mixes factors of both signs, so the direction alternates
  /// with period two and only the Rayleigh quotient converges.
  bool period_two = false;
  Regime regime = Regime::Boundary;
  std::string description;
};

/// Predicted long-run behaviour for GradientFlow (Omega = Wtilde = 0),
/// NoResidual, GrandLinear and Harmonic.
ProfilePrediction asymptotic_profile(const ModelSpec& spec, const GraphOperators& ops, const Matrix& F0);

/// Distance between two unit directions up to a global sign.
double direction_distance(const Matrix& a, const Matrix& b);

}  // namespace gradflow
