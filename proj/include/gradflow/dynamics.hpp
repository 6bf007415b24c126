#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gradflow/energy.hpp"

namespace gradflow {

enum class Variant {
  GradientFlow,           // F + tau(-F Omega + Abar F W - F0 Wtilde)
  GradientFlowNonlinear,  // F + tau sigma(-F Omega + Abar F W - F0 Wtilde)
  NoResidual,             // tau Abar F W
  Graff,                  // F + tau(-F diag(omega) + Abar F W - beta F0)
  GraffNonlinear,         // F + tau sigma(-F diag(omega) + Abar F W - beta F0)
  Heat,                   // F - tau Delta F
  LabelPropagation,       // F - tau(Delta F + mu(F - F0))
  CGNN,                   // F + tau(-Delta F + F OmegaTilde + F0)
  GrandLinear,            // F - tau(I - D^-1 A)F on the graph with self-loops
  PdeGcnD,                // F - tau Delta F KtK
  Harmonic,               // F - tau Delta F W^T W
  LaplacianOmegaEqW,      // F - tau Delta F W
  DiagNonlinear,          // F + tau sigma(-Delta F diag(omega)), omega <= 0
};

std::string variant_name(Variant v);
/// Accepts the snake_case names printed by variant_name.
Variant parse_variant(const std::string& name);
bool is_nonlinear(Variant v);

/// Pointwise activation with x sigma(x) >= 0.
class Activation {
 public:
  enum class Kind { Identity, Relu, Tanh, TanhRelu, Custom };

  Activation() = default;
  static Activation identity();
  static Activation relu();
  static Activation tanh();
  /// tanh(max(x, 0)).
  static Activation tanh_relu();
  /// User-supplied odd monotone map; the sign condition is checked on use.
  static Activation custom(std::function<double(double)> fn, std::string name = "custom");
  static Activation parse(const std::string& name);

  double operator()(double x) const;
  Matrix apply(const Matrix& m) const;
  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  /// Checks x sigma(x) >= 0 on 10^3 points spread over [-100, 100].
  bool satisfies_sign_condition() const;

 private:
  Kind kind_ = Kind::Identity;
  std::string name_ = "identity";
  std::function<double(double)> fn_;
};

struct ModelSpec {
  Variant variant = Variant::GradientFlow;
  WeightSet weights;
  double tau = 0.5;
  Activation sigma;
  double mu = 0.0;        // LabelPropagation
  Matrix ktk;             // PdeGcnD, must be PSD
  Matrix omega_tilde;     // CGNN
  bool cgnn_source = true;
};

/// Unit-norm direction and log of the true feature norm.
struct FeatureState {
  Matrix direction;
  double log_scale = 0.0;

  static FeatureState from_features(const Matrix& F);
  Matrix features() const;
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  double rayleigh_quotient = 0.0;
  double dirichlet_direction = 0.0;
  double parametric_energy_direction = 0.0;
  double log_scale = 0.0;
};

struct Trajectory {
  std::vector<StepRecord> records;  // step 0 is the input
  FeatureState terminal;
};

/// Weights of the energy each variant is measured against in trajectory
/// diagnostics (the parametric energy it is a discretized flow of, or the
/// Dirichlet energy for the diffusion variants).
WeightSet diagnostic_weights(const ModelSpec& spec, Eigen::Index d);

/// One explicit Euler step. Raises a configuration error for a missing
/// variant parameter and a numeric error if the result is not finite.
Matrix step_model(const ModelSpec& spec, const GraphOperators& ops, const Matrix& F, const Matrix& F0);

using StepObserver = std::function<void(int step, const FeatureState& state)>;

/// Runs m steps from F0. Linear variants are renormalized every step (the
/// source is rescaled alongside, which keeps affine variants exact); the
/// nonlinear variants are never renormalized.
Trajectory run_trajectory(const ModelSpec& spec, const GraphOperators& ops, const Matrix& F0, int m,
                          const StepObserver& observer = {});

/// F + tau Abar F W evaluated in the eigenbasis of W.
Matrix spectral_filter_step(const GraphOperators& ops, const Matrix& W, const Matrix& F, double tau);

}  // namespace gradflow
