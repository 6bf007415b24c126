#include "gradflow/dynamics.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "gradflow/errors.hpp"

namespace gradflow {

namespace {

constexpr std::array<std::pair<Variant, const char*>, 13> kVariantNames{{
    {Variant::GradientFlow, "gradient_flow"},
    {Variant::GradientFlowNonlinear, "gradient_flow_nonlinear"},
    {Variant::NoResidual, "no_residual"},
    {Variant::Graff, "graff"},
    {Variant::GraffNonlinear, "graff_nonlinear"},
    {Variant::Heat, "heat"},
    {Variant::LabelPropagation, "label_propagation"},
    {Variant::CGNN, "cgnn"},
    {Variant::GrandLinear, "grand_linear"},
    {Variant::PdeGcnD, "pde_gcn_d"},
    {Variant::Harmonic, "harmonic"},
    {Variant::LaplacianOmegaEqW, "laplacian_omega_eq_w"},
    {Variant::DiagNonlinear, "diag_nonlinear"},
}};

bool needs_W(Variant v) {
  switch (v) {
    case Variant::GradientFlow:
    case Variant::GradientFlowNonlinear:
    case Variant::NoResidual:
    case Variant::Graff:
    case Variant::GraffNonlinear:
    case Variant::Harmonic:
    case Variant::LaplacianOmegaEqW:
      return true;
    default:
      return false;
  }
}

void require_param(bool present, Variant v, const char* param) {
  if (!present) {
    fail(ErrorKind::Config, "variant " + variant_name(v) + " requires parameter " + param);
  }
}

void require_dim(const Matrix& m, Eigen::Index d, const char* name) {
  if (m.rows() != d || m.cols() != d) {
    fail(ErrorKind::Validation, std::string(name) + " must be " + std::to_string(d) + "x" +
                                    std::to_string(d));
  }
}

}  // namespace

std::string variant_name(Variant v) {
  for (const auto& [value, name] : kVariantNames)
    if (value == v) return name;
  return "unknown";
}

Variant parse_variant(const std::string& name) {
  for (const auto& [value, label] : kVariantNames)
    if (name == label) return value;
  fail(ErrorKind::Config, "unknown variant '" + name + "'");
}

bool is_nonlinear(Variant v) {
  return v == Variant::GradientFlowNonlinear || v == Variant::GraffNonlinear ||
         v == Variant::DiagNonlinear;
}

Activation Activation::identity() { return Activation(); }

Activation Activation::relu() {
  Activation a;
  a.kind_ = Kind::Relu;
  a.name_ = "relu";
  return a;
}

Activation Activation::tanh() {
  Activation a;
  a.kind_ = Kind::Tanh;
  a.name_ = "tanh";
  return a;
}

Activation Activation::tanh_relu() {
  Activation a;
  a.kind_ = Kind::TanhRelu;
  a.name_ = "tanh_relu";
  return a;
}

Activation Activation::custom(std::function<double(double)> fn, std::string name) {
  if (!fn) fail(ErrorKind::Validation, "custom activation is empty");
  Activation a;
  a.kind_ = Kind::Custom;
  a.name_ = std::move(name);
  a.fn_ = std::move(fn);
  return a;
}

Activation Activation::parse(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "relu") return relu();
  if (name == "tanh") return tanh();
  if (name == "tanh_relu") return tanh_relu();
  fail(ErrorKind::Config, "unknown activation '" + name + "'");
}

double Activation::operator()(double x) const {
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Relu: return x > 0.0 ? x : 0.0;
    case Kind::Tanh: return std::tanh(x);
    case Kind::TanhRelu: return x > 0.0 ? std::tanh(x) : 0.0;
    case Kind::Custom: return fn_(x);
  }
  return x;
}

Matrix Activation::apply(const Matrix& m) const {
  if (kind_ == Kind::Identity) return m;
  return m.unaryExpr([this](double x) { return (*this)(x); });
}

bool Activation::satisfies_sign_condition() const {
  constexpr int kSamples = 1000;
  for (int k = 0; k < kSamples; ++k) {
    const double x = -100.0 + 200.0 * k / (kSamples - 1);
    const double y = (*this)(x);
    if (!std::isfinite(y) || x * y < 0.0) return false;
  }
  return true;
}

FeatureState FeatureState::from_features(const Matrix& F) {
  const double norm = F.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    fail(ErrorKind::Numeric, "feature norm is zero or not finite");
  }
  return FeatureState{F / norm, std::log(norm)};
}

Matrix FeatureState::features() const { return std::exp(log_scale) * direction; }

WeightSet diagnostic_weights(const ModelSpec& spec, Eigen::Index d) {
  const Matrix I = Matrix::Identity(d, d);
  WeightSet w = WeightSet::zeros(d);
  auto same = [&w](const Matrix& m) {
    w.Omega = m;
    w.W = m;
  };
  switch (spec.variant) {
    case Variant::GradientFlow:
    case Variant::GradientFlowNonlinear:
    case Variant::NoResidual:
      return spec.weights.resolved(d);
    case Variant::Graff:
    case Variant::GraffNonlinear: {
      const WeightSet r = spec.weights.resolved(d);
      w.W = r.W;
      w.Omega = r.omega_diag ? make_diagonal(*r.omega_diag) : Matrix::Zero(d, d);
      w.Wtilde = r.beta * I;
      return w;
    }
    case Variant::LabelPropagation:
      w.Omega = (1.0 + spec.mu) * I;
      w.W = I;
      w.Wtilde = -spec.mu * I;
      return w;
    case Variant::PdeGcnD:
      if (spec.ktk.rows() == d && spec.ktk.cols() == d) same(symmetrize(spec.ktk));
      return w;
    case Variant::Harmonic: {
      const WeightSet r = spec.weights.resolved(d);
      same(r.W.transpose() * r.W);
      return w;
    }
    case Variant::LaplacianOmegaEqW:
      same(spec.weights.resolved(d).W);
      return w;
    case Variant::DiagNonlinear:
      if (spec.weights.omega_diag && spec.weights.omega_diag->size() == d) {
        same(make_diagonal(*spec.weights.omega_diag));
      }
      return w;
    case Variant::Heat:
    case Variant::CGNN:
    case Variant::GrandLinear:
      same(I);
      return w;
  }
  return w;
}

Matrix step_model(const ModelSpec& spec, const GraphOperators& ops, const Matrix& F, const Matrix& F0) {
  const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
  const Eigen::Index d = F.cols();
  if (F.rows() != n || d == 0) fail(ErrorKind::Validation, "feature matrix does not match the graph");
  if (F0.rows() != n || F0.cols() != d) fail(ErrorKind::Validation, "source does not match features");
  if (!(spec.tau > 0.0) || !std::isfinite(spec.tau)) fail(ErrorKind::Validation, "tau must be positive");
  const Variant v = spec.variant;
  if (needs_W(v)) require_param(spec.weights.W.size() > 0, v, "W");
  const double tau = spec.tau;
  const Matrix& abar = ops.adjacency();
  const Matrix& lap = ops.laplacian();

  Matrix out;
  switch (v) {
    case Variant::GradientFlow:
    case Variant::GradientFlowNonlinear: {
      const WeightSet w = spec.weights.resolved(d);
      const Matrix field = -F * w.Omega + abar * F * w.W - F0 * w.Wtilde;
      out = F + tau * (v == Variant::GradientFlow ? field : spec.sigma.apply(field));
      break;
    }
    case Variant::NoResidual: {
      require_dim(spec.weights.W, d, "W");
      out = tau * abar * F * spec.weights.W;
      break;
    }
    case Variant::Graff:
    case Variant::GraffNonlinear: {
      require_param(spec.weights.omega_diag.has_value(), v, "omega");
      const WeightSet w = spec.weights.resolved(d);
      const Matrix field = -F * w.omega_diag->asDiagonal() + abar * F * w.W - w.beta * F0;
      out = F + tau * (v == Variant::Graff ? field : spec.sigma.apply(field));
      break;
    }
    case Variant::Heat:
      out = F - tau * lap * F;
      break;
    case Variant::LabelPropagation:
      if (!(spec.mu >= 0.0)) fail(ErrorKind::Validation, "label-propagation mu must be non-negative");
      out = F - tau * (lap * F + spec.mu * (F - F0));
      break;
    case Variant::CGNN: {
      require_param(spec.omega_tilde.size() > 0, v, "omega_tilde");
      require_dim(spec.omega_tilde, d, "omega_tilde");
      out = F + tau * (-lap * F + F * spec.omega_tilde);
      if (spec.cgnn_source) out += tau * F0;
      break;
    }
    case Variant::GrandLinear:
      out = F - tau * ops.self_loop_walk_laplacian() * F;
      break;
    case Variant::PdeGcnD:
      require_param(spec.ktk.size() > 0, v, "ktk");
      require_dim(spec.ktk, d, "ktk");
      out = F - tau * lap * F * spec.ktk;
      break;
    case Variant::Harmonic: {
      require_dim(spec.weights.W, d, "W");
      out = F - tau * lap * F * (spec.weights.W.transpose() * spec.weights.W);
      break;
    }
    case Variant::LaplacianOmegaEqW:
      require_dim(spec.weights.W, d, "W");
      out = F - tau * lap * F * spec.weights.W;
      break;
    case Variant::DiagNonlinear: {
      require_param(spec.weights.omega_diag.has_value(), v, "omega");
      const Vector& omega = *spec.weights.omega_diag;
      if (omega.size() != d) fail(ErrorKind::Validation, "omega length does not match features");
      if (omega.maxCoeff() > 0.0) fail(ErrorKind::Validation, "diag_nonlinear requires omega <= 0");
      out = F + tau * spec.sigma.apply(-lap * F * omega.asDiagonal());
      break;
    }
  }
  if (!is_finite(out)) fail(ErrorKind::Numeric, "step produced NaN or Inf");
  return out;
}

namespace {

StepRecord record(const GraphOperators& ops, const WeightSet& diag, int step, double tau,
                  const FeatureState& state, const Matrix& scaled_source) {
  StepRecord r;
  r.step = step;
  r.time = step * tau;
  r.dirichlet_direction = dirichlet_energy(ops, state.direction);
  r.rayleigh_quotient = r.dirichlet_direction / state.direction.squaredNorm();
  r.parametric_energy_direction = parametric_energy(ops, state.direction, scaled_source, diag);
  r.log_scale = state.log_scale;
  return r;
}

}  // namespace

Trajectory run_trajectory(const ModelSpec& spec, const GraphOperators& ops, const Matrix& F0, int m,
                          const StepObserver& observer) {
  if (m < 0) fail(ErrorKind::Validation, "step count must be non-negative");
  const WeightSet diag = diagnostic_weights(spec, F0.cols());
  Trajectory traj;
  traj.records.reserve(static_cast<std::size_t>(m) + 1);

  FeatureState state = FeatureState::from_features(F0);
  const bool linear = !is_nonlinear(spec.variant);
  // Source expressed in the units of state.direction.
  Matrix source = F0 / std::exp(state.log_scale);
  Matrix raw = F0;
  traj.records.push_back(record(ops, diag, 0, spec.tau, state, source));
  if (observer) observer(0, state);

  for (int k = 1; k <= m; ++k) {
    try {
      if (linear) {
        const Matrix next = step_model(spec, ops, state.direction, source);
        const double norm = next.norm();
        if (!(norm > 0.0)) fail(ErrorKind::Numeric, "features collapsed to zero");
        state.direction = next / norm;
        state.log_scale += std::log(norm);
        source /= norm;
      } else {
        raw = step_model(spec, ops, raw, F0);
        state = FeatureState::from_features(raw);
        source = F0 / std::exp(state.log_scale);
      }
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Numeric) throw;
      fail(ErrorKind::Numeric, "step " + std::to_string(k) + ": " + e.what());
    }
    traj.records.push_back(record(ops, diag, k, spec.tau, state, source));
    if (observer) observer(k, state);
  }
  traj.terminal = state;
  return traj;
}

Matrix spectral_filter_step(const GraphOperators& ops, const Matrix& W, const Matrix& F, double tau) {
  const SpectralPair eig = spectral_decomposition(W);
  if (F.rows() != static_cast<Eigen::Index>(ops.num_nodes()) || F.cols() != W.rows()) {
    fail(ErrorKind::Validation, "feature matrix does not match graph and W");
  }
  const Matrix z = F * eig.vectors;
  const Matrix filtered = z + tau * ops.adjacency() * z * eig.values.asDiagonal();
  return filtered * eig.vectors.transpose();
}

}  // namespace gradflow
