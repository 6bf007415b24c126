#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "gradflow/predictor.hpp"

namespace gradflow {

/// Self-contained failing instance: a graph, named scalars, labels and
/// matrices, enough for replay_witness to rerun the check.
struct Witness {
  std::string check;
  std::optional<Graph> graph;
  std::map<std::string, double> params;
  std::map<std::string, std::string> labels;
  std::map<std::string, Matrix> matrices;

  std::string serialize() const;
  static Witness parse(std::string_view text);
  const Matrix& matrix(const std::string& name) const;
  double param(const std::string& name) const;
};

struct CheckReport {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string detail;
  std::optional<Witness> witness;  // set when the check fails
};

/// Largest n * d for which the nd x nd operator is assembled explicitly.
inline constexpr Eigen::Index kMaxAssembly = 4096;

/// <vec F, (Omega kron I - W kron Abar) vec F + 2 (Wtilde^T kron I) vec F0>.
double kronecker_oracle_energy(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                               const WeightSet& w);

/// Omega kron I - W kron Abar, the quadratic part of the energy.
Matrix assembled_energy_operator(const GraphOperators& ops, const WeightSet& w);

CheckReport kronecker_energy_check(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                                   const WeightSet& w);

using GradientFn =
    std::function<Matrix(const GraphOperators&, const Matrix&, const Matrix&, const WeightSet&)>;

/// Central differences of parametric_energy against -2 energy_gradient,
/// relative to max(1, ||analytic||). h must lie in [1e-7, 1e-3].
CheckReport gradient_fd_check(const GraphOperators& ops, const Matrix& F, const Matrix& F0,
                              const WeightSet& w, double h = 1e-5, const GradientFn& gradient = {});

/// Largest |J - J^T| of the Jacobian of F -> -F Omega + Abar F W, taken by
/// finite differences without symmetrizing the weights.
double field_jacobian_asymmetry(const GraphOperators& ops, const Matrix& Omega, const Matrix& W);

struct MonotonicityReport {
  CheckReport proxy;     // energy nonincreasing at tau <= 1e-3
  CheckReport discrete;  // E(t + tau) - E(t) <= c ||dF||^2 at the model's tau
  double c = 0.0;        // max(0, top eigenvalue of the assembled operator)
  double raw_max_increase = 0.0;  // largest E(t + tau) - E(t) at the model's tau
  bool passed() const { return proxy.passed && discrete.passed; }
};

/// For the gradient-flow and GRAFF variants (linear or activated).
MonotonicityReport monotonicity_check(const ModelSpec& spec, const GraphOperators& ops,
                                      const Matrix& F0, int m);

CheckReport filter_equivalence_check(const GraphOperators& ops, const Matrix& W, double tau, int trials,
                                     std::uint64_t seed);

CheckReport replay_witness(const Witness& w);

/// Seeded generator of random test instances.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi);
  int integer(int lo, int hi);  // inclusive
  Matrix gaussian(Eigen::Index rows, Eigen::Index cols);
  Matrix orthogonal(Eigen::Index d);
  Matrix symmetric_with_spectrum(const Vector& mu);
  Matrix symmetric(Eigen::Index d);
  /// Connected G(n, p) sample; retries until the bipartite flag matches
  /// when one is requested.
  Graph connected_graph(std::size_t n, double p, std::optional<bool> bipartite = std::nullopt);
  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace gradflow
