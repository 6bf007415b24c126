#include <cmath>
#include <sstream>

#include "gradflow/errors.hpp"
#include "gradflow/verify.hpp"

namespace gradflow {

namespace {

std::string number(double x) {
  std::ostringstream s;
  s.precision(17);
  s << x;
  return s.str();
}

WeightSet weights_from(const Witness& w) {
  WeightSet out;
  out.W = w.matrix("W");
  if (w.matrices.count("Omega")) out.Omega = w.matrix("Omega");
  if (w.matrices.count("Wtilde")) out.Wtilde = w.matrix("Wtilde");
  if (w.matrices.count("omega")) out.omega_diag = w.matrix("omega").row(0).transpose();
  if (w.params.count("beta")) out.beta = w.param("beta");
  return out;
}

}  // namespace

const Matrix& Witness::matrix(const std::string& name) const {
  auto it = matrices.find(name);
  if (it == matrices.end()) fail(ErrorKind::Parse, "witness has no matrix '" + name + "'");
  return it->second;
}

double Witness::param(const std::string& name) const {
  auto it = params.find(name);
  if (it == params.end()) fail(ErrorKind::Parse, "witness has no parameter '" + name + "'");
  return it->second;
}

std::string Witness::serialize() const {
  std::ostringstream out;
  out << "witness " << check << "\n";
  for (const auto& [k, v] : params) out << "param " << k << " " << number(v) << "\n";
  for (const auto& [k, v] : labels) out << "label " << k << " " << v << "\n";
  if (graph) out << "graph\n" << graph->to_edge_list() << "end\n";
  for (const auto& [name, m] : matrices) {
    out << "matrix " << name << " " << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << number(m(i, j));
      out << "\n";
    }
  }
  return out.str();
}

Witness Witness::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  Witness w;
  bool header = false;
  auto bad = [&](const std::string& why) {
    fail(ErrorKind::Parse, "witness line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream tok(line);
    std::string kind;
    tok >> kind;
    if (kind == "witness") {
      if (!(tok >> w.check)) bad("missing check name");
      header = true;
    } else if (kind == "param") {
      std::string key;
      double value = 0.0;
      if (!(tok >> key >> value)) bad("malformed param");
      w.params[key] = value;
    } else if (kind == "label") {
      std::string key, value;
      if (!(tok >> key >> value)) bad("malformed label");
      w.labels[key] = value;
    } else if (kind == "graph") {
      std::string edges;
      bool closed = false;
      while (std::getline(in, line)) {
        ++line_no;
        if (line == "end") {
          closed = true;
          break;
        }
        edges += line + "\n";
      }
      if (!closed) bad("graph block is not terminated by 'end'");
      w.graph = from_edge_list(edges);
    } else if (kind == "matrix") {
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      if (!(tok >> name >> rows >> cols) || rows < 0 || cols < 0) bad("malformed matrix header");
      Matrix m(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) bad("matrix " + name + " is truncated");
        ++line_no;
        std::istringstream row(line);
        for (Eigen::Index j = 0; j < cols; ++j)
          if (!(row >> m(i, j))) bad("matrix " + name + " row " + std::to_string(i) + " is short");
      }
      w.matrices[name] = m;
    } else {
      bad("unknown record '" + kind + "'");
    }
  }
  if (!header) fail(ErrorKind::Parse, "witness header line is missing");
  if (!w.graph) fail(ErrorKind::Parse, "witness has no graph");
  return w;
}

CheckReport replay_witness(const Witness& w) {
  if (!w.graph) fail(ErrorKind::Parse, "witness has no graph");
  const GraphOperators ops(*w.graph);
  if (w.check == "gradient_fd") {
    GradientFn grad;
    auto it = w.labels.find("gradient");
    if (it != w.labels.end() && it->second == "sign_flipped") {
      grad = [](const GraphOperators& o, const Matrix& F, const Matrix& F0, const WeightSet& ws) {
        return Matrix(-energy_gradient(o, F, F0, ws));
      };
    }
    return gradient_fd_check(ops, w.matrix("F"), w.matrix("F0"), weights_from(w), w.param("h"), grad);
  }
  if (w.check == "kronecker_energy") {
    return kronecker_energy_check(ops, w.matrix("F"), w.matrix("F0"), weights_from(w));
  }
  if (w.check == "filter_equivalence") {
    CheckReport rep;
    rep.name = w.check;
    rep.tolerance = 1e-12;
    ModelSpec spec;
    spec.tau = w.param("tau");
    spec.weights = WeightSet::zeros(w.matrix("W").rows()).with_W(w.matrix("W"));
    const Matrix& F = w.matrix("F");
    const Matrix direct = step_model(spec, ops, F, Matrix::Zero(F.rows(), F.cols()));
    const Matrix filtered = spectral_filter_step(ops, spec.weights.W, F, spec.tau);
    rep.max_error = (direct - filtered).cwiseAbs().maxCoeff() / std::max(1.0, direct.cwiseAbs().maxCoeff());
    rep.passed = rep.max_error <= rep.tolerance;
    return rep;
  }
  if (w.check == "monotonicity") {
    ModelSpec spec;
    spec.variant = parse_variant(w.labels.at("variant"));
    spec.sigma = Activation::parse(w.labels.at("sigma"));
    spec.tau = w.param("tau");
    spec.weights = weights_from(w);
    const auto report = monotonicity_check(spec, ops, w.matrix("F0"), static_cast<int>(w.param("steps")));
    CheckReport rep = report.passed() ? report.proxy : (report.proxy.passed ? report.discrete : report.proxy);
    rep.name = w.check;
    return rep;
  }
  if (w.check == "closed_form") {
    CheckReport rep;
    rep.name = w.check;
    rep.tolerance = 1e-10;
    ModelSpec spec;
    spec.tau = w.param("tau");
    spec.weights = WeightSet::zeros(w.matrix("W").rows()).with_W(w.matrix("W"));
    const int m = static_cast<int>(w.param("steps"));
    const auto traj = run_trajectory(spec, ops, w.matrix("F0"), m);
    const auto closed = closed_form_features(ops, spec.weights.W, spec.tau, m, w.matrix("F0"));
    rep.max_error = (traj.terminal.direction - closed.direction).cwiseAbs().maxCoeff();
    rep.passed = rep.max_error <= rep.tolerance &&
                 std::abs(traj.terminal.log_scale - closed.log_scale) <= 1e-8;
    return rep;
  }
  fail(ErrorKind::Parse, "witness names unknown check '" + w.check + "'");
}

}  // namespace gradflow
