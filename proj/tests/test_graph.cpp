#include <doctest.h>

#include "gradflow/errors.hpp"
#include "gradflow/graph.hpp"
#include "gradflow/verify.hpp"
#include "support/oracles.hpp"

using namespace gradflow;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::State;
}

Vector as_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

}  // namespace

TEST_CASE("edge list parsing") {
  const Graph k2 = from_edge_list("0 1");
  CHECK(k2.num_nodes() == 2);
  CHECK(k2.num_edges() == 1);

  const Graph g = from_edge_list("0 1\n1 0\n# c\n1 2");
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);

  const Graph h = from_edge_list("# header\nn 5\n0 1\n  3 4  \n");
  CHECK(h.num_nodes() == 5);
  CHECK(h.degrees() == std::vector<std::size_t>{1, 1, 0, 1, 1});

  CHECK(kind_of([] { from_edge_list("0 0"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { from_edge_list("# nothing\n"); }) == ErrorKind::Validation);
  CHECK(kind_of([] { from_edge_list("n 2\n0 3"); }) == ErrorKind::Validation);
  try {
    from_edge_list("0 1\n1 x\n");
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  CHECK(kind_of([] { from_edge_list("0 -1"); }) == ErrorKind::Parse);
  CHECK(kind_of([] { from_edge_list("0 1 2"); }) == ErrorKind::Parse);
}

TEST_CASE("edge list round trip") {
  const Graph g = erdos_renyi(12, 0.4, 3);
  const Graph back = from_edge_list(g.to_edge_list());
  CHECK(back.num_nodes() == g.num_nodes());
  CHECK(back.edges() == g.edges());
}

TEST_CASE("generators") {
  const Graph kb = complete_bipartite(2, 3);
  CHECK(kb.num_nodes() == 5);
  CHECK(kb.num_edges() == 6);
  CHECK(cycle(5).degrees() == std::vector<std::size_t>(5, 2));
  CHECK(path(4).num_edges() == 3);

  const Graph a = erdos_renyi(20, 0.3, 11);
  const Graph b = erdos_renyi(20, 0.3, 11);
  CHECK(a.edges() == b.edges());
  CHECK(graph_checks(a).connected);
  CHECK(kind_of([] { erdos_renyi(60, 0.001, 1); }) == ErrorKind::Generation);
  CHECK(kind_of([] { cycle(2); }) == ErrorKind::Validation);
}

TEST_CASE("connectivity and bipartiteness") {
  const Graph split(4, {{0, 1}, {2, 3}});
  const GraphChecks c = graph_checks(split);
  CHECK_FALSE(c.connected);
  CHECK(c.bipartite);
  CHECK(graph_checks(cycle(6)).bipartite);
  CHECK_FALSE(graph_checks(cycle(5)).bipartite);
  CHECK(kind_of([&] { require_connected(GraphOperators(split)); }) == ErrorKind::Validation);
}

TEST_CASE("normalized operators") {
  const Matrix a = normalized_adjacency(cycle(3));
  CHECK(a(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(a(0, 0) == 0.0);
  const Matrix lap = normalized_laplacian(complete_bipartite(1, 1));
  CHECK(lap(0, 0) == 1.0);
  CHECK(lap(0, 1) == -1.0);
  try {
    normalized_adjacency(from_edge_list("n 3\n0 1"));
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Validation);
    CHECK(std::string(e.what()).find("node 2") != std::string::npos);
  }
}

TEST_CASE("frozen spectra match the Jacobi oracle") {
  // Expected values come from oracle::jacobi_eigenvalues and are frozen here.
  struct Case {
    Graph g;
    std::vector<double> expected;
  };
  const std::vector<Case> cases{
      {complete_bipartite(1, 1), {0.0, 2.0}},
      {complete_bipartite(2, 2), {0.0, 1.0, 1.0, 2.0}},
      {cycle(3), {0.0, 1.5, 1.5}},
      {complete_bipartite(5, 5), {0, 1, 1, 1, 1, 1, 1, 1, 1, 2}},
  };
  for (const auto& c : cases) {
    const Vector oracle_values = as_vector(oracle::jacobi_eigenvalues(normalized_laplacian(c.g)));
    const Vector frozen = as_vector(c.expected);
    CHECK((oracle_values - frozen).cwiseAbs().maxCoeff() < 1e-12);
    const Vector got = spectral_decomposition(normalized_laplacian(c.g)).values;
    CHECK((got - frozen).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("spectral decomposition contract") {
  Sampler s(5);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Index d = s.integer(1, 12);
    const Matrix m = s.symmetric(d) * s.uniform(0.1, 10.0);
    const SpectralPair sp = spectral_decomposition(m);
    const Matrix I = Matrix::Identity(d, d);
    CHECK((sp.vectors.transpose() * sp.vectors - I).cwiseAbs().maxCoeff() <= 1e-10);
    const Matrix rebuilt = sp.vectors * sp.values.asDiagonal() * sp.vectors.transpose();
    CHECK((rebuilt - m).norm() <= 1e-10 * m.norm());
    for (Eigen::Index i = 1; i < d; ++i) CHECK(sp.values(i) >= sp.values(i - 1));
    for (Eigen::Index c = 0; c < d; ++c) {
      Eigen::Index arg = 0;
      sp.vectors.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(sp.vectors(arg, c) > 0.0);
    }
    const auto jac = oracle::jacobi_eigenvalues(m);
    CHECK((sp.values - as_vector(jac)).cwiseAbs().maxCoeff() < 1e-9 * std::max(1.0, m.norm()));
  }
  // Tie between entries of equal magnitude goes to the lower index.
  const SpectralPair k2 = spectral_decomposition(normalized_laplacian(complete_bipartite(1, 1)));
  CHECK(k2.vectors(0, 1) > 0.0);
  CHECK(k2.vectors(1, 1) < 0.0);

  Matrix asym(2, 2);
  asym << 1, 2, 3, 4;
  CHECK(kind_of([&] { spectral_decomposition(asym); }) == ErrorKind::Validation);
  CHECK(kind_of([] { spectral_decomposition(Matrix(2, 3)); }) == ErrorKind::Validation);
}

TEST_CASE("largest Laplacian eigenvalue is 2 exactly on bipartite graphs") {
  Sampler s(17);
  std::vector<Graph> graphs{cycle(4), cycle(7), path(5), complete_bipartite(3, 4), complete_bipartite(1, 6)};
  for (int k = 0; k < 30; ++k) graphs.push_back(s.connected_graph(s.integer(4, 20), s.uniform(0.15, 0.7)));
  for (const auto& g : graphs) {
    const GraphOperators ops(g);
    const Vector& lam = ops.laplacian_spectrum().values;
    const bool top_is_two = std::abs(lam(lam.size() - 1) - 2.0) <= 1e-9;
    CHECK(top_is_two == ops.checks().bipartite);
    CHECK(lam(0) >= -1e-12);
    CHECK(lam(lam.size() - 1) <= 2.0 + 1e-12);
    // Kernel spanned by sqrt(degree).
    const Vector phi0 = ops.sqrt_degree() / ops.sqrt_degree().norm();
    CHECK((ops.laplacian() * phi0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Kronecker identity for the propagation term") {
  Sampler s(23);
  for (int k = 0; k < 10; ++k) {
    const GraphOperators ops(s.connected_graph(s.integer(3, 12), 0.5));
    const Eigen::Index n = static_cast<Eigen::Index>(ops.num_nodes());
    const Eigen::Index d = s.integer(1, 4);
    const Matrix F = s.gaussian(n, d);
    const Matrix W = s.gaussian(d, d);
    const Vector lhs = oracle::vec(ops.adjacency() * F * W);
    const Vector rhs = oracle::kron(W.transpose(), ops.adjacency()) * oracle::vec(F);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((vec(F) - oracle::vec(F)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((kron(W, ops.adjacency()) - oracle::kron(W, ops.adjacency())).cwiseAbs().maxCoeff() == 0.0);
  }
}
