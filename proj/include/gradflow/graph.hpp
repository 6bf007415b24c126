#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gradflow/linalg.hpp"

namespace gradflow {

struct Edge {
  std::size_t u = 0;  // u < v
  std::size_t v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected unweighted graph. Immutable after construction.
class Graph {
 public:
  /// Validates indices, rejects self-loops and an empty edge set, and
  /// removes duplicate edges in either orientation.
  Graph(std::size_t num_nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::size_t>& degrees() const { return degrees_; }
  std::vector<std::vector<std::size_t>> adjacency_lists() const;

  std::string to_edge_list() const;

 private:
  std::size_t n_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> degrees_;
};

/// Whitespace-separated "u v" pairs, one per line. Lines starting with '#'
/// are comments; an optional "n <count>" line fixes the node count.
Graph from_edge_list(std::string_view text);
Graph read_edge_list(const std::filesystem::path& path);

Graph complete_bipartite(std::size_t a, std::size_t b);
Graph cycle(std::size_t n);
Graph path(std::size_t n);
/// G(n, p) conditioned on connectivity: retries with seed+1, seed+2, ...
/// for at most 100 extra draws before raising a generation error.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed);

struct GraphChecks {
  bool connected = false;
  bool bipartite = false;
  /// 0/1 side per node from a BFS 2-colouring; empty when not bipartite.
  std::vector<int> sides;
};
GraphChecks graph_checks(const Graph& g);

Matrix adjacency_matrix(const Graph& g);
/// D^{-1/2} A D^{-1/2}. Raises a validation error naming any isolated node.
Matrix normalized_adjacency(const Graph& g);
/// I - normalized_adjacency(g).
Matrix normalized_laplacian(const Graph& g);

/// Dense operators of a graph built once and shared by value. Implicitly
/// constructible from a Graph so that one-off calls can pass the graph.
class GraphOperators {
 public:
  GraphOperators(const Graph& g);  // NOLINT(google-explicit-constructor)

  const Graph& graph() const;
  const Matrix& adjacency() const;  // normalized
  const Matrix& laplacian() const;  // normalized
  const Vector& sqrt_degree() const;
  std::size_t num_nodes() const { return graph().num_nodes(); }
  /// Computed on first use; safe to call concurrently.
  const SpectralPair& laplacian_spectrum() const;
  const GraphChecks& checks() const;
  /// I - D~^-1 A~ with A~ = A + I, computed on first use.
  const Matrix& self_loop_walk_laplacian() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// Raises a validation error if g is disconnected.
void require_connected(const GraphOperators& ops);

}  // namespace gradflow
