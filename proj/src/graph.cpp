#include "gradflow/graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>

#include "gradflow/errors.hpp"

namespace gradflow {

Graph::Graph(std::size_t num_nodes, const std::vector<std::pair<std::size_t, std::size_t>>& edges)
    : n_(num_nodes), degrees_(num_nodes, 0) {
  std::set<Edge> unique;
  for (const auto& [a, b] : edges) {
    if (a >= n_ || b >= n_) {
      fail(ErrorKind::Validation, "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                      ") out of range for " + std::to_string(n_) + " nodes");
    }
    if (a == b) fail(ErrorKind::Validation, "self-loop at node " + std::to_string(a));
    unique.insert(Edge{std::min(a, b), std::max(a, b)});
  }
  if (unique.empty()) fail(ErrorKind::Validation, "graph has no edges");
  edges_.assign(unique.begin(), unique.end());
  for (const auto& e : edges_) {
    ++degrees_[e.u];
    ++degrees_[e.v];
  }
}

std::vector<std::vector<std::size_t>> Graph::adjacency_lists() const {
  std::vector<std::vector<std::size_t>> adj(n_);
  for (const auto& e : edges_) {
    adj[e.u].push_back(e.v);
    adj[e.v].push_back(e.u);
  }
  return adj;
}

std::string Graph::to_edge_list() const {
  std::ostringstream out;
  out << "n " << n_ << "\n";
  for (const auto& e : edges_) out << e.u << " " << e.v << "\n";
  return out.str();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_index(std::string_view tok, std::size_t& out) {
  const auto* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

Graph from_edge_list(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t declared = 0;
  bool has_header = false;
  std::size_t max_index = 0;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto toks = split_ws(line);
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (toks.size() == 2 && toks[0] == "n") {
      if (has_header) fail(ErrorKind::Parse, where + "duplicate node-count header");
      if (!parse_index(toks[1], declared)) fail(ErrorKind::Parse, where + "bad node count");
      has_header = true;
      continue;
    }
    std::size_t a = 0, b = 0;
    if (toks.size() != 2 || !parse_index(toks[0], a) || !parse_index(toks[1], b)) {
      fail(ErrorKind::Parse, where + "expected two non-negative integers, got '" + std::string(line) + "'");
    }
    if (a == b) fail(ErrorKind::Validation, where + "self-loop at node " + std::to_string(a));
    max_index = std::max({max_index, a, b});
    edges.emplace_back(a, b);
  }
  if (edges.empty()) fail(ErrorKind::Validation, "edge list has no edges");
  const std::size_t n = has_header ? declared : max_index + 1;
  if (has_header && max_index >= declared) {
    fail(ErrorKind::Validation, "node " + std::to_string(max_index) + " exceeds declared count " +
                                    std::to_string(declared));
  }
  return Graph(n, edges);
}

Graph read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IO, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_edge_list(buf.str());
}

Graph complete_bipartite(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) fail(ErrorKind::Validation, "complete_bipartite needs a, b >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < a; ++i)
    for (std::size_t j = 0; j < b; ++j) edges.emplace_back(i, a + j);
  return Graph(a + b, edges);
}

Graph cycle(std::size_t n) {
  if (n < 3) fail(ErrorKind::Validation, "cycle needs n >= 3");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph(n, edges);
}

Graph path(std::size_t n) {
  if (n < 2) fail(ErrorKind::Validation, "path needs n >= 2");
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, edges);
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed) {
  if (n < 2) fail(ErrorKind::Validation, "erdos_renyi needs n >= 2");
  if (!(p > 0.0 && p <= 1.0)) fail(ErrorKind::Validation, "erdos_renyi needs p in (0, 1]");
  constexpr int kRetries = 100;
  for (int attempt = 0; attempt <= kRetries; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        // 53-bit uniform in [0, 1), independent of the standard library's distributions.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < p) edges.emplace_back(i, j);
      }
    }
    if (edges.empty()) continue;
    Graph g(n, edges);
    if (graph_checks(g).connected) return g;
  }
  fail(ErrorKind::Generation, "no connected G(" + std::to_string(n) + ", " + std::to_string(p) +
                                  ") sample within 100 retries from seed " + std::to_string(seed));
}

GraphChecks graph_checks(const Graph& g) {
  const auto adj = g.adjacency_lists();
  const std::size_t n = g.num_nodes();
  std::vector<int> colour(n, -1);
  bool bipartite = true;
  std::size_t components = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if (colour[s] != -1) continue;
    ++components;
    colour[s] = 0;
    std::deque<std::size_t> queue{s};
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : adj[u]) {
        if (colour[v] == -1) {
          colour[v] = 1 - colour[u];
          queue.push_back(v);
        } else if (colour[v] == colour[u]) {
          bipartite = false;
        }
      }
    }
  }
  GraphChecks out;
  out.connected = components == 1;
  out.bipartite = bipartite;
  if (bipartite) out.sides = colour;
  return out;
}

Matrix adjacency_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    a(e.u, e.v) = 1.0;
    a(e.v, e.u) = 1.0;
  }
  return a;
}

namespace {

Vector inv_sqrt_degrees(const Graph& g) {
  const auto& deg = g.degrees();
  Vector out(static_cast<Eigen::Index>(deg.size()));
  for (std::size_t i = 0; i < deg.size(); ++i) {
    if (deg[i] == 0) fail(ErrorKind::Validation, "node " + std::to_string(i) + " is isolated");
    out(static_cast<Eigen::Index>(i)) = 1.0 / std::sqrt(static_cast<double>(deg[i]));
  }
  return out;
}

}  // namespace

Matrix normalized_adjacency(const Graph& g) {
  const Vector s = inv_sqrt_degrees(g);
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    const double w = s(e.u) * s(e.v);
    a(e.u, e.v) = w;
    a(e.v, e.u) = w;
  }
  return a;
}

Matrix normalized_laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  return Matrix::Identity(n, n) - normalized_adjacency(g);
}

struct GraphOperators::State {
  explicit State(const Graph& g) : graph(g), checks(graph_checks(g)) {
    adjacency = normalized_adjacency(graph);
    laplacian = Matrix::Identity(adjacency.rows(), adjacency.cols()) - adjacency;
    sqrt_degree = inv_sqrt_degrees(graph).cwiseInverse();
  }
  Graph graph;
  GraphChecks checks;
  Matrix adjacency;
  Matrix laplacian;
  Vector sqrt_degree;
  std::once_flag spectrum_once;
  SpectralPair spectrum;
  std::once_flag walk_once;
  Matrix walk_laplacian;
};

GraphOperators::GraphOperators(const Graph& g) : state_(std::make_shared<State>(g)) {}

const Graph& GraphOperators::graph() const { return state_->graph; }
const Matrix& GraphOperators::adjacency() const { return state_->adjacency; }
const Matrix& GraphOperators::laplacian() const { return state_->laplacian; }
const Vector& GraphOperators::sqrt_degree() const { return state_->sqrt_degree; }
const GraphChecks& GraphOperators::checks() const { return state_->checks; }

const SpectralPair& GraphOperators::laplacian_spectrum() const {
  std::call_once(state_->spectrum_once,
                 [s = state_.get()] { s->spectrum = spectral_decomposition(s->laplacian); });
  return state_->spectrum;
}

const Matrix& GraphOperators::self_loop_walk_laplacian() const {
  std::call_once(state_->walk_once, [s = state_.get()] {
    const auto n = static_cast<Eigen::Index>(s->graph.num_nodes());
    const Matrix a = adjacency_matrix(s->graph) + Matrix::Identity(n, n);
    const Vector inv_deg = a.rowwise().sum().cwiseInverse();
    s->walk_laplacian = Matrix::Identity(n, n) - inv_deg.asDiagonal() * a;
  });
  return state_->walk_laplacian;
}

void require_connected(const GraphOperators& ops) {
  if (!ops.checks().connected) fail(ErrorKind::Validation, "graph is disconnected");
}

}  // namespace gradflow
