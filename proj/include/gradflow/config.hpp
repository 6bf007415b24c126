#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "gradflow/dynamics.hpp"

namespace gradflow {

/// Flat "key = value" experiment description. Matrices are JSON-style
/// literals (W = [[1,-0.5],[-0.5,1]]) or whitespace tables via <key>_file.
struct ExperimentConfig {
  std::string graph;  // e.g. "complete_bipartite(5,5)", "cycle(5)", "erdos_renyi(20,0.3,7)"
  std::filesystem::path graph_file;
  ModelSpec model;
  int steps = 100;
  Eigen::Index width = 0;  // channel count; inferred from W when absent
  std::string init = "random";  // random | one_hot | file
  std::size_t init_node = 0;
  std::filesystem::path init_file;
  std::uint64_t seed = 0;
  std::filesystem::path csv;
  std::filesystem::path svg;
  std::filesystem::path report;
};

/// Relative paths inside the config resolve against base_dir.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

/// Replaces the seed with $GEL_SEED when it is set.
void apply_seed_override(ExperimentConfig& cfg);
std::uint64_t parse_seed(const std::string& text);

/// "complete_bipartite(a,b)", "cycle(n)", "path(n)" or "erdos_renyi(n,p,seed)".
Graph build_graph(const std::string& description);
Graph resolve_graph(const ExperimentConfig& cfg);

Matrix parse_matrix_literal(const std::string& text);
Matrix read_matrix_file(const std::filesystem::path& path);

/// Initial features for cfg on a graph with n nodes.
Matrix initial_features(const ExperimentConfig& cfg, std::size_t n);

}  // namespace gradflow
