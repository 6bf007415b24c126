#include "gradflow/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "gradflow/errors.hpp"
#include "gradflow/verify.hpp"

namespace gradflow {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    fail(ErrorKind::Parse, "key '" + key + "': expected a number, got '" + value + "'");
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  long long out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorKind::Parse, "key '" + key + "': expected an integer, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  fail(ErrorKind::Parse, "key '" + key + "': expected true or false, got '" + value + "'");
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return (p.is_relative() && !base.empty()) ? base / p : p;
}

Matrix matrix_value(const std::string& key, const std::string& value) {
  try {
    return parse_matrix_literal(value);
  } catch (const Error& e) {
    fail(ErrorKind::Parse, "key '" + key + "': " + e.what());
  }
}

}  // namespace

Matrix parse_matrix_literal(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::Parse, std::string("bad matrix literal: ") + e.what());
  }
  if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
  if (!j.is_array() || j.empty()) fail(ErrorKind::Parse, "matrix literal must be a non-empty array");
  if (j.front().is_number()) {
    Matrix row(1, static_cast<Eigen::Index>(j.size()));
    for (std::size_t c = 0; c < j.size(); ++c) {
      if (!j[c].is_number()) fail(ErrorKind::Parse, "matrix literal has a non-numeric entry");
      row(0, static_cast<Eigen::Index>(c)) = j[c].get<double>();
    }
    return row;
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  if (cols == 0) fail(ErrorKind::Parse, "matrix literal rows must be non-empty arrays");
  Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) fail(ErrorKind::Parse, "matrix literal is ragged");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[r][c].is_number()) fail(ErrorKind::Parse, "matrix literal has a non-numeric entry");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
    }
  }
  return m;
}

Matrix read_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IO, "cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::vector<double> row;
    std::string tok;
    while (s >> tok) row.push_back(parse_double(path.string() + ":" + std::to_string(line_no), tok));
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorKind::Parse, path.string() + " line " + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::Parse, path.string() + " holds no matrix rows");
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  std::optional<Vector> omega;
  while (std::getline(in, line)) {
    ++line_no;
    // A '#' after whitespace starts a trailing comment.
    for (std::size_t pos = line.find('#'); pos != std::string::npos; pos = line.find('#', pos + 1)) {
      if (pos == 0 || std::isspace(static_cast<unsigned char>(line[pos - 1]))) {
        line.erase(pos);
        break;
      }
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorKind::Parse, "config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) fail(ErrorKind::Parse, "config line " + std::to_string(line_no) + ": key '" + key + "' has no value");
    ModelSpec& m = cfg.model;
    if (key == "graph") {
      cfg.graph = value;
    } else if (key == "graph_file") {
      cfg.graph_file = resolve(base_dir, value);
    } else if (key == "variant") {
      m.variant = parse_variant(value);
    } else if (key == "tau") {
      m.tau = parse_double(key, value);
    } else if (key == "steps") {
      cfg.steps = static_cast<int>(parse_int(key, value));
    } else if (key == "d") {
      cfg.width = static_cast<Eigen::Index>(parse_int(key, value));
    } else if (key == "sigma") {
      m.sigma = Activation::parse(value);
    } else if (key == "mu") {
      m.mu = parse_double(key, value);
    } else if (key == "beta") {
      m.weights.beta = parse_double(key, value);
    } else if (key == "source") {
      m.cgnn_source = parse_bool(key, value);
    } else if (key == "W") {
      m.weights.W = matrix_value(key, value);
    } else if (key == "W_file") {
      m.weights.W = read_matrix_file(resolve(base_dir, value));
    } else if (key == "Omega") {
      m.weights.Omega = matrix_value(key, value);
    } else if (key == "Omega_file") {
      m.weights.Omega = read_matrix_file(resolve(base_dir, value));
    } else if (key == "Wtilde") {
      m.weights.Wtilde = matrix_value(key, value);
    } else if (key == "Wtilde_file") {
      m.weights.Wtilde = read_matrix_file(resolve(base_dir, value));
    } else if (key == "omega") {
      const Matrix row = matrix_value(key, value);
      if (row.rows() != 1) fail(ErrorKind::Parse, "key 'omega': expected a flat list");
      omega = row.row(0).transpose();
    } else if (key == "KtK") {
      m.ktk = matrix_value(key, value);
    } else if (key == "KtK_file") {
      m.ktk = read_matrix_file(resolve(base_dir, value));
    } else if (key == "OmegaTilde") {
      m.omega_tilde = matrix_value(key, value);
    } else if (key == "OmegaTilde_file") {
      m.omega_tilde = read_matrix_file(resolve(base_dir, value));
    } else if (key == "init") {
      if (value != "random" && value != "one_hot" && value != "file") {
        fail(ErrorKind::Parse, "key 'init': expected random, one_hot or file");
      }
      cfg.init = value;
    } else if (key == "init_node") {
      cfg.init_node = static_cast<std::size_t>(parse_int(key, value));
    } else if (key == "init_file") {
      cfg.init_file = resolve(base_dir, value);
    } else if (key == "seed") {
      cfg.seed = parse_seed(value);
    } else if (key == "csv") {
      cfg.csv = resolve(base_dir, value);
    } else if (key == "svg") {
      cfg.svg = resolve(base_dir, value);
    } else if (key == "report") {
      cfg.report = resolve(base_dir, value);
    } else {
      fail(ErrorKind::Config, "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  cfg.model.weights.omega_diag = omega;
  if (cfg.graph.empty() == cfg.graph_file.empty()) {
    fail(ErrorKind::Config, "exactly one of 'graph' and 'graph_file' must be given");
  }
  if (cfg.steps < 0) fail(ErrorKind::Config, "key 'steps' must be non-negative");
  // Symmetrize W and Omega where the variant treats them as symmetric.
  WeightSet& w = cfg.model.weights;
  if (cfg.model.variant != Variant::Harmonic && w.W.size() > 0) w.W = symmetrize(w.W);
  if (w.Omega.size() > 0) w.Omega = symmetrize(w.Omega);
  if (cfg.width == 0) {
    if (w.W.size() > 0) cfg.width = w.W.rows();
    else if (w.omega_diag) cfg.width = w.omega_diag->size();
    else if (cfg.model.ktk.size() > 0) cfg.width = cfg.model.ktk.rows();
    else if (cfg.model.omega_tilde.size() > 0) cfg.width = cfg.model.omega_tilde.rows();
    else cfg.width = 1;
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IO, "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

std::uint64_t parse_seed(const std::string& text) {
  std::uint64_t out = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  if (ec != std::errc() || ptr != end) fail(ErrorKind::Parse, "bad seed '" + text + "'");
  return out;
}

void apply_seed_override(ExperimentConfig& cfg) {
  if (const char* env = std::getenv("GEL_SEED"); env && *env) cfg.seed = parse_seed(env);
}

Graph build_graph(const std::string& description) {
  static const std::regex pattern(R"(\s*([a-z_]+)\s*\(([^)]*)\)\s*)");
  std::smatch match;
  if (!std::regex_match(description, match, pattern)) {
    fail(ErrorKind::Parse, "bad graph description '" + description + "'");
  }
  const std::string name = match[1];
  std::vector<std::string> args;
  std::stringstream list(match[2].str());
  std::string arg;
  while (std::getline(list, arg, ',')) args.push_back(trim(arg));
  auto need = [&](std::size_t k) {
    if (args.size() != k) {
      fail(ErrorKind::Parse, name + " takes " + std::to_string(k) + " arguments");
    }
  };
  auto count = [&](std::size_t i) {
    const long long v = parse_int("graph", args[i]);
    if (v < 0) fail(ErrorKind::Parse, "graph size must be non-negative");
    return static_cast<std::size_t>(v);
  };
  if (name == "complete_bipartite") {
    need(2);
    return complete_bipartite(count(0), count(1));
  }
  if (name == "cycle") {
    need(1);
    return cycle(count(0));
  }
  if (name == "path") {
    need(1);
    return path(count(0));
  }
  if (name == "erdos_renyi") {
    need(3);
    return erdos_renyi(count(0), parse_double("graph", args[1]), parse_seed(args[2]));
  }
  fail(ErrorKind::Parse, "unknown graph family '" + name + "'");
}

Graph resolve_graph(const ExperimentConfig& cfg) {
  return cfg.graph_file.empty() ? build_graph(cfg.graph) : read_edge_list(cfg.graph_file);
}

Matrix initial_features(const ExperimentConfig& cfg, std::size_t n) {
  const auto rows = static_cast<Eigen::Index>(n);
  if (cfg.init == "one_hot") {
    if (cfg.init_node >= n) fail(ErrorKind::Validation, "init_node is out of range");
    Matrix F = Matrix::Zero(rows, cfg.width);
    F.row(static_cast<Eigen::Index>(cfg.init_node)).setOnes();
    return F;
  }
  if (cfg.init == "file") {
    if (cfg.init_file.empty()) fail(ErrorKind::Config, "init = file requires init_file");
    Matrix F = read_matrix_file(cfg.init_file);
    if (F.rows() != rows || F.cols() != cfg.width) {
      fail(ErrorKind::Validation, "init_file has the wrong shape");
    }
    return F;
  }
  Sampler sampler(cfg.seed);
  return sampler.gaussian(rows, cfg.width);
}

}  // namespace gradflow
