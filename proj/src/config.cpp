#include "monge/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "monge/digest.hpp"
#include "monge/error.hpp"

namespace monge {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string t; in >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw Error(ErrorKind::kInvalidConfig, what + ": '" + text + "' is not a number");
  }
  return v;
}

long long to_integer(const std::string& text, const std::string& what) {
  long long v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorKind::kInvalidConfig, what + ": '" + text + "' is not an integer");
  }
  return v;
}

bool to_bool(const std::string& text, const std::string& what) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw Error(ErrorKind::kInvalidConfig, what + ": '" + text + "' is not a boolean");
}

double positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw Error(ErrorKind::kInvalidConfig, what + " must be positive");
  return v;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(base_dir) / p).string();
}

// Rows of numbers from a file, '#' comments allowed.
std::vector<std::vector<double>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path + "'");
  std::vector<std::vector<double>> rows;
  for (std::string line; std::getline(in, line);) {
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    std::vector<double> row;
    for (const auto& t : tokens(line)) row.push_back(to_double(t, path));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::vector<double>> per_node_file(const std::string& spec, std::size_t n,
                                               std::size_t width, const std::string& base_dir) {
  const std::string path = resolve(spec.substr(1), base_dir);
  auto rows = read_rows(path);
  if (rows.size() != n) {
    throw Error(ErrorKind::kInvalidConfig, path + " has " + std::to_string(rows.size()) +
                                               " rows for " + std::to_string(n) + " nodes");
  }
  for (const auto& r : rows) {
    if (r.size() != width) {
      throw Error(ErrorKind::kInvalidConfig,
                  path + " needs " + std::to_string(width) + " numbers per row");
    }
  }
  return rows;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Mat2> matrix_field(const std::string& spec, const DiscreteManifold& m,
                               const std::string& base_dir, const std::string& what) {
  const std::size_t n = m.node_count();
  std::vector<Mat2> g(n);
  if (!spec.empty() && spec.front() == '@') {
    const auto rows = per_node_file(spec, n, 4, base_dir);
    for (std::size_t i = 0; i < n; ++i) g[i] << rows[i][0], rows[i][1], rows[i][2], rows[i][3];
    return g;
  }
  const auto t = tokens(spec);
  if (t.size() == 2 && t[0] == "aniso") {
    const double amp = to_double(t[1], what);
    if (amp < 0.0) throw Error(ErrorKind::kInvalidConfig, what + " aniso amplitude must be >= 0");
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = m.positions()[i];
      g[i] << 1.0 + amp * 0.5 * (1.0 + std::sin(kTwoPi * p.x())), 0.0, 0.0,
          1.0 + amp * 0.5 * (1.0 + std::cos(kTwoPi * p.y()));
    }
    return g;
  }
  if (t.size() == 4) {
    Mat2 c;
    c << to_double(t[0], what), to_double(t[1], what), to_double(t[2], what),
        to_double(t[3], what);
    std::fill(g.begin(), g.end(), c);
    return g;
  }
  throw Error(ErrorKind::kInvalidConfig, what + ": expected 4 numbers, 'aniso <amp>' or @file");
}

std::vector<Vec2> covector_field(const std::string& spec, const DiscreteManifold& m,
                                 const std::string& base_dir) {
  const std::size_t n = m.node_count();
  std::vector<Vec2> w(n);
  if (!spec.empty() && spec.front() == '@') {
    const auto rows = per_node_file(spec, n, 2, base_dir);
    for (std::size_t i = 0; i < n; ++i) w[i] = Vec2(rows[i][0], rows[i][1]);
    return w;
  }
  const auto t = tokens(spec);
  if (t.size() == 2 && t[0] == "swirl") {
    const double amp = to_double(t[1], "metric.omega");
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = m.positions()[i];
      w[i] = amp * Vec2(std::sin(kTwoPi * p.y()), std::cos(kTwoPi * p.x())) / std::sqrt(2.0);
    }
    return w;
  }
  if (t.size() == 2) {
    std::fill(w.begin(), w.end(), Vec2(to_double(t[0], "metric.omega"), to_double(t[1], "metric.omega")));
    return w;
  }
  throw Error(ErrorKind::kInvalidConfig, "metric.omega: expected 2 numbers, 'swirl <amp>' or @file");
}

std::vector<double> scalar_field(const std::string& spec, const DiscreteManifold& m,
                                 const std::string& base_dir) {
  const std::size_t n = m.node_count();
  std::vector<double> v(n);
  if (!spec.empty() && spec.front() == '@') {
    const auto rows = per_node_file(spec, n, 1, base_dir);
    for (std::size_t i = 0; i < n; ++i) v[i] = rows[i][0];
    return v;
  }
  const auto t = tokens(spec);
  if (t.size() == 3 && t[0] == "wave") {
    const double a = to_double(t[1], "lagrangian.V"), b = to_double(t[2], "lagrangian.V");
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = m.positions()[i];
      v[i] = a + b * std::sin(kTwoPi * p.x()) * std::sin(kTwoPi * p.y());
    }
    return v;
  }
  if (t.size() == 1) {
    std::fill(v.begin(), v.end(), to_double(t[0], "lagrangian.V"));
    return v;
  }
  throw Error(ErrorKind::kInvalidConfig, "lagrangian.V: expected a number, 'wave <a> <b>' or @file");
}

const std::map<std::string, std::function<void(RunConfig&, const std::string&)>>& setters() {
  static const std::map<std::string, std::function<void(RunConfig&, const std::string&)>> table = {
      {"manifold.type", [](RunConfig& c, const std::string& v) { c.manifold_type = v; }},
      {"manifold.n",
       [](RunConfig& c, const std::string& v) { c.manifold_n = static_cast<int>(to_integer(v, "manifold.n")); }},
      {"manifold.stencil",
       [](RunConfig& c, const std::string& v) { c.stencil = static_cast<int>(to_integer(v, "manifold.stencil")); }},
      {"manifold.graph_file", [](RunConfig& c, const std::string& v) { c.graph_file = v; }},
      {"metric.type", [](RunConfig& c, const std::string& v) { c.metric_type = v; }},
      {"metric.G", [](RunConfig& c, const std::string& v) { c.metric_g = v; }},
      {"metric.omega", [](RunConfig& c, const std::string& v) { c.metric_omega = v; }},
      {"lagrangian.type", [](RunConfig& c, const std::string& v) { c.lagrangian_type = v; }},
      {"lagrangian.k", [](RunConfig& c, const std::string& v) { c.lagrangian_k = to_double(v, "lagrangian.k"); }},
      {"lagrangian.G", [](RunConfig& c, const std::string& v) { c.lagrangian_g = v; }},
      {"lagrangian.V", [](RunConfig& c, const std::string& v) { c.lagrangian_v = v; }},
      {"mu0", [](RunConfig& c, const std::string& v) { c.mu0 = v; }},
      {"mu1", [](RunConfig& c, const std::string& v) { c.mu1 = v; }},
      {"absolutely_continuous",
       [](RunConfig& c, const std::string& v) { c.absolutely_continuous = to_bool(v, "absolutely_continuous"); }},
      {"tolerances.tight",
       [](RunConfig& c, const std::string& v) { c.tolerances.tol_tight = to_double(v, "tolerances.tight"); }},
      {"tolerances.cal",
       [](RunConfig& c, const std::string& v) { c.tolerances.tol_cal = to_double(v, "tolerances.cal"); }},
      {"tolerances.solver",
       [](RunConfig& c, const std::string& v) {
         c.tolerances.solver = positive(to_double(v, "tolerances.solver"), "tolerances.solver");
       }},
      {"tolerances.k0",
       [](RunConfig& c, const std::string& v) {
         c.tolerances.k0 = positive(to_double(v, "tolerances.k0"), "tolerances.k0");
       }},
      {"epsilon", [](RunConfig& c, const std::string& v) { c.epsilon = to_double(v, "epsilon"); }},
      {"seed",
       [](RunConfig& c, const std::string& v) { c.seed = static_cast<std::uint64_t>(to_integer(v, "seed")); }},
      {"threads",
       [](RunConfig& c, const std::string& v) { c.threads = static_cast<int>(to_integer(v, "threads")); }},
      {"out_dir", [](RunConfig& c, const std::string& v) { c.out_dir = v; }},
      {"samples.pairs",
       [](RunConfig& c, const std::string& v) { c.pair_samples = static_cast<std::size_t>(to_integer(v, "samples.pairs")); }},
      {"samples.quadruples",
       [](RunConfig& c, const std::string& v) {
         c.quadruple_samples = static_cast<std::size_t>(to_integer(v, "samples.quadruples"));
       }},
      {"samples.triples",
       [](RunConfig& c, const std::string& v) {
         c.triple_samples = static_cast<std::size_t>(to_integer(v, "samples.triples"));
       }},
  };
  return table;
}

void validate(const RunConfig& c) {
  if (c.manifold_type != "torus2d" && c.manifold_type != "graph") {
    throw Error(ErrorKind::kInvalidConfig, "manifold.type must be torus2d or graph");
  }
  if (c.stencil != 8 && c.stencil != 16) {
    throw Error(ErrorKind::kInvalidConfig, "manifold.stencil must be 8 or 16");
  }
  if (c.manifold_type == "graph" && c.graph_file.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "manifold.type = graph needs manifold.graph_file");
  }
  if (c.metric_type != "euclidean" && c.metric_type != "riemannian" && c.metric_type != "randers") {
    throw Error(ErrorKind::kInvalidConfig, "metric.type must be euclidean, riemannian or randers");
  }
  if (c.lagrangian_type != "none" && c.lagrangian_type != "tilde" &&
      c.lagrangian_type != "quadratic") {
    throw Error(ErrorKind::kInvalidConfig, "lagrangian.type must be none, tilde or quadratic");
  }
  if (c.tolerances.tol_tight < 0.0 || c.tolerances.tol_cal < 0.0 || c.epsilon < 0.0) {
    throw Error(ErrorKind::kInvalidConfig, "tolerances and epsilon must be nonnegative");
  }
  if (c.threads < 0) throw Error(ErrorKind::kInvalidConfig, "threads must be >= 0");
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& key, const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw Error(ErrorKind::kInvalidConfig, "unknown config key '" + key + "'");
  it->second(config, value);
}

RunConfig parse_config(std::istream& in, const std::string& base_dir) {
  RunConfig config;
  config.base_dir = base_dir;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::kInvalidConfig,
                  "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    apply_setting(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  validate(config);
  return config;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open config '" + path + "'");
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_config(in, parent.empty() ? "." : parent.string());
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  out.precision(17);
  out << "absolutely_continuous = " << (absolutely_continuous ? "true" : "false") << "\n"
      << "epsilon = " << epsilon << "\n"
      << "lagrangian.G = " << lagrangian_g << "\n"
      << "lagrangian.V = " << lagrangian_v << "\n"
      << "lagrangian.k = " << lagrangian_k << "\n"
      << "lagrangian.type = " << lagrangian_type << "\n"
      << "manifold.graph_file = " << graph_file << "\n"
      << "manifold.n = " << manifold_n << "\n"
      << "manifold.stencil = " << stencil << "\n"
      << "manifold.type = " << manifold_type << "\n"
      << "metric.G = " << metric_g << "\n"
      << "metric.omega = " << metric_omega << "\n"
      << "metric.type = " << metric_type << "\n"
      << "mu0 = " << mu0 << "\n"
      << "mu1 = " << mu1 << "\n"
      << "samples.pairs = " << pair_samples << "\n"
      << "samples.quadruples = " << quadruple_samples << "\n"
      << "samples.triples = " << triple_samples << "\n"
      << "seed = " << seed << "\n"
      << "tolerances.cal = " << tolerances.tol_cal << "\n"
      << "tolerances.k0 = " << tolerances.k0 << "\n"
      << "tolerances.solver = " << tolerances.solver << "\n"
      << "tolerances.tight = " << tolerances.tol_tight << "\n";
  return out.str();
}

std::string RunConfig::digest() const { return short_digest(canonical()); }

DiscreteManifold build_manifold(const RunConfig& config) {
  if (config.manifold_type == "graph") {
    return load_graph(read_graph_spec_file(resolve(config.graph_file, config.base_dir)));
  }
  return build_torus_grid(config.manifold_n, config.stencil == 8 ? Stencil::k8 : Stencil::k16);
}

FinslerMetric build_metric(const RunConfig& config, const DiscreteManifold& manifold) {
  if (config.metric_type == "euclidean") return FinslerMetric::euclidean(manifold.node_count());
  auto g = matrix_field(config.metric_g, manifold, config.base_dir, "metric.G");
  if (config.metric_type == "riemannian") return FinslerMetric::riemannian(std::move(g));
  return FinslerMetric::randers(std::move(g),
                                covector_field(config.metric_omega, manifold, config.base_dir));
}

Lagrangian build_lagrangian(const RunConfig& config, const DiscreteManifold& manifold) {
  if (config.lagrangian_type == "tilde") {
    return Lagrangian::tilde(build_metric(config, manifold), config.lagrangian_k);
  }
  if (config.lagrangian_type == "quadratic") {
    return Lagrangian::quadratic(matrix_field(config.lagrangian_g, manifold, config.base_dir, "lagrangian.G"),
                                 scalar_field(config.lagrangian_v, manifold, config.base_dir),
                                 config.lagrangian_k);
  }
  throw Error(ErrorKind::kInvalidConfig, "lagrangian.type is none; no Lagrangian family");
}

CostModel build_cost_model(const RunConfig& config, const DiscreteManifold& manifold) {
  if (config.lagrangian_type == "none") return CostModel::finsler(build_metric(config, manifold));
  return CostModel::lagrangian(build_lagrangian(config, manifold));
}

std::vector<double> build_measure(const std::string& spec, const DiscreteManifold& manifold,
                                  std::uint64_t seed, double floor, const std::string& base_dir) {
  const std::size_t n = manifold.node_count();
  std::vector<double> mu(n, 0.0);
  const auto t = tokens(spec);
  if (t.empty()) throw Error(ErrorKind::kInvalidConfig, "empty marginal spec");
  const bool torus = manifold.topology() == Topology::kTorus2d;

  if (t[0] == "gaussian" && t.size() == 4) {
    const Vec2 c(to_double(t[1], spec), to_double(t[2], spec));
    const double w = positive(to_double(t[3], spec), "gaussian width");
    for (std::size_t i = 0; i < n; ++i) {
      Vec2 d = manifold.positions()[i] - c;
      if (torus) d = d.unaryExpr([](double x) { return x - std::round(x); });
      const double r = d.norm();
      // A bump: the Gaussian profile cut off at three widths.
      if (r <= 3.0 * w) mu[i] = std::exp(-0.5 * r * r / (w * w));
    }
  } else if (t[0] == "uniform" && t.size() == 1) {
    std::fill(mu.begin(), mu.end(), 1.0);
  } else if (t[0] == "file" && t.size() == 2) {
    const auto rows = read_rows(resolve(t[1], base_dir));
    std::size_t next = 0;
    for (const auto& r : rows) {
      if (r.size() == 1 && next < n) {
        mu[next++] = r[0];
      } else if (r.size() == 2 && r[0] >= 0 && r[0] < static_cast<double>(n) &&
                 r[0] == std::floor(r[0])) {
        mu[static_cast<std::size_t>(r[0])] += r[1];
      } else {
        throw Error(ErrorKind::kInvalidConfig, "malformed row in marginal file " + t[1]);
      }
    }
  } else if (t[0] == "atoms" && t.size() >= 2) {
    for (std::size_t k = 1; k < t.size(); ++k) {
      const long long id = to_integer(t[k], spec);
      if (id < 0 || id >= static_cast<long long>(n)) {
        throw Error(ErrorKind::kInvalidConfig, "atom node " + t[k] + " out of range");
      }
      mu[static_cast<std::size_t>(id)] += 1.0;
    }
  } else if (t[0] == "random-atoms" && t.size() == 2) {
    const long long m = to_integer(t[1], spec);
    if (m < 1 || m > static_cast<long long>(n)) {
      throw Error(ErrorKind::kInvalidConfig, "random-atoms count out of range");
    }
    std::vector<std::size_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = i;
    std::mt19937_64 rng(seed);
    for (long long k = 0; k < m; ++k) {
      std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(k), n - 1);
      std::swap(ids[static_cast<std::size_t>(k)], ids[pick(rng)]);
      mu[ids[static_cast<std::size_t>(k)]] = 1.0;
    }
  } else {
    throw Error(ErrorKind::kInvalidConfig, "unknown marginal spec '" + spec + "'");
  }

  double total = 0.0;
  for (double& m : mu) {
    if (m < 0.0 || !std::isfinite(m)) throw Error(ErrorKind::kMarginal, "negative mass in '" + spec + "'");
    m += floor;
    total += m;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::kMarginal, "marginal '" + spec + "' has no mass");
  for (double& m : mu) m /= total;
  return mu;
}

Marginals build_marginals(const RunConfig& config, const DiscreteManifold& manifold) {
  const double floor = config.absolutely_continuous ? 1e-9 : 0.0;
  return Marginals(build_measure(config.mu0, manifold, config.seed, floor, config.base_dir),
                   build_measure(config.mu1, manifold, config.seed + 0x9e3779b97f4a7c15ULL, 0.0,
                                 config.base_dir));
}

}  // namespace monge
