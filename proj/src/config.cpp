#include "lsi/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "lsi/discretization.hpp"
#include "lsi/error.hpp"

namespace lsi {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("config key " + key + ": '" + text + "' is not a finite number");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError("config key " + key + ": '" + text + "' is not an integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key " + key + ": '" + text + "' is not a boolean");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) out.push_back(to_double(key, item));
  if (out.empty()) throw ConfigError("config key " + key + " needs at least one value");
  return out;
}

void require(bool ok, const std::string& key, const char* rule) {
  if (!ok) throw ConfigError("config key " + key + " must be " + rule);
}

void require_positive(const std::vector<double>& values, const std::string& key) {
  for (double v : values) require(v > 0.0, key, "positive");
}

int bounded_int(const std::string& key, const std::string& text, long long lo, long long hi) {
  const auto v = to_integer(key, text);
  if (v < lo || v > hi) {
    throw ConfigError("config key " + key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(v);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (!seen.insert(key).second) throw ConfigError("config key " + key + " given twice");

    const std::string params_prefix = "potential.params.";
    if (key == "potential.family") {
      cfg.family = parse_family(value);
    } else if (key.rfind(params_prefix, 0) == 0) {
      cfg.params[key.substr(params_prefix.size())] = to_double(key, value);
    } else if (key == "potential.x0") {
      cfg.x0 = to_list(key, value);
    } else if (key == "grid.dim") {
      cfg.dim = bounded_int(key, value, 1, 2);
    } else if (key == "grid.radius") {
      cfg.radius = to_double(key, value);
      require(cfg.radius > 0.0, key, "positive");
    } else if (key == "grid.points") {
      cfg.points = bounded_int(key, value, 3, 1000000);
    } else if (key == "spectral.backend") {
      if (value == "dense") {
        cfg.backend = Backend::dense;
      } else if (value == "iterative") {
        cfg.backend = Backend::iterative;
      } else {
        throw ConfigError("config key spectral.backend must be dense or iterative");
      }
    } else if (key == "spectral.dense_budget") {
      cfg.dense_budget = static_cast<std::size_t>(bounded_int(key, value, 1, 100000));
    } else if (key == "spectral.allow_fallback") {
      cfg.allow_iterative_fallback = to_bool(key, value);
    } else if (key == "checks.tolerance") {
      cfg.check_tolerance = to_double(key, value);
      require(cfg.check_tolerance >= 0.0 && cfg.check_tolerance < 1.0, key, "in [0, 1)");
    } else if (key == "checks.samples") {
      cfg.samples = bounded_int(key, value, 1, 100000);
    } else if (key == "checks.times") {
      cfg.check_times = to_list(key, value);
      require_positive(cfg.check_times, key);
    } else if (key == "lyapunov.a_grid") {
      cfg.a_grid = to_list(key, value);
      require_positive(cfg.a_grid, key);
    } else if (key == "lyapunov.c_ladder") {
      cfg.c_ladder = to_list(key, value);
      require_positive(cfg.c_ladder, key);
    } else if (key == "lyapunov.tolerance") {
      cfg.lyapunov_tolerance = to_double(key, value);
      require(cfg.lyapunov_tolerance >= 0.0, key, "nonnegative");
    } else if (key == "chain.t0") {
      cfg.t0 = to_double(key, value);
      require(cfg.t0 > 0.0, key, "positive");
    } else if (key == "chain.K_override") {
      cfg.K_override = to_double(key, value);
      require(*cfg.K_override > 0.0, key, "positive");
    } else if (key == "chain.t0_scan") {
      cfg.t0_scan = to_bool(key, value);
    } else if (key == "oracle.starts") {
      cfg.oracle_starts = bounded_int(key, value, 1, 1000);
    } else if (key == "oracle.iters") {
      cfg.oracle_iters = bounded_int(key, value, 1, 100000);
    } else if (key == "flow.times") {
      cfg.flow_times = to_list(key, value);
      require_positive(cfg.flow_times, key);
      for (std::size_t k = 1; k < cfg.flow_times.size(); ++k) {
        require(cfg.flow_times[k] > cfg.flow_times[k - 1], key, "strictly increasing");
      }
    } else if (key == "flow.fd_step") {
      cfg.fd_step = to_double(key, value);
      require(cfg.fd_step >= 0.0, key, "nonnegative");
    } else if (key == "converse.rho") {
      cfg.converse_rho = to_double(key, value);
      require(*cfg.converse_rho > 0.0, key, "positive");
    } else if (key == "converse.c_ladder") {
      cfg.converse_c_ladder = to_list(key, value);
      require_positive(cfg.converse_c_ladder, key);
    } else if (key == "converse.residual_tol") {
      cfg.residual_tol = to_double(key, value);
      require(cfg.residual_tol > 0.0, key, "positive");
    } else if (key == "corpus.members") {
      for (const auto& item : split_list(value)) cfg.corpus.push_back(base_dir / item);
    } else if (key == "output_dir") {
      cfg.output_dir = value;
    } else if (key == "seed") {
      const auto v = to_integer(key, value);
      require(v >= 0, key, "nonnegative");
      cfg.seed = static_cast<std::uint64_t>(v);
    } else {
      throw ConfigError("unknown config key " + key);
    }
  }
  if (!cfg.x0.empty() && static_cast<int>(cfg.x0.size()) != cfg.dim) {
    throw ConfigError("potential.x0 must have grid.dim entries");
  }
  // A bare config means the standard Gaussian.
  if (cfg.family == Family::gaussian && cfg.params.empty()) cfg.params["scale"] = 1.0;
  // Fail early on bad potential parameters.
  (void)cfg.potential();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

Point RunConfig::base_point() const {
  Point x = Point::Zero(dim);
  for (std::size_t k = 0; k < x0.size(); ++k) x[static_cast<Eigen::Index>(k)] = x0[k];
  return x;
}

PotentialSpec RunConfig::potential() const { return make_potential(family, params, base_point()); }

double RunConfig::effective_radius() const { return radius > 0.0 ? radius : default_radius(potential()); }

CertifyOptions RunConfig::certify_options() const {
  CertifyOptions opts;
  opts.spectral.backend = backend;
  opts.spectral.dense_budget = dense_budget;
  opts.spectral.allow_iterative_fallback = allow_iterative_fallback;
  opts.a_grid = a_grid;
  if (!c_ladder.empty()) opts.fit.c_ladder = c_ladder;
  opts.fit.tolerance = lyapunov_tolerance;
  opts.t0 = t0;
  opts.K_override = K_override;
  opts.t0_scan = t0_scan;
  opts.oracle.starts = oracle_starts;
  opts.oracle.iters = oracle_iters;
  opts.check_tolerance = check_tolerance;
  opts.random_functions = samples;
  opts.seed = seed;
  return opts;
}

FlowOptions RunConfig::flow_options() const {
  FlowOptions opts;
  opts.fd_step = fd_step;
  return opts;
}

}  // namespace lsi
