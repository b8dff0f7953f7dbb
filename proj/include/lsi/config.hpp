#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lsi/certify.hpp"
#include "lsi/flow.hpp"
#include "lsi/potentials.hpp"
#include "lsi/spectral.hpp"

namespace lsi {

/// Every recognised key of a run configuration. Files hold one `key = value`
/// per line; '#' starts a comment; lists are comma separated.
struct RunConfig {
  Family family = Family::gaussian;
  std::map<std::string, double> params;
  std::vector<double> x0;  // empty: origin

  int dim = 1;
  double radius = 0.0;  // <= 0: default_radius of the potential
  int points = 1001;

  Backend backend = Backend::dense;
  std::size_t dense_budget = 4096;
  bool allow_iterative_fallback = false;

  double check_tolerance = 1e-8;
  int samples = 100;
  std::vector<double> check_times = {0.1, 0.5, 1.0, 2.0};

  std::vector<double> a_grid = {0.125, 0.25, 0.375};
  std::vector<double> c_ladder;  // empty: default ladder
  double lyapunov_tolerance = 1e-8;

  double t0 = 1.0;
  std::optional<double> K_override;
  bool t0_scan = false;

  int oracle_starts = 12;
  int oracle_iters = 200;

  std::vector<double> flow_times = {1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0};
  double fd_step = 0.0;

  std::optional<double> converse_rho;
  std::vector<double> converse_c_ladder;  // empty: rho 2^k, k = -1..4
  double residual_tol = 1e-10;

  std::vector<std::filesystem::path> corpus;  // member configs, relative to this file

  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;

  PotentialSpec potential() const;
  /// Point x0 of dimension `dim` (origin when x0 is empty).
  Point base_point() const;
  double effective_radius() const;
  CertifyOptions certify_options() const;
  FlowOptions flow_options() const;
};

/// Parses `key = value` text. Throws ConfigError on unknown keys, duplicate
/// keys, malformed values and out-of-range numbers. `base_dir` resolves
/// relative corpus members.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace lsi
