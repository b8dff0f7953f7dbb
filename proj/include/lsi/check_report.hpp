#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <string>

namespace lsi {

/// Where the most-violated (smallest) margin of a check was found. Unused
/// fields stay at their sentinel values.
struct Location {
  std::int64_t node = -1;
  std::int64_t other_node = -1;
  double time = std::numeric_limits<double>::quiet_NaN();
  std::int64_t sample = -1;
};

/// Outcome of a sampled inequality check. Margins are slacks of the form
/// (bound - quantity), positive when satisfied, possibly rescaled as the
/// individual check documents. passed <=> worst_margin >= -tolerance.
struct CheckReport {
  std::string name;
  bool passed = true;
  double worst_margin = std::numeric_limits<double>::infinity();
  Location worst_location;
  std::size_t samples = 0;
  std::size_t skipped = 0;
  double tolerance = 0.0;
  /// Named diagnostics (e.g. mu0, observed order, relative error).
  std::map<std::string, double> details;

  explicit CheckReport(std::string check_name = {}, double tol = 0.0)
      : name(std::move(check_name)), tolerance(tol) {}

  void record(double margin, const Location& where);
  void skip() { ++skipped; }
  /// Associative merge; tolerances must agree.
  void merge(const CheckReport& other);
  void finalize() { passed = worst_margin >= -tolerance; }
};

}  // namespace lsi
