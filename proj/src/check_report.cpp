#include "lsi/check_report.hpp"

#include <cmath>

namespace lsi {

void CheckReport::record(double margin, const Location& where) {
  ++samples;
  // NaN margins count as violations.
  if (std::isnan(margin)) margin = -std::numeric_limits<double>::infinity();
  if (margin < worst_margin) {
    worst_margin = margin;
    worst_location = where;
  }
  finalize();
}

void CheckReport::merge(const CheckReport& other) {
  samples += other.samples;
  skipped += other.skipped;
  if (other.worst_margin < worst_margin) {
    worst_margin = other.worst_margin;
    worst_location = other.worst_location;
  }
  for (const auto& [key, value] : other.details) details.emplace(key, value);
  finalize();
}

}  // namespace lsi
