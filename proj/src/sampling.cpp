#include "lsi/sampling.hpp"

#include <cmath>
#include <numbers>

namespace lsi {

GridFunction random_smooth_function(const Grid& grid, std::mt19937_64& rng, int terms) {
  std::normal_distribution<double> normal;
  const double a0 = normal(rng);
  std::vector<double> cosines(static_cast<std::size_t>(terms * grid.dim()));
  std::vector<double> sines(cosines.size());
  for (std::size_t k = 0; k < cosines.size(); ++k) {
    cosines[k] = normal(rng);
    sines[k] = normal(rng);
  }
  const double w = std::numbers::pi / grid.radius();
  return tabulate(grid, [&](const Point& x) {
    double v = a0;
    for (int d = 0; d < grid.dim(); ++d) {
      for (int k = 1; k <= terms; ++k) {
        const auto idx = static_cast<std::size_t>(d * terms + k - 1);
        v += (cosines[idx] * std::cos(k * w * x[d]) + sines[idx] * std::sin(k * w * x[d])) / k;
      }
    }
    return v;
  });
}

GridFunction random_positive_function(const Grid& grid, std::mt19937_64& rng, double amplitude,
                                      int terms) {
  return (0.5 * amplitude * random_smooth_function(grid, rng, terms).array()).exp();
}

std::vector<GridFunction> random_smooth_functions(const Grid& grid, std::mt19937_64& rng, int count,
                                                  int terms) {
  std::vector<GridFunction> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) out.push_back(random_smooth_function(grid, rng, terms));
  return out;
}

}  // namespace lsi
