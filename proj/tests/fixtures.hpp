#pragma once

#include <memory>

#include "lsi/spectral.hpp"

namespace lsi::testing {

struct System {
  PotentialSpec p;
  Grid grid;
  std::shared_ptr<const SpectralDecomposition> dec;
  const Generator& gen() const { return dec->generator(); }
  const WeightedMeasure& m() const { return dec->measure(); }
  GridFunction x() const {
    return tabulate(grid, [](const Point& y) { return y[0]; });
  }
};

inline System make_system(Family family, std::map<std::string, double> params, double radius, int points) {
  auto p = make_potential(family, params, Point::Zero(1));
  auto grid = build_grid(1, radius, points);
  auto dec = std::make_shared<const SpectralDecomposition>(decompose(build_generator(p, grid)));
  return {std::move(p), std::move(grid), std::move(dec)};
}

// V = x^2 / 2 on [-8, 8].
inline const System& gaussian(int points = 2001) {
  static const System s2001 = make_system(Family::gaussian, {{"scale", 1.0}}, 8.0, 2001);
  static const System s1001 = make_system(Family::gaussian, {{"scale", 1.0}}, 8.0, 1001);
  return points == 1001 ? s1001 : s2001;
}

// V = x^4/4 - x^2/2 on [-3.5, 3.5].
inline const System& double_well(int points = 2001) {
  static const System s2001 = make_system(Family::double_well, {{"a4", 0.25}, {"a2", -0.5}}, 3.5, 2001);
  static const System s1001 = make_system(Family::double_well, {{"a4", 0.25}, {"a2", -0.5}}, 3.5, 1001);
  return points == 1001 ? s1001 : s2001;
}

}  // namespace lsi::testing
