#pragma once

#include <random>
#include <vector>

#include "lsi/discretization.hpp"

namespace lsi {

/// Random smooth function: a0 + sum_{k=1..terms} (a_k cos(k pi x / R) + b_k sin(k pi x / R)) / k
/// per coordinate, with standard normal coefficients.
GridFunction random_smooth_function(const Grid& grid, std::mt19937_64& rng, int terms = 6);

/// Strictly positive random smooth function exp(amplitude * g / 2) with g as above.
GridFunction random_positive_function(const Grid& grid, std::mt19937_64& rng, double amplitude = 0.5,
                                      int terms = 6);

std::vector<GridFunction> random_smooth_functions(const Grid& grid, std::mt19937_64& rng, int count,
                                                  int terms = 6);

}  // namespace lsi
