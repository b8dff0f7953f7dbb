#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace lsi {

using Point = Eigen::VectorXd;

enum class Family {
  gaussian,     // V = scale * |x|^2 / 2
  double_well,  // V = a4 x^4 + a2 x^2 per coordinate
  quartic,      // V = a4 x^4 per coordinate
  polynomial,   // V = sum_k a<k> x^k per coordinate, k <= 8
  flat,         // V = 0; only meaningful on a truncated (reflecting) box
};

Family parse_family(std::string_view name);
std::string_view family_name(Family family);

/// A potential V on R^dim, dim in {1, 2}. In two dimensions the potential is
/// separable: V(x) = p(x_1) + p(x_2) for the one-dimensional polynomial p.
class PotentialSpec {
 public:
  PotentialSpec(Family family, std::map<std::string, double> params, Point x0,
                std::vector<double> coefficients);

  Family family() const { return family_; }
  const std::map<std::string, double>& params() const { return params_; }
  const Point& x0() const { return x0_; }
  int dim() const { return static_cast<int>(x0_.size()); }
  /// Coefficients of p in increasing degree.
  const std::vector<double>& coefficients() const { return coefficients_; }
  /// Whether e^{-V} is integrable on R^dim (false only for the flat family).
  bool integrable() const { return family_ != Family::flat; }

  double profile(double x) const;
  double profile_d1(double x) const;
  double profile_d2(double x) const;

  double value(const Point& x) const;
  Eigen::VectorXd gradient(const Point& x) const;
  Eigen::MatrixXd hessian(const Point& x) const;

 private:
  Family family_;
  std::map<std::string, double> params_;
  Point x0_;
  std::vector<double> coefficients_;
};

/// Builds a potential from its family and named coefficients. Throws
/// ConfigError for an unknown/missing/extra parameter or when e^{-V} is not
/// integrable (odd degree or nonpositive leading coefficient).
PotentialSpec make_potential(Family family,
                             const std::map<std::string, double>& params,
                             const Point& x0);

struct CurvatureBound {
  double kappa = 0.0;      // inf of the smallest Hessian eigenvalue on the box
  double K = 0.0;          // max(-kappa, 0)
  double signed_K = 0.0;   // -kappa
  double argmin = 0.0;     // coordinate where the infimum is attained
  bool log_concave = false;
  /// True when the infimum is attained strictly inside the box, so that it
  /// coincides with the global infimum of p''.
  bool attained_inside = false;
};

/// Infimum of the smallest eigenvalue of Hess V over [-R, R]^dim.
CurvatureBound curvature_lower_bound(const PotentialSpec& p, double domain_radius);

/// |x - x0|^2.
double squared_distance(const PotentialSpec& p, const Point& x);
double squared_distance(const Point& x, const Point& y);

/// Lower clamp applied to K wherever the constant chain divides by K.
inline constexpr double kMinChainCurvature = 1e-6;

}  // namespace lsi
