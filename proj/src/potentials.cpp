#include "lsi/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>

#include <Eigen/Eigenvalues>

#include "lsi/error.hpp"

namespace lsi {

namespace {

constexpr int kMaxDegree = 8;

double horner(const std::vector<double>& a, double x) {
  double acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * x + *it;
  return acc;
}

std::vector<double> derivative(const std::vector<double>& a) {
  if (a.size() <= 1) return {0.0};
  std::vector<double> d(a.size() - 1);
  for (std::size_t k = 1; k < a.size(); ++k) d[k - 1] = static_cast<double>(k) * a[k];
  return d;
}

void trim(std::vector<double>& a) {
  while (a.size() > 1 && a.back() == 0.0) a.pop_back();
}

// Real roots of a polynomial via the companion matrix.
std::vector<double> real_roots(std::vector<double> a) {
  trim(a);
  const int n = static_cast<int>(a.size()) - 1;
  if (n < 1) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) companion(i, n - 1) = -a[i] / a[n];
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<double> roots;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> z = solver.eigenvalues()(i);
    if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z.real()))) roots.push_back(z.real());
  }
  return roots;
}

double require(const std::map<std::string, double>& params, const std::string& key) {
  auto it = params.find(key);
  if (it == params.end()) throw ConfigError("missing potential parameter '" + key + "'");
  if (!std::isfinite(it->second)) throw ConfigError("potential parameter '" + key + "' is not finite");
  return it->second;
}

void reject_extra(const std::map<std::string, double>& params, const std::set<std::string>& allowed,
                  std::string_view family) {
  for (const auto& [key, _] : params) {
    if (!allowed.count(key)) {
      throw ConfigError("unknown parameter '" + key + "' for family " + std::string(family));
    }
  }
}

}  // namespace

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "double_well") return Family::double_well;
  if (name == "quartic") return Family::quartic;
  if (name == "polynomial") return Family::polynomial;
  if (name == "flat") return Family::flat;
  throw ConfigError("unknown potential family '" + std::string(name) + "'");
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::gaussian: return "gaussian";
    case Family::double_well: return "double_well";
    case Family::quartic: return "quartic";
    case Family::polynomial: return "polynomial";
    case Family::flat: return "flat";
  }
  return "unknown";
}

PotentialSpec::PotentialSpec(Family family, std::map<std::string, double> params, Point x0,
                             std::vector<double> coefficients)
    : family_(family), params_(std::move(params)), x0_(std::move(x0)),
      coefficients_(std::move(coefficients)) {}

double PotentialSpec::profile(double x) const { return horner(coefficients_, x); }

double PotentialSpec::profile_d1(double x) const { return horner(derivative(coefficients_), x); }

double PotentialSpec::profile_d2(double x) const {
  return horner(derivative(derivative(coefficients_)), x);
}

double PotentialSpec::value(const Point& x) const {
  double v = 0.0;
  for (Eigen::Index d = 0; d < x.size(); ++d) v += profile(x[d]);
  return v;
}

Eigen::VectorXd PotentialSpec::gradient(const Point& x) const {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) g[d] = profile_d1(x[d]);
  return g;
}

Eigen::MatrixXd PotentialSpec::hessian(const Point& x) const {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(x.size(), x.size());
  for (Eigen::Index d = 0; d < x.size(); ++d) h(d, d) = profile_d2(x[d]);
  return h;
}

PotentialSpec make_potential(Family family, const std::map<std::string, double>& params,
                             const Point& x0) {
  if (x0.size() != 1 && x0.size() != 2) throw ConfigError("potential dimension must be 1 or 2");
  if (!x0.allFinite()) throw ConfigError("base point x0 is not finite");

  std::vector<double> a(kMaxDegree + 1, 0.0);
  const auto name = family_name(family);
  switch (family) {
    case Family::gaussian:
      reject_extra(params, {"scale"}, name);
      a[2] = 0.5 * require(params, "scale");
      break;
    case Family::double_well:
      reject_extra(params, {"a4", "a2"}, name);
      a[4] = require(params, "a4");
      a[2] = require(params, "a2");
      break;
    case Family::quartic:
      reject_extra(params, {"a4"}, name);
      a[4] = require(params, "a4");
      break;
    case Family::polynomial: {
      std::set<std::string> allowed;
      for (int k = 0; k <= kMaxDegree; ++k) allowed.insert("a" + std::to_string(k));
      reject_extra(params, allowed, name);
      for (int k = 0; k <= kMaxDegree; ++k) {
        auto it = params.find("a" + std::to_string(k));
        if (it != params.end()) {
          if (!std::isfinite(it->second)) throw ConfigError("polynomial coefficient is not finite");
          a[k] = it->second;
        }
      }
      break;
    }
    case Family::flat:
      reject_extra(params, {}, name);
      break;
  }
  trim(a);

  if (family != Family::flat) {
    const int degree = static_cast<int>(a.size()) - 1;
    if (degree < 2 || degree % 2 != 0 || a.back() <= 0.0) {
      throw ConfigError("non-integrable potential: leading term must have even degree >= 2 and a "
                        "positive coefficient");
    }
  }
  return PotentialSpec(family, params, x0, std::move(a));
}

CurvatureBound curvature_lower_bound(const PotentialSpec& p, double domain_radius) {
  if (!(domain_radius > 0.0)) throw ConfigError("domain radius must be positive");
  const auto second = derivative(derivative(p.coefficients()));
  const auto third = derivative(second);

  // Candidates: the box endpoints plus interior critical points of p''.
  CurvatureBound out;
  out.kappa = std::numeric_limits<double>::infinity();
  auto consider = [&](double x, bool inside) {
    const double v = horner(second, x);
    if (v < out.kappa) {
      out.kappa = v;
      out.argmin = x;
      out.attained_inside = inside;
    }
  };
  consider(-domain_radius, false);
  consider(domain_radius, false);
  for (double r : real_roots(third)) {
    if (std::abs(r) < domain_radius) consider(r, true);
  }
  // A constant p'' is attained everywhere.
  if (second.size() == 1) out.attained_inside = true;

  out.signed_K = -out.kappa;
  out.K = std::max(-out.kappa, 0.0);
  out.log_concave = out.kappa > 0.0;
  return out;
}

double squared_distance(const Point& x, const Point& y) { return (x - y).squaredNorm(); }

double squared_distance(const PotentialSpec& p, const Point& x) {
  return squared_distance(x, p.x0());
}

}  // namespace lsi
