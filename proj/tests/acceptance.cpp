// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "lsi/certify.hpp"
#include "lsi/config.hpp"
#include "lsi/converse.hpp"
#include "lsi/error.hpp"
#include "lsi/flow.hpp"
#include "lsi/lyapunov.hpp"
#include "lsi/sampling.hpp"
#include "lsi/semigroup_checks.hpp"
#include "lsi/spectral.hpp"

#include "fixtures.hpp"

using namespace lsi;
using lsi::testing::double_well;
using lsi::testing::gaussian;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream why;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) why << "; ";
      ok = false;
      why << what;
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

GridFunction exp_quadratic(const Grid& grid, double a) {
  return tabulate(grid, [a](const Point& x) { return std::exp(a * x.squaredNorm()); });
}

std::vector<double> sample_times(double from, double to, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(from + (to - from) * k / (n - 1));
  return out;
}

const CertifyReport& double_well_report() {
  static const CertifyReport rep = certify(double_well().p, *double_well().dec);
  return rep;
}

void gaussian_gap(Outcome& o) {
  const double fine = spectral_gap(*gaussian(2001).dec);
  const double coarse = spectral_gap(*gaussian(1001).dec);
  o.require(std::abs(fine - 1.0) <= 1e-3, "gap " + fmt(fine));
  const double order = std::log2(std::abs(coarse - 1.0) / std::abs(fine - 1.0));
  o.require(order >= 1.9, "order " + fmt(order));
  const auto& ev = gaussian().dec->eigenvalues();
  for (int n = 2; n <= 4; ++n) o.require(std::abs(ev[n] - n) <= 1e-3, "nu_" + std::to_string(n) + " " + fmt(ev[n]));
  o.why << (o.ok ? "gap " + fmt(fine) + ", order " + fmt(order) : "");
}

void gaussian_sharpness(Outcome& o) {
  const auto& s = gaussian();
  const auto rep = certify(s.p, *s.dec);
  o.require(rep.branch == "log-concave", "branch " + rep.branch);
  o.require(rep.C_certified == 2.0, "C " + fmt(rep.C_certified));
  for (double lambda : {0.25, 0.5, 1.0}) {
    const double r = lsi_ratio(s.gen(), (0.5 * lambda * s.x().array()).exp().matrix());
    o.require(std::abs(r - 2.0) <= 1e-2, "tilt ratio " + fmt(r));
  }
  o.require(rep.oracle.value <= 2.0 + 1e-2, "ascent " + fmt(rep.oracle.value));
  o.require(rep.oracle.value >= 2.0 - 1e-2, "ascent " + fmt(rep.oracle.value));
  if (o.ok) o.why << "C = 2, oracle " << fmt(rep.oracle.value);
}

void monotonicity(Outcome& o) {
  const auto& g = gaussian();
  std::mt19937_64 rng(31);
  const auto times = sample_times(0.05, 5.0, 20);
  double worst_phi = -INFINITY;
  for (int k = 0; k < 50; ++k) {
    const GridFunction f = random_positive_function(g.grid, rng);
    const auto tr = trace_phi(*g.dec, f, 1.0, times);
    // Strict bound, without the roundoff floor the library adds.
    const double bound = 1e-8 * std::abs(phi_functional(*g.dec, f, 1.0, 0.0));
    o.require(tr.worst_slope <= bound, "Phi slope " + fmt(tr.worst_slope) + " > " + fmt(bound));
    worst_phi = std::max(worst_phi, tr.worst_slope);
  }
  const auto& rep = double_well_report();
  o.require(rep.chain.has_value(), "no chain on the double well");
  if (!rep.chain) return;
  const auto& d = double_well();
  const auto psi_times = sample_times(rep.chain->t0, 10.0, 20);
  double worst_psi = -INFINITY;
  for (int k = 0; k < 20; ++k) {
    const auto tr = trace_psi(*d.dec, random_smooth_function(d.grid, rng), *rep.chain, psi_times);
    o.require(tr.worst_slope <= 0.0, "Psi slope " + fmt(tr.worst_slope));
    o.require(tr.values.at("Psi").front() >= 0.0, "Psi(t0) " + fmt(tr.values.at("Psi").front()));
    worst_psi = std::max(worst_psi, tr.worst_slope);
  }
  if (o.ok) o.why << "worst Phi slope " << fmt(worst_phi) << ", worst Psi slope " << fmt(worst_psi);
}

void derivative_identity(Outcome& o) {
  const auto& g = gaussian();
  double worst = 0.0;
  for (double t : {0.25, 0.5, 1.0, 2.0}) {
    const auto r = check_energy_derivative(*g.dec, g.p, g.x(), t);
    const double exact = -2.0 * std::exp(-2.0 * t);
    const double rel = std::abs(r.details.at("lhs") - exact) / std::abs(exact);
    o.require(rel <= 1e-3 && r.passed, "f = x relative error " + fmt(rel));
    worst = std::max(worst, rel);
  }
  const auto& c = double_well(1001);
  const auto& f = double_well(2001);
  double min_order = INFINITY;
  for (int mode : {1, 2, 3}) {
    const auto rc = check_energy_derivative(*c.dec, c.p, c.dec->mode(mode), 0.5);
    const auto rf = check_energy_derivative(*f.dec, f.p, f.dec->mode(mode), 0.5);
    const double order = std::log2(rc.details.at("relative_error") / rf.details.at("relative_error"));
    o.require(order >= 1.5, "mode " + std::to_string(mode) + " order " + fmt(order));
    min_order = std::min(min_order, order);
  }
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10; ++k) {
    const GridFunction h = random_smooth_function(f.grid, rng);
    const GridFunction g = random_positive_function(f.grid, rng, 2.0);
    for (double t : {0.2, 1.0}) {
      o.require(check_variance_derivative(*f.dec, h, t).passed, "variance derivative");
      o.require(check_entstar_derivative(*f.dec, g, t).passed, "Ent* derivative");
    }
  }
  if (o.ok) o.why << "f = x relative error " << fmt(worst) << ", min order " << fmt(min_order);
}

void semigroup_bounds(Outcome& o) {
  std::mt19937_64 rng(51);
  const std::vector<double> times = {0.1, 0.5, 1.0, 2.0};
  for (const auto* s : {&gaussian(), &double_well()}) {
    const std::string name = s == &gaussian() ? "gaussian" : "double well";
    const auto bound = curvature_lower_bound(s->p, s->grid.radius());
    const double K = bound.signed_K;
    const auto pairs = sample_pairs(s->grid, 25, rng);  // 25 pairs x 4 times = 100 samples
    const GridFunction f = random_positive_function(s->grid, rng, 2.0);
    const auto h = check_harnack(*s->dec, f, K, times, pairs);
    o.require(h.passed && h.worst_margin >= -1e-6, name + " harnack " + fmt(h.worst_margin));
    // 100 sampled (f, x, t).
    std::uniform_int_distribution<std::size_t> pick_time(0, times.size() - 1);
    for (const auto& pair : sample_pairs(s->grid, 100, rng)) {
      const auto gc = check_gradient_commutation(*s->dec, random_smooth_function(s->grid, rng), K,
                                                 {times[pick_time(rng)]}, std::vector<std::size_t>{pair.first});
      o.require(gc.passed && gc.worst_margin >= -1e-6, name + " gradient " + fmt(gc.worst_margin));
    }
    const double Kp = std::max(K, kMinChainCurvature);
    for (int k = 0; k < 25; ++k) {
      const GridFunction g = random_positive_function(s->grid, rng, 2.0);
      for (double t : times) {
        const auto pu = check_pt_upper(*s->dec, g, Kp, t, Point::Zero(1));
        o.require(pu.report.passed && pu.report.worst_margin >= -1e-6, name + " pt_upper " + fmt(pu.report.worst_margin));
      }
    }
  }
  const auto& g = gaussian();
  const GridFunction ones = GridFunction::Ones(static_cast<Eigen::Index>(g.grid.size()));
  const double mu0 = check_pt_upper(*g.dec, ones, 0.1, 1.0, Point::Zero(1)).mu0;
  o.require(std::abs(mu0 - 1.0 / std::sqrt(1.4)) <= 1e-3, "mu0 " + fmt(mu0));
  if (o.ok) o.why << "mu0 " << fmt(mu0);
}

void lyapunov_certificates(Outcome& o) {
  for (const auto* s : {&gaussian(), &double_well()}) {
    const double b = s == &gaussian() ? 0.5 : 1.0;
    const auto cert = verify_lyapunov(s->gen(), exp_quadratic(s->grid, 0.25), 0.25, b, Point::Zero(1), 1e-6);
    o.require(cert.passed && cert.worst_scaled_margin >= -1e-6, "certificate margin " + fmt(cert.worst_scaled_margin));
    std::vector<GridFunction> hs;
    for (int k = 1; k <= 20; ++k) hs.push_back(s->dec->mode(k));
    std::mt19937_64 rng(61);
    for (auto& f : random_smooth_functions(s->grid, rng, 100)) hs.push_back(std::move(f));
    const auto r = check_translya(s->gen(), cert, hs);
    o.require(r.passed, "translya " + fmt(r.worst_margin));
  }
  if (o.ok) o.why << "both certificates verify";
}

void chain_soundness(Outcome& o) {
  const auto corpus = load_config(std::string(LSI_CONFIG_DIR) + "/corpus.cfg").corpus;
  int on_branch = 0;
  for (const auto& path : corpus) {
    const auto cfg = load_config(path);
    const auto grid = build_grid(cfg.dim, cfg.effective_radius(), cfg.points);
    const auto dec = decompose(build_generator(cfg.potential(), grid));
    const auto rep = certify(cfg.potential(), dec, cfg.certify_options());
    if (!rep.chain) continue;
    ++on_branch;
    const std::string name = path.stem().string();
    o.require(rep.C_certified >= rep.oracle.value, name + " C " + fmt(rep.C_certified) + " < oracle");
    std::mt19937_64 rng(71);
    const auto fs = random_smooth_functions(grid, rng, 100);
    o.require(check_lsi(dec.generator(), rep.C_certified, fs).passed, name + " direct inequality");
    const std::vector<GridFunction> fifty(fs.begin(), fs.begin() + 50);
    o.require(check_pre_last(dec.generator(), *rep.chain, fifty).passed, name + " step-3 bound");
    for (const auto& f : fifty) {
      const auto th = theta_bounds(dec, f, *rep.chain);
      if (!th.passed) {
        o.require(false, name + " theta bounds " + fmt(th.worst_margin));
        break;
      }
    }
  }
  o.require(on_branch >= 3, "only " + std::to_string(on_branch) + " corpus members on the chain branch");
  if (o.ok) o.why << on_branch << " corpus members sound";
}

void rothaus(Outcome& o) {
  const auto& s = double_well(1001);
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> a(-5.0, 5.0);
  double worst = INFINITY;
  for (int k = 0; k < 1000; ++k) {
    const auto r = check_rothaus(s.m(), random_smooth_function(s.grid, rng), a(rng));
    o.require(r.passed && r.worst_margin >= -1e-10, "margin " + fmt(r.worst_margin));
    worst = std::min(worst, r.worst_margin);
  }
  if (o.ok) o.why << "worst margin " << fmt(worst);
}

void converse_round_trip(Outcome& o) {
  const auto& s = double_well();
  const auto& rep = double_well_report();
  const double rho = 1.0 / (2.0 * rep.C_certified);
  const auto scan = scan_converse_ladder(s.gen(), Point::Zero(1), rho, default_converse_ladder(rho));
  o.require(scan.best >= 0, "no positive definite rung");
  if (scan.best < 0) return;
  const auto prob = schroedinger_potential(s.gen(), Point::Zero(1), rho, scan.entries[static_cast<std::size_t>(scan.best)].c);
  const auto r = solve_lyapunov_from_lsi(s.gen(), prob);
  o.require(r.u.minCoeff() > 0.0, "u not positive");
  o.require(r.residual <= 1e-10, "residual " + fmt(r.residual));
  o.require(coercivity_check(s.gen(), prob, r.u).passed, "coercivity");
  const auto cert = verify_lyapunov(s.gen(), r.u, r.certificate.c, r.certificate.b, Point::Zero(1));
  o.require(cert.passed, "re-verification " + fmt(cert.worst_scaled_margin));
  const auto chain = converse_chain(*s.dec, s.p, r);
  o.require(std::isfinite(chain.C_lsi) && chain.C_lsi > 0.0, "C' " + fmt(chain.C_lsi));

  const auto& g = gaussian();
  const double b = schroedinger_potential(g.gen(), Point::Zero(1), 0.25, 0.25).b;
  o.require(std::abs(b - 2.0 * std::sqrt(2.0)) <= 1e-3, "gaussian b " + fmt(b));
  if (o.ok) o.why << "C' " << fmt(chain.C_lsi) << ", gaussian b " << fmt(b);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"gaussian spectral gap", gaussian_gap},
      {"gaussian sharpness", gaussian_sharpness},
      {"monotonicity suites", monotonicity},
      {"energy derivative identity", derivative_identity},
      {"semigroup bounds", semigroup_bounds},
      {"lyapunov certificates", lyapunov_certificates},
      {"constant chain soundness", chain_soundness},
      {"rothaus lemma", rothaus},
      {"converse round trip", converse_round_trip},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[k].second(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.ok) ++failures;
    std::printf("%s %zu %s (%.1f s): %s\n", o.ok ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(), secs,
                o.why.str().c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
