#include "lsi/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lsi/converse.hpp"
#include "lsi/error.hpp"
#include "lsi/sampling.hpp"
#include "lsi/semigroup_checks.hpp"

namespace lsi {

namespace {

struct Context {
  const RunConfig& cfg;
  PotentialSpec potential;
  std::shared_ptr<const SpectralDecomposition> dec;
};

Context prepare(const RunConfig& cfg) {
  auto p = cfg.potential();
  const Grid grid = build_grid(cfg.dim, cfg.effective_radius(), cfg.points);
  const Generator gen = build_generator(p, grid);
  return {cfg, std::move(p), std::make_shared<const SpectralDecomposition>(decompose(gen, cfg.certify_options().spectral))};
}

Json checks_json(const std::vector<CheckReport>& checks) {
  Json out = Json::array();
  for (const auto& c : checks) out.push_back(to_json(c));
  return out;
}

bool all_passed(const std::vector<CheckReport>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckReport& c) { return c.passed; });
}

// 1 + 0.3 (mode_1 + mode_2) / max: positive, bounded and away from the
// exponential equality case of the Gaussian.
GridFunction probe_function(const SpectralDecomposition& dec) {
  const GridFunction m = dec.mode(1) + dec.mode(2);
  return (1.0 + 0.3 * m.array() / m.cwiseAbs().maxCoeff()).matrix();
}

std::vector<double> times_from(const std::vector<double>& times, double t0) {
  std::vector<double> out;
  for (double t : times) {
    if (t >= t0) out.push_back(t);
  }
  if (out.empty()) out.push_back(t0);
  return out;
}

CheckReport trace_check(const std::string& name, const std::vector<FlowTrace>& traces) {
  CheckReport report(name, 0.0);
  for (std::size_t k = 0; k < traces.size(); ++k) {
    Location where;
    where.sample = static_cast<std::int64_t>(k);
    report.record(traces[k].monotone ? 0.0 : -1.0, where);
    report.details["worst_slope_" + std::to_string(k)] = traces[k].worst_slope;
  }
  report.finalize();
  return report;
}

Json run_certify(const Context& ctx, bool& passed) {
  const auto rep = certify(ctx.potential, *ctx.dec, ctx.cfg.certify_options());
  passed = rep.all_passed();
  return to_json(rep);
}

Json run_flow(const Context& ctx, bool& passed) {
  const auto& cfg = ctx.cfg;
  const auto& dec = *ctx.dec;
  const Grid& grid = dec.grid();
  const auto rep = certify(ctx.potential, dec, cfg.certify_options());
  const auto options = cfg.flow_options();
  std::mt19937_64 rng(cfg.seed);
  const int samples = std::min(cfg.samples, 50);
  std::vector<CheckReport> checks;
  std::vector<std::string> notes;
  Json traces = Json::array();

  const double kappa = rep.curvature.kappa;
  const GridFunction probe = probe_function(dec);
  if (rep.curvature.log_concave) {
    std::vector<FlowTrace> phis;
    phis.push_back(trace_phi(dec, probe, kappa, cfg.flow_times, options));
    for (int s = 0; s < samples; ++s) {
      phis.push_back(trace_phi(dec, random_positive_function(grid, rng), kappa, cfg.flow_times, options));
    }
    traces.push_back(to_json(phis.front()));
    checks.push_back(trace_check("phi_monotone", phis));
  } else {
    notes.push_back("potential is not log-concave: Phi monotonicity not asserted");
  }

  if (rep.chain) {
    const auto& chain = *rep.chain;
    const auto times = times_from(cfg.flow_times, chain.t0);
    std::vector<FlowTrace> psis;
    psis.push_back(trace_psi(dec, probe, chain, times, options));
    CheckReport theta("theta_bounds", cfg.check_tolerance);
    theta.merge(theta_bounds(dec, probe, chain, cfg.check_tolerance));
    for (int s = 0; s < samples; ++s) {
      const GridFunction f = random_smooth_function(grid, rng);
      psis.push_back(trace_psi(dec, f, chain, times, options));
      theta.merge(theta_bounds(dec, f, chain, cfg.check_tolerance));
    }
    theta.finalize();
    traces.push_back(to_json(psis.front()));
    checks.push_back(trace_check("psi_monotone", psis));
    checks.push_back(theta);
  } else {
    notes.push_back("no constant chain on this branch: Psi and Theta bounds not evaluated");
  }

  // Ent(P f^2) - Ent*((P f)^2) = Theta1 + Theta2 and Theta2 >= 0.
  CheckReport identity("theta_identity", 1e-10);
  CheckReport theta2("theta2_nonnegative", 1e-12);
  for (double t : cfg.flow_times) {
    const auto th = theta_values(dec, probe, t);
    Location where;
    where.time = t;
    const double scale = std::max({1.0, std::abs(th.ent_pf2), std::abs(th.ent_star)});
    identity.record(-std::abs(th.ent_pf2 - th.ent_star - th.theta1 - th.theta2) / scale, where);
    theta2.record(th.theta2, where);
  }
  identity.finalize();
  theta2.finalize();
  checks.push_back(identity);
  checks.push_back(theta2);

  CheckReport rothaus("rothaus", 1e-10);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int s = 0; s < cfg.samples; ++s) rothaus.merge(check_rothaus(dec.measure(), random_smooth_function(grid, rng), shift(rng)));
  rothaus.finalize();
  checks.push_back(rothaus);

  const double t_probe = cfg.flow_times.front();
  checks.push_back(check_variance_derivative(dec, probe, t_probe, 1e-6, options));
  if (grid.dim() == 1) {
    checks.push_back(check_energy_derivative(dec, ctx.potential, dec.mode(std::min(2, dec.mode_count() - 1)),
                                             0.5, options));
    checks.push_back(check_entstar_derivative(dec, probe, t_probe, options));
  } else {
    notes.push_back("pointwise derivative identities are evaluated in dimension 1 only");
  }

  std::vector<double> table_times = {0.0};
  table_times.insert(table_times.end(), cfg.flow_times.begin(), cfg.flow_times.end());
  write_traces_csv(cfg.output_dir / "traces.csv",
                   flow_table(dec, probe, rep.curvature.log_concave ? kappa : 0.0, rep.chain ? &*rep.chain : nullptr,
                              table_times));

  passed = all_passed(checks);
  Json j;
  j["branch"] = rep.branch;
  j["kappa"] = kappa;
  j["chain"] = rep.chain ? to_json(*rep.chain) : Json(nullptr);
  j["traces"] = traces;
  j["checks"] = checks_json(checks);
  j["notes"] = notes;
  return j;
}

Json run_converse(const Context& ctx, bool& passed) {
  const auto& cfg = ctx.cfg;
  const auto& dec = *ctx.dec;
  const Generator& gen = dec.generator();
  const Point x0 = ctx.potential.x0();

  double rho = 0.0;
  double C = std::numeric_limits<double>::quiet_NaN();
  if (cfg.converse_rho) {
    rho = *cfg.converse_rho;
  } else {
    const auto rep = certify(ctx.potential, dec, cfg.certify_options());
    C = rep.C_certified;
    rho = 1.0 / (2.0 * C);
  }
  const auto ladder = cfg.converse_c_ladder.empty() ? default_converse_ladder(rho) : cfg.converse_c_ladder;
  const auto scan = scan_converse_ladder(gen, x0, rho, ladder);

  Json ladder_json = Json::array();
  for (const auto& e : scan.entries) {
    ladder_json.push_back(Json{{"c", e.c},
                               {"b", e.b},
                               {"lambda_min", e.lambda_min},
                               {"tail_decreasing", e.tail_decreasing},
                               {"accepted", e.accepted},
                               {"skipped", e.skipped}});
  }
  if (scan.best < 0) {
    double lambda = std::numeric_limits<double>::infinity();
    bool evaluated = false;
    for (const auto& e : scan.entries) {
      if (e.skipped.empty()) {
        lambda = std::min(lambda, e.lambda_min);
        evaluated = true;
      }
    }
    if (!evaluated) throw NumericalError("converse: every ladder value of c was skipped (overflow or tail growth)");
    throw IndefiniteOperator("converse: operator -L + phi is indefinite for every c on the ladder (rho " +
                                 format_number(rho) + ", smallest eigenvalue " + format_number(lambda) + ")",
                             lambda);
  }

  const double c = scan.entries[static_cast<std::size_t>(scan.best)].c;
  const auto prob = schroedinger_potential(gen, x0, rho, c);
  const auto result = solve_lyapunov_from_lsi(gen, prob, cfg.residual_tol);
  std::vector<CheckReport> checks;
  checks.push_back(coercivity_check(gen, prob, result.u, cfg.check_tolerance));

  CheckReport positivity("u_positive", 0.0);
  Location where;
  Eigen::Index arg = 0;
  positivity.record(result.u.minCoeff(&arg), where);
  positivity.worst_location.node = arg;
  positivity.finalize();
  checks.push_back(positivity);

  CheckReport recheck("certificate_reverified", cfg.lyapunov_tolerance);
  const auto cert = verify_lyapunov(gen, result.u, result.certificate.c, result.certificate.b, x0,
                                    cfg.lyapunov_tolerance);
  recheck.record(cert.worst_scaled_margin, Location{cert.worst_node, -1, std::numeric_limits<double>::quiet_NaN(), -1});
  recheck.finalize();
  checks.push_back(recheck);

  const auto chain = converse_chain(dec, ctx.potential, result, cfg.t0);
  CheckReport finite("round_trip_chain_finite", 0.0);
  finite.record(std::isfinite(chain.C_lsi) && chain.C_lsi > 0.0 ? 0.0 : -1.0, Location{});
  finite.details["C_lsi"] = chain.C_lsi;
  finite.finalize();
  checks.push_back(finite);

  passed = all_passed(checks);
  Json j;
  j["C_lsi_input"] = std::isfinite(C) ? Json(C) : Json(nullptr);
  j["rho"] = rho;
  j["ladder"] = ladder_json;
  j["result"] = to_json(result);
  j["round_trip_chain"] = to_json(chain);
  j["checks"] = checks_json(checks);
  return j;
}

Json run_harnack(const Context& ctx, bool& passed) {
  const auto& cfg = ctx.cfg;
  const auto& dec = *ctx.dec;
  const Grid& grid = dec.grid();
  const auto curvature = curvature_lower_bound(ctx.potential, grid.radius());
  std::mt19937_64 rng(cfg.seed);
  const auto pairs = sample_pairs(grid, static_cast<std::size_t>(cfg.samples), rng);

  const GridFunction positive = random_positive_function(grid, rng);
  const GridFunction smooth = random_smooth_function(grid, rng);
  std::vector<CheckReport> checks;
  checks.push_back(check_harnack(dec, positive, curvature.signed_K, cfg.check_times, pairs, cfg.check_tolerance));
  checks.push_back(check_gradient_commutation(dec, smooth, curvature.signed_K, cfg.check_times));
  const double K_upper = cfg.K_override.value_or(std::max(curvature.K, kMinChainCurvature));
  const auto upper = check_pt_upper(dec, positive, K_upper, cfg.t0, ctx.potential.x0(), cfg.check_tolerance);
  checks.push_back(upper.report);

  passed = all_passed(checks);
  Json j;
  j["curvature"] = to_json(curvature);
  j["K_pt_upper"] = K_upper;
  j["mu0"] = upper.mu0;
  j["pairs"] = pairs.size();
  j["checks"] = checks_json(checks);
  return j;
}

Json run_spectrum(const Context& ctx, bool& passed) {
  const auto& dec = *ctx.dec;
  write_spectrum_csv(ctx.cfg.output_dir / "spectrum.csv", dec.eigenvalues());
  passed = true;
  Json low = Json::array();
  for (int k = 0; k < std::min(dec.mode_count(), 10); ++k) low.push_back(dec.eigenvalues()[k]);
  Json j;
  j["backend"] = dec.backend() == Backend::dense ? "dense" : "iterative";
  j["nodes"] = dec.size();
  j["radius"] = dec.grid().radius();
  j["tail_ratio"] = dec.measure().tail_ratio;
  j["spectral_gap"] = spectral_gap(dec);
  j["lowest_eigenvalues"] = low;
  return j;
}

Json run_oracle(const Context& ctx, bool& passed) {
  OracleOptions opts;
  opts.starts = ctx.cfg.oracle_starts;
  opts.iters = ctx.cfg.oracle_iters;
  const auto result = oracle_lsi_lower_bound(*ctx.dec, opts);
  passed = true;
  Json starts = Json::array();
  for (double v : result.start_values) starts.push_back(std::isfinite(v) ? Json(v) : Json(nullptr));
  Json j;
  j["value"] = result.value;
  j["best_start"] = result.best_start;
  j["start_values"] = starts;
  return j;
}

int exit_code_of(const std::exception_ptr& error, Json& j) {
  try {
    std::rethrow_exception(error);
  } catch (const IndefiniteOperator& e) {
    j["status"] = "numerical_error";
    j["error"] = e.what();
    j["indefinite_operator"] = Json{{"operator", "-L + phi"}, {"lambda_min", e.lambda_min()}};
    return exit_numerical_error;
  } catch (const ConfigError& e) {
    j["status"] = "config_error";
    j["error"] = e.what();
    return exit_config_error;
  } catch (const CheckFailure& e) {
    j["status"] = "check_failed";
    j["error"] = e.what();
    return exit_check_failed;
  } catch (const NumericalError& e) {
    j["status"] = "numerical_error";
    j["error"] = e.what();
    return exit_numerical_error;
  } catch (const std::exception& e) {
    j["status"] = "numerical_error";
    j["error"] = e.what();
    return exit_numerical_error;
  }
}

Json single(Command command, const RunConfig& cfg, int& code) {
  Json j;
  j["command"] = std::string(command_name(command));
  j["potential"] = std::string(family_name(cfg.family));
  j["seed"] = cfg.seed;
  try {
    const Context ctx = prepare(cfg);
    bool passed = false;
    Json body;
    switch (command) {
      case Command::certify: body = run_certify(ctx, passed); break;
      case Command::flow: body = run_flow(ctx, passed); break;
      case Command::converse: body = run_converse(ctx, passed); break;
      case Command::harnack: body = run_harnack(ctx, passed); break;
      case Command::spectrum: body = run_spectrum(ctx, passed); break;
      case Command::oracle: body = run_oracle(ctx, passed); break;
      case Command::corpus: throw ConfigError("corpus cannot be nested");
    }
    code = passed ? exit_ok : exit_check_failed;
    j["status"] = passed ? "ok" : "check_failed";
    j["result"] = body;
  } catch (...) {
    code = exit_code_of(std::current_exception(), j);
  }
  j["exit_code"] = code;
  return j;
}

}  // namespace

Command parse_command(std::string_view name) {
  for (auto c : {Command::certify, Command::flow, Command::converse, Command::harnack, Command::spectrum,
                 Command::oracle, Command::corpus}) {
    if (command_name(c) == name) return c;
  }
  throw ConfigError("unknown command " + std::string(name));
}

std::string_view command_name(Command command) {
  switch (command) {
    case Command::certify: return "certify";
    case Command::flow: return "flow";
    case Command::converse: return "converse";
    case Command::harnack: return "harnack";
    case Command::spectrum: return "spectrum";
    case Command::oracle: return "oracle";
    case Command::corpus: return "corpus";
  }
  return "unknown";
}

RunResult run(Command command, const RunConfig& config) {
  RunResult out;
  if (command != Command::corpus) {
    out.report = single(command, config, out.exit_code);
  } else {
    out.report["command"] = "corpus";
    Json members = Json::array();
    if (config.corpus.empty()) {
      out.exit_code = exit_config_error;
      out.report["status"] = "config_error";
      out.report["error"] = "corpus.members is empty";
    }
    for (const auto& path : config.corpus) {
      Json member;
      member["config"] = path.filename().string();
      try {
        RunConfig sub = load_config(path);
        sub.output_dir = config.output_dir / path.stem();
        sub.seed = config.seed;
        for (auto c : {Command::certify, Command::flow, Command::converse}) {
          int code = exit_ok;
          Json r = single(c, sub, code);
          write_text(sub.output_dir / (std::string(command_name(c)) + ".json"), dump_json(r));
          member[std::string(command_name(c))] = Json{{"exit_code", code}, {"status", r["status"]}};
          out.exit_code = std::max(out.exit_code, code);
        }
      } catch (const ConfigError& e) {
        member["error"] = e.what();
        out.exit_code = std::max<int>(out.exit_code, exit_config_error);
      }
      members.push_back(member);
    }
    out.report["members"] = members;
    if (!out.report.contains("status")) out.report["status"] = out.exit_code == exit_ok ? "ok" : "failed";
    out.report["exit_code"] = out.exit_code;
  }
  try {
    write_text(config.output_dir / "report.json", dump_json(out.report));
  } catch (const ConfigError&) {
    if (out.exit_code == exit_ok) out.exit_code = exit_config_error;
  }
  return out;
}

}  // namespace lsi
