#include "lsi/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lsi/error.hpp"

namespace lsi {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json point(const Point& x) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < x.size(); ++k) out.push_back(number(x[k]));
  return out;
}

void dump(const Json& v, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
  const std::string close_pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  switch (v.type()) {
    case Json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (const auto& [key, item] : v.items()) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + Json(key).dump() + (indent > 0 ? ": " : ":");
        dump(item, indent, depth + 1, out);
      }
      out += nl + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      out += "[";
      out += nl;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k > 0) {
          out += ",";
          out += nl;
        }
        out += pad;
        dump(v[k], indent, depth + 1, out);
      }
      out += nl + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double d = v.get<double>();
      out += std::isfinite(d) ? format_number(d) : "null";
      return;
    }
    default:
      out += v.dump();
  }
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const Json& value, int indent) {
  std::string out;
  dump(value, indent, 0, out);
  out += "\n";
  return out;
}

Json to_json(const Location& loc) {
  Json j;
  j["node"] = loc.node;
  j["other_node"] = loc.other_node;
  j["time"] = number(loc.time);
  j["sample"] = loc.sample;
  return j;
}

Json to_json(const CheckReport& report) {
  Json j;
  j["name"] = report.name;
  j["passed"] = report.passed;
  j["worst_margin"] = number(report.worst_margin);
  j["worst_location"] = to_json(report.worst_location);
  j["samples"] = report.samples;
  j["skipped"] = report.skipped;
  j["tolerance"] = report.tolerance;
  Json details = Json::object();
  for (const auto& [k, v] : report.details) details[k] = number(v);
  j["details"] = details;
  return j;
}

Json to_json(const ConstantChain& ch) {
  Json j;
  j["K"] = ch.K;
  j["t0"] = ch.t0;
  j["c"] = ch.c;
  j["b"] = ch.b;
  j["eta"] = ch.eta;
  j["mu0"] = ch.mu0;
  j["A"] = ch.A;
  j["C1"] = ch.C1;
  j["C2"] = ch.C2;
  j["C3"] = ch.C3;
  j["C4"] = ch.C4;
  j["lambda_mu"] = ch.lambda_mu;
  j["C_step"] = number(ch.C_step);
  j["C_lsi"] = number(ch.C_lsi);
  return j;
}

Json to_json(const LyapunovCertificate& cert) {
  Json j;
  j["c"] = cert.c;
  j["b"] = cert.b;
  j["x0"] = point(cert.x0);
  j["exponent"] = number(cert.exponent);
  j["r_star"] = number(cert.r_star);
  j["indicator_radius"] = number(cert.indicator_radius);
  j["min_W"] = number(cert.min_W);
  j["worst_scaled_margin"] = number(cert.worst_scaled_margin);
  j["worst_node"] = cert.worst_node;
  j["excluded_boundary"] = cert.excluded_boundary;
  j["tolerance"] = cert.tolerance;
  j["passed"] = cert.passed;
  return j;
}

Json to_json(const CurvatureBound& bound) {
  Json j;
  j["kappa"] = bound.kappa;
  j["K"] = bound.K;
  j["signed_K"] = bound.signed_K;
  j["argmin"] = bound.argmin;
  j["log_concave"] = bound.log_concave;
  j["attained_inside"] = bound.attained_inside;
  return j;
}

Json to_json(const CertifyReport& r) {
  Json j;
  j["branch"] = r.branch;
  j["curvature"] = to_json(r.curvature);
  j["radius"] = r.radius;
  j["nodes"] = r.nodes;
  j["tail_ratio"] = number(r.tail_ratio);
  j["K_chain"] = r.K_chain;
  j["K_clamped"] = r.K_clamped;
  j["lambda_mu"] = r.lambda_mu;
  j["certificate"] = r.certificate ? to_json(*r.certificate) : Json(nullptr);
  j["chain"] = r.chain ? to_json(*r.chain) : Json(nullptr);
  Json scan = Json::array();
  for (const auto& [t0, c] : r.t0_scan) scan.push_back(Json{{"t0", t0}, {"C_lsi", number(c)}});
  j["t0_scan"] = scan;
  j["C_certified"] = number(r.C_certified);
  j["oracle"] = Json{{"value", number(r.oracle.value)}, {"best_start", r.oracle.best_start}};
  Json starts = Json::array();
  for (double v : r.oracle.start_values) starts.push_back(number(v));
  j["oracle"]["start_values"] = starts;
  j["sound"] = r.sound;
  Json checks = Json::array();
  for (const auto& c : r.checks) checks.push_back(to_json(c));
  j["checks"] = checks;
  j["notes"] = r.notes;
  j["all_passed"] = r.all_passed();
  return j;
}

Json to_json(const SchroedingerProblem& prob) {
  Json j;
  j["rho"] = prob.rho;
  j["c"] = prob.c;
  j["b"] = prob.b;
  j["x0"] = point(prob.x0);
  j["tail_decreasing"] = prob.tail_decreasing;
  j["tail_ratio"] = number(prob.tail_ratio);
  return j;
}

Json to_json(const ConverseResult& result) {
  Json j;
  j["problem"] = to_json(result.problem);
  j["lambda_min"] = result.lambda_min;
  j["residual"] = result.residual;
  j["refinement_steps"] = result.refinement_steps;
  j["min_u"] = result.u.size() > 0 ? result.u.minCoeff() : 0.0;
  j["max_u"] = result.u.size() > 0 ? result.u.maxCoeff() : 0.0;
  j["certificate"] = to_json(result.certificate);
  return j;
}

Json to_json(const FlowTrace& trace) {
  Json j;
  j["name"] = trace.name;
  j["monotone"] = trace.monotone;
  j["worst_slope"] = number(trace.worst_slope);
  j["slope_tolerance"] = trace.slope_tolerance;
  j["roundoff_floor"] = trace.roundoff_floor;
  j["times"] = trace.times;
  Json values = Json::object();
  for (const auto& [k, v] : trace.values) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(number(x));
    values[k] = arr;
  }
  j["values"] = values;
  Json slopes = Json::object();
  for (const auto& [k, v] : trace.derivatives) {
    Json arr = Json::array();
    for (double x : v) arr.push_back(number(x));
    slopes[k] = arr;
  }
  j["derivatives"] = slopes;
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

void write_traces_csv(const std::filesystem::path& path, const std::vector<FlowRow>& rows) {
  std::ostringstream out;
  out << "t,Phi,Psi,Ent_f2,Ent_star,Energy,Theta1,Theta2\n";
  for (const auto& r : rows) {
    out << format_number(r.t) << ',' << format_number(r.phi) << ',' << format_number(r.psi) << ','
        << format_number(r.ent_f2) << ',' << format_number(r.ent_star) << ',' << format_number(r.energy) << ','
        << format_number(r.theta1) << ',' << format_number(r.theta2) << '\n';
  }
  write_text(path, out.str());
}

void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& eigenvalues) {
  std::ostringstream out;
  out << "index,eigenvalue\n";
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) out << k << ',' << format_number(eigenvalues[k]) << '\n';
  write_text(path, out.str());
}

}  // namespace lsi
