#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsi/certify.hpp"
#include "lsi/check_report.hpp"
#include "lsi/converse.hpp"
#include "lsi/flow.hpp"
#include "lsi/lyapunov.hpp"

namespace lsi {

using Json = nlohmann::ordered_json;

Json to_json(const Location& loc);
Json to_json(const CheckReport& report);
Json to_json(const ConstantChain& chain);
/// Summary of the certificate; the node values of W are not included.
Json to_json(const LyapunovCertificate& cert);
Json to_json(const CurvatureBound& bound);
Json to_json(const CertifyReport& report);
Json to_json(const SchroedingerProblem& prob);
Json to_json(const ConverseResult& result);
Json to_json(const FlowTrace& trace);

/// Serializes with every floating-point value at 17 significant digits and
/// non-finite values as null, so identical inputs give identical bytes.
std::string dump_json(const Json& value, int indent = 2);

/// Number formatting shared by JSON and CSV output ("%.17g"; "nan", "inf").
std::string format_number(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
/// Header t,Phi,Psi,Ent_f2,Ent_star,Energy,Theta1,Theta2.
void write_traces_csv(const std::filesystem::path& path, const std::vector<FlowRow>& rows);
/// Header index,eigenvalue.
void write_spectrum_csv(const std::filesystem::path& path, const Eigen::VectorXd& eigenvalues);

}  // namespace lsi
