#include "solvpinch/json_io.hpp"

#include "json.hpp"

#include <fstream>
#include <sstream>

namespace solvpinch {

namespace {

using nlohmann::json;

json load_json_spec(const std::string& spec) {
  std::string text = spec;
  const auto first = spec.find_first_not_of(" \t\r\n");
  const char lead = first == std::string::npos ? '\0' : spec[first];
  if (lead != '[' && lead != '{') {
    std::ifstream in(spec);
    if (!in) throw std::invalid_argument("cannot open input file: " + spec);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw std::invalid_argument("malformed JSON input");
  return j;
}

MatrixXd rows_to_matrix(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("matrix rows expected");
  const int r = static_cast<int>(rows.size());
  if (!rows[0].is_array()) throw std::invalid_argument("matrix rows expected");
  const int c = static_cast<int>(rows[0].size());
  MatrixXd a(r, c);
  for (int i = 0; i < r; ++i) {
    if (!rows[static_cast<std::size_t>(i)].is_array() ||
        static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != c)
      throw std::invalid_argument("ragged matrix rows");
    for (int j = 0; j < c; ++j)
      a(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
  }
  return a;
}

}  // namespace

MatrixXd parse_matrix(const std::string& spec) {
  const json j = load_json_spec(spec);
  if (j.is_array()) return rows_to_matrix(j);
  if (j.is_object()) {
    if (!j.contains("A")) throw std::invalid_argument("matrix object needs an \"A\" field");
    MatrixXd a = rows_to_matrix(j["A"]);
    if (j.contains("n")) {
      const int n = j["n"].get<int>();
      if (n != a.rows() + 1)
        throw std::invalid_argument("\"n\" must be the ambient dimension, rows + 1");
    }
    return a;
  }
  throw std::invalid_argument("matrix input must be a JSON array or object");
}

MetricLieAlgebra parse_bracket(const std::string& spec, double default_tol) {
  const json j = load_json_spec(spec);
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries"))
    throw std::invalid_argument("bracket input needs \"dim\" and \"entries\"");
  const int dim = j["dim"].get<int>();
  const double tol = j.contains("tol") ? j["tol"].get<double>() : default_tol;
  std::vector<BracketEntry> entries;
  for (const auto& e : j["entries"]) {
    if (!e.is_array() || e.size() != 4)
      throw std::invalid_argument("each bracket entry must be [i, j, k, value]");
    entries.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<int>(), e[3].get<double>()});
  }
  return MetricLieAlgebra::from_entries(dim, entries, tol);
}

std::vector<double> parse_real_list(const std::string& spec) {
  const json j = load_json_spec(spec);
  if (!j.is_array()) throw std::invalid_argument("expected a JSON list of reals");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.get<double>());
  return out;
}

FamilyRequest parse_family_request(const std::string& spec) {
  const json j = load_json_spec(spec);
  if (!j.is_object() || !j.contains("family") || !j.contains("t"))
    throw std::invalid_argument("family request needs \"family\" and \"t\"");
  return {j["family"].get<std::string>(), j["t"].get<double>()};
}

FlowConfig parse_flow_config(const std::string& spec) {
  const json j = load_json_spec(spec);
  if (!j.is_object()) throw std::invalid_argument("flow config must be a JSON object");
  FlowConfig cfg;
  if (j.contains("step")) cfg.step = j["step"].get<double>();
  if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<int>();
  if (j.contains("grad_tol")) cfg.grad_tol = j["grad_tol"].get<double>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("normalization")) {
    const auto mode = j["normalization"].get<std::string>();
    if (mode == "unit_norm")
      cfg.normalization = FlowConfig::Normalization::UnitNorm;
    else if (mode == "none")
      cfg.normalization = FlowConfig::Normalization::None;
    else
      throw std::invalid_argument("normalization must be none or unit_norm");
  }
  return cfg;
}

std::string matrix_to_json(const MatrixXd& a) {
  std::string out = "[";
  for (int i = 0; i < a.rows(); ++i) {
    out += i ? ",[" : "[";
    for (int j = 0; j < a.cols(); ++j) {
      if (j) out += ",";
      out += fmt_double(a(i, j));
    }
    out += "]";
  }
  return out + "]";
}

std::string bracket_to_json(const MetricLieAlgebra& mu) {
  std::string out = "{\"dim\":" + std::to_string(mu.dim()) + ",\"entries\":[";
  bool first = true;
  for (const auto& e : mu.entries()) {
    if (!first) out += ",";
    first = false;
    out += "[" + std::to_string(e.i) + "," + std::to_string(e.j) + "," + std::to_string(e.k) +
           "," + fmt_double(e.value) + "]";
  }
  return out + "]}";
}

namespace {

std::string trace_to_json(const std::vector<double>& trace) {
  std::string out = "[";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (i) out += ",";
    out += fmt_double(trace[i]);
  }
  return out + "]";
}

}  // namespace

std::string flow_result_to_json(const FlowResult& r) {
  return "{\"A\":" + matrix_to_json(r.A) + ",\"F_trace\":" + trace_to_json(r.F_trace) +
         ",\"converged\":" + (r.converged ? "true" : "false") +
         ",\"iterations\":" + std::to_string(r.iterations) +
         ",\"final_residual\":" + fmt_double(r.final_residual) + "}";
}

std::string bracket_flow_result_to_json(const BracketFlowResult& r) {
  return "{\"bracket\":" + bracket_to_json(r.bracket) +
         ",\"F_trace\":" + trace_to_json(r.F_trace) +
         ",\"converged\":" + (r.converged ? "true" : "false") +
         ",\"iterations\":" + std::to_string(r.iterations) +
         ",\"final_residual\":" + fmt_double(r.final_residual) + "}";
}

}  // namespace solvpinch
