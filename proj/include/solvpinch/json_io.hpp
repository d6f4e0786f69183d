#ifndef SOLVPINCH_JSON_IO_HPP
#define SOLVPINCH_JSON_IO_HPP

#include "solvpinch/common.hpp"
#include "solvpinch/lie_algebra.hpp"
#include "solvpinch/soliton_search.hpp"

#include <string>
#include <vector>

namespace solvpinch {

/// Matrix input: inline JSON (leading '[' for bare rows, '{' for
/// {"n": ambient, "A": rows}) or a path to a file holding either.
MatrixXd parse_matrix(const std::string& spec);

/// Bracket input: {"dim": n, "entries": [[i,j,k,value], ...], "tol": optional}
/// with 1-based indices; inline JSON or a file path.
MetricLieAlgebra parse_bracket(const std::string& spec, double default_tol = kDefaultTol);

/// Plain JSON list of reals, inline or from a file.
std::vector<double> parse_real_list(const std::string& spec);

/// Family request: {"family": "c_t", "t": 0.5}.
struct FamilyRequest {
  std::string family;
  double t = 0.0;
};
FamilyRequest parse_family_request(const std::string& spec);

/// Flow config: {"step": .., "max_iter": .., "grad_tol": .., "seed": ..,
/// "normalization": "none" | "unit_norm"}; missing keys keep defaults.
FlowConfig parse_flow_config(const std::string& spec);

std::string matrix_to_json(const MatrixXd& a);
std::string bracket_to_json(const MetricLieAlgebra& mu);
std::string flow_result_to_json(const FlowResult& r);
std::string bracket_flow_result_to_json(const BracketFlowResult& r);

}  // namespace solvpinch

#endif  // SOLVPINCH_JSON_IO_HPP
