#ifndef SOLVPINCH_SOLITON_SEARCH_HPP
#define SOLVPINCH_SOLITON_SEARCH_HPP

#include "solvpinch/almost_abelian.hpp"
#include "solvpinch/common.hpp"
#include "solvpinch/lie_algebra.hpp"

#include <optional>
#include <string>
#include <vector>

namespace solvpinch {

/// Eigenvalue type (b_1 <= ... <= b_m) of the beta operator: tr = -1,
/// b_j + |b|^2 > 0, q = 1 / |b|^2.
struct BetaType {
  VectorXd b;
  int m = 0;
  double norm_sq = 0.0;
  double q = 0.0;
};

BetaType make_beta_type(std::vector<double> eigenvalues);

struct BetaTypeReport {
  double trace = 0.0;
  bool trace_ok = false;
  bool positivity_ok = false;          // b_j + |b|^2 > 0 for all j
  double sum_inv_sq_nonzero = 0.0;     // informational, over nonzero entries only
  bool pass = false;
};

BetaTypeReport type_invariants_check(const BetaType& bt, double tol = 1e-9);

struct FlowConfig {
  double step = 0.1;
  int max_iter = 1000;
  double grad_tol = 1e-9;
  std::uint64_t seed = 0;
  enum class Normalization { None, UnitNorm };
  Normalization normalization = Normalization::None;
};

struct FlowResult {
  MatrixXd A;
  std::vector<double> F_trace;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
};

/// Conjugation ascent on F over the orbit of A: steps A <- e^{hB} A e^{-hB}
/// along the projected gradient, with backtracking so F never decreases.
/// Stops when the (scale-free) orbit-criticality residual drops below grad_tol.
FlowResult ascent_flow(const AAData& aa, const FlowConfig& cfg);

/// Double-bracket flow A' = -[[A,A^t],A] by explicit conjugation steps;
/// |[A,A^t]| is nonincreasing and the spectrum of A is preserved.
FlowResult double_bracket_flow(const AAData& aa, const FlowConfig& cfg);

struct BracketFlowResult {
  MetricLieAlgebra bracket;
  std::vector<double> F_trace;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
};

/// Maximizes F over basis changes h.mu of a nilpotent bracket, parametrized by
/// h = exp(X) with a finite-difference gradient in X (diagonal warm start,
/// then all n^2 parameters). Converged when the solvsoliton residual of the
/// current bracket falls below grad_tol; the result is the nilsoliton bracket.
BracketFlowResult nilsoliton_find(const MetricLieAlgebra& mu, const FlowConfig& cfg);

/// Beta type of a converged nilsoliton: with Ric = cI + D, take
/// beta_0 = D - (tr D^2 / tr D) I and rescale so tr beta = -1.
BetaType beta_from_nilsoliton(const MetricLieAlgebra& lambda, double tol = 1e-6);

/// F <= n - m + q for a nilradical of the given type (q = 0 when the
/// nilradical is abelian, i.e. no type is supplied).
double pinching_bound(int n, int m, const std::optional<BetaType>& bt);

/// blockdiag(-|b|^2 I_{n-m}, diag(b)): the mandatory Ricci shape of a
/// solvsoliton, up to scale.
MatrixXd beta_sigma(const BetaType& bt, int n);

struct UnimodularSolitonReport {
  double spectral_residual = 0.0;  // sorted spec(Ric|_n) vs -scal_N * b, relative
  double offblock_residual = 0.0;  // |Ric(a,n)| blocks
  double a_block_residual = 0.0;   // Ric|_a vs scal_N |b|^2 I, relative
  double scal_n = 0.0;
  bool pass = false;
};

/// Tests the solvsoliton identity Ric = -scal_N * beta_sigma for a unimodular
/// bracket with declared nilradical coordinates.
UnimodularSolitonReport solvsoliton_verify_unimodular(const MetricLieAlgebra& mu,
                                                      const std::vector<int>& nilradical,
                                                      const BetaType& bt, double tol = 1e-6);

struct StructuralReport {
  double a_abelian_residual = 0.0;
  double commute_residual = 0.0;    // [beta, ad a|_n]
  double derivation_residual = 0.0; // beta_+ as a derivation of n
  bool a_abelian = false;
  bool beta_commutes = false;
  bool beta_plus_derivation = false;
};

struct EbetaReport {
  double pairing = 0.0;  // <Ric, E_beta>
  bool nonnegative = false;
  bool equality = false;
  std::optional<StructuralReport> structural;  // present when pairing ~ 0
};

/// <Ric, E_beta> with E_beta = blockdiag(0, beta + |beta|^2 I) in the
/// coordinates split a + n. beta_diag lists the beta eigenvalues aligned with
/// the nilradical coordinates (in their given order); omit it when the
/// nilradical is abelian, in which case beta_+ = I.
EbetaReport ebeta_pairing(const MetricLieAlgebra& mu, const std::vector<int>& nilradical,
                          const std::optional<VectorXd>& beta_diag, double tol = 1e-8);

struct NormEstimateReport {
  double ric_norm = 0.0;
  double estimate = 0.0;  // -scal (n - m + q)^{-1/2}
  bool holds = false;
  bool equality = false;
  double F = 0.0;
  double bound = 0.0;  // n - m + q
  bool F_bound_holds = false;
};

/// |Ric| >= -scal (n - m + 1/sum b_i^2)^{-1/2}, with equality exactly at
/// solvsolitons; also restates the bound as F <= n - m + q.
NormEstimateReport norm_estimate_check(const MetricLieAlgebra& mu, int n, int m,
                                       const std::optional<BetaType>& bt, double tol = 1e-6);

enum class Table1Status { Match, Mismatch, Inconclusive, PrintedInconsistent };
std::string to_string(Table1Status s);

struct Table1Row {
  std::string name;
  std::vector<double> printed_type;
  double printed_q = 0.0;
  std::vector<double> computed_type;
  double computed_q = 0.0;
  Table1Status status = Table1Status::Inconclusive;
  std::string note;
};

struct Table1Report {
  std::vector<Table1Row> rows;
};

/// The five-dimensional nilpotent fixtures mu_1 .. mu_8 with their published
/// eigenvalue types. index in 1..8.
MetricLieAlgebra table1_fixture(int index);
std::vector<double> table1_printed_type(int index);
double table1_printed_q(int index);

/// Runs nilsoliton_find + beta extraction on the selected fixtures and compares
/// against the published rows. A non-converged flow marks its row inconclusive;
/// a row whose published type and q disagree with each other is flagged.
Table1Report table1_reproduce(const FlowConfig& cfg,
                              const std::vector<int>& rows = {1, 2, 3, 4, 5, 6, 7, 8});

}  // namespace solvpinch

#endif  // SOLVPINCH_SOLITON_SEARCH_HPP
