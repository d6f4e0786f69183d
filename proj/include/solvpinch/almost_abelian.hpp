#ifndef SOLVPINCH_ALMOST_ABELIAN_HPP
#define SOLVPINCH_ALMOST_ABELIAN_HPP

#include "solvpinch/common.hpp"
#include "solvpinch/lie_algebra.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace solvpinch {

/// An almost-abelian metric Lie algebra encoded by the single matrix
/// A = ad(e_n) restricted to the codimension-one abelian ideal, together with
/// the derived quantities every closed-form expression is built from.
struct AAData {
  MatrixXd A;
  MatrixXd S;        // symmetric part (A + A^t)/2
  MatrixXd Sk;       // skew part (A - A^t)/2
  MatrixXd comm;     // [A, A^t]
  double tr_a = 0.0;
  double tr_s2 = 0.0;  // tr S(A)^2 = |S|^2
  double tol = kDefaultTol;

  explicit AAData(MatrixXd a, double tolerance = kDefaultTol);

  int ideal_dim() const { return static_cast<int>(A.rows()); }
  int ambient_dim() const { return static_cast<int>(A.rows()) + 1; }
  double norm() const { return A.norm(); }
  /// Skew up to tolerance: tr S(A)^2 <= tol * |A|^2, exactly where F degenerates.
  bool flat() const { return tr_s2 <= tol * A.squaredNorm(); }
};

/// The bracket mu_A: mu(ideal, ideal) = 0, ad(e_n)|ideal = A.
MetricLieAlgebra bracket_of(const AAData& aa);

/// Closed-form Ricci: upper block [A,A^t]/2 - (tr A) S(A), corner -tr S(A)^2.
CurvatureData ricci_aa(const AAData& aa);

/// F(A) = (tr S^2 + (tr A)^2)^2 / (tr S^2 (tr S^2 + (tr A)^2) + |[A,A^t]|^2 / 4).
std::optional<double> F_aa(const AAData& aa);

/// F restricted to the orbit closure of a fixed matrix: only |B|^2 and
/// |[B,B^t]|^2 vary, the traces are frozen at the base point's values.
double F_on_orbit_closure(const AAData& base, const MatrixXd& b);

struct GradCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;  // > 0 away from skew matrices
  double c4 = 0.0;  // > 0 away from skew matrices
};

GradCoefficients grad_coefficients(const AAData& aa);  // throws FlatError when skew

/// grad F = (c1 I + c2 S(A) + c3 [A,[A,A^t]]) / c4^2; matches finite differences.
MatrixXd grad_F(const AAData& aa);

struct OrbitGradient {
  MatrixXd tangent;    // least-squares projection of grad F onto {[B, A]}
  double residual;     // |grad F - tangent|
  MatrixXd generator;  // minimum-norm B with [B, A] = tangent
};

OrbitGradient grad_F_orbit(const AAData& aa);

/// |c2 [A,A^t] - 2 c3 [A^t,[A,[A,A^t]]]|, zero exactly at orbit-critical points.
double critical_residual(const AAData& aa);
/// Same residual divided by |A|^6 (the residual is 6-homogeneous in A).
double critical_residual_rel(const AAData& aa);
bool orbit_critical(const AAData& aa, double tol = 1e-7);

enum class GlobalCriticality { Einstein, UnimodularNormal, NotCritical };
GlobalCriticality global_critical_test(const AAData& aa);

enum class SolvsolitonKind { Normal, Nilsoliton, NotSolvsoliton };
struct SolvsolitonVerdict {
  SolvsolitonKind kind = SolvsolitonKind::NotSolvsoliton;
  double c = 0.0;  // [A,[A,A^t]] = cA in the nilsoliton case
};
SolvsolitonVerdict solvsoliton_test_aa(const AAData& aa);

/// Second derivative of t -> F(e^{tB} A e^{-tB}) at t = 0. Only valid at
/// orbit-critical points; throws PreconditionError otherwise.
double second_variation(const AAData& aa, const MatrixXd& b);

/// Central-difference oracle for the same quantity.
double second_variation_fd(const AAData& aa, const MatrixXd& b, double h);

enum class LocalMaxVerdict { MaxCandidate, Saddle, Degenerate };

/// Probes second variations along [A,A^t] and seeded random directions,
/// skipping directions tangent to the orthogonal-conjugation orbit (F is
/// constant there).
LocalMaxVerdict local_max_classify(const AAData& aa, int trials = 64, std::uint64_t seed = 0);

struct RicciSolitonParts {
  MatrixXd N;  // nilsoliton part
  MatrixXd C;  // skew part commuting with N
  double c = 0.0;
};

/// Splits a traceless orbit-critical matrix as A = N + C with N a nilsoliton,
/// C skew and [N,C] = 0. Returns nullopt when the structural checks fail
/// (e.g. for normal A, which is already a solvsoliton).
std::optional<RicciSolitonParts> ricci_soliton_decompose(const AAData& aa);

struct MomentMapValue {
  MatrixXd m;    // [A,A^t] / |A|^2
  double ratio;  // |[A,A^t]| / |A|^2, always <= sqrt(2)
};
MomentMapValue moment_map(const AAData& aa);

enum class Family { AT, BT, CT, DT, ET, JordanT };
Family family_from_name(std::string_view name);
std::string family_name(Family f);

struct FamilySample {
  AAData aa;
  std::optional<double> F_closed;  // empty at flat parameters
};

/// Witness families: a_t, b_t (2x2 near-flat pair), c_t (real-type collapse),
/// d_t / e_t (orbit-closure two-limit pair), jordan_t = [[1,t],[0,1]].
/// Optional n pads the matrix with a zero block up to ideal dimension n-1.
FamilySample family(Family f, double t, std::optional<int> n = std::nullopt);
FamilySample family(std::string_view name, double t, std::optional<int> n = std::nullopt);

struct CollapseSample {
  MetricLieAlgebra mu;
  double F_closed = 0.0;
};

/// Block bracket with 2x2 blocks [[eps*a_j, -a_j], [a_j, -eps*a_j]] plus r
/// extra abelian directions; F -> 0 as eps -> 0.
CollapseSample collapse_family(const std::vector<double>& a, double eps, int r = 1);

/// Unimodular specialization F = (tr S^2)^2 / ((tr S^2)^2 + |[A,A^t]|^2 / 4);
/// throws PreconditionError unless tr A = 0.
double unimodular_F(const AAData& aa);

}  // namespace solvpinch

#endif  // SOLVPINCH_ALMOST_ABELIAN_HPP
