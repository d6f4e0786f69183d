#ifndef SOLVPINCH_LIE_ALGEBRA_HPP
#define SOLVPINCH_LIE_ALGEBRA_HPP

#include "solvpinch/common.hpp"

#include <array>
#include <optional>
#include <vector>

namespace solvpinch {

/// One structure-constant entry c(i,j,k) = <mu(e_i,e_j), e_k>, 1-based on the wire.
struct BracketEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double value = 0.0;
};

/// A Lie bracket on R^n carrying the standard inner product, stored as
/// structure constants c(i,j,k) = <mu(e_i,e_j), e_k> in the orthonormal basis.
/// Values are immutable after construction and safe to share across threads.
class MetricLieAlgebra {
 public:
  MetricLieAlgebra() = default;

  /// c[i](j,k) = c(i,j,k). Throws std::invalid_argument on shape mismatch.
  explicit MetricLieAlgebra(std::vector<MatrixXd> c, double tol = kDefaultTol);

  /// The abelian bracket in dimension n.
  static MetricLieAlgebra zero(int dim, double tol = kDefaultTol);

  /// Build from sparse 1-based entries; antisymmetric completion is applied,
  /// so each (i,j,k,v) also sets c(j,i,k) = -v.
  static MetricLieAlgebra from_entries(int dim, const std::vector<BracketEntry>& entries,
                                       double tol = kDefaultTol);

  int dim() const { return dim_; }
  double tol() const { return tol_; }

  double c(int i, int j, int k) const { return c_[static_cast<std::size_t>(i)](j, k); }
  const MatrixXd& c_slice(int i) const { return c_[static_cast<std::size_t>(i)]; }
  const std::vector<MatrixXd>& c_all() const { return c_; }

  /// ad(e_i) as a matrix: column j is mu(e_i, e_j).
  MatrixXd ad_basis(int i) const { return c_[static_cast<std::size_t>(i)].transpose(); }
  MatrixXd ad(const VectorXd& x) const;
  VectorXd bracket(const VectorXd& x, const VectorXd& y) const;

  /// Frobenius norm of the full structure-constant tensor.
  double norm() const;

  MetricLieAlgebra scaled(double t) const;
  /// Basis change action (h . mu)(x, y) = h mu(h^{-1} x, h^{-1} y).
  MetricLieAlgebra transformed(const MatrixXd& h) const;
  /// Sub-bracket on the listed coordinates. Throws PreconditionError when the
  /// span is not closed under the bracket (relative to tol).
  MetricLieAlgebra restricted(const std::vector<int>& idx) const;

  std::vector<BracketEntry> entries() const;  // 1-based, i < j, nonzero only

 private:
  int dim_ = 0;
  double tol_ = kDefaultTol;
  std::vector<MatrixXd> c_;
};

struct BracketDiagnostics {
  double antisymmetry_residual = 0.0;
  double jacobi_residual = 0.0;
  bool pass = false;
};

/// Max-abs antisymmetry and Jacobi residuals; pass iff both are <= tol.
BracketDiagnostics validate_bracket(const std::vector<MatrixXd>& c, double tol);
BracketDiagnostics validate_bracket(const MetricLieAlgebra& mu);

/// ad_mu(x) with (ad x) e_j = mu(x, e_j) columnwise.
MatrixXd adjoint(const MetricLieAlgebra& mu, const VectorXd& x);

struct StructureFlags {
  bool nilpotent = false;
  bool solvable = false;
  bool unimodular = false;
  /// A rank decision fell within a factor 10 of the tolerance threshold.
  bool rank_warning = false;
};

StructureFlags structure_flags(const MetricLieAlgebra& mu);
bool is_nilpotent(const MetricLieAlgebra& mu);
bool is_solvable(const MetricLieAlgebra& mu);
bool is_unimodular(const MetricLieAlgebra& mu);

enum class TypeKind { Nilpotent, RealType, ImaginaryType, Mixed };

struct TypeVerdict {
  TypeKind kind = TypeKind::RealType;
  /// Set when the verdict came from sampling rather than an exact dispatch.
  bool heuristic = false;
};

/// Real/imaginary type classification. Exact for nilpotent and (standard-form)
/// almost-abelian inputs; otherwise decided from `samples` seeded directions
/// and flagged heuristic.
TypeVerdict classify_type(const MetricLieAlgebra& mu, int samples = 64, std::uint64_t seed = 0);

struct CurvatureData {
  MatrixXd ric;
  double scal = 0.0;
  double ric_norm_sq = 0.0;
  std::optional<double> F;  // empty on flat input
  bool flat() const { return !F.has_value(); }
};

/// Ricci operator of the left-invariant metric: Ric = M - B/2 - S(ad H) with
/// the Killing operator B and mean-curvature vector H.
CurvatureData ricci(const MetricLieAlgebra& mu);

/// F = scal^2 / |Ric|^2; empty on flat input.
std::optional<double> pinching_F(const MetricLieAlgebra& mu);

/// min|r_i| / max|r_i| when the Ricci spectrum is definite, empty otherwise.
std::optional<double> pinching_alpha(const CurvatureData& curv, double tol = kDefaultTol);
std::optional<double> pinching_alpha(const MetricLieAlgebra& mu);

/// F of a prescribed Ricci spectrum: (sum r_i)^2 / sum r_i^2.
double pinching_from_spectrum(const VectorXd& eigs);

struct DerivationSpace {
  std::vector<MatrixXd> basis;  // orthonormal under the Frobenius inner product
  int dim = 0;
};

/// Nullspace of D -> D mu(.,.) - mu(D., .) - mu(., D.) assembled over basis pairs.
DerivationSpace derivation_space(const MetricLieAlgebra& mu);

struct SolitonDecomposition {
  double c = 0.0;
  MatrixXd D;
  double residual = 0.0;
  bool is_soliton = false;
};

/// Best fit Ric = cI + D with D in the derivation space; residual in Frobenius
/// norm. residual <= residual_tol declares a solvsoliton.
SolitonDecomposition solvsoliton_residual(const MetricLieAlgebra& mu, double residual_tol = 1e-8);

/// For homogeneous metrics Ricci-flat implies flat, so |Ric| <= tol is exact here.
bool flatness_test(const MetricLieAlgebra& mu);

}  // namespace solvpinch

#endif  // SOLVPINCH_LIE_ALGEBRA_HPP
