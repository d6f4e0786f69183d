#include "solvpinch/lie_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace solvpinch {

namespace {

// Orthonormal basis of the column span of m. The rank threshold is
// tol * max(sigma_max, scale_floor): the floor keeps pure-noise images (for
// example a numerically-zero series term) from acquiring spurious rank. Sets
// *warning when a singular value sits within a factor 10 of the threshold.
MatrixXd column_span(const MatrixXd& m, double tol, double scale_floor, bool* warning) {
  if (m.cols() == 0 || m.norm() == 0.0) return MatrixXd(m.rows(), 0);
  Eigen::BDCSVD<MatrixXd> svd(m, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double thresh = tol * std::max(sv(0), scale_floor);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) ++rank;
    if (warning && sv(i) > thresh / 10 && sv(i) < thresh * 10) *warning = true;
  }
  return svd.matrixU().leftCols(rank);
}

// Columns mu(e_i, b_j) for all basis columns b_j of b.
MatrixXd bracket_image(const MetricLieAlgebra& mu, const MatrixXd& a, const MatrixXd& b) {
  const int n = mu.dim();
  MatrixXd out(n, a.cols() * b.cols());
  int col = 0;
  for (int i = 0; i < a.cols(); ++i) {
    const MatrixXd ad_ai = mu.ad(a.col(i));
    for (int j = 0; j < b.cols(); ++j) out.col(col++) = ad_ai * b.col(j);
  }
  return out;
}

bool spectrum_imaginary(const MatrixXd& a, double tol) {
  const double scale = std::max(1.0, a.norm());
  Eigen::EigenSolver<MatrixXd> es(a, false);
  for (int i = 0; i < a.rows(); ++i)
    if (std::abs(es.eigenvalues()(i).real()) > tol * scale) return false;
  return true;
}

bool spectrum_zero(const MatrixXd& a, double tol) {
  const double scale = std::max(1.0, a.norm());
  Eigen::EigenSolver<MatrixXd> es(a, false);
  for (int i = 0; i < a.rows(); ++i)
    if (std::abs(es.eigenvalues()(i)) > tol * scale) return false;
  return true;
}

// Index of a basis axis whose complement is an abelian ideal, or -1.
int almost_abelian_axis(const MetricLieAlgebra& mu, double tol) {
  const int n = mu.dim();
  const double scale = std::max(1.0, mu.norm());
  for (int k = 0; k < n; ++k) {
    bool ok = true;
    for (int i = 0; i < n && ok; ++i) {
      if (i == k) continue;
      // image of ad e_k stays inside the ideal
      if (std::abs(mu.c(k, i, k)) > tol * scale) ok = false;
      for (int j = 0; j < n && ok; ++j) {
        if (j == k) continue;
        for (int l = 0; l < n; ++l)
          if (std::abs(mu.c(i, j, l)) > tol * scale) {
            ok = false;
            break;
          }
      }
    }
    if (ok) return k;
  }
  return -1;
}

}  // namespace

MetricLieAlgebra::MetricLieAlgebra(std::vector<MatrixXd> c, double tol)
    : dim_(static_cast<int>(c.size())), tol_(tol), c_(std::move(c)) {
  if (tol_ <= 0) throw std::invalid_argument("tolerance must be positive");
  for (const auto& slice : c_)
    if (slice.rows() != dim_ || slice.cols() != dim_)
      throw std::invalid_argument("structure constant array is not n x n x n");
}

MetricLieAlgebra MetricLieAlgebra::zero(int dim, double tol) {
  if (dim < 0) throw std::invalid_argument("dimension must be nonnegative");
  std::vector<MatrixXd> c(static_cast<std::size_t>(dim), MatrixXd::Zero(dim, dim));
  return MetricLieAlgebra(std::move(c), tol);
}

MetricLieAlgebra MetricLieAlgebra::from_entries(int dim, const std::vector<BracketEntry>& entries,
                                                double tol) {
  if (dim < 0) throw std::invalid_argument("dimension must be nonnegative");
  std::vector<MatrixXd> c(static_cast<std::size_t>(dim), MatrixXd::Zero(dim, dim));
  for (const auto& e : entries) {
    if (e.i < 1 || e.i > dim || e.j < 1 || e.j > dim || e.k < 1 || e.k > dim)
      throw std::invalid_argument("bracket entry index out of range");
    c[static_cast<std::size_t>(e.i - 1)](e.j - 1, e.k - 1) = e.value;
    c[static_cast<std::size_t>(e.j - 1)](e.i - 1, e.k - 1) = -e.value;
  }
  return MetricLieAlgebra(std::move(c), tol);
}

MatrixXd MetricLieAlgebra::ad(const VectorXd& x) const {
  if (x.size() != dim_) throw std::invalid_argument("vector dimension mismatch");
  MatrixXd out = MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    if (x(i) != 0.0) out += x(i) * c_[static_cast<std::size_t>(i)].transpose();
  return out;
}

VectorXd MetricLieAlgebra::bracket(const VectorXd& x, const VectorXd& y) const {
  return ad(x) * y;
}

double MetricLieAlgebra::norm() const {
  double s = 0.0;
  for (const auto& slice : c_) s += slice.squaredNorm();
  return std::sqrt(s);
}

MetricLieAlgebra MetricLieAlgebra::scaled(double t) const {
  std::vector<MatrixXd> c(c_);
  for (auto& slice : c) slice *= t;
  return MetricLieAlgebra(std::move(c), tol_);
}

MetricLieAlgebra MetricLieAlgebra::transformed(const MatrixXd& h) const {
  if (h.rows() != dim_ || h.cols() != dim_) throw std::invalid_argument("basis change shape mismatch");
  const MatrixXd p = h.inverse();
  // c'(i,j,k) = sum_{a,b,c} p(a,i) p(b,j) c(a,b,c) h(k,c)
  std::vector<MatrixXd> mixed(static_cast<std::size_t>(dim_));
  for (int a = 0; a < dim_; ++a)
    mixed[static_cast<std::size_t>(a)] = p.transpose() * c_[static_cast<std::size_t>(a)] * h.transpose();
  std::vector<MatrixXd> out(static_cast<std::size_t>(dim_), MatrixXd::Zero(dim_, dim_));
  for (int i = 0; i < dim_; ++i)
    for (int a = 0; a < dim_; ++a)
      if (p(a, i) != 0.0) out[static_cast<std::size_t>(i)] += p(a, i) * mixed[static_cast<std::size_t>(a)];
  return MetricLieAlgebra(std::move(out), tol_);
}

MetricLieAlgebra MetricLieAlgebra::restricted(const std::vector<int>& idx) const {
  const int m = static_cast<int>(idx.size());
  std::vector<char> inside(static_cast<std::size_t>(dim_), 0);
  for (int i : idx) {
    if (i < 0 || i >= dim_) throw std::invalid_argument("restriction index out of range");
    inside[static_cast<std::size_t>(i)] = 1;
  }
  const double scale = std::max(1.0, norm());
  std::vector<MatrixXd> c(static_cast<std::size_t>(m), MatrixXd::Zero(m, m));
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int k = 0; k < dim_; ++k) {
        const double v = this->c(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)], k);
        if (!inside[static_cast<std::size_t>(k)]) {
          if (std::abs(v) > tol_ * scale)
            throw PreconditionError("restriction span is not closed under the bracket");
          continue;
        }
        const auto kk = std::distance(idx.begin(), std::find(idx.begin(), idx.end(), k));
        c[static_cast<std::size_t>(a)](b, kk) = v;
      }
  return MetricLieAlgebra(std::move(c), tol_);
}

std::vector<BracketEntry> MetricLieAlgebra::entries() const {
  std::vector<BracketEntry> out;
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = 0; k < dim_; ++k)
        if (c(i, j, k) != 0.0) out.push_back({i + 1, j + 1, k + 1, c(i, j, k)});
  return out;
}

BracketDiagnostics validate_bracket(const std::vector<MatrixXd>& c, double tol) {
  const int n = static_cast<int>(c.size());
  for (const auto& slice : c)
    if (slice.rows() != n || slice.cols() != n)
      throw std::invalid_argument("structure constant array is not n x n x n");

  BracketDiagnostics diag;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        diag.antisymmetry_residual = std::max(
            diag.antisymmetry_residual,
            std::abs(c[static_cast<std::size_t>(i)](j, k) + c[static_cast<std::size_t>(j)](i, k)));

  // mu(mu(e_i,e_j),e_k) + mu(mu(e_j,e_k),e_i) + mu(mu(e_k,e_i),e_j) over basis triples
  std::vector<MatrixXd> ad(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ad[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)].transpose();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        VectorXd r = VectorXd::Zero(n);
        for (int a = 0; a < n; ++a) {
          r += c[static_cast<std::size_t>(i)](j, a) * ad[static_cast<std::size_t>(a)].col(k);
          r += c[static_cast<std::size_t>(j)](k, a) * ad[static_cast<std::size_t>(a)].col(i);
          r += c[static_cast<std::size_t>(k)](i, a) * ad[static_cast<std::size_t>(a)].col(j);
        }
        diag.jacobi_residual = std::max(diag.jacobi_residual, r.cwiseAbs().maxCoeff());
      }
  diag.pass = diag.antisymmetry_residual <= tol && diag.jacobi_residual <= tol;
  return diag;
}

BracketDiagnostics validate_bracket(const MetricLieAlgebra& mu) {
  return validate_bracket(mu.c_all(), mu.tol());
}

MatrixXd adjoint(const MetricLieAlgebra& mu, const VectorXd& x) { return mu.ad(x); }

StructureFlags structure_flags(const MetricLieAlgebra& mu) {
  const int n = mu.dim();
  StructureFlags flags;
  flags.unimodular = true;
  for (int i = 0; i < n; ++i)
    if (std::abs(mu.ad_basis(i).trace()) > mu.tol() * std::max(1.0, mu.norm())) {
      flags.unimodular = false;
      break;
    }

  bool warning = false;
  const double scale = std::max(mu.norm(), 1e-300);
  // lower central series
  MatrixXd v = MatrixXd::Identity(n, n);
  MatrixXd full = v;
  for (int iter = 0; iter <= n + 1; ++iter) {
    MatrixXd next = column_span(bracket_image(mu, full, v), mu.tol(), scale, &warning);
    if (next.cols() == 0) {
      flags.nilpotent = true;
      break;
    }
    if (next.cols() >= v.cols() && iter > 0) break;  // stabilized above zero
    v = next;
  }
  // derived series
  MatrixXd w = MatrixXd::Identity(n, n);
  for (int iter = 0; iter <= n + 1; ++iter) {
    MatrixXd next = column_span(bracket_image(mu, w, w), mu.tol(), scale, &warning);
    if (next.cols() == 0) {
      flags.solvable = true;
      break;
    }
    if (next.cols() >= w.cols() && iter > 0) break;
    w = next;
  }
  flags.rank_warning = warning;
  return flags;
}

bool is_nilpotent(const MetricLieAlgebra& mu) { return structure_flags(mu).nilpotent; }
bool is_solvable(const MetricLieAlgebra& mu) { return structure_flags(mu).solvable; }

bool is_unimodular(const MetricLieAlgebra& mu) {
  const double scale = std::max(1.0, mu.norm());
  for (int i = 0; i < mu.dim(); ++i)
    if (std::abs(mu.ad_basis(i).trace()) > mu.tol() * scale) return false;
  return true;
}

TypeVerdict classify_type(const MetricLieAlgebra& mu, int samples, std::uint64_t seed) {
  if (is_nilpotent(mu)) return {TypeKind::Nilpotent, false};

  const int axis = almost_abelian_axis(mu, mu.tol());
  if (axis >= 0) {
    const int n = mu.dim();
    MatrixXd a(n - 1, n - 1);
    int col = 0;
    for (int j = 0; j < n; ++j) {
      if (j == axis) continue;
      int row = 0;
      for (int k = 0; k < n; ++k) {
        if (k == axis) continue;
        a(row++, col) = mu.c(axis, j, k);
      }
      ++col;
    }
    // exact dispatch on Spec(A): nilpotency was excluded above
    if (spectrum_imaginary(a, mu.tol())) return {TypeKind::ImaginaryType, false};
    return {TypeKind::RealType, false};
  }

  // General case: seeded sampling over directions X, testing Spec(ad X).
  const int n = mu.dim();
  Rng rng(seed);
  bool saw_nonimaginary = false;   // witness against imaginary type
  bool saw_imag_nonnilpotent = false;  // witness against real type
  auto probe = [&](const VectorXd& x) {
    const MatrixXd ad = mu.ad(x);
    if (!spectrum_imaginary(ad, mu.tol()))
      saw_nonimaginary = true;
    else if (!spectrum_zero(ad, mu.tol()))
      saw_imag_nonnilpotent = true;
  };
  for (int i = 0; i < n; ++i) probe(VectorXd::Unit(n, i));
  for (int s = 0; s < samples; ++s) {
    VectorXd x = rng.normal_vector(n);
    const double nn = x.norm();
    if (nn > 0) probe(x / nn);
  }
  TypeKind kind;
  if (saw_nonimaginary && saw_imag_nonnilpotent)
    kind = TypeKind::Mixed;
  else if (saw_imag_nonnilpotent)
    kind = TypeKind::ImaginaryType;
  else
    kind = TypeKind::RealType;
  return {kind, true};
}

CurvatureData ricci(const MetricLieAlgebra& mu) {
  const int n = mu.dim();
  CurvatureData out;
  if (n == 0) {
    out.ric = MatrixXd(0, 0);
    return out;  // degenerate input, reported flat
  }

  // M term: M(x,y) = -1/2 <c_x, c_y>_F + 1/4 sum_i (c_i^t c_i)(x,y)
  MatrixXd m = MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = x; y < n; ++y) {
      const double g = frob_inner(mu.c_slice(x), mu.c_slice(y));
      m(x, y) = -0.5 * g;
      m(y, x) = m(x, y);
    }
  for (int i = 0; i < n; ++i) m += 0.25 * mu.c_slice(i).transpose() * mu.c_slice(i);

  // Killing operator and mean curvature vector
  std::vector<MatrixXd> ad(static_cast<std::size_t>(n));
  VectorXd h(n);
  for (int i = 0; i < n; ++i) {
    ad[static_cast<std::size_t>(i)] = mu.ad_basis(i);
    h(i) = ad[static_cast<std::size_t>(i)].trace();
  }
  MatrixXd killing(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = x; y < n; ++y) {
      killing(x, y) = (ad[static_cast<std::size_t>(x)] * ad[static_cast<std::size_t>(y)]).trace();
      killing(y, x) = killing(x, y);
    }
  const MatrixXd ad_h = mu.ad(h);

  out.ric = m - 0.5 * killing - sym(ad_h);
  out.scal = out.ric.trace();
  out.ric_norm_sq = out.ric.squaredNorm();
  if (out.ric_norm_sq > mu.tol() * mu.tol()) out.F = out.scal * out.scal / out.ric_norm_sq;
  return out;
}

std::optional<double> pinching_F(const MetricLieAlgebra& mu) { return ricci(mu).F; }

std::optional<double> pinching_alpha(const CurvatureData& curv, double tol) {
  if (curv.flat()) return std::nullopt;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(curv.ric));
  const VectorXd r = es.eigenvalues();
  const double top = r.cwiseAbs().maxCoeff();
  if (top <= 0) return std::nullopt;
  const bool positive = r.minCoeff() > tol * top;
  const bool negative = r.maxCoeff() < -tol * top;
  if (!positive && !negative) return std::nullopt;
  return r.cwiseAbs().minCoeff() / top;
}

std::optional<double> pinching_alpha(const MetricLieAlgebra& mu) {
  return pinching_alpha(ricci(mu), mu.tol());
}

double pinching_from_spectrum(const VectorXd& eigs) {
  const double s = eigs.sum();
  const double n2 = eigs.squaredNorm();
  if (n2 == 0.0) throw FlatError("zero Ricci spectrum: F undefined");
  return s * s / n2;
}

DerivationSpace derivation_space(const MetricLieAlgebra& mu) {
  const int n = mu.dim();
  DerivationSpace out;
  if (n == 0) return out;
  // Rows: (i,j,k) with i<j; columns: matrix entries D(a,b) column-major.
  const int pairs = n * (n - 1) / 2;
  MatrixXd k(pairs * n, n * n);
  k.setZero();
  int row0 = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          const int colid = b * n + a;  // D(a,b)
          // (D mu(e_i,e_j))_k picks up D(k,b) c(i,j,b): contributes on k = a with b-slot
          k(row0 + a, colid) += mu.c(i, j, b);
          // -mu(D e_i, e_j) = -D(a,i) mu(e_a, e_j)
          if (b == i)
            for (int l = 0; l < n; ++l) k(row0 + l, colid) -= mu.c(a, j, l);
          // -mu(e_i, D e_j) = -D(a,j) mu(e_i, e_a)
          if (b == j)
            for (int l = 0; l < n; ++l) k(row0 + l, colid) -= mu.c(i, a, l);
        }
      row0 += n;
    }

  Eigen::BDCSVD<MatrixXd> svd(k, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double thresh = mu.tol() * std::max(smax, 1.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  const int nullity = n * n - rank;
  out.dim = nullity;
  out.basis.reserve(static_cast<std::size_t>(nullity));
  for (int c = n * n - nullity; c < n * n; ++c) {
    const VectorXd v = svd.matrixV().col(c);
    MatrixXd d(n, n);
    for (int b = 0; b < n; ++b)
      for (int a = 0; a < n; ++a) d(a, b) = v(b * n + a);
    out.basis.push_back(std::move(d));
  }
  return out;
}

SolitonDecomposition solvsoliton_residual(const MetricLieAlgebra& mu, double residual_tol) {
  const CurvatureData curv = ricci(mu);
  const int n = mu.dim();
  const DerivationSpace der = derivation_space(mu);

  auto project = [&](const MatrixXd& x) {
    MatrixXd p = MatrixXd::Zero(n, n);
    for (const auto& b : der.basis) p += frob_inner(x, b) * b;
    return p;
  };

  const MatrixXd id = MatrixXd::Identity(n, n);
  const MatrixXd q_ric = curv.ric - project(curv.ric);
  const MatrixXd q_id = id - project(id);

  SolitonDecomposition out;
  if (q_id.norm() > mu.tol() * std::sqrt(static_cast<double>(std::max(n, 1)))) {
    out.c = frob_inner(q_ric, q_id) / q_id.squaredNorm();
  } else {
    out.c = 0.0;  // identity is (numerically) a derivation; any c works
  }
  out.D = project(curv.ric - out.c * id);
  out.residual = (curv.ric - out.c * id - out.D).norm();
  out.is_soliton = out.residual <= residual_tol;
  return out;
}

bool flatness_test(const MetricLieAlgebra& mu) {
  return std::sqrt(ricci(mu).ric_norm_sq) <= mu.tol();
}

}  // namespace solvpinch
