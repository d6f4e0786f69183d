#include "solvpinch/almost_abelian.hpp"

#include <cmath>

namespace solvpinch {

namespace {

double sqr(double x) { return x * x; }

void require_not_flat(const AAData& aa) {
  if (aa.flat()) throw FlatError("flat metric: F undefined for skew A");
}

}  // namespace

AAData::AAData(MatrixXd a, double tolerance) : A(std::move(a)), tol(tolerance) {
  if (A.rows() != A.cols()) throw std::invalid_argument("A must be square");
  if (tol <= 0) throw std::invalid_argument("tolerance must be positive");
  S = sym(A);
  Sk = skew(A);
  comm = A * A.transpose() - A.transpose() * A;
  tr_a = A.trace();
  tr_s2 = S.squaredNorm();
}

MetricLieAlgebra bracket_of(const AAData& aa) {
  const int n = aa.ambient_dim();
  std::vector<MatrixXd> c(static_cast<std::size_t>(n), MatrixXd::Zero(n, n));
  auto& top = c[static_cast<std::size_t>(n - 1)];
  top.topLeftCorner(n - 1, n - 1) = aa.A.transpose();  // row j, col k = <A e_j, e_k>
  for (int j = 0; j < n - 1; ++j)
    c[static_cast<std::size_t>(j)].row(n - 1).head(n - 1) = -aa.A.col(j).transpose();
  return MetricLieAlgebra(std::move(c), aa.tol);
}

CurvatureData ricci_aa(const AAData& aa) {
  const int m = aa.ideal_dim();
  CurvatureData out;
  out.ric = MatrixXd::Zero(m + 1, m + 1);
  out.ric.topLeftCorner(m, m) = 0.5 * aa.comm - aa.tr_a * aa.S;
  out.ric(m, m) = -aa.tr_s2;
  out.scal = out.ric.trace();
  out.ric_norm_sq = out.ric.squaredNorm();
  if (!aa.flat()) out.F = F_aa(aa);
  return out;
}

std::optional<double> F_aa(const AAData& aa) {
  if (aa.flat()) return std::nullopt;
  const double p = aa.tr_s2 + sqr(aa.tr_a);
  return sqr(p) / (aa.tr_s2 * p + 0.25 * aa.comm.squaredNorm());
}

double F_on_orbit_closure(const AAData& base, const MatrixXd& b) {
  const double c0 = 0.5 * (base.A * base.A).trace() + sqr(base.tr_a);
  const double d0 = 0.5 * (base.A * base.A).trace();
  const double x = 0.5 * b.squaredNorm();
  const MatrixXd bb = b * b.transpose() - b.transpose() * b;
  return sqr(x + c0) / ((x + d0) * (x + c0) + 0.25 * bb.squaredNorm());
}

GradCoefficients grad_coefficients(const AAData& aa) {
  require_not_flat(aa);
  const double p = aa.tr_s2 + sqr(aa.tr_a);
  const double m2 = aa.comm.squaredNorm();
  GradCoefficients gc;
  gc.c1 = aa.tr_a * p * (2.0 * aa.tr_s2 * p + m2);
  gc.c2 = p * (-2.0 * sqr(aa.tr_a) * p + m2);
  gc.c3 = sqr(p);
  gc.c4 = aa.tr_s2 * p + 0.25 * m2;
  return gc;
}

MatrixXd grad_F(const AAData& aa) {
  const GradCoefficients gc = grad_coefficients(aa);
  const int m = aa.ideal_dim();
  const MatrixXd triple = comm(aa.A, aa.comm);  // [A, [A, A^t]]
  return (gc.c1 * MatrixXd::Identity(m, m) + gc.c2 * aa.S + gc.c3 * triple) / sqr(gc.c4);
}

namespace {

// The linear map B -> [B, A] as an m^2 x m^2 matrix on column-major vec(B).
MatrixXd conjugation_tangent_operator(const MatrixXd& a) {
  const int m = static_cast<int>(a.rows());
  MatrixXd op(m * m, m * m);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      // column for B = E_{ij}: [E_{ij}, A] has row i = A(j,:) and column j -= A(:,i)
      MatrixXd e = MatrixXd::Zero(m, m);
      e.row(i) = a.row(j);
      e.col(j) -= a.col(i);
      op.col(j * m + i) = Eigen::Map<const VectorXd>(e.data(), m * m);
    }
  return op;
}

}  // namespace

OrbitGradient grad_F_orbit(const AAData& aa) {
  const MatrixXd g = grad_F(aa);
  const int m = aa.ideal_dim();
  const MatrixXd op = conjugation_tangent_operator(aa.A);
  Eigen::BDCSVD<MatrixXd> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-12 * sv(0) : 0.0;
  VectorXd gv = Eigen::Map<const VectorXd>(g.data(), m * m);
  VectorXd coeffs = svd.matrixU().transpose() * gv;
  VectorXd sol = VectorXd::Zero(m * m);
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) sol += (coeffs(i) / sv(i)) * svd.matrixV().col(i);
  OrbitGradient out;
  out.generator = Eigen::Map<const MatrixXd>(sol.data(), m, m);
  out.tangent = comm(out.generator, aa.A);
  out.residual = (g - out.tangent).norm();
  return out;
}

double critical_residual(const AAData& aa) {
  const GradCoefficients gc = grad_coefficients(aa);
  const MatrixXd triple = comm(aa.A, aa.comm);
  const MatrixXd lhs = gc.c2 * aa.comm;
  const MatrixXd rhs = 2.0 * gc.c3 * comm(aa.A.transpose(), triple);
  return (lhs - rhs).norm();
}

double critical_residual_rel(const AAData& aa) {
  const double s = aa.A.norm();
  if (s == 0.0) return 0.0;
  return critical_residual(aa) / std::pow(s, 6);
}

bool orbit_critical(const AAData& aa, double tol) { return critical_residual_rel(aa) <= tol; }

GlobalCriticality global_critical_test(const AAData& aa) {
  require_not_flat(aa);
  const int m = aa.ideal_dim();
  const double scale = aa.A.norm();
  const double c = aa.S.trace() / m;
  const bool s_scalar = (aa.S - c * MatrixXd::Identity(m, m)).norm() <= aa.tol * scale;
  if (s_scalar && std::abs(c) > aa.tol * scale) return GlobalCriticality::Einstein;
  const bool normal = aa.comm.norm() <= aa.tol * sqr(scale);
  const bool traceless = std::abs(aa.tr_a) <= aa.tol * scale;
  if (normal && traceless) return GlobalCriticality::UnimodularNormal;
  return GlobalCriticality::NotCritical;
}

SolvsolitonVerdict solvsoliton_test_aa(const AAData& aa) {
  SolvsolitonVerdict v;
  const double scale = aa.A.norm();
  if (scale == 0.0 || aa.comm.norm() <= aa.tol * sqr(scale)) {
    v.kind = SolvsolitonKind::Normal;
    return v;
  }
  if (is_nilpotent_matrix(aa.A, aa.tol)) {
    const MatrixXd triple = comm(aa.A, aa.comm);
    const double c = frob_inner(triple, aa.A) / aa.A.squaredNorm();
    if ((triple - c * aa.A).norm() <= aa.tol * std::pow(scale, 3)) {
      v.kind = SolvsolitonKind::Nilsoliton;
      v.c = c;
      return v;
    }
  }
  v.kind = SolvsolitonKind::NotSolvsoliton;
  return v;
}

double second_variation(const AAData& aa, const MatrixXd& b) {
  if (!orbit_critical(aa))
    throw PreconditionError("second variation formula requires an orbit-critical point");
  const GradCoefficients gc = grad_coefficients(aa);
  const MatrixXd& m = aa.comm;
  const MatrixXd ba = comm(b, aa.A);
  const MatrixXd bta = comm(b.transpose(), aa.A);
  const MatrixXd triple = comm(aa.A, m);

  // d/dt of (c2 <S, a'> + c3 <[a,[a,a^t]], a'>) along a(t) = e^{tB} A e^{-tB},
  // using <S,[B,A]> = <[A,A^t],B>/2 and the criticality relation to eliminate
  // <[A,[A,A^t]],[B,A]>. The <m,B>^2 coefficient comes out as
  // |m|^2/2 - 2 (tr A)^2 (tr S^2 + (tr A)^2); cross-checked against central
  // differences of F.
  const double p = aa.tr_s2 + sqr(aa.tr_a);
  const double mb = frob_inner(m, b);
  double total = (0.5 * m.squaredNorm() - 2.0 * sqr(aa.tr_a) * p) * sqr(mb);
  total += gc.c2 * (0.5 * ba.squaredNorm() + 0.5 * frob_inner(bta, ba));
  double t3 = frob_inner(comm(ba, m), ba);
  t3 -= 2.0 * sym(comm(aa.A.transpose(), ba)).squaredNorm();
  t3 += frob_inner(triple, comm(b, ba));
  total += gc.c3 * t3;
  // the remaining 1/c4^2 is the prefactor of the first-variation formula; its
  // own derivative drops out at a critical point
  return total / sqr(gc.c4);
}

double second_variation_fd(const AAData& aa, const MatrixXd& b, double h) {
  if (h <= 0) throw std::invalid_argument("finite-difference step must be positive");
  require_not_flat(aa);
  const MatrixXd e = expm(h * b);
  const MatrixXd einv = expm(-h * b);
  const auto fp = F_aa(AAData(e * aa.A * einv, aa.tol));
  const auto fm = F_aa(AAData(einv * aa.A * e, aa.tol));
  const auto f0 = F_aa(aa);
  if (!fp || !fm || !f0) throw FlatError("flat matrix encountered along the curve");
  return (*fp - 2.0 * *f0 + *fm) / (h * h);
}

LocalMaxVerdict local_max_classify(const AAData& aa, int trials, std::uint64_t seed) {
  if (!orbit_critical(aa))
    throw PreconditionError("local max classification requires an orbit-critical point");
  const int m = aa.ideal_dim();
  const double zero_tol = 1e-8;
  const double scale = std::max(1.0, aa.A.norm());
  bool saw_degenerate = false;
  bool saw_negative = false;

  // At a critical point the orbit Hessian depends only on the curve tangent
  // [B, A], and F is constant along orthogonal conjugation, so the random
  // directions are orthogonalized against [so, A] and rescaled so every probe
  // has a unit tangent.
  MatrixXd iso(m * m, std::max(m * (m - 1) / 2, 1));
  iso.setZero();
  int col = 0;
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      MatrixXd c = MatrixXd::Zero(m, m);
      c(i, j) = 1.0;
      c(j, i) = -1.0;
      const MatrixXd ca = comm(c, aa.A);
      iso.col(col++) = Eigen::Map<const VectorXd>(ca.data(), m * m);
    }
  const auto iso_svd = iso.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);
  const MatrixXd op = conjugation_tangent_operator(aa.A);
  const auto op_svd = op.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV);

  auto classify = [&](double sv) {
    if (sv < -zero_tol)
      saw_negative = true;
    else
      saw_degenerate = true;
  };

  // The [A, A^t] direction first: it decides saddles with tr A != 0 outright.
  if (aa.comm.norm() > zero_tol * scale * scale) {
    const double sv = second_variation(aa, aa.comm / aa.comm.norm());
    if (sv > zero_tol) return LocalMaxVerdict::Saddle;
    classify(sv);
  }

  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const MatrixXd b = rng.normal_matrix(m, m);
    MatrixXd tangent = comm(b, aa.A);
    if (tangent.norm() <= 1e-12 * scale) continue;
    VectorXd tv = Eigen::Map<const VectorXd>(tangent.data(), m * m);
    if (col > 0) tv -= iso * iso_svd.solve(tv);  // quotient by the isometry orbit
    if (tv.norm() <= 1e-9 * scale) continue;
    // minimum-norm generator with [G, A] equal to the reduced tangent
    const VectorXd gv = op_svd.solve(tv / tv.norm());
    const MatrixXd gen = Eigen::Map<const MatrixXd>(gv.data(), m, m);
    const double sv = second_variation(aa, gen);
    if (sv > zero_tol) return LocalMaxVerdict::Saddle;
    classify(sv);
  }

  if (saw_degenerate) return LocalMaxVerdict::Degenerate;
  if (saw_negative) return LocalMaxVerdict::MaxCandidate;
  return LocalMaxVerdict::Degenerate;  // no direction moved the orbit
}

std::optional<RicciSolitonParts> ricci_soliton_decompose(const AAData& aa) {
  if (!orbit_critical(aa))
    throw PreconditionError("decomposition requires an orbit-critical point");
  const double scale = std::max(1.0, aa.A.norm());
  if (std::abs(aa.tr_a) > aa.tol * scale)
    throw PreconditionError("decomposition requires tr A = 0");

  const MatrixXd triple = comm(aa.A, aa.comm);  // [A, [A, A^t]]
  if (comm(aa.A, triple).norm() > aa.tol * std::pow(scale, 4)) return std::nullopt;

  const MatrixXd st = sym(triple);
  if (st.norm() <= aa.tol * std::pow(scale, 3)) return std::nullopt;  // normal case
  const double c = frob_inner(aa.S, st) / st.squaredNorm();
  if ((aa.S - c * st).norm() > 1e-7 * std::max(aa.S.norm(), 1e-12)) return std::nullopt;
  if (c == 0.0) return std::nullopt;

  const MatrixXd b = aa.A / c - triple;
  if (sym(b).norm() > 1e-7 * std::max(b.norm(), 1e-12)) return std::nullopt;
  RicciSolitonParts parts;
  parts.c = c;
  parts.C = c * b;
  parts.N = aa.A - parts.C;

  // N must be a nilsoliton commuting with the skew part.
  if (!is_nilpotent_matrix(parts.N, 1e-8)) return std::nullopt;
  const MatrixXd ntriple = comm(parts.N, comm(parts.N, parts.N.transpose()));
  const double nn = parts.N.squaredNorm();
  if (nn == 0.0) return std::nullopt;
  const double k = frob_inner(ntriple, parts.N) / nn;
  if ((ntriple - k * parts.N).norm() > 1e-7 * std::pow(parts.N.norm(), 3)) return std::nullopt;
  if (comm(parts.N, parts.C).norm() >
      1e-7 * std::max(parts.N.norm() * parts.C.norm(), 1e-12))
    return std::nullopt;
  return parts;
}

MomentMapValue moment_map(const AAData& aa) {
  const double n2 = aa.A.squaredNorm();
  if (n2 == 0.0) throw PreconditionError("moment map undefined at the zero matrix");
  return {aa.comm / n2, aa.comm.norm() / n2};
}

Family family_from_name(std::string_view name) {
  if (name == "a_t") return Family::AT;
  if (name == "b_t") return Family::BT;
  if (name == "c_t") return Family::CT;
  if (name == "d_t") return Family::DT;
  if (name == "e_t") return Family::ET;
  if (name == "jordan_t") return Family::JordanT;
  throw std::invalid_argument("unknown family: " + std::string(name));
}

std::string family_name(Family f) {
  switch (f) {
    case Family::AT: return "a_t";
    case Family::BT: return "b_t";
    case Family::CT: return "c_t";
    case Family::DT: return "d_t";
    case Family::ET: return "e_t";
    case Family::JordanT: return "jordan_t";
  }
  return "?";
}

FamilySample family(Family f, double t, std::optional<int> n) {
  MatrixXd a;
  std::optional<double> closed;
  const double t2 = t * t;
  switch (f) {
    case Family::AT: {
      a.resize(2, 2);
      a << t, -1, 1, -t;
      if (t != 0.0) closed = t2 * t2 / (t2 * t2 + 2 * t2);
      break;
    }
    case Family::BT: {
      a.resize(2, 2);
      a << t, -1, 1, t;
      if (t != 0.0) closed = 3.0;
      break;
    }
    case Family::CT: {
      if (t <= 0.0) throw std::invalid_argument("c_t requires t > 0");
      a = MatrixXd::Zero(3, 3);
      a.topLeftCorner(2, 2) << t, -1, 1, -t;
      a(2, 2) = t;
      closed = 4 * t2 * t2 / (3 * t2 * t2 + 2 * t2);
      break;
    }
    case Family::DT: {
      if (t <= 0.0) throw std::invalid_argument("d_t requires t > 0");
      a = MatrixXd::Zero(4, 4);
      a.topLeftCorner(2, 2) << 0, -1, 1, 0;
      a(2, 3) = t;
      closed = 1.0 / 3.0;
      break;
    }
    case Family::ET: {
      if (t <= 0.0) throw std::invalid_argument("e_t requires t > 0");
      const double s = std::sqrt(1.0 + t2);
      a = MatrixXd::Zero(4, 4);
      a.topLeftCorner(2, 2) << t, -s, s, -t;
      a(2, 3) = t;
      // tr S^2 = 5t^2/2, |[A,A^t]|^2 = 32 t^2 (1 + t^2) + 2 t^4
      closed = 25 * t2 * t2 / (59 * t2 * t2 + 32 * t2);
      break;
    }
    case Family::JordanT: {
      a.resize(2, 2);
      a << 1, t, 0, 1;
      const double num = 6.0 + 0.5 * t2;
      closed = num * num / ((2.0 + 0.5 * t2) * num + 0.5 * t2 * t2);
      break;
    }
  }
  if (n) {
    const int want = *n - 1;
    if (want < a.rows()) throw std::invalid_argument("requested dimension too small for family");
    MatrixXd padded = MatrixXd::Zero(want, want);
    padded.topLeftCorner(a.rows(), a.cols()) = a;
    a = std::move(padded);
  }
  return {AAData(std::move(a)), closed};
}

FamilySample family(std::string_view name, double t, std::optional<int> n) {
  return family(family_from_name(name), t, n);
}

CollapseSample collapse_family(const std::vector<double>& a, double eps, int r) {
  if (a.empty()) throw std::invalid_argument("collapse family needs at least one block");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("collapse family requires eps in (0,1)");
  if (r < 1) throw std::invalid_argument("collapse family needs r >= 1 abelian directions");
  const int k = static_cast<int>(a.size());
  MatrixXd blocks = MatrixXd::Zero(2 * k + (r - 1), 2 * k + (r - 1));
  double sum_sq = 0.0, sum_quart = 0.0;
  for (int j = 0; j < k; ++j) {
    const double aj = a[static_cast<std::size_t>(j)];
    blocks(2 * j, 2 * j) = eps * aj;
    blocks(2 * j, 2 * j + 1) = -aj;
    blocks(2 * j + 1, 2 * j) = aj;
    blocks(2 * j + 1, 2 * j + 1) = -eps * aj;
    sum_sq += aj * aj;
    sum_quart += aj * aj * aj * aj;
  }
  const double c1 = sum_sq * sum_sq;
  const double c2 = sum_quart;
  const double e2 = eps * eps;
  CollapseSample out{bracket_of(AAData(std::move(blocks))), 0.0};
  out.F_closed = c1 * e2 * e2 / (c1 * e2 * e2 + 2.0 * c2 * e2);
  return out;
}

double unimodular_F(const AAData& aa) {
  if (std::abs(aa.tr_a) > aa.tol * std::max(1.0, aa.A.norm()))
    throw PreconditionError("unimodular formula requires tr A = 0");
  require_not_flat(aa);
  const double s2 = sqr(aa.tr_s2);
  return s2 / (s2 + 0.25 * aa.comm.squaredNorm());
}

}  // namespace solvpinch
