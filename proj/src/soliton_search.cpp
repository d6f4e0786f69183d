#include "solvpinch/soliton_search.hpp"

#include <algorithm>
#include <cmath>

namespace solvpinch {

namespace {

double sqr(double x) { return x * x; }

std::optional<double> f_of(const MatrixXd& a, double tol) {
  return F_aa(AAData(a, tol));
}

}  // namespace

BetaType make_beta_type(std::vector<double> eigenvalues) {
  std::sort(eigenvalues.begin(), eigenvalues.end());
  BetaType bt;
  bt.m = static_cast<int>(eigenvalues.size());
  bt.b = Eigen::Map<const VectorXd>(eigenvalues.data(), bt.m);
  bt.norm_sq = bt.b.squaredNorm();
  bt.q = bt.norm_sq > 0 ? 1.0 / bt.norm_sq : 0.0;
  return bt;
}

BetaTypeReport type_invariants_check(const BetaType& bt, double tol) {
  BetaTypeReport rep;
  rep.trace = bt.b.sum();
  rep.trace_ok = std::abs(rep.trace + 1.0) <= tol;
  rep.positivity_ok = true;
  for (int j = 0; j < bt.m; ++j)
    if (!(bt.b(j) + bt.norm_sq > tol)) rep.positivity_ok = false;
  for (int j = 0; j < bt.m; ++j)
    if (std::abs(bt.b(j)) > tol) rep.sum_inv_sq_nonzero += 1.0 / sqr(bt.b(j));
  rep.pass = rep.trace_ok && rep.positivity_ok;
  return rep;
}

FlowResult ascent_flow(const AAData& aa, const FlowConfig& cfg) {
  if (aa.flat()) throw FlatError("flat metric: ascent flow undefined for skew A");
  FlowResult out;
  out.A = aa.A;
  double tol = aa.tol;
  double f = *F_aa(aa);
  out.F_trace.push_back(f);
  double res = critical_residual_rel(aa);
  out.final_residual = res;
  if (res <= cfg.grad_tol) {
    out.converged = true;
    return out;
  }

  double h = cfg.step;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    const AAData cur(out.A, tol);
    const OrbitGradient og = grad_F_orbit(cur);
    const double gn = og.generator.norm();
    if (gn == 0.0) break;
    const MatrixXd dir = og.generator / gn;

    bool accepted = false;
    MatrixXd next;
    double f_next = f;
    for (int bt = 0; bt < 60; ++bt) {
      next = expm(h * dir) * out.A * expm(-h * dir);
      if (cfg.normalization == FlowConfig::Normalization::UnitNorm) {
        const double nn = next.norm();
        if (nn > 0) next /= nn;
      }
      const auto fc = f_of(next, tol);
      if (fc && *fc > f) {
        f_next = *fc;
        accepted = true;
        break;
      }
      h *= 0.5;
    }
    if (!accepted) break;

    out.A = next;
    f = f_next;
    out.F_trace.push_back(f);
    out.iterations = iter + 1;
    h = std::min(h * 2.0, 1e3);
    res = critical_residual_rel(AAData(out.A, tol));
    out.final_residual = res;
    if (res <= cfg.grad_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

FlowResult double_bracket_flow(const AAData& aa, const FlowConfig& cfg) {
  if (aa.A.norm() == 0.0) throw PreconditionError("double-bracket flow needs A != 0");
  FlowResult out;
  out.A = aa.A;
  const double tol = aa.tol;
  if (auto f0 = f_of(out.A, tol)) out.F_trace.push_back(*f0);

  MatrixXd m = out.A * out.A.transpose() - out.A.transpose() * out.A;
  out.final_residual = m.norm();
  if (out.final_residual <= cfg.grad_tol) {
    out.converged = true;
    return out;
  }

  double h = cfg.step;
  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    bool accepted = false;
    MatrixXd next, m_next;
    for (int bt = 0; bt < 60; ++bt) {
      next = expm(-h * m) * out.A * expm(h * m);
      if (cfg.normalization == FlowConfig::Normalization::UnitNorm) {
        const double nn = next.norm();
        if (nn > 0) next /= nn;
      }
      m_next = next * next.transpose() - next.transpose() * next;
      if (m_next.norm() < m.norm()) {
        accepted = true;
        break;
      }
      h *= 0.5;
    }
    if (!accepted) break;
    out.A = next;
    m = m_next;
    out.iterations = iter + 1;
    if (auto f = f_of(out.A, tol)) out.F_trace.push_back(*f);
    out.final_residual = m.norm();
    h = std::min(h * 1.5, 1e3);
    if (out.final_residual <= cfg.grad_tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

namespace {

// F of exp(X) . lambda for the nilsoliton search; nullopt on flat transforms.
std::optional<double> transformed_F(const MetricLieAlgebra& lambda, const MatrixXd& x) {
  return pinching_F(lambda.transformed(expm(x)));
}

}  // namespace

BracketFlowResult nilsoliton_find(const MetricLieAlgebra& mu, const FlowConfig& cfg) {
  if (!is_nilpotent(mu)) throw PreconditionError("nilsoliton search needs a nilpotent bracket");
  const int n = mu.dim();
  const double nn = mu.norm();
  if (nn == 0.0) throw FlatError("abelian bracket is flat: F undefined");

  BracketFlowResult out;
  out.bracket = mu.scaled(1.0 / nn);
  const auto f0 = pinching_F(out.bracket);
  if (!f0) throw FlatError("flat bracket: F undefined");
  double f = *f0;
  out.F_trace.push_back(f);
  out.final_residual = solvsoliton_residual(out.bracket).residual;
  if (out.final_residual <= cfg.grad_tol) {
    out.converged = true;
    return out;
  }

  const double fd_eps = 1e-6;
  bool diagonal_phase = true;
  int stall = 0;
  double h = cfg.step;

  for (int iter = 0; iter < cfg.max_iter; ++iter) {
    // finite-difference gradient over the active parameter set
    MatrixXd grad = MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        if (diagonal_phase && a != b) continue;
        MatrixXd x = MatrixXd::Zero(n, n);
        x(a, b) = fd_eps;
        const auto fp = transformed_F(out.bracket, x);
        x(a, b) = -fd_eps;
        const auto fm = transformed_F(out.bracket, x);
        if (fp && fm) grad(a, b) = (*fp - *fm) / (2 * fd_eps);
      }
    }
    const double gn = grad.norm();
    bool stepped = false;
    if (gn > 1e-14) {
      const MatrixXd dir = grad / gn;
      for (int bt = 0; bt < 60; ++bt) {
        MetricLieAlgebra cand = out.bracket.transformed(expm(h * dir));
        cand = cand.scaled(1.0 / cand.norm());
        const auto fc = pinching_F(cand);
        if (fc && *fc > f) {
          out.bracket = std::move(cand);
          f = *fc;
          stepped = true;
          break;
        }
        h *= 0.5;
      }
    }
    out.iterations = iter + 1;
    if (stepped) {
      out.F_trace.push_back(f);
      h = std::min(h * 2.0, 10.0);
      stall = 0;
    } else if (diagonal_phase) {
      diagonal_phase = false;  // widen the search to all parameters
      h = cfg.step;
      continue;
    } else if (++stall >= 3) {
      break;
    }

    out.final_residual = solvsoliton_residual(out.bracket).residual;
    if (out.final_residual <= cfg.grad_tol) {
      out.converged = true;
      break;
    }
  }

  // Polish: ascent on F flattens out once improvements reach machine noise
  // (the gain per step scales like residual^2), so finish by descending the
  // soliton residual itself.
  double res = solvsoliton_residual(out.bracket).residual;
  double h2 = 0.01;
  for (int iter = out.iterations; iter < cfg.max_iter && res > cfg.grad_tol; ++iter) {
    MatrixXd grad = MatrixXd::Zero(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        MatrixXd x = MatrixXd::Zero(n, n);
        x(a, b) = fd_eps;
        const double rp = solvsoliton_residual(out.bracket.transformed(expm(x))).residual;
        x(a, b) = -fd_eps;
        const double rm = solvsoliton_residual(out.bracket.transformed(expm(x))).residual;
        grad(a, b) = (rp - rm) / (2 * fd_eps);
      }
    const double gn = grad.norm();
    if (gn <= 1e-14) break;
    const MatrixXd dir = -grad / gn;
    bool stepped = false;
    for (int bt = 0; bt < 40; ++bt) {
      MetricLieAlgebra cand = out.bracket.transformed(expm(h2 * dir));
      cand = cand.scaled(1.0 / cand.norm());
      const double rc = solvsoliton_residual(cand).residual;
      if (rc < res) {
        out.bracket = std::move(cand);
        res = rc;
        stepped = true;
        break;
      }
      h2 *= 0.5;
    }
    out.iterations = iter + 1;
    if (!stepped) break;
    if (const auto f = pinching_F(out.bracket)) out.F_trace.push_back(*f);
    h2 = std::min(h2 * 2.0, 1.0);
  }

  out.final_residual = res;
  out.converged = res <= cfg.grad_tol;
  return out;
}

BetaType beta_from_nilsoliton(const MetricLieAlgebra& lambda, double tol) {
  if (!is_nilpotent(lambda)) throw PreconditionError("beta extraction needs a nilpotent bracket");
  const SolitonDecomposition sd = solvsoliton_residual(lambda, tol);
  if (sd.residual > tol)
    throw PreconditionError("bracket is not a nilsoliton within tolerance");
  const int n = lambda.dim();
  const double tr_d = sd.D.trace();
  if (std::abs(tr_d) <= tol) throw PreconditionError("degenerate soliton derivation: tr D = 0");
  const double tr_d2 = (sd.D * sd.D).trace();
  MatrixXd beta0 = sd.D - (tr_d2 / tr_d) * MatrixXd::Identity(n, n);
  const double tr_b0 = beta0.trace();
  if (tr_b0 >= -tol) throw PreconditionError("beta normalization failed: tr beta_0 >= 0");
  const MatrixXd beta = beta0 * (-1.0 / tr_b0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(beta));
  std::vector<double> eigs(es.eigenvalues().data(), es.eigenvalues().data() + n);
  BetaType bt = make_beta_type(std::move(eigs));
  const BetaTypeReport rep = type_invariants_check(bt, 1e-6);
  if (!rep.pass) throw PreconditionError("extracted eigenvalues violate the type constraints");
  return bt;
}

double pinching_bound(int n, int m, const std::optional<BetaType>& bt) {
  if (m < 1 || m > n) throw std::invalid_argument("need 1 <= m <= n");
  if (!bt) return static_cast<double>(n - m);
  if (bt->m != m) throw std::invalid_argument("type size does not match the nilradical dimension");
  const double bound = static_cast<double>(n - m) + bt->q;
  if (!(bound < static_cast<double>(n - 1)))
    throw std::domain_error("bound >= n-1: eigenvalue list is not a valid type");
  return bound;
}

MatrixXd beta_sigma(const BetaType& bt, int n) {
  if (n < bt.m) throw std::invalid_argument("ambient dimension smaller than the type size");
  MatrixXd out = MatrixXd::Zero(n, n);
  const int a_dim = n - bt.m;
  for (int i = 0; i < a_dim; ++i) out(i, i) = -bt.norm_sq;
  for (int j = 0; j < bt.m; ++j) out(a_dim + j, a_dim + j) = bt.b(j);
  return out;
}

namespace {

std::vector<int> complement_of(int n, const std::vector<int>& idx) {
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (int i : idx) {
    if (i < 0 || i >= n) throw std::invalid_argument("split index out of range");
    if (used[static_cast<std::size_t>(i)]) throw std::invalid_argument("split index repeated");
    used[static_cast<std::size_t>(i)] = 1;
  }
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (!used[static_cast<std::size_t>(i)]) rest.push_back(i);
  return rest;
}

}  // namespace

UnimodularSolitonReport solvsoliton_verify_unimodular(const MetricLieAlgebra& mu,
                                                      const std::vector<int>& nilradical,
                                                      const BetaType& bt, double tol) {
  if (!is_unimodular(mu)) throw PreconditionError("verification requires a unimodular bracket");
  const int n = mu.dim();
  const int m = static_cast<int>(nilradical.size());
  if (m != bt.m) throw std::invalid_argument("split size does not match the type size");
  const std::vector<int> a_idx = complement_of(n, nilradical);

  const CurvatureData curv = ricci(mu);
  const MetricLieAlgebra nil = mu.restricted(nilradical);  // throws on a malformed split
  const CurvatureData nil_curv = ricci(nil);

  UnimodularSolitonReport rep;
  rep.scal_n = nil_curv.scal;

  // Ric restricted to the nilradical coordinates vs -scal_N * beta, compared
  // through sorted spectra (beta is only known up to orthogonal conjugation).
  MatrixXd ric_n(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      ric_n(i, j) = curv.ric(nilradical[static_cast<std::size_t>(i)],
                             nilradical[static_cast<std::size_t>(j)]);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(ric_n));
  VectorXd target = -rep.scal_n * bt.b;  // -scal_N > 0 keeps the order
  std::sort(target.data(), target.data() + target.size());
  const double scale = std::max(target.norm(), 1e-300);
  rep.spectral_residual = (es.eigenvalues() - target).norm() / scale;

  for (int i : a_idx)
    for (int j : nilradical)
      rep.offblock_residual = std::max(rep.offblock_residual, std::abs(curv.ric(i, j)));

  const double a_target = rep.scal_n * bt.norm_sq;  // = -scal_N * (-|b|^2)
  for (std::size_t i = 0; i < a_idx.size(); ++i)
    for (std::size_t j = 0; j < a_idx.size(); ++j) {
      const double want = i == j ? a_target : 0.0;
      rep.a_block_residual = std::max(
          rep.a_block_residual,
          std::abs(curv.ric(a_idx[i], a_idx[j]) - want) / std::max(std::abs(a_target), 1e-300));
    }

  rep.pass = rep.spectral_residual <= tol && rep.offblock_residual <= tol * scale &&
             (a_idx.empty() || rep.a_block_residual <= tol);
  return rep;
}

EbetaReport ebeta_pairing(const MetricLieAlgebra& mu, const std::vector<int>& nilradical,
                          const std::optional<VectorXd>& beta_diag, double tol) {
  if (!is_unimodular(mu)) throw PreconditionError("pairing requires a unimodular bracket");
  const int n = mu.dim();
  const int m = static_cast<int>(nilradical.size());
  if (beta_diag && beta_diag->size() != m)
    throw std::invalid_argument("beta eigenvalue list does not match the split size");
  const std::vector<int> a_idx = complement_of(n, nilradical);

  const CurvatureData curv = ricci(mu);
  // beta_+ on the nilradical coordinates: beta + |beta|^2 I, or I when abelian.
  VectorXd beta_plus(m);
  VectorXd beta = VectorXd::Zero(m);
  if (beta_diag) {
    beta = *beta_diag;
    beta_plus = beta.array() + beta.squaredNorm();
  } else {
    beta_plus.setOnes();
  }

  EbetaReport rep;
  for (int i = 0; i < m; ++i)
    rep.pairing += curv.ric(nilradical[static_cast<std::size_t>(i)],
                            nilradical[static_cast<std::size_t>(i)]) *
                   beta_plus(i);
  rep.nonnegative = rep.pairing >= -tol;
  rep.equality = std::abs(rep.pairing) <= tol;

  if (rep.equality) {
    StructuralReport st;
    const double scale = std::max(1.0, mu.norm());
    for (std::size_t i = 0; i < a_idx.size(); ++i)
      for (std::size_t j = 0; j < a_idx.size(); ++j)
        for (int k = 0; k < n; ++k)
          st.a_abelian_residual =
              std::max(st.a_abelian_residual, std::abs(mu.c(a_idx[i], a_idx[j], k)));

    // [beta, ad x|_n] for x ranging over the a coordinates
    for (int x : a_idx) {
      MatrixXd ad_n(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          ad_n(j, i) = mu.c(x, nilradical[static_cast<std::size_t>(i)],
                            nilradical[static_cast<std::size_t>(j)]);
      const MatrixXd bmat = beta.asDiagonal();
      st.commute_residual = std::max(st.commute_residual, comm(bmat, ad_n).norm());
    }

    // beta_+ as a derivation of the nilradical bracket
    const MetricLieAlgebra nil = mu.restricted(nilradical);
    double der_res = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const double want = (beta_plus(i) + beta_plus(j) - beta_plus(k)) * nil.c(i, j, k);
          der_res = std::max(der_res, std::abs(want));
        }
    st.derivation_residual = der_res;

    st.a_abelian = st.a_abelian_residual <= tol * scale;
    st.beta_commutes = st.commute_residual <= tol * scale;
    st.beta_plus_derivation = st.derivation_residual <= tol * scale;
    rep.structural = st;
  }
  return rep;
}

NormEstimateReport norm_estimate_check(const MetricLieAlgebra& mu, int n, int m,
                                       const std::optional<BetaType>& bt, double tol) {
  if (!is_unimodular(mu)) throw PreconditionError("estimate requires a unimodular bracket");
  const CurvatureData curv = ricci(mu);
  if (curv.flat()) throw FlatError("flat metric: estimate undefined");
  NormEstimateReport rep;
  const double q = bt ? bt->q : 0.0;
  rep.bound = static_cast<double>(n - m) + q;
  rep.ric_norm = std::sqrt(curv.ric_norm_sq);
  rep.estimate = -curv.scal / std::sqrt(rep.bound);
  rep.holds = rep.ric_norm >= rep.estimate - tol;
  rep.equality = std::abs(rep.ric_norm - rep.estimate) <= tol;
  rep.F = *curv.F;
  rep.F_bound_holds = rep.F <= rep.bound + tol;
  return rep;
}

std::string to_string(Table1Status s) {
  switch (s) {
    case Table1Status::Match: return "match";
    case Table1Status::Mismatch: return "mismatch";
    case Table1Status::Inconclusive: return "inconclusive";
    case Table1Status::PrintedInconsistent: return "printed-row-inconsistent";
  }
  return "?";
}

MetricLieAlgebra table1_fixture(int index) {
  const double r2 = std::sqrt(2.0);
  const double r3 = std::sqrt(3.0);
  std::vector<BracketEntry> e;
  switch (index) {
    case 1: e = {{1, 2, 3, 3}, {1, 3, 4, 4}, {1, 4, 5, 3}}; break;
    case 2: e = {{1, 2, 3, r3}, {1, 3, 4, r3}, {1, 4, 5, r2}, {2, 3, 5, r2}}; break;
    case 3: e = {{1, 2, 4, 1}, {1, 4, 5, r2}, {2, 3, 5, r2}}; break;
    case 4: e = {{1, 2, 5, 1}, {3, 4, 5, 1}}; break;
    case 5: e = {{1, 2, 3, 2}, {1, 3, 4, r3}, {2, 3, 5, r3}}; break;
    case 6: e = {{1, 2, 3, r3}, {1, 3, 4, r3}, {1, 4, 5, r2}, {2, 3, 5, r2}}; break;
    case 7: e = {{1, 2, 3, 1}}; break;
    case 8: e = {{1, 2, 3, 1}, {1, 3, 4, 1}}; break;
    default: throw std::invalid_argument("fixture index must be in 1..8");
  }
  return MetricLieAlgebra::from_entries(5, e);
}

std::vector<double> table1_printed_type(int index) {
  switch (index) {
    case 1: return {-1.0, -1.0 / 3, -0.1, 0.1, 1.0 / 3};
    case 2: return {-0.8, -0.5, -0.2, 0.1, 0.4};
    case 3: return {-0.8, -0.6, -0.2, 0.0, 0.6};
    case 4: return {-0.5, -0.5, -0.5, -0.5, 1.0};
    case 5: return {-0.7, -0.7, -0.2, 0.3, 0.3};
    case 6: return {-1.0, -0.5, -0.5, 0.5, 0.5};
    case 7: return {-1.0, -1.0, 0.0, 0.0, 1.0};
    case 8: return {-1.0, -0.5, 0.0, 0.0, 0.5};
    default: throw std::invalid_argument("fixture index must be in 1..8");
  }
}

double table1_printed_q(int index) {
  switch (index) {
    case 1: return 5.0 / 6;
    case 2: return 10.0 / 11;
    case 3: return 5.0 / 7;
    case 4: return 0.5;
    case 5: return 5.0 / 6;
    case 6: return 0.5;
    case 7: return 1.0 / 3;
    case 8: return 2.0 / 3;
    default: throw std::invalid_argument("fixture index must be in 1..8");
  }
}

Table1Report table1_reproduce(const FlowConfig& cfg, const std::vector<int>& rows) {
  Table1Report report;
  for (int idx : rows) {
    Table1Row row;
    row.name = "mu" + std::to_string(idx);
    row.printed_type = table1_printed_type(idx);
    row.printed_q = table1_printed_q(idx);

    const BracketFlowResult flow = nilsoliton_find(table1_fixture(idx), cfg);
    if (!flow.converged) {
      row.status = Table1Status::Inconclusive;
      row.note = "flow did not reach the residual tolerance";
      report.rows.push_back(std::move(row));
      continue;
    }
    const BetaType bt = beta_from_nilsoliton(flow.bracket, std::max(cfg.grad_tol * 10, 1e-7));
    row.computed_type.assign(bt.b.data(), bt.b.data() + bt.m);
    row.computed_q = bt.q;

    double printed_norm_sq = 0.0;
    for (double v : row.printed_type) printed_norm_sq += v * v;
    const double printed_q_from_type = 1.0 / printed_norm_sq;
    if (std::abs(printed_q_from_type - row.printed_q) > 1e-6) {
      row.status = Table1Status::PrintedInconsistent;
      row.note = "published type gives q = " + fmt_double(printed_q_from_type, 6) +
                 " but the published q is " + fmt_double(row.printed_q, 6);
      report.rows.push_back(std::move(row));
      continue;
    }

    double type_diff = 0.0;
    for (int i = 0; i < bt.m; ++i)
      type_diff = std::max(type_diff,
                           std::abs(bt.b(i) - row.printed_type[static_cast<std::size_t>(i)]));
    const double q_diff = std::abs(bt.q - row.printed_q);
    row.status =
        (type_diff <= 1e-6 && q_diff <= 1e-6) ? Table1Status::Match : Table1Status::Mismatch;
    if (row.status == Table1Status::Mismatch)
      row.note = "max type deviation " + fmt_double(type_diff, 3);
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace solvpinch
