#include "solvpinch/common.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace solvpinch {

MatrixXd expm(const MatrixXd& a) { return a.exp(); }

bool is_nilpotent_matrix(const MatrixXd& a, double tol) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return true;
  const double scale = a.norm();
  if (scale == 0.0) return true;
  MatrixXd p = a;
  for (int k = 1; k < n; ++k) p = p * a;
  return p.norm() <= tol * std::pow(scale, n);
}

VectorXd char_poly(const MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  VectorXd coeffs(n + 1);
  coeffs(0) = 1.0;
  MatrixXd m = MatrixXd::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = a * m + coeffs(k - 1) * MatrixXd::Identity(n, n);
    coeffs(k) = -(a * m).trace() / k;
  }
  return coeffs;
}

std::vector<std::pair<double, double>> sorted_spectrum(const MatrixXd& a) {
  Eigen::EigenSolver<MatrixXd> es(a, false);
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(a.rows()));
  for (int i = 0; i < a.rows(); ++i)
    out.emplace_back(es.eigenvalues()(i).real(), es.eigenvalues()(i).imag());
  std::sort(out.begin(), out.end());
  return out;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller on our own uniform stream.
  double u1 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

VectorXd Rng::normal_vector(int n) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = normal();
  return v;
}

MatrixXd Rng::normal_matrix(int rows, int cols) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = normal();
  return m;
}

MatrixXd Rng::orthogonal(int n) {
  const MatrixXd g = normal_matrix(n, n);
  Eigen::HouseholderQR<MatrixXd> qr(g);
  MatrixXd q = qr.householderQ();
  const MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  return q;
}

MatrixXd Rng::conjugator(int n, double spread) {
  return expm(spread * normal_matrix(n, n));
}

Rational nearest_rational(double x, long long max_den) {
  Rational best{static_cast<long long>(std::llround(x)), 1};
  double best_err = std::abs(x - static_cast<double>(best.num));
  for (long long q = 2; q <= max_den; ++q) {
    const long long p = static_cast<long long>(std::llround(x * static_cast<double>(q)));
    const double err = std::abs(x - static_cast<double>(p) / static_cast<double>(q));
    if (err < best_err - 1e-15) {
      best = {p, q};
      best_err = err;
    }
  }
  if (best.den < 0) {
    best.num = -best.num;
    best.den = -best.den;
  }
  return best;
}

std::string format_rational(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::string fmt_double(double x) {
  if (x == 0.0) return "0";  // normalize -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string fmt_double(double x, int sig) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", sig, x);
  return std::string(buf);
}

}  // namespace solvpinch
