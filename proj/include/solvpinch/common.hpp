#ifndef SOLVPINCH_COMMON_HPP
#define SOLVPINCH_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace solvpinch {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Default relative tolerance for rank decisions and residual thresholds.
inline constexpr double kDefaultTol = 1e-9;

/// Requested quantity is undefined because the metric is flat.
struct FlatError : std::domain_error {
  using std::domain_error::domain_error;
};

/// An operation's mathematical precondition does not hold for the input.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline MatrixXd sym(const MatrixXd& a) { return 0.5 * (a + a.transpose()); }
inline MatrixXd skew(const MatrixXd& a) { return 0.5 * (a - a.transpose()); }
inline MatrixXd comm(const MatrixXd& a, const MatrixXd& b) { return a * b - b * a; }
inline double frob_inner(const MatrixXd& a, const MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

/// Matrix exponential (scaling-and-squaring with Pade approximants).
MatrixXd expm(const MatrixXd& a);

/// Power test for nilpotency: |A^n| <= tol * |A|^n with n the matrix size.
bool is_nilpotent_matrix(const MatrixXd& a, double tol);

/// Characteristic polynomial coefficients [1, c_{n-1}, ..., c_0] via Faddeev-LeVerrier.
VectorXd char_poly(const MatrixXd& a);

/// Eigenvalues as (re, im) pairs sorted lexicographically; for drift comparisons.
std::vector<std::pair<double, double>> sorted_spectrum(const MatrixXd& a);

/// Deterministic random source. Distribution mappings are hand-rolled so a seed
/// pins the exact stream independent of the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();

  VectorXd normal_vector(int n);
  MatrixXd normal_matrix(int rows, int cols);
  /// Haar-distributed orthogonal matrix (QR of a Gaussian, signs fixed).
  MatrixXd orthogonal(int n);
  /// Invertible conjugator exp(spread * G) with Gaussian G; spread controls conditioning.
  MatrixXd conjugator(int n, double spread);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct Rational {
  long long num = 0;
  long long den = 1;
};

/// Closest p/q to x among denominators 1..max_den. Reporting helper only;
/// numerical comparisons never go through the rounded value.
Rational nearest_rational(double x, long long max_den);
std::string format_rational(const Rational& r);

/// Shortest representation that round-trips through a double.
std::string fmt_double(double x);
/// %.{sig}g formatting for human-facing tables.
std::string fmt_double(double x, int sig);

}  // namespace solvpinch

#endif  // SOLVPINCH_COMMON_HPP
