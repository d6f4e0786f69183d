#ifndef SOLVPINCH_TESTS_FIXTURES_HPP
#define SOLVPINCH_TESTS_FIXTURES_HPP

#include "solvpinch/almost_abelian.hpp"
#include "solvpinch/lie_algebra.hpp"

namespace solvpinch::fixtures {

/// mu(e1, e2) = e3 on R^3.
inline MetricLieAlgebra heis3() {
  return MetricLieAlgebra::from_entries(3, {{1, 2, 3, 1.0}});
}

/// mu(e_n, e_i) = e_i: the real hyperbolic space metric algebra.
inline MetricLieAlgebra hyp(int n) {
  std::vector<BracketEntry> e;
  for (int i = 1; i < n; ++i) e.push_back({n, i, i, 1.0});
  return MetricLieAlgebra::from_entries(n, e);
}

inline MatrixXd e12(int size = 2) {
  MatrixXd a = MatrixXd::Zero(size, size);
  a(0, 1) = 1.0;
  return a;
}

/// Nilsoliton plus commuting skew block: E12 + (E34 - E43) in gl_4.
inline MatrixXd rs_matrix() {
  MatrixXd a = MatrixXd::Zero(4, 4);
  a(0, 1) = 1.0;
  a(2, 3) = 1.0;
  a(3, 2) = -1.0;
  return a;
}

/// Non-normal orbit-critical 2x2 matrix with tr A != 0: member of the family
/// [[a, b], [-b, c]] with b^2 = -(a^2+c^2)(a^2+c^2+ac)/(a^2+c^2+4ac),
/// here a = 1, c = -2, b = sqrt(5).
inline MatrixXd peculiar_critical() {
  MatrixXd a(2, 2);
  const double b = std::sqrt(5.0);
  a << 1.0, b, -b, -2.0;
  return a;
}

/// Unimodular solvable, nilradical heis3, with E_beta not a derivation:
/// ad e4 restricted to the nilradical is the derivation diag(1,-1,0) + t E31.
inline MetricLieAlgebra heis3_extension(double t = 1.0) {
  return MetricLieAlgebra::from_entries(
      4, {{1, 2, 3, 1.0}, {4, 1, 1, 1.0}, {4, 2, 2, -1.0}, {4, 1, 3, t}});
}

}  // namespace solvpinch::fixtures

#endif  // SOLVPINCH_TESTS_FIXTURES_HPP
