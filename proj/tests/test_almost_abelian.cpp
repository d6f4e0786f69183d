#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"
#include "oracles.hpp"
#include "solvpinch/almost_abelian.hpp"

#include <cmath>

using namespace solvpinch;

namespace {

MatrixXd diag2(double a, double b) {
  MatrixXd m = MatrixXd::Zero(2, 2);
  m.diagonal() << a, b;
  return m;
}

}  // namespace

TEST_CASE("bracket_of") {
  SUBCASE("E12 gives the Heisenberg bracket up to labels") {
    const auto mu = bracket_of(AAData(fixtures::e12()));
    CHECK(validate_bracket(mu).pass);
    // mu(e3, e2) = e1
    CHECK(mu.c(2, 1, 0) == doctest::Approx(1.0));
    CHECK(is_nilpotent(mu));
  }
  SUBCASE("identity gives hyp(3)") {
    const auto mu = bracket_of(AAData(MatrixXd::Identity(2, 2)));
    const auto want = fixtures::hyp(3);
    double diff = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < 3; ++k) diff = std::max(diff, std::abs(mu.c(i, j, k) - want.c(i, j, k)));
    CHECK(diff == 0.0);
  }
  SUBCASE("zero matrix gives the abelian bracket") {
    CHECK(bracket_of(AAData(MatrixXd::Zero(3, 3))).norm() == 0.0);
  }
}

TEST_CASE("ricci_aa examples") {
  SUBCASE("E12") {
    const auto curv = ricci_aa(AAData(fixtures::e12()));
    MatrixXd want = MatrixXd::Zero(3, 3);
    want.diagonal() << 0.5, -0.5, -0.5;
    CHECK((curv.ric - want).norm() <= 1e-15);
    CHECK(curv.scal == doctest::Approx(-0.5));
  }
  SUBCASE("identity is Einstein") {
    const auto curv = ricci_aa(AAData(MatrixXd::Identity(2, 2)));
    CHECK((curv.ric + 2.0 * MatrixXd::Identity(3, 3)).norm() <= 1e-15);
  }
  SUBCASE("skew matrices are flat") {
    MatrixXd rot(2, 2);
    rot << 0, -1, 1, 0;
    const auto curv = ricci_aa(AAData(rot));
    CHECK(curv.ric.norm() <= 1e-15);
    CHECK(curv.flat());
  }
}

TEST_CASE("F_aa values") {
  CHECK(*F_aa(AAData(fixtures::e12())) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(*F_aa(AAData(MatrixXd::Identity(2, 2))) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(*F_aa(AAData(MatrixXd::Identity(4, 4))) == doctest::Approx(5.0).epsilon(1e-14));
  MatrixXd jordan(2, 2);
  jordan << 1, 1, 0, 1;
  CHECK(*F_aa(AAData(jordan)) == doctest::Approx(42.25 / 16.75).epsilon(1e-14));
  MatrixXd rot(2, 2);
  rot << 0, -1, 1, 0;
  CHECK_FALSE(F_aa(AAData(rot)).has_value());
}

TEST_CASE("grad_coefficients") {
  SUBCASE("E12") {
    const auto gc = grad_coefficients(AAData(fixtures::e12()));
    CHECK(gc.c1 == doctest::Approx(0.0));
    CHECK(gc.c2 == doctest::Approx(1.0));
    CHECK(gc.c3 == doctest::Approx(0.25));
    CHECK(gc.c4 == doctest::Approx(0.75));
  }
  SUBCASE("identity") {
    const auto gc = grad_coefficients(AAData(MatrixXd::Identity(2, 2)));
    CHECK(gc.c1 == doctest::Approx(288.0));
    CHECK(gc.c2 == doctest::Approx(-288.0));
    CHECK(gc.c3 == doctest::Approx(36.0));
    CHECK(gc.c4 == doctest::Approx(12.0));
  }
  SUBCASE("skew input throws") {
    MatrixXd rot(2, 2);
    rot << 0, -1, 1, 0;
    CHECK_THROWS_AS(grad_coefficients(AAData(rot)), FlatError);
  }
  SUBCASE("c3 and c4 are positive on random non-skew matrices") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
      AAData aa(rng.normal_matrix(3, 3));
      if (aa.flat()) continue;
      const auto gc = grad_coefficients(aa);
      CHECK(gc.c3 > 0);
      CHECK(gc.c4 > 0);
    }
  }
}

TEST_CASE("grad_F closed form") {
  SUBCASE("identity is a global critical point") {
    CHECK(grad_F(AAData(MatrixXd::Identity(2, 2))).norm() <= 1e-14);
  }
  SUBCASE("E12 gradient") {
    MatrixXd want = MatrixXd::Zero(2, 2);
    want(1, 0) = 8.0 / 9.0;
    CHECK((grad_F(AAData(fixtures::e12())) - want).norm() <= 1e-14);
  }
  SUBCASE("normal traceless matrices are global critical points") {
    CHECK(grad_F(AAData(diag2(1, -1))).norm() <= 1e-13);
  }
  SUBCASE("matches central differences on 100 seeded matrices") {
    Rng rng(321);
    int used = 0;
    while (used < 100) {
      const int m = 2 + static_cast<int>(rng.uniform() * 5);  // sizes 2..6
      MatrixXd a = rng.normal_matrix(m, m);
      a /= a.norm();
      const AAData aa(a);
      if (aa.tr_s2 < 0.05) continue;  // keep clear of the flat locus for the FD oracle
      const MatrixXd g = grad_F(aa);
      const MatrixXd fd = oracles::fd_grad_F(a);
      CHECK((g - fd).norm() / g.norm() < 1e-6);
      ++used;
    }
  }
}

TEST_CASE("grad_F_orbit") {
  SUBCASE("E12: gradient is orthogonal to the orbit") {
    const auto og = grad_F_orbit(AAData(fixtures::e12()));
    CHECK(og.tangent.norm() <= 1e-12);
  }
  SUBCASE("normal matrices are orbit-critical") {
    CHECK(grad_F_orbit(AAData(diag2(1, 2))).tangent.norm() <= 1e-12);
  }
  SUBCASE("jordan block has a nonzero orbit gradient") {
    MatrixXd jordan(2, 2);
    jordan << 1, 1, 0, 1;
    CHECK(grad_F_orbit(AAData(jordan)).tangent.norm() > 1e-3);
  }
}

TEST_CASE("critical_residual") {
  CHECK(critical_residual(AAData(fixtures::e12())) <= 1e-14);
  CHECK(critical_residual(AAData(diag2(1, 2))) <= 1e-14);
  MatrixXd jordan(2, 2);
  jordan << 1, 1, 0, 1;
  CHECK(critical_residual(AAData(jordan)) > 1e-2);
  SUBCASE("the peculiar critical family is orbit-critical") {
    CHECK(critical_residual_rel(AAData(fixtures::peculiar_critical())) <= 1e-12);
  }
  SUBCASE("norm identity at critical points") {
    for (const MatrixXd& a :
         {fixtures::e12(), diag2(1, 2), fixtures::rs_matrix(), fixtures::peculiar_critical()}) {
      const AAData aa(a);
      REQUIRE(critical_residual_rel(aa) <= 1e-10);
      const auto gc = grad_coefficients(aa);
      const double lhs = gc.c2 * aa.comm.squaredNorm();
      const double rhs = 2 * gc.c3 * comm(aa.A, aa.comm).squaredNorm();
      CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST_CASE("global_critical_test") {
  CHECK(global_critical_test(AAData(MatrixXd::Identity(2, 2))) == GlobalCriticality::Einstein);
  CHECK(*F_aa(AAData(MatrixXd::Identity(2, 2))) == doctest::Approx(3.0));
  CHECK(global_critical_test(AAData(diag2(1, -1))) == GlobalCriticality::UnimodularNormal);
  CHECK(*F_aa(AAData(diag2(1, -1))) == doctest::Approx(1.0));
  CHECK(global_critical_test(AAData(fixtures::e12())) == GlobalCriticality::NotCritical);
}

TEST_CASE("solvsoliton_test_aa") {
  const auto nil = solvsoliton_test_aa(AAData(fixtures::e12()));
  CHECK(nil.kind == SolvsolitonKind::Nilsoliton);
  CHECK(nil.c == doctest::Approx(-2.0));
  CHECK(solvsoliton_test_aa(AAData(diag2(1, 2))).kind == SolvsolitonKind::Normal);
  MatrixXd jordan(2, 2);
  jordan << 1, 1, 0, 1;
  CHECK(solvsoliton_test_aa(AAData(jordan)).kind == SolvsolitonKind::NotSolvsoliton);
}

TEST_CASE("second_variation") {
  SUBCASE("normal A with skew B stays in an isometry orbit") {
    MatrixXd b(2, 2);
    b << 0, 1, -1, 0;
    CHECK(std::abs(second_variation(AAData(diag2(1, 2)), b)) <= 1e-12);
  }
  SUBCASE("nilsoliton along [A, A^t] is degenerate") {
    const AAData aa(fixtures::e12());
    CHECK(std::abs(second_variation(aa, aa.comm)) <= 1e-12);
  }
  SUBCASE("normal A with a symmetric direction is strictly negative") {
    MatrixXd b = MatrixXd::Zero(2, 2);
    b(0, 1) = 1.0;
    CHECK(second_variation(AAData(diag2(1, 2)), b) < -1e-6);
  }
  SUBCASE("precondition: non-critical input throws") {
    MatrixXd jordan(2, 2);
    jordan << 1, 1, 0, 1;
    CHECK_THROWS_AS(second_variation(AAData(jordan), MatrixXd::Identity(2, 2)), PreconditionError);
  }
  SUBCASE("agrees with finite differences on critical fixtures") {
    Rng rng(4242);
    for (const MatrixXd& a :
         {fixtures::e12(), diag2(1, 2), diag2(1, -1), fixtures::rs_matrix(),
          fixtures::peculiar_critical()}) {
      const AAData aa(a);
      for (int trial = 0; trial < 4; ++trial) {
        MatrixXd b = rng.normal_matrix(a.rows(), a.cols());
        b /= b.norm();
        const double closed = second_variation(aa, b);
        const double fd = second_variation_fd(aa, b, 1e-4);
        CHECK(std::abs(closed - fd) <= 1e-5);
      }
    }
  }
  SUBCASE("finite differences on degenerate direction are tiny") {
    const AAData aa(fixtures::e12());
    CHECK(std::abs(second_variation_fd(aa, aa.comm, 1e-3)) < 1e-5);
  }
  SUBCASE("conjugation fixes the identity") {
    const AAData aa(MatrixXd::Identity(2, 2));
    Rng rng(9);
    const MatrixXd b = rng.normal_matrix(2, 2);
    CHECK(std::abs(second_variation_fd(aa, b, 1e-3)) <= 1e-8);
  }
}

TEST_CASE("local_max_classify") {
  CHECK(local_max_classify(AAData(diag2(1, 2)), 64, 3) == LocalMaxVerdict::MaxCandidate);
  CHECK(local_max_classify(AAData(fixtures::peculiar_critical()), 64, 3) ==
        LocalMaxVerdict::Saddle);
  CHECK(local_max_classify(AAData(fixtures::e12()), 64, 3) == LocalMaxVerdict::Degenerate);
  MatrixXd jordan(2, 2);
  jordan << 1, 1, 0, 1;
  CHECK_THROWS_AS(local_max_classify(AAData(jordan), 8, 3), PreconditionError);
}

TEST_CASE("ricci_soliton_decompose") {
  SUBCASE("recovers N and C from the canonical example") {
    const auto parts = ricci_soliton_decompose(AAData(fixtures::rs_matrix()));
    REQUIRE(parts.has_value());
    CHECK((parts->N - fixtures::e12(4)).norm() <= 1e-9);
    MatrixXd c0 = MatrixXd::Zero(4, 4);
    c0(2, 3) = 1.0;
    c0(3, 2) = -1.0;
    CHECK((parts->C - c0).norm() <= 1e-9);
    CHECK(*F_aa(AAData(fixtures::rs_matrix())) == doctest::Approx(1.0 / 3));
  }
  SUBCASE("pure nilsoliton decomposes trivially") {
    const auto parts = ricci_soliton_decompose(AAData(fixtures::e12()));
    REQUIRE(parts.has_value());
    CHECK((parts->N - fixtures::e12()).norm() <= 1e-12);
    CHECK(parts->C.norm() <= 1e-12);
  }
  SUBCASE("normal matrices return nothing") {
    CHECK_FALSE(ricci_soliton_decompose(AAData(diag2(1, -1))).has_value());
  }
  SUBCASE("nonzero trace violates the precondition") {
    CHECK_THROWS_AS(ricci_soliton_decompose(AAData(diag2(1, 2))), PreconditionError);
  }
}

TEST_CASE("moment_map") {
  SUBCASE("rank-one nilpotent attains sqrt(2)") {
    CHECK(moment_map(AAData(fixtures::e12())).ratio == doctest::Approx(std::sqrt(2.0)));
  }
  SUBCASE("normal matrices sit at zero") {
    CHECK(moment_map(AAData(diag2(1, 2))).ratio <= 1e-15);
  }
  SUBCASE("jordan value") {
    MatrixXd jordan(2, 2);
    jordan << 1, 1, 0, 1;
    CHECK(moment_map(AAData(jordan)).ratio == doctest::Approx(std::sqrt(2.0) / 3));
  }
  SUBCASE("zero matrix throws") {
    CHECK_THROWS_AS(moment_map(AAData(MatrixXd::Zero(2, 2))), PreconditionError);
  }
  SUBCASE("bound holds on random matrices") {
    Rng rng(8);
    for (int i = 0; i < 200; ++i) {
      const AAData aa(rng.normal_matrix(2 + i % 4, 2 + i % 4));
      CHECK(moment_map(aa).ratio <= std::sqrt(2.0) + 1e-12);
    }
  }
}

TEST_CASE("families") {
  SUBCASE("a_t") {
    const auto fs = family(Family::AT, 1e-9);
    CHECK(fs.F_closed.has_value());
    const auto f1 = family("a_t", 0.9);
    const double t2 = 0.81;
    CHECK(*f1.F_closed == doctest::Approx(t2 * t2 / (t2 * t2 + 2 * t2)).epsilon(1e-14));
    CHECK(*F_aa(f1.aa) == doctest::Approx(*f1.F_closed).epsilon(1e-12));
    // the closed form extends past the imaginary-type regime
    CHECK(*F_aa(family("a_t", 1.0).aa) == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK_FALSE(family("a_t", 0.0).F_closed.has_value());
  }
  SUBCASE("b_t is constantly 3") {
    CHECK(*family("b_t", 0.5).F_closed == doctest::Approx(3.0));
    CHECK(*F_aa(family("b_t", 0.5).aa) == doctest::Approx(3.0).epsilon(1e-13));
  }
  SUBCASE("c_t at t=1 gives 4/5") {
    const auto fs = family("c_t", 1.0);
    CHECK(*fs.F_closed == doctest::Approx(0.8));
    CHECK(*F_aa(fs.aa) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK_THROWS_AS(family("c_t", 0.0), std::invalid_argument);
  }
  SUBCASE("d_t is constantly 1/3") {
    for (double t : {0.2, 0.7, 1.3})
      CHECK(*F_aa(family("d_t", t).aa) == doctest::Approx(1.0 / 3).epsilon(1e-13));
  }
  SUBCASE("e_t closed form matches the matrix") {
    for (double t : {0.3, 0.8, 1.5}) {
      const auto fs = family("e_t", t);
      const double t2 = t * t;
      CHECK(*fs.F_closed == doctest::Approx(25 * t2 * t2 / (59 * t2 * t2 + 32 * t2)));
      CHECK(*F_aa(fs.aa) == doctest::Approx(*fs.F_closed).epsilon(1e-12));
      // general-Ricci route agrees
      CHECK(*pinching_F(bracket_of(fs.aa)) == doctest::Approx(*fs.F_closed).epsilon(1e-11));
    }
  }
  SUBCASE("d_t and e_t share conjugacy data but not limits") {
    // both families have char poly x^4 + x^2 (eigenvalues 0,0,+-i) for every t
    for (double t : {0.25, 1.0}) {
      const VectorXd pd = char_poly(family("d_t", t).aa.A);
      const VectorXd pe = char_poly(family("e_t", t).aa.A);
      CHECK((pd - pe).cwiseAbs().maxCoeff() <= 1e-12);
    }
    CHECK(*F_aa(family("d_t", 1e-3).aa) == doctest::Approx(1.0 / 3));
    CHECK(*F_aa(family("e_t", 1e-3).aa) < 1e-4);
  }
  SUBCASE("jordan family approaches 3") {
    const auto fs = family("jordan_t", 1e-3);
    CHECK(std::abs(*fs.F_closed - 3.0) < 1e-4);
    CHECK(*F_aa(fs.aa) == doctest::Approx(*fs.F_closed).epsilon(1e-12));
  }
  SUBCASE("padding does not change F") {
    CHECK(*F_aa(family("jordan_t", 0.5, 6).aa) ==
          doctest::Approx(*F_aa(family("jordan_t", 0.5).aa)).epsilon(1e-14));
  }
}

TEST_CASE("collapse_family") {
  SUBCASE("single block matches the closed form and the general Ricci") {
    const auto cs = collapse_family({1.0}, 0.5);
    CHECK(cs.F_closed == doctest::Approx(0.0625 / (0.0625 + 0.5)).epsilon(1e-14));
    CHECK(*pinching_F(cs.mu) == doctest::Approx(cs.F_closed).epsilon(1e-11));
  }
  SUBCASE("two blocks") {
    const auto cs = collapse_family({1.0, 2.0}, 0.3, 2);
    CHECK(*pinching_F(cs.mu) == doctest::Approx(cs.F_closed).epsilon(1e-10));
  }
  SUBCASE("F tends to zero with eps") {
    CHECK(collapse_family({1.0, 1.0}, 1e-3).F_closed < 1e-5);
  }
  SUBCASE("eps = 1 is out of domain") {
    CHECK_THROWS_AS(collapse_family({1.0}, 1.0), std::invalid_argument);
  }
}

TEST_CASE("unimodular_F") {
  CHECK(unimodular_F(AAData(diag2(1, -1))) == doctest::Approx(1.0));
  CHECK(unimodular_F(AAData(fixtures::e12())) == doctest::Approx(1.0 / 3));
  MatrixXd a(2, 2);
  a << 0, 2, 1, 0;
  CHECK(unimodular_F(AAData(a)) == doctest::Approx(*F_aa(AAData(a))).epsilon(1e-14));
  CHECK_THROWS_AS(unimodular_F(AAData(diag2(1, 2))), PreconditionError);
}

TEST_CASE("scale and conjugation invariance of F") {
  Rng rng(15);
  for (int i = 0; i < 30; ++i) {
    MatrixXd a = rng.normal_matrix(3, 3);
    const AAData aa(a);
    if (aa.flat()) continue;
    const double f = *F_aa(aa);
    const double t = 0.1 + 3 * rng.uniform();
    CHECK(std::abs(*F_aa(AAData(t * a)) - f) <= 1e-10);
    CHECK(std::abs(*F_aa(AAData(-t * a)) - f) <= 1e-10);
    const MatrixXd k = rng.orthogonal(3);
    CHECK(std::abs(*F_aa(AAData(k * a * k.transpose())) - f) <= 1e-10);
  }
}

TEST_CASE("gradient pairing identity") {
  // c4^2 <grad F, A - A^t> = -c3 |[A,A^t]|^2
  Rng rng(16);
  for (int i = 0; i < 100; ++i) {
    MatrixXd a = rng.normal_matrix(2 + i % 5, 2 + i % 5);
    a /= a.norm();
    const AAData aa(a);
    if (aa.flat()) continue;
    const auto gc = grad_coefficients(aa);
    const double lhs = gc.c4 * gc.c4 * frob_inner(grad_F(aa), aa.A - aa.A.transpose());
    const double rhs = -gc.c3 * aa.comm.squaredNorm();
    CHECK(std::abs(lhs - rhs) <= 1e-8);
  }
}

TEST_CASE("orbit-closure formula agrees with F") {
  Rng rng(17);
  const AAData base(rng.normal_matrix(3, 3));
  for (int i = 0; i < 20; ++i) {
    const MatrixXd g = rng.conjugator(3, 0.4);
    const MatrixXd b = g * base.A * g.inverse();
    const auto f = F_aa(AAData(b));
    REQUIRE(f.has_value());
    CHECK(std::abs(F_on_orbit_closure(base, b) - *f) <= 1e-9);
  }
}

TEST_CASE("symmetric matrices pin F above 1/3") {
  Rng rng(18);
  for (int i = 0; i < 40; ++i) {
    MatrixXd s = rng.normal_matrix(3, 3);
    s = sym(s).eval();
    const AAData aa(s);
    // skip scalar-ish symmetric parts: there F can reach 3
    if ((aa.S - (aa.S.trace() / 3) * MatrixXd::Identity(3, 3)).norm() < 0.1) continue;
    const MatrixXd g = rng.conjugator(3, 0.6);
    const auto f = F_aa(AAData(g * s * g.inverse()));
    REQUIRE(f.has_value());
    CHECK(*f > 1.0 / 3 + 1e-8);
  }
}

TEST_CASE("solvsoliton fixtures dominate their conjugates") {
  Rng rng(19);
  for (const MatrixXd& a0 : {fixtures::e12(), diag2(1, 2), diag2(1, -1)}) {
    const double f0 = *F_aa(AAData(a0));
    for (int i = 0; i < 200; ++i) {
      const MatrixXd g = rng.conjugator(static_cast<int>(a0.rows()), 0.8);
      const auto f = F_aa(AAData(g * a0 * g.inverse()));
      REQUIRE(f.has_value());
      CHECK(*f <= f0 + 1e-9);
    }
  }
}
