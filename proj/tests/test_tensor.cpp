#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hyperbench/sampling.hpp"
#include "hyperbench/tensor.hpp"

using namespace hyperbench;

namespace {

Tensor2 diag(double a, double b, double c) {
  Tensor2 t;
  t(0, 0) = a;
  t(1, 1) = b;
  t(2, 2) = c;
  return t;
}

}  // namespace

TEST_CASE("principal invariants") {
  SECTION("identity") {
    Invariants inv = invariants(SymTensor2::identity());
    CHECK(inv.I1 == 3.0);
    CHECK(inv.I2 == 3.0);
    CHECK(inv.I3 == 1.0);
  }
  SECTION("diag(4,1,1): cofactor is diag(1,4,4)") {
    Invariants inv = invariants(SymTensor2::from_full(diag(4, 1, 1)));
    CHECK(inv.I1 == 6.0);
    CHECK(inv.I2 == 9.0);
    CHECK(inv.I3 == 4.0);
  }
  SECTION("I2 from cofactor trace equals the trace identity") {
    TensorSampler s(1);
    for (int k = 0; k < 200; ++k) {
      SymTensor2 B = s.spd();
      Invariants inv = invariants(B);
      double tr = B.trace();
      double tr2 = SymTensor2::sym_part(B.full() * B.full()).trace();
      double i2 = 0.5 * (tr * tr - tr2);
      CHECK_THAT(inv.I2, Catch::Matchers::WithinRel(i2, 1e-12));
    }
  }
}

TEST_CASE("scaled invariants") {
  SECTION("identity") {
    ScaledInvariants si = scaled_invariants(Tensor2::identity());
    CHECK_THAT(si.I1bar, Catch::Matchers::WithinAbs(3.0, 1e-14));
    CHECK_THAT(si.I2bar, Catch::Matchers::WithinAbs(3.0, 1e-14));
    CHECK(si.J == 1.0);
  }
  SECTION("pure dilation leaves the scaled invariants at 3") {
    ScaledInvariants si = scaled_invariants(1.1 * Tensor2::identity());
    CHECK_THAT(si.I1bar, Catch::Matchers::WithinRel(3.0, 1e-12));
    CHECK_THAT(si.I2bar, Catch::Matchers::WithinRel(3.0, 1e-12));
    CHECK_THAT(si.J, Catch::Matchers::WithinRel(1.331, 1e-12));
  }
  SECTION("simple shear gamma = 0.5") {
    Tensor2 F = Tensor2::identity();
    F(0, 1) = 0.5;
    ScaledInvariants si = scaled_invariants(F);
    CHECK_THAT(si.J, Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK_THAT(si.I1bar, Catch::Matchers::WithinRel(3.25, 1e-13));
  }
  SECTION("non-positive jacobian rejected") {
    CHECK_THROWS_AS(scaled_invariants(diag(1, 1, -1)), NonPositiveJacobian);
    CHECK_THROWS_AS(scaled_invariants(diag(1, 1, 0)), NonPositiveJacobian);
  }
}

TEST_CASE("polar decomposition") {
  SECTION("pure rotation") {
    Tensor2 Q = rotation({0, 0, 1}, 1.5707963267948966);
    PolarDecomposition pd = polar_decompose(Q);
    CHECK((pd.V - SymTensor2::identity()).norm() < 1e-12);
    CHECK((pd.R - Q).norm() < 1e-12);
  }
  SECTION("pure stretch") {
    Tensor2 F = diag(2.0, 0.5, 1.0);
    PolarDecomposition pd = polar_decompose(F);
    CHECK((pd.V.full() - F).norm() < 1e-12);
    CHECK((pd.R - Tensor2::identity()).norm() < 1e-12);
  }
  SECTION("round trip, orthogonality, and agreement with sqrt(F F^T)") {
    TensorSampler s(2);
    for (int k = 0; k < 300; ++k) {
      Tensor2 F = s.deformation_gradient(0.3, 3.0);
      PolarDecomposition pd = polar_decompose(F);
      CHECK((pd.V.full() * pd.R - F).norm() <= 1e-11 * F.norm());
      CHECK((pd.R * pd.R.transpose() - Tensor2::identity()).norm() <= 1e-12);
      CHECK(std::abs(pd.R.det() - 1.0) <= 1e-12);
      SymTensor2 Vref = sqrt_spd(SymTensor2::sym_part(F * F.transpose()));
      CHECK((pd.V - Vref).norm() <= 1e-10 * Vref.norm());
    }
  }
  SECTION("rejects non-positive determinant") {
    CHECK_THROWS_AS(polar_decompose(diag(1, 1, -1)), NonPositiveJacobian);
  }
}

TEST_CASE("spectral matrix functions") {
  SECTION("log of diag(e^2, 1, 1)") {
    SymTensor2 A = SymTensor2::from_full(diag(std::exp(2.0), 1, 1));
    SymTensor2 L = log_spd(A);
    CHECK_THAT(L(0, 0), Catch::Matchers::WithinAbs(2.0, 1e-14));
    CHECK_THAT(L(1, 1), Catch::Matchers::WithinAbs(0.0, 1e-14));
    CHECK_THAT(L(2, 2), Catch::Matchers::WithinAbs(0.0, 1e-14));
  }
  SECTION("sqrt(exp(A)) = exp(A/2)") {
    TensorSampler s(3);
    for (int k = 0; k < 100; ++k) {
      SymTensor2 A = s.symmetric(1.5);
      SymTensor2 lhs = sqrt_spd(exp_sym(A));
      SymTensor2 rhs = exp_sym(0.5 * A);
      CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
    }
  }
  SECTION("exp(log(A)) = A for SPD A") {
    TensorSampler s(4);
    for (int k = 0; k < 100; ++k) {
      SymTensor2 A = s.spd();
      CHECK((exp_sym(log_spd(A)) - A).norm() <= 1e-10 * A.norm());
    }
  }
  SECTION("log and sqrt require positive definiteness") {
    SymTensor2 indef = SymTensor2::from_full(diag(1, 1, -1));
    SymTensor2 semidef = SymTensor2::from_full(diag(1, 1, 0));
    CHECK_THROWS_AS(log_spd(indef), NotPositiveDefinite);
    CHECK_THROWS_AS(sqrt_spd(indef), NotPositiveDefinite);
    CHECK_THROWS_AS(log_spd(semidef), NotPositiveDefinite);
    CHECK_THROWS_AS(sqrt_spd(semidef), NotPositiveDefinite);
  }
}

TEST_CASE("deviatoric projector") {
  SECTION("dev I = 0") { CHECK(dev(SymTensor2::identity()).norm() == 0.0); }
  SECTION("scaled finger tensor of simple shear gamma = 0.5") {
    Tensor2 F = Tensor2::identity();
    F(0, 1) = 0.5;
    SymTensor2 Bbar = SymTensor2::sym_part(F * F.transpose());  // J = 1
    SymTensor2 d = dev(Bbar);
    CHECK_THAT(d(0, 0), Catch::Matchers::WithinAbs(1.0 / 6.0, 1e-14));
    CHECK_THAT(d(1, 1), Catch::Matchers::WithinAbs(-1.0 / 12.0, 1e-14));
    CHECK_THAT(d(2, 2), Catch::Matchers::WithinAbs(-1.0 / 12.0, 1e-14));
    CHECK_THAT(d(0, 1), Catch::Matchers::WithinAbs(0.5, 1e-14));
  }
  SECTION("tracelessness and idempotence") {
    TensorSampler s(5);
    for (int k = 0; k < 100; ++k) {
      SymTensor2 A = s.symmetric(3.0);
      SymTensor2 d = dev(A);
      CHECK(std::abs(d.trace()) <= 1e-14 * A.norm());
      CHECK((dev(d) - d).norm() <= 1e-14 * A.norm());
    }
  }
}

TEST_CASE("second-order helpers") {
  SECTION("cofactor of a diagonal") {
    Tensor2 c = diag(2, 3, 5).cofactor();
    CHECK(c(0, 0) == 15.0);
    CHECK(c(1, 1) == 10.0);
    CHECK(c(2, 2) == 6.0);
  }
  SECTION("inverse round trip") {
    TensorSampler s(6);
    for (int k = 0; k < 100; ++k) {
      Tensor2 F = s.deformation_gradient(0.3, 3.0);
      CHECK((F * F.inverse() - Tensor2::identity()).norm() <= 1e-12 * F.norm());
    }
  }
  SECTION("inverse of a singular matrix throws") {
    CHECK_THROWS_AS(diag(1, 1, 0).inverse(), SingularMatrix);
  }
  SECTION("checked symmetrization") {
    Tensor2 A = diag(1, 2, 3);
    A(0, 1) = 0.5;
    CHECK_THROWS_AS(SymTensor2::from_full(A), NotSymmetric);
    A(1, 0) = 0.5;
    CHECK_NOTHROW(SymTensor2::from_full(A));
  }
}

TEST_CASE("mandel representation") {
  SECTION("isometry") {
    TensorSampler s(7);
    for (int k = 0; k < 100; ++k) {
      SymTensor2 A = s.symmetric(2.0);
      auto m = A.mandel();
      double n2 = 0;
      for (double v : m) n2 += v * v;
      CHECK_THAT(std::sqrt(n2), Catch::Matchers::WithinRel(A.norm(), 1e-14));
    }
  }
  SECTION("round trip") {
    TensorSampler s(8);
    SymTensor2 A = s.symmetric(2.0);
    SymTensor2 B = SymTensor2::from_mandel(A.mandel());
    CHECK((A - B).norm() <= 1e-15 * A.norm());
  }
}

TEST_CASE("fourth-order operators") {
  SECTION("symmetric identity acts as identity") {
    TensorSampler s(9);
    SymTensor2 D = s.symmetric(2.0);
    CHECK((double_contract(Tensor4Sym::identity(), D) - D).norm() == 0.0);
  }
  SECTION("spherical operator extracts the trace") {
    TensorSampler s(10);
    for (int k = 0; k < 20; ++k) {
      SymTensor2 D = s.symmetric(2.0);
      double kappa = 0.78;
      SymTensor2 r = double_contract(kappa * Tensor4Sym::spherical(), D);
      SymTensor2 want = kappa * D.trace() * SymTensor2::identity();
      CHECK((r - want).norm() <= 1e-13 * (want.norm() + 1.0));
    }
  }
  SECTION("engineering matrix round trip") {
    TensorSampler s(11);
    Tensor4Sym C;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) C.mandel(a, b) = 2.0 * s.uniform() - 1.0;
    Tensor4Sym back = Tensor4Sym::from_engineering(C.engineering());
    CHECK((back - C).norm() <= 1e-14 * C.norm());
  }
  SECTION("component accessor uses tensor components, not scaled entries") {
    SymTensor2 a = SymTensor2::identity();
    SymTensor2 b;
    b.set(0, 1, 1.0);  // pure 12 shear
    Tensor4Sym d = Tensor4Sym::dyad(a, b);
    CHECK_THAT(d.comp(0, 0, 0, 1), Catch::Matchers::WithinAbs(1.0, 1e-14));
    CHECK_THAT(d.comp(0, 1, 0, 0), Catch::Matchers::WithinAbs(0.0, 1e-14));
    CHECK_THAT(d.max_major_asymmetry(), Catch::Matchers::WithinAbs(1.0, 1e-14));
  }
}

TEST_CASE("symmetric eigendecomposition") {
  TensorSampler s(12);

  SECTION("reconstruction, orthogonality, ordering, sign convention") {
    for (int k = 0; k < 1000; ++k) {
      SymTensor2 A;
      int mode = k % 4;
      if (mode == 0) {
        A = s.symmetric(2.0);
      } else if (mode == 1) {
        A = s.spd();
      } else if (mode == 2) {
        // nearly degenerate pair, gap 1e-9
        Tensor2 Q = s.rotation_matrix();
        Tensor2 L = diag(1.0, 1.0 + 1e-9, 2.0);
        A = SymTensor2::sym_part(Q * L * Q.transpose());
      } else {
        // exactly repeated eigenvalue
        Tensor2 Q = s.rotation_matrix();
        Tensor2 L = diag(3.0, 3.0, 1.0);
        A = SymTensor2::sym_part(Q * L * Q.transpose());
      }
      Spectral es = eigen_sym(A);

      CHECK(es.lambda[0] >= es.lambda[1]);
      CHECK(es.lambda[1] >= es.lambda[2]);

      Tensor2 rec;
      for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j)
            rec(i, j) += es.lambda[c] * es.vectors(i, c) * es.vectors(j, c);
      CHECK((rec - A.full()).norm() <= 1e-12 * std::max(A.norm(), 1.0));
      CHECK((es.vectors.transpose() * es.vectors - Tensor2::identity()).norm() <= 1e-12);

      for (int c = 0; c < 3; ++c) {
        int kmax = 0;
        for (int i = 1; i < 3; ++i)
          if (std::abs(es.vectors(i, c)) > std::abs(es.vectors(kmax, c))) kmax = i;
        CHECK(es.vectors(kmax, c) >= 0.0);
      }
    }
  }

  SECTION("zero matrix") {
    Spectral es = eigen_sym(SymTensor2{});
    CHECK(es.lambda[0] == 0.0);
    CHECK((es.vectors - Tensor2::identity()).norm() == 0.0);
  }
}

TEST_CASE("rotation helper") {
  Tensor2 R = rotation({0, 0, 1}, 1.5707963267948966);
  CHECK_THAT(R(1, 0), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THAT(R(0, 1), Catch::Matchers::WithinAbs(-1.0, 1e-15));
  CHECK_THAT(R.det(), Catch::Matchers::WithinAbs(1.0, 1e-15));
  CHECK_THROWS_AS(rotation({0, 0, 0}, 1.0), InvalidParameter);
}
