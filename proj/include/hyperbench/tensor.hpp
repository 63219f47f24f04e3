#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>

#include "hyperbench/errors.hpp"

// Small dense tensor algebra on 3x3 second-order tensors and their
// minor-symmetric fourth-order moduli.  Symmetric tensors are stored as
// 6-vectors in (11,22,33,12,13,23) component order; fourth-order moduli as
// 6x6 matrices in the orthonormal Mandel basis, so that double contraction
// is a plain matrix-vector product and the Frobenius norm of a tensor
// equals the Euclidean norm of its Mandel image.

namespace hyperbench {

inline constexpr double kSqrt2 = 1.4142135623730950488;

class Tensor2 {
 public:
  Tensor2() : a_{} {}

  static Tensor2 identity() {
    Tensor2 t;
    t(0, 0) = t(1, 1) = t(2, 2) = 1.0;
    return t;
  }

  double& operator()(int i, int j) { return a_[3 * i + j]; }
  double operator()(int i, int j) const { return a_[3 * i + j]; }

  Tensor2 operator+(const Tensor2& o) const {
    Tensor2 r;
    for (int k = 0; k < 9; ++k) r.a_[k] = a_[k] + o.a_[k];
    return r;
  }
  Tensor2 operator-(const Tensor2& o) const {
    Tensor2 r;
    for (int k = 0; k < 9; ++k) r.a_[k] = a_[k] - o.a_[k];
    return r;
  }
  Tensor2 operator*(double s) const {
    Tensor2 r;
    for (int k = 0; k < 9; ++k) r.a_[k] = a_[k] * s;
    return r;
  }
  friend Tensor2 operator*(double s, const Tensor2& t) { return t * s; }

  Tensor2 operator*(const Tensor2& o) const {
    Tensor2 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }

  Tensor2 transpose() const {
    Tensor2 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  double trace() const { return a_[0] + a_[4] + a_[8]; }

  double det() const {
    return a_[0] * (a_[4] * a_[8] - a_[5] * a_[7]) -
           a_[1] * (a_[3] * a_[8] - a_[5] * a_[6]) +
           a_[2] * (a_[3] * a_[7] - a_[4] * a_[6]);
  }

  double norm() const {
    double s = 0.0;
    for (double v : a_) s += v * v;
    return std::sqrt(s);
  }

  // Cofactor matrix: Cof(A)_ij is the (i,j) signed minor, so A * Cof(A)^T = det(A) I.
  Tensor2 cofactor() const {
    const Tensor2& A = *this;
    Tensor2 c;
    c(0, 0) = A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1);
    c(0, 1) = A(1, 2) * A(2, 0) - A(1, 0) * A(2, 2);
    c(0, 2) = A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0);
    c(1, 0) = A(0, 2) * A(2, 1) - A(0, 1) * A(2, 2);
    c(1, 1) = A(0, 0) * A(2, 2) - A(0, 2) * A(2, 0);
    c(1, 2) = A(0, 1) * A(2, 0) - A(0, 0) * A(2, 1);
    c(2, 0) = A(0, 1) * A(1, 2) - A(0, 2) * A(1, 1);
    c(2, 1) = A(0, 2) * A(1, 0) - A(0, 0) * A(1, 2);
    c(2, 2) = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    return c;
  }

  Tensor2 inverse() const {
    double d = det();
    double scale = norm() / 1.7320508075688772;
    if (std::abs(d) <= 1e-14 * scale * scale * scale) throw SingularMatrix(d);
    return cofactor().transpose() * (1.0 / d);
  }

 private:
  std::array<double, 9> a_;
};

class SymTensor2 {
 public:
  SymTensor2() : c_{} {}
  SymTensor2(double c11, double c22, double c33, double c12, double c13, double c23)
      : c_{c11, c22, c33, c12, c13, c23} {}

  static SymTensor2 identity() { return {1.0, 1.0, 1.0, 0.0, 0.0, 0.0}; }

  // Unchecked symmetrization (A + A^T)/2.
  static SymTensor2 sym_part(const Tensor2& A) {
    return {A(0, 0), A(1, 1), A(2, 2),
            0.5 * (A(0, 1) + A(1, 0)),
            0.5 * (A(0, 2) + A(2, 0)),
            0.5 * (A(1, 2) + A(2, 1))};
  }

  // Exact conversion; rejects input with |A - A^T| > 1e-12 |A|.
  static SymTensor2 from_full(const Tensor2& A) {
    Tensor2 skew = A - A.transpose();
    double na = A.norm();
    if (skew.norm() > 1e-12 * (na > 0.0 ? na : 1.0))
      throw NotSymmetric(skew.norm() / (na > 0.0 ? na : 1.0));
    return sym_part(A);
  }

  double operator[](int k) const { return c_[k]; }
  double& operator[](int k) { return c_[k]; }

  double operator()(int i, int j) const { return c_[sym_index(i, j)]; }
  void set(int i, int j, double v) { c_[sym_index(i, j)] = v; }

  static int sym_index(int i, int j) {
    if (i == j) return i;
    int s = i + j;         // off-diagonal pairs have distinct sums
    if (s == 1) return 3;  // 12
    if (s == 2) return 4;  // 13
    return 5;              // 23
  }

  Tensor2 full() const {
    Tensor2 t;
    t(0, 0) = c_[0];
    t(1, 1) = c_[1];
    t(2, 2) = c_[2];
    t(0, 1) = t(1, 0) = c_[3];
    t(0, 2) = t(2, 0) = c_[4];
    t(1, 2) = t(2, 1) = c_[5];
    return t;
  }

  SymTensor2 operator+(const SymTensor2& o) const {
    SymTensor2 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = c_[k] + o.c_[k];
    return r;
  }
  SymTensor2 operator-(const SymTensor2& o) const {
    SymTensor2 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = c_[k] - o.c_[k];
    return r;
  }
  SymTensor2 operator*(double s) const {
    SymTensor2 r;
    for (int k = 0; k < 6; ++k) r.c_[k] = c_[k] * s;
    return r;
  }
  friend SymTensor2 operator*(double s, const SymTensor2& t) { return t * s; }

  double trace() const { return c_[0] + c_[1] + c_[2]; }

  // A : B including the off-diagonal factor 2.
  double ddot(const SymTensor2& o) const {
    return c_[0] * o.c_[0] + c_[1] * o.c_[1] + c_[2] * o.c_[2] +
           2.0 * (c_[3] * o.c_[3] + c_[4] * o.c_[4] + c_[5] * o.c_[5]);
  }

  double norm() const { return std::sqrt(ddot(*this)); }

  std::array<double, 6> mandel() const {
    return {c_[0], c_[1], c_[2], kSqrt2 * c_[3], kSqrt2 * c_[4], kSqrt2 * c_[5]};
  }

  static SymTensor2 from_mandel(const std::array<double, 6>& m) {
    return {m[0], m[1], m[2], m[3] / kSqrt2, m[4] / kSqrt2, m[5] / kSqrt2};
  }

 private:
  std::array<double, 6> c_;
};

inline SymTensor2 dev(const SymTensor2& A) {
  double p = A.trace() / 3.0;
  SymTensor2 r = A;
  r[0] -= p;
  r[1] -= p;
  r[2] -= p;
  return r;
}

// Proper rotation about a (not necessarily unit) axis by Rodrigues' formula.
inline Tensor2 rotation(const std::array<double, 3>& axis, double angle) {
  double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  if (n == 0.0) throw InvalidParameter("rotation axis must be nonzero");
  double ux = axis[0] / n, uy = axis[1] / n, uz = axis[2] / n;
  double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  Tensor2 R;
  R(0, 0) = c + ux * ux * t;
  R(0, 1) = ux * uy * t - uz * s;
  R(0, 2) = ux * uz * t + uy * s;
  R(1, 0) = uy * ux * t + uz * s;
  R(1, 1) = c + uy * uy * t;
  R(1, 2) = uy * uz * t - ux * s;
  R(2, 0) = uz * ux * t - uy * s;
  R(2, 1) = uz * uy * t + ux * s;
  R(2, 2) = c + uz * uz * t;
  return R;
}

struct Spectral {
  std::array<double, 3> lambda;  // descending
  Tensor2 vectors;               // eigenvectors in columns
};

// Cyclic Jacobi iteration.  Converges when the off-diagonal norm drops below
// 1e-14 |A|; eigenvalues sorted descending, eigenvector sign fixed so the
// largest-magnitude component is positive.
inline Spectral eigen_sym(const SymTensor2& S) {
  double A[3][3];
  {
    Tensor2 f = S.full();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) A[i][j] = f(i, j);
  }
  double V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  double norm0 = S.norm();
  const double tol = 1e-14 * (norm0 > 0.0 ? norm0 : 1.0);

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = std::sqrt(2.0 * (A[0][1] * A[0][1] + A[0][2] * A[0][2] + A[1][2] * A[1][2]));
    if (off < tol) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        double apq = A[p][q];
        if (apq == 0.0) continue;
        double theta = (A[q][q] - A[p][p]) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        double tau = s / (1.0 + c);
        double app = A[p][p], aqq = A[q][q];
        A[p][p] = app - t * apq;
        A[q][q] = aqq + t * apq;
        A[p][q] = A[q][p] = 0.0;
        for (int k = 0; k < 3; ++k) {
          if (k == p || k == q) continue;
          double akp = A[k][p], akq = A[k][q];
          A[k][p] = A[p][k] = akp - s * (akq + tau * akp);
          A[k][q] = A[q][k] = akq + s * (akp - tau * akq);
        }
        for (int k = 0; k < 3; ++k) {
          double vkp = V[k][p], vkq = V[k][q];
          V[k][p] = vkp - s * (vkq + tau * vkp);
          V[k][q] = vkq + s * (vkp - tau * vkq);
        }
      }
    }
  }

  int order[3] = {0, 1, 2};
  double lam[3] = {A[0][0], A[1][1], A[2][2]};
  for (int i = 0; i < 2; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (lam[order[j]] > lam[order[i]]) std::swap(order[i], order[j]);

  Spectral es;
  for (int c = 0; c < 3; ++c) {
    int src = order[c];
    es.lambda[c] = lam[src];
    int kmax = 0;
    for (int k = 1; k < 3; ++k)
      if (std::abs(V[k][src]) > std::abs(V[kmax][src])) kmax = k;
    double sign = V[kmax][src] < 0.0 ? -1.0 : 1.0;
    for (int k = 0; k < 3; ++k) es.vectors(k, c) = sign * V[k][src];
  }
  return es;
}

namespace detail {

template <class F>
SymTensor2 spectral_apply(const Spectral& es, F&& f) {
  SymTensor2 r;
  for (int c = 0; c < 3; ++c) {
    double fl = f(es.lambda[c]);
    double v0 = es.vectors(0, c), v1 = es.vectors(1, c), v2 = es.vectors(2, c);
    r[0] += fl * v0 * v0;
    r[1] += fl * v1 * v1;
    r[2] += fl * v2 * v2;
    r[3] += fl * v0 * v1;
    r[4] += fl * v0 * v2;
    r[5] += fl * v1 * v2;
  }
  return r;
}

}  // namespace detail

inline SymTensor2 log_spd(const SymTensor2& A) {
  Spectral es = eigen_sym(A);
  if (es.lambda[2] <= 0.0) throw NotPositiveDefinite(es.lambda[2]);
  return detail::spectral_apply(es, [](double x) { return std::log(x); });
}

inline SymTensor2 sqrt_spd(const SymTensor2& A) {
  Spectral es = eigen_sym(A);
  if (es.lambda[2] <= 0.0) throw NotPositiveDefinite(es.lambda[2]);
  return detail::spectral_apply(es, [](double x) { return std::sqrt(x); });
}

inline SymTensor2 exp_sym(const SymTensor2& A) {
  Spectral es = eigen_sym(A);
  return detail::spectral_apply(es, [](double x) { return std::exp(x); });
}

struct PolarDecomposition {
  SymTensor2 V;  // left stretch, SPD
  Tensor2 R;     // proper orthogonal
};

// F = V R with V = sqrt(F F^T).
inline PolarDecomposition polar_decompose(const Tensor2& F) {
  double J = F.det();
  if (J <= 0.0) throw NonPositiveJacobian(J);
  SymTensor2 B = SymTensor2::sym_part(F * F.transpose());
  Spectral es = eigen_sym(B);
  if (es.lambda[2] <= 0.0) throw NotPositiveDefinite(es.lambda[2]);
  PolarDecomposition pd;
  pd.V = detail::spectral_apply(es, [](double x) { return std::sqrt(x); });
  SymTensor2 Vinv = detail::spectral_apply(es, [](double x) { return 1.0 / std::sqrt(x); });
  pd.R = Vinv.full() * F;
  return pd;
}

struct Invariants {
  double I1, I2, I3;
};

inline Invariants invariants(const SymTensor2& B) {
  Tensor2 f = B.full();
  return {B.trace(), f.cofactor().trace(), f.det()};
}

struct ScaledInvariants {
  double I1bar, I2bar, J;
};

inline ScaledInvariants scaled_invariants(const Tensor2& F) {
  double J = F.det();
  if (J <= 0.0) throw NonPositiveJacobian(J);
  SymTensor2 B = SymTensor2::sym_part(F * F.transpose());
  Invariants inv = invariants(B);
  double Jm23 = std::pow(J, -2.0 / 3.0);
  return {Jm23 * inv.I1, Jm23 * Jm23 * inv.I2, J};
}

// Fourth-order tensor with built-in minor symmetries, stored as a 6x6
// matrix in the Mandel basis.  Major symmetry is a property of the stored
// values, not of the representation.
class Tensor4Sym {
 public:
  Tensor4Sym() : m_{} {}

  static constexpr std::array<std::pair<int, int>, 6> pairs() {
    return {{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};
  }
  static double scale(int a) { return a < 3 ? 1.0 : kSqrt2; }

  // Symmetric fourth-order identity (I_sym : D = D).
  static Tensor4Sym identity() {
    Tensor4Sym t;
    for (int a = 0; a < 6; ++a) t.mandel(a, a) = 1.0;
    return t;
  }

  // Spherical operator I (x) I, i.e. (I(x)I) : D = tr(D) I.
  static Tensor4Sym spherical() { return dyad(SymTensor2::identity(), SymTensor2::identity()); }

  static Tensor4Sym dyad(const SymTensor2& a, const SymTensor2& b) {
    Tensor4Sym t;
    auto ma = a.mandel(), mb = b.mandel();
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j) t.mandel(i, j) = ma[i] * mb[j];
    return t;
  }

  double& mandel(int a, int b) { return m_[6 * a + b]; }
  double mandel(int a, int b) const { return m_[6 * a + b]; }

  double comp(int i, int j, int k, int l) const {
    int a = SymTensor2::sym_index(i, j), b = SymTensor2::sym_index(k, l);
    return mandel(a, b) / (scale(a) * scale(b));
  }
  void set_comp(int a, int b, double c) { mandel(a, b) = scale(a) * scale(b) * c; }

  SymTensor2 apply(const SymTensor2& d) const {
    auto md = d.mandel();
    std::array<double, 6> r{};
    for (int a = 0; a < 6; ++a) {
      double s = 0.0;
      for (int b = 0; b < 6; ++b) s += mandel(a, b) * md[b];
      r[a] = s;
    }
    return SymTensor2::from_mandel(r);
  }

  Tensor4Sym operator+(const Tensor4Sym& o) const {
    Tensor4Sym r;
    for (int k = 0; k < 36; ++k) r.m_[k] = m_[k] + o.m_[k];
    return r;
  }
  Tensor4Sym operator-(const Tensor4Sym& o) const {
    Tensor4Sym r;
    for (int k = 0; k < 36; ++k) r.m_[k] = m_[k] - o.m_[k];
    return r;
  }
  Tensor4Sym operator*(double s) const {
    Tensor4Sym r;
    for (int k = 0; k < 36; ++k) r.m_[k] = m_[k] * s;
    return r;
  }
  friend Tensor4Sym operator*(double s, const Tensor4Sym& t) { return t * s; }

  Tensor4Sym transpose_major() const {
    Tensor4Sym r;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) r.mandel(a, b) = mandel(b, a);
    return r;
  }

  // max over components of |C_ijkl - C_klij|
  double max_major_asymmetry() const {
    double m = 0.0;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b)
        m = std::max(m, std::abs(mandel(a, b) - mandel(b, a)) / (scale(a) * scale(b)));
    return m;
  }

  double norm() const {
    double s = 0.0;
    for (double v : m_) s += v * v;
    return std::sqrt(s);
  }

  // C : (1/3 factor applied by caller); returns C_ijkk as a symmetric tensor.
  SymTensor2 contract_identity() const { return apply(SymTensor2::identity()); }

  // Engineering (Voigt) matrix of plain tensor components, ordering
  // (11,22,33,12,13,23); this is the external I/O representation.
  std::array<std::array<double, 6>, 6> engineering() const {
    std::array<std::array<double, 6>, 6> e{};
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) e[a][b] = mandel(a, b) / (scale(a) * scale(b));
    return e;
  }

  static Tensor4Sym from_engineering(const std::array<std::array<double, 6>, 6>& e) {
    Tensor4Sym t;
    for (int a = 0; a < 6; ++a)
      for (int b = 0; b < 6; ++b) t.mandel(a, b) = scale(a) * scale(b) * e[a][b];
    return t;
  }

 private:
  std::array<double, 36> m_;
};

inline SymTensor2 double_contract(const Tensor4Sym& C, const SymTensor2& D) { return C.apply(D); }

}  // namespace hyperbench
