#pragma once

#include <cmath>
#include <functional>

#include "hyperbench/tensor.hpp"

// Compressible neo-Hooke constitutive model,
//
//   W(F) = c1 (I1bar - 3) + (1/D1) (J - 1)^2,
//
// with Cauchy stress, the consistent tangent of the corotational Kirchhoff
// stress rate per reference volume, the stress-corrected variant of that
// tangent for integrating Cauchy stress directly, a generic adapter that
// builds the same response from invariant-derivative callbacks, and a
// central-difference tangent oracle.

namespace hyperbench {

struct NeoHookeParams {
  double c1;  // MPa
  double D1;  // 1/MPa

  NeoHookeParams(double c1_, double D1_) : c1(c1_), D1(D1_) {
    if (!(c1 > 0.0) || !(D1 > 0.0))
      throw InvalidParameter("neo-Hooke parameters must satisfy c1 > 0 and D1 > 0");
  }

  static NeoHookeParams from_moduli(double mu, double kappa) {
    return {mu / 2.0, 2.0 / kappa};
  }

  double mu() const { return 2.0 * c1; }
  double kappa() const { return 2.0 / D1; }

  bool operator==(const NeoHookeParams&) const = default;
};

namespace detail {

inline SymTensor2 finger_scaled(const Tensor2& F, double J) {
  return std::pow(J, -2.0 / 3.0) * SymTensor2::sym_part(F * F.transpose());
}

}  // namespace detail

inline double energy_neohooke(const NeoHookeParams& p, const Tensor2& F) {
  ScaledInvariants si = scaled_invariants(F);
  return p.c1 * (si.I1bar - 3.0) + (1.0 / p.D1) * (si.J - 1.0) * (si.J - 1.0);
}

// sigma = (mu/J) dev(Bbar) + kappa (J-1) I
inline SymTensor2 cauchy_stress(const NeoHookeParams& p, const Tensor2& F) {
  double J = F.det();
  if (J <= 0.0) throw NonPositiveJacobian(J);
  SymTensor2 Bbar = detail::finger_scaled(F, J);
  SymTensor2 s = (p.mu() / J) * dev(Bbar);
  double pv = p.kappa() * (J - 1.0);
  s[0] += pv;
  s[1] += pv;
  s[2] += pv;
  return s;
}

// Tangent of the corotational Kirchhoff stress rate per reference volume:
// the isochoric block carries 1/J, the volumetric block is kappa (2J-1),
// which is what differentiating tau_vol = kappa (J^2 - J) I yields.
inline Tensor4Sym tangent_spatial(const NeoHookeParams& p, const Tensor2& F) {
  double J = F.det();
  if (J <= 0.0) throw NonPositiveJacobian(J);
  SymTensor2 Bbar = detail::finger_scaled(F, J);
  double muJ = p.mu() / J;
  double kv = p.kappa() * (2.0 * J - 1.0);
  double trb = Bbar.trace();
  auto d = [](int i, int j) { return i == j ? 1.0 : 0.0; };

  Tensor4Sym C;
  auto P = Tensor4Sym::pairs();
  for (int a = 0; a < 6; ++a) {
    auto [i, j] = P[a];
    for (int b = 0; b < 6; ++b) {
      auto [k, l] = P[b];
      double iso = 0.5 * (d(i, k) * Bbar(j, l) + Bbar(i, k) * d(j, l) +
                          d(i, l) * Bbar(j, k) + Bbar(i, l) * d(j, k)) -
                   (2.0 / 3.0) * (d(i, j) * Bbar(k, l) + Bbar(i, j) * d(k, l)) +
                   (2.0 / 9.0) * d(i, j) * d(k, l) * trb;
      C.set_comp(a, b, muJ * iso + kv * d(i, j) * d(k, l));
    }
  }
  return C;
}

// C_mod_ijkl = C_ijkl - sigma_ij delta_kl.  Keeps minor symmetries,
// generally loses major symmetry.
inline Tensor4Sym tangent_modified(const Tensor4Sym& C, const SymTensor2& sigma) {
  return C - Tensor4Sym::dyad(sigma, SymTensor2::identity());
}

// Central-difference realization of C = (1/J) d(J sigma)/d(eps) along
// spin-free paths F(s) = exp(s E) F, one column per Mandel strain direction.
template <class StressFn>
Tensor4Sym tangent_fd_jaumann(StressFn&& sigma_of, const Tensor2& F, double h) {
  if (!(h >= 1e-7 && h <= 1e-4))
    throw InvalidParameter("finite-difference step must lie in [1e-7, 1e-4]");
  double J0 = F.det();
  if (J0 <= 0.0) throw NonPositiveJacobian(J0);

  Tensor4Sym C;
  for (int b = 0; b < 6; ++b) {
    std::array<double, 6> unit{};
    unit[b] = 1.0;
    SymTensor2 E = SymTensor2::from_mandel(unit);
    Tensor2 Fp = exp_sym(0.5 * h * E).full() * F;
    Tensor2 Fm = exp_sym(-0.5 * h * E).full() * F;
    SymTensor2 tp = Fp.det() * sigma_of(Fp);
    SymTensor2 tm = Fm.det() * sigma_of(Fm);
    auto mp = tp.mandel(), mm = tm.mandel();
    for (int a = 0; a < 6; ++a) C.mandel(a, b) = (mp[a] - mm[a]) / (h * J0);
  }
  return C;
}

// Default step 1e-5; falls back to 1e-6 when estimates at h and h/2
// disagree by more than 1e-5 relative.
template <class StressFn>
Tensor4Sym tangent_fd_jaumann(StressFn&& sigma_of, const Tensor2& F) {
  const double h = 1e-5;
  Tensor4Sym c1 = tangent_fd_jaumann(sigma_of, F, h);
  Tensor4Sym c2 = tangent_fd_jaumann(sigma_of, F, 0.5 * h);
  double ref = c2.norm();
  if ((c1 - c2).norm() > 1e-5 * (ref > 0.0 ? ref : 1.0))
    return tangent_fd_jaumann(sigma_of, F, 1e-6);
  return c2;
}

// First Piola-Kirchhoff stress from sigma = S1 . Cof(F)^-1.
inline Tensor2 piola_from_cauchy(const Tensor2& F, const SymTensor2& sigma) {
  double J = F.det();
  if (J <= 0.0) throw NonPositiveJacobian(J);
  return sigma.full() * F.cofactor();
}

struct MaterialResponse {
  double W = 0.0;        // MPa (per reference volume)
  double J = 1.0;
  SymTensor2 sigma;      // MPa
  Tensor4Sym C;          // MPa, minor and major symmetric
  Tensor4Sym C_mod;      // MPa, minor symmetric only

  SymTensor2 kirchhoff() const { return J * sigma; }
};

inline MaterialResponse evaluate(const NeoHookeParams& p, const Tensor2& F) {
  MaterialResponse r;
  r.W = energy_neohooke(p, F);
  r.J = F.det();
  r.sigma = cauchy_stress(p, F);
  r.C = tangent_spatial(p, F);
  r.C_mod = tangent_modified(r.C, r.sigma);
  return r;
}

// Energy value and derivatives with respect to (I1bar, I2bar, J), evaluated
// pointwise by a user callback.  Third derivatives are not consumed by any
// pathway here and are omitted.
struct InvariantDerivs {
  double W = 0.0;
  double dW_dI1b = 0.0, dW_dI2b = 0.0, dW_dJ = 0.0;
  double d2W_dI1b2 = 0.0, d2W_dI1b_dI2b = 0.0, d2W_dI2b2 = 0.0;
  double d2W_dI1b_dJ = 0.0, d2W_dI2b_dJ = 0.0, d2W_dJ2 = 0.0;

  bool finite() const {
    for (double v : {W, dW_dI1b, dW_dI2b, dW_dJ, d2W_dI1b2, d2W_dI1b_dI2b, d2W_dI2b2,
                     d2W_dI1b_dJ, d2W_dI2b_dJ, d2W_dJ2})
      if (!std::isfinite(v)) return false;
    return true;
  }
};

using InvariantEnergyFn = std::function<InvariantDerivs(double I1bar, double I2bar, double J)>;

inline InvariantEnergyFn neohooke_invariant_energy(const NeoHookeParams& p) {
  return [p](double I1b, double, double J) {
    InvariantDerivs d;
    d.W = p.c1 * (I1b - 3.0) + (1.0 / p.D1) * (J - 1.0) * (J - 1.0);
    d.dW_dI1b = p.c1;
    d.dW_dJ = 2.0 * (J - 1.0) / p.D1;
    d.d2W_dJ2 = 2.0 / p.D1;
    return d;
  };
}

namespace detail {

inline SymTensor2 stress_from_invariant_derivs(const InvariantEnergyFn& fn, const Tensor2& F) {
  ScaledInvariants si = scaled_invariants(F);
  InvariantDerivs d = fn(si.I1bar, si.I2bar, si.J);
  if (!d.finite()) throw CallbackFailure();
  SymTensor2 Bbar = finger_scaled(F, si.J);
  SymTensor2 Bbar2 = SymTensor2::sym_part(Bbar.full() * Bbar.full());
  SymTensor2 s =
      (2.0 / si.J) * ((d.dW_dI1b + si.I1bar * d.dW_dI2b) * dev(Bbar) - d.dW_dI2b * dev(Bbar2));
  s[0] += d.dW_dJ;
  s[1] += d.dW_dJ;
  s[2] += d.dW_dJ;
  return s;
}

}  // namespace detail

// Generic isotropic response from an invariant-derivative callback: the
// stress comes from the first derivatives through the standard
// representation, the tangent from the finite-difference oracle applied to
// that stress.
inline MaterialResponse response_from_invariant_energy(const InvariantEnergyFn& fn,
                                                       const Tensor2& F) {
  ScaledInvariants si = scaled_invariants(F);
  InvariantDerivs d = fn(si.I1bar, si.I2bar, si.J);
  if (!d.finite()) throw CallbackFailure();

  MaterialResponse r;
  r.W = d.W;
  r.J = si.J;
  r.sigma = detail::stress_from_invariant_derivs(fn, F);
  r.C = tangent_fd_jaumann(
      [&fn](const Tensor2& Fp) { return detail::stress_from_invariant_derivs(fn, Fp); }, F);
  r.C_mod = tangent_modified(r.C, r.sigma);
  return r;
}

}  // namespace hyperbench
