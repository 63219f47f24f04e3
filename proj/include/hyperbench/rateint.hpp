#pragma once

#include <span>
#include <string>
#include <vector>

#include "hyperbench/materials.hpp"

// Incremental objective stress integration: midpoint incremental kinematics,
// corotational rotation of the stored stress, and a hypoelastic-style update
// with a supplied tangent.  Feeding the Kirchhoff-rate tangent realizes the
// inconsistent route of applying it to Cauchy stress; feeding the
// stress-corrected tangent makes the update consistent with the total
// formulation.

namespace hyperbench {

enum class Pathway { Total, RateUnmodified, RateModified };

inline const char* to_string(Pathway p) {
  switch (p) {
    case Pathway::Total: return "total";
    case Pathway::RateUnmodified: return "rate_unmodified";
    case Pathway::RateModified: return "rate_modified";
  }
  return "?";
}

inline Pathway pathway_from_string(const std::string& s) {
  if (s == "total") return Pathway::Total;
  if (s == "rate_unmodified") return Pathway::RateUnmodified;
  if (s == "rate_modified") return Pathway::RateModified;
  throw ConfigError("unknown pathway '" + s +
                    "' (expected total, rate_unmodified or rate_modified)");
}

struct IncrementKin {
  SymTensor2 dEps;  // strain increment
  Tensor2 dW;       // spin increment, skew
  Tensor2 dR;       // incremental rotation, proper orthogonal
};

struct GaussPointState {
  SymTensor2 sigma;                  // committed Cauchy stress, MPa
  Tensor2 F = Tensor2::identity();   // committed deformation gradient
};

// Midpoint discretization of L = Fdot F^-1 over one increment:
//   Lbar dt = 2 (F1 - F0) (F1 + F0)^-1
// with the rotation increment as the Cayley transform of the spin, which is
// exactly orthogonal.
inline IncrementKin increment_kinematics(const Tensor2& F_n, const Tensor2& F_np1) {
  double d0 = F_n.det(), d1 = F_np1.det();
  if (d0 <= 0.0) throw NonPositiveJacobian(d0);
  if (d1 <= 0.0) throw NonPositiveJacobian(d1);

  Tensor2 Fsum = F_np1 + F_n;
  double ds = Fsum.det();
  double scale = Fsum.norm() / 1.7320508075688772;
  if (std::abs(ds) <= 1e-12 * scale * scale * scale) throw SingularMidpoint();

  Tensor2 Ldt = 2.0 * ((F_np1 - F_n) * Fsum.inverse());
  IncrementKin kin;
  kin.dEps = SymTensor2::sym_part(Ldt);
  kin.dW = 0.5 * (Ldt - Ldt.transpose());
  if (kin.dEps.norm() > 0.2) throw TooLargeIncrement(kin.dEps.norm());

  Tensor2 I = Tensor2::identity();
  kin.dR = (I - 0.5 * kin.dW).inverse() * (I + 0.5 * kin.dW);
  return kin;
}

// Trial Cauchy stress for one increment: rotate the committed stress, then
// add the tangent contribution of the strain increment.
inline SymTensor2 jaumann_update(const GaussPointState& state, const IncrementKin& kin,
                                 const Tensor4Sym& C) {
  Tensor2 rotated = kin.dR * state.sigma.full() * kin.dR.transpose();
  return SymTensor2::sym_part(rotated) + C.apply(kin.dEps);
}

// Tangent for the rate pathways, evaluated at the midpoint configuration of
// the increment.
inline Tensor4Sym rate_tangent(const NeoHookeParams& p, Pathway pathway, const Tensor2& F_mid) {
  Tensor4Sym C = tangent_spatial(p, F_mid);
  if (pathway == Pathway::RateModified) C = tangent_modified(C, cauchy_stress(p, F_mid));
  return C;
}

// Point-level pathway comparison driver.  The total pathway is history-free;
// the rate pathways thread a Gauss-point state through the update, with the
// tangent evaluated at the midpoint of each increment.
inline std::vector<SymTensor2> integrate_path(const NeoHookeParams& p, Pathway pathway,
                                              std::span<const Tensor2> schedule) {
  std::vector<SymTensor2> out;
  out.reserve(schedule.size());
  if (schedule.empty()) return out;

  if (pathway == Pathway::Total) {
    for (std::size_t k = 0; k < schedule.size(); ++k) {
      try {
        out.push_back(cauchy_stress(p, schedule[k]));
      } catch (const Error& e) {
        throw SolverFailure(to_string(pathway), int(k), e.what());
      }
    }
    return out;
  }

  GaussPointState state;
  state.F = schedule.front();
  if (state.F.det() <= 0.0) throw NonPositiveJacobian(state.F.det());
  out.push_back(state.sigma);
  for (std::size_t k = 1; k < schedule.size(); ++k) {
    try {
      IncrementKin kin = increment_kinematics(state.F, schedule[k]);
      Tensor2 F_mid = 0.5 * (state.F + schedule[k]);
      state.sigma = jaumann_update(state, kin, rate_tangent(p, pathway, F_mid));
    } catch (const Error& e) {
      throw SolverFailure(to_string(pathway), int(k), e.what());
    }
    state.F = schedule[k];
    out.push_back(state.sigma);
  }
  return out;
}

// Canonical F-schedules for point-level studies.

inline std::vector<Tensor2> dilation_schedule(double lambda_end, int steps) {
  std::vector<Tensor2> s;
  s.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    double lam = 1.0 + (lambda_end - 1.0) * double(k) / steps;
    s.push_back(lam * Tensor2::identity());
  }
  return s;
}

inline std::vector<Tensor2> shear_schedule(double gamma_end, int steps) {
  std::vector<Tensor2> s;
  s.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k) {
    Tensor2 F = Tensor2::identity();
    F(0, 1) = gamma_end * double(k) / steps;
    s.push_back(F);
  }
  return s;
}

inline std::vector<Tensor2> rotation_schedule(double angle_end, int steps) {
  std::vector<Tensor2> s;
  s.reserve(steps + 1);
  for (int k = 0; k <= steps; ++k)
    s.push_back(rotation({0.0, 0.0, 1.0}, angle_end * double(k) / steps));
  return s;
}

}  // namespace hyperbench
