#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "hyperbench/rateint.hpp"

// Plane-strain nonlinear finite elements: structured quad meshes, F-bar Q4
// elements with 2x2 Gauss quadrature, displacement-driven load stepping,
// Newton-Raphson equilibrium iteration and reaction-force extraction.  The
// constitutive pathway (total evaluation or incremental rate integration) is
// selectable per solver instance.
//
// Updated-Lagrangian form: internal force \int B^T sigma dv over the current
// configuration.  The stiffness combines the pathway tangent (shifted to the
// convected rate), the initial-stress geometric term, and the centroid
// coupling introduced by the F-bar modification.

namespace hyperbench {

struct Mesh {
  std::vector<std::array<double, 2>> nodes;           // mm
  std::vector<std::array<int, 4>> quads;              // counter-clockwise
  std::map<std::string, std::vector<int>> node_sets;  // sorted node ids
};

inline Mesh mesh_rect(double width, double height, int nx, int ny) {
  if (!(width > 0.0) || !(height > 0.0))
    throw InvalidDimension("mesh dimensions must be positive");
  if (nx < 1 || ny < 1) throw InvalidDimension("mesh subdivision counts must be >= 1");

  Mesh m;
  m.nodes.reserve(std::size_t(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.nodes.push_back({width * double(i) / nx, height * double(j) / ny});

  m.quads.reserve(std::size_t(nx) * ny);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      int n0 = j * (nx + 1) + i;
      m.quads.push_back({n0, n0 + 1, n0 + nx + 2, n0 + nx + 1});
    }

  auto& sets = m.node_sets;
  for (int i = 0; i <= nx; ++i) {
    sets["bottom"].push_back(i);
    sets["top"].push_back(ny * (nx + 1) + i);
  }
  for (int j = 0; j <= ny; ++j) {
    sets["left"].push_back(j * (nx + 1));
    sets["right"].push_back(j * (nx + 1) + nx);
  }
  return m;
}

// Prescribed displacement on one component of a node set; the target value
// is affine in the reference coordinates, u = a + bx X + cy Y, and is
// multiplied by the load-program scale.
struct Dirichlet {
  std::string set;
  int comp = 0;  // 0 = x, 1 = y
  double a = 0.0;
  double bx = 0.0;
  double cy = 0.0;

  bool operator==(const Dirichlet&) const = default;
};

// Dead uniform traction (MPa) on the boundary edges of a node set, applied
// on the reference configuration and multiplied by the load-program scale.
struct Traction {
  std::string set;
  double tx = 0.0;
  double ty = 0.0;

  bool operator==(const Traction&) const = default;
};

class DofMap {
 public:
  DofMap(const Mesh& mesh, const std::vector<Dirichlet>& bcs) {
    int ndof = 2 * int(mesh.nodes.size());
    prescribed_.assign(ndof, false);
    target_.assign(ndof, 0.0);
    free_index_.assign(ndof, -1);

    for (const Dirichlet& bc : bcs) {
      auto it = mesh.node_sets.find(bc.set);
      if (it == mesh.node_sets.end()) throw ConfigError("unknown node set '" + bc.set + "'");
      if (bc.comp != 0 && bc.comp != 1) throw ConfigError("dirichlet component must be 0 or 1");
      for (int n : it->second) {
        int dof = 2 * n + bc.comp;
        double v = bc.a + bc.bx * mesh.nodes[n][0] + bc.cy * mesh.nodes[n][1];
        if (prescribed_[dof] && std::abs(target_[dof] - v) > 1e-12)
          throw ConfigError("conflicting prescribed values on node " + std::to_string(n));
        prescribed_[dof] = true;
        target_[dof] = v;
      }
    }

    n_free_ = 0;
    for (int d = 0; d < ndof; ++d)
      if (!prescribed_[d]) free_index_[d] = n_free_++;
  }

  int ndof() const { return int(prescribed_.size()); }
  int n_free() const { return n_free_; }
  bool prescribed(int dof) const { return prescribed_[dof]; }
  double target(int dof) const { return target_[dof]; }
  int free_index(int dof) const { return free_index_[dof]; }

 private:
  std::vector<bool> prescribed_;
  std::vector<double> target_;
  std::vector<int> free_index_;
  int n_free_ = 0;
};

struct LoadProgram {
  std::vector<double> scales;  // monotone non-decreasing, in [0, 1]

  static LoadProgram uniform_ramp(int steps) {
    if (steps < 1) throw ConfigError("load program needs at least one step");
    LoadProgram p;
    p.scales.reserve(steps);
    for (int k = 1; k <= steps; ++k) p.scales.push_back(double(k) / steps);
    return p;
  }

  void validate() const {
    if (scales.empty()) throw ConfigError("load program needs at least one step");
    double prev = 0.0;
    for (double s : scales) {
      if (s < prev || s < 0.0 || s > 1.0 + 1e-12)
        throw ConfigError("load program scales must be non-decreasing within [0, 1]");
      prev = s;
    }
  }
};

struct NewtonSettings {
  double rel_tol = 1e-9;
  double abs_floor = 1e-12;  // N
  int max_iter = 25;
  bool line_search = false;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_floor > 0.0) || max_iter < 1)
      throw ConfigError("newton settings: tolerances must be positive, max_iter >= 1");
  }

  bool operator==(const NewtonSettings&) const = default;
};

struct StepReport {
  int step = 0;
  double scale = 0.0;
  int newton_iters = 0;
  bool converged = false;
  double min_J = 1.0;
  double max_J = 1.0;
  // signed (fx, fy) resultants of f_int - f_ext per node set, N per mm thickness
  std::map<std::string, std::array<double, 2>> reactions;
  // sum of support reactions plus applied tractions, per component; zero at
  // equilibrium up to the solver tolerance
  std::array<double, 2> balance{0.0, 0.0};
};

struct SolveReport {
  std::vector<StepReport> steps;
};

// F-bar volumetric treatment: replace the Gauss-point volume change by the
// centroid value, F_hat = (J_c / J_gp)^(1/3) F_gp, so det F_hat = det F_c.
inline Tensor2 fbar_modify(const Tensor2& F_gp, const Tensor2& F_centroid) {
  double Jg = F_gp.det();
  if (Jg <= 0.0) throw NonPositiveJacobian(Jg);
  double Jc = F_centroid.det();
  if (Jc <= 0.0) throw NonPositiveJacobian(Jc);
  return std::cbrt(Jc / Jg) * F_gp;
}

class PlaneStrainSolver {
 public:
  PlaneStrainSolver(Mesh mesh, std::vector<Dirichlet> bcs, std::vector<Traction> tractions,
                    NeoHookeParams material, Pathway pathway, NewtonSettings settings = {},
                    int threads = 1)
      : mesh_(std::move(mesh)),
        dofs_(mesh_, bcs),
        material_(material),
        pathway_(pathway),
        settings_(settings),
        threads_(std::max(1, threads)) {
    settings_.validate();
    u_.assign(dofs_.ndof(), 0.0);
    states_.assign(mesh_.quads.size() * kGp, GaussPointState{});
    cell_J_.assign(mesh_.quads.size(), 1.0);
    cell_sigma_.assign(mesh_.quads.size(), SymTensor2{});
    check_reference_geometry();
    assemble_tractions(tractions);
  }

  const Mesh& mesh() const { return mesh_; }
  const DofMap& dofs() const { return dofs_; }
  Pathway pathway() const { return pathway_; }
  const std::vector<double>& displacement() const { return u_; }
  const std::vector<GaussPointState>& states() const { return states_; }
  const std::vector<double>& cell_J() const { return cell_J_; }
  const std::vector<SymTensor2>& cell_sigma() const { return cell_sigma_; }

  // Stress at one Gauss point for the current displacement state.
  SymTensor2 gp_stress(int elem, int gp) const {
    ElementResult r = evaluate_element(std::size_t(elem), false);
    return r.gp_sigma[gp];
  }

  StepReport solve_step(double scale, int step_index) {
    StepReport rep;
    rep.step = step_index;
    rep.scale = scale;

    // Predictor: apply the prescribed-displacement increment through the
    // tangent, so the first iterate is the linearized response to the
    // boundary motion rather than a jump concentrated in the surface row.
    std::vector<double> du_p(dofs_.ndof(), 0.0);
    double incr = 0.0;
    for (int d = 0; d < dofs_.ndof(); ++d)
      if (dofs_.prescribed(d)) {
        du_p[d] = scale * dofs_.target(d) - u_[d];
        incr = std::max(incr, std::abs(du_p[d]));
      }

    int it = 0;
    double ref = 0.0;
    if (incr > 0.0 && dofs_.n_free() > 0) {
      Assembly a0 = assemble(true, &du_p);
      scale_now_ = scale;  // residual below is evaluated at the new load level
      Eigen::VectorXd rhs(dofs_.n_free());
      for (int d = 0; d < dofs_.ndof(); ++d)
        if (!dofs_.prescribed(d))
          rhs[dofs_.free_index(d)] = -(residual_at(a0, d) + a0.kfp_dup[dofs_.free_index(d)]);
      ref = std::max(rhs.norm(), settings_.abs_floor);
      std::vector<double> du = solve_with(a0.K, rhs);
      for (int d = 0; d < dofs_.ndof(); ++d)
        u_[d] += dofs_.prescribed(d) ? du_p[d] : du[dofs_.free_index(d)];
      it = 1;
    } else {
      for (int d = 0; d < dofs_.ndof(); ++d)
        if (dofs_.prescribed(d)) u_[d] += du_p[d];
      scale_now_ = scale;
    }

    Assembly a = assemble(true);
    if (ref == 0.0) ref = residual_norm(a);
    while (true) {
      double rn = residual_norm(a);
      if (rn <= std::max(settings_.rel_tol * ref, settings_.abs_floor)) {
        rep.converged = true;
        break;
      }
      if (it >= settings_.max_iter) throw NewtonDiverged(step_index, it, rn);

      std::vector<double> du = solve_linear(a);
      double alpha = settings_.line_search ? search_step(du, rn) : 1.0;
      for (int d = 0; d < dofs_.ndof(); ++d)
        if (!dofs_.prescribed(d)) u_[d] += alpha * du[dofs_.free_index(d)];
      ++it;
      a = assemble(true);
    }

    rep.newton_iters = it;
    rep.min_J = a.min_J;
    rep.max_J = a.max_J;
    commit(a);
    for (const auto& [name, ids] : mesh_.node_sets) {
      std::array<double, 2> r{0.0, 0.0};
      for (int n : ids)
        for (int c = 0; c < 2; ++c) r[c] += residual_at(a, 2 * n + c);
      rep.reactions[name] = r;
    }
    for (int d = 0; d < dofs_.ndof(); ++d)
      if (dofs_.prescribed(d)) rep.balance[d % 2] += residual_at(a, d);
    rep.balance[0] += scale * traction_sum_[0];
    rep.balance[1] += scale * traction_sum_[1];
    return rep;
  }

  SolveReport run(const LoadProgram& program) {
    program.validate();
    SolveReport report;
    int k = 0;
    for (double scale : program.scales) {
      ++k;
      try {
        report.steps.push_back(solve_step(scale, k));
      } catch (const SolverFailure&) {
        throw;
      } catch (const Error& e) {
        throw SolverFailure(to_string(pathway_), k, e.what());
      }
    }
    return report;
  }

  // Sum of out-of-balance forces over all dofs per component; vanishes at
  // equilibrium up to the solver tolerance.
  std::array<double, 2> global_balance() {
    Assembly a = assemble(false);
    std::array<double, 2> s{0.0, 0.0};
    for (int d = 0; d < dofs_.ndof(); ++d) s[d % 2] += residual_at(a, d);
    return s;
  }

 private:
  static constexpr int kGp = 4;

  struct ElementResult {
    std::array<double, 8> f{};
    std::array<std::array<double, 8>, 8> K{};
    std::array<SymTensor2, kGp> gp_sigma{};
    std::array<Tensor2, kGp> gp_F{};
    double min_J = 1e300;
    double max_J = -1e300;
  };

  struct Assembly {
    std::vector<double> f_int;
    std::vector<double> kfp_dup;  // K_fp * du_p, free rows (predictor only)
    std::vector<ElementResult> elems;
    double min_J = 1e300;
    double max_J = -1e300;
    Eigen::SparseMatrix<double> K;
  };

  static std::array<std::array<double, 2>, 4> shape_grad_xi(double xi, double eta) {
    return {{{-0.25 * (1 - eta), -0.25 * (1 - xi)},
             {0.25 * (1 - eta), -0.25 * (1 + xi)},
             {0.25 * (1 + eta), 0.25 * (1 + xi)},
             {-0.25 * (1 + eta), 0.25 * (1 - xi)}}};
  }

  static constexpr std::array<std::array<double, 2>, 4> gauss_points() {
    constexpr double g = 0.57735026918962576;  // 1/sqrt(3)
    return {{{-g, -g}, {g, -g}, {g, g}, {-g, g}}};
  }

  // Gradients of the bilinear shape functions w.r.t. the given configuration
  // and the jacobian determinant of the isoparametric map.
  static bool grads(const std::array<std::array<double, 2>, 4>& coords, double xi, double eta,
                    std::array<std::array<double, 2>, 4>& dN, double& detJ) {
    auto dxi = shape_grad_xi(xi, eta);
    double J00 = 0, J01 = 0, J10 = 0, J11 = 0;
    for (int a = 0; a < 4; ++a) {
      J00 += coords[a][0] * dxi[a][0];
      J01 += coords[a][0] * dxi[a][1];
      J10 += coords[a][1] * dxi[a][0];
      J11 += coords[a][1] * dxi[a][1];
    }
    detJ = J00 * J11 - J01 * J10;
    if (detJ <= 0.0) return false;
    double i00 = J11 / detJ, i01 = -J01 / detJ, i10 = -J10 / detJ, i11 = J00 / detJ;
    for (int a = 0; a < 4; ++a) {
      dN[a][0] = dxi[a][0] * i00 + dxi[a][1] * i10;
      dN[a][1] = dxi[a][0] * i01 + dxi[a][1] * i11;
    }
    return true;
  }

  void check_reference_geometry() const {
    std::array<std::array<double, 2>, 4> dN;
    double detJ;
    for (std::size_t e = 0; e < mesh_.quads.size(); ++e) {
      auto Xe = element_coords(e, nullptr);
      for (auto [xi, eta] : gauss_points())
        if (!grads(Xe, xi, eta, dN, detJ))
          throw InvalidDimension("element " + std::to_string(e) +
                                 " has non-positive reference jacobian");
      if (!grads(Xe, 0.0, 0.0, dN, detJ))
        throw InvalidDimension("element " + std::to_string(e) +
                               " has non-positive reference jacobian");
    }
  }

  std::array<std::array<double, 2>, 4> element_coords(std::size_t e, const double* u) const {
    std::array<std::array<double, 2>, 4> c;
    for (int a = 0; a < 4; ++a) {
      int n = mesh_.quads[e][a];
      c[a][0] = mesh_.nodes[n][0] + (u ? u[2 * n] : 0.0);
      c[a][1] = mesh_.nodes[n][1] + (u ? u[2 * n + 1] : 0.0);
    }
    return c;
  }

  Tensor2 deformation_gradient(const std::array<std::array<double, 2>, 4>& Xe,
                               const std::array<std::array<double, 2>, 4>& xe, double xi,
                               double eta, int elem) const {
    std::array<std::array<double, 2>, 4> dNdX;
    double detJ;
    if (!grads(Xe, xi, eta, dNdX, detJ))
      throw InvalidDimension("element " + std::to_string(elem) + " reference jacobian");
    Tensor2 F = Tensor2::identity();
    for (int a = 0; a < 4; ++a) {
      double ux = xe[a][0] - Xe[a][0], uy = xe[a][1] - Xe[a][1];
      F(0, 0) += ux * dNdX[a][0];
      F(0, 1) += ux * dNdX[a][1];
      F(1, 0) += uy * dNdX[a][0];
      F(1, 1) += uy * dNdX[a][1];
    }
    double d2 = F(0, 0) * F(1, 1) - F(0, 1) * F(1, 0);
    if (d2 <= 0.0) throw ElementInverted(elem, d2);
    return F;
  }

  ElementResult evaluate_element(std::size_t e, bool need_K) const {
    ElementResult out;
    auto Xe = element_coords(e, nullptr);
    auto xe = element_coords(e, u_.data());

    Tensor2 Fc = deformation_gradient(Xe, xe, 0.0, 0.0, int(e));

    std::array<std::array<double, 2>, 4> dNdx_c;
    double detJc;
    if (!grads(xe, 0.0, 0.0, dNdx_c, detJc)) throw ElementInverted(int(e), detJc);

    auto gps = gauss_points();
    for (int g = 0; g < kGp; ++g) {
      auto [xi, eta] = gps[g];
      Tensor2 F = deformation_gradient(Xe, xe, xi, eta, int(e));
      Tensor2 Fh = fbar_modify(F, Fc);
      double Jh = Fh.det();
      out.min_J = std::min(out.min_J, Jh);
      out.max_J = std::max(out.max_J, Jh);

      SymTensor2 sig;
      Tensor4Sym C;
      if (pathway_ == Pathway::Total) {
        sig = cauchy_stress(material_, Fh);
        C = tangent_spatial(material_, Fh);
      } else {
        const GaussPointState& st = states_[e * kGp + g];
        IncrementKin kin = increment_kinematics(st.F, Fh);
        Tensor2 F_mid = 0.5 * (st.F + Fh);
        C = rate_tangent(material_, pathway_, F_mid);
        sig = jaumann_update(st, kin, C);
      }
      out.gp_sigma[g] = sig;
      out.gp_F[g] = Fh;

      std::array<std::array<double, 2>, 4> dNdx;
      double detJcur;
      if (!grads(xe, xi, eta, dNdx, detJcur)) throw ElementInverted(int(e), detJcur);
      double w = detJcur;  // unit gauss weights, per unit thickness

      double s00 = sig(0, 0), s01 = sig(0, 1), s11 = sig(1, 1);
      for (int a = 0; a < 4; ++a) {
        out.f[2 * a] += (dNdx[a][0] * s00 + dNdx[a][1] * s01) * w;
        out.f[2 * a + 1] += (dNdx[a][0] * s01 + dNdx[a][1] * s11) * w;
      }

      if (!need_K) continue;

      // Shift the pathway tangent to the convected rate so that together
      // with the initial-stress term the pair is consistent with the
      // residual: c = C - sym(D sigma + sigma D) as an operator on D.
      auto csig = [&sig](int i, int j, int k, int l) {
        auto d = [](int p, int q) { return p == q ? 1.0 : 0.0; };
        return 0.5 * (d(i, k) * sig(j, l) + sig(i, k) * d(j, l) + d(i, l) * sig(j, k) +
                      sig(i, l) * d(j, k));
      };
      constexpr int pi[3] = {0, 1, 0};
      constexpr int pj[3] = {0, 1, 1};
      double D[3][3];
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          D[r][c] = C.comp(pi[r], pj[r], pi[c], pj[c]) - csig(pi[r], pj[r], pi[c], pj[c]);

      double B[3][8] = {};
      for (int a = 0; a < 4; ++a) {
        B[0][2 * a] = dNdx[a][0];
        B[1][2 * a + 1] = dNdx[a][1];
        B[2][2 * a] = dNdx[a][1];
        B[2][2 * a + 1] = dNdx[a][0];
      }
      for (int col = 0; col < 8; ++col) {
        double DB[3];
        for (int q = 0; q < 3; ++q)
          DB[q] = D[q][0] * B[0][col] + D[q][1] * B[1][col] + D[q][2] * B[2][col];
        for (int row = 0; row < 8; ++row)
          out.K[row][col] +=
              (B[0][row] * DB[0] + B[1][row] * DB[1] + B[2][row] * DB[2]) * w;
      }

      // initial-stress geometric term
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double gab = (dNdx[a][0] * s00 + dNdx[a][1] * s01) * dNdx[b][0] +
                       (dNdx[a][0] * s01 + dNdx[a][1] * s11) * dNdx[b][1];
          out.K[2 * a][2 * b] += gab * w;
          out.K[2 * a + 1][2 * b + 1] += gab * w;
        }

      // F-bar centroid coupling: d sigma += (div_c - div)(du) h with
      // h = (1/3) C : I - sigma.
      SymTensor2 h = (1.0 / 3.0) * C.contract_identity() - sig;
      double h00 = h(0, 0), h01 = h(0, 1), h11 = h(1, 1);
      for (int a = 0; a < 4; ++a) {
        double ha0 = (h00 * dNdx[a][0] + h01 * dNdx[a][1]) * w;
        double ha1 = (h01 * dNdx[a][0] + h11 * dNdx[a][1]) * w;
        for (int b = 0; b < 4; ++b) {
          double gb0 = dNdx_c[b][0] - dNdx[b][0];
          double gb1 = dNdx_c[b][1] - dNdx[b][1];
          out.K[2 * a][2 * b] += ha0 * gb0;
          out.K[2 * a][2 * b + 1] += ha0 * gb1;
          out.K[2 * a + 1][2 * b] += ha1 * gb0;
          out.K[2 * a + 1][2 * b + 1] += ha1 * gb1;
        }
      }
    }
    return out;
  }

  Assembly assemble(bool need_K, const std::vector<double>* du_p = nullptr) const {
    Assembly out;
    std::size_t ne = mesh_.quads.size();
    out.elems.resize(ne);

    if (threads_ == 1) {
      for (std::size_t e = 0; e < ne; ++e) out.elems[e] = evaluate_element(e, need_K);
    } else {
      std::vector<std::thread> pool;
      std::exception_ptr first_error;
      std::mutex err_mutex;
      std::size_t chunk = (ne + threads_ - 1) / threads_;
      for (int t = 0; t < threads_; ++t) {
        std::size_t lo = std::size_t(t) * chunk, hi = std::min(ne, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
          try {
            for (std::size_t e = lo; e < hi; ++e) out.elems[e] = evaluate_element(e, need_K);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      if (first_error) std::rethrow_exception(first_error);
    }

    out.f_int.assign(dofs_.ndof(), 0.0);
    if (du_p) out.kfp_dup.assign(dofs_.n_free(), 0.0);
    std::vector<Eigen::Triplet<double>> trips;
    if (need_K) trips.reserve(ne * 64);
    for (std::size_t e = 0; e < ne; ++e) {
      const ElementResult& er = out.elems[e];
      out.min_J = std::min(out.min_J, er.min_J);
      out.max_J = std::max(out.max_J, er.max_J);
      const auto& q = mesh_.quads[e];
      for (int a = 0; a < 4; ++a)
        for (int c = 0; c < 2; ++c) {
          int dof_a = 2 * q[a] + c;
          out.f_int[dof_a] += er.f[2 * a + c];
          if (!need_K || dofs_.prescribed(dof_a)) continue;
          int row = dofs_.free_index(dof_a);
          for (int b = 0; b < 4; ++b)
            for (int d = 0; d < 2; ++d) {
              int dof_b = 2 * q[b] + d;
              if (dofs_.prescribed(dof_b)) {
                if (du_p) out.kfp_dup[row] += er.K[2 * a + c][2 * b + d] * (*du_p)[dof_b];
              } else {
                trips.emplace_back(row, dofs_.free_index(dof_b), er.K[2 * a + c][2 * b + d]);
              }
            }
        }
    }
    if (need_K) {
      out.K.resize(dofs_.n_free(), dofs_.n_free());
      out.K.setFromTriplets(trips.begin(), trips.end());
    }
    return out;
  }

  double residual_at(const Assembly& a, int dof) const {
    return a.f_int[dof] - scale_now_ * f_traction_[dof];
  }

  double residual_norm(const Assembly& a) const {
    double s = 0.0;
    for (int d = 0; d < dofs_.ndof(); ++d) {
      if (dofs_.prescribed(d)) continue;
      double r = residual_at(a, d);
      s += r * r;
    }
    return std::sqrt(s);
  }

  static std::vector<double> solve_with(const Eigen::SparseMatrix<double>& K,
                                        const Eigen::VectorXd& rhs) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(K);
    lu.factorize(K);
    if (lu.info() != Eigen::Success) throw LinearSolveFailure("sparse LU factorization failed");
    Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw LinearSolveFailure("sparse LU back-substitution failed");
    return std::vector<double>(x.data(), x.data() + x.size());
  }

  std::vector<double> solve_linear(const Assembly& a) const {
    Eigen::VectorXd rhs(dofs_.n_free());
    for (int d = 0; d < dofs_.ndof(); ++d)
      if (!dofs_.prescribed(d)) rhs[dofs_.free_index(d)] = -residual_at(a, d);
    return solve_with(a.K, rhs);
  }

  // Backtracking on the residual norm.  Prefers the largest fraction that
  // reduces it; failing that, the best fraction that at least assembles.
  double search_step(const std::vector<double>& du, double rn0) {
    std::vector<double> u_save = u_;
    double alpha = 1.0;
    double best_alpha = 0.0, best_rn = 1e300;
    for (int k = 0; k < 8; ++k) {
      for (int d = 0; d < dofs_.ndof(); ++d)
        if (!dofs_.prescribed(d)) u_[d] = u_save[d] + alpha * du[dofs_.free_index(d)];
      bool ok = true;
      double rn = 0.0;
      try {
        rn = residual_norm(assemble(false));
      } catch (const Error&) {
        ok = false;
      }
      u_ = u_save;
      if (ok && rn < rn0) return alpha;
      if (ok && rn < best_rn) {
        best_rn = rn;
        best_alpha = alpha;
      }
      alpha *= 0.5;
    }
    return best_alpha > 0.0 ? best_alpha : 1.0;
  }

  void commit(const Assembly& a) {
    for (std::size_t e = 0; e < mesh_.quads.size(); ++e) {
      const ElementResult& er = a.elems[e];
      SymTensor2 avg;
      for (int g = 0; g < kGp; ++g) {
        states_[e * kGp + g] = GaussPointState{er.gp_sigma[g], er.gp_F[g]};
        avg = avg + 0.25 * er.gp_sigma[g];
      }
      cell_sigma_[e] = avg;
      cell_J_[e] = er.gp_F[0].det();
    }
  }

  void assemble_tractions(const std::vector<Traction>& tractions) {
    f_traction_.assign(dofs_.ndof(), 0.0);
    traction_sum_ = {0.0, 0.0};
    if (tractions.empty()) return;

    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& q : mesh_.quads)
      for (int a = 0; a < 4; ++a) {
        int n0 = q[a], n1 = q[(a + 1) % 4];
        edge_count[{std::min(n0, n1), std::max(n0, n1)}]++;
      }

    for (const Traction& t : tractions) {
      auto it = mesh_.node_sets.find(t.set);
      if (it == mesh_.node_sets.end()) throw ConfigError("unknown node set '" + t.set + "'");
      std::vector<bool> in_set(mesh_.nodes.size(), false);
      for (int n : it->second) in_set[n] = true;
      for (const auto& [edge, count] : edge_count) {
        if (count != 1) continue;  // interior edge
        auto [n0, n1] = edge;
        if (!in_set[n0] || !in_set[n1]) continue;
        double dx = mesh_.nodes[n1][0] - mesh_.nodes[n0][0];
        double dy = mesh_.nodes[n1][1] - mesh_.nodes[n0][1];
        double len = std::sqrt(dx * dx + dy * dy);
        for (int n : {n0, n1}) {
          f_traction_[2 * n] += 0.5 * len * t.tx;
          f_traction_[2 * n + 1] += 0.5 * len * t.ty;
          traction_sum_[0] += 0.5 * len * t.tx;
          traction_sum_[1] += 0.5 * len * t.ty;
        }
      }
    }
  }

  Mesh mesh_;
  DofMap dofs_;
  NeoHookeParams material_;
  Pathway pathway_;
  NewtonSettings settings_;
  int threads_;
  std::vector<double> u_;
  std::vector<GaussPointState> states_;
  std::vector<double> f_traction_;  // per unit scale
  std::array<double, 2> traction_sum_{0.0, 0.0};
  std::vector<double> cell_J_;
  std::vector<SymTensor2> cell_sigma_;
  double scale_now_ = 0.0;
};

}  // namespace hyperbench
