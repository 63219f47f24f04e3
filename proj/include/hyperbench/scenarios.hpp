#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "hyperbench/config.hpp"
#include "hyperbench/fem2d.hpp"

// Canonical, named experiment definitions binding meshes, materials, load
// programs and pathway comparisons.  Scenarios serialize to the flat
// key=value config format and back without loss.

namespace hyperbench {

struct MeshSpec {
  double width = 1.0;   // mm
  double height = 1.0;  // mm
  int nx = 1;
  int ny = 1;

  bool operator==(const MeshSpec&) const = default;
};

enum class ScenarioKind { Fem, Point };

enum class PathKind { Dilation, Shear };

struct PointPath {
  PathKind kind = PathKind::Dilation;
  double amount = 0.0;  // lambda_end - 1 for dilation, gamma_end for shear

  bool operator==(const PointPath&) const = default;
};

enum class VerdictKind { Coincide, RepairOrdering, RepairPoint, PairIsochoric };

struct VerdictSpec {
  VerdictKind kind = VerdictKind::Coincide;
  double coincide_tol = 0.005;  // all-pairs bound (Coincide, PairIsochoric)
  double mod_rtol = 0.01;       // modified-vs-total bound (Repair*)
  double unmod_min_dev = 0.0;   // required unmodified-vs-total discrepancy (Repair*)

  bool operator==(const VerdictSpec&) const = default;
};

struct DerivedSet {
  std::string name;
  std::string def;  // "top_center:<fraction>" or "union:a,b,..."

  bool operator==(const DerivedSet&) const = default;
};

struct Scenario {
  std::string name;
  ScenarioKind kind = ScenarioKind::Fem;
  std::vector<Pathway> pathways;
  int steps = 1;
  double thickness = 1.0;  // mm, scales reported forces to N
  MeshSpec mesh;
  NeoHookeParams material{0.5, 1.0};
  std::vector<DerivedSet> sets;
  std::vector<Dirichlet> dirichlet;
  std::vector<Traction> tractions;
  std::string report_set;
  int report_comp = 1;
  double report_sign = 1.0;
  NewtonSettings newton;
  PointPath path;
  VerdictSpec verdict;

  bool operator==(const Scenario&) const = default;
};

inline const char* to_string(ScenarioKind k) { return k == ScenarioKind::Fem ? "fem" : "point"; }
inline const char* to_string(PathKind k) { return k == PathKind::Dilation ? "dilation" : "shear"; }
inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Coincide: return "coincide";
    case VerdictKind::RepairOrdering: return "repair_ordering";
    case VerdictKind::RepairPoint: return "repair_point";
    case VerdictKind::PairIsochoric: return "pair_isochoric";
  }
  return "?";
}

inline Scenario builtin(const std::string& name) {
  Scenario s;
  s.name = name;
  s.pathways = {Pathway::Total, Pathway::RateUnmodified, Pathway::RateModified};
  s.newton.rel_tol = 1e-11;
  s.newton.max_iter = 40;

  if (name == "footing") {
    s.kind = ScenarioKind::Fem;
    s.steps = 100;
    s.thickness = 5.0;
    s.mesh = {20.0, 20.0, 16, 16};
    s.material = NeoHookeParams::from_moduli(1.0, 0.78);
    s.sets = {{"punch", "top_center:0.5"}};
    s.dirichlet = {{"bottom", 1, 0.0}, {"left", 0, 0.0}, {"right", 0, 0.0}, {"punch", 1, -4.0}};
    s.report_set = "punch";
    s.report_comp = 1;
    s.report_sign = -1.0;
    s.verdict = {VerdictKind::RepairOrdering, 0.005, 0.01, 0.0};
  } else if (name == "confined") {
    // Quasi-incompressible squeeze between frictionless plates: symmetry
    // plane on the left, free bulging on the right.
    s.kind = ScenarioKind::Fem;
    s.steps = 50;
    s.thickness = 1.0;
    s.mesh = {2.0, 2.0, 16, 16};
    s.material = NeoHookeParams::from_moduli(1.0, 2000.0);
    s.dirichlet = {{"bottom", 1, 0.0}, {"left", 0, 0.0}, {"top", 1, -0.25}};
    s.report_set = "top";
    s.report_comp = 1;
    s.report_sign = -1.0;
    s.verdict = {VerdictKind::Coincide, 0.005, 0.01, 0.0};
  } else if (name == "patch_uniaxial") {
    s.kind = ScenarioKind::Fem;
    s.steps = 100;
    s.thickness = 1.0;
    s.mesh = {1.0, 1.0, 2, 2};
    s.material = NeoHookeParams::from_moduli(1.0, 0.78);
    s.dirichlet = {{"left", 0, 0.0}, {"right", 0, 0.2}, {"bottom", 1, 0.0}, {"top", 1, 0.0}};
    s.report_set = "right";
    s.report_comp = 0;
    s.report_sign = 1.0;
    s.verdict = {VerdictKind::RepairOrdering, 0.005, 0.005, 0.01};
  } else if (name == "patch_shear") {
    s.kind = ScenarioKind::Fem;
    s.steps = 100;
    s.thickness = 1.0;
    s.mesh = {1.0, 1.0, 2, 2};
    s.material = NeoHookeParams::from_moduli(1.0, 0.78);
    s.sets = {{"boundary", "union:bottom,top,left,right"}};
    s.dirichlet = {{"boundary", 0, 0.0, 0.0, 0.5}, {"boundary", 1, 0.0}};
    s.report_set = "top";
    s.report_comp = 0;
    s.report_sign = 1.0;
    s.verdict = {VerdictKind::PairIsochoric, 0.001, 0.01, 0.0};
  } else if (name == "point_dilation") {
    s.kind = ScenarioKind::Point;
    s.steps = 1000;
    s.material = NeoHookeParams::from_moduli(1.0, 0.78);
    s.path = {PathKind::Dilation, 0.2};
    s.verdict = {VerdictKind::RepairPoint, 0.005, 0.005, 0.05};
  } else {
    throw UnknownScenario(name);
  }
  return s;
}

inline std::vector<std::string> builtin_names() {
  return {"footing", "confined", "patch_uniaxial", "patch_shear", "point_dilation"};
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t c = s.find(sep, pos);
    if (c == std::string::npos) {
      out.push_back(s.substr(pos));
      break;
    }
    out.push_back(s.substr(pos, c - pos));
    pos = c + 1;
  }
  return out;
}

}  // namespace detail

// Structured mesh plus the scenario's derived node sets.
inline Mesh build_mesh(const Scenario& s) {
  Mesh m = mesh_rect(s.mesh.width, s.mesh.height, s.mesh.nx, s.mesh.ny);
  for (const DerivedSet& ds : s.sets) {
    if (ds.def.rfind("top_center:", 0) == 0) {
      double frac = parse_double(ds.def.substr(11));
      if (!(frac > 0.0 && frac <= 1.0))
        throw ConfigError("top_center fraction must lie in (0, 1]");
      double half = 0.5 * frac * s.mesh.width;
      std::vector<int> ids;
      for (int n : m.node_sets.at("top"))
        if (std::abs(m.nodes[n][0] - 0.5 * s.mesh.width) <= half + 1e-9) ids.push_back(n);
      m.node_sets[ds.name] = ids;
    } else if (ds.def.rfind("union:", 0) == 0) {
      std::vector<int> ids;
      for (const std::string& part : detail::split(ds.def.substr(6), ',')) {
        auto it = m.node_sets.find(part);
        if (it == m.node_sets.end()) throw ConfigError("unknown node set '" + part + "' in union");
        ids.insert(ids.end(), it->second.begin(), it->second.end());
      }
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      m.node_sets[ds.name] = ids;
    } else {
      throw ConfigError("unknown node set definition '" + ds.def + "'");
    }
  }
  return m;
}

inline std::vector<Tensor2> point_schedule(const Scenario& s) {
  if (s.path.kind == PathKind::Dilation) return dilation_schedule(1.0 + s.path.amount, s.steps);
  return shear_schedule(s.path.amount, s.steps);
}

struct PathwayCurve {
  Pathway pathway = Pathway::Total;
  std::vector<double> abscissa;  // applied displacement (mm) or path parameter
  std::vector<double> value;     // reaction force (N) or stress component (MPa)
  SolveReport report;            // empty for point scenarios
};

struct ComparisonResult {
  std::string scenario;
  std::vector<PathwayCurve> curves;
  // pairwise max over the shared grid of |a - b| / max(|total|, 1e-6)
  std::vector<std::pair<std::string, double>> pairwise;
  bool verdict_pass = false;
  std::vector<std::string> summary;  // key=value lines
};

namespace detail {

inline double report_target_magnitude(const Scenario& s, const Mesh& mesh) {
  auto it = mesh.node_sets.find(s.report_set);
  if (it == mesh.node_sets.end()) throw ConfigError("unknown report set '" + s.report_set + "'");
  double mag = 0.0;
  for (const Dirichlet& bc : s.dirichlet) {
    if (bc.comp != s.report_comp) continue;
    auto bcit = mesh.node_sets.find(bc.set);
    if (bcit == mesh.node_sets.end()) continue;
    for (int n : bcit->second) {
      bool in_report = std::binary_search(it->second.begin(), it->second.end(), n);
      if (!in_report) continue;
      double v = bc.a + bc.bx * mesh.nodes[n][0] + bc.cy * mesh.nodes[n][1];
      mag = std::max(mag, std::abs(v));
    }
  }
  return mag;
}

}  // namespace detail

inline PathwayCurve run_fem_pathway(const Scenario& s, Pathway pathway, int threads = 1) {
  Mesh mesh = build_mesh(s);
  double disp_mag = detail::report_target_magnitude(s, mesh);
  PlaneStrainSolver solver(mesh, s.dirichlet, s.tractions, s.material, pathway, s.newton, threads);
  PathwayCurve curve;
  curve.pathway = pathway;
  curve.report = solver.run(LoadProgram::uniform_ramp(s.steps));
  for (const StepReport& st : curve.report.steps) {
    curve.abscissa.push_back(st.scale * disp_mag);
    auto it = st.reactions.find(s.report_set);
    double r = it == st.reactions.end() ? 0.0 : it->second[std::size_t(s.report_comp)];
    curve.value.push_back(s.report_sign * r * s.thickness);
  }
  return curve;
}

inline PathwayCurve run_point_pathway(const Scenario& s, Pathway pathway) {
  std::vector<Tensor2> schedule = point_schedule(s);
  std::vector<SymTensor2> sig = integrate_path(s.material, pathway, schedule);
  PathwayCurve curve;
  curve.pathway = pathway;
  int comp = s.path.kind == PathKind::Dilation ? 0 : 3;  // s11 or s12
  for (std::size_t k = 0; k < sig.size(); ++k) {
    curve.abscissa.push_back(s.path.amount * double(k) / s.steps);
    curve.value.push_back(sig[k][comp]);
  }
  return curve;
}

inline ComparisonResult compare_pathways(const Scenario& s, int threads = 1) {
  ComparisonResult res;
  res.scenario = s.name;
  for (Pathway p : s.pathways) {
    if (s.kind == ScenarioKind::Fem)
      res.curves.push_back(run_fem_pathway(s, p, threads));
    else
      res.curves.push_back(run_point_pathway(s, p));
  }

  auto find = [&res](Pathway p) -> const PathwayCurve* {
    for (const PathwayCurve& c : res.curves)
      if (c.pathway == p) return &c;
    return nullptr;
  };
  const PathwayCurve* total = find(Pathway::Total);
  const PathwayCurve* unmod = find(Pathway::RateUnmodified);
  const PathwayCurve* mod = find(Pathway::RateModified);

  auto max_dev = [&total](const PathwayCurve& a, const PathwayCurve& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.value.size(); ++k) {
      double den = std::max(total ? std::abs(total->value[k]) : std::abs(b.value[k]), 1e-6);
      m = std::max(m, std::abs(a.value[k] - b.value[k]) / den);
    }
    return m;
  };

  for (std::size_t i = 0; i < res.curves.size(); ++i)
    for (std::size_t j = i + 1; j < res.curves.size(); ++j) {
      std::string key = std::string(to_string(res.curves[i].pathway)) + "_vs_" +
                        to_string(res.curves[j].pathway);
      res.pairwise.emplace_back(key, max_dev(res.curves[i], res.curves[j]));
    }

  res.summary.push_back("scenario = " + s.name);
  res.summary.push_back("verdict_kind = " + std::string(to_string(s.verdict.kind)));
  for (const auto& [key, dev] : res.pairwise)
    res.summary.push_back("max_dev_" + key + " = " + fmt17(dev));
  for (const PathwayCurve& c : res.curves)
    res.summary.push_back("final_" + std::string(to_string(c.pathway)) + " = " +
                          fmt17(c.value.back()));

  auto dev_of = [&res](const std::string& key) {
    for (const auto& [k, v] : res.pairwise)
      if (k == key) return v;
    return 0.0;
  };

  bool pass = true;
  switch (s.verdict.kind) {
    case VerdictKind::Coincide:
      for (const auto& [key, dev] : res.pairwise) pass = pass && dev < s.verdict.coincide_tol;
      break;
    case VerdictKind::RepairOrdering: {
      if (!total || !unmod || !mod) throw ConfigError("ordering verdict needs all three pathways");
      bool ordering = unmod->value.back() > total->value.back();
      double dmod = dev_of("total_vs_rate_modified");
      double final_dev =
          std::abs(unmod->value.back() - total->value.back()) /
          std::max(std::abs(total->value.back()), 1e-6);
      pass = ordering && dmod < s.verdict.mod_rtol &&
             (s.verdict.unmod_min_dev <= 0.0 || final_dev > s.verdict.unmod_min_dev);
      res.summary.push_back(std::string("ordering_unmodified_stiffer = ") +
                            (ordering ? "true" : "false"));
      res.summary.push_back("final_dev_rate_unmodified_vs_total = " + fmt17(final_dev));
      break;
    }
    case VerdictKind::RepairPoint: {
      if (!total || !unmod || !mod) throw ConfigError("repair verdict needs all three pathways");
      double den = std::max(std::abs(total->value.back()), 1e-6);
      double emod = std::abs(mod->value.back() - total->value.back()) / den;
      double eunmod = std::abs(unmod->value.back() - total->value.back()) / den;
      pass = emod < s.verdict.mod_rtol && eunmod > s.verdict.unmod_min_dev;
      res.summary.push_back("endpoint_err_rate_modified = " + fmt17(emod));
      res.summary.push_back("endpoint_err_rate_unmodified = " + fmt17(eunmod));
      break;
    }
    case VerdictKind::PairIsochoric: {
      if (!unmod || !mod) throw ConfigError("pair verdict needs both rate pathways");
      double d = dev_of("rate_unmodified_vs_rate_modified");
      pass = d < s.verdict.coincide_tol;
      break;
    }
  }
  res.verdict_pass = pass;
  res.summary.push_back(std::string("verdict = ") + (pass ? "pass" : "fail"));
  return res;
}

// --- serialization ---------------------------------------------------------

inline std::string to_config_text(const Scenario& s) {
  ConfigWriter w;
  w.section("scenario");
  w.kv("name", s.name);
  w.kv("kind", to_string(s.kind));
  std::string pw;
  for (std::size_t i = 0; i < s.pathways.size(); ++i)
    pw += std::string(i ? "," : "") + to_string(s.pathways[i]);
  w.kv("pathways", pw);
  w.kv("steps", s.steps);
  w.kv("thickness_mm", s.thickness);
  w.blank();

  w.section("material");
  w.kv("c1_mpa", s.material.c1);
  w.kv("d1_per_mpa", s.material.D1);
  w.blank();

  if (s.kind == ScenarioKind::Fem) {
    w.section("mesh");
    w.kv("width_mm", s.mesh.width);
    w.kv("height_mm", s.mesh.height);
    w.kv("nx", s.mesh.nx);
    w.kv("ny", s.mesh.ny);
    w.blank();

    if (!s.sets.empty()) {
      w.section("sets");
      for (const DerivedSet& ds : s.sets) w.kv(ds.name, ds.def);
      w.blank();
    }
    for (std::size_t i = 0; i < s.dirichlet.size(); ++i) {
      const Dirichlet& bc = s.dirichlet[i];
      w.section("bc." + std::to_string(i + 1));
      w.kv("set", bc.set);
      w.kv("comp", bc.comp == 0 ? "x" : "y");
      w.kv("value", bc.a);
      if (bc.bx != 0.0) w.kv("x_coeff", bc.bx);
      if (bc.cy != 0.0) w.kv("y_coeff", bc.cy);
      w.blank();
    }
    for (std::size_t i = 0; i < s.tractions.size(); ++i) {
      const Traction& t = s.tractions[i];
      w.section("traction." + std::to_string(i + 1));
      w.kv("set", t.set);
      w.kv("tx_mpa", t.tx);
      w.kv("ty_mpa", t.ty);
      w.blank();
    }
    w.section("report");
    w.kv("set", s.report_set);
    w.kv("comp", s.report_comp == 0 ? "x" : "y");
    w.kv("sign", s.report_sign);
    w.blank();
  } else {
    w.section("path");
    w.kv("kind", to_string(s.path.kind));
    w.kv("amount", s.path.amount);
    w.blank();
  }

  w.section("newton");
  w.kv("rel_tol", s.newton.rel_tol);
  w.kv("abs_floor_n", s.newton.abs_floor);
  w.kv("max_iter", s.newton.max_iter);
  w.kv("line_search", s.newton.line_search ? "on" : "off");
  w.blank();

  w.section("verdict");
  w.kv("kind", to_string(s.verdict.kind));
  w.kv("coincide_tol", s.verdict.coincide_tol);
  w.kv("mod_rtol", s.verdict.mod_rtol);
  w.kv("unmod_min_dev", s.verdict.unmod_min_dev);
  return w.text();
}

inline Scenario scenario_from_config(const Config& cfg) {
  Scenario s;
  s.name = cfg.require("scenario", "name");
  std::string kind = cfg.require("scenario", "kind");
  if (kind == "fem")
    s.kind = ScenarioKind::Fem;
  else if (kind == "point")
    s.kind = ScenarioKind::Point;
  else
    throw ConfigError("scenario kind must be 'fem' or 'point'");

  s.pathways.clear();
  for (const std::string& p : detail::split(cfg.require("scenario", "pathways"), ','))
    s.pathways.push_back(pathway_from_string(p));
  if (s.pathways.empty()) throw ConfigError("scenario needs at least one pathway");

  s.steps = int(parse_int(cfg.require("scenario", "steps")));
  if (s.steps < 1) throw ConfigError("steps must be >= 1");
  if (const std::string* v = cfg.get("scenario", "thickness_mm")) s.thickness = parse_double(*v);
  if (!(s.thickness > 0.0)) throw ConfigError("thickness must be positive");

  if (cfg.get("material", "c1_mpa")) {
    double c1 = parse_double(cfg.require("material", "c1_mpa"));
    double D1 = parse_double(cfg.require("material", "d1_per_mpa"));
    s.material = NeoHookeParams(c1, D1);
  } else {
    double mu = parse_double(cfg.require("material", "mu_mpa"));
    double kappa = parse_double(cfg.require("material", "kappa_mpa"));
    s.material = NeoHookeParams::from_moduli(mu, kappa);
  }

  auto comp_of = [](const std::string& c) {
    if (c == "x") return 0;
    if (c == "y") return 1;
    throw ConfigError("component must be 'x' or 'y'");
  };

  if (s.kind == ScenarioKind::Fem) {
    s.mesh.width = parse_double(cfg.require("mesh", "width_mm"));
    s.mesh.height = parse_double(cfg.require("mesh", "height_mm"));
    s.mesh.nx = int(parse_int(cfg.require("mesh", "nx")));
    s.mesh.ny = int(parse_int(cfg.require("mesh", "ny")));

    for (const Config::Section* sec : cfg.sections_named("sets")) {
      cfg.mark_section_known(sec->name);
      for (const auto& e : sec->entries) {
        e.consumed = true;
        s.sets.push_back({e.key, e.value});
      }
    }
    for (const Config::Section* sec : cfg.sections_named("bc")) {
      cfg.mark_section_known(sec->name);
      Dirichlet bc;
      bc.set = Config::require(*sec, "set");
      bc.comp = comp_of(Config::require(*sec, "comp"));
      bc.a = parse_double(Config::require(*sec, "value"));
      if (const std::string* v = Config::get(*sec, "x_coeff")) bc.bx = parse_double(*v);
      if (const std::string* v = Config::get(*sec, "y_coeff")) bc.cy = parse_double(*v);
      s.dirichlet.push_back(bc);
    }
    if (s.dirichlet.empty()) throw ConfigError("fem scenario needs at least one [bc.N] section");
    for (const Config::Section* sec : cfg.sections_named("traction")) {
      cfg.mark_section_known(sec->name);
      Traction t;
      t.set = Config::require(*sec, "set");
      if (const std::string* v = Config::get(*sec, "tx_mpa")) t.tx = parse_double(*v);
      if (const std::string* v = Config::get(*sec, "ty_mpa")) t.ty = parse_double(*v);
      s.tractions.push_back(t);
    }
    s.report_set = cfg.require("report", "set");
    s.report_comp = comp_of(cfg.require("report", "comp"));
    s.report_sign = parse_double(cfg.require("report", "sign"));
  } else {
    std::string pk = cfg.require("path", "kind");
    if (pk == "dilation")
      s.path.kind = PathKind::Dilation;
    else if (pk == "shear")
      s.path.kind = PathKind::Shear;
    else
      throw ConfigError("path kind must be 'dilation' or 'shear'");
    s.path.amount = parse_double(cfg.require("path", "amount"));
  }

  if (cfg.has_section("newton")) {
    if (const std::string* v = cfg.get("newton", "rel_tol")) s.newton.rel_tol = parse_double(*v);
    if (const std::string* v = cfg.get("newton", "abs_floor_n"))
      s.newton.abs_floor = parse_double(*v);
    if (const std::string* v = cfg.get("newton", "max_iter"))
      s.newton.max_iter = int(parse_int(*v));
    if (const std::string* v = cfg.get("newton", "line_search")) {
      if (*v == "on")
        s.newton.line_search = true;
      else if (*v == "off")
        s.newton.line_search = false;
      else
        throw ConfigError("line_search must be 'on' or 'off'");
    }
    s.newton.validate();
  }

  if (cfg.has_section("verdict")) {
    std::string vk = cfg.require("verdict", "kind");
    if (vk == "coincide")
      s.verdict.kind = VerdictKind::Coincide;
    else if (vk == "repair_ordering")
      s.verdict.kind = VerdictKind::RepairOrdering;
    else if (vk == "repair_point")
      s.verdict.kind = VerdictKind::RepairPoint;
    else if (vk == "pair_isochoric")
      s.verdict.kind = VerdictKind::PairIsochoric;
    else
      throw ConfigError("unknown verdict kind '" + vk + "'");
    if (const std::string* v = cfg.get("verdict", "coincide_tol"))
      s.verdict.coincide_tol = parse_double(*v);
    if (const std::string* v = cfg.get("verdict", "mod_rtol"))
      s.verdict.mod_rtol = parse_double(*v);
    if (const std::string* v = cfg.get("verdict", "unmod_min_dev"))
      s.verdict.unmod_min_dev = parse_double(*v);
  }

  cfg.reject_unknown();
  return s;
}

inline Scenario scenario_from_text(const std::string& text) {
  return scenario_from_config(Config::parse(text));
}

}  // namespace hyperbench
