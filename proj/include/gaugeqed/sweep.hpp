#pragma once

// Parameter sweeps, convergence control and CSV/JSON emission.

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "dispersive.hpp"
#include "errors.hpp"
#include "gauge.hpp"
#include "observables.hpp"
#include "two_level.hpp"

#ifndef GAUGEQED_VERSION
#define GAUGEQED_VERSION "0.1.0"
#endif

namespace gaugeqed {

using json = nlohmann::json;

enum class SweepVar { Delta, Eta, FluxExt, Alpha };

inline std::string to_string(SweepVar v) {
  switch (v) {
    case SweepVar::Delta: return "delta";
    case SweepVar::Eta: return "eta";
    case SweepVar::FluxExt: return "flux_ext";
    case SweepVar::Alpha: return "alpha";
  }
  return "?";
}

inline SweepVar parse_sweep_var(const std::string& s) {
  if (s == "delta") return SweepVar::Delta;
  if (s == "eta") return SweepVar::Eta;
  if (s == "flux_ext") return SweepVar::FluxExt;
  if (s == "alpha") return SweepVar::Alpha;
  throw Error(ErrorKind::Config, "unknown sweep variable '" + s + "'");
}

struct PhotonRequest {
  bool jc = false;     // measure in the JC gauge
  double alpha = 1.0;  // otherwise this gauge
  PhotonType type = PhotonType::OperatorOfProjected;
  int level = 0;  // 0 ground, 1 first excited

  std::string name() const {
    char buf[64];
    const char* st = level == 0 ? "G" : "E";
    if (jc)
      std::snprintf(buf, sizeof buf, "n_jc_t%d_%s", int(type), st);
    else
      std::snprintf(buf, sizeof buf, "n_%g_t%d_%s", alpha, int(type), st);
    return buf;
  }
};

struct ObservableSet {
  int energies = 0;  // number of levels, 0 = none
  bool fidelities = false;
  std::vector<PhotonRequest> photons;
  bool dispersive = false;
  bool matrix_elements = false;
  int matrix_element_levels = 6;
  bool gauge_params = false;
};

struct SweepSpec {
  std::string name = "custom";
  SweepVar swept = SweepVar::Eta;
  std::vector<double> grid;
  CircuitParams fixed;
  double alpha = 1.0;  // gauge of GeneralAlpha-style models when alpha is not swept
  std::vector<ModelTag> models;
  ObservableSet obs;
  bool convergence_check = true;
  double convergence_tol = 1e-7;

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Config, m); };
    if (grid.empty()) fail("sweep grid is empty");
    if (grid.size() > 1) {
      const bool up = grid[1] > grid[0];
      for (size_t i = 1; i < grid.size(); ++i)
        if ((up && !(grid[i] > grid[i - 1])) || (!up && !(grid[i] < grid[i - 1])))
          fail("sweep grid must be strictly monotone");
    }
    if (obs.energies < 0 || obs.energies > 12) fail("energies must request between 0 and 12 levels");
    try {
      fixed.validate();
    } catch (const Error& e) {
      fail(e.what());
    }
    for (const auto& m : models)
      if (m.kind == ModelKind::TRK) fail("the mass-eliminated model is not available for circuit sweeps");
  }
};

struct SweepRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string model;
  std::string observable;
  double value = 0.0;
  std::string status;
  bool operator==(const SweepRow& o) const {
    auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
    return sweep_var == o.sweep_var && same(sweep_value, o.sweep_value) && model == o.model &&
           observable == o.observable && same(value, o.value) && status == o.status;
  }
};

struct SweepResult {
  std::vector<SweepRow> rows;
  json metadata = json::object();
};

// ---------------------------------------------------------------- config

inline double json_number(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    std::string s = j.get<std::string>();
    if (s == "pi") return std::numbers::pi;
    if (s == "2pi") return 2.0 * std::numbers::pi;
  }
  throw Error(ErrorKind::Config, "'" + what + "' must be a number");
}

inline void apply_circuit_json(CircuitParams& p, const json& c) {
  if (!c.is_object()) throw Error(ErrorKind::Config, "'circuit' must be an object");
  for (auto it = c.begin(); it != c.end(); ++it) {
    const std::string& k = it.key();
    if (k == "E_c") p.E_c = json_number(*it, k);
    else if (k == "E_J") p.E_J = json_number(*it, k);
    else if (k == "E_l") p.E_l = json_number(*it, k);
    else if (k == "flux_ext") p.flux_ext = json_number(*it, k);
    else if (k == "delta") p.delta = json_number(*it, k);
    else if (k == "eta") p.eta = json_number(*it, k);
    else if (k == "matter_basis_dim") p.matter_basis_dim = int(json_number(*it, k));
    else if (k == "matter_keep") p.matter_keep = int(json_number(*it, k));
    else if (k == "fock_dim") p.fock_dim = int(json_number(*it, k));
    else throw Error(ErrorKind::Config, "unknown circuit key '" + k + "'");
  }
}

inline json circuit_to_json(const CircuitParams& p) {
  return json{{"E_c", p.E_c},           {"E_J", p.E_J},
              {"E_l", p.E_l},           {"flux_ext", p.flux_ext},
              {"delta", p.delta},       {"eta", p.eta},
              {"matter_basis_dim", p.matter_basis_dim}, {"matter_keep", p.matter_keep},
              {"fock_dim", p.fock_dim}};
}

// Bare "alpha", "rwa" and "type2" follow the swept (or configured) gauge.
inline ModelTag parse_sweep_model(const std::string& s) {
  const double follow = std::numeric_limits<double>::quiet_NaN();
  if (s == "alpha") return {ModelKind::GeneralAlpha, follow};
  if (s == "rwa") return {ModelKind::RWA, follow};
  if (s == "type2") return {ModelKind::Type2, follow};
  return parse_model_tag(s);
}

inline std::string sweep_model_name(const ModelTag& t) {
  if (std::isnan(t.alpha)) {
    if (t.kind == ModelKind::GeneralAlpha) return "alpha";
    if (t.kind == ModelKind::RWA) return "rwa";
    if (t.kind == ModelKind::Type2) return "type2";
  }
  return t.name();
}

inline SweepSpec spec_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Config, "config must be a JSON object");
  SweepSpec s;
  try {
    if (j.contains("name")) s.name = j.at("name").get<std::string>();
    if (j.contains("circuit")) apply_circuit_json(s.fixed, j.at("circuit"));
    if (j.contains("alpha")) s.alpha = json_number(j.at("alpha"), "alpha");
    if (j.contains("sweep")) {
      const json& w = j.at("sweep");
      s.swept = parse_sweep_var(w.at("variable").get<std::string>());
      if (w.contains("grid")) {
        for (const auto& x : w.at("grid")) s.grid.push_back(json_number(x, "grid"));
      } else {
        double a = json_number(w.at("start"), "start"), b = json_number(w.at("stop"), "stop");
        int n = w.at("count").get<int>();
        if (n < 1) throw Error(ErrorKind::Config, "count must be >= 1");
        for (int i = 0; i < n; ++i) s.grid.push_back(n == 1 ? a : a + (b - a) * double(i) / double(n - 1));
      }
    }
    if (j.contains("models"))
      for (const auto& m : j.at("models")) s.models.push_back(parse_sweep_model(m.get<std::string>()));
    if (j.contains("observables")) {
      const json& o = j.at("observables");
      for (auto it = o.begin(); it != o.end(); ++it) {
        const std::string& k = it.key();
        if (k == "energies") s.obs.energies = it->get<int>();
        else if (k == "fidelities") s.obs.fidelities = it->get<bool>();
        else if (k == "dispersive") s.obs.dispersive = it->get<bool>();
        else if (k == "matrix_elements") s.obs.matrix_elements = it->get<bool>();
        else if (k == "matrix_element_levels") s.obs.matrix_element_levels = it->get<int>();
        else if (k == "gauge_params") s.obs.gauge_params = it->get<bool>();
        else if (k == "photon") {
          for (const auto& ph : *it) {
            PhotonRequest r;
            const json& g = ph.at("gauge");
            if (g.is_string() && g.get<std::string>() == "jc")
              r.jc = true;
            else
              r.alpha = json_number(g, "gauge");
            int t = ph.value("type", 1);
            if (t != 1 && t != 2) throw Error(ErrorKind::Config, "photon type must be 1 or 2");
            r.type = PhotonType(t);
            std::string st = ph.value("state", std::string("G"));
            if (st != "G" && st != "E") throw Error(ErrorKind::Config, "photon state must be G or E");
            r.level = st == "G" ? 0 : 1;
            s.obs.photons.push_back(r);
          }
        } else
          throw Error(ErrorKind::Config, "unknown observable '" + k + "'");
      }
    }
    if (j.contains("convergence_check")) s.convergence_check = j.at("convergence_check").get<bool>();
    if (j.contains("convergence_tol")) s.convergence_tol = json_number(j.at("convergence_tol"), "convergence_tol");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  return s;
}

inline json spec_to_json(const SweepSpec& s) {
  json models = json::array();
  for (const auto& m : s.models) models.push_back(sweep_model_name(m));
  json photons = json::array();
  for (const auto& p : s.obs.photons) {
    json g = p.jc ? json("jc") : json(p.alpha);
    photons.push_back({{"gauge", g}, {"type", int(p.type)}, {"state", p.level == 0 ? "G" : "E"}});
  }
  return json{{"name", s.name},
              {"circuit", circuit_to_json(s.fixed)},
              {"alpha", s.alpha},
              {"sweep", {{"variable", to_string(s.swept)}, {"grid", s.grid}}},
              {"models", models},
              {"observables",
               {{"energies", s.obs.energies},
                {"fidelities", s.obs.fidelities},
                {"photon", photons},
                {"dispersive", s.obs.dispersive},
                {"matrix_elements", s.obs.matrix_elements},
                {"matrix_element_levels", s.obs.matrix_element_levels},
                {"gauge_params", s.obs.gauge_params}}},
              {"convergence_check", s.convergence_check},
              {"convergence_tol", s.convergence_tol}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "'" + path + "': " + e.what());
  }
}

// ---------------------------------------------------------------- convergence

struct ConvergeTarget {
  int level = 0;       // exact composite level index (0-based)
  double alpha = 1.0;  // gauge used for the exact build
};

// Doubles N_m until the kept matter levels are stable, then grows N_keep and N_c by 50% until the
// target level changes by less than tol (relative). Returns the smaller of the last two cutoff sets.
inline CircuitParams converge(CircuitParams p, const ConvergeTarget& target, double tol,
                              Index max_dim = 6000, std::vector<double>* trajectory = nullptr) {
  if (!(tol > 0.0)) throw Error(ErrorKind::Validation, "tolerance must be positive");
  std::vector<double> traj;
  for (int tries = 0;; ++tries) {
    try {
      build_fluxonium(p);
      break;
    } catch (const ConvergenceError&) {
      if (tries >= 5) throw;
      p.matter_basis_dim *= 2;
    }
  }
  auto level = [&](const CircuitParams& q) {
    CircuitSetup s = make_setup(q);
    return exact_levels(q, s, target.alpha, target.level + 1)(target.level);
  };
  double v = level(p);
  traj.push_back(v);
  for (;;) {
    CircuitParams q = p;
    q.matter_keep = int(std::ceil(1.5 * p.matter_keep));
    q.fock_dim = int(std::ceil(1.5 * p.fock_dim));
    q.matter_basis_dim = std::max(q.matter_basis_dim, 4 * q.matter_keep);
    if (Index(q.matter_keep) * q.fock_dim > max_dim) {
      if (trajectory) *trajectory = traj;
      throw ConvergenceError("cutoff cap reached (composite dimension " + std::to_string(max_dim) +
                                 ") before the target converged; best effort N_keep=" +
                                 std::to_string(p.matter_keep) + ", N_c=" + std::to_string(p.fock_dim),
                             traj);
    }
    double w = level(q);
    traj.push_back(w);
    if (std::abs(w - v) < tol * std::abs(w)) {
      if (trajectory) *trajectory = traj;
      return p;
    }
    p = q;
    v = w;
  }
}

// ---------------------------------------------------------------- sweep engine

namespace detail {

inline CircuitParams point_params(const SweepSpec& s, double x, double& alpha) {
  CircuitParams p = s.fixed;
  alpha = s.alpha;
  switch (s.swept) {
    case SweepVar::Delta: p.delta = x; break;
    case SweepVar::Eta: p.eta = x; break;
    case SweepVar::FluxExt: p.flux_ext = x; break;
    case SweepVar::Alpha: alpha = x; break;
  }
  return p;
}

inline ModelTag resolve_tag(ModelTag t, const SweepSpec& s, double alpha) {
  (void)s;
  if (std::isnan(t.alpha)) t.alpha = alpha;
  return t;
}

inline double nan() { return std::numeric_limits<double>::quiet_NaN(); }

struct PointContext {
  CircuitParams p;
  CircuitSetup setup;
  GaugeContext base;
  double alpha_jc = 0.0;
  std::map<double, CompositeSpectrum> exact;  // by gauge

  const CompositeSpectrum& exact_at(double a, Index k) {
    auto it = exact.find(a);
    if (it == exact.end() || it->second.values.size() < k) {
      exact[a] = exact_lowest(p, setup, a, k);
      it = exact.find(a);
    }
    return it->second;
  }
};

inline std::vector<SweepRow> run_point(const SweepSpec& s, double x) {
  std::vector<SweepRow> rows;
  const std::string var = to_string(s.swept);
  auto push = [&](const std::string& model, const std::string& obs, double v, const std::string& st) {
    rows.push_back({var, x, model, obs, v, st});
  };
  double alpha = s.alpha;
  PointContext pc;
  pc.p = point_params(s, x, alpha);

  // rows every model would carry, used to fill failures
  auto model_observables = [&]() {
    std::vector<std::string> names;
    for (int k = 0; k < s.obs.energies; ++k) names.push_back("E" + std::to_string(k));
    if (s.obs.fidelities)
      for (const char* n : {"F_G", "F_E", "cross_EG"}) names.push_back(n);
    for (const auto& ph : s.obs.photons) names.push_back(ph.name());
    if (s.obs.dispersive)
      for (const char* n : {"kappa_0", "chi_0", "kappa_1", "chi_1"}) names.push_back(n);
    return names;
  };

  try {
    pc.p.validate();
    pc.setup = make_setup(pc.p);
    pc.base = derive_gauge_context(pc.p, pc.setup.reference, 1.0);
    pc.alpha_jc = solve_alpha_jc(pc.base).alpha_jc;
  } catch (const std::exception& e) {
    for (const auto& t0 : s.models)
      for (const auto& o : model_observables()) push(resolve_tag(t0, s, alpha).name(), o, nan(), std::string("error: ") + e.what());
    if (s.obs.matrix_elements) push("matter", "matrix_elements", nan(), std::string("error: ") + e.what());
    if (s.obs.gauge_params) push("circuit", "alpha_jc", nan(), std::string("error: ") + e.what());
    return rows;
  }
  const CircuitParams& p = pc.p;

  for (const auto& t0 : s.models) {
    const ModelTag t = resolve_tag(t0, s, alpha);
    const std::string mname = t.name();
    const bool exact = t.kind == ModelKind::Exact;
    std::vector<std::string> names = model_observables();
    try {
      if (exact) {
        const double ea = s.swept == SweepVar::Alpha ? alpha : 1.0;
        std::string status = "ok";
        if (s.obs.energies > 0) {
          const CompositeSpectrum& ex = pc.exact_at(ea, std::max(s.obs.energies, 2));
          if (s.convergence_check) {
            CircuitParams q = p;
            q.matter_keep = int(std::ceil(1.5 * p.matter_keep));
            q.fock_dim = int(std::ceil(1.5 * p.fock_dim));
            q.matter_basis_dim = std::max(q.matter_basis_dim, 4 * q.matter_keep);
            RealVector big = exact_levels(q, make_setup(q), ea, s.obs.energies);
            double worst = 0.0;
            for (int k = 0; k < s.obs.energies; ++k)
              worst = std::max(worst, std::abs(big(k) - ex.values(k)) / std::abs(big(k)));
            if (worst >= s.convergence_tol) {
              char buf[64];
              std::snprintf(buf, sizeof buf, "unconverged(%.3g)", worst);
              status = buf;
            }
          }
          for (int k = 0; k < s.obs.energies; ++k) push(mname, "E" + std::to_string(k), ex.values(k), status);
        }
        if (s.obs.fidelities)
          for (const char* n : {"F_G", "F_E", "cross_EG"}) push(mname, n, 1.0, "reference");
        for (const auto& ph : s.obs.photons) {
          const CompositeSpectrum& ex = pc.exact_at(1.0, 2);
          const double ma = ph.jc ? pc.alpha_jc : ph.alpha;
          GaugeContext c = derive_gauge_context(p, pc.setup.reference, 1.0);
          push(mname, ph.name(), exact_photon_number(pc.setup.matter, c, ma, ex.vectors.col(ph.level), p.fock_dim),
               status);
        }
        if (s.obs.dispersive)
          for (const char* n : {"kappa_0", "chi_0", "kappa_1", "chi_1"}) push(mname, n, nan(), "not-applicable");
        continue;
      }
      TwoLevelModel m = model_for_tag(p, pc.setup, t);
      const Index need = std::max(s.obs.energies, 2);
      EigenSystem es = eig_lowest(m.hamiltonian, need);
      for (int k = 0; k < s.obs.energies; ++k) push(mname, "E" + std::to_string(k), es.values(k), "ok");
      if (s.obs.fidelities) {
        FidelityRecord r = fidelity_record(pc.exact_at(m.ctx.alpha, 2), m);
        push(mname, "F_G", r.F_G, "ok");
        push(mname, "F_E", r.F_E, "ok");
        push(mname, "cross_EG", r.cross, "ok");
      }
      for (const auto& ph : s.obs.photons) {
        const double ma = ph.jc ? pc.alpha_jc : ph.alpha;
        push(mname, ph.name(), two_level_photon_number(m, es.vectors.col(ph.level), ma, ph.type), "ok");
      }
      if (s.obs.dispersive) {
        DispersiveShifts d = sw_shifts(pc.setup.matter, m.ctx, 1);
        std::string st0 = d.near_resonant[0] ? "near-resonant" : "ok";
        std::string st1 = d.near_resonant[1] ? "near-resonant" : "ok";
        push(mname, "kappa_0", d.kappa[0], st0);
        push(mname, "chi_0", d.chi[0], st0);
        push(mname, "kappa_1", d.kappa[1], st1);
        push(mname, "chi_1", d.chi[1], st1);
      }
    } catch (const std::exception& e) {
      // drop partial rows of this model and emit one failed row per observable
      std::erase_if(rows, [&](const SweepRow& r) { return r.model == mname; });
      for (const auto& o : names) push(mname, o, nan(), std::string("error: ") + e.what());
    }
  }

  if (s.obs.matrix_elements) {
    auto table = export_matrix_element_heatmaps(pc.setup.matter, s.obs.matrix_element_levels);
    for (const auto& h : table) {
      std::string idx = "(" + std::to_string(h.n) + "," + std::to_string(h.m) + ")";
      push("matter", "phi_sq" + idx, h.phi_sq, "ok");
      push("matter", "eps_phi_sq" + idx, h.eps_phi_sq, "ok");
    }
  }
  if (s.obs.gauge_params) {
    GaugeContext c0 = with_alpha(pc.base, 0.0);
    AlphaJCSolution jc = solve_alpha_jc(pc.base);
    push("circuit", "alpha_jc", jc.alpha_jc, "ok");
    push("circuit", "omega_jc", jc.omega_jc, "ok");
    push("circuit", "one_over_one_plus_delta", 1.0 / (1.0 + p.delta), "ok");
    push("circuit", "mu_0", c0.mu_alpha, "ok");
    push("circuit", "g0_over_g", pc.base.g() > 0.0 ? std::abs(c0.u_plus) / pc.base.g() : nan(),
         pc.base.g() > 0.0 ? "ok" : "not-applicable");
    push("circuit", "omega", pc.base.omega, "ok");
    push("circuit", "L", pc.base.L(), "ok");
    push("circuit", "C", pc.base.C, "ok");
  }
  return rows;
}

}  // namespace detail

inline int worker_count() {
  if (const char* w = std::getenv("GAUGEQED_WORKERS")) {
    int n = std::atoi(w);
    if (n >= 1) return n;
  }
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : int(h);
}

inline json sweep_metadata(const SweepSpec& s) {
  json meta;
  meta["version"] = GAUGEQED_VERSION;
  meta["config"] = spec_to_json(s);
  meta["cutoffs"] = {{"matter_basis_dim", s.fixed.matter_basis_dim},
                     {"matter_keep", s.fixed.matter_keep},
                     {"fock_dim", s.fixed.fock_dim}};
  try {
    CircuitSetup su = make_setup(s.fixed);
    GaugeContext c = derive_gauge_context(s.fixed, su.reference, 1.0);
    AlphaJCSolution jc = solve_alpha_jc(c);
    meta["derived"] = {{"omega_m", c.omega_m}, {"varphi", c.varphi}, {"omega", c.omega},
                       {"L", c.inv_L > 0 ? json(c.L()) : json(nullptr)},
                       {"C", c.C},          {"alpha_jc", jc.alpha_jc}, {"omega_jc", jc.omega_jc}};
  } catch (const std::exception& e) {
    meta["derived"] = {{"error", e.what()}};
  }
  return meta;
}

inline SweepResult run_sweep(const SweepSpec& s, int workers = 0) {
  s.validate();
  if (workers <= 0) workers = worker_count();
  const size_t n = s.grid.size();
  std::vector<std::vector<SweepRow>> parts(n);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < n; i = next++) parts[i] = detail::run_point(s, s.grid[i]);
  };
  workers = std::max(1, std::min<int>(workers, int(n)));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  SweepResult r;
  for (auto& part : parts) r.rows.insert(r.rows.end(), part.begin(), part.end());
  r.metadata = sweep_metadata(s);
  return r;
}

// ---------------------------------------------------------------- emission

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw Error(ErrorKind::Config, "malformed number '" + s + "'");
  return v;
}

inline std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline const char* kCsvHeader = "sweep_var,sweep_value,model,observable,value,status";

inline std::string to_csv(const SweepResult& r) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const auto& row : r.rows) {
    out += csv_field(row.sweep_var) + "," + format_double(row.sweep_value) + "," + csv_field(row.model) + "," +
           csv_field(row.observable) + "," + format_double(row.value) + "," + csv_field(row.status) + "\n";
  }
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& text, size_t& pos) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  while (pos < text.size()) {
    char c = text[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < text.size() && text[pos] == '"') {
          cur += '"';
          ++pos;
        } else
          quoted = false;
      } else
        cur += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (c == '\n') {
      break;
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

inline SweepResult parse_csv(const std::string& text) {
  SweepResult r;
  size_t pos = 0;
  auto header = split_csv_line(text, pos);
  std::string h;
  for (size_t i = 0; i < header.size(); ++i) h += (i ? "," : "") + header[i];
  if (h != kCsvHeader) throw Error(ErrorKind::Config, "unexpected CSV header");
  while (pos < text.size()) {
    auto f = split_csv_line(text, pos);
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 6) throw Error(ErrorKind::Config, "CSV row with " + std::to_string(f.size()) + " fields");
    r.rows.push_back({f[0], parse_double(f[1]), f[2], f[3], parse_double(f[4]), f[5]});
  }
  return r;
}

inline json to_json(const SweepResult& r) {
  json rows = json::array();
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); };
  for (const auto& row : r.rows)
    rows.push_back({{"sweep_var", row.sweep_var},
                    {"sweep_value", num(row.sweep_value)},
                    {"model", row.model},
                    {"observable", row.observable},
                    {"value", num(row.value)},
                    {"status", row.status}});
  return json{{"metadata", r.metadata}, {"rows", rows}};
}

inline SweepResult from_json(const json& j) {
  SweepResult r;
  try {
    r.metadata = j.at("metadata");
    auto num = [](const json& v) { return v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>(); };
    for (const auto& row : j.at("rows"))
      r.rows.push_back({row.at("sweep_var").get<std::string>(), num(row.at("sweep_value")),
                        row.at("model").get<std::string>(), row.at("observable").get<std::string>(),
                        num(row.at("value")), row.at("status").get<std::string>()});
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, e.what());
  }
  return r;
}

enum class OutputFormat { Csv, Json };

inline std::string render(const SweepResult& r, OutputFormat f) {
  return f == OutputFormat::Csv ? to_csv(r) : to_json(r).dump(2) + "\n";
}

inline void emit(const SweepResult& r, OutputFormat f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
  out << render(r, f);
  out.flush();
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path + "'");
}

}  // namespace gaugeqed
