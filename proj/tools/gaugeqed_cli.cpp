// gaugeqed command-line front end.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include <gaugeqed/gaugeqed.hpp>

namespace fs = std::filesystem;
using namespace gaugeqed;

namespace {

#ifndef GAUGEQED_PRESET_DIR
#define GAUGEQED_PRESET_DIR "presets"
#endif

enum Exit { kOk = 0, kChecksFailed = 1, kConfig = 2, kConvergence = 3, kIo = 4 };

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::Validation:
    case ErrorKind::InvalidDimension:
    case ErrorKind::Unsupported: return kConfig;
    case ErrorKind::Io: return kIo;
    default: return kConvergence;
  }
}

std::string preset_dir() {
  if (const char* d = std::getenv("GAUGEQED_PRESET_DIR")) return d;
  return GAUGEQED_PRESET_DIR;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(preset_dir(), ec))
    if (e.path().extension() == ".json") names.push_back(e.path().stem().string());
  std::sort(names.begin(), names.end());
  return names;
}

struct Overrides {
  std::optional<double> alpha, delta, eta, flux_ext, ej, ec, el;
  std::optional<int> nm, nkeep, nc;
  std::string config, preset, out, format = "csv";
  std::vector<std::string> models;
  int levels = 10;
  std::string gauge = "1";
  int photon_type = 1;
  std::string state = "G";
  double tol = 1e-6;
};

void add_common(CLI::App* app, Overrides& o) {
  app->add_option("--config", o.config, "JSON configuration file");
  app->add_option("--preset", o.preset, "named preset");
  app->add_option("--alpha", o.alpha, "gauge parameter");
  app->add_option("--delta", o.delta, "detuning w / w_m");
  app->add_option("--eta", o.eta, "coupling g / w");
  app->add_option("--flux-ext", o.flux_ext, "external flux (rad)");
  app->add_option("--ej", o.ej, "Josephson energy");
  app->add_option("--ec", o.ec, "charging energy");
  app->add_option("--el", o.el, "inductive energy");
  app->add_option("--nm", o.nm, "fluxonium oscillator basis size");
  app->add_option("--nkeep", o.nkeep, "matter levels kept");
  app->add_option("--nc", o.nc, "Fock cutoff");
  app->add_option("--out", o.out, "output path (default stdout)");
  app->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

SweepSpec load_spec(const Overrides& o) {
  SweepSpec s;
  if (!o.preset.empty() && !o.config.empty()) throw Error(ErrorKind::Config, "use either --preset or --config");
  if (!o.preset.empty()) {
    fs::path p = fs::path(preset_dir()) / (o.preset + ".json");
    if (!fs::exists(p)) throw Error(ErrorKind::Config, "unknown preset '" + o.preset + "'");
    s = spec_from_json(read_json_file(p.string()));
  } else if (!o.config.empty()) {
    s = spec_from_json(read_json_file(o.config));
  }
  CircuitParams& p = s.fixed;
  if (o.alpha) s.alpha = *o.alpha;
  if (o.delta) p.delta = *o.delta;
  if (o.eta) p.eta = *o.eta;
  if (o.flux_ext) p.flux_ext = *o.flux_ext;
  if (o.ej) p.E_J = *o.ej;
  if (o.ec) p.E_c = *o.ec;
  if (o.el) p.E_l = *o.el;
  if (o.nm) p.matter_basis_dim = *o.nm;
  if (o.nkeep) {
    p.matter_keep = *o.nkeep;
    if (!o.nm) p.matter_basis_dim = std::max(p.matter_basis_dim, 4 * p.matter_keep);
  }
  if (o.nc) p.fock_dim = *o.nc;
  return s;
}

// a single-point table at the fixed parameters
SweepSpec single_point(SweepSpec s) {
  s.swept = SweepVar::Eta;
  s.grid = {s.fixed.eta};
  return s;
}

std::vector<ModelTag> tags_or(const Overrides& o, std::vector<std::string> fallback) {
  std::vector<ModelTag> t;
  for (const auto& m : o.models.empty() ? fallback : o.models) t.push_back(parse_sweep_model(m));
  return t;
}

void write(const SweepResult& r, const Overrides& o) {
  OutputFormat f = o.format == "json" ? OutputFormat::Json : OutputFormat::Csv;
  if (o.out.empty()) {
    std::cout << render(r, f);
    std::cout.flush();
    if (!std::cout) throw Error(ErrorKind::Io, "write to stdout failed");
  } else {
    emit(r, f, o.out);
  }
}

bool report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s %-28s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  return ok;
}

int run_validate(const Overrides& o) {
  CircuitParams p = load_spec(o).fixed;
  if (!o.nkeep && !o.nc) {
    // default cutoffs are too small for part-per-million invariance
    p.matter_keep = 40;
    p.fock_dim = 40;
    p.matter_basis_dim = std::max(p.matter_basis_dim, 160);
  }
  p.validate();
  bool all = true;
  char buf[256];

  RealVector fl = build_fluxonium(p).energies.head(6);
  RealVector grid = fluxonium_grid_levels(p, 6);
  double dev = ((fl - grid).array().abs() / grid.array().abs()).maxCoeff();
  std::snprintf(buf, sizeof buf, "max relative deviation %.2e over 6 levels", dev);
  all &= report(dev < 1e-6, "matter-vs-grid", buf);

  GaugeInvarianceReport g = verify_gauge_invariance(p, {0.0, 0.25, 0.5, 0.75, 1.0}, o.levels, o.tol);
  std::snprintf(buf, sizeof buf, "spread %.2e (tol %.1e, N_keep=%d, N_c=%d)", g.max_spread, o.tol, p.matter_keep,
                p.fock_dim);
  all &= report(g.pass, "gauge-invariance", buf);

  CircuitParams h = p;
  h.E_J = 0.0;
  CircuitSetup hs = make_setup(h);
  GaugeContext hc = derive_gauge_context(h, hs.reference, 1.0);
  auto [w1, w2] = normal_mode_frequencies(hs.matter.m_eff, h.E_l, hc.C, hc.inv_L);
  RealVector ex = exact_levels(h, hs, 0.5, 4);
  std::vector<double> nm;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) nm.push_back(0.5 * (w1 + w2) + a * w1 + b * w2);
  std::sort(nm.begin(), nm.end());
  double hdev = 0.0;
  for (int k = 0; k < 4; ++k) hdev = std::max(hdev, std::abs(ex(k) - nm[k]) / nm[k]);
  std::snprintf(buf, sizeof buf, "max relative deviation %.2e", hdev);
  all &= report(hdev < 1e-8, "harmonic-normal-modes", buf);

  FidelityRecord d = dressed_jc_fidelity(h);
  std::snprintf(buf, sizeof buf, "1 - F_G = %.2e", 1.0 - d.F_G);
  all &= report(1.0 - d.F_G < 1e-8, "harmonic-jc-fidelity", buf);

  CircuitSetup s = make_setup(p);
  GaugeContext c = derive_gauge_context(p, s.reference, 1.0);
  std::vector<double> as;
  for (int i = 0; i <= 100; ++i) as.push_back(i / 100.0);
  TrkReport t = trk_invariance_check(c, as);
  std::snprintf(buf, sizeof buf, "substituted spread %.2e / %.2e", t.spread_ground_sub, t.spread_excited_sub);
  all &= report(t.pass, "trk-substitution", buf);

  AlphaJCSolution jc = solve_alpha_jc(c);
  TwoLevelModel m = build_jc_model(s.matter, c, p.fock_dim);
  Matrix N = excitation_number(p.fock_dim);
  double comm = commutator_norm(m.hamiltonian.matrix(), N) / m.hamiltonian.norm();
  std::snprintf(buf, sizeof buf, "alpha_JC=%.6f, ||[H,N]||/||H|| = %.1e", jc.alpha_jc, comm);
  all &= report(comm < 1e-10, "jc-excitation-number", buf);
  return all ? kOk : kChecksFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gauge-resolved light-matter two-level models"};
  app.set_version_flag("--version", std::string(GAUGEQED_VERSION));
  app.require_subcommand(1);
  Overrides o;

  auto* spectrum = app.add_subcommand("spectrum", "lowest energies of the exact and two-level models");
  add_common(spectrum, o);
  spectrum->add_option("--levels", o.levels, "number of levels (<= 12)");
  spectrum->add_option("--models", o.models, "model tags")->delimiter(',');

  auto* sweep = app.add_subcommand("sweep", "run a preset or configured sweep");
  add_common(sweep, o);

  auto* fidelity = app.add_subcommand("fidelity", "ground/excited fidelities against the exact model");
  add_common(fidelity, o);
  fidelity->add_option("--models", o.models, "model tags")->delimiter(',');

  auto* photon = app.add_subcommand("photon", "photon-number expectations");
  add_common(photon, o);
  photon->add_option("--models", o.models, "model tags")->delimiter(',');
  photon->add_option("--gauge", o.gauge, "measured gauge: a number or 'jc'");
  photon->add_option("--type", o.photon_type, "1 or 2")->check(CLI::IsMember({1, 2}));
  photon->add_option("--state", o.state, "G or E")->check(CLI::IsMember({"G", "E"}));

  auto* dispersive = app.add_subcommand("dispersive", "second-order Lamb and ac-Stark shifts");
  add_common(dispersive, o);
  dispersive->add_option("--models", o.models, "model tags")->delimiter(',');

  auto* matrix = app.add_subcommand("matrix-elements", "normalized |phi_nm|^2 and |eps_nm phi_nm|^2");
  add_common(matrix, o);
  matrix->add_option("--levels", o.levels, "table size");

  auto* validate = app.add_subcommand("validate", "gauge-invariance and oracle checks");
  add_common(validate, o);
  validate->add_option("--levels", o.levels, "levels compared across gauges");
  validate->add_option("--tol", o.tol, "relative spread tolerance");

  auto* list = app.add_subcommand("list-presets", "list shipped presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*list) {
      for (const auto& n : preset_names()) {
        SweepSpec s = spec_from_json(read_json_file((fs::path(preset_dir()) / (n + ".json")).string()));
        std::printf("%-28s %-9s %zu points\n", n.c_str(), to_string(s.swept).c_str(), s.grid.size());
      }
      return kOk;
    }
    if (*validate) return run_validate(o);

    SweepSpec s = load_spec(o);
    if (*sweep) {
      if (o.preset.empty() && o.config.empty()) throw Error(ErrorKind::Config, "sweep needs --preset or --config");
    } else {
      s = single_point(s);
      s.obs = ObservableSet{};
      if (*spectrum) {
        s.obs.energies = o.levels;
        s.models = tags_or(o, {"exact", "qrm_flux", "qrm_charge", "jc"});
      } else if (*fidelity) {
        s.obs.fidelities = true;
        s.models = tags_or(o, {"qrm_flux", "qrm_charge", "jc"});
      } else if (*photon) {
        PhotonRequest r;
        if (o.gauge == "jc")
          r.jc = true;
        else
          r.alpha = parse_double(o.gauge);
        r.type = PhotonType(o.photon_type);
        r.level = o.state == "G" ? 0 : 1;
        s.obs.photons = {r};
        s.models = tags_or(o, {"exact", "qrm_flux", "qrm_charge", "jc"});
      } else if (*dispersive) {
        s.obs.dispersive = true;
        s.models = tags_or(o, {"qrm_charge", "qrm_flux", "jc"});
      } else if (*matrix) {
        s.obs.matrix_elements = true;
        s.obs.matrix_element_levels = o.levels;
        s.models.clear();
      }
    }
    SweepResult r = run_sweep(s);
    write(r, o);
    return kOk;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfig;
  }
}
