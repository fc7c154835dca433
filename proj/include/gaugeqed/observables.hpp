#pragma once

// Fidelities, photon numbers and matrix-element tables.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gauge.hpp"
#include "operators.hpp"
#include "two_level.hpp"

namespace gaugeqed {

struct EmbeddedState {
  Vector vec;  // exact product basis, matter slow
  double leakage = 0.0;
};

struct FidelityRecord {
  double alpha = 0.0;
  ModelTag tag;
  double F_G = 0.0;
  double F_E = 0.0;
  double cross = 0.0;  // |<E2|G>|^2
  double leakage = 0.0;
};

enum class PhotonType {
  OperatorOfProjected = 1,  // (P phi P)^2
  ProjectedOperator = 2     // P phi^2 P
};

struct PhotonNumberRecord {
  double measured_alpha = 0.0;
  std::string state;
  PhotonType type = PhotonType::OperatorOfProjected;
  double value = 0.0;
};

struct HeatmapEntry {
  int n = 0, m = 0;
  double phi_sq = 0.0;      // |phi_nm|^2 / max
  double eps_phi_sq = 0.0;  // |eps_nm phi_nm|^2 / max
};

// Maps a c_alpha Fock amplitude vector onto the bare a Fock basis: |k_c> = S(-r)|k_a>.
// S is built with padding so the truncated image is accurate; lost norm is reported.
inline Matrix bogoliubov_map(double r, Index model_fock, Index exact_fock, Index pad = 40) {
  const Index big = std::max(model_fock, exact_fock) + pad;
  Matrix S = squeeze_matrix(-r, big);
  return S.topLeftCorner(exact_fock, model_fock);
}

inline EmbeddedState embed_two_level_state(const TwoLevelModel& model, const Vector& state, Index exact_keep,
                                           Index exact_fock, double max_leakage = 1e-6) {
  const Index nc = model.fock_dim;
  if (state.size() != 2 * nc) throw Error(ErrorKind::Validation, "state does not live on the model space");
  if (exact_keep < 2) throw Error(ErrorKind::Validation, "exact basis needs at least two matter levels");
  const double r = model.trk ? 0.0 : model.ctx.r_alpha;
  Matrix B = bogoliubov_map(r, nc, exact_fock);
  EmbeddedState out;
  out.vec = Vector::Zero(exact_keep * exact_fock);
  out.vec.segment(0, exact_fock) = B * state.segment(0, nc);
  out.vec.segment(exact_fock, exact_fock) = B * state.segment(nc, nc);
  out.leakage = std::max(0.0, state.squaredNorm() - out.vec.squaredNorm());
  if (out.leakage > max_leakage)
    throw Error(ErrorKind::Cutoff, "squeeze embedding loses norm " + std::to_string(out.leakage) +
                                       "; raise the exact Fock cutoff");
  return out;
}

// Needs at least two exact eigenvectors in the same gauge as the model.
inline FidelityRecord fidelity_record(const CompositeSpectrum& exact, const TwoLevelModel& model) {
  if (exact.vectors.cols() < 2) throw Error(ErrorKind::Validation, "need the two lowest exact eigenvectors");
  if (std::abs(exact.basis.alpha - model.ctx.alpha) > 1e-12)
    throw Error(ErrorKind::Validation, "exact basis and model use different gauges");
  EigenSystem es = eig_lowest(model.hamiltonian, 2);
  EmbeddedState g = embed_two_level_state(model, es.vectors.col(0), exact.basis.n_keep, exact.basis.n_fock);
  EmbeddedState e = embed_two_level_state(model, es.vectors.col(1), exact.basis.n_keep, exact.basis.n_fock);
  FidelityRecord r;
  r.alpha = model.ctx.alpha;
  r.tag = model.tag;
  r.F_G = std::norm(g.vec.dot(exact.vectors.col(0)));
  r.F_E = std::norm(e.vec.dot(exact.vectors.col(1)));
  r.cross = std::norm(e.vec.dot(exact.vectors.col(0)));
  r.leakage = std::max(g.leakage, e.leakage);
  return r;
}

inline CompositeSpectrum exact_lowest(const CircuitParams& p, const CircuitSetup& s, double alpha, Index k) {
  GaugeContext c = derive_gauge_context(p, s.reference, alpha);
  BasisDescriptor b{alpha, p.matter_keep, p.fock_dim};
  return diagonalize_exact(build_exact_circuit(p, s.matter, c), b, k, true);
}

inline std::vector<FidelityRecord> fidelities(const CircuitParams& p, const std::vector<ModelTag>& tags) {
  CircuitSetup s = make_setup(p);
  std::vector<FidelityRecord> out;
  for (const ModelTag& t : tags) {
    TwoLevelModel m = model_for_tag(p, s, t);
    CompositeSpectrum ex = exact_lowest(p, s, m.ctx.alpha, 2);
    FidelityRecord r = fidelity_record(ex, m);
    r.tag = t;
    out.push_back(r);
  }
  return out;
}

inline std::vector<FidelityRecord> fidelities(const CircuitParams& p, const std::vector<double>& alphas) {
  std::vector<ModelTag> tags;
  for (double a : alphas) tags.push_back({ModelKind::GeneralAlpha, a});
  return fidelities(p, tags);
}

namespace detail {

inline Matrix fock_view(const Vector& psi, Index nc, Index nk) {
  return Eigen::Map<const Matrix>(psi.data(), nc, nk);
}

// <psi| (A (x) B) |psi> with psi stored matter slow
inline cplx expect_kron(const Matrix& Psi, const Matrix& A, const Matrix& B) {
  return (Psi.adjoint() * B * Psi * A.transpose()).trace();
}

inline double photon_from_moments(double mu, double AdA, cplx A2) {
  return 0.5 * (mu + 1.0 / mu) * AdA + 0.25 * (1.0 / mu - mu) * 2.0 * A2.real() + 0.25 * (1.0 / mu + mu - 2.0);
}

}  // namespace detail

// n_alpha for a state written in the exact product basis of gauge alpha' (ctx_rep).
// a_alpha = a_alpha' + kappa phi with kappa = (alpha' - alpha)/sqrt(2 w L); phi^2 uses the full square.
inline double exact_photon_number(const MatterSpectrum& m, const GaugeContext& ctx_rep, double measured_alpha,
                                  const Vector& psi, Index fock_dim) {
  const Index nk = m.keep(), nc = fock_dim;
  if (psi.size() != nk * nc) throw Error(ErrorKind::Validation, "state size does not match the exact basis");
  const double mu = with_alpha(ctx_rep, measured_alpha).mu_alpha;
  const double kappa = std::sqrt(ctx_rep.inv_L / (2.0 * ctx_rep.omega)) * (ctx_rep.alpha - measured_alpha);
  Matrix Psi = detail::fock_view(psi, nc, nk);
  LadderPair lp = ladder(nc);
  Matrix Im = Matrix::Identity(nk, nk), Ic = Matrix::Identity(nc, nc);
  Matrix phi = m.phi.cast<cplx>(), phi2 = m.phi_sq.cast<cplx>();
  Matrix a2 = lower2_matrix(nc);
  double AdA = detail::expect_kron(Psi, Im, number_matrix(nc)).real() +
               kappa * detail::expect_kron(Psi, phi, lp.a + lp.adag).real() +
               kappa * kappa * detail::expect_kron(Psi, phi2, Ic).real();
  cplx A2 = detail::expect_kron(Psi, Im, a2) + 2.0 * kappa * detail::expect_kron(Psi, phi, lp.a) +
            kappa * kappa * detail::expect_kron(Psi, phi2, Ic);
  return detail::photon_from_moments(mu, AdA, A2);
}

// n_alpha for a two-level model state; a_alpha' = p c + q c† in the model's own mode.
inline double two_level_photon_number(const TwoLevelModel& model, const Vector& psi, double measured_alpha,
                                      PhotonType type = PhotonType::OperatorOfProjected) {
  const Index nc = model.fock_dim;
  if (psi.size() != 2 * nc) throw Error(ErrorKind::Validation, "state does not live on the model space");
  Matrix Phi2;
  if (type == PhotonType::ProjectedOperator) {
    if (model.phi_sq_block.rows() != 2)
      throw Error(ErrorKind::Validation, "projected operator square unavailable for this model");
    Phi2 = model.phi_sq_block;
  } else {
    Phi2 = model.phi_block * model.phi_block;
  }
  const GaugeContext& c = model.ctx;
  const double mu_p = model.trk ? 1.0 : c.mu_alpha;
  const double p = 0.5 * (std::sqrt(mu_p) + 1.0 / std::sqrt(mu_p));
  const double q = 0.5 * (std::sqrt(mu_p) - 1.0 / std::sqrt(mu_p));
  const double mu = with_alpha(c, measured_alpha).mu_alpha;
  const double kappa = std::sqrt(c.inv_L / (2.0 * c.omega)) * (c.alpha - measured_alpha);
  Matrix Psi = detail::fock_view(psi, nc, 2);
  LadderPair lp = ladder(nc);
  Matrix N = number_matrix(nc), Ic = Matrix::Identity(nc, nc), I2 = Matrix::Identity(2, 2);
  Matrix c2 = lower2_matrix(nc);
  Matrix Phi = model.phi_block;
  double AdA = (p * p * detail::expect_kron(Psi, I2, N) + q * q * detail::expect_kron(Psi, I2, N + Ic) +
                p * q * detail::expect_kron(Psi, I2, c2 + c2.adjoint()) +
                kappa * (p + q) * detail::expect_kron(Psi, Phi, lp.a + lp.adag) +
                kappa * kappa * detail::expect_kron(Psi, Phi2, Ic))
                   .real();
  cplx A2 = p * p * detail::expect_kron(Psi, I2, c2) + q * q * detail::expect_kron(Psi, I2, c2.adjoint()) +
            p * q * detail::expect_kron(Psi, I2, 2.0 * N + Ic) +
            2.0 * kappa * detail::expect_kron(Psi, Phi, p * lp.a + q * lp.adag) +
            kappa * kappa * detail::expect_kron(Psi, Phi2, Ic);
  return detail::photon_from_moments(mu, AdA, A2);
}

struct StateSpec {
  ModelTag model{ModelKind::Exact, 0.0};
  int level = 0;
  double representation_alpha = 1.0;  // exact states only
};

inline PhotonNumberRecord photon_number(const CircuitParams& p, const CircuitSetup& s, double measured_alpha,
                                        const StateSpec& st, PhotonType type = PhotonType::OperatorOfProjected) {
  PhotonNumberRecord r;
  r.measured_alpha = measured_alpha;
  r.state = st.model.name();
  r.type = type;
  if (st.model.kind == ModelKind::Exact) {
    CompositeSpectrum ex = exact_lowest(p, s, st.representation_alpha, st.level + 1);
    GaugeContext c = derive_gauge_context(p, s.reference, st.representation_alpha);
    r.value = exact_photon_number(s.matter, c, measured_alpha, ex.vectors.col(st.level), p.fock_dim);
  } else {
    TwoLevelModel m = model_for_tag(p, s, st.model);
    EigenSystem es = eig_lowest(m.hamiltonian, st.level + 1);
    r.value = two_level_photon_number(m, es.vectors.col(st.level), measured_alpha, type);
  }
  return r;
}

inline std::vector<HeatmapEntry> export_matrix_element_heatmaps(const MatterSpectrum& m, Index levels = 0) {
  if (levels <= 0 || levels > m.keep()) levels = m.keep();
  double max_phi = 0.0, max_eps = 0.0;
  for (Index i = 0; i < levels; ++i)
    for (Index j = 0; j < levels; ++j) {
      double ph = m.phi(i, j) * m.phi(i, j);
      double e = m.energies(i) - m.energies(j);
      max_phi = std::max(max_phi, ph);
      max_eps = std::max(max_eps, e * e * ph);
    }
  std::vector<HeatmapEntry> out;
  for (Index i = 0; i < levels; ++i)
    for (Index j = 0; j < levels; ++j) {
      double ph = m.phi(i, j) * m.phi(i, j);
      double e = m.energies(i) - m.energies(j);
      out.push_back({int(i), int(j), max_phi > 0 ? ph / max_phi : 0.0, max_eps > 0 ? e * e * ph / max_eps : 0.0});
    }
  return out;
}

// Dressed matter partition: the alpha^2 phi^2/2L self-energy is folded into E_l, so the qubit
// frequency itself depends on alpha. alpha_JC then solves alpha = w_m(alpha) / (w_m(alpha) + w_alpha).
struct DressedSetup {
  CircuitParams params;  // E_l carries the self-energy
  MatterSpectrum matter;
  GaugeContext ctx;
  AlphaJCSolution jc;
};

inline DressedSetup dressed_jc_setup(const CircuitParams& p, const MatterSpectrum& reference) {
  GaugeContext base = derive_gauge_context(p, reference, 1.0);
  auto dressed_matter = [&](double a) {
    CircuitParams q = dress_inductance(p, a * a * base.inv_L);
    q.flux_ext = std::numbers::pi;
    return build_fluxonium(q);
  };
  auto wm_of = [&](double a) { return dressed_matter(a).omega_m(); };
  auto wa_of = [&](double a) { return with_alpha(base, a).omega_alpha; };
  DressedSetup d;
  d.jc = solve_alpha_jc(wm_of, wa_of, 1.0 / (1.0 + p.delta));
  d.params = dress_inductance(p, d.jc.alpha_jc * d.jc.alpha_jc * base.inv_L);
  d.matter = build_fluxonium(d.params);
  d.ctx = with_alpha(base, d.jc.alpha_jc);
  return d;
}

inline FidelityRecord dressed_jc_fidelity(const CircuitParams& p) {
  CircuitSetup s = make_setup(p);
  DressedSetup d = dressed_jc_setup(p, s.reference);
  TwoLevelOptions o;
  o.include_self_energy = false;
  TwoLevelModel m = build_two_level(d.matter, d.ctx, p.fock_dim, o);
  m.tag = {ModelKind::JCGauge, d.ctx.alpha};
  ExactOptions eo;
  eo.include_self_energy = false;
  BasisDescriptor b{d.ctx.alpha, p.matter_keep, p.fock_dim};
  CompositeSpectrum ex = diagonalize_exact(build_exact(d.matter, d.ctx, p.fock_dim, eo), b, 2, true);
  return fidelity_record(ex, m);
}

}  // namespace gaugeqed
