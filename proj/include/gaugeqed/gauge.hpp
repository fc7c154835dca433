#pragma once

// Exact alpha-gauge light-matter Hamiltonian in the (matter eigenbasis x bare Fock) basis.
// The circuit and the single-mode cavity share one structure once the cavity is mapped as
// phi -> x, m_eff -> m, 1/L -> e^2/v, C -> e^2/(v w^2).

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matter.hpp"
#include "operators.hpp"

namespace gaugeqed {

enum class Instantiation { Circuit, Cavity };

struct GaugeContext {
  Instantiation kind = Instantiation::Circuit;
  double alpha = 1.0;
  double omega = 0.0;        // bare oscillator
  double omega_alpha = 0.0;  // renormalized
  double mu_alpha = 1.0;
  double inv_L = 0.0;  // stored instead of L so that eta = 0 stays finite
  double C = 0.0;
  double m_eff = 0.0;
  double omega_m = 0.0;  // reference qubit splitting
  double varphi = 0.0;   // reference <1|phi|0>
  double epsilon0 = 0.0;
  double u_plus = 0.0;
  double u_minus = 0.0;
  double delta_alpha = 0.0;
  double r_alpha = 0.0;

  double L() const { return inv_L > 0.0 ? 1.0 / inv_L : std::numeric_limits<double>::infinity(); }
  double g() const { return varphi * std::sqrt(omega * inv_L / 2.0); }
  double eta() const { return g() / omega; }
  double delta() const { return omega / omega_m; }
  // (1/L) * theta_zpf of the bare mode
  double flux_coupling() const { return std::sqrt(inv_L * omega / 2.0); }
  double zeta_zpf() const { return std::sqrt(C * omega / 2.0); }
};

struct CavityParams {
  double omega = 1.0;
  double volume = 1.0;
  double charge = 1.0;
};

namespace detail {

inline GaugeContext finish_context(GaugeContext c) {
  c.mu_alpha = std::sqrt(1.0 + c.C * (1.0 - c.alpha) * (1.0 - c.alpha) / c.m_eff);
  c.omega_alpha = c.omega * c.mu_alpha;
  c.r_alpha = 0.5 * std::log(c.mu_alpha);
  const double s = std::sqrt(c.inv_L / (2.0 * c.omega_alpha));
  c.u_plus = c.varphi * (c.alpha * c.omega_alpha - (1.0 - c.alpha) * c.omega_m) * s;
  c.u_minus = c.varphi * (c.alpha * c.omega_alpha + (1.0 - c.alpha) * c.omega_m) * s;
  c.delta_alpha = c.epsilon0 + c.alpha * c.alpha * c.varphi * c.varphi * c.inv_L / 2.0;
  return c;
}

}  // namespace detail

// `reference` must be the spectrum at maximal frustration; it fixes omega_m and varphi.
inline GaugeContext derive_gauge_context(const CircuitParams& p, const MatterSpectrum& reference,
                                         double alpha) {
  GaugeContext c;
  c.kind = Instantiation::Circuit;
  c.alpha = alpha;
  c.omega_m = reference.omega_m();
  c.varphi = reference.varphi();
  c.epsilon0 = reference.epsilon0();
  c.m_eff = reference.m_eff;
  c.omega = p.delta * c.omega_m;
  c.inv_L = 2.0 * c.omega * p.eta * p.eta / (c.varphi * c.varphi);
  c.C = c.inv_L / (c.omega * c.omega);
  return detail::finish_context(c);
}

inline GaugeContext derive_cavity_context(const CavityParams& cav, const MatterSpectrum& dipole,
                                          double alpha) {
  if (!(cav.omega > 0.0) || !(cav.volume > 0.0))
    throw Error(ErrorKind::Validation, "cavity frequency and volume must be positive");
  GaugeContext c;
  c.kind = Instantiation::Cavity;
  c.alpha = alpha;
  c.omega_m = dipole.omega_m();
  c.varphi = dipole.varphi();
  c.epsilon0 = dipole.epsilon0();
  c.m_eff = dipole.m_eff;
  c.omega = cav.omega;
  c.inv_L = cav.charge * cav.charge / cav.volume;
  c.C = c.inv_L / (cav.omega * cav.omega);
  return detail::finish_context(c);
}

inline GaugeContext with_alpha(const GaugeContext& c, double alpha) {
  GaugeContext o = c;
  o.alpha = alpha;
  return detail::finish_context(o);
}

// E_l absorbs the alpha^2 phi^2 / 2L self-energy (used for the dressed matter partition)
inline CircuitParams dress_inductance(const CircuitParams& p, double extra_inv_L) {
  CircuitParams q = p;
  q.E_l = p.E_l + extra_inv_L;
  return q;
}

struct BasisDescriptor {
  double alpha = 1.0;
  Index n_keep = 0;
  Index n_fock = 0;
  std::string ordering = "matter-slow,fock-fast";
  Index dim() const { return n_keep * n_fock; }
  Index index(Index n, Index k) const { return n * n_fock + k; }
};

struct CompositeSpectrum {
  BasisDescriptor basis;
  RealVector values;
  Matrix vectors;  // may hold only the lowest few columns
};

struct ExactOptions {
  bool include_self_energy = true;  // the alpha^2 phi^2/2L block
};

// H = eps (x) I + I (x) w(a†a+1/2) + ((1-a)/m) xi (x) zeta + ((1-a)^2/2m) I (x) zeta^2
//     + a (1/L) phi (x) theta + (a^2/2L) phi^2 (x) I
inline HermitianOp build_exact(const MatterSpectrum& m, const GaugeContext& c, int fock_dim,
                               ExactOptions opt = {}) {
  if (fock_dim < 2) throw Error(ErrorKind::InvalidDimension, "fock_dim must be >= 2");
  if (m.phi.rows() != m.keep() || m.xi.rows() != m.keep() || m.phi_sq.rows() != m.keep())
    throw Error(ErrorKind::Validation, "matter matrix elements do not match the kept block");
  const Index nk = m.keep(), nc = fock_dim, dim = nk * nc;
  const double a = c.alpha;
  const double zz = c.zeta_zpf();

  Matrix X = Matrix::Zero(nc, nc);  // a + a†
  Matrix Z = Matrix::Zero(nc, nc);  // zeta = i zz (a† - a)
  for (Index k = 1; k < nc; ++k) {
    double s = std::sqrt(double(k));
    X(k - 1, k) = X(k, k - 1) = s;
    Z(k, k - 1) = I_ * zz * s;
    Z(k - 1, k) = -I_ * zz * s;
  }
  Matrix Z2 = Matrix::Zero(nc, nc);  // zz^2 (2a†a + 1 - a^2 - a†^2)
  for (Index k = 0; k < nc; ++k) {
    Z2(k, k) = zz * zz * (2.0 * double(k) + 1.0);
    if (k + 2 < nc) Z2(k, k + 2) = Z2(k + 2, k) = -zz * zz * std::sqrt(double(k + 1) * double(k + 2));
  }

  const double cxi = (1.0 - a) / m.m_eff;
  const double cz2 = (1.0 - a) * (1.0 - a) / (2.0 * m.m_eff);
  const double cth = a * c.flux_coupling();
  const double csq = opt.include_self_energy ? a * a * c.inv_L / 2.0 : 0.0;

  Matrix H = Matrix::Zero(dim, dim);
  for (Index n = 0; n < nk; ++n) {
    for (Index l = 0; l < nk; ++l) {
      auto blk = H.block(n * nc, l * nc, nc, nc);
      if (cxi != 0.0 && m.xi(n, l) != 0.0) blk += (cxi * m.xi(n, l)) * Z;
      if (cth != 0.0 && m.phi(n, l) != 0.0) blk += (cth * m.phi(n, l)) * X;
      if (csq != 0.0) blk.diagonal().array() += csq * m.phi_sq(n, l);
      if (n == l) {
        if (cz2 != 0.0) blk += cz2 * Z2;
        for (Index k = 0; k < nc; ++k) blk(k, k) += m.energies(n) + c.omega * (double(k) + 0.5);
      }
    }
  }
  return HermitianOp(std::move(H), 1e-10);
}

inline HermitianOp build_exact_circuit(const CircuitParams& p, const MatterSpectrum& m,
                                       const GaugeContext& c) {
  if (c.kind != Instantiation::Circuit)
    throw Error(ErrorKind::Validation, "context was not derived for the circuit");
  if (m.keep() != p.matter_keep)
    throw Error(ErrorKind::Validation, "matter spectrum size differs from matter_keep");
  return build_exact(m, c, p.fock_dim);
}

inline HermitianOp build_exact_cavity(const MatterSpectrum& dipole, const GaugeContext& c, int fock_dim) {
  if (c.kind != Instantiation::Cavity)
    throw Error(ErrorKind::Validation, "context was not derived for the cavity");
  return build_exact(dipole, c, fock_dim);
}

inline CompositeSpectrum diagonalize_exact(const HermitianOp& H, const BasisDescriptor& b, Index k = 0,
                                           bool want_vectors = true) {
  if (H.dim() != b.dim()) throw Error(ErrorKind::Validation, "basis descriptor does not match operator");
  CompositeSpectrum cs;
  cs.basis = b;
  EigenSystem es = detail::solve(H, k, want_vectors);
  cs.values = es.values;
  cs.vectors = std::move(es.vectors);
  return cs;
}

// matter at `p.flux_ext` plus the reference spectrum at maximal frustration
struct CircuitSetup {
  MatterSpectrum matter;
  MatterSpectrum reference;
};

inline CircuitSetup make_setup(const CircuitParams& p) {
  CircuitSetup s;
  s.matter = build_fluxonium(p);
  if (std::abs(p.flux_ext - std::numbers::pi) < 1e-15) {
    s.reference = s.matter;
  } else {
    CircuitParams q = p;
    q.flux_ext = std::numbers::pi;
    s.reference = build_fluxonium(q);
  }
  return s;
}

inline RealVector exact_levels(const CircuitParams& p, const CircuitSetup& s, double alpha, Index k) {
  GaugeContext c = derive_gauge_context(p, s.reference, alpha);
  HermitianOp H = build_exact_circuit(p, s.matter, c);
  return eigvals_lowest(H, k);
}

struct GaugeInvarianceReport {
  std::vector<double> alphas;
  std::vector<RealVector> spectra;
  std::vector<double> spread;  // relative spread per level
  double max_spread = 0.0;
  double tolerance = 1e-6;
  bool pass = false;
};

inline GaugeInvarianceReport verify_gauge_invariance(const CircuitParams& p, const std::vector<double>& alphas,
                                                     Index levels = 10, double tol = 1e-6) {
  if (alphas.size() < 2) throw Error(ErrorKind::Validation, "need at least two gauges");
  CircuitSetup s = make_setup(p);
  levels = std::min<Index>(levels, Index(p.matter_keep) * p.fock_dim);
  GaugeInvarianceReport r;
  r.alphas = alphas;
  r.tolerance = tol;
  for (double a : alphas) r.spectra.push_back(exact_levels(p, s, a, levels));
  r.spread.assign(levels, 0.0);
  for (Index n = 0; n < levels; ++n) {
    double lo = r.spectra[0](n), hi = lo, scale = 0.0;
    for (const auto& sp : r.spectra) {
      lo = std::min(lo, sp(n));
      hi = std::max(hi, sp(n));
      scale = std::max(scale, std::abs(sp(n)));
    }
    r.spread[n] = scale > 0.0 ? (hi - lo) / scale : 0.0;
    r.max_spread = std::max(r.max_spread, r.spread[n]);
  }
  r.pass = r.max_spread < tol;
  return r;
}

// R = exp(i a zeta phi) on the kept matter block x truncated Fock space
inline Matrix gauge_unitary(const MatterSpectrum& m, const GaugeContext& c, int fock_dim) {
  const double zz = c.zeta_zpf();
  Matrix Z = Matrix::Zero(fock_dim, fock_dim);
  for (Index k = 1; k < fock_dim; ++k) {
    Z(k, k - 1) = I_ * zz * std::sqrt(double(k));
    Z(k - 1, k) = -I_ * zz * std::sqrt(double(k));
  }
  Matrix K = I_ * c.alpha * kron(m.phi.cast<cplx>(), Z);
  return expm_antihermitian(K, 1e-10);
}

// Two coupled harmonic oscillators (E_J = 0), normal modes from the charge-gauge quadratic form:
// kinetic (xi, zeta) -> [[1/m, 1/m], [1/m, 1/m + 1/C]], potential (phi, theta) -> diag(E_l, 1/L).
inline std::pair<double, double> normal_mode_frequencies(double m_eff, double E_l, double C, double inv_L) {
  Eigen::Matrix2d T, V;
  T << 1.0 / m_eff, 1.0 / m_eff, 1.0 / m_eff, 1.0 / m_eff + 1.0 / C;
  V << E_l, 0.0, 0.0, inv_L;
  Eigen::EigenSolver<Eigen::Matrix2d> es(T * V);
  double w1 = std::sqrt(es.eigenvalues()(0).real()), w2 = std::sqrt(es.eigenvalues()(1).real());
  return {std::min(w1, w2), std::max(w1, w2)};
}

}  // namespace gaugeqed
