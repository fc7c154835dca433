#pragma once

// Bare material systems: fluxonium and a 1D dipole in a potential.
// Units: hbar = 1, energies in ueV, phase variables with 2e = 1 (so e = 1/2).

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "operators.hpp"

namespace gaugeqed {

struct CircuitParams {
  double E_c = 3.3;   // ueV
  double E_J = 3.3;   // ueV
  double E_l = 0.33;  // ueV
  double flux_ext = std::numbers::pi;
  double delta = 5.0;  // omega / omega_m
  double eta = 1.0;    // g / omega
  int matter_basis_dim = 120;
  int matter_keep = 20;
  int fock_dim = 60;

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Validation, m); };
    if (!(E_c > 0.0) || !(E_l > 0.0) || !(E_J >= 0.0)) fail("energies must be positive (E_J may be 0)");
    if (!std::isfinite(flux_ext)) fail("flux_ext must be finite");
    if (!(delta > 0.0)) fail("delta must be > 0");
    if (!(eta >= 0.0) || !std::isfinite(eta)) fail("eta must be >= 0");
    if (matter_keep < 2) fail("matter_keep must be >= 2");
    if (matter_basis_dim < 4 * matter_keep) fail("matter_basis_dim must be >= 4*matter_keep");
    if (fock_dim < 4) fail("fock_dim must be >= 4");
  }
};

struct DipoleParams {
  enum class Potential { Polynomial, Tabulated };
  double mass = 1.0;
  Potential kind = Potential::Polynomial;
  std::vector<double> coeffs{0.0, 0.0, 0.5};  // V(x) = sum_k coeffs[k] x^k
  std::vector<double> grid_x, grid_v;          // tabulated on a uniform grid symmetric about 0
  int basis_dim = 120;
  int keep = 20;

  static DipoleParams harmonic(double mass, double stiffness) {
    DipoleParams p;
    p.mass = mass;
    p.coeffs = {0.0, 0.0, 0.5 * stiffness};
    return p;
  }
  static DipoleParams quartic(double mass, double c2, double c4) {
    DipoleParams p;
    p.mass = mass;
    p.coeffs = {0.0, 0.0, c2, 0.0, c4};
    return p;
  }

  void validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::Validation, m); };
    if (!(mass > 0.0)) fail("mass must be > 0");
    if (keep < 2) fail("keep must be >= 2");
    if (kind == Potential::Polynomial) {
      if (basis_dim < 4 * keep) fail("basis_dim must be >= 4*keep");
      size_t deg = coeffs.size();
      while (deg > 0 && coeffs[deg - 1] == 0.0) --deg;
      if (deg < 3 || (deg - 1) % 2 != 0 || coeffs[deg - 1] <= 0.0)
        fail("polynomial potential must have even degree >= 2 with positive leading coefficient");
    } else {
      if (grid_x.size() != grid_v.size() || grid_x.size() < 8) fail("tabulated grid too small");
      size_t n = grid_x.size();
      double dx = grid_x[1] - grid_x[0];
      if (!(dx > 0.0)) fail("grid must be increasing");
      for (size_t i = 0; i < n; ++i) {
        if (std::abs(grid_x[i] + grid_x[n - 1 - i]) > 1e-9 * std::abs(grid_x[n - 1]))
          fail("grid must be symmetric about 0");
        if (i > 0 && std::abs(grid_x[i] - grid_x[i - 1] - dx) > 1e-9 * dx) fail("grid must be uniform");
        if (!std::isfinite(grid_v[i])) fail("potential must be finite (bounded below)");
      }
      if (static_cast<int>(n) < keep) fail("grid has fewer points than requested levels");
    }
  }
};

// Kept block of a material system in its eigenbasis.
struct MatterSpectrum {
  RealVector energies;  // eps_n ascending
  RealMatrix phi;       // flux (or position) matrix elements
  Matrix xi;            // conjugate momentum, purely imaginary
  RealMatrix phi_sq;    // kept block of the full operator square
  double m_eff = 0.0;   // xi^2/(2 m_eff) kinetic term
  double flux_ext = std::numbers::pi;
  int basis_dim = 0;

  Index keep() const { return energies.size(); }
  double epsilon0() const { return energies(0); }
  double omega_m() const { return energies(1) - energies(0); }
  double varphi() const { return phi(0, 1); }
};

namespace detail {

// phi_{n-1,n} >= 0 for n >= 1; first vector has its largest component positive
inline void fix_matter_signs(RealMatrix& V, const RealMatrix& phi_basis) {
  Index idx;
  V.col(0).cwiseAbs().maxCoeff(&idx);
  if (V(idx, 0) < 0) V.col(0) *= -1.0;
  for (Index n = 1; n < V.cols(); ++n) {
    double p = V.col(n - 1).dot(phi_basis * V.col(n));
    if (p < 0) V.col(n) *= -1.0;
  }
}

inline MatterSpectrum assemble_spectrum(const RealMatrix& H, const RealMatrix& x, const RealMatrix& x2,
                                        const Matrix& p, int keep, double m_eff) {
  RealMatrix a = H;
  EigenSystem es = solve_real(a, keep, true);
  RealMatrix V = es.vectors.real();
  fix_matter_signs(V, x);
  MatterSpectrum s;
  s.energies = es.values;
  s.phi = V.transpose() * x * V;
  s.phi_sq = V.transpose() * x2 * V;
  s.xi = V.cast<cplx>().transpose() * p * V.cast<cplx>();
  s.phi = 0.5 * (s.phi + s.phi.transpose()).eval();
  s.phi_sq = 0.5 * (s.phi_sq + s.phi_sq.transpose()).eval();
  s.xi = 0.5 * (s.xi + s.xi.adjoint()).eval();
  s.m_eff = m_eff;
  s.basis_dim = static_cast<int>(H.rows());
  return s;
}

// Normalized displacement elements g_n^{(k)} = sqrt(n!/(n+k)!) lam^k e^{-lam^2/2} L_n^{(k)}(lam^2)
// filled by the three-term Laguerre recurrence in n at fixed k.
inline RealMatrix laguerre_displacement(Index dim, double lam) {
  RealMatrix g = RealMatrix::Zero(dim, dim);  // g(n, k)
  const double x = lam * lam;
  for (Index k = 0; k < dim; ++k) {
    double g0 = std::exp(double(k) * std::log(lam) - 0.5 * x - 0.5 * std::lgamma(double(k) + 1.0));
    if (lam == 0.0) g0 = (k == 0) ? 1.0 : 0.0;
    Index nmax = dim - k;
    g(0, k) = g0;
    if (nmax > 1) g(1, k) = g0 * (1.0 + double(k) - x) / std::sqrt(1.0 + double(k));
    for (Index n = 1; n + 1 < nmax; ++n) {
      double dn = double(n), dk = double(k);
      g(n + 1, k) = ((2.0 * dn + 1.0 + dk - x) * g(n, k) - std::sqrt(dn * (dn + dk)) * g(n - 1, k)) /
                    std::sqrt((dn + 1.0) * (dn + 1.0 + dk));
    }
  }
  return g;
}

// cos and sin of lam*(b+b†) from <m|e^{i lam (b+b†)}|n> = i^{|m-n|} g_{min}^{(|m-n|)}
inline void cos_sin_displacement(Index dim, double lam, RealMatrix& C, RealMatrix& S) {
  RealMatrix g = laguerre_displacement(dim, lam);
  C = RealMatrix::Zero(dim, dim);
  S = RealMatrix::Zero(dim, dim);
  for (Index m = 0; m < dim; ++m)
    for (Index n = 0; n < dim; ++n) {
      Index k = std::abs(m - n), lo = std::min(m, n);
      double v = g(lo, k);
      if (k % 2 == 0)
        C(m, n) = ((k / 2) % 2 == 0) ? v : -v;
      else
        S(m, n) = (((k - 1) / 2) % 2 == 0) ? v : -v;
    }
}

inline RealMatrix ho_position(Index dim, double zpf) {
  RealMatrix x = RealMatrix::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) x(n - 1, n) = x(n, n - 1) = zpf * std::sqrt(double(n));
  return x;
}

// (b+b†)^2 without truncation artefacts
inline RealMatrix ho_position_sq(Index dim, double zpf) {
  RealMatrix x2 = RealMatrix::Zero(dim, dim);
  for (Index n = 0; n < dim; ++n) {
    x2(n, n) = zpf * zpf * (2.0 * double(n) + 1.0);
    if (n + 2 < dim) x2(n, n + 2) = x2(n + 2, n) = zpf * zpf * std::sqrt(double(n + 1) * double(n + 2));
  }
  return x2;
}

// i * pzpf * (b† - b)
inline Matrix ho_momentum(Index dim, double pzpf) {
  Matrix p = Matrix::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) {
    p(n, n - 1) = I_ * pzpf * std::sqrt(double(n));
    p(n - 1, n) = -I_ * pzpf * std::sqrt(double(n));
  }
  return p;
}

inline MatterSpectrum fluxonium_at(const CircuitParams& p, int nm) {
  const double wp = std::sqrt(8.0 * p.E_c * p.E_l);
  const double phi_zpf = std::pow(2.0 * p.E_c / p.E_l, 0.25);
  const double n_zpf = 0.5 / phi_zpf;
  RealMatrix C, S;
  cos_sin_displacement(nm, phi_zpf, C, S);
  RealMatrix H = -p.E_J * (std::cos(p.flux_ext) * C + std::sin(p.flux_ext) * S);
  for (Index n = 0; n < nm; ++n) H(n, n) += wp * (double(n) + 0.5);
  MatterSpectrum s = assemble_spectrum(H, ho_position(nm, phi_zpf), ho_position_sq(nm, phi_zpf),
                                       ho_momentum(nm, n_zpf), p.matter_keep, 1.0 / (8.0 * p.E_c));
  s.flux_ext = p.flux_ext;
  return s;
}

inline double poly_reference_frequency(const DipoleParams& d) {
  double c2 = d.coeffs.size() > 2 ? d.coeffs[2] : 0.0;
  double c4 = d.coeffs.size() > 4 ? d.coeffs[4] : 0.0;
  double w = std::sqrt(2.0 * std::abs(c2) / d.mass);
  if (c4 > 0.0) w = std::max(w, std::cbrt(6.0 * c4 / (d.mass * d.mass)));
  return w > 0.0 ? w : 1.0;
}

inline MatterSpectrum dipole_poly_at(const DipoleParams& d, int nb) {
  const double W = poly_reference_frequency(d);
  const double xz = 1.0 / std::sqrt(2.0 * d.mass * W);
  const double pz = std::sqrt(d.mass * W / 2.0);
  const Index deg = static_cast<Index>(d.coeffs.size());
  const Index big = nb + deg + 2;
  RealMatrix xb = ho_position(big, xz);
  RealMatrix V = RealMatrix::Zero(big, big), xk = RealMatrix::Identity(big, big);
  for (Index k = 0; k < deg; ++k) {
    if (d.coeffs[k] != 0.0) V += d.coeffs[k] * xk;
    xk = (xk * xb).eval();
  }
  Matrix pb = ho_momentum(big, pz);
  RealMatrix T = (pb * pb).real() / (2.0 * d.mass);
  RealMatrix H = (T + V).topLeftCorner(nb, nb);
  return assemble_spectrum(H, ho_position(nb, xz), ho_position_sq(nb, xz), ho_momentum(nb, pz), d.keep,
                           d.mass);
}

// sinc-DVR kinetic matrix for -(1/2m) d^2/dx^2
inline RealMatrix dvr_kinetic(Index n, double dx, double inv2m) {
  RealMatrix T(n, n);
  const double pref = inv2m / (dx * dx);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      if (i == j)
        T(i, j) = pref * std::numbers::pi * std::numbers::pi / 3.0;
      else {
        double d = double(i - j);
        T(i, j) = pref * (((i - j) % 2 == 0) ? 2.0 : -2.0) / (d * d);
      }
    }
  return T;
}

}  // namespace detail

inline MatterSpectrum build_fluxonium(const CircuitParams& p) {
  p.validate();
  MatterSpectrum s = detail::fluxonium_at(p, p.matter_basis_dim);
  MatterSpectrum s2 = detail::fluxonium_at(p, 2 * p.matter_basis_dim);
  const Index top = p.matter_keep - 1;
  double a = s.energies(top), b = s2.energies(top);
  if (std::abs(a - b) > 1e-8 * std::max(std::abs(b), 1e-300))
    throw ConvergenceError("fluxonium level " + std::to_string(top) +
                               " not converged when the oscillator basis doubles",
                           {a, b});
  return s;
}

// Phase-grid (sinc-DVR) cross-check of the fluxonium levels; energies only.
inline RealVector fluxonium_grid_levels(const CircuitParams& p, int levels, int points = 801,
                                        double half_width = 0.0) {
  p.validate();
  if (half_width <= 0.0) half_width = 6.0 * std::pow(2.0 * p.E_c / p.E_l, 0.25) * std::sqrt(double(levels) + 4.0);
  const double dx = 2.0 * half_width / double(points - 1);
  RealMatrix H = detail::dvr_kinetic(points, dx, 4.0 * p.E_c);
  for (int i = 0; i < points; ++i) {
    double x = -half_width + dx * i;
    H(i, i) += 0.5 * p.E_l * x * x - p.E_J * std::cos(x - p.flux_ext);
  }
  return detail::solve_real(H, levels, false).values;
}

inline MatterSpectrum build_dipole(const DipoleParams& d) {
  d.validate();
  if (d.kind == DipoleParams::Potential::Polynomial) {
    MatterSpectrum s = detail::dipole_poly_at(d, d.basis_dim);
    MatterSpectrum s2 = detail::dipole_poly_at(d, 2 * d.basis_dim);
    const Index top = d.keep - 1;
    double a = s.energies(top), b = s2.energies(top);
    if (std::abs(a - b) > 1e-8 * std::max(std::abs(b), 1e-300))
      throw ConvergenceError("dipole level " + std::to_string(top) + " not converged", {a, b});
    return s;
  }
  // tabulated potential: the grid itself is the basis
  const Index n = static_cast<Index>(d.grid_x.size());
  const double dx = d.grid_x[1] - d.grid_x[0];
  RealMatrix H = detail::dvr_kinetic(n, dx, 0.5 / d.mass);
  RealMatrix x = RealMatrix::Zero(n, n), x2 = RealMatrix::Zero(n, n);
  Matrix pm = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    H(i, i) += d.grid_v[i];
    x(i, i) = d.grid_x[i];
    x2(i, i) = d.grid_x[i] * d.grid_x[i];
    for (Index j = 0; j < n; ++j)
      if (i != j) pm(i, j) = -I_ * ((((i - j) % 2) == 0) ? 1.0 : -1.0) / (dx * double(i - j));
  }
  return detail::assemble_spectrum(H, x, x2, pm, d.keep, d.mass);
}

// sum_r (eps_r - eps_s) |phi_rs|^2 over the first `levels` kept states
inline double trk_sum(const MatterSpectrum& m, Index s, Index levels) {
  double acc = 0.0;
  for (Index r = 0; r < std::min(levels, m.keep()); ++r)
    acc += (m.energies(r) - m.energies(s)) * m.phi(r, s) * m.phi(r, s);
  return acc;
}

// max |xi_nm - i m eps_nm phi_nm| / max|xi| over the kept block
inline double momentum_identity_residual(const MatterSpectrum& m, Index block) {
  block = std::min(block, m.keep());
  double worst = 0.0, scale = 0.0;
  for (Index i = 0; i < block; ++i)
    for (Index j = 0; j < block; ++j) {
      cplx pred = I_ * m.m_eff * (m.energies(i) - m.energies(j)) * m.phi(i, j);
      worst = std::max(worst, std::abs(m.xi(i, j) - pred));
      scale = std::max(scale, std::abs(m.xi(i, j)));
    }
  return scale > 0 ? worst / scale : worst;
}

}  // namespace gaugeqed
