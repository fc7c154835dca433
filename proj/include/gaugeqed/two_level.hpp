#pragma once

// Two-level truncations of the alpha-gauge Hamiltonian.
// Basis: qubit {|eps0>, |eps1>} slow, renormalized mode c_alpha Fock fast.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gauge.hpp"
#include "operators.hpp"

namespace gaugeqed {

enum class ModelKind { Exact, GeneralAlpha, QRMFlux, QRMCharge, JCGauge, RWA, Type2, TRK };

struct ModelTag {
  ModelKind kind = ModelKind::GeneralAlpha;
  double alpha = 0.0;  // used by GeneralAlpha, RWA, Type2, TRK

  std::string name() const {
    auto num = [](double a) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%g", a);
      return std::string(buf);
    };
    switch (kind) {
      case ModelKind::Exact: return "exact";
      case ModelKind::GeneralAlpha: return "alpha(" + num(alpha) + ")";
      case ModelKind::QRMFlux: return "qrm_flux";
      case ModelKind::QRMCharge: return "qrm_charge";
      case ModelKind::JCGauge: return "jc";
      case ModelKind::RWA: return "rwa(" + num(alpha) + ")";
      case ModelKind::Type2: return "type2(" + num(alpha) + ")";
      case ModelKind::TRK: return "trk(" + num(alpha) + ")";
    }
    return "?";
  }
  bool operator==(const ModelTag&) const = default;
};

inline ModelTag parse_model_tag(const std::string& s) {
  auto arg = [&](const std::string& head) -> double {
    size_t close = s.find(')');
    if (s.rfind(head + "(", 0) != 0 || close == std::string::npos || close != s.size() - 1)
      throw Error(ErrorKind::Config, "bad model tag '" + s + "'");
    try {
      return std::stod(s.substr(head.size() + 1, close - head.size() - 1));
    } catch (const std::exception&) {
      throw Error(ErrorKind::Config, "bad model tag '" + s + "'");
    }
  };
  if (s == "exact") return {ModelKind::Exact, 0.0};
  if (s == "qrm_flux") return {ModelKind::QRMFlux, 1.0};
  if (s == "qrm_charge") return {ModelKind::QRMCharge, 0.0};
  if (s == "jc") return {ModelKind::JCGauge, 0.0};
  if (s.rfind("alpha(", 0) == 0) return {ModelKind::GeneralAlpha, arg("alpha")};
  if (s.rfind("rwa(", 0) == 0) return {ModelKind::RWA, arg("rwa")};
  if (s.rfind("type2(", 0) == 0) return {ModelKind::Type2, arg("type2")};
  if (s.rfind("trk(", 0) == 0) return {ModelKind::TRK, arg("trk")};
  throw Error(ErrorKind::Config, "unknown model tag '" + s + "'");
}

enum class SquareConvention {
  ProjectedSquare,  // (P phi P)^2, type 1
  FullSquare        // P phi^2 P, type 2
};

struct TwoLevelOptions {
  SquareConvention square = SquareConvention::ProjectedSquare;
  bool include_diagonal_flux = true;
  bool include_self_energy = true;  // false when E_l already carries alpha^2/L
};

struct TwoLevelModel {
  GaugeContext ctx;
  ModelTag tag;
  HermitianOp hamiltonian;
  int fock_dim = 0;
  bool rwa = false;
  bool trk = false;
  SquareConvention square = SquareConvention::ProjectedSquare;
  bool include_self_energy = true;

  // qubit data taken from the matter spectrum at the working flux
  double epsilon0 = 0.0;
  double omega_m = 0.0;
  double phi00 = 0.0, phi11 = 0.0, phi01 = 0.0;
  Matrix phi_block;     // P phi P
  Matrix phi_sq_block;  // P phi^2 P, empty when unavailable

  // coefficients actually used in the Hamiltonian
  double u_plus = 0.0, u_minus = 0.0;
  double diag0 = 0.0, diag1 = 0.0;  // P0, P1 couplings to (c + c†)
  Matrix self_block;                // 2x2 alpha^2/2L block

  Matrix square_block() const {
    return square == SquareConvention::FullSquare ? phi_sq_block : Matrix(phi_block * phi_block);
  }
};

struct AlphaJCSolution {
  double alpha_jc = 0.0;
  double omega_jc = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool used_bisection = false;
};

namespace detail {

inline Matrix fock_lower(Index n) { return ladder(n).a; }

inline void assemble_two_level(TwoLevelModel& m) {
  const Index nc = m.fock_dim;
  const double w = m.ctx.omega_alpha;
  Matrix c = fock_lower(nc), cd = c.adjoint();
  Matrix Ic = Matrix::Identity(nc, nc);
  Matrix N = number_matrix(nc);
  Matrix sp = sigma_plus(), sm = sigma_minus();
  Matrix H = kron(Matrix::Identity(2, 2), m.epsilon0 * Ic + w * (N + 0.5 * Ic));
  H += kron(m.omega_m * proj_excited(), Ic);
  H += m.u_minus * (kron(sp, c) + kron(sm, cd));
  H += m.u_plus * (kron(sp, cd) + kron(sm, c));
  H += kron(m.diag0 * proj_ground() + m.diag1 * proj_excited(), c + cd);
  H += kron(m.self_block, Ic);
  m.hamiltonian = HermitianOp(std::move(H), 1e-10);
}

}  // namespace detail

inline TwoLevelModel build_two_level(const MatterSpectrum& matter, const GaugeContext& ctx, int fock_dim,
                                     TwoLevelOptions opt = {}) {
  if (matter.keep() < 2) throw Error(ErrorKind::Validation, "two-level model needs two matter levels");
  if (fock_dim < 2) throw Error(ErrorKind::InvalidDimension, "fock_dim must be >= 2");
  if (opt.square == SquareConvention::FullSquare && matter.phi_sq.rows() < 2)
    throw Error(ErrorKind::Validation, "full-square convention needs the operator square on the same basis");
  TwoLevelModel m;
  m.ctx = ctx;
  m.fock_dim = fock_dim;
  m.square = opt.square;
  m.include_self_energy = opt.include_self_energy;
  const double a = ctx.alpha;
  if (opt.square == SquareConvention::FullSquare)
    m.tag = {ModelKind::Type2, a};
  else if (a == 1.0)
    m.tag = {ModelKind::QRMFlux, 1.0};
  else if (a == 0.0)
    m.tag = {ModelKind::QRMCharge, 0.0};
  else
    m.tag = {ModelKind::GeneralAlpha, a};

  m.epsilon0 = matter.energies(0);
  m.omega_m = matter.energies(1) - matter.energies(0);
  m.phi00 = matter.phi(0, 0);
  m.phi11 = matter.phi(1, 1);
  m.phi01 = matter.phi(0, 1);
  m.phi_block = matter.phi.topLeftCorner(2, 2).cast<cplx>();
  if (matter.phi_sq.rows() >= 2) m.phi_sq_block = matter.phi_sq.topLeftCorner(2, 2).cast<cplx>();

  const double s = std::sqrt(ctx.inv_L / (2.0 * ctx.omega_alpha));
  const double v = m.phi01;
  m.u_minus = v * s * (a * ctx.omega_alpha + (1.0 - a) * m.omega_m);
  m.u_plus = v * s * (a * ctx.omega_alpha - (1.0 - a) * m.omega_m);
  if (opt.include_diagonal_flux) {
    m.diag0 = a * ctx.omega_alpha * s * m.phi00;
    m.diag1 = a * ctx.omega_alpha * s * m.phi11;
  }
  m.self_block = Matrix::Zero(2, 2);
  if (opt.include_self_energy) m.self_block = (a * a * ctx.inv_L / 2.0) * m.square_block();
  detail::assemble_two_level(m);
  return m;
}

// Same model by numeric projection: operators built in a padded Fock space, assembled, truncated.
inline HermitianOp project_two_level(const MatterSpectrum& matter, const GaugeContext& ctx, int fock_dim,
                                     TwoLevelOptions opt = {}) {
  if (!(ctx.inv_L > 0.0)) throw Error(ErrorKind::Validation, "projection path needs a finite inductance");
  const Index nc = fock_dim, big = fock_dim + 4;
  const double a = ctx.alpha;
  const double mu = ctx.mu_alpha;
  const double zeta_zpf = std::sqrt(ctx.inv_L / (2.0 * ctx.omega_alpha));
  const double theta_zpf = std::sqrt(mu * ctx.omega / (2.0 * ctx.inv_L));
  LadderPair lp = ladder(big);
  Matrix zeta = I_ * zeta_zpf * (lp.adag - lp.a);
  Matrix theta = theta_zpf * (lp.a + lp.adag);
  Matrix Hc = (zeta * zeta) / (2.0 * ctx.C) + ctx.inv_L * (theta * theta) / 2.0 +
              (1.0 - a) * (1.0 - a) / (2.0 * ctx.m_eff) * (zeta * zeta);
  Matrix Hc_t = Hc.topLeftCorner(nc, nc), zeta_t = zeta.topLeftCorner(nc, nc),
         theta_t = theta.topLeftCorner(nc, nc);

  Matrix Hm = Matrix::Zero(2, 2);
  Hm(0, 0) = matter.energies(0);
  Hm(1, 1) = matter.energies(1);
  Matrix Xi = matter.xi.topLeftCorner(2, 2);
  Matrix Phi = matter.phi.topLeftCorner(2, 2).cast<cplx>();
  if (!opt.include_diagonal_flux) Phi.diagonal().setZero();
  Matrix Sq = opt.square == SquareConvention::FullSquare ? Matrix(matter.phi_sq.topLeftCorner(2, 2).cast<cplx>())
                                                          : Matrix(Phi * Phi);
  if (opt.square == SquareConvention::ProjectedSquare && !opt.include_diagonal_flux) {
    Matrix full = matter.phi.topLeftCorner(2, 2).cast<cplx>();
    Sq = full * full;
  }
  Matrix Ic = Matrix::Identity(nc, nc);
  Matrix H = kron(Hm, Ic) + kron(Matrix::Identity(2, 2), Hc_t);
  H += ((1.0 - a) / ctx.m_eff) * kron(Xi, zeta_t);
  H += a * ctx.inv_L * kron(Phi, theta_t);
  if (opt.include_self_energy) H += (a * a * ctx.inv_L / 2.0) * kron(Sq, Ic);
  return HermitianOp(std::move(H), 1e-9);
}

inline TwoLevelModel apply_rwa(const TwoLevelModel& in) {
  if (in.trk) throw Error(ErrorKind::Validation, "rotating-wave reduction needs the u+/u- coupling form");
  TwoLevelModel m = in;
  m.u_plus = 0.0;
  m.rwa = true;
  m.tag = {ModelKind::RWA, in.ctx.alpha};
  detail::assemble_two_level(m);
  return m;
}

inline TwoLevelModel build_type2(const MatterSpectrum& matter, const GaugeContext& ctx, int fock_dim) {
  TwoLevelOptions o;
  o.square = SquareConvention::FullSquare;
  return build_two_level(matter, ctx, fock_dim, o);
}

// Fixed point alpha <- w_m / (w_m + w_alpha) for arbitrary alpha-dependence of both frequencies.
inline AlphaJCSolution solve_alpha_jc(const std::function<double(double)>& omega_m_of,
                                      const std::function<double(double)>& omega_alpha_of, double seed,
                                      int max_iterations = 200) {
  auto map = [&](double a) { return omega_m_of(a) / (omega_m_of(a) + omega_alpha_of(a)); };
  auto resid = [&](double a) { return a * (omega_m_of(a) + omega_alpha_of(a)) - omega_m_of(a); };
  if (!(resid(0.0) < 0.0 && resid(1.0) > 0.0))
    throw Error(ErrorKind::Validation, "JC gauge fixed point is not bracketed in (0,1)");
  std::vector<double> trace{seed};
  AlphaJCSolution sol;
  double a = seed, prev_step = 0.0;
  int sign_flips = 0;
  for (int it = 1; it <= max_iterations; ++it) {
    double next = map(a);
    double step = next - a;
    trace.push_back(next);
    if (prev_step != 0.0 && step * prev_step < 0.0 && std::abs(step) >= 0.5 * std::abs(prev_step)) ++sign_flips;
    a = next;
    if (std::abs(step) < 1e-13) {
      sol.alpha_jc = a;
      sol.iterations = it;
      sol.omega_jc = omega_alpha_of(a);
      sol.residual = std::abs(resid(a));
      return sol;
    }
    if (sign_flips >= 3) {
      // persistent oscillation: bisection on the residual
      double lo = 0.0, hi = 1.0;
      for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
        double mid = 0.5 * (lo + hi);
        (resid(mid) < 0.0 ? lo : hi) = mid;
      }
      sol.alpha_jc = 0.5 * (lo + hi);
      sol.iterations = it;
      sol.omega_jc = omega_alpha_of(sol.alpha_jc);
      sol.residual = std::abs(resid(sol.alpha_jc));
      sol.used_bisection = true;
      return sol;
    }
    prev_step = step;
  }
  throw ConvergenceError("alpha_JC fixed point did not converge within " + std::to_string(max_iterations) +
                             " iterations",
                         trace);
}

inline AlphaJCSolution solve_alpha_jc(const GaugeContext& ctx, int max_iterations = 200) {
  const double wm = ctx.omega_m, w = ctx.omega, C = ctx.C, m = ctx.m_eff;
  return solve_alpha_jc([wm](double) { return wm; },
                        [=](double a) { return w * std::sqrt(1.0 + C * (1.0 - a) * (1.0 - a) / m); },
                        1.0 / (1.0 + w / wm), max_iterations);
}

inline AlphaJCSolution solve_alpha_jc(const CircuitParams& p, const MatterSpectrum& reference) {
  return solve_alpha_jc(derive_gauge_context(p, reference, 1.0));
}

inline TwoLevelModel build_jc_model(const MatterSpectrum& matter, const GaugeContext& any_ctx, int fock_dim) {
  AlphaJCSolution s = solve_alpha_jc(any_ctx);
  TwoLevelModel m = build_two_level(matter, with_alpha(any_ctx, s.alpha_jc), fock_dim);
  m.tag = {ModelKind::JCGauge, s.alpha_jc};
  return m;
}

// Mass-free cavity model:
// w_m s+s- + Delta + w_m(1-a) d A s_y + a d Pi s_x - w_m d^2 (1-a)^2 s_z A^2 + w(a†a + 1/2)
// with A = (a + a†)/sqrt(2 w v), Pi = i w (a† - a)/sqrt(2 w v); only e^2/v enters.
inline TwoLevelModel build_trk_model(const MatterSpectrum& dipole, const GaugeContext& ctx, int fock_dim) {
  if (ctx.kind != Instantiation::Cavity)
    throw Error(ErrorKind::Unsupported, "the mass-eliminated model exists only for the cavity instantiation");
  TwoLevelModel m;
  m.ctx = ctx;
  m.trk = true;
  m.fock_dim = fock_dim;
  m.tag = {ModelKind::TRK, ctx.alpha};
  m.epsilon0 = dipole.energies(0);
  m.omega_m = dipole.omega_m();
  m.phi01 = dipole.phi(0, 1);
  m.phi_block = dipole.phi.topLeftCorner(2, 2).cast<cplx>();
  const double a = ctx.alpha, w = ctx.omega, wm = m.omega_m;
  const double k = std::sqrt(ctx.inv_L / (2.0 * w));  // e * g
  const double d = -m.phi01;                           // dipole moment in units of e
  LadderPair lp = ladder(fock_dim);
  Matrix Ic = Matrix::Identity(fock_dim, fock_dim);
  Matrix dA = d * k * (lp.a + lp.adag);
  Matrix dPi = d * k * w * I_ * (lp.adag - lp.a);
  Matrix a2 = lower2_matrix(fock_dim);
  Matrix dA2 = d * d * k * k * (a2 + a2.adjoint() + 2.0 * number_matrix(fock_dim) + Ic);
  const double Delta = ctx.epsilon0 + a * a * d * d * ctx.inv_L / 2.0;
  Matrix H = kron(wm * proj_excited() + Delta * Matrix::Identity(2, 2), Ic);
  H += kron(Matrix::Identity(2, 2), w * (number_matrix(fock_dim) + 0.5 * Ic));
  H += wm * (1.0 - a) * kron(sigma_y(), dA);
  H += a * kron(sigma_x(), dPi);
  H -= wm * (1.0 - a) * (1.0 - a) * kron(sigma_z(), dA2);
  m.hamiltonian = HermitianOp(std::move(H), 1e-10);
  return m;
}

// U = exp(-i a d A s_x) on the qubit x bare Fock space of the mass-free model
inline Matrix trk_gauge_unitary(const TwoLevelModel& m, double alpha) {
  const double k = std::sqrt(m.ctx.inv_L / (2.0 * m.ctx.omega));
  LadderPair lp = ladder(m.fock_dim);
  Matrix dA = -m.phi01 * k * (lp.a + lp.adag);
  return expm_antihermitian(-I_ * alpha * kron(sigma_x(), dA), 1e-10);
}

inline Matrix excitation_number(int fock_dim) {
  return kron(proj_excited(), Matrix::Identity(fock_dim, fock_dim)) +
         kron(Matrix::Identity(2, 2), number_matrix(fock_dim));
}

// von Neumann entropy (nats) of the reduced state of the slow factor
inline double entanglement_entropy(const Vector& psi, Index dim_slow, Index dim_fast) {
  Matrix M = Eigen::Map<const Matrix>(psi.data(), dim_fast, dim_slow).transpose();
  Matrix rho = M * M.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  double S = 0.0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    double p = es.eigenvalues()(i);
    if (p > 1e-300) S -= p * std::log(p);
  }
  return S;
}

// alpha at which a tag's model lives; JC solves its fixed point
inline double tag_alpha(const ModelTag& t, const GaugeContext& any_ctx) {
  switch (t.kind) {
    case ModelKind::QRMFlux: return 1.0;
    case ModelKind::QRMCharge: return 0.0;
    case ModelKind::JCGauge: return solve_alpha_jc(any_ctx).alpha_jc;
    default: return t.alpha;
  }
}

inline TwoLevelModel model_for_tag(const CircuitParams& p, const CircuitSetup& s, const ModelTag& t) {
  GaugeContext base = derive_gauge_context(p, s.reference, 1.0);
  switch (t.kind) {
    case ModelKind::Exact:
      throw Error(ErrorKind::Validation, "the exact model is not a two-level model");
    case ModelKind::TRK:
      throw Error(ErrorKind::Unsupported, "the mass-eliminated model exists only for the cavity instantiation");
    case ModelKind::JCGauge: return build_jc_model(s.matter, base, p.fock_dim);
    case ModelKind::Type2: return build_type2(s.matter, with_alpha(base, t.alpha), p.fock_dim);
    case ModelKind::RWA: return apply_rwa(build_two_level(s.matter, with_alpha(base, t.alpha), p.fock_dim));
    default: {
      TwoLevelModel m = build_two_level(s.matter, with_alpha(base, tag_alpha(t, base)), p.fock_dim);
      m.tag = t;
      return m;
    }
  }
}

}  // namespace gaugeqed
