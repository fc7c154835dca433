#pragma once

// Second-order (Schrieffer-Wolff) level shifts of the matter levels, Omega = omega_alpha.

#include <cmath>
#include <string>
#include <vector>

#include "errors.hpp"
#include "gauge.hpp"

namespace gaugeqed {

struct DispersiveShifts {
  double alpha = 0.0;
  std::vector<double> kappa;  // Lamb-type
  std::vector<double> chi;    // ac-Stark
  std::vector<bool> near_resonant;
  RealMatrix kappa_terms;  // (n, m) summands
  RealMatrix chi_terms;
};

// g_nm = phi_nm [(1-a) eps_nm + a w_a] / sqrt(2 w_a L)
inline double coupling_nm(const MatterSpectrum& m, const GaugeContext& c, Index n, Index k) {
  const double eps = m.energies(n) - m.energies(k);
  return m.phi(n, k) * ((1.0 - c.alpha) * eps + c.alpha * c.omega_alpha) *
         std::sqrt(c.inv_L / (2.0 * c.omega_alpha));
}

inline DispersiveShifts sw_shifts(const MatterSpectrum& m, const GaugeContext& c, Index n_max) {
  if (n_max < 0 || n_max >= m.keep()) throw Error(ErrorKind::Validation, "n_max outside the kept block");
  const double W = c.omega_alpha;
  DispersiveShifts d;
  d.alpha = c.alpha;
  d.kappa.assign(n_max + 1, 0.0);
  d.chi.assign(n_max + 1, 0.0);
  d.near_resonant.assign(n_max + 1, false);
  d.kappa_terms = RealMatrix::Zero(n_max + 1, m.keep());
  d.chi_terms = RealMatrix::Zero(n_max + 1, m.keep());
  for (Index n = 0; n <= n_max; ++n) {
    for (Index k = 0; k < m.keep(); ++k) {
      const double g = coupling_nm(m, c, n, k);
      if (g == 0.0) continue;
      const double eps = m.energies(n) - m.energies(k);
      const double det = std::abs(std::abs(eps) - W);
      if (det < 1e-9 * W)
        throw Error(ErrorKind::SingularDenominator,
                    "resonant denominator for (n, m) = (" + std::to_string(n) + ", " + std::to_string(k) + ")");
      if (det < 0.05 * W) d.near_resonant[n] = true;
      d.kappa_terms(n, k) = g * g / (eps - W);
      d.chi_terms(n, k) = 2.0 * g * g * eps / (eps * eps - W * W);
      d.kappa[n] += d.kappa_terms(n, k);
      d.chi[n] += d.chi_terms(n, k);
    }
  }
  return d;
}

// unperturbed reference for the ground level: eps_0 + w_a/2 plus the first-order a^2 phi^2/2L term
inline double ground_reference(const MatterSpectrum& m, const GaugeContext& c) {
  return m.energies(0) + 0.5 * c.omega_alpha + c.alpha * c.alpha * c.inv_L * m.phi_sq(0, 0) / 2.0;
}

inline double exact_ground_shift(double exact_ground, const MatterSpectrum& m, const GaugeContext& c) {
  return exact_ground - ground_reference(m, c);
}

}  // namespace gaugeqed
