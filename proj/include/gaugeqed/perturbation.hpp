#pragma once

// Closed-form second-order levels of the two-level model and the TRK bookkeeping check.

#include <algorithm>
#include <cmath>
#include <vector>

#include "errors.hpp"
#include "gauge.hpp"

namespace gaugeqed {

struct SecondOrderLevels {
  double ground = 0.0;
  double excited = 0.0;  // |e, 0>
};

inline SecondOrderLevels second_order_levels(const GaugeContext& c) {
  const double wm = c.omega_m, wa = c.omega_alpha;
  if (std::abs(wm - wa) <= 1e-14 * std::max(wm, wa))
    throw Error(ErrorKind::SingularDenominator, "qubit and renormalized mode are degenerate");
  SecondOrderLevels s;
  s.ground = 0.5 * wa + c.delta_alpha - c.u_plus * c.u_plus / (wm + wa);
  s.excited = wm + 0.5 * wa + c.delta_alpha + c.u_minus * c.u_minus / (wm - wa);
  return s;
}

struct TrkReport {
  std::vector<double> alphas;
  std::vector<double> ground_sub, excited_sub;  // mass eliminated, O(d^2)
  std::vector<double> ground_raw, excited_raw;  // bare mass kept
  double spread_ground_sub = 0.0, spread_excited_sub = 0.0;
  double spread_ground_raw = 0.0, spread_excited_raw = 0.0;
  double tolerance = 1e-10;
  bool pass = false;
  // the excited-state substitution e^2/2m -> -w_m d^2 amounts to a negative mass
  bool excited_requires_negative_mass = true;
};

inline double relative_spread(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  return mean != 0.0 ? (*hi - *lo) / std::abs(mean) : (*hi - *lo);
}

inline TrkReport trk_invariance_check(const GaugeContext& base, const std::vector<double>& alphas,
                                      double tol = 1e-10) {
  TrkReport r;
  r.alphas = alphas;
  r.tolerance = tol;
  const double w = base.omega, wm = base.omega_m, e0 = base.epsilon0;
  const double K = base.varphi * base.varphi * base.inv_L / 2.0;  // d^2 / 2v
  for (double a : alphas) {
    const double b = 1.0 - a;
    // ground: e^2/2m -> +w_m d^2
    const double gq = a * w - b * wm;
    r.ground_sub.push_back(e0 + 0.5 * w + K * (wm * b * b / w + a * a - gq * gq / (w * (wm + w))));
    // excited: e^2/2m -> -w_m d^2
    const double eq = a * w + b * wm;
    r.excited_sub.push_back(e0 + wm + 0.5 * w + K * (-wm * b * b / w + a * a + eq * eq / (w * (wm - w))));
    SecondOrderLevels raw = second_order_levels(with_alpha(base, a));
    r.ground_raw.push_back(raw.ground);
    r.excited_raw.push_back(raw.excited);
  }
  r.spread_ground_sub = relative_spread(r.ground_sub);
  r.spread_excited_sub = relative_spread(r.excited_sub);
  r.spread_ground_raw = relative_spread(r.ground_raw);
  r.spread_excited_raw = relative_spread(r.excited_raw);
  r.pass = r.spread_ground_sub < tol && r.spread_excited_sub < tol;
  return r;
}

}  // namespace gaugeqed
