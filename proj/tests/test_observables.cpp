#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <gaugeqed/observables.hpp>

using namespace gaugeqed;

TEST(Bogoliubov, IdentityWithoutSqueezing) {
  Matrix B = bogoliubov_map(0.0, 6, 10);
  EXPECT_EQ(B.rows(), 10);
  EXPECT_EQ(B.cols(), 6);
  EXPECT_LT((B.topRows(6) - Matrix::Identity(6, 6)).norm(), 1e-14);
  EXPECT_LT(B.bottomRows(4).norm(), 1e-14);
}

TEST(Bogoliubov, ColumnsStayOrthonormal) {
  Matrix B = bogoliubov_map(0.3, 8, 60);
  EXPECT_LT((B.adjoint() * B - Matrix::Identity(8, 8)).norm(), 1e-10);
  // vacuum of the squeezed mode has bare photon number sinh^2 r
  Vector v = B.col(0);
  EXPECT_NEAR((v.adjoint() * number_matrix(60) * v)(0).real(), std::sinh(0.3) * std::sinh(0.3), 1e-10);
}

TEST(Embedding, LeakageIsACutoffError) {
  CircuitParams p;
  p.fock_dim = 30;
  CircuitSetup s = make_setup(p);
  TwoLevelModel m = build_two_level(s.matter, derive_gauge_context(p, s.reference, 0.0), p.fock_dim);
  EigenSystem es = eig_lowest(m.hamiltonian, 1);
  EXPECT_NO_THROW(embed_two_level_state(m, es.vectors.col(0), p.matter_keep, 60));
  try {
    embed_two_level_state(m, es.vectors.col(0), p.matter_keep, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Cutoff);
  }
}

TEST(Fidelity, RecordsAreProbabilities) {
  CircuitParams p;
  std::vector<FidelityRecord> recs = fidelities(p, std::vector<ModelTag>{parse_model_tag("qrm_flux"),
                                                                          parse_model_tag("qrm_charge"),
                                                                          parse_model_tag("jc")});
  ASSERT_EQ(recs.size(), 3u);
  for (const auto& r : recs) {
    for (double f : {r.F_G, r.F_E, r.cross}) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0 + 1e-12);
    }
    EXPECT_LE(r.F_G + r.cross, 1.0 + 1e-10);
    EXPECT_LT(r.leakage, 1e-6);
  }
  // JC gauge represents the ground state best at delta = 5, eta = 1
  EXPECT_GT(recs[2].F_G, recs[0].F_G);
  EXPECT_GT(recs[2].F_G, recs[1].F_G);
}

TEST(Fidelity, DecoupledIsPerfect) {
  CircuitParams p;
  p.eta = 0.0;
  p.fock_dim = 20;
  for (const auto& r : fidelities(p, std::vector<double>{0.0, 0.5, 1.0})) {
    EXPECT_NEAR(r.F_G, 1.0, 1e-12);
    EXPECT_NEAR(r.F_E, 1.0, 1e-12);
  }
}

TEST(Fidelity, GaugeMismatchRejected) {
  CircuitParams p;
  p.fock_dim = 20;
  CircuitSetup s = make_setup(p);
  TwoLevelModel m = build_two_level(s.matter, derive_gauge_context(p, s.reference, 0.0), p.fock_dim);
  EXPECT_THROW(fidelity_record(exact_lowest(p, s, 1.0, 2), m), Error);
}

TEST(DressedPartition, HarmonicJcModelIsExact) {
  for (auto [delta, eta] : {std::pair{5.0, 0.5}, std::pair{1.0, 1.0}}) {
    CircuitParams p;
    p.E_J = 0.0;
    p.delta = delta;
    p.eta = eta;
    FidelityRecord r = dressed_jc_fidelity(p);
    EXPECT_NEAR(r.F_G, 1.0, 1e-8);
    CircuitSetup s = make_setup(p);
    EXPECT_NEAR(dressed_jc_setup(p, s.reference).jc.alpha_jc, 1.0 / (1.0 + delta), 1e-10);
  }
}

TEST(Photon, SqueezedVacuumOracle) {
  CircuitParams p;
  p.fock_dim = 30;
  CircuitSetup s = make_setup(p);
  GaugeContext c = derive_gauge_context(p, s.reference, 0.0);
  TwoLevelModel m = build_two_level(s.matter, c, p.fock_dim);
  Vector psi = Vector::Zero(2 * p.fock_dim);
  psi(0) = 1.0;  // |g> x vacuum of the renormalized mode
  EXPECT_NEAR(two_level_photon_number(m, psi, 0.0), 0.0, 1e-14);
  // the bare flux-gauge mode sees the squeezing plus the displacement by phi
  const double sh = std::sinh(c.r_alpha);
  const double kappa = std::sqrt(c.inv_L / (2.0 * c.omega));
  const double phi01 = s.matter.phi(0, 1);
  EXPECT_NEAR(two_level_photon_number(m, psi, 1.0), sh * sh + kappa * kappa * phi01 * phi01, 1e-12);
}

TEST(Photon, JcGroundStateHasNoJcPhotons) {
  CircuitParams p;
  p.fock_dim = 30;
  CircuitSetup s = make_setup(p);
  TwoLevelModel m = model_for_tag(p, s, parse_model_tag("jc"));
  EigenSystem es = eig_lowest(m.hamiltonian, 1);
  EXPECT_LT(std::abs(two_level_photon_number(m, es.vectors.col(0), m.ctx.alpha)), 1e-14);
}

TEST(Photon, ExactRepresentationIndependence) {
  CircuitParams p;
  p.matter_keep = 30;
  p.fock_dim = 60;
  CircuitSetup s = make_setup(p);
  StateSpec g0{parse_model_tag("exact"), 0, 0.0}, g1{parse_model_tag("exact"), 0, 1.0};
  double n0 = photon_number(p, s, 1.0, g0).value, n1 = photon_number(p, s, 1.0, g1).value;
  EXPECT_NEAR(n0, n1, 1e-4 * n1);
  EXPECT_GT(n1, 0.1);
}

TEST(Photon, DecoupledVacuum) {
  CircuitParams p;
  p.eta = 0.0;
  p.fock_dim = 12;
  CircuitSetup s = make_setup(p);
  StateSpec g{parse_model_tag("exact"), 0, 1.0};
  EXPECT_NEAR(photon_number(p, s, 0.3, g).value, 0.0, 1e-14);
}

TEST(Photon, TypesDifferOnlyThroughTheSquare) {
  CircuitParams p;
  p.fock_dim = 30;
  CircuitSetup s = make_setup(p);
  StateSpec q{parse_model_tag("qrm_flux"), 0, 1.0};
  double t1 = photon_number(p, s, 0.2, q, PhotonType::OperatorOfProjected).value;
  double t2 = photon_number(p, s, 0.2, q, PhotonType::ProjectedOperator).value;
  EXPECT_NE(t1, t2);
  // measured in its own gauge the flux QRM does not see the square at all
  EXPECT_DOUBLE_EQ(photon_number(p, s, 1.0, q, PhotonType::OperatorOfProjected).value,
                   photon_number(p, s, 1.0, q, PhotonType::ProjectedOperator).value);
}

TEST(Heatmap, AdjacentLevelsDominateFlux) {
  MatterSpectrum m = build_fluxonium(CircuitParams{});
  auto table = export_matrix_element_heatmaps(m, 6);
  ASSERT_EQ(table.size(), 36u);
  auto at = [&](int n, int k) { return table[n * 6 + k]; };
  for (int n = 0; n < 6; ++n) {
    int best = 0;
    for (int k = 0; k < 6; ++k) {
      EXPECT_LE(at(n, k).phi_sq, 1.0);
      if (at(n, k).phi_sq > at(n, best).phi_sq) best = k;
    }
    EXPECT_EQ(std::abs(best - n), 1) << "row " << n;
  }
  // ground-state couplings out of the qubit subspace: small for phi, not for eps * phi
  double far_phi = 0.0, far_eps = 0.0;
  for (int k = 2; k < 6; ++k) {
    far_phi = std::max(far_phi, at(0, k).phi_sq);
    far_eps = std::max(far_eps, at(0, k).eps_phi_sq);
  }
  EXPECT_LT(far_phi, 0.05 * at(0, 1).phi_sq);
  EXPECT_GT(far_eps, 0.5 * at(0, 1).eps_phi_sq);
  double block_max = 0.0;
  for (const auto& h : table)
    if (h.n > 1 || h.m > 1) block_max = std::max(block_max, h.eps_phi_sq);
  EXPECT_GT(block_max, at(0, 1).eps_phi_sq);
}
