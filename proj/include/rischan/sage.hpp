#ifndef RISCHAN_SAGE_HPP
#define RISCHAN_SAGE_HPP

#include <vector>

#include "rischan/pilot.hpp"
#include "rischan/refine.hpp"

namespace rischan {

struct SageOptions {
  int max_cycles = 10;
  double rel_tol = 1e-6;  // relative residual decrease per cycle
  NewtonOptions newton;
  int alternate_max_cycles = 20;
  double alternate_tol = 1e-9;
};

struct RisPathEstimate {
  double zeta = 0.0, xi = 0.0, theta = 0.0, phi = 0.0;
  cdouble beta_tilde{0.0, 0.0};
  double tau = 0.0;          // (xi - zeta) * L~ minus the sampling advance
  cdouble beta{0.0, 0.0};    // beta~ * exp(-j pi tau_eff^2 / L~)
  bool clamped = false;
};

struct DirectPathEstimate {
  double zeta = 0.0, xi = 0.0, theta = 0.0;
  cdouble alpha_tilde{0.0, 0.0};
  double tau = 0.0;
  cdouble alpha{0.0, 0.0};
  bool clamped = false;
};

struct EstimateReport {
  std::vector<RisPathEstimate> ris_paths;
  std::vector<DirectPathEstimate> direct_paths;
  double residual_norm = 0.0;
  double data_norm = 0.0;
  int iterations = 0;  // completed SAGE cycles (the serial init counts as one)
  bool converged = false;
  std::vector<double> residual_history;  // after every M-step
  bool direct_converged = true;
  CMat direct_recon_on;  // two-stage only: direct-link reconstruction on the RIS-on window
};

// Reconstruction of one RIS path in the compensated domain:
// beta~ W(xi) a(theta,phi) d(zeta)^T.
CMat ris_path_component(const ObservationPlan& plan, int window, double zeta, double xi,
                        double theta, double phi, cdouble beta_tilde);

// alpha~ B(xi) c(theta) d(zeta)^T over `blocks` observations.
CMat direct_path_component(const ObservationPlan& plan, int blocks, int window, double zeta,
                           double xi, double theta, cdouble alpha_tilde);

// SAGE decomposition of the RIS-only model. `direct_recon`, when given, is a
// fixed already-reconstructed direct-link contribution subtracted in every
// E-step (the two-stage algorithm).
EstimateReport sage_ris(const CMat& ytilde, const ObservationPlan& plan, const ZcPilot& pilot,
                        int num_paths, const GridSpec& grid, const DenominatorCache& cache,
                        const SageOptions& opts = {}, const CMat* direct_recon = nullptr);

// SAGE decomposition of the direct-only model on the RIS-off observations.
EstimateReport sage_direct(const CMat& ytilde, const ObservationPlan& plan,
                           const ZcPilot& pilot, int num_paths, const GridSpec& grid,
                           const SageOptions& opts = {});

// Two-stage protocol: estimate the direct link from the RIS-off block, cancel
// its (Doppler-advanced) contribution from the RIS-on block, then run the RIS
// SAGE on what remains. Takes raw (uncompensated) blocks.
EstimateReport estimate_full(const CMat& y_off, const CMat& y_on, const ObservationPlan& plan,
                             const ZcPilot& pilot, int num_ris_paths, int num_direct_paths,
                             const GridSpec& grid, const DenominatorCache& cache,
                             const SageOptions& opts = {});

}  // namespace rischan

#endif  // RISCHAN_SAGE_HPP
