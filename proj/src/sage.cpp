#include "rischan/sage.hpp"

#include <cmath>
#include <stdexcept>

namespace rischan {

namespace {

CVec pos_doppler(int len, double zeta) {
  const int n0 = window_start(len);
  CVec d(len);
  for (int i = 0; i < len; ++i) {
    d[i] = std::exp(kJ * (kTwoPi * zeta * (n0 + i)));
  }
  return d;
}

void fill_ris_path(RisPathEstimate& p, const ZcPilot& pilot) {
  const double tau_eff = (p.xi - p.zeta) * pilot.zc_length;
  p.tau = tau_eff - pilot.advance;
  p.beta = p.beta_tilde * std::exp(-kJ * (kPi * tau_eff * tau_eff / pilot.zc_length));
}

void fill_direct_path(DirectPathEstimate& p, const ZcPilot& pilot) {
  const double tau_eff = (p.xi - p.zeta) * pilot.zc_length;
  p.tau = tau_eff - pilot.advance;
  p.alpha = p.alpha_tilde * std::exp(-kJ * (kPi * tau_eff * tau_eff / pilot.zc_length));
}

}  // namespace

CMat ris_path_component(const ObservationPlan& plan, int window, double zeta, double xi,
                        double theta, double phi, cdouble beta_tilde) {
  const int Mr = plan.geom.bs_antennas;
  const CVec a = detail::ris_steering_unchecked(plan.geom, theta, phi);
  const CVec d = pos_doppler(window, zeta);
  CMat out(plan.ris_on_count * Mr, window);
  for (int k = 0; k < plan.ris_on_count; ++k) {
    const cdouble ph = std::exp(kJ * (kTwoPi * xi * k * plan.symbol_length));
    out.middleRows(k * Mr, Mr).noalias() =
        (beta_tilde * ph) * (mixing_matrix(plan, k + 1) * a) * d.transpose();
  }
  return out;
}

CMat direct_path_component(const ObservationPlan& plan, int blocks, int window, double zeta,
                           double xi, double theta, cdouble alpha_tilde) {
  const int Mr = plan.geom.bs_antennas;
  const CVec c = detail::bs_steering_unchecked(plan.geom, theta);
  const CVec d = pos_doppler(window, zeta);
  CMat out(blocks * Mr, window);
  for (int k = 0; k < blocks; ++k) {
    const cdouble ph = std::exp(kJ * (kTwoPi * xi * k * plan.symbol_length));
    out.middleRows(k * Mr, Mr).noalias() = (alpha_tilde * ph) * c * d.transpose();
  }
  return out;
}

EstimateReport sage_ris(const CMat& ytilde, const ObservationPlan& plan, const ZcPilot& pilot,
                        int num_paths, const GridSpec& grid, const DenominatorCache& cache,
                        const SageOptions& opts, const CMat* direct_recon) {
  if (num_paths < 0) throw std::invalid_argument("sage: num_paths must be >= 0");
  const int L = static_cast<int>(ytilde.cols());

  CMat base = ytilde;
  if (direct_recon != nullptr) base -= *direct_recon;

  EstimateReport report;
  report.data_norm = ytilde.norm();
  if (num_paths == 0) {
    report.residual_norm = base.norm();
    report.converged = true;
    return report;
  }

  std::vector<RisPathEstimate> paths(num_paths);
  std::vector<CMat> comps(num_paths, CMat::Zero(ytilde.rows(), L));
  std::vector<bool> have(num_paths, false);
  CMat total = CMat::Zero(ytilde.rows(), L);
  double prev_resid = base.norm();

  for (int cycle = 1; cycle <= opts.max_cycles; ++cycle) {
    for (int u = 0; u < num_paths; ++u) {
      const CMat yhat = base - (total - comps[u]);  // E-step

      // M-step: coarse grid, alternating Newton, then the closed-form gain.
      const CoarseEstimate ce = coarse_ris(yhat, plan, grid, cache);
      const AlternateResult alt = alternate(yhat, plan, ce, grid, opts.newton,
                                            opts.alternate_max_cycles, opts.alternate_tol);
      RisPathEstimate cand;
      cand.zeta = alt.zeta;
      cand.xi = alt.xi;
      cand.theta = alt.theta;
      cand.phi = alt.phi;
      cand.clamped = ce.clamped;
      // A re-estimated path must never fit its own E-step data worse than the
      // previous iterate, otherwise the residual could grow; keep the better.
      if (have[u]) {
        const double obj_new =
            ml_objective_ris(yhat, plan, cand.zeta, cand.xi, cand.theta, cand.phi);
        const double obj_old = ml_objective_ris(yhat, plan, paths[u].zeta, paths[u].xi,
                                                paths[u].theta, paths[u].phi);
        if (obj_old > obj_new) {
          cand = paths[u];
        }
      }
      cand.beta_tilde = gain_ris(yhat, plan, cand.zeta, cand.xi, cand.theta, cand.phi);
      paths[u] = cand;
      have[u] = true;

      total -= comps[u];
      comps[u] = ris_path_component(plan, L, cand.zeta, cand.xi, cand.theta, cand.phi,
                                    cand.beta_tilde);
      total += comps[u];
      report.residual_history.push_back((base - total).norm());
    }
    report.iterations = cycle;
    const double resid = report.residual_history.back();
    if (prev_resid - resid <= opts.rel_tol * std::max(report.data_norm, 1e-300)) {
      report.converged = true;
      break;
    }
    prev_resid = resid;
  }

  report.residual_norm = report.residual_history.back();
  for (auto& p : paths) fill_ris_path(p, pilot);
  report.ris_paths = std::move(paths);
  return report;
}

EstimateReport sage_direct(const CMat& ytilde, const ObservationPlan& plan,
                           const ZcPilot& pilot, int num_paths, const GridSpec& grid,
                           const SageOptions& opts) {
  if (num_paths < 1) throw std::invalid_argument("sage: direct num_paths must be >= 1");
  const int Mr = plan.geom.bs_antennas;
  const int blocks = static_cast<int>(ytilde.rows()) / Mr;
  const int L = static_cast<int>(ytilde.cols());

  EstimateReport report;
  report.data_norm = ytilde.norm();
  std::vector<DirectPathEstimate> paths(num_paths);
  std::vector<CMat> comps(num_paths, CMat::Zero(ytilde.rows(), L));
  std::vector<bool> have(num_paths, false);
  CMat total = CMat::Zero(ytilde.rows(), L);
  double prev_resid = report.data_norm;

  for (int cycle = 1; cycle <= opts.max_cycles; ++cycle) {
    for (int d = 0; d < num_paths; ++d) {
      const CMat yhat = ytilde - (total - comps[d]);

      const CoarseEstimate ce = coarse_direct(yhat, plan, grid);
      const RVec cell = direct_cell_widths(plan, grid, ce.theta);
      const NewtonResult nr =
          refine_direct(yhat, plan, ce.zeta, ce.xi, ce.theta, cell, opts.newton);
      DirectPathEstimate cand;
      cand.zeta = nr.psi[0];
      cand.xi = nr.psi[1];
      cand.theta = nr.psi[2];
      cand.clamped = ce.clamped;
      if (have[d]) {
        const double obj_new =
            ml_objective_direct(yhat, plan, cand.zeta, cand.xi, cand.theta);
        const double obj_old =
            ml_objective_direct(yhat, plan, paths[d].zeta, paths[d].xi, paths[d].theta);
        if (obj_old > obj_new) {
          cand = paths[d];
        }
      }
      cand.alpha_tilde = gain_direct(yhat, plan, cand.zeta, cand.xi, cand.theta);
      paths[d] = cand;
      have[d] = true;

      total -= comps[d];
      comps[d] =
          direct_path_component(plan, blocks, L, cand.zeta, cand.xi, cand.theta,
                                cand.alpha_tilde);
      total += comps[d];
      report.residual_history.push_back((ytilde - total).norm());
    }
    report.iterations = cycle;
    const double resid = report.residual_history.back();
    if (prev_resid - resid <= opts.rel_tol * std::max(report.data_norm, 1e-300)) {
      report.converged = true;
      break;
    }
    prev_resid = resid;
  }

  report.residual_norm = report.residual_history.back();
  for (auto& p : paths) fill_direct_path(p, pilot);
  report.direct_paths = std::move(paths);
  return report;
}

EstimateReport estimate_full(const CMat& y_off, const CMat& y_on, const ObservationPlan& plan,
                             const ZcPilot& pilot, int num_ris_paths, int num_direct_paths,
                             const GridSpec& grid, const DenominatorCache& cache,
                             const SageOptions& opts) {
  const int L = pilot.window;
  const CMat ytilde_on = compensate(y_on, pilot);

  EstimateReport direct_report;
  CMat breve = CMat::Zero(ytilde_on.rows(), L);
  if (num_direct_paths >= 1) {
    if (y_off.rows() < plan.geom.bs_antennas) {
      throw std::invalid_argument("sage: two-stage estimation needs RIS-off observations");
    }
    const CMat ytilde_off = compensate(y_off, pilot);
    direct_report = sage_direct(ytilde_off, plan, pilot, num_direct_paths, grid, opts);
    // Direct-link contribution inside the RIS-on window; the Doppler phase has
    // advanced by the K_bar symbols spent with the RIS off.
    const double kbar_n =
        static_cast<double>(plan.ris_off_count) * plan.symbol_length;
    for (const auto& p : direct_report.direct_paths) {
      const cdouble adv = p.alpha_tilde * std::exp(kJ * (kTwoPi * p.xi * kbar_n));
      breve += direct_path_component(plan, plan.ris_on_count, L, p.zeta, p.xi, p.theta, adv);
    }
  }

  EstimateReport report =
      sage_ris(ytilde_on, plan, pilot, num_ris_paths, grid, cache, opts, &breve);
  report.direct_paths = direct_report.direct_paths;
  report.direct_converged = num_direct_paths >= 1 ? direct_report.converged : true;
  report.direct_recon_on = std::move(breve);
  return report;
}

}  // namespace rischan
