#include "rischan/crb.hpp"

#include <cmath>
#include <stdexcept>

namespace rischan {

namespace detail {

CMat model_jacobian(const Scene& scene, const ObservationPlan& plan, const ZcPilot& pilot) {
  const int U = static_cast<int>(scene.ris_paths.size());
  const int Mr = plan.geom.bs_antennas;
  const int K = plan.ris_on_count;
  const int L = pilot.window;
  const int N = plan.symbol_length;
  const int rows = K * Mr * L;

  CMat j(rows, 6 * U);
  const int n0 = window_start(L);

  for (int u = 0; u < U; ++u) {
    const RisPath& path = scene.ris_paths[u];
    const RisSteeringDerivs sd =
        ris_response_derivs(plan.geom, {path.azimuth, path.elevation});
    const double tau_eff = path.delay + pilot.advance;

    // Space factors: sv = W(xi) a plus derivatives in xi, theta, phi.
    CVec sv(K * Mr), sv_xi(K * Mr), sv_th(K * Mr), sv_ph(K * Mr);
    for (int k = 0; k < K; ++k) {
      const CMat wk = mixing_matrix(plan, k + 1);
      const cdouble ph = std::exp(kJ * (kTwoPi * path.doppler * k * N));
      sv.segment(k * Mr, Mr) = ph * (wk * sd.a);
      sv_xi.segment(k * Mr, Mr) = (kJ * (kTwoPi * k * N) * ph) * (wk * sd.a);
      sv_th.segment(k * Mr, Mr) = ph * (wk * sd.d_theta);
      sv_ph.segment(k * Mr, Mr) = ph * (wk * sd.d_phi);
    }

    // Time factors: tv = x(tau) .* d(xi) plus derivatives in tau and xi.
    CVec tv(L), tv_tau(L), tv_xi(L);
    for (int i = 0; i < L; ++i) {
      const double n = n0 + i;
      const double dn = n - tau_eff;
      const cdouble x = std::exp(kJ * (kPi * dn * dn / pilot.zc_length));
      const cdouble d = std::exp(kJ * (kTwoPi * path.doppler * n));
      tv[i] = x * d;
      tv_tau[i] = (-kJ * (kTwoPi * dn / pilot.zc_length)) * x * d;
      tv_xi[i] = (kJ * (kTwoPi * n)) * x * d;
    }

    auto kron_col = [&](const CVec& t, const CVec& s) {
      return CVec(Eigen::Map<const CVec>(CMat(s * t.transpose()).data(), rows));
    };

    const cdouble beta = path.gain;
    j.col(0 * U + u) = beta * kron_col(tv_tau, sv);
    j.col(1 * U + u) = beta * (kron_col(tv_xi, sv) + kron_col(tv, sv_xi));
    j.col(2 * U + u) = beta * kron_col(tv, sv_th);
    j.col(3 * U + u) = beta * kron_col(tv, sv_ph);
    j.col(4 * U + u) = kron_col(tv, sv);
    j.col(5 * U + u) = kJ * j.col(4 * U + u);
  }
  return j;
}

}  // namespace detail

CrbReport fim(const Scene& scene, const ObservationPlan& plan, const ZcPilot& pilot,
              double sigma2) {
  if (scene.ris_paths.empty()) {
    throw std::invalid_argument("crb: at least one RIS path is required");
  }
  if (!scene.direct_paths.empty()) {
    throw std::invalid_argument("crb: the bound covers the RIS-only model (no direct paths)");
  }
  if (!(sigma2 > 0.0)) {
    throw std::domain_error("crb: sigma2 must be > 0");
  }
  validate(plan);
  validate(pilot);

  const int U = static_cast<int>(scene.ris_paths.size());
  const CMat j = detail::model_jacobian(scene, plan, pilot);
  RMat f = (2.0 / sigma2) * (j.adjoint() * j).real();
  f = 0.5 * (f + f.transpose()).eval();

  CrbReport report;
  report.fim = f;

  Eigen::SelfAdjointEigenSolver<RMat> es(f);
  const RVec ev = es.eigenvalues();
  const double floor = 1e-12 * ev.cwiseAbs().maxCoeff();
  RVec inv_ev(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < floor) {
      report.singular = true;
      inv_ev[i] = 1.0 / floor;
    } else {
      inv_ev[i] = 1.0 / ev[i];
    }
  }
  const RVec diag =
      (es.eigenvectors() * inv_ev.asDiagonal() * es.eigenvectors().transpose()).diagonal();

  report.crb_tau = diag.segment(0 * U, U);
  report.crb_xi = diag.segment(1 * U, U);
  report.crb_theta = diag.segment(2 * U, U);
  report.crb_phi = diag.segment(3 * U, U);
  report.crb_beta_re = diag.segment(4 * U, U);
  report.crb_beta_im = diag.segment(5 * U, U);
  return report;
}

}  // namespace rischan
