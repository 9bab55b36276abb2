#ifndef RISCHAN_CRB_HPP
#define RISCHAN_CRB_HPP

#include "rischan/pilot.hpp"
#include "rischan/scene.hpp"

namespace rischan {

struct CrbReport {
  RMat fim;  // 6U x 6U, parameter order [tau; xi; theta; phi; Re beta; Im beta]
  RVec crb_tau, crb_xi, crb_theta, crb_phi, crb_beta_re, crb_beta_im;
  bool singular = false;
};

// Fisher information of the RIS-only stacked model and the per-parameter
// bounds from the inverse diagonal. sigma2 is the per-complex-sample noise
// variance; the scene must have no direct paths.
CrbReport fim(const Scene& scene, const ObservationPlan& plan, const ZcPilot& pilot,
              double sigma2);

namespace detail {
// Jacobian of b = vec(noiseless Y) with respect to the 6U real parameters.
CMat model_jacobian(const Scene& scene, const ObservationPlan& plan, const ZcPilot& pilot);
}  // namespace detail

}  // namespace rischan

#endif  // RISCHAN_CRB_HPP
