#ifndef RISCHAN_REFINE_HPP
#define RISCHAN_REFINE_HPP

#include <functional>

#include "rischan/coarse.hpp"
#include "rischan/scene.hpp"
#include "rischan/types.hpp"

namespace rischan {

struct NewtonOptions {
  int max_iter = 50;
  double param_tol = 1e-9;   // infinity-norm parameter change
  double grad_tol = 1e-9;    // relative gradient criterion
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 30;
};

struct NewtonResult {
  RVec psi;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Safeguarded Newton ascent on a smooth objective. The Newton direction is
// used only when it is an ascent direction, otherwise the gradient is;
// Armijo backtracking picks the step, and iterates are kept inside the box
// init +/- cell (the coarse cell that located the maximum).
NewtonResult newton_maximize(
    const std::function<void(const RVec&, double&, RVec&, RMat&)>& derivs,
    const std::function<double(const RVec&)>& value, const RVec& init, const RVec& cell,
    const NewtonOptions& opts = {});

// Lambda_1(zeta, xi) = |a^H W(xi)^H Y~ d(-zeta)|^2 at fixed angles.
NewtonResult refine_zeta_xi(const CMat& ytilde, const ObservationPlan& plan, double theta,
                            double phi, double zeta0, double xi0, const RVec& cell,
                            const NewtonOptions& opts = {});

// Lambda_2(theta, phi) = |a^H r|^2 / sum_k ||a^H W_k^H||^2 at fixed (zeta, xi).
NewtonResult refine_angles(const CMat& ytilde, const ObservationPlan& plan, double zeta,
                           double xi, double theta0, double phi0, const RVec& cell,
                           const NewtonOptions& opts = {});

// Lambda_3(zeta_bar, xi_bar, theta_bar) = |c^H B(xi)^H Y~ d(-zeta)|^2 on the
// RIS-off observations. With a single observation xi_bar is frozen at 0.
NewtonResult refine_direct(const CMat& ytilde, const ObservationPlan& plan, double zeta0,
                           double xi0, double theta0, const RVec& cell,
                           const NewtonOptions& opts = {});

struct AlternateResult {
  double zeta = 0.0, xi = 0.0, theta = 0.0, phi = 0.0;
  double objective = 0.0;  // Lambda of (35): |z|^2 / denominator
  int cycles = 0;
  bool converged = false;
};

// Alternating refinement of (zeta, xi) and (theta, phi) starting from the
// coarse estimate, until the joint parameter change drops below tol.
AlternateResult alternate(const CMat& ytilde, const ObservationPlan& plan,
                          const CoarseEstimate& coarse, const GridSpec& grid,
                          const NewtonOptions& opts = {}, int max_cycles = 20,
                          double tol = 1e-9);

// Closed-form gain beta~ = a^H W(xi)^H Y~ d(-zeta) / (L sum_k ||a^H W_k^H||^2).
cdouble gain_ris(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                 double theta, double phi);

// alpha~ = c^H B(xi)^H Y~ d(-zeta) / (L K_bar M_r).
cdouble gain_direct(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                    double theta);

// Single-path ML objectives used for model comparisons.
double ml_objective_ris(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                        double theta, double phi);
double ml_objective_direct(const CMat& ytilde, const ObservationPlan& plan, double zeta,
                           double xi, double theta);

// One coarse cell in each refined coordinate; the Newton trust box.
RVec ris_cell_widths(const ObservationPlan& plan, const GridSpec& grid, double theta,
                     double phi);  // [zeta, xi, theta, phi]
RVec direct_cell_widths(const ObservationPlan& plan, const GridSpec& grid,
                        double theta);  // [zeta, xi, theta]

// Objective values and analytic derivatives, exposed so the finite-difference
// oracles can check them directly. psi orders: Lambda_1 [zeta, xi] (angles
// fixed), Lambda_2 [theta, phi] ((zeta, xi) fixed), Lambda_3
// [zeta_bar, xi_bar, theta_bar].
double lambda1_value(const CMat& ytilde, const ObservationPlan& plan, double theta, double phi,
                     const RVec& psi);
void lambda1_derivs(const CMat& ytilde, const ObservationPlan& plan, double theta, double phi,
                    const RVec& psi, double& f, RVec& g, RMat& h);
double lambda2_value(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                     const RVec& psi);
void lambda2_derivs(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                    const RVec& psi, double& f, RVec& g, RMat& h);
double lambda3_value(const CMat& ytilde, const ObservationPlan& plan, const RVec& psi);
void lambda3_derivs(const CMat& ytilde, const ObservationPlan& plan, const RVec& psi,
                    double& f, RVec& g, RMat& h);

}  // namespace rischan

#endif  // RISCHAN_REFINE_HPP
