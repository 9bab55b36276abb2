#ifndef RISCHAN_COARSE_HPP
#define RISCHAN_COARSE_HPP

#include <vector>

#include "rischan/scene.hpp"
#include "rischan/types.hpp"

namespace rischan {

// FFT mesh sizes. n_phi counts the vertical spatial-frequency bins (f_x, maps
// to elevation), n_theta the horizontal ones (f_y, maps to azimuth).
struct GridSpec {
  int n_theta = 32;
  int n_phi = 32;
  int n_zeta = 1024;
  int n_xi = 64;
  int n_theta_bar = 32;
  int n_zeta_bar = 1024;
  int n_xi_bar = 64;
};

void validate(const GridSpec& grid);

struct CoarseEstimate {
  double zeta = 0.0;  // cycles/sample, wrapped to [-0.5, 0.5)
  double xi = 0.0;    // cycles/sample, principal interval of the 1/N ambiguity
  double theta = 0.0; // radians (theta_bar for the direct search)
  double phi = 0.0;   // radians (unused by the direct search)
  double objective = 0.0;
  bool clamped = false;         // an arccos argument fell outside [-1, 1]
  bool xi_identifiable = true;  // false when fewer than 2 observations
};

// Offline part of the coarse search: the spatial DFTs R^{(k)} of the columns
// of W(Phi_k)^H over the (f_x, f_y) mesh, their row norms, and the objective
// denominator gamma. Immutable once built; shared by all searches on the plan.
struct DenominatorCache {
  std::vector<CMat> r_fft;  // K matrices, (n_phi*n_theta) x M_r
  RMat row_norms;           // K x (n_phi*n_theta): ||R^{(k)}(n,:)||^2
  RVec gamma;               // n_phi*n_theta
  int n_phi = 0;
  int n_theta = 0;
};

DenominatorCache precompute_denominator(const ObservationPlan& plan, const GridSpec& grid);

// Grid argmax of |sum_k a^H W_k^H Y~_k d(-zeta) e^{-j2pi N xi (k-1)}|^2 / gamma
// over the 4-D mesh. The scan is an exact branch-and-bound over the tensor:
// every cell's value is bounded by Cauchy-Schwarz before the cross-observation
// DFT is expanded, so the returned cell is identical to a full scan (lowest
// linear index wins on ties).
CoarseEstimate coarse_ris(const CMat& ytilde, const ObservationPlan& plan, const GridSpec& grid,
                          const DenominatorCache& cache);

// 3-D grid argmax of |sum_k c^H Y~_k d(-zeta) e^{-j2pi N xi (k-1)}|^2 for the
// direct link; Y~ spans the RIS-off observations.
CoarseEstimate coarse_direct(const CMat& ytilde, const ObservationPlan& plan,
                             const GridSpec& grid);

// Full objective grids for oracle tests (small sizes only). Layout is the
// canonical scan order: index = (n_zeta * N_s + n_spatial) * N_xi + n_xi.
RVec ris_objective_grid(const CMat& ytilde, const ObservationPlan& plan, const GridSpec& grid,
                        const DenominatorCache& cache);
RVec direct_objective_grid(const CMat& ytilde, const ObservationPlan& plan, const GridSpec& grid);

namespace detail {
// Temporal DFT bank: row m of the result is the n_fft-point DFT of row m of
// block, with sample n placed at bin position (n mod n_fft); exactly
// evaluates sum_n block(m,n) e^{-j2pi n nu/n_fft} for the centred window.
CMat window_dft(const CMat& block, int n_fft);
}  // namespace detail

}  // namespace rischan

#endif  // RISCHAN_COARSE_HPP
