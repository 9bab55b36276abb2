#ifndef RISCHAN_SCENE_HPP
#define RISCHAN_SCENE_HPP

#include <vector>

#include "rischan/geometry.hpp"
#include "rischan/types.hpp"

namespace rischan {

// Ground-truth path through the RIS. Delays are in samples, Dopplers in
// cycles/sample, angles in radians. Gains are referenced to sample time 0.
struct RisPath {
  double delay = 0.0;      // tau
  double doppler = 0.0;    // xi
  double azimuth = kPi / 2;
  double elevation = kPi / 2;
  cdouble gain{1.0, 0.0};  // beta
};

struct DirectPath {
  double delay = 0.0;      // tau_bar
  double doppler = 0.0;    // xi_bar
  double azimuth = kPi / 2;  // theta_bar
  cdouble gain{1.0, 0.0};  // alpha
};

struct Scene {
  std::vector<RisPath> ris_paths;
  std::vector<DirectPath> direct_paths;
};

void validate(const Scene& scene, double max_delay, int symbol_length);

// One experiment's observation schedule: K RIS-on observations with phase
// states Phi_k, K_bar RIS-off observations, and the a-priori RIS-to-BS
// channel G. The geometry rides along so every consumer agrees on the
// element ordering.
struct ObservationPlan {
  ArrayGeometry geom;
  int ris_on_count = 1;    // K
  int ris_off_count = 0;   // K_bar
  int symbol_length = 0;   // N
  double efficiency = 1.0; // RIS reflection amplitude
  std::vector<RVec> phases; // K vectors of M entries
  CMat g;                  // M_r x M

  int stacked_rows() const { return ris_on_count * geom.bs_antennas; }
};

void validate(const ObservationPlan& plan);

// W(Phi_k) = G * diag(efficiency * exp(j*Phi_k)); k is 1-based.
CMat mixing_matrix(const ObservationPlan& plan, int k);

// Vertical stack of W(Phi_k) * exp(j*2*pi*xi*(k-1)*N), K*M_r x M.
CMat stacked_mixing(const ObservationPlan& plan, double xi);

// Plain vertical stack of the W(Phi_k) (xi = 0); cached by the estimators.
CMat stacked_mixing_base(const ObservationPlan& plan);

// p(xi_bar): entry k = exp(j*2*pi*xi_bar*(k-1)*N). B(xi_bar) = p kron I_{M_r}
// is only ever applied blockwise, never materialized.
CVec doppler_stack(int count, int symbol_length, double xi_bar);

// LOS rank-one RIS-to-BS channel with unit-modulus entries; the ray angles
// are drawn from the seeded stream so experiments replay bit-identically.
CMat make_los_channel(const ArrayGeometry& geom, std::uint64_t seed);

// Random 2^bits-ary phase schedule, entries in {0, 2pi/2^bits, ...}.
std::vector<RVec> random_phase_schedule(int count, int elements, int bits, class Rng& rng);

}  // namespace rischan

#endif  // RISCHAN_SCENE_HPP
