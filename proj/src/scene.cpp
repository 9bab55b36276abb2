#include "rischan/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "rischan/rng.hpp"

namespace rischan {

void validate(const Scene& scene, double max_delay, int symbol_length) {
  auto check_common = [&](double delay, double doppler, const char* kind) {
    if (std::abs(delay) > max_delay) {
      throw std::invalid_argument(std::string(kind) + ": |delay| exceeds max_delay");
    }
    if (!(std::abs(doppler) * symbol_length < 0.5)) {
      throw std::invalid_argument(std::string(kind) +
                                  ": |doppler|*N must be < 0.5 (cross-observation aliasing)");
    }
  };
  for (const auto& p : scene.ris_paths) {
    check_common(p.delay, p.doppler, "ris path");
    if (!(p.azimuth > 0 && p.azimuth < kPi) || !(p.elevation > 0 && p.elevation < kPi)) {
      throw std::invalid_argument("ris path: angles must lie in (0, pi)");
    }
  }
  for (const auto& p : scene.direct_paths) {
    check_common(p.delay, p.doppler, "direct path");
    if (!(p.azimuth > 0 && p.azimuth < kPi)) {
      throw std::invalid_argument("direct path: angle must lie in (0, pi)");
    }
  }
}

void validate(const ObservationPlan& plan) {
  validate(plan.geom);
  if (plan.ris_on_count < 1) {
    throw std::invalid_argument("plan: ris_on_count must be >= 1");
  }
  if (plan.ris_off_count < 0) {
    throw std::invalid_argument("plan: ris_off_count must be >= 0");
  }
  if (plan.symbol_length < 1) {
    throw std::invalid_argument("plan: symbol_length must be >= 1");
  }
  if (!(plan.efficiency > 0.0 && plan.efficiency <= 1.0)) {
    throw std::invalid_argument("plan: efficiency must lie in (0, 1]");
  }
  if (static_cast<int>(plan.phases.size()) != plan.ris_on_count) {
    throw std::invalid_argument("plan: phase schedule size must equal ris_on_count");
  }
  const int M = plan.geom.ris_elements();
  for (const auto& phi : plan.phases) {
    if (phi.size() != M) {
      throw std::invalid_argument("plan: each phase vector must have M entries");
    }
  }
  if (plan.g.rows() != plan.geom.bs_antennas || plan.g.cols() != M) {
    throw std::invalid_argument("plan: G must be M_r x M");
  }
}

CMat mixing_matrix(const ObservationPlan& plan, int k) {
  if (k < 1 || k > plan.ris_on_count) {
    throw std::out_of_range("plan: observation index out of range");
  }
  const RVec& phi = plan.phases[k - 1];
  CMat w = plan.g;
  for (int m = 0; m < w.cols(); ++m) {
    w.col(m) *= plan.efficiency * std::exp(kJ * phi[m]);
  }
  return w;
}

CMat stacked_mixing(const ObservationPlan& plan, double xi) {
  const int Mr = plan.geom.bs_antennas;
  CMat stack(plan.ris_on_count * Mr, plan.geom.ris_elements());
  for (int k = 1; k <= plan.ris_on_count; ++k) {
    const cdouble ph = std::exp(kJ * (kTwoPi * xi * (k - 1) * plan.symbol_length));
    stack.middleRows((k - 1) * Mr, Mr) = ph * mixing_matrix(plan, k);
  }
  return stack;
}

CMat stacked_mixing_base(const ObservationPlan& plan) { return stacked_mixing(plan, 0.0); }

CVec doppler_stack(int count, int symbol_length, double xi_bar) {
  CVec p(count);
  for (int k = 0; k < count; ++k) {
    p[k] = std::exp(kJ * (kTwoPi * xi_bar * k * symbol_length));
  }
  return p;
}

CMat make_los_channel(const ArrayGeometry& geom, std::uint64_t seed) {
  Rng rng(stream_seed(seed, 0x47524953ULL));  // dedicated G stream
  // Direct line-of-sight ray between every RIS element and every BS antenna.
  // The BS sits in the RIS near field (the whole point of co-locating them),
  // so the spherical wavefront makes G full row rank. Entries stay unit
  // modulus: a pure phase per element pair.
  const double lam = geom.wavelength;
  const double dist = rng.uniform(10.0, 30.0) * lam;  // boresight separation
  const double x0 = rng.uniform(-5.0, 5.0) * lam;     // BS centre offsets
  const double z0 = rng.uniform(-5.0, 5.0) * lam;
  const int P = geom.ris_rows, Q = geom.ris_cols, Mr = geom.bs_antennas;
  // RIS elements in the x-z plane at y = 0, BS ULA along x at y = dist.
  const double ris_cx = 0.5 * (Q - 1) * geom.spacing_x;
  const double ris_cz = 0.5 * (P - 1) * geom.spacing_z;
  const double bs_cx = 0.5 * (Mr - 1) * geom.bs_spacing;
  CMat g(Mr, P * Q);
  for (int m = 0; m < Mr; ++m) {
    const double bx = x0 + m * geom.bs_spacing - bs_cx;
    for (int q = 0; q < Q; ++q) {
      for (int p = 0; p < P; ++p) {
        const double ex = q * geom.spacing_x - ris_cx;
        const double ez = p * geom.spacing_z - ris_cz;
        const double d = std::sqrt((bx - ex) * (bx - ex) + dist * dist +
                                   (z0 - ez) * (z0 - ez));
        g(m, q * P + p) = std::exp(-kJ * (kTwoPi * d / lam));
      }
    }
  }
  return g;
}

std::vector<RVec> random_phase_schedule(int count, int elements, int bits, Rng& rng) {
  if (bits < 1 || bits > 16) {
    throw std::invalid_argument("plan: phase_bits must lie in [1, 16]");
  }
  const std::uint32_t levels = 1u << bits;
  const double step = kTwoPi / levels;
  std::vector<RVec> out(count);
  for (auto& phi : out) {
    phi.resize(elements);
    for (int m = 0; m < elements; ++m) {
      phi[m] = step * rng.uniform_index(levels);
    }
  }
  return out;
}

}  // namespace rischan
