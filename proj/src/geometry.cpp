#include "rischan/geometry.hpp"

#include <stdexcept>

namespace rischan {

void validate(const ArrayGeometry& geom) {
  if (geom.ris_rows < 1 || geom.ris_cols < 1 || geom.bs_antennas < 1) {
    throw std::invalid_argument("geometry: array counts must be >= 1");
  }
  if (geom.spacing_x <= 0 || geom.spacing_z <= 0 || geom.bs_spacing <= 0) {
    throw std::invalid_argument("geometry: element spacings must be > 0");
  }
  if (geom.wavelength <= 0) {
    throw std::invalid_argument("geometry: wavelength must be > 0");
  }
}

static void check_open_interval(double angle, const char* name) {
  if (!(angle > 0.0 && angle < kPi)) {
    throw std::domain_error(std::string(name) + " must lie in the open interval (0, pi)");
  }
}

namespace detail {

CVec ris_steering_unchecked(const ArrayGeometry& geom, double theta, double phi) {
  const int P = geom.ris_rows, Q = geom.ris_cols;
  const double k0 = kTwoPi / geom.wavelength;
  const double cq = -k0 * geom.spacing_x * std::sin(phi) * std::cos(theta);
  const double cp = k0 * geom.spacing_z * std::cos(phi);
  CVec a(P * Q);
  for (int q = 0; q < Q; ++q) {
    const cdouble col = std::exp(kJ * (cq * q));
    for (int p = 0; p < P; ++p) {
      a[q * P + p] = col * std::exp(kJ * (cp * p));
    }
  }
  return a;
}

CVec bs_steering_unchecked(const ArrayGeometry& geom, double theta_bar) {
  const double k0 = kTwoPi / geom.wavelength;
  const double ph = -k0 * geom.bs_spacing * std::cos(theta_bar);
  CVec c(geom.bs_antennas);
  for (int m = 0; m < geom.bs_antennas; ++m) {
    c[m] = std::exp(kJ * (ph * m));
  }
  return c;
}

}  // namespace detail

CVec ris_response(const ArrayGeometry& geom, const Angle2D& ang) {
  check_open_interval(ang.azimuth, "azimuth");
  check_open_interval(ang.elevation, "elevation");
  return detail::ris_steering_unchecked(geom, ang.azimuth, ang.elevation);
}

CVec bs_response(const ArrayGeometry& geom, double theta_bar) {
  check_open_interval(theta_bar, "theta");
  return detail::bs_steering_unchecked(geom, theta_bar);
}

RisSteeringDerivs ris_response_derivs(const ArrayGeometry& geom, const Angle2D& ang) {
  const int P = geom.ris_rows, Q = geom.ris_cols, M = P * Q;
  const double k0 = kTwoPi / geom.wavelength;
  const double kx = k0 * geom.spacing_x;
  const double kz = k0 * geom.spacing_z;
  const double st = std::sin(ang.azimuth), ct = std::cos(ang.azimuth);
  const double sp = std::sin(ang.elevation), cp = std::cos(ang.elevation);

  // Per-element phase psi_i = cq*q_i + cz*p_i with q_i, p_i the zero-based
  // column/row of element i; derivatives of (cq, cz) carry all angle
  // dependence, the element structure is a fixed linear ramp.
  const double cq = -kx * sp * ct;
  const double cz = kz * cp;
  const double cq_t = kx * sp * st;
  const double cq_p = -kx * cp * ct;
  const double cq_tt = kx * sp * ct;
  const double cq_tp = kx * cp * st;
  const double cq_pp = kx * sp * ct;
  const double cz_p = -kz * sp;
  const double cz_pp = -kz * cp;

  RisSteeringDerivs out;
  out.a.resize(M);
  out.d_theta.resize(M);
  out.d_phi.resize(M);
  out.d_theta_theta.resize(M);
  out.d_theta_phi.resize(M);
  out.d_phi_phi.resize(M);
  for (int q = 0; q < Q; ++q) {
    for (int p = 0; p < P; ++p) {
      const int i = q * P + p;
      const cdouble ai = std::exp(kJ * (cq * q + cz * p));
      const double pt = cq_t * q;                 // d(psi)/d(theta)
      const double pp = cq_p * q + cz_p * p;      // d(psi)/d(phi)
      out.a[i] = ai;
      out.d_theta[i] = kJ * pt * ai;
      out.d_phi[i] = kJ * pp * ai;
      out.d_theta_theta[i] = (kJ * (cq_tt * q) - pt * pt) * ai;
      out.d_theta_phi[i] = (kJ * (cq_tp * q) - pt * pp) * ai;
      out.d_phi_phi[i] = (kJ * (cq_pp * q + cz_pp * p) - pp * pp) * ai;
    }
  }
  return out;
}

BsSteeringDerivs bs_response_derivs(const ArrayGeometry& geom, double theta_bar) {
  const int Mr = geom.bs_antennas;
  const double kb = kTwoPi / geom.wavelength * geom.bs_spacing;
  const double ph = -kb * std::cos(theta_bar);
  const double ph_t = kb * std::sin(theta_bar);
  const double ph_tt = kb * std::cos(theta_bar);
  BsSteeringDerivs out;
  out.c.resize(Mr);
  out.d_theta.resize(Mr);
  out.d_theta_theta.resize(Mr);
  for (int m = 0; m < Mr; ++m) {
    const cdouble cm = std::exp(kJ * (ph * m));
    const double pt = ph_t * m;
    out.c[m] = cm;
    out.d_theta[m] = kJ * pt * cm;
    out.d_theta_theta[m] = (kJ * (ph_tt * m) - pt * pt) * cm;
  }
  return out;
}

}  // namespace rischan
