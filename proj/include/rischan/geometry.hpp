#ifndef RISCHAN_GEOMETRY_HPP
#define RISCHAN_GEOMETRY_HPP

#include "rischan/types.hpp"

namespace rischan {

// RIS uniform rectangular array (P rows x Q columns) plus the BS uniform
// linear array. Spacings and wavelength are in meters.
struct ArrayGeometry {
  int ris_rows = 1;       // P
  int ris_cols = 1;       // Q
  int bs_antennas = 1;    // M_r
  double spacing_x = 0.5; // d_x, RIS horizontal
  double spacing_z = 0.5; // d_z, RIS vertical
  double bs_spacing = 0.5;
  double wavelength = 1.0;

  int ris_elements() const { return ris_rows * ris_cols; }  // M = P*Q
};

void validate(const ArrayGeometry& geom);

// Azimuth/elevation pair in radians, both restricted to the open interval
// (0, pi); the endpoints are singular for the angle-frequency mapping.
struct Angle2D {
  double azimuth = kPi / 2;    // theta
  double elevation = kPi / 2;  // phi
};

// RIS steering vector, vec of the P x Q response taken column-major: the
// element in row p, column q sits at linear index (q-1)*P + p (1-based).
// Entry value: exp(-j*2pi/lambda*(q-1)*d_x*sin(phi)cos(theta)
//              + j*2pi/lambda*(p-1)*d_z*cos(phi)).
CVec ris_response(const ArrayGeometry& geom, const Angle2D& ang);

// BS steering vector, entry m = exp(-j*2pi/lambda*(m-1)*bs_spacing*cos(theta)).
CVec bs_response(const ArrayGeometry& geom, double theta_bar);

// Steering vector plus first and second derivatives in (theta, phi). Used by
// the Newton refinement of the angle objective and by the Fisher information
// matrix. Index order of the derivative blocks: [theta, phi].
struct RisSteeringDerivs {
  CVec a;
  CVec d_theta, d_phi;
  CVec d_theta_theta, d_theta_phi, d_phi_phi;
};

RisSteeringDerivs ris_response_derivs(const ArrayGeometry& geom, const Angle2D& ang);

struct BsSteeringDerivs {
  CVec c;
  CVec d_theta;
  CVec d_theta_theta;
};

BsSteeringDerivs bs_response_derivs(const ArrayGeometry& geom, double theta_bar);

namespace detail {
// Unvalidated steering evaluation; the public entry points validate the
// angle domain, the estimator internals share this core.
CVec ris_steering_unchecked(const ArrayGeometry& geom, double theta, double phi);
CVec bs_steering_unchecked(const ArrayGeometry& geom, double theta_bar);
}  // namespace detail

}  // namespace rischan

#endif  // RISCHAN_GEOMETRY_HPP
