#ifndef RISCHAN_PILOT_HPP
#define RISCHAN_PILOT_HPP

#include "rischan/types.hpp"

namespace rischan {

// Zadoff-Chu pilot configuration. Only the even-length form with root index 1
// is supported; the OFDM symbol length is N = zc_length + cp_length.
struct ZcPilot {
  int zc_length = 1024;   // L~, even
  int root = 1;           // r, fixed to 1
  int cp_length = 64;     // T_cp
  int window = 600;       // L, low-frequency estimation window, window < zc_length
  double rolloff = 0.3;   // mu in [0, 1]
  int oversample = 8;     // pulse-shaping lattice factor, >= 1
  double max_delay = 8.0; // R, |tau| bound in samples
  double advance = 0.0;   // g, sampling advance, 0 <= g < cp_length - max_delay

  int symbol_length() const { return zc_length + cp_length; }  // N
};

void validate(const ZcPilot& pilot);

using ChirpVector = CVec;

// s(n) = exp(j*pi*n^2/L~), n = -L~/2 .. L~/2-1.
CVec zc_sequence(const ZcPilot& pilot);

// Periodic extension of the ZC value at arbitrary integer index.
cdouble zc_value(const ZcPilot& pilot, long long n);

// Ideal chirp samples exp(j*pi*(n-tau)^2/L~) over an arbitrary window length.
CVec chirp_vector(int len, double zc_length, double tau);

// x(tau) on the estimation window; |tau| must not exceed max_delay.
ChirpVector delay_vector(const ZcPilot& pilot, double tau);

// d(xi)(n) = exp(j*2*pi*xi*n), n = -len/2 .. ; requires |xi| < 0.5.
ChirpVector doppler_vector(int len, double xi);

// CP-prepended, raised-cosine shaped pilot waveform on an oversampled lattice.
// samples[i] holds the waveform value at t = t_begin + i/oversample.
struct ShapedPilot {
  CVec samples;
  int oversample = 1;
  double t_begin = 0.0;

  // Band-limited interpolation on the oversampled lattice.
  cdouble at(double t) const;
};

ShapedPilot shaped_pilot(const ZcPilot& pilot);

// Window samples x(n - tau) of the shaped waveform, n = -L/2 .. L/2-1.
CVec sample_shaped(const ShapedPilot& wave, const ZcPilot& pilot, double tau);

// Y~ = Y diag(s*) with s restricted to the estimation window.
CMat compensate(const CMat& y, const ZcPilot& pilot);

}  // namespace rischan

#endif  // RISCHAN_PILOT_HPP
