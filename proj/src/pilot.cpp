#include "rischan/pilot.hpp"

#include <cmath>
#include <stdexcept>

#include "rischan/pulse.hpp"

namespace rischan {

void validate(const ZcPilot& pilot) {
  if (pilot.zc_length < 2 || pilot.zc_length % 2 != 0) {
    throw std::invalid_argument("pilot: zc_length must be even and >= 2");
  }
  if (pilot.root != 1) {
    throw std::invalid_argument("pilot: only root index 1 is supported");
  }
  if (pilot.window < 1 || pilot.window >= pilot.zc_length) {
    throw std::invalid_argument("pilot: window must satisfy 0 < window < zc_length");
  }
  if (pilot.cp_length < 0) {
    throw std::invalid_argument("pilot: cp_length must be >= 0");
  }
  if (pilot.rolloff < 0.0 || pilot.rolloff > 1.0) {
    throw std::invalid_argument("pilot: rolloff must lie in [0, 1]");
  }
  if (pilot.oversample < 1) {
    throw std::invalid_argument("pilot: oversample must be >= 1");
  }
  if (pilot.max_delay < 0.0) {
    throw std::invalid_argument("pilot: max_delay must be >= 0");
  }
  if (!(pilot.advance >= 0.0 && pilot.advance < pilot.cp_length - pilot.max_delay)) {
    throw std::invalid_argument(
        "pilot: ISI-free condition 0 <= advance < cp_length - max_delay violated");
  }
}

CVec zc_sequence(const ZcPilot& pilot) {
  if (pilot.zc_length % 2 != 0) {
    throw std::invalid_argument("pilot: zc_sequence requires an even zc_length");
  }
  const int L = pilot.zc_length;
  const int n0 = window_start(L);
  CVec s(L);
  for (int i = 0; i < L; ++i) {
    const double n = n0 + i;
    s[i] = std::exp(kJ * (kPi * n * n / L));
  }
  return s;
}

cdouble zc_value(const ZcPilot& pilot, long long n) {
  const long long L = pilot.zc_length;
  long long m = n % L;  // periodic: s(n) = s(n + L~) for even L~
  if (m < -L / 2) m += L;
  if (m >= L / 2) m -= L;
  const double nd = static_cast<double>(m);
  return std::exp(kJ * (kPi * nd * nd / L));
}

CVec chirp_vector(int len, double zc_length, double tau) {
  const int n0 = window_start(len);
  CVec x(len);
  for (int i = 0; i < len; ++i) {
    const double n = n0 + i;
    const double d = n - tau;
    x[i] = std::exp(kJ * (kPi * d * d / zc_length));
  }
  return x;
}

ChirpVector delay_vector(const ZcPilot& pilot, double tau) {
  if (std::abs(tau) > pilot.max_delay) {
    throw std::domain_error("pilot: |tau| exceeds the configured max_delay");
  }
  return chirp_vector(pilot.window, pilot.zc_length, tau);
}

ChirpVector doppler_vector(int len, double xi) {
  if (!(std::abs(xi) < 0.5)) {
    throw std::domain_error("pilot: |xi| must be < 0.5 cycles/sample");
  }
  const int n0 = window_start(len);
  CVec d(len);
  for (int i = 0; i < len; ++i) {
    d[i] = std::exp(kJ * (kTwoPi * xi * (n0 + i)));
  }
  return d;
}

namespace {

// Half-width of the truncated raised-cosine synthesis kernel, in input samples.
constexpr int kShapeTaps = 64;
// Half-width of the interpolation kernel on the oversampled lattice, in input
// samples (so kInterpTaps * oversample lattice points per side).
constexpr int kInterpTaps = 16;

double hann_window(double x, double half_width) {
  const double c = std::cos(kPi * x / (2.0 * half_width));
  return c * c;
}

}  // namespace

ShapedPilot shaped_pilot(const ZcPilot& pilot) {
  validate(pilot);
  const int os = pilot.oversample;
  const long long mlo = -static_cast<long long>(pilot.zc_length) / 2 - pilot.cp_length;
  const long long mhi = pilot.zc_length / 2 - 1;  // inclusive
  const double pad = kInterpTaps + 2;
  ShapedPilot wave;
  wave.oversample = os;
  wave.t_begin = static_cast<double>(mlo) - pad;
  const long long npts = static_cast<long long>((mhi + pad - wave.t_begin) * os) + 1;
  wave.samples.resize(npts);
  for (long long i = 0; i < npts; ++i) {
    const double t = wave.t_begin + static_cast<double>(i) / os;
    // x(t) = sum_m c(m) p(t - m) over the CP-extended sequence, kernel truncated.
    const long long m0 = std::max(mlo, static_cast<long long>(std::ceil(t)) - kShapeTaps);
    const long long m1 = std::min(mhi, static_cast<long long>(std::floor(t)) + kShapeTaps);
    cdouble acc{0.0, 0.0};
    for (long long m = m0; m <= m1; ++m) {
      acc += zc_value(pilot, m) * raised_cosine(t - m, pilot.rolloff);
    }
    wave.samples[i] = acc;
  }
  return wave;
}

cdouble ShapedPilot::at(double t) const {
  const double u = (t - t_begin) * oversample;
  const long long nearest = std::llround(u);
  if (std::abs(u - nearest) < 1e-9 && nearest >= 0 && nearest < samples.size()) {
    return samples[nearest];
  }
  const int half = kInterpTaps * oversample;
  const long long i0 = std::max<long long>(0, static_cast<long long>(std::ceil(u)) - half);
  const long long i1 =
      std::min<long long>(samples.size() - 1, static_cast<long long>(std::floor(u)) + half);
  cdouble acc{0.0, 0.0};
  for (long long i = i0; i <= i1; ++i) {
    const double x = u - i;  // lattice offset
    acc += samples[i] * sinc_pi(x) * hann_window(x, half);
  }
  return acc;
}

CVec sample_shaped(const ShapedPilot& wave, const ZcPilot& pilot, double tau) {
  const int L = pilot.window;
  const int n0 = window_start(L);
  CVec x(L);
  for (int i = 0; i < L; ++i) {
    x[i] = wave.at(n0 + i - tau);
  }
  return x;
}

CMat compensate(const CMat& y, const ZcPilot& pilot) {
  const int L = pilot.window;
  if (y.cols() != L) {
    throw std::invalid_argument("pilot: block width does not match the estimation window");
  }
  const int n0 = window_start(L);
  CMat out(y.rows(), L);
  for (int i = 0; i < L; ++i) {
    out.col(i) = y.col(i) * std::conj(zc_value(pilot, n0 + i));
  }
  return out;
}

}  // namespace rischan
