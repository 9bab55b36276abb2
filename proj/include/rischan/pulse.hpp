#ifndef RISCHAN_PULSE_HPP
#define RISCHAN_PULSE_HPP

#include <cmath>
#include <numbers>

namespace rischan {

// sin(pi*t)/(pi*t) with argument reduction so that integer t gives an exact
// zero; the raised-cosine tap tests rely on the Nyquist zeros being exact.
template <typename T>
T sinc_pi(T t) {
  if (t == T(0)) return T(1);
  const T k = std::nearbyint(t);
  const T r = t - k;  // |r| <= 1/2
  T s = std::sin(std::numbers::pi_v<T> * r);
  if (static_cast<long long>(k) % 2 != 0) s = -s;
  return s / (std::numbers::pi_v<T> * t);
}

// Raised-cosine interpolation pulse p(t) = sinc(t) * cos(pi*mu*t) / (1-(2*mu*t)^2)
// with the removable singularity at |t| = 1/(2*mu) evaluated by its limit
// (pi/4)*sinc(1/(2*mu)).
template <typename T>
T raised_cosine(T t, T rolloff) {
  if (rolloff == T(0)) return sinc_pi(t);
  const T q = T(2) * rolloff * t;
  const T denom = T(1) - q * q;
  if (std::abs(denom) < T(1e-8)) {
    const T ts = T(1) / (T(2) * rolloff);
    return std::numbers::pi_v<T> / T(4) * sinc_pi(ts);
  }
  return sinc_pi(t) * std::cos(std::numbers::pi_v<T> * rolloff * t) / denom;
}

}  // namespace rischan

#endif  // RISCHAN_PULSE_HPP
