#ifndef RISCHAN_RNG_HPP
#define RISCHAN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "rischan/types.hpp"

namespace rischan {

// splitmix64; used to derive independent per-trial stream seeds from a master
// seed plus arbitrary tags, so trial order never affects the draws.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t tag0,
                                 std::uint64_t tag1 = 0, std::uint64_t tag2 = 0) {
  std::uint64_t s = mix64(master ^ 0x5851f42d4c957f2dULL);
  s = mix64(s ^ mix64(tag0));
  s = mix64(s ^ mix64(tag1 + 0x632be59bd9b4e019ULL));
  s = mix64(s ^ mix64(tag2 + 0x9e6c63d0876a9a47ULL));
  return s;
}

// Self-contained draws on top of mt19937_64. std::*_distribution is not
// guaranteed to produce identical sequences across standard libraries, and the
// output files are contracted to be byte-stable, hence the hand-rolled
// uniform/normal transforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint32_t uniform_index(std::uint32_t n) {
    return static_cast<std::uint32_t>(gen_() % n);
  }

  // standard normal via Box-Muller
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(kTwoPi * u2);
    have_spare_ = true;
    return r * std::cos(kTwoPi * u2);
  }

  // circularly-symmetric complex normal with E|z|^2 = var
  cdouble cnormal(double var) {
    const double s = std::sqrt(var / 2.0);
    return {s * normal(), s * normal()};
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace rischan

#endif  // RISCHAN_RNG_HPP
