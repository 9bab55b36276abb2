#ifndef RISCHAN_TYPES_HPP
#define RISCHAN_TYPES_HPP

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace rischan {

using cdouble = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;
using IVec = Eigen::VectorXi;

inline constexpr double kPi = std::numbers::pi_v<double>;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi_v<double>;
inline constexpr cdouble kJ{0.0, 1.0};

// Sample window used throughout: indices run n = start .. start+len-1 with
// start = -(len/2), matching the centred pilot window.
inline int window_start(int len) { return -(len / 2); }

}  // namespace rischan

#endif  // RISCHAN_TYPES_HPP
