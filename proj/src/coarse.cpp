#include "rischan/coarse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

namespace rischan {

void validate(const GridSpec& grid) {
  for (int n : {grid.n_theta, grid.n_phi, grid.n_zeta, grid.n_xi, grid.n_theta_bar,
                grid.n_zeta_bar, grid.n_xi_bar}) {
    if (n < 2) throw std::invalid_argument("grid: every FFT size must be >= 2");
  }
}

namespace detail {

CMat window_dft(const CMat& block, int n_fft) {
  const int L = static_cast<int>(block.cols());
  const int n0 = window_start(L);
  CMat out(block.rows(), n_fft);
  Eigen::FFT<double> fft;
  CVec buf(n_fft), spec(n_fft);
  for (int m = 0; m < block.rows(); ++m) {
    buf.setZero();
    for (int i = 0; i < L; ++i) {
      int pos = (n0 + i) % n_fft;
      if (pos < 0) pos += n_fft;
      buf[pos] += block(m, i);
    }
    fft.fwd(spec, buf);
    out.row(m) = spec.transpose();
  }
  return out;
}

}  // namespace detail

namespace {

// Frequency-to-parameter unwrap shared by both searches.
double wrap_half(double f) { return f < 0.5 ? f : f - 1.0; }

double clamped_acos(double x, bool& clamped) {
  if (x > 1.0) {
    clamped = true;
    x = 1.0;
  } else if (x < -1.0) {
    clamped = true;
    x = -1.0;
  }
  return std::acos(x);
}

// Keep returned angles strictly inside (0, pi) so downstream steering
// evaluation accepts them; only boundary (already flagged) cases move.
double into_open_interval(double ang) {
  constexpr double eps = 1e-9;
  return std::clamp(ang, eps, kPi - eps);
}

struct SpatialAngles {
  double theta, phi;
  bool clamped;
};

SpatialAngles unwrap_ris_angles(const ArrayGeometry& geom, double fx, double fy) {
  SpatialAngles out{0.0, 0.0, false};
  const double lam = geom.wavelength;
  out.phi = clamped_acos(lam * fx / geom.spacing_z, out.clamped);
  const double sp = std::sin(out.phi);
  if (sp < 1e-12) {
    out.clamped = true;
    out.theta = kPi / 2;
  } else {
    out.theta = clamped_acos(-lam * fy / (geom.spacing_x * sp), out.clamped);
  }
  out.theta = into_open_interval(out.theta);
  out.phi = into_open_interval(out.phi);
  return out;
}

CMat dft_matrix(int n_grid, int n_points) {
  CMat f(n_grid, n_points);
  for (int r = 0; r < n_grid; ++r) {
    for (int c = 0; c < n_points; ++c) {
      f(r, c) = std::exp(-kJ * (kTwoPi * static_cast<double>(r) * c / n_grid));
    }
  }
  return f;
}

// N_xi x K table of e^{-j 2 pi n_xi k / N_xi}.
CMat xi_twiddles(int n_xi, int blocks) {
  CMat w(n_xi, blocks);
  for (int r = 0; r < n_xi; ++r) {
    for (int k = 0; k < blocks; ++k) {
      w(r, k) = std::exp(-kJ * (kTwoPi * static_cast<double>(r) * k / n_xi));
    }
  }
  return w;
}

}  // namespace

DenominatorCache precompute_denominator(const ObservationPlan& plan, const GridSpec& grid) {
  validate(plan);
  validate(grid);
  const int P = plan.geom.ris_rows, Q = plan.geom.ris_cols;
  const int Mr = plan.geom.bs_antennas, K = plan.ris_on_count;
  const int ns = grid.n_phi * grid.n_theta;

  const CMat fp = dft_matrix(grid.n_phi, P);    // vertical axis (f_x)
  const CMat fq = dft_matrix(grid.n_theta, Q);  // horizontal axis (f_y)

  DenominatorCache cache;
  cache.n_phi = grid.n_phi;
  cache.n_theta = grid.n_theta;
  cache.r_fft.resize(K);
  cache.row_norms.resize(K, ns);
  for (int k = 0; k < K; ++k) {
    const CMat wh = mixing_matrix(plan, k + 1).adjoint();  // M x M_r
    CMat r(ns, Mr);
    for (int m = 0; m < Mr; ++m) {
      Eigen::Map<const CMat> wr(wh.col(m).data(), P, Q);
      const CMat f2 = fp * wr * fq.transpose();  // n_phi x n_theta
      r.col(m) = Eigen::Map<const CVec>(f2.data(), ns);
    }
    cache.row_norms.row(k) = r.rowwise().squaredNorm().transpose();
    cache.r_fft[k] = std::move(r);
  }
  cache.gamma = cache.row_norms.colwise().sum().transpose();
  const double gmax = cache.gamma.maxCoeff();
  if (!(gmax > 0.0) || cache.gamma.minCoeff() <= 1e-14 * gmax) {
    throw std::runtime_error(
        "coarse: degenerate plan, a spatial grid frequency is unobservable (gamma ~ 0)");
  }
  return cache;
}

CoarseEstimate coarse_ris(const CMat& ytilde, const ObservationPlan& plan, const GridSpec& grid,
                          const DenominatorCache& cache) {
  const int Mr = plan.geom.bs_antennas, K = plan.ris_on_count;
  if (ytilde.rows() != K * Mr) {
    throw std::invalid_argument("coarse: ytilde row count does not match the plan");
  }
  if (cache.n_phi != grid.n_phi || cache.n_theta != grid.n_theta ||
      static_cast<int>(cache.r_fft.size()) != K) {
    throw std::invalid_argument("coarse: denominator cache does not match plan/grid");
  }
  const int ns = grid.n_phi * grid.n_theta;
  const int nz = grid.n_zeta, nx = grid.n_xi;

  // Temporal DFT bank B^{(k)} and its column norms.
  std::vector<CMat> b(K);
  RMat col_norms(K, nz);
  for (int k = 0; k < K; ++k) {
    b[k] = detail::window_dft(ytilde.middleRows(k * Mr, Mr), nz);
    col_norms.row(k) = b[k].colwise().squaredNorm();
  }
  const CMat wxi = xi_twiddles(nx, K);

  // Exact branch-and-bound argmax. Cell (n, nzeta) admits the bound
  //   max_{nxi} |sum_k q_k e|^2 <= K * sum_k |q_k|^2
  //            <= K * sum_k ||R^k(n,:)||^2 ||B^k(:,nzeta)||^2,
  // so whole cells are skipped before any q_k is formed. A first pass seeds
  // the incumbent with the exact value at the loosest-bound cell.
  const double invK = static_cast<double>(K);
  Eigen::Index seed_n = 0, seed_z = 0;
  double seed_ub = -1.0;
  for (int z = 0; z < nz; ++z) {
    for (int n = 0; n < ns; ++n) {
      const double ub = invK * cache.row_norms.col(n).dot(col_norms.col(z)) / cache.gamma[n];
      if (ub > seed_ub) {
        seed_ub = ub;
        seed_n = n;
        seed_z = z;
      }
    }
  }

  CVec q(K);
  auto cell_values = [&](Eigen::Index n, Eigen::Index z) {
    for (int k = 0; k < K; ++k) q[k] = (cache.r_fft[k].row(n) * b[k].col(z)).value();
  };

  double best = -1.0;
  long long best_idx = -1;
  Eigen::Index bn = 0, bz = 0, bx = 0;
  auto scan_cell = [&](Eigen::Index n, Eigen::Index z) {
    // refined bound with the exact q in hand
    const double qn2 = q.squaredNorm();
    if (invK * qn2 / cache.gamma[n] < best) return;
    for (int x = 0; x < nx; ++x) {
      const double val = std::norm((wxi.row(x) * q).value()) / cache.gamma[n];
      const long long idx = (static_cast<long long>(z) * ns + n) * nx + x;
      if (val > best || (val == best && idx < best_idx)) {
        best = val;
        best_idx = idx;
        bn = n;
        bz = z;
        bx = x;
      }
    }
  };

  cell_values(seed_n, seed_z);
  scan_cell(seed_n, seed_z);
  for (int z = 0; z < nz; ++z) {
    for (int n = 0; n < ns; ++n) {
      const double ub = invK * cache.row_norms.col(n).dot(col_norms.col(z)) / cache.gamma[n];
      if (ub < best) continue;
      cell_values(n, z);
      scan_cell(n, z);
    }
  }

  const double fx = wrap_half(static_cast<double>(bn % grid.n_phi) / grid.n_phi);
  const double fy = wrap_half(static_cast<double>(bn / grid.n_phi) / grid.n_theta);
  const SpatialAngles ang = unwrap_ris_angles(plan.geom, fx, fy);

  CoarseEstimate est;
  est.zeta = wrap_half(static_cast<double>(bz) / nz);
  est.xi = wrap_half(static_cast<double>(bx) / nx) / plan.symbol_length;
  est.theta = ang.theta;
  est.phi = ang.phi;
  est.objective = best;
  est.clamped = ang.clamped;
  return est;
}

CoarseEstimate coarse_direct(const CMat& ytilde, const ObservationPlan& plan,
                             const GridSpec& grid) {
  validate(grid);
  const int Mr = plan.geom.bs_antennas;
  if (ytilde.rows() % Mr != 0) {
    throw std::invalid_argument("coarse: ytilde row count is not a multiple of M_r");
  }
  const int kbar = static_cast<int>(ytilde.rows()) / Mr;
  const int nt = grid.n_theta_bar, nz = grid.n_zeta_bar;
  const bool xi_ok = kbar >= 2;
  const int nx = xi_ok ? grid.n_xi_bar : 1;

  const CMat fm = dft_matrix(nt, Mr);  // spatial DFT over antennas
  std::vector<CMat> v(kbar);
  for (int k = 0; k < kbar; ++k) {
    v[k] = detail::window_dft(fm * ytilde.middleRows(k * Mr, Mr), nz);  // nt x nz
  }
  const CMat wxi = xi_twiddles(nx, kbar);

  CVec q(kbar);
  double best = -1.0;
  long long best_idx = -1;
  Eigen::Index bn = 0, bz = 0, bx = 0;
  const double invK = static_cast<double>(kbar);
  for (int z = 0; z < nz; ++z) {
    for (int n = 0; n < nt; ++n) {
      for (int k = 0; k < kbar; ++k) q[k] = v[k](n, z);
      if (invK * q.squaredNorm() < best) continue;
      for (int x = 0; x < nx; ++x) {
        const double val = std::norm((wxi.row(x) * q).value());
        const long long idx = (static_cast<long long>(z) * nt + n) * nx + x;
        if (val > best || (val == best && idx < best_idx)) {
          best = val;
          best_idx = idx;
          bn = n;
          bz = z;
          bx = x;
        }
      }
    }
  }

  CoarseEstimate est;
  bool clamped = false;
  const double fbar = wrap_half(static_cast<double>(bn) / nt);
  est.theta = into_open_interval(
      clamped_acos(-plan.geom.wavelength * fbar / plan.geom.bs_spacing, clamped));
  est.zeta = wrap_half(static_cast<double>(bz) / nz);
  est.xi = xi_ok ? wrap_half(static_cast<double>(bx) / nx) / plan.symbol_length : 0.0;
  est.objective = best;
  est.clamped = clamped;
  est.xi_identifiable = xi_ok;
  return est;
}

RVec ris_objective_grid(const CMat& ytilde, const ObservationPlan& plan, const GridSpec& grid,
                        const DenominatorCache& cache) {
  const int Mr = plan.geom.bs_antennas, K = plan.ris_on_count;
  const int ns = grid.n_phi * grid.n_theta, nz = grid.n_zeta, nx = grid.n_xi;
  std::vector<CMat> b(K);
  for (int k = 0; k < K; ++k) {
    b[k] = detail::window_dft(ytilde.middleRows(k * Mr, Mr), nz);
  }
  const CMat wxi = xi_twiddles(nx, K);
  RVec out(static_cast<long long>(ns) * nz * nx);
  CVec q(K);
  for (int z = 0; z < nz; ++z) {
    for (int n = 0; n < ns; ++n) {
      for (int k = 0; k < K; ++k) q[k] = (cache.r_fft[k].row(n) * b[k].col(z)).value();
      for (int x = 0; x < nx; ++x) {
        out[(static_cast<long long>(z) * ns + n) * nx + x] =
            std::norm((wxi.row(x) * q).value()) / cache.gamma[n];
      }
    }
  }
  return out;
}

RVec direct_objective_grid(const CMat& ytilde, const ObservationPlan& plan,
                           const GridSpec& grid) {
  const int Mr = plan.geom.bs_antennas;
  const int kbar = static_cast<int>(ytilde.rows()) / Mr;
  const int nt = grid.n_theta_bar, nz = grid.n_zeta_bar, nx = grid.n_xi_bar;
  const CMat fm = dft_matrix(nt, Mr);
  std::vector<CMat> v(kbar);
  for (int k = 0; k < kbar; ++k) {
    v[k] = detail::window_dft(fm * ytilde.middleRows(k * Mr, Mr), nz);
  }
  const CMat wxi = xi_twiddles(nx, kbar);
  RVec out(static_cast<long long>(nt) * nz * nx);
  CVec q(kbar);
  for (int z = 0; z < nz; ++z) {
    for (int n = 0; n < nt; ++n) {
      for (int k = 0; k < kbar; ++k) q[k] = v[k](n, z);
      for (int x = 0; x < nx; ++x) {
        out[(static_cast<long long>(z) * nt + n) * nx + x] = std::norm((wxi.row(x) * q).value());
      }
    }
  }
  return out;
}

}  // namespace rischan
