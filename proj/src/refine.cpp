#include "rischan/refine.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "rischan/geometry.hpp"

namespace rischan {

namespace {

// d(-zeta) sample vector e^{-j 2 pi zeta n} over the centred window.
CVec neg_doppler(int len, double zeta) {
  const int n0 = window_start(len);
  CVec e(len);
  for (int i = 0; i < len; ++i) {
    e[i] = std::exp(-kJ * (kTwoPi * zeta * (n0 + i)));
  }
  return e;
}

RVec window_indices(int len) {
  const int n0 = window_start(len);
  RVec n(len);
  for (int i = 0; i < len; ++i) n[i] = n0 + i;
  return n;
}

// Gradient and Hessian of |z|^2 from z and its first/second derivatives.
void abs2_derivs(const cdouble& z, const CVec& dz, const CMat& d2z, double& f, RVec& g,
                 RMat& h) {
  const int d = static_cast<int>(dz.size());
  f = std::norm(z);
  g.resize(d);
  h.resize(d, d);
  for (int i = 0; i < d; ++i) {
    g[i] = 2.0 * std::real(std::conj(z) * dz[i]);
    for (int j = 0; j <= i; ++j) {
      h(i, j) = h(j, i) =
          2.0 * std::real(std::conj(dz[i]) * dz[j] + std::conj(z) * d2z(i, j));
    }
  }
}

// Lambda_1 engine: z(zeta, xi) = sum_k e^{-j2piNxi k} V(k,:) d(-zeta) with
// V(k,:) = (W_k a)^H Y~_k fixed.
struct ZetaXiObjective {
  CMat v;      // K x L
  double n_symbol;
  int blocks;

  ZetaXiObjective(const CMat& ytilde, const ObservationPlan& plan, double theta, double phi) {
    const int Mr = plan.geom.bs_antennas;
    blocks = plan.ris_on_count;
    n_symbol = plan.symbol_length;
    const CVec a = detail::ris_steering_unchecked(plan.geom, theta, phi);
    v.resize(blocks, ytilde.cols());
    for (int k = 0; k < blocks; ++k) {
      const CVec wa = mixing_matrix(plan, k + 1) * a;
      v.row(k) = wa.adjoint() * ytilde.middleRows(k * Mr, Mr);
    }
  }

  cdouble z_only(const RVec& psi) const {
    const CVec e = neg_doppler(static_cast<int>(v.cols()), psi[0]);
    cdouble z{0.0, 0.0};
    for (int k = 0; k < blocks; ++k) {
      const cdouble wk = std::exp(-kJ * (kTwoPi * n_symbol * psi[1] * k));
      z += wk * (v.row(k) * e).value();
    }
    return z;
  }

  void derivs(const RVec& psi, double& f, RVec& g, RMat& h) const {
    const int L = static_cast<int>(v.cols());
    const CVec e = neg_doppler(L, psi[0]);
    const RVec n = window_indices(L);
    const CVec ne = n.cast<cdouble>().cwiseProduct(e);
    const CVec n2e = n.cwiseProduct(n).cast<cdouble>().cwiseProduct(e);
    cdouble t00{}, t10{}, t20{}, t01{}, t11{}, t02{};
    for (int k = 0; k < blocks; ++k) {
      const double fk = n_symbol * k;
      const cdouble wk = std::exp(-kJ * (kTwoPi * psi[1] * fk));
      const cdouble s0 = (v.row(k) * e).value();
      const cdouble s1 = (v.row(k) * ne).value();
      const cdouble s2 = (v.row(k) * n2e).value();
      t00 += wk * s0;
      t10 += wk * s1;
      t20 += wk * s2;
      t01 += wk * (fk * s0);
      t11 += wk * (fk * s1);
      t02 += wk * (fk * fk * s0);
    }
    const cdouble mj2pi = -kJ * kTwoPi;
    const double m4pi2 = -kTwoPi * kTwoPi;
    CVec dz(2);
    dz << mj2pi * t10, mj2pi * t01;
    CMat d2z(2, 2);
    d2z(0, 0) = m4pi2 * t20;
    d2z(0, 1) = d2z(1, 0) = m4pi2 * t11;
    d2z(1, 1) = m4pi2 * t02;
    abs2_derivs(t00, dz, d2z, f, g, h);
  }
};

// Lambda_2 engine: |a(theta,phi)^H r|^2 / ||W_all a||^2.
struct AngleObjective {
  CVec r;      // M
  CMat w_all;  // K M_r x M
  const ArrayGeometry* geom;

  AngleObjective(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi)
      : geom(&plan.geom) {
    const int Mr = plan.geom.bs_antennas;
    const CVec e = neg_doppler(static_cast<int>(ytilde.cols()), zeta);
    r = CVec::Zero(plan.geom.ris_elements());
    w_all.resize(plan.ris_on_count * Mr, plan.geom.ris_elements());
    for (int k = 0; k < plan.ris_on_count; ++k) {
      const CMat wk = mixing_matrix(plan, k + 1);
      const cdouble ph = std::exp(-kJ * (kTwoPi * xi * k * plan.symbol_length));
      r.noalias() += ph * (wk.adjoint() * (ytilde.middleRows(k * Mr, Mr) * e));
      w_all.middleRows(k * Mr, Mr) = wk;
    }
  }

  double value(const RVec& psi) const {
    const CVec a = detail::ris_steering_unchecked(*geom, psi[0], psi[1]);
    const cdouble c0 = (a.adjoint() * r).value();
    const double den = (w_all * a).squaredNorm();
    return std::norm(c0) / den;
  }

  void derivs(const RVec& psi, double& f, RVec& g, RMat& h) const {
    const RisSteeringDerivs sd = ris_response_derivs(*geom, {psi[0], psi[1]});
    const cdouble c0 = (sd.a.adjoint() * r).value();
    const cdouble ct = (sd.d_theta.adjoint() * r).value();
    const cdouble cp = (sd.d_phi.adjoint() * r).value();
    const cdouble ctt = (sd.d_theta_theta.adjoint() * r).value();
    const cdouble ctp = (sd.d_theta_phi.adjoint() * r).value();
    const cdouble cpp = (sd.d_phi_phi.adjoint() * r).value();

    const CVec u0 = w_all * sd.a;
    const CVec ut = w_all * sd.d_theta;
    const CVec up = w_all * sd.d_phi;
    const CVec utt = w_all * sd.d_theta_theta;
    const CVec utp = w_all * sd.d_theta_phi;
    const CVec upp = w_all * sd.d_phi_phi;

    const double num = std::norm(c0);
    const double nt = 2.0 * std::real(std::conj(c0) * ct);
    const double np = 2.0 * std::real(std::conj(c0) * cp);
    const double ntt = 2.0 * std::real(std::conj(ct) * ct + std::conj(c0) * ctt);
    const double ntp = 2.0 * std::real(std::conj(cp) * ct + std::conj(c0) * ctp);
    const double npp = 2.0 * std::real(std::conj(cp) * cp + std::conj(c0) * cpp);

    const double den = u0.squaredNorm();
    const double dt = 2.0 * std::real(u0.dot(ut));
    const double dp = 2.0 * std::real(u0.dot(up));
    const double dtt = 2.0 * std::real(ut.dot(ut) + u0.dot(utt));
    const double dtp = 2.0 * std::real(up.dot(ut) + u0.dot(utp));
    const double dpp = 2.0 * std::real(up.dot(up) + u0.dot(upp));

    f = num / den;
    g.resize(2);
    g[0] = (nt - f * dt) / den;
    g[1] = (np - f * dp) / den;
    h.resize(2, 2);
    h(0, 0) = (ntt - f * dtt - 2.0 * g[0] * dt) / den;
    h(1, 1) = (npp - f * dpp - 2.0 * g[1] * dp) / den;
    h(0, 1) = h(1, 0) = (ntp - f * dtp - g[0] * dp - g[1] * dt) / den;
  }
};

// Lambda_3 engine over (zeta_bar, xi_bar, theta_bar).
struct DirectObjective {
  const CMat* ytilde;
  const ArrayGeometry* geom;
  double n_symbol;
  int blocks;

  DirectObjective(const CMat& yt, const ObservationPlan& plan)
      : ytilde(&yt), geom(&plan.geom), n_symbol(plan.symbol_length) {
    blocks = static_cast<int>(yt.rows()) / plan.geom.bs_antennas;
  }

  cdouble z_only(const RVec& psi) const {
    const int Mr = geom->bs_antennas;
    const int L = static_cast<int>(ytilde->cols());
    const CVec e = neg_doppler(L, psi[0]);
    const CVec c = detail::bs_steering_unchecked(*geom, psi[2]);
    cdouble z{0.0, 0.0};
    for (int k = 0; k < blocks; ++k) {
      const cdouble wk = std::exp(-kJ * (kTwoPi * n_symbol * psi[1] * k));
      z += wk * (c.adjoint() * (ytilde->middleRows(k * Mr, Mr) * e)).value();
    }
    return z;
  }

  void derivs(const RVec& psi, double& f, RVec& g, RMat& h) const {
    const int Mr = geom->bs_antennas;
    const int L = static_cast<int>(ytilde->cols());
    const CVec e = neg_doppler(L, psi[0]);
    const RVec n = window_indices(L);
    const CVec ne = n.cast<cdouble>().cwiseProduct(e);
    const CVec n2e = n.cwiseProduct(n).cast<cdouble>().cwiseProduct(e);

    const BsSteeringDerivs sd = bs_response_derivs(*geom, psi[2]);
    const CVec c0 = sd.c.conjugate();
    const CVec c1 = sd.d_theta.conjugate();
    const CVec c2 = sd.d_theta_theta.conjugate();

    // T_{abc}: n-moment a, block-moment b, steering-derivative order c.
    cdouble t[3][3][3] = {};
    for (int k = 0; k < blocks; ++k) {
      const auto yk = ytilde->middleRows(k * Mr, Mr);
      const CVec r0 = yk * e;
      const CVec r1 = yk * ne;
      const CVec r2 = yk * n2e;
      const double fk = n_symbol * k;
      const cdouble wk = std::exp(-kJ * (kTwoPi * psi[1] * fk));
      const cdouble a00 = (c0.transpose() * r0).value(), a01 = (c1.transpose() * r0).value(),
                    a02 = (c2.transpose() * r0).value();
      const cdouble a10 = (c0.transpose() * r1).value(), a11 = (c1.transpose() * r1).value();
      const cdouble a20 = (c0.transpose() * r2).value();
      t[0][0][0] += wk * a00;
      t[1][0][0] += wk * a10;
      t[2][0][0] += wk * a20;
      t[0][1][0] += wk * (fk * a00);
      t[0][2][0] += wk * (fk * fk * a00);
      t[1][1][0] += wk * (fk * a10);
      t[0][0][1] += wk * a01;
      t[0][0][2] += wk * a02;
      t[1][0][1] += wk * a11;
      t[0][1][1] += wk * (fk * a01);
    }
    const cdouble mj2pi = -kJ * kTwoPi;
    const double m4pi2 = -kTwoPi * kTwoPi;
    const cdouble z = t[0][0][0];
    CVec dz(3);
    dz << mj2pi * t[1][0][0], mj2pi * t[0][1][0], t[0][0][1];
    CMat d2z(3, 3);
    d2z(0, 0) = m4pi2 * t[2][0][0];
    d2z(1, 1) = m4pi2 * t[0][2][0];
    d2z(2, 2) = t[0][0][2];
    d2z(0, 1) = d2z(1, 0) = m4pi2 * t[1][1][0];
    d2z(0, 2) = d2z(2, 0) = mj2pi * t[1][0][1];
    d2z(1, 2) = d2z(2, 1) = mj2pi * t[0][1][1];
    abs2_derivs(z, dz, d2z, f, g, h);
  }
};

}  // namespace

NewtonResult newton_maximize(
    const std::function<void(const RVec&, double&, RVec&, RMat&)>& derivs,
    const std::function<double(const RVec&)>& value, const RVec& init, const RVec& cell,
    const NewtonOptions& opts) {
  const int dim = static_cast<int>(init.size());
  NewtonResult res;
  res.psi = init;
  RVec g(dim);
  RMat h(dim, dim);
  double f = 0.0;
  derivs(res.psi, f, g, h);

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    double gscale = 0.0;
    for (int i = 0; i < dim; ++i) gscale = std::max(gscale, std::abs(g[i]) * cell[i]);
    if (gscale <= opts.grad_tol * std::max(std::abs(f), 1e-300)) {
      res.converged = true;
      break;
    }

    RVec dir = -h.fullPivLu().solve(g);
    if (!dir.allFinite() || g.dot(dir) <= 0.0) dir = g;  // ascent safeguard

    // Stay inside the coarse cell: init +/- cell per coordinate.
    double alpha = 1.0;
    for (int i = 0; i < dim; ++i) {
      if (dir[i] > 0.0) {
        alpha = std::min(alpha, (init[i] + cell[i] - res.psi[i]) / dir[i]);
      } else if (dir[i] < 0.0) {
        alpha = std::min(alpha, (res.psi[i] - (init[i] - cell[i])) / (-dir[i]));
      }
    }
    if (!(alpha > 1e-18)) break;  // pinned to the trust box

    const double gd = g.dot(dir);
    bool accepted = false;
    double fc = f;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      fc = value(res.psi + alpha * dir);
      if (fc >= f + opts.armijo_c * alpha * gd) {
        accepted = true;
        break;
      }
      alpha *= opts.shrink;
    }
    if (!accepted) break;

    const RVec step = alpha * dir;
    res.psi += step;
    derivs(res.psi, f, g, h);
    ++res.iterations;
    if (step.lpNorm<Eigen::Infinity>() <= opts.param_tol) {
      res.converged = true;
      break;
    }
  }
  res.objective = f;
  return res;
}

NewtonResult refine_zeta_xi(const CMat& ytilde, const ObservationPlan& plan, double theta,
                            double phi, double zeta0, double xi0, const RVec& cell,
                            const NewtonOptions& opts) {
  const ZetaXiObjective obj(ytilde, plan, theta, phi);
  RVec init(2);
  init << zeta0, xi0;
  return newton_maximize(
      [&](const RVec& p, double& f, RVec& g, RMat& h) { obj.derivs(p, f, g, h); },
      [&](const RVec& p) { return std::norm(obj.z_only(p)); }, init, cell, opts);
}

NewtonResult refine_angles(const CMat& ytilde, const ObservationPlan& plan, double zeta,
                           double xi, double theta0, double phi0, const RVec& cell,
                           const NewtonOptions& opts) {
  const AngleObjective obj(ytilde, plan, zeta, xi);
  RVec init(2);
  init << theta0, phi0;
  return newton_maximize(
      [&](const RVec& p, double& f, RVec& g, RMat& h) { obj.derivs(p, f, g, h); },
      [&](const RVec& p) { return obj.value(p); }, init, cell, opts);
}

NewtonResult refine_direct(const CMat& ytilde, const ObservationPlan& plan, double zeta0,
                           double xi0, double theta0, const RVec& cell,
                           const NewtonOptions& opts) {
  const DirectObjective obj(ytilde, plan);
  if (obj.blocks >= 2) {
    RVec init(3);
    init << zeta0, xi0, theta0;
    return newton_maximize(
        [&](const RVec& p, double& f, RVec& g, RMat& h) { obj.derivs(p, f, g, h); },
        [&](const RVec& p) { return std::norm(obj.z_only(p)); }, init, cell, opts);
  }
  // Single observation: xi_bar is unidentifiable, keep it frozen at zero.
  RVec init(2);
  init << zeta0, theta0;
  RVec cell2(2);
  cell2 << cell[0], cell[2];
  auto lift = [](const RVec& p) {
    RVec q(3);
    q << p[0], 0.0, p[1];
    return q;
  };
  NewtonResult r = newton_maximize(
      [&](const RVec& p, double& f, RVec& g, RMat& h) {
        double f3;
        RVec g3;
        RMat h3;
        obj.derivs(lift(p), f3, g3, h3);
        f = f3;
        g.resize(2);
        g << g3[0], g3[2];
        h.resize(2, 2);
        h << h3(0, 0), h3(0, 2), h3(2, 0), h3(2, 2);
      },
      [&](const RVec& p) { return std::norm(obj.z_only(lift(p))); }, init, cell2, opts);
  NewtonResult out;
  out.psi = lift(r.psi);
  out.objective = r.objective;
  out.iterations = r.iterations;
  out.converged = r.converged;
  return out;
}

RVec ris_cell_widths(const ObservationPlan& plan, const GridSpec& grid, double theta,
                     double phi) {
  const double lam = plan.geom.wavelength;
  const double sp = std::abs(std::sin(phi));
  const double st = std::abs(std::sin(theta));
  RVec cell(4);
  cell[0] = 1.0 / grid.n_zeta;
  cell[1] = 1.0 / (static_cast<double>(grid.n_xi) * plan.symbol_length);
  cell[2] = std::min(0.5, lam / (grid.n_theta * plan.geom.spacing_x * std::max(sp * st, 0.05)));
  cell[3] = std::min(0.5, lam / (grid.n_phi * plan.geom.spacing_z * std::max(sp, 0.05)));
  return cell;
}

RVec direct_cell_widths(const ObservationPlan& plan, const GridSpec& grid, double theta) {
  const double st = std::abs(std::sin(theta));
  RVec cell(3);
  cell[0] = 1.0 / grid.n_zeta_bar;
  cell[1] = 1.0 / (static_cast<double>(grid.n_xi_bar) * plan.symbol_length);
  cell[2] = std::min(0.5, plan.geom.wavelength /
                              (grid.n_theta_bar * plan.geom.bs_spacing * std::max(st, 0.05)));
  return cell;
}

AlternateResult alternate(const CMat& ytilde, const ObservationPlan& plan,
                          const CoarseEstimate& coarse, const GridSpec& grid,
                          const NewtonOptions& opts, int max_cycles, double tol) {
  AlternateResult st;
  st.zeta = coarse.zeta;
  st.xi = coarse.xi;
  st.theta = coarse.theta;
  st.phi = coarse.phi;
  for (int cycle = 1; cycle <= max_cycles; ++cycle) {
    const RVec cell = ris_cell_widths(plan, grid, st.theta, st.phi);
    RVec c1(2), c2(2);
    c1 << cell[0], cell[1];
    c2 << cell[2], cell[3];
    const NewtonResult r1 =
        refine_zeta_xi(ytilde, plan, st.theta, st.phi, st.zeta, st.xi, c1, opts);
    const NewtonResult r2 =
        refine_angles(ytilde, plan, r1.psi[0], r1.psi[1], st.theta, st.phi, c2, opts);
    const double delta =
        std::max({std::abs(r1.psi[0] - st.zeta), std::abs(r1.psi[1] - st.xi),
                  std::abs(r2.psi[0] - st.theta), std::abs(r2.psi[1] - st.phi)});
    st.zeta = r1.psi[0];
    st.xi = r1.psi[1];
    st.theta = r2.psi[0];
    st.phi = r2.psi[1];
    st.cycles = cycle;
    if (delta < tol) {
      st.converged = true;
      break;
    }
  }
  st.objective = ml_objective_ris(ytilde, plan, st.zeta, st.xi, st.theta, st.phi);
  return st;
}

namespace {

// Shared numerator/denominator of the reduced RIS objective.
void ris_num_den(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                 double theta, double phi, cdouble& z, double& den) {
  const int Mr = plan.geom.bs_antennas;
  const CVec a = detail::ris_steering_unchecked(plan.geom, theta, phi);
  const CVec e = neg_doppler(static_cast<int>(ytilde.cols()), zeta);
  z = cdouble{0.0, 0.0};
  den = 0.0;
  for (int k = 0; k < plan.ris_on_count; ++k) {
    const CVec wa = mixing_matrix(plan, k + 1) * a;
    const cdouble wk = std::exp(-kJ * (kTwoPi * xi * k * plan.symbol_length));
    z += wk * (wa.adjoint() * (ytilde.middleRows(k * Mr, Mr) * e)).value();
    den += wa.squaredNorm();
  }
}

}  // namespace

cdouble gain_ris(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                 double theta, double phi) {
  cdouble z;
  double den;
  ris_num_den(ytilde, plan, zeta, xi, theta, phi, z, den);
  return z / (static_cast<double>(ytilde.cols()) * den);
}

double ml_objective_ris(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                        double theta, double phi) {
  cdouble z;
  double den;
  ris_num_den(ytilde, plan, zeta, xi, theta, phi, z, den);
  return std::norm(z) / den;
}

cdouble gain_direct(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                    double theta) {
  const DirectObjective obj(ytilde, plan);
  RVec psi(3);
  psi << zeta, xi, theta;
  const cdouble z = obj.z_only(psi);
  const double den = static_cast<double>(ytilde.cols()) * obj.blocks * plan.geom.bs_antennas;
  return z / den;
}

double ml_objective_direct(const CMat& ytilde, const ObservationPlan& plan, double zeta,
                           double xi, double theta) {
  const DirectObjective obj(ytilde, plan);
  RVec psi(3);
  psi << zeta, xi, theta;
  return std::norm(obj.z_only(psi));
}

double lambda1_value(const CMat& ytilde, const ObservationPlan& plan, double theta, double phi,
                     const RVec& psi) {
  return std::norm(ZetaXiObjective(ytilde, plan, theta, phi).z_only(psi));
}

void lambda1_derivs(const CMat& ytilde, const ObservationPlan& plan, double theta, double phi,
                    const RVec& psi, double& f, RVec& g, RMat& h) {
  ZetaXiObjective(ytilde, plan, theta, phi).derivs(psi, f, g, h);
}

double lambda2_value(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                     const RVec& psi) {
  return AngleObjective(ytilde, plan, zeta, xi).value(psi);
}

void lambda2_derivs(const CMat& ytilde, const ObservationPlan& plan, double zeta, double xi,
                    const RVec& psi, double& f, RVec& g, RMat& h) {
  AngleObjective(ytilde, plan, zeta, xi).derivs(psi, f, g, h);
}

double lambda3_value(const CMat& ytilde, const ObservationPlan& plan, const RVec& psi) {
  return std::norm(DirectObjective(ytilde, plan).z_only(psi));
}

void lambda3_derivs(const CMat& ytilde, const ObservationPlan& plan, const RVec& psi,
                    double& f, RVec& g, RMat& h) {
  DirectObjective(ytilde, plan).derivs(psi, f, g, h);
}

}  // namespace rischan
