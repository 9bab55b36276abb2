#include "rischan/recon.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/FFT>

#include "rischan/pulse.hpp"

namespace rischan {

namespace {

RVec pulse_taps(const ZcPilot& pilot, double tau) {
  RVec p(pilot.zc_length);
  for (int n = 0; n < pilot.zc_length; ++n) {
    p[n] = raised_cosine(static_cast<double>(n) - tau, pilot.rolloff);
  }
  return p;
}

// One parametric term g * s * p^T of a channel response.
struct Term {
  cdouble gain;
  CVec steering;
  RVec pulse;
};

double gram_norm2(const std::vector<Term>& terms) {
  double total = 0.0;
  const int n = static_cast<int>(terms.size());
  for (int i = 0; i < n; ++i) {
    total += std::norm(terms[i].gain) * terms[i].steering.squaredNorm() *
             terms[i].pulse.squaredNorm();
    for (int j = i + 1; j < n; ++j) {
      const cdouble cross = std::conj(terms[i].gain) * terms[j].gain *
                            terms[i].steering.dot(terms[j].steering) *
                            terms[i].pulse.dot(terms[j].pulse);
      total += 2.0 * std::real(cross);
    }
  }
  return std::max(total, 0.0);
}

std::vector<Term> ris_terms(const std::vector<RisPath>& paths, const ArrayGeometry& geom,
                            const ZcPilot& pilot, double t, double sign) {
  std::vector<Term> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    Term term;
    term.gain = sign * p.gain * std::exp(kJ * (kTwoPi * p.doppler * t));
    term.steering = detail::ris_steering_unchecked(geom, p.azimuth, p.elevation);
    term.pulse = pulse_taps(pilot, p.delay);
    out.push_back(std::move(term));
  }
  return out;
}

std::vector<Term> direct_terms(const std::vector<DirectPath>& paths, const ArrayGeometry& geom,
                               const ZcPilot& pilot, double t, double sign) {
  std::vector<Term> out;
  out.reserve(paths.size());
  for (const auto& p : paths) {
    Term term;
    term.gain = sign * p.gain * std::exp(kJ * (kTwoPi * p.doppler * t));
    term.steering = detail::bs_steering_unchecked(geom, p.azimuth);
    term.pulse = pulse_taps(pilot, p.delay);
    out.push_back(std::move(term));
  }
  return out;
}

CMat materialize(const std::vector<Term>& terms, int rows, int taps) {
  CMat h = CMat::Zero(rows, taps);
  for (const auto& term : terms) {
    h.noalias() += term.gain * term.steering * term.pulse.transpose().cast<cdouble>();
  }
  return h;
}

}  // namespace

ChannelResponse ris_channel(const std::vector<RisPath>& paths, const ArrayGeometry& geom,
                            const ZcPilot& pilot, double t) {
  ChannelResponse resp;
  resp.taps = materialize(ris_terms(paths, geom, pilot, t, 1.0), geom.ris_elements(),
                          pilot.zc_length);
  resp.t_ref = t;
  return resp;
}

ChannelResponse direct_channel(const std::vector<DirectPath>& paths, const ArrayGeometry& geom,
                               const ZcPilot& pilot, double t, double advance) {
  ChannelResponse resp;
  resp.taps = materialize(direct_terms(paths, geom, pilot, t + advance, 1.0), geom.bs_antennas,
                          pilot.zc_length);
  resp.t_ref = t;
  return resp;
}

std::vector<RisPath> to_ris_paths(const EstimateReport& report) {
  std::vector<RisPath> out;
  out.reserve(report.ris_paths.size());
  for (const auto& p : report.ris_paths) {
    out.push_back({p.tau, p.xi, p.theta, p.phi, p.beta});
  }
  return out;
}

std::vector<DirectPath> to_direct_paths(const EstimateReport& report, double advance_samples) {
  std::vector<DirectPath> out;
  out.reserve(report.direct_paths.size());
  for (const auto& p : report.direct_paths) {
    DirectPath d{p.tau, p.xi, p.theta, p.alpha};
    d.gain *= std::exp(kJ * (kTwoPi * p.xi * advance_samples));
    out.push_back(d);
  }
  return out;
}

ChannelResponse reconstruct_ris(const EstimateReport& report, const ArrayGeometry& geom,
                                const ZcPilot& pilot, double t) {
  if (report.ris_paths.empty()) {
    throw std::invalid_argument("recon: report has no RIS paths");
  }
  return ris_channel(to_ris_paths(report), geom, pilot, t);
}

ChannelResponse reconstruct_direct(const EstimateReport& report, const ArrayGeometry& geom,
                                   const ZcPilot& pilot, double t, int kbar) {
  if (report.direct_paths.empty()) {
    throw std::invalid_argument("recon: report has no direct paths");
  }
  const double advance = static_cast<double>(kbar) * pilot.symbol_length();
  return direct_channel(to_direct_paths(report, 0.0), geom, pilot, t, advance);
}

ChannelResponse to_frequency(const ChannelResponse& resp) {
  if (resp.domain != Domain::time) {
    throw std::invalid_argument("recon: response is already in the frequency domain");
  }
  ChannelResponse out;
  out.domain = Domain::frequency;
  out.t_ref = resp.t_ref;
  const int n = static_cast<int>(resp.taps.cols());
  out.taps.resize(resp.taps.rows(), n);
  Eigen::FFT<double> fft;
  CVec in(n), spec(n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int r = 0; r < resp.taps.rows(); ++r) {
    in = resp.taps.row(r).transpose();
    fft.fwd(spec, in);
    out.taps.row(r) = scale * spec.transpose();
  }
  return out;
}

ChannelResponse to_time(const ChannelResponse& resp) {
  if (resp.domain != Domain::frequency) {
    throw std::invalid_argument("recon: response is already in the time domain");
  }
  ChannelResponse out;
  out.domain = Domain::time;
  out.t_ref = resp.t_ref;
  const int n = static_cast<int>(resp.taps.cols());
  out.taps.resize(resp.taps.rows(), n);
  Eigen::FFT<double> fft;
  CVec in(n), time(n);
  const double scale = std::sqrt(static_cast<double>(n));
  for (int r = 0; r < resp.taps.rows(); ++r) {
    in = resp.taps.row(r).transpose();
    fft.inv(time, in);
    out.taps.row(r) = scale * time.transpose();
  }
  return out;
}

double rmse(const ChannelResponse& est, const ChannelResponse& truth) {
  if (est.domain != truth.domain) {
    throw std::invalid_argument("recon: rmse requires matching domains");
  }
  if (est.taps.rows() != truth.taps.rows() || est.taps.cols() != truth.taps.cols()) {
    throw std::invalid_argument("recon: rmse requires matching shapes");
  }
  return (est.taps - truth.taps).norm() / std::sqrt(static_cast<double>(est.taps.size()));
}

double ris_channel_rmse(const std::vector<RisPath>& est, double t_est,
                        const std::vector<RisPath>& truth, double t_truth,
                        const ArrayGeometry& geom, const ZcPilot& pilot) {
  std::vector<Term> terms = ris_terms(est, geom, pilot, t_est, 1.0);
  std::vector<Term> neg = ris_terms(truth, geom, pilot, t_truth, -1.0);
  terms.insert(terms.end(), std::make_move_iterator(neg.begin()),
               std::make_move_iterator(neg.end()));
  const double n = static_cast<double>(geom.ris_elements()) * pilot.zc_length;
  return std::sqrt(gram_norm2(terms) / n);
}

double direct_channel_rmse(const std::vector<DirectPath>& est, double t_est,
                           const std::vector<DirectPath>& truth, double t_truth,
                           const ArrayGeometry& geom, const ZcPilot& pilot) {
  std::vector<Term> terms = direct_terms(est, geom, pilot, t_est, 1.0);
  std::vector<Term> neg = direct_terms(truth, geom, pilot, t_truth, -1.0);
  terms.insert(terms.end(), std::make_move_iterator(neg.begin()),
               std::make_move_iterator(neg.end()));
  const double n = static_cast<double>(geom.bs_antennas) * pilot.zc_length;
  return std::sqrt(gram_norm2(terms) / n);
}

double ris_channel_rms(const std::vector<RisPath>& paths, const ArrayGeometry& geom,
                       const ZcPilot& pilot, double t) {
  const double n = static_cast<double>(geom.ris_elements()) * pilot.zc_length;
  return std::sqrt(gram_norm2(ris_terms(paths, geom, pilot, t, 1.0)) / n);
}

double direct_channel_rms(const std::vector<DirectPath>& paths, const ArrayGeometry& geom,
                          const ZcPilot& pilot, double t) {
  const double n = static_cast<double>(geom.bs_antennas) * pilot.zc_length;
  return std::sqrt(gram_norm2(direct_terms(paths, geom, pilot, t, 1.0)) / n);
}

}  // namespace rischan
