// SPDX-License-Identifier: Apache-2.0
//
// hardening: coefficient-of-variation statistics.
//
// The hardening metric is CV^2 = Var{||H||_F^2} / E{||H||_F^2}^2. For the
// ray model it decomposes into a small-scale term
//   E2(A_tx, D_tx) E2(A_rx, D_rx) E{||c||^4 - ||c||_4^4} / E{||c||^2}^2
// plus the large-scale term Var{||c||^2} / E{||c||^2}^2, where E2 is the
// second moment of the steering-vector inner product for two independent
// ray directions. Conditioning on ||c||^2 cancels the large-scale part and
// leaves E2 E2 alpha^2(c) with alpha^2 = 1 - ||c||_4^4 / ||c||_2^4.

#ifndef HARDENING_HARDENING_STATS_HPP
#define HARDENING_HARDENING_STATS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <variant>

#include "hardening/array_geometry.hpp"
#include "hardening/mc_engine.hpp"
#include "hardening/ray_channel.hpp"

namespace hardening {

/// CV^2 split into its small-scale and large-scale parts. By construction
/// cv2_small_scale == e2_tx * e2_rx * alpha2 and cv2_total is their sum with
/// the large-scale term.
struct HardeningReport {
  double cv2_total = 0.0;
  double cv2_small_scale = 0.0;
  double cv2_large_scale = 0.0;
  double e2_tx = 1.0;
  double e2_rx = 1.0;
  double alpha2 = 0.0;
};

/// Hermitian positive semi-definite matrix for the correlated-Rayleigh
/// baseline h ~ CN(0, R). Validated on construction.
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(Eigen::MatrixXcd r) : r_(std::move(r)) {
    if (r_.rows() != r_.cols() || r_.rows() < 1) {
      throw std::invalid_argument("CovarianceMatrix: must be square");
    }
    if (!r_.allFinite()) {
      throw std::invalid_argument("CovarianceMatrix: non-finite entries");
    }
    const double scale = std::max(1.0, r_.cwiseAbs().maxCoeff());
    if ((r_ - r_.adjoint()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
      throw std::invalid_argument("CovarianceMatrix: not Hermitian");
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
        r_, Eigen::EigenvaluesOnly);
    const double trace = r_.trace().real();
    if (solver.eigenvalues().minCoeff() < -1e-9 * std::max(trace, 1.0)) {
      throw std::invalid_argument(
          "CovarianceMatrix: not positive semi-definite");
    }
  }

  const Eigen::MatrixXcd& matrix() const { return r_; }
  Eigen::Index size() const { return r_.rows(); }
  double trace() const { return r_.trace().real(); }

 private:
  Eigen::MatrixXcd r_;
};

// --- coefficient of variation ------------------------------------------------

/// CV^2 = Var{g}/E{g}^2 from a four-moment accumulator of gain samples.
/// The confidence half-width comes from the delta method on the joint
/// (mean, variance) estimator; the returned `variance` field holds the
/// per-sample asymptotic variance so ci == 1.96 sqrt(variance/n).
inline MomentEstimate cv2_from_accumulator(const MomentAccumulator& acc) {
  if (acc.count() < 2) {
    throw std::invalid_argument("cv2 estimate: need at least 2 samples");
  }
  MomentEstimate est;
  est.n = acc.count();
  const double mu2 = acc.central_moment2();
  if (mu2 == 0.0) {
    // All samples equal: deterministic gain, CV^2 = 0 with zero variance.
    return est;
  }
  const double m = acc.mean();
  if (m == 0.0) {
    throw std::invalid_argument("cv2 estimate: zero mean with spread samples");
  }
  const double v = acc.variance_unbiased();
  est.mean = v / (m * m);
  const double mu3 = acc.central_moment3();
  const double mu4 = acc.central_moment4();
  const double m2 = m * m;
  const double m4 = m2 * m2;
  // grad f = (-2V/m^3, 1/m^2) against the asymptotic covariance of
  // (mean, variance): [[mu2, mu3], [mu3, mu4 - mu2^2]] / n.
  double var_t = 4.0 * v * v * mu2 / (m4 * m2) - 4.0 * v * mu3 / (m4 * m) +
                 (mu4 - mu2 * mu2) / m4;
  if (var_t < 0.0) var_t = 0.0;
  est.variance = var_t;
  est.ci_half_width = 1.96 * std::sqrt(var_t / static_cast<double>(est.n));
  return est;
}

/// CV^2 of a sample sequence (gains are nonnegative reals).
inline MomentEstimate cv2_from_samples(std::span<const double> gains) {
  if (gains.size() < 2) {
    throw std::invalid_argument("cv2_from_samples: need at least 2 samples");
  }
  MomentAccumulator acc;
  for (const double g : gains) acc.add(g);
  return cv2_from_accumulator(acc);
}

/// CV^2 of the aggregated ray power ||c||^2 (the large-scale term of the
/// decomposition). For i.i.d. per-ray powers of mean mu and deviation sigma
/// this converges to (sigma/mu)^2 / P.
inline MomentEstimate large_scale_term(std::span<const double> power_samples) {
  return cv2_from_samples(power_samples);
}

/// Correlated-Rayleigh baseline: CV^2 = Tr(R^2) / Tr(R)^2, in [1/N, 1].
inline double rayleigh_cv2(const CovarianceMatrix& r) {
  const double trace = r.trace();
  if (!(trace > 0.0)) {
    throw std::invalid_argument("rayleigh_cv2: covariance trace must be > 0");
  }
  // Tr(R^2) == ||R||_F^2 for Hermitian R.
  return r.matrix().squaredNorm() / (trace * trace);
}

// --- ray-correlation factor E^2 ----------------------------------------------

/// Monte-Carlo estimate of E2(A, D) = E{ |<e(d), e(d')>|^2 } over i.i.d.
/// direction pairs. Lies in (0, 1]; approaches 1/N for spacings >= lambda/2
/// under uniform-sphere directions.
inline MomentEstimate e2_estimate(const ArrayTopology& topology,
                                  const DirectionLaw& dir_law,
                                  std::uint64_t trials, const SeedSpec& seed,
                                  unsigned workers = 0) {
  return run_trials(
      [&](std::uint64_t, RngStream& rng) {
        const Vec3 d1 = sample_direction(dir_law, rng);
        const Vec3 d2 = sample_direction(dir_law, rng);
        return steering_correlation(topology, d1, d2);
      },
      trials, seed, workers);
}

/// Closed form of E2 under uniform-sphere directions,
///   E2 = (1/N^2) sum_{i,k} sinc^2(2 pi |a_i - a_k| / lambda),
/// from the spherical characteristic function E{e^{j v.u}} = sin|v|/|v|.
/// Exact small-N cross-check for e2_estimate; for a ULA at lambda/2 spacing
/// it collapses to exactly 1/N.
inline double e2_lattice_sum(const ArrayTopology& topology) {
  const Eigen::Index n = topology.size();
  const double scale = 2.0 * kPi / topology.wavelength();
  double total = static_cast<double>(n);  // i == k terms
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const double x =
          scale * (topology.positions().col(i) - topology.positions().col(k)).norm();
      const double sinc = x < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
      total += 2.0 * sinc * sinc;
    }
  }
  return total / static_cast<double>(n * n);
}

// --- propagation factor alpha^2 ----------------------------------------------

/// alpha^2(c) = 1 - ||c||_4^4 / ||c||_2^4 in [0, 1 - 1/P]. Zero iff a single
/// ray carries all power; the upper bound is attained exactly for P rays of
/// equal power (Holder equality), and those extremes are returned exactly.
inline double alpha2(std::span<const double> amplitudes) {
  const std::size_t p = amplitudes.size();
  if (p == 0) throw std::invalid_argument("alpha2: empty amplitude vector");
  double max_a = 0.0;
  double min_a = std::numeric_limits<double>::infinity();
  for (const double a : amplitudes) {
    if (!(a >= 0.0) || !std::isfinite(a)) {
      throw std::invalid_argument("alpha2: amplitudes must be finite and >= 0");
    }
    max_a = std::max(max_a, a);
    min_a = std::min(min_a, a);
  }
  if (max_a == 0.0) {
    throw std::invalid_argument("alpha2: all-zero amplitudes");
  }
  const double bound = 1.0 - 1.0 / static_cast<double>(p);
  if (p == 1) return 0.0;
  if (min_a == max_a) return bound;
  double sum2 = 0.0;
  double sum4 = 0.0;
  for (const double a : amplitudes) {
    const double a2 = a * a;
    sum2 += a2;
    sum4 += a2 * a2;
  }
  const double value = 1.0 - sum4 / (sum2 * sum2);
  return std::clamp(value, 0.0, bound);
}

inline double alpha2(const Eigen::VectorXd& amplitudes) {
  return alpha2(std::span<const double>(amplitudes.data(),
                                        static_cast<std::size_t>(amplitudes.size())));
}

// --- closed-form CV^2 ---------------------------------------------------------

/// Moments of the gain law entering the closed form: E{||c||^2},
/// E{||c||^4} and E{||c||_4^4} = E{sum_p |c_p|^4}.
struct GainLawMoments {
  double total_power_mean = 0.0;
  double total_power_sq_mean = 0.0;
  double quartic_sum_mean = 0.0;
};

/// Analytic moments for the built-in gain laws with P rays. For i.i.d.
/// CN(0, v) gains the per-ray power is exponential with E X = v, E X^2 =
/// 2 v^2, giving {P v, v^2 P(P+1), 2 P v^2}.
inline GainLawMoments analytic_gain_moments(const GainLaw& law,
                                            Eigen::Index p_count) {
  if (p_count < 1) {
    throw std::invalid_argument("analytic_gain_moments: p_count must be >= 1");
  }
  const double p = static_cast<double>(p_count);
  if (const auto* gaussian = std::get_if<ComplexGaussianGain>(&law)) {
    const double v = gaussian->variance;
    return {p * v, v * v * p * (p + 1.0), 2.0 * p * v * v};
  }
  if (const auto* fixed = std::get_if<FixedAmplitudesGain>(&law)) {
    if (fixed->amplitudes.size() != p_count) {
      throw std::invalid_argument(
          "analytic_gain_moments: amplitude count must equal p_count");
    }
    const Eigen::ArrayXd sq = fixed->amplitudes.array().square();
    const double s2 = sq.sum();
    return {s2, s2 * s2, sq.square().sum()};
  }
  return {p, p * p, p};  // equal power, |c_p| = 1
}

namespace detail {

inline void require_e2(double e2, const char* what) {
  if (!(e2 > 0.0) || e2 > 1.0 + 1e-12) {
    throw std::invalid_argument(std::string(what) + ": E2 must lie in (0, 1]");
  }
}

}  // namespace detail

/// Closed-form CV^2 for i.i.d. ray directions:
///   CV^2 = e2_tx e2_rx (E||c||^4 - E||c||_4^4)/E{||c||^2}^2
///        + Var{||c||^2}/E{||c||^2}^2.
/// The first term is the small-scale part, the second the large-scale part.
inline HardeningReport cv2_closed_form(double e2_tx, double e2_rx,
                                       const GainLawMoments& moments) {
  detail::require_e2(e2_tx, "cv2_closed_form");
  detail::require_e2(e2_rx, "cv2_closed_form");
  const double e2 = moments.total_power_mean;
  const double e4 = moments.total_power_sq_mean;
  const double q4 = moments.quartic_sum_mean;
  if (!(e2 > 0.0) || !std::isfinite(e2) || !std::isfinite(e4) ||
      !std::isfinite(q4)) {
    throw std::invalid_argument("cv2_closed_form: non-finite or zero moments");
  }
  const double slack = 1e-12 * std::max({1.0, e4, e2 * e2});
  if (e4 < e2 * e2 - slack || q4 > e4 + slack || q4 < 0.0) {
    throw std::invalid_argument("cv2_closed_form: inconsistent moments");
  }
  HardeningReport report;
  report.e2_tx = e2_tx;
  report.e2_rx = e2_rx;
  report.alpha2 = std::max(0.0, (e4 - q4) / (e2 * e2));
  if (report.alpha2 >= 1.0) {
    throw std::invalid_argument(
        "cv2_closed_form: moments imply alpha2 >= 1 (requires i.i.d. rays)");
  }
  report.cv2_small_scale = e2_tx * e2_rx * report.alpha2;
  report.cv2_large_scale = std::max(0.0, (e4 - e2 * e2) / (e2 * e2));
  report.cv2_total = report.cv2_small_scale + report.cv2_large_scale;
  return report;
}

/// Conditional model (fixed amplitudes, uniform phases):
/// CV^2_{||c||^2} = e2_tx * e2_rx * alpha2(c). Valid for i.i.d. ray
/// directions only; the large-scale term is cancelled by the conditioning.
inline double cv2_conditional_closed_form(double e2_tx, double e2_rx,
                                          std::span<const double> amplitudes) {
  detail::require_e2(e2_tx, "cv2_conditional_closed_form");
  detail::require_e2(e2_rx, "cv2_conditional_closed_form");
  return e2_tx * e2_rx * alpha2(amplitudes);
}

inline double cv2_conditional_closed_form(double e2_tx, double e2_rx,
                                          const Eigen::VectorXd& amplitudes) {
  return cv2_conditional_closed_form(
      e2_tx, e2_rx,
      std::span<const double>(amplitudes.data(),
                              static_cast<std::size_t>(amplitudes.size())));
}

// --- Monte-Carlo estimators over the ray model --------------------------------

/// CV^2 of the channel gain ||H||_F^2 under the given ray distribution,
/// estimated over `trials` independent realizations.
inline MomentEstimate channel_cv2_estimate(const RayDistribution& dist,
                                           Eigen::Index p_count,
                                           const ArrayTopology& tx,
                                           const ArrayTopology& rx,
                                           std::uint64_t trials,
                                           const SeedSpec& seed,
                                           unsigned workers = 0) {
  const MomentAccumulator acc = accumulate_trials(
      [&](std::uint64_t, RngStream& rng) {
        return channel_gain(assemble_channel(sample_rayset(dist, p_count, rng), tx, rx));
      },
      trials, seed, workers);
  return cv2_from_accumulator(acc);
}

/// Symmetric coupling matrix J of the quadratic form
///   ||H||_F^2 / (Nt Nr) = ||c||^2 + a^T J a,  a_p = |c_p|,
/// with [J]_{pp'} = |gamma_{pp'}| cos(phi_{pp'}) off the diagonal, where
/// gamma_{pp'} = <e_r,p, e_r,p'> <e_t,p, e_t,p'>^* and
/// phi_{pp'} = arg(c_p^* c_p' gamma_{pp'}).
inline Eigen::MatrixXd ray_coupling_matrix(const RaySet& rays,
                                           const ArrayTopology& tx,
                                           const ArrayTopology& rx) {
  const Eigen::Index p_count = rays.path_count();
  std::vector<Eigen::VectorXcd> et(static_cast<std::size_t>(p_count));
  std::vector<Eigen::VectorXcd> er(static_cast<std::size_t>(p_count));
  for (Eigen::Index p = 0; p < p_count; ++p) {
    const Ray& ray = rays.rays()[static_cast<std::size_t>(p)];
    et[static_cast<std::size_t>(p)] = steering_vector(tx, ray.dod);
    er[static_cast<std::size_t>(p)] = steering_vector(rx, ray.doa);
  }
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(p_count, p_count);
  for (Eigen::Index p = 0; p < p_count; ++p) {
    for (Eigen::Index q = p + 1; q < p_count; ++q) {
      const Complex gamma =
          er[static_cast<std::size_t>(p)].dot(er[static_cast<std::size_t>(q)]) *
          std::conj(et[static_cast<std::size_t>(p)].dot(et[static_cast<std::size_t>(q)]));
      const Complex cp = rays.rays()[static_cast<std::size_t>(p)].gain;
      const Complex cq = rays.rays()[static_cast<std::size_t>(q)].gain;
      const double entry =
          std::abs(gamma) * std::cos(std::arg(std::conj(cp) * cq * gamma));
      j(p, q) = entry;
      j(q, p) = entry;
    }
  }
  return j;
}

/// The two routes to E{||H||_F^4}: `direct` averages the squared channel
/// gain of assembled realizations; `decomposed` averages
/// (Nt Nr)^2 (||c||^4 + (a^T J a)^2), whose cross term vanishes in
/// expectation under uniform phases. Both runs use identical ray draws
/// (same trial streams), so the comparison is paired.
struct FourthMomentPair {
  MomentEstimate direct;
  MomentEstimate decomposed;
};

inline FourthMomentPair fourth_moment_oracle(const RayDistribution& dist,
                                             const ArrayTopology& tx,
                                             const ArrayTopology& rx,
                                             Eigen::Index p_count,
                                             std::uint64_t trials,
                                             const SeedSpec& seed,
                                             unsigned workers = 0) {
  if (trials < 2) {
    throw std::invalid_argument("fourth_moment_oracle: trials must be >= 2");
  }
  const double nt_nr = static_cast<double>(tx.size() * rx.size());
  FourthMomentPair pair;
  pair.direct = run_trials(
      [&](std::uint64_t, RngStream& rng) {
        const double gain =
            channel_gain(assemble_channel(sample_rayset(dist, p_count, rng), tx, rx));
        return gain * gain;
      },
      trials, seed, workers);
  pair.decomposed = run_trials(
      [&](std::uint64_t, RngStream& rng) {
        const RaySet rays = sample_rayset(dist, p_count, rng);
        const Eigen::VectorXd amps = rays.amplitudes();
        const double power = amps.squaredNorm();
        const double cross =
            amps.dot(ray_coupling_matrix(rays, tx, rx) * amps);
        return nt_nr * nt_nr * (power * power + cross * cross);
      },
      trials, seed, workers);
  return pair;
}

// --- Gaussian baseline sampling (test oracle) ----------------------------------

/// Hermitian square root of a covariance matrix (eigendecomposition with
/// negative eigenvalues clamped to zero).
inline Eigen::MatrixXcd covariance_sqrt(const CovarianceMatrix& r) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(r.matrix());
  const Eigen::ArrayXd clamped = solver.eigenvalues().array().max(0.0);
  return solver.eigenvectors() *
         clamped.sqrt().matrix().asDiagonal() *
         solver.eigenvectors().adjoint();
}

/// One draw of h ~ CN(0, R) given sqrt_r = R^{1/2}.
inline Eigen::VectorXcd sample_rayleigh(const Eigen::MatrixXcd& sqrt_r,
                                        RngStream& rng) {
  Eigen::VectorXcd z(sqrt_r.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.complex_normal(1.0);
  return sqrt_r * z;
}

}  // namespace hardening

#endif  // HARDENING_HARDENING_STATS_HPP
