// SPDX-License-Identifier: Apache-2.0
//
// hardening: ray parameter sampling and channel matrix assembly.
//
// The channel is a sum of P planar-wavefront paths,
//   H = sqrt(Nt Nr) sum_p c_p e_r(doa_p) e_t(dod_p)^H,
// with gains, departure and arrival directions drawn mutually independently,
// phases uniform on [0, 2pi) and directions i.i.d.

#ifndef HARDENING_RAY_CHANNEL_HPP
#define HARDENING_RAY_CHANNEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "hardening/array_geometry.hpp"
#include "hardening/mc_engine.hpp"

namespace hardening {

/// One propagation path: complex linear gain plus unit departure/arrival
/// directions.
struct Ray {
  Complex gain;
  Vec3 dod;
  Vec3 doa;
};

/// Ordered collection of P >= 1 rays.
class RaySet {
 public:
  explicit RaySet(std::vector<Ray> rays) : rays_(std::move(rays)) {
    if (rays_.empty()) {
      throw std::invalid_argument("RaySet: need at least one ray");
    }
    for (const Ray& ray : rays_) {
      if (!std::isfinite(ray.gain.real()) || !std::isfinite(ray.gain.imag())) {
        throw std::invalid_argument("RaySet: non-finite gain");
      }
      if (!is_unit(ray.dod) || !is_unit(ray.doa)) {
        throw std::invalid_argument("RaySet: ray directions must be unit");
      }
    }
  }

  const std::vector<Ray>& rays() const { return rays_; }
  Eigen::Index path_count() const {
    return static_cast<Eigen::Index>(rays_.size());
  }

  /// ||c||^2, the aggregated power over all rays (large-scale fading).
  double aggregated_power() const {
    double total = 0.0;
    for (const Ray& ray : rays_) total += std::norm(ray.gain);
    return total;
  }

  /// Vector of |c_p| in ray order.
  Eigen::VectorXd amplitudes() const {
    Eigen::VectorXd amps(path_count());
    for (Eigen::Index p = 0; p < path_count(); ++p) {
      amps(p) = std::abs(rays_[static_cast<std::size_t>(p)].gain);
    }
    return amps;
  }

 private:
  std::vector<Ray> rays_;
};

// --- statistical laws -------------------------------------------------------

/// c_p ~ CN(0, variance), i.i.d.
struct ComplexGaussianGain {
  double variance = 1.0;
};

/// |c_p| fixed to the given amplitudes, phases i.i.d. uniform on [0, 2pi).
/// This is the conditional model: the aggregated power ||c||^2 is frozen
/// while the phase assumption is preserved.
struct FixedAmplitudesGain {
  Eigen::VectorXd amplitudes;
};

/// |c_p| = 1 for every ray, phases i.i.d. uniform.
struct EqualPowerGain {};

using GainLaw = std::variant<ComplexGaussianGain, FixedAmplitudesGain, EqualPowerGain>;

/// Directions uniform w.r.t. surface measure on the unit sphere.
struct UniformSphere {};

/// Directions drawn i.i.d. uniformly from a finite list. With a single
/// entry every ray shares that direction.
struct DirectionList {
  std::vector<Vec3> directions;
};

using DirectionLaw = std::variant<UniformSphere, DirectionList>;

/// Gain law and the departure/arrival direction laws, sampled mutually
/// independently.
struct RayDistribution {
  GainLaw gain_law = ComplexGaussianGain{};
  DirectionLaw dod_law = UniformSphere{};
  DirectionLaw doa_law = UniformSphere{};
};

/// Uniform direction on S^2 via normalized 3D standard normals (exactly
/// uniform w.r.t. surface measure).
inline Vec3 uniform_sphere_direction(RngStream& rng) {
  for (;;) {
    const Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

inline Vec3 sample_direction(const DirectionLaw& law, RngStream& rng) {
  if (std::holds_alternative<UniformSphere>(law)) {
    return uniform_sphere_direction(rng);
  }
  const auto& list = std::get<DirectionList>(law);
  if (list.directions.empty()) {
    throw std::invalid_argument("DirectionList: empty direction list");
  }
  const Vec3& d = list.directions[static_cast<std::size_t>(
      rng.uniform_index(list.directions.size()))];
  if (!is_unit(d)) {
    throw std::invalid_argument("DirectionList: directions must be unit");
  }
  return d;
}

/// Draws P rays from the distribution. Per ray the stream is consumed in a
/// fixed order (gain, DoD, DoA), which pins down reproducibility.
inline RaySet sample_rayset(const RayDistribution& dist, Eigen::Index p_count,
                            RngStream& rng) {
  if (p_count < 1) {
    throw std::invalid_argument("sample_rayset: p_count must be >= 1");
  }
  if (const auto* fixed = std::get_if<FixedAmplitudesGain>(&dist.gain_law)) {
    if (fixed->amplitudes.size() != p_count) {
      throw std::invalid_argument(
          "sample_rayset: amplitude count must equal p_count");
    }
    if ((fixed->amplitudes.array() < 0.0).any() ||
        !fixed->amplitudes.allFinite()) {
      throw std::invalid_argument(
          "sample_rayset: amplitudes must be finite and nonnegative");
    }
  }
  if (const auto* gaussian = std::get_if<ComplexGaussianGain>(&dist.gain_law)) {
    if (!(gaussian->variance > 0.0) || !std::isfinite(gaussian->variance)) {
      throw std::invalid_argument("sample_rayset: variance must be positive");
    }
  }

  std::vector<Ray> rays;
  rays.reserve(static_cast<std::size_t>(p_count));
  for (Eigen::Index p = 0; p < p_count; ++p) {
    Ray ray;
    if (const auto* gaussian = std::get_if<ComplexGaussianGain>(&dist.gain_law)) {
      ray.gain = rng.complex_normal(gaussian->variance);
    } else if (const auto* fixed = std::get_if<FixedAmplitudesGain>(&dist.gain_law)) {
      ray.gain = std::polar(fixed->amplitudes(p), 2.0 * kPi * rng.uniform());
    } else {
      ray.gain = std::polar(1.0, 2.0 * kPi * rng.uniform());
    }
    ray.dod = sample_direction(dist.dod_law, rng);
    ray.doa = sample_direction(dist.doa_law, rng);
    rays.push_back(ray);
  }
  return RaySet(std::move(rays));
}

/// One narrowband channel draw, N_r x N_t. Finite entries with dimensions
/// matching the topologies it was assembled from.
using ChannelRealization = Eigen::MatrixXcd;

/// H = sqrt(Nt Nr) sum_p c_p e_r(doa_p) e_t(dod_p)^H. rank(H) <= min(P, Nt, Nr).
inline ChannelRealization assemble_channel(const RaySet& rays,
                                           const ArrayTopology& tx,
                                           const ArrayTopology& rx) {
  const Eigen::Index nt = tx.size();
  const Eigen::Index nr = rx.size();
  ChannelRealization h = ChannelRealization::Zero(nr, nt);
  for (const Ray& ray : rays.rays()) {
    const Eigen::VectorXcd er = steering_vector(rx, ray.doa);
    const Eigen::VectorXcd et = steering_vector(tx, ray.dod);
    h.noalias() += ray.gain * (er * et.adjoint());
  }
  h *= std::sqrt(static_cast<double>(nt * nr));
  return h;
}

/// Squared Frobenius norm ||H||_F^2, the channel gain: the sum of squared
/// entry moduli, equal to Tr(H^H H).
template <typename Derived>
double channel_gain(const Eigen::MatrixBase<Derived>& h) {
  return h.squaredNorm();
}

/// Capacity with equal-power precoding Q = I/Nt over the normalized channel
/// Hbar = H/||H||_F:  C = log2 det(I + (snr/Nt) Hbar^H Hbar)  [bits/s/Hz].
/// Evaluated through the Cholesky factor of the positive-definite Gram
/// matrix, so no sign or branch issues arise.
inline double capacity_equal_power(const ChannelRealization& h, double snr) {
  if (!(snr >= 0.0) || !std::isfinite(snr)) {
    throw std::invalid_argument("capacity_equal_power: snr must be >= 0");
  }
  const double fro = std::sqrt(channel_gain(h));
  if (!(fro > 0.0)) {
    throw std::invalid_argument("capacity_equal_power: zero channel");
  }
  const Eigen::Index nt = h.cols();
  const Eigen::MatrixXcd hbar = h / fro;
  Eigen::MatrixXcd gram = Eigen::MatrixXcd::Identity(nt, nt);
  gram.noalias() += (snr / static_cast<double>(nt)) * (hbar.adjoint() * hbar);
  const Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("capacity_equal_power: factorization failed");
  }
  double log2_det = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < nt; ++i) {
    log2_det += 2.0 * std::log2(l(i, i).real());
  }
  return log2_det;
}

}  // namespace hardening

#endif  // HARDENING_RAY_CHANNEL_HPP
