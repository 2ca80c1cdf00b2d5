// SPDX-License-Identifier: Apache-2.0
//
// hardening: antenna array topologies and steering vectors.

#ifndef HARDENING_ARRAY_GEOMETRY_HPP
#define HARDENING_ARRAY_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

namespace hardening {

using Vec3 = Eigen::Vector3d;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Input directions must be unit vectors to this tolerance; quantities the
/// library itself constructs are held to the tighter self-check tolerance.
inline constexpr double kDirectionTol = 1e-9;
inline constexpr double kSelfCheckTol = 1e-12;

inline bool is_unit(const Vec3& v, double tol = kDirectionTol) {
  return std::abs(v.norm() - 1.0) <= tol;
}

/// Immutable set of antenna positions (meters, one column per antenna) with
/// the carrier wavelength. The reference point is the array centroid: inner
/// products of steering vectors are translation invariant, so the choice is
/// free and the centroid keeps symmetry tests clean.
class ArrayTopology {
 public:
  ArrayTopology(Eigen::Matrix3Xd positions, double wavelength)
      : positions_(std::move(positions)), wavelength_(wavelength) {
    if (positions_.cols() < 1) {
      throw std::invalid_argument("ArrayTopology: need at least one antenna");
    }
    if (!(wavelength_ > 0.0) || !std::isfinite(wavelength_)) {
      throw std::invalid_argument("ArrayTopology: wavelength must be positive");
    }
    if (!positions_.allFinite()) {
      throw std::invalid_argument("ArrayTopology: non-finite position");
    }
    for (Eigen::Index i = 0; i < positions_.cols(); ++i) {
      for (Eigen::Index j = i + 1; j < positions_.cols(); ++j) {
        if ((positions_.col(i) - positions_.col(j)).norm() <= 0.0) {
          throw std::invalid_argument(
              "ArrayTopology: coincident antenna positions");
        }
      }
    }
  }

  Eigen::Index size() const { return positions_.cols(); }
  const Eigen::Matrix3Xd& positions() const { return positions_; }
  double wavelength() const { return wavelength_; }

  /// Same antennas shifted by a common offset (used by invariance tests).
  ArrayTopology translated(const Vec3& offset) const {
    Eigen::Matrix3Xd shifted = positions_.colwise() + offset;
    return ArrayTopology(std::move(shifted), wavelength_);
  }

  /// Same antennas under an orthogonal transform.
  ArrayTopology rotated(const Eigen::Matrix3d& rotation) const {
    return ArrayTopology(rotation * positions_, wavelength_);
  }

 private:
  Eigen::Matrix3Xd positions_;
  double wavelength_;
};

namespace detail {

inline void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(what) + " must be positive");
  }
}

inline void center_at_centroid(Eigen::Matrix3Xd& positions) {
  positions.colwise() -= Vec3(positions.rowwise().mean());
}

}  // namespace detail

/// Uniform linear array along the x-axis, adjacent spacing `spacing`.
inline ArrayTopology make_ula(Eigen::Index n, double spacing,
                              double wavelength) {
  if (n < 1) throw std::invalid_argument("make_ula: n must be >= 1");
  detail::require_positive(spacing, "make_ula: spacing");
  detail::require_positive(wavelength, "make_ula: wavelength");
  Eigen::Matrix3Xd positions = Eigen::Matrix3Xd::Zero(3, n);
  const double half = 0.5 * static_cast<double>(n - 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    positions(0, i) = (static_cast<double>(i) - half) * spacing;
  }
  return ArrayTopology(std::move(positions), wavelength);
}

/// Uniform circular array in the xy-plane. `spacing` is the chord length
/// between adjacent antennas, the natural analogue of the ULA spacing, so
/// the circumradius is spacing / (2 sin(pi/n)).
inline ArrayTopology make_uca(Eigen::Index n, double spacing,
                              double wavelength) {
  if (n < 2) throw std::invalid_argument("make_uca: n must be >= 2");
  detail::require_positive(spacing, "make_uca: spacing");
  detail::require_positive(wavelength, "make_uca: wavelength");
  const double radius = spacing / (2.0 * std::sin(kPi / static_cast<double>(n)));
  Eigen::Matrix3Xd positions(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double theta = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(n);
    positions.col(i) = Vec3(radius * std::cos(theta), radius * std::sin(theta), 0.0);
  }
  detail::center_at_centroid(positions);
  return ArrayTopology(std::move(positions), wavelength);
}

/// Near-square factorization used by make_upa: rows is the largest divisor
/// of n not exceeding sqrt(n). Primes degrade to a 1 x n line.
inline std::pair<Eigen::Index, Eigen::Index> upa_grid_shape(Eigen::Index n) {
  Eigen::Index rows = 1;
  for (Eigen::Index d = 1; d * d <= n; ++d) {
    if (n % d == 0) rows = d;
  }
  return {rows, n / rows};
}

/// Uniform planar array: rows x cols grid in the xy-plane (rows along x),
/// adjacent grid distance `spacing`.
inline ArrayTopology make_upa(Eigen::Index n, double spacing,
                              double wavelength) {
  if (n < 1) throw std::invalid_argument("make_upa: n must be >= 1");
  detail::require_positive(spacing, "make_upa: spacing");
  detail::require_positive(wavelength, "make_upa: wavelength");
  const auto [rows, cols] = upa_grid_shape(n);
  Eigen::Matrix3Xd positions(3, n);
  const double half_r = 0.5 * static_cast<double>(rows - 1);
  const double half_c = 0.5 * static_cast<double>(cols - 1);
  Eigen::Index idx = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      positions.col(idx++) = Vec3((static_cast<double>(r) - half_r) * spacing,
                                  (static_cast<double>(c) - half_c) * spacing,
                                  0.0);
    }
  }
  return ArrayTopology(std::move(positions), wavelength);
}

namespace detail {

inline void require_unit_direction(const Vec3& direction, const char* what) {
  if (!is_unit(direction)) {
    throw std::invalid_argument(std::string(what) +
                                ": direction must have unit norm");
  }
}

}  // namespace detail

/// Steering vector of a plane wave from `direction`:
/// entry i = (1/sqrt(N)) exp(2j pi (a_i . u) / lambda). Unit euclidean norm.
inline Eigen::VectorXcd steering_vector(const ArrayTopology& topology,
                                        const Vec3& direction) {
  detail::require_unit_direction(direction, "steering_vector");
  const Eigen::Index n = topology.size();
  const double scale = 2.0 * kPi / topology.wavelength();
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  const Eigen::ArrayXd phases =
      scale * (topology.positions().transpose() * direction).array();
  const Eigen::ArrayXd cos_ph = phases.cos();
  const Eigen::ArrayXd sin_ph = phases.sin();
  Eigen::VectorXcd entries(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    entries(i) = Complex(inv_sqrt_n * cos_ph(i), inv_sqrt_n * sin_ph(i));
  }
  return entries;
}

/// Squared modulus of the steering-vector inner product,
/// |<e(d1), e(d2)>|^2 in [0, 1]. Depends on the antenna positions only
/// through their differences, hence translation invariant.
inline double steering_correlation(const ArrayTopology& topology,
                                   const Vec3& d1, const Vec3& d2) {
  detail::require_unit_direction(d1, "steering_correlation");
  detail::require_unit_direction(d2, "steering_correlation");
  const Eigen::Index n = topology.size();
  const double scale = 2.0 * kPi / topology.wavelength();
  const Eigen::ArrayXd phases =
      scale * (topology.positions().transpose() * (d2 - d1)).array();
  const double re = phases.cos().sum();
  const double im = phases.sin().sum();
  const double value = (re * re + im * im) / static_cast<double>(n * n);
  return value < 1.0 ? value : 1.0;
}

}  // namespace hardening

#endif  // HARDENING_ARRAY_GEOMETRY_HPP
