// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "hardening/experiments.hpp"
#include "hardening/validate.hpp"

namespace hardening {

namespace checks {

bool steering_norm_ok(const Eigen::VectorXcd& steering) {
  return std::abs(steering.norm() - 1.0) <= kSelfCheckTol;
}

}  // namespace checks

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure(message);
}

std::string num(double value) {
  std::ostringstream out;
  out.precision(6);
  out << value;
  return out.str();
}

/// Random orthogonal 3x3 matrix (QR of a Gaussian matrix).
Eigen::Matrix3d random_orthogonal(RngStream& rng) {
  Eigen::Matrix3d g;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) g(i, j) = rng.normal();
  }
  return Eigen::HouseholderQR<Eigen::Matrix3d>(g).householderQ();
}

double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

using CheckBody = std::function<std::string(const ValidateOptions&, SeedSpec)>;

void run_check(ValidationReport& report, const ValidateOptions& opts,
               std::uint64_t stream_id, const std::string& name,
               const CheckBody& body) {
  CheckResult result;
  result.name = name;
  result.seed = opts.seed;
  try {
    result.detail = body(opts, SeedSpec{opts.seed, stream_id});
    result.passed = true;
  } catch (const std::exception& err) {
    result.passed = false;
    result.detail = err.what();
  }
  report.checks.push_back(std::move(result));
}

// --- individual checks ----------------------------------------------------

std::string check_steering_unit_norm(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  const ArrayTopology arrays[] = {make_ula(7, 0.37, 1.0), make_uca(5, 0.61, 1.0),
                                  make_upa(12, 0.5, 1.0)};
  for (const auto& array : arrays) {
    for (int i = 0; i < 50; ++i) {
      const Eigen::VectorXcd e =
          steering_vector(array, uniform_sphere_direction(rng));
      require(checks::steering_norm_ok(e), "steering vector norm off unity");
      for (Eigen::Index k = 0; k < e.size(); ++k) {
        require(std::abs(std::abs(e(k)) - 1.0 / std::sqrt(double(array.size()))) <=
                    kSelfCheckTol,
                "steering entry modulus must be 1/sqrt(N)");
      }
    }
  }
  return "unit norm and entry modulus hold on ULA/UCA/UPA";
}

std::string check_correlation_symmetry(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  const ArrayTopology array = make_upa(6, 0.4, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 d1 = uniform_sphere_direction(rng);
    const Vec3 d2 = uniform_sphere_direction(rng);
    const double g12 = steering_correlation(array, d1, d2);
    const double g21 = steering_correlation(array, d2, d1);
    require(std::abs(g12 - g21) <= kSelfCheckTol, "correlation not symmetric");
    const Vec3 offset(rng.normal() * 3.0, rng.normal() * 3.0, rng.normal() * 3.0);
    const double shifted = steering_correlation(array.translated(offset), d1, d2);
    require(std::abs(g12 - shifted) <= 1e-9, "correlation not translation invariant");
  }
  return "symmetry and translation invariance hold";
}

std::string check_correlation_rotation(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  const ArrayTopology array = make_uca(7, 0.52, 1.0);
  for (int i = 0; i < 100; ++i) {
    const Vec3 d1 = uniform_sphere_direction(rng);
    const Vec3 d2 = uniform_sphere_direction(rng);
    const Eigen::Matrix3d q = random_orthogonal(rng);
    const double base = steering_correlation(array, d1, d2);
    const double rotated =
        steering_correlation(array.rotated(q), (q * d1).normalized(),
                             (q * d2).normalized());
    require(std::abs(base - rotated) <= 1e-9,
            "correlation not rotation invariant");
  }
  return "rotation invariance holds";
}

std::string check_ula_projection(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  const ArrayTopology ula = make_ula(9, 0.43, 1.0);
  int tested = 0;
  while (tested < 60) {
    const Vec3 d1 = uniform_sphere_direction(rng);
    const Vec3 d2 = uniform_sphere_direction(rng);
    const double proj = (d2 - d1).x();
    // Build a second pair with the same x-projection difference.
    const Vec3 e1 = uniform_sphere_direction(rng);
    const double target_x = e1.x() + proj;
    if (std::abs(target_x) > 0.99) continue;
    const double r = std::sqrt(1.0 - target_x * target_x);
    const double phi = 2.0 * kPi * rng.uniform();
    const Vec3 e2(target_x, r * std::cos(phi), r * std::sin(phi));
    const double g_a = steering_correlation(ula, d1, d2);
    const double g_b = steering_correlation(ula, e1, e2);
    require(std::abs(g_a - g_b) <= 1e-9,
            "ULA correlation must depend only on the axis projection of d2-d1");
    ++tested;
  }
  return "axis-projection dependence holds";
}

std::string check_gain_law_moments(const ValidateOptions& opts, SeedSpec seed) {
  const std::uint64_t n = std::max<std::uint64_t>(opts.trials, 10000);
  const MomentEstimate power = run_trials(
      [](std::uint64_t, RngStream& rng) { return std::norm(rng.complex_normal(1.0)); },
      n, seed.with_stream(seed.stream_id), opts.workers);
  require(std::abs(power.mean - 1.0) <= 3.0 * power.ci_half_width,
          "E|c|^2 off for CN(0,1): " + num(power.mean));

  const MomentEstimate z2 = run_trials(
      [](std::uint64_t, RngStream& rng) {
        const Vec3 u = uniform_sphere_direction(rng);
        return u.z() * u.z();
      },
      n, seed.with_stream(seed.stream_id + 1), opts.workers);
  require(std::abs(z2.mean - 1.0 / 3.0) <= 3.0 * z2.ci_half_width,
          "E z^2 off for uniform sphere: " + num(z2.mean));

  const MomentEstimate zmean = run_trials(
      [](std::uint64_t, RngStream& rng) { return uniform_sphere_direction(rng).z(); },
      n, seed.with_stream(seed.stream_id + 2), opts.workers);
  require(std::abs(zmean.mean) <= 3.0 * zmean.ci_half_width,
          "E z off for uniform sphere: " + num(zmean.mean));
  return "CN(0,1) power and sphere moments match within CI";
}

std::string check_equal_power_law(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  const RayDistribution dist{EqualPowerGain{}, UniformSphere{}, UniformSphere{}};
  const RaySet rays = sample_rayset(dist, 6, rng);
  for (const Ray& ray : rays.rays()) {
    require(std::abs(std::norm(ray.gain) - 1.0) <= 1e-12,
            "equal-power gains must have unit power");
  }
  return "equal-power law yields unit ray powers";
}

std::string check_channel_gain_identities(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  const ArrayTopology tx = make_ula(3, 0.5, 1.0);
  const ArrayTopology rx = make_uca(4, 0.5, 1.0);
  const RayDistribution dist;
  for (int i = 0; i < 25; ++i) {
    const RaySet rays = sample_rayset(dist, 3, rng);
    const ChannelRealization h = assemble_channel(rays, tx, rx);
    const double gain = channel_gain(h);
    const double trace = (h.adjoint() * h).trace().real();
    require(rel_diff(gain, trace) <= 1e-9, "gain != Tr(H^H H)");

    // global phase invariance
    std::vector<Ray> shifted = rays.rays();
    const Complex phase = std::polar(1.0, 2.0 * kPi * rng.uniform());
    for (Ray& ray : shifted) ray.gain *= phase;
    const double gain_shifted =
        channel_gain(assemble_channel(RaySet(shifted), tx, rx));
    require(rel_diff(gain, gain_shifted) <= 1e-9,
            "gain not invariant under common gain phase");

    // quadratic-form identity against the coupling matrix
    const Eigen::VectorXd amps = rays.amplitudes();
    const double quad =
        amps.squaredNorm() + amps.dot(ray_coupling_matrix(rays, tx, rx) * amps);
    require(rel_diff(gain / (tx.size() * rx.size()), quad) <= 1e-9,
            "gain != Nt Nr (||c||^2 + a^T J a)");
  }
  return "Frobenius, trace, phase and quadratic-form identities hold";
}

std::string check_channel_rank_bound(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  const RayDistribution dist;
  for (int i = 0; i < 10; ++i) {
    const Eigen::Index nt = 2 + static_cast<Eigen::Index>(rng.uniform_index(4));
    const Eigen::Index nr = 2 + static_cast<Eigen::Index>(rng.uniform_index(4));
    const Eigen::Index p = 1 + static_cast<Eigen::Index>(rng.uniform_index(4));
    const ArrayTopology tx = make_ula(nt, 0.5, 1.0);
    const ArrayTopology rx = make_ula(nr, 0.5, 1.0);
    const ChannelRealization h =
        assemble_channel(sample_rayset(dist, p, rng), tx, rx);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
    const double tol = 1e-9 * svd.singularValues()(0);
    Eigen::Index rank = 0;
    for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
      if (svd.singularValues()(k) > tol) ++rank;
    }
    require(rank <= std::min({p, nt, nr}), "rank(H) exceeds min(P, Nt, Nr)");
  }
  return "rank bound holds";
}

std::string check_capacity_properties(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  // SISO, unit channel, snr 1 -> log2(2) = 1.
  ChannelRealization siso(1, 1);
  siso(0, 0) = Complex(1.0, 0.0);
  require(std::abs(capacity_equal_power(siso, 1.0) - 1.0) <= 1e-12,
          "SISO capacity at snr 1 must be 1");
  const ArrayTopology tx = make_ula(3, 0.5, 1.0);
  const ArrayTopology rx = make_ula(3, 0.5, 1.0);
  const RayDistribution dist;
  for (int i = 0; i < 10; ++i) {
    const ChannelRealization h =
        assemble_channel(sample_rayset(dist, 3, rng), tx, rx);
    require(std::abs(capacity_equal_power(h, 0.0)) <= 1e-12,
            "capacity at snr 0 must be 0");
    double prev = 0.0;
    for (const double snr : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double c = capacity_equal_power(h, snr);
      require(c >= prev - 1e-12, "capacity must be nondecreasing in snr");
      prev = c;
    }
    // unitary invariance
    Eigen::MatrixXcd g(3, 3);
    for (Eigen::Index r = 0; r < 3; ++r) {
      for (Eigen::Index c = 0; c < 3; ++c) g(r, c) = rng.complex_normal(1.0);
    }
    const Eigen::MatrixXcd q =
        Eigen::HouseholderQR<Eigen::MatrixXcd>(g).householderQ();
    require(rel_diff(capacity_equal_power(h, 3.0),
                     capacity_equal_power(q * h, 3.0)) <= 1e-9,
            "capacity not invariant under unitary rotation");
  }
  return "capacity identities and monotonicity hold";
}

std::string check_mc_determinism(const ValidateOptions& opts, SeedSpec seed) {
  auto trial = [](std::uint64_t, RngStream& rng) { return rng.uniform(); };
  const std::uint64_t n = std::max<std::uint64_t>(opts.trials, 10000);
  const MomentEstimate serial = run_trials(trial, n, seed, 1);
  const MomentEstimate parallel = run_trials(trial, n, seed, 4);
  require(serial.mean == parallel.mean && serial.variance == parallel.variance &&
              serial.n == parallel.n &&
              serial.ci_half_width == parallel.ci_half_width,
          "run_trials must be bit-identical across worker counts");
  return "bit-identical across 1 and 4 workers over " + std::to_string(n) +
         " trials";
}

std::string check_mc_merge(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  std::vector<double> samples(5000);
  for (double& x : samples) x = std::exp(2.0 * rng.normal());
  MomentAccumulator whole;
  for (const double x : samples) whole.add(x);

  MomentAccumulator a, b, c;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    (i < 1700 ? a : (i < 2400 ? b : c)).add(samples[i]);
  }
  MomentAccumulator ab = a;
  ab.merge(b);
  ab.merge(c);
  MomentAccumulator cb = c;
  cb.merge(b);
  cb.merge(a);
  for (const MomentAccumulator* merged : {&ab, &cb}) {
    require(rel_diff(merged->mean(), whole.mean()) <= 1e-9,
            "merged mean differs from concatenated mean");
    require(rel_diff(merged->variance_unbiased(), whole.variance_unbiased()) <= 1e-9,
            "merged variance differs from concatenated variance");
    require(rel_diff(merged->central_moment4(), whole.central_moment4()) <= 1e-9,
            "merged fourth moment differs");
  }
  return "block merges agree with the concatenated fold in any order";
}

std::string check_mc_variance_stability(const ValidateOptions& opts,
                                        SeedSpec seed) {
  const std::uint64_t n = std::max<std::uint64_t>(opts.trials, 100000);
  const MomentEstimate est = run_trials(
      [](std::uint64_t, RngStream& rng) { return 1.0e6 + rng.uniform(); }, n,
      seed, opts.workers);
  require(std::abs(est.variance - 1.0 / 12.0) <= 0.01 / 12.0,
          "variance of offset uniform off by >1%: " + num(est.variance));
  require(std::abs(est.mean - 1.0e6 - 0.5) <= 3.0 * est.ci_half_width,
          "mean of offset uniform off: " + num(est.mean));
  return "variance within 1% at offset 1e6 over " + std::to_string(n) +
         " samples";
}

std::string check_rayleigh_exact(const ValidateOptions&, SeedSpec) {
  for (int n = 1; n <= 64; ++n) {
    const CovarianceMatrix r(Eigen::MatrixXcd::Identity(n, n));
    require(rayleigh_cv2(r) == 1.0 / n, "rayleigh_cv2(I_N) must equal 1/N");
  }
  const Eigen::MatrixXcd ones = Eigen::MatrixXcd::Ones(4, 4);
  require(std::abs(rayleigh_cv2(CovarianceMatrix(ones)) - 1.0) <= 1e-12,
          "rank-1 covariance must give CV^2 = 1");
  return "identity gives exactly 1/N for N in 1..64; rank-1 gives 1";
}

std::string check_rayleigh_mc(const ValidateOptions& opts, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  Eigen::MatrixXcd g(4, 4);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) g(r, c) = rng.complex_normal(1.0);
  }
  const CovarianceMatrix r((g * g.adjoint() / 4.0).eval());
  const double exact = rayleigh_cv2(r);
  const Eigen::MatrixXcd sqrt_r = covariance_sqrt(r);
  const MomentAccumulator acc = accumulate_trials(
      [&](std::uint64_t, RngStream& trial_rng) {
        return sample_rayleigh(sqrt_r, trial_rng).squaredNorm();
      },
      std::max<std::uint64_t>(opts.trials, 10000), seed.with_stream(seed.stream_id + 7),
      opts.workers);
  const MomentEstimate mc = cv2_from_accumulator(acc);
  require(std::abs(mc.mean - exact) <= 3.0 * mc.ci_half_width,
          "MC CV^2 " + num(mc.mean) + " vs Tr(R^2)/Tr(R)^2 " + num(exact));
  return "MC CV^2 of ||h||^2 matches Tr(R^2)/Tr(R)^2 within 3 CI";
}

std::string check_mean_gain_law(const ValidateOptions& opts, SeedSpec seed) {
  const RayDistribution dist;
  const int p = 4;
  std::uint64_t stream = seed.stream_id;
  for (const ArrayType type : {ArrayType::Ula, ArrayType::Uca, ArrayType::Upa}) {
    const ArrayTopology array = make_array(type, 8, 0.5, 1.0);
    const double scale = 1.0 / (64.0 * p);
    const MomentEstimate est = run_trials(
        [&](std::uint64_t, RngStream& rng) {
          return scale * channel_gain(assemble_channel(sample_rayset(dist, p, rng),
                                                       array, array));
        },
        std::max<std::uint64_t>(opts.trials, 10000),
        SeedSpec{seed.master_seed, stream++}, opts.workers);
    require(std::abs(est.mean - 1.0) <= 3.0 * est.ci_half_width,
            "mean gain law off for " + to_string(type) + ": " + num(est.mean));
  }
  return "E{gain} = Nt Nr E{||c||^2} within 3 CI on ULA/UCA/UPA";
}

std::string check_alpha2_bounds(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  for (int i = 0; i < 10000; ++i) {
    const std::size_t p = 1 + rng.uniform_index(16);
    std::vector<double> amps(p);
    const int style = static_cast<int>(rng.uniform_index(3));
    double max_amp = 0.0;
    for (double& a : amps) {
      if (style == 0) {
        a = rng.uniform();
      } else if (style == 1) {
        a = std::exp(3.0 * rng.normal());
      } else {
        a = rng.uniform() < 0.4 ? 0.0 : rng.uniform();
      }
      max_amp = std::max(max_amp, a);
    }
    if (max_amp == 0.0) amps[0] = 1.0;
    const double value = alpha2(amps);
    const double bound = 1.0 - 1.0 / static_cast<double>(p);
    require(value >= 0.0 && value <= bound, "alpha2 out of [0, 1-1/P]");
  }
  // documented extremes, exact
  require(alpha2(std::vector<double>{3.7}) == 0.0, "single ray must give 0");
  for (const std::size_t p : {2, 3, 5, 8, 13}) {
    const std::vector<double> equal(p, 0.77);
    require(alpha2(equal) == 1.0 - 1.0 / static_cast<double>(p),
            "equal powers must give exactly 1 - 1/P");
  }
  return "bounds hold on 10^4 random vectors; extremes exact";
}

std::string check_norm_chain(const ValidateOptions&, SeedSpec seed) {
  RngStream rng = seed.trial_stream(0);
  for (int i = 0; i < 5000; ++i) {
    const std::size_t p = 1 + rng.uniform_index(16);
    double sum2 = 0.0;
    double sum4 = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
      const double a = std::exp(2.0 * rng.normal());
      sum2 += a * a;
      sum4 += a * a * a * a;
    }
    const double norm4_2 = sum2 * sum2;
    require(norm4_2 / static_cast<double>(p) <= sum4 * (1.0 + 1e-12),
            "||c||_2^4 / P <= ||c||_4^4 violated");
    require(sum4 <= norm4_2 * (1.0 + 1e-12), "||c||_4^4 <= ||c||_2^4 violated");
  }
  return "norm chain holds on 5000 random vectors";
}

std::string check_analytic_moments(const ValidateOptions& opts, SeedSpec seed) {
  const int p = 3;
  const GainLawMoments analytic =
      analytic_gain_moments(ComplexGaussianGain{1.0}, p);
  const std::uint64_t n = std::max<std::uint64_t>(opts.trials, 10000);
  const RayDistribution dist;
  auto moment_of = [&](int which, std::uint64_t stream) {
    return run_trials(
        [&, which](std::uint64_t, RngStream& rng) {
          const RaySet rays = sample_rayset(dist, p, rng);
          const double power = rays.aggregated_power();
          if (which == 0) return power;
          if (which == 1) return power * power;
          double quartic = 0.0;
          for (const Ray& ray : rays.rays()) {
            quartic += std::norm(ray.gain) * std::norm(ray.gain);
          }
          return quartic;
        },
        n, seed.with_stream(stream), opts.workers);
  };
  const MomentEstimate m2 = moment_of(0, seed.stream_id);
  const MomentEstimate m4 = moment_of(1, seed.stream_id + 1);
  const MomentEstimate q4 = moment_of(2, seed.stream_id + 2);
  require(std::abs(m2.mean - analytic.total_power_mean) <= 3.0 * m2.ci_half_width,
          "E||c||^2 mismatch: " + num(m2.mean));
  require(std::abs(m4.mean - analytic.total_power_sq_mean) <=
              3.0 * m4.ci_half_width,
          "E||c||^4 mismatch: " + num(m4.mean));
  require(std::abs(q4.mean - analytic.quartic_sum_mean) <= 3.0 * q4.ci_half_width,
          "E||c||_4^4 mismatch: " + num(q4.mean));
  return "analytic CN(0,1) moments match sampling within 3 CI";
}

std::string check_decomposition_consistency(const ValidateOptions& opts,
                                            SeedSpec seed) {
  const std::uint64_t trials = std::max<std::uint64_t>(opts.trials, 20000);
  std::uint64_t stream = seed.stream_id;
  for (const int n : {2, 4}) {
    const ArrayTopology array = make_ula(n, 0.5, 1.0);
    const MomentEstimate e2 =
        e2_estimate(array, UniformSphere{}, trials * 5,
                    SeedSpec{seed.master_seed, stream++}, opts.workers);
    for (const int p : {2, 3}) {
      const RayDistribution dist;
      const MomentEstimate mc = channel_cv2_estimate(
          dist, p, array, array, trials, SeedSpec{seed.master_seed, stream++},
          opts.workers);
      const HardeningReport formula = cv2_closed_form(
          e2.mean, e2.mean, analytic_gain_moments(ComplexGaussianGain{1.0}, p));
      const double formula_ci =
          formula.alpha2 * std::sqrt(2.0) * e2.mean * e2.ci_half_width;
      const double budget =
          3.0 * std::sqrt(mc.ci_half_width * mc.ci_half_width +
                          formula_ci * formula_ci);
      require(std::abs(mc.mean - formula.cv2_total) <= budget,
              "Eq(8) mismatch at N=" + std::to_string(n) +
                  " P=" + std::to_string(p) + ": MC " + num(mc.mean) +
                  " vs formula " + num(formula.cv2_total));
    }
  }
  return "MC CV^2 matches the closed-form decomposition within 3 combined CI";
}

std::string check_conditional_consistency(const ValidateOptions& opts,
                                          SeedSpec seed) {
  const std::uint64_t trials = std::max<std::uint64_t>(opts.trials, 20000);
  const ArrayTopology array = make_ula(4, 0.5, 1.0);
  const MomentEstimate e2 =
      e2_estimate(array, UniformSphere{}, trials * 5, seed, opts.workers);
  Eigen::VectorXd amps(3);
  amps << 1.0, 1.0, 2.0;
  const RayDistribution dist{FixedAmplitudesGain{amps}, UniformSphere{},
                             UniformSphere{}};
  const MomentEstimate mc =
      channel_cv2_estimate(dist, 3, array, array, trials,
                           seed.with_stream(seed.stream_id + 1), opts.workers);
  const double a2 = alpha2(amps);
  const double formula = cv2_conditional_closed_form(e2.mean, e2.mean, amps);
  const double formula_ci = a2 * std::sqrt(2.0) * e2.mean * e2.ci_half_width;
  const double budget = 3.0 * std::sqrt(mc.ci_half_width * mc.ci_half_width +
                                        formula_ci * formula_ci);
  require(std::abs(mc.mean - formula) <= budget,
          "Eq(9) mismatch: MC " + num(mc.mean) + " vs " + num(formula));
  return "conditional CV^2 matches E2 E2 alpha^2 within 3 combined CI";
}

std::string check_fourth_moment_oracle(const ValidateOptions& opts,
                                       SeedSpec seed) {
  const ArrayTopology tx = make_ula(2, 0.5, 1.0);
  const ArrayTopology rx = make_ula(2, 0.5, 1.0);
  const FourthMomentPair pair = fourth_moment_oracle(
      RayDistribution{}, tx, rx, 2, std::max<std::uint64_t>(opts.trials, 20000),
      seed, opts.workers);
  const double budget =
      3.0 * std::sqrt(pair.direct.ci_half_width * pair.direct.ci_half_width +
                      pair.decomposed.ci_half_width * pair.decomposed.ci_half_width);
  require(std::abs(pair.direct.mean - pair.decomposed.mean) <= budget,
          "fourth-moment routes disagree: " + num(pair.direct.mean) + " vs " +
              num(pair.decomposed.mean));
  return "direct and decomposed E||H||^4 agree within 3 combined CI";
}

std::string check_e2_asymptote(const ValidateOptions& opts, SeedSpec seed) {
  const std::uint64_t pairs = std::max<std::uint64_t>(opts.trials * 10, 100000);
  const ArrayTopology ula16 = make_ula(16, 0.5, 1.0);
  const MomentEstimate est =
      e2_estimate(ula16, UniformSphere{}, pairs, seed, opts.workers);
  require(16.0 * est.mean >= 0.9 && 16.0 * est.mean <= 1.1,
          "ULA16 N E^2 outside [0.9, 1.1]: " + num(16.0 * est.mean));
  require(std::abs(e2_lattice_sum(ula16) - 1.0 / 16.0) <= 1e-12,
          "ULA lambda/2 lattice sum must be exactly 1/N");
  // closed lattice sum as cross-check on small arrays
  std::uint64_t stream = seed.stream_id + 1;
  for (const ArrayTopology& array :
       {make_ula(5, 0.3, 1.0), make_uca(6, 0.45, 1.0), make_upa(6, 0.5, 1.0)}) {
    const MomentEstimate mc = e2_estimate(
        array, UniformSphere{}, pairs, SeedSpec{seed.master_seed, stream++},
        opts.workers);
    const double exact = e2_lattice_sum(array);
    require(std::abs(mc.mean - exact) <= 5.0 * mc.ci_half_width,
            "MC E^2 " + num(mc.mean) + " vs lattice " + num(exact));
  }
  return "ULA16 asymptote and lattice-sum cross-checks hold";
}

std::string check_large_scale_toy(const ValidateOptions& opts, SeedSpec seed) {
  const std::uint64_t n = std::max<std::uint64_t>(opts.trials, 20000);
  const int p = 4;
  const MomentAccumulator acc = accumulate_trials(
      [p](std::uint64_t, RngStream& rng) {
        double power = 0.0;
        for (int k = 0; k < p; ++k) power += std::norm(rng.complex_normal(1.0));
        return power;
      },
      n, seed, opts.workers);
  const MomentEstimate est = cv2_from_accumulator(acc);
  require(std::abs(est.mean - 0.25) <= 3.0 * est.ci_half_width,
          "large-scale CV^2 off 1/P: " + num(est.mean));
  return "i.i.d. exponential powers give CV^2 = 1/P within 3 CI";
}

std::string check_csv_reproducibility(const ValidateOptions&, SeedSpec seed) {
  SweepConfig cfg = default_config(ExperimentKind::E2VsAntennas);
  cfg.axis = {1, 2, 4};
  cfg.array_types = {ArrayType::Ula, ArrayType::Uca};
  cfg.trials = 4000;
  cfg.seed = seed.master_seed;
  finalize_config(cfg);
  auto strip_timestamp = [](const std::string& text) {
    std::string out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (line.rfind("# timestamp:", 0) == 0) continue;
      out += line;
      out += '\n';
    }
    return out;
  };
  const std::string first = strip_timestamp(csv_text(cfg, run_fig3(cfg, 1)));
  const std::string second = strip_timestamp(csv_text(cfg, run_fig3(cfg, 3)));
  require(first == second, "fig3 CSV differs across worker counts");
  require(first.find("array_type,n_antennas,e2,ci_half,inv_n\n") != std::string::npos,
          "fig3 CSV schema line missing");
  require(first.find("# config_hash: ") != std::string::npos &&
              first.find("# seed: ") != std::string::npos &&
              first.find("# trials: ") != std::string::npos &&
              first.find("# artifact_version: ") != std::string::npos,
          "CSV header must embed version, config hash, seed and trials");
  return "CSV bytes identical across worker counts (timestamp excluded)";
}

}  // namespace

std::string ValidationReport::to_json() const {
  nlohmann::json doc;
  doc["all_passed"] = all_passed();
  doc["checks"] = nlohmann::json::array();
  for (const auto& check : checks) {
    doc["checks"].push_back({{"name", check.name},
                             {"passed", check.passed},
                             {"detail", check.detail},
                             {"seed", check.seed}});
  }
  return doc.dump(2) + "\n";
}

ValidationReport run_validate(const ValidateOptions& options) {
  ValidationReport report;
  std::uint64_t stream = 1000;
  const struct {
    const char* name;
    CheckBody body;
  } checks[] = {
      {"steering_unit_norm", check_steering_unit_norm},
      {"steering_correlation_symmetry", check_correlation_symmetry},
      {"steering_correlation_rotation", check_correlation_rotation},
      {"ula_axis_projection", check_ula_projection},
      {"gain_and_direction_moments", check_gain_law_moments},
      {"equal_power_law", check_equal_power_law},
      {"channel_gain_identities", check_channel_gain_identities},
      {"channel_rank_bound", check_channel_rank_bound},
      {"capacity_properties", check_capacity_properties},
      {"mc_determinism", check_mc_determinism},
      {"mc_merge", check_mc_merge},
      {"mc_variance_stability", check_mc_variance_stability},
      {"rayleigh_iid_exact", check_rayleigh_exact},
      {"rayleigh_mc_consistency", check_rayleigh_mc},
      {"mean_gain_law", check_mean_gain_law},
      {"alpha2_bounds", check_alpha2_bounds},
      {"norm_chain_inequality", check_norm_chain},
      {"analytic_moments_vs_sampling", check_analytic_moments},
      {"decomposition_consistency", check_decomposition_consistency},
      {"conditional_consistency", check_conditional_consistency},
      {"fourth_moment_oracle", check_fourth_moment_oracle},
      {"e2_asymptote_and_lattice", check_e2_asymptote},
      {"large_scale_toy_formula", check_large_scale_toy},
      {"csv_reproducibility", check_csv_reproducibility},
  };
  for (const auto& check : checks) {
    run_check(report, options, stream, check.name, check.body);
    stream += 100;
  }
  return report;
}

}  // namespace hardening
