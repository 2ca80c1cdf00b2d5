// SPDX-License-Identifier: Apache-2.0
//
// hardening: deterministic Monte-Carlo engine.
//
// Counter-based per-trial random streams plus a mergeable streaming moment
// accumulator. Results are bit-identical for a fixed (seed, trials) pair no
// matter how many worker threads execute the trials.

#ifndef HARDENING_MC_ENGINE_HPP
#define HARDENING_MC_ENGINE_HPP

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hardening {

/// Thrown when a Monte-Carlo trial produces a non-finite value. Silent
/// sample dropping would bias estimators, so the whole run aborts.
class NumericalError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// PCG32 stream (O'Neill's minimal generator). Cheap to construct, so a
/// fresh stream is made per trial from a hashed (seed, stream, trial) key.
class RngStream {
 public:
  RngStream(std::uint64_t init_state, std::uint64_t init_seq)
      : state_(0), inc_((init_seq << 1u) | 1u) {
    next_u32();
    state_ += init_state;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    const auto xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    const auto rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound) via multiply-shift.
  std::uint64_t uniform_index(std::uint64_t bound) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  /// Standard normal via Box-Muller; the second sample of each pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  /// Circularly-symmetric complex Gaussian CN(0, variance): the total
  /// variance splits evenly between real and imaginary parts.
  std::complex<double> complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Master seed plus logical stream id. Each (master_seed, stream_id,
/// trial_index) triple hashes to an independent PCG32 stream, so trials can
/// run in any order on any number of workers and still reproduce exactly.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  RngStream trial_stream(std::uint64_t trial_index) const {
    std::uint64_t x = master_seed ^ (stream_id * 0x9E3779B97F4A7C15ULL);
    (void)detail::splitmix64(x);
    x ^= trial_index * 0xC2B2AE3D27D4EB4FULL;
    const std::uint64_t init_state = detail::splitmix64(x);
    const std::uint64_t init_seq = detail::splitmix64(x);
    return RngStream(init_state, init_seq);
  }

  SeedSpec with_stream(std::uint64_t id) const { return {master_seed, id}; }
};

/// Monte-Carlo point estimate. `variance` is the per-sample variance backing
/// the confidence interval: the unbiased sample variance for plain means, or
/// the delta-method asymptotic variance for derived estimators, so that
/// ci_half_width == 1.96 * sqrt(variance / n) in both cases (95% normal).
struct MomentEstimate {
  std::uint64_t n = 0;
  double mean = 0.0;
  double variance = 0.0;
  double ci_half_width = 0.0;
};

/// Streaming accumulator of the first four central moments (Welford /
/// Pebay update). Partial accumulators over disjoint sample blocks merge
/// exactly, which is what the parallel engine relies on.
class MomentAccumulator {
 public:
  void add(double x) {
    const double n1 = static_cast<double>(n_);
    n_ += 1;
    const double n = static_cast<double>(n_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ -
           4.0 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
    mean_ += delta_n;
  }

  void merge(const MomentAccumulator& other) {
    if (other.n_ == 0) return;
    if (n_ == 0) {
      *this = other;
      return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(other.n_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    const double delta2 = delta * delta;
    const double m2 = m2_ + other.m2_ + delta2 * na * nb / n;
    const double m3 = m3_ + other.m3_ +
                      delta * delta2 * na * nb * (na - nb) / (n * n) +
                      3.0 * delta * (na * other.m2_ - nb * m2_) / n;
    const double m4 =
        m4_ + other.m4_ +
        delta2 * delta2 * na * nb * (na * na - na * nb + nb * nb) /
            (n * n * n) +
        6.0 * delta2 * (na * na * other.m2_ + nb * nb * m2_) / (n * n) +
        4.0 * delta * (na * other.m3_ - nb * m3_) / n;
    mean_ += delta * nb / n;
    m2_ = m2;
    m3_ = m3;
    m4_ = m4;
    n_ += other.n_;
  }

  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }

  /// Unbiased sample variance (n-1 denominator). Zero for n < 2.
  double variance_unbiased() const {
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
  }

  double central_moment2() const {
    return n_ > 0 ? m2_ / static_cast<double>(n_) : 0.0;
  }
  double central_moment3() const {
    return n_ > 0 ? m3_ / static_cast<double>(n_) : 0.0;
  }
  double central_moment4() const {
    return n_ > 0 ? m4_ / static_cast<double>(n_) : 0.0;
  }

  MomentEstimate to_estimate() const {
    MomentEstimate est;
    est.n = n_;
    est.mean = mean_;
    est.variance = variance_unbiased();
    est.ci_half_width =
        n_ > 0 ? 1.96 * std::sqrt(est.variance / static_cast<double>(n_)) : 0.0;
    return est;
  }

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

/// Worker count used when callers pass workers = 0. HARDENING_WORKERS
/// overrides hardware concurrency.
inline unsigned default_worker_count() {
  if (const char* env = std::getenv("HARDENING_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? hc : 1;
}

namespace detail {

// Trials are folded into fixed-size blocks; workers claim blocks through an
// atomic cursor and the block results are merged afterwards in index order.
// The block layout depends only on the trial count, never on the worker
// count, which makes the final fold bit-reproducible.
inline constexpr std::uint64_t kTrialBlockSize = 4096;

}  // namespace detail

/// Runs `trial_fn(trial_index, rng)` for trial_index in [0, trials) and
/// folds the returned values into a four-moment accumulator. A non-finite
/// trial value aborts the run with the offending trial index and seed.
template <typename TrialFn>
MomentAccumulator accumulate_trials(TrialFn&& trial_fn, std::uint64_t trials,
                                    const SeedSpec& seed, unsigned workers = 0) {
  if (trials == 0) {
    throw std::invalid_argument("accumulate_trials: trials must be >= 1");
  }
  if (workers == 0) workers = default_worker_count();

  const std::uint64_t n_blocks =
      (trials + detail::kTrialBlockSize - 1) / detail::kTrialBlockSize;
  std::vector<MomentAccumulator> blocks(n_blocks);

  std::atomic<std::uint64_t> next_block{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto worker_loop = [&]() {
    for (;;) {
      const std::uint64_t b = next_block.fetch_add(1);
      if (b >= n_blocks) return;
      if (first_error) return;  // racy read is fine, just an early out
      const std::uint64_t begin = b * detail::kTrialBlockSize;
      const std::uint64_t end =
          std::min(trials, begin + detail::kTrialBlockSize);
      MomentAccumulator acc;
      try {
        for (std::uint64_t t = begin; t < end; ++t) {
          RngStream rng = seed.trial_stream(t);
          const double value = trial_fn(t, rng);
          if (!std::isfinite(value)) {
            std::ostringstream msg;
            msg << "non-finite trial value " << value << " at trial " << t
                << " (master_seed=" << seed.master_seed
                << ", stream_id=" << seed.stream_id << ")";
            throw NumericalError(msg.str());
          }
          acc.add(value);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
      blocks[b] = acc;
    }
  };

  const unsigned n_threads = static_cast<unsigned>(
      std::min<std::uint64_t>(workers, n_blocks));
  if (n_threads <= 1) {
    worker_loop();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker_loop);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  MomentAccumulator total;
  for (const auto& block : blocks) total.merge(block);
  return total;
}

/// Plain-mean Monte-Carlo estimate of E{trial_fn}.
template <typename TrialFn>
MomentEstimate run_trials(TrialFn&& trial_fn, std::uint64_t trials,
                          const SeedSpec& seed, unsigned workers = 0) {
  return accumulate_trials(std::forward<TrialFn>(trial_fn), trials, seed,
                           workers)
      .to_estimate();
}

}  // namespace hardening

#endif  // HARDENING_MC_ENGINE_HPP
