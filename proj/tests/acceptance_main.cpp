// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one check per shipped criterion, each printing a
// PASS/FAIL line with the measured numbers. Run all criteria with no
// arguments, or a single one with --criterion N. --cli PATH points at the
// command-line binary (needed by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "hardening/experiments.hpp"
#include "hardening/hardening_stats.hpp"

using namespace hardening;

namespace {

struct SubCheck {
  bool passed;
  std::string text;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<SubCheck> subs;
  double elapsed_s = 0.0;

  bool passed() const {
    for (const auto& sub : subs) {
      if (!sub.passed) return false;
    }
    return true;
  }
};

std::string num(double value) {
  std::ostringstream out;
  out.precision(7);
  out << value;
  return out.str();
}

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

constexpr std::uint64_t kMasterSeed = 20240717ULL;

// --- criterion 1: i.i.d. Rayleigh limit --------------------------------------

CriterionResult criterion_1() {
  CriterionResult result{1, "i.i.d. Rayleigh limit (Tr(R^2)/Tr(R)^2 = 1/N)"};
  Timer timer;

  bool exact_ok = true;
  for (int n = 1; n <= 64; ++n) {
    const CovarianceMatrix identity(Eigen::MatrixXcd::Identity(n, n));
    if (rayleigh_cv2(identity) != 1.0 / n) exact_ok = false;
  }
  result.subs.push_back({exact_ok, "rayleigh_cv2(I_N) == 1/N exactly for N in 1..64"});

  const int n = 8;
  const MomentAccumulator acc = accumulate_trials(
      [n](std::uint64_t, RngStream& rng) {
        double power = 0.0;
        for (int i = 0; i < n; ++i) power += std::norm(rng.complex_normal(1.0));
        return power;
      },
      100000, SeedSpec{kMasterSeed, 10});
  const MomentEstimate mc = cv2_from_accumulator(acc);
  const double gap = std::abs(mc.mean - 0.125);
  result.subs.push_back(
      {gap <= 3.0 * mc.ci_half_width,
       "MC CV^2 (N=8, 1e5 trials) = " + num(mc.mean) + " vs 1/8, |gap| = " +
           num(gap) + " <= 3 ci = " + num(3.0 * mc.ci_half_width)});

  result.elapsed_s = timer.seconds();
  result.subs.push_back({result.elapsed_s < 10.0,
                         "runtime " + num(result.elapsed_s) + " s < 10 s"});
  return result;
}

// --- criterion 2: illustration-formula agreement ------------------------------

CriterionResult criterion_2() {
  CriterionResult result{2, "illustration formula agreement (fig4 grid)"};
  Timer timer;
  std::uint64_t stream = 100;
  for (const int n : {2, 4, 8, 16}) {
    const ArrayTopology array = make_ula(n, 0.5, 1.0);
    for (const int p : {2, 4, 5, 6}) {
      const MomentEstimate mc =
          channel_cv2_estimate(RayDistribution{}, p, array, array, 100000,
                               SeedSpec{kMasterSeed, stream++});
      const double nt_nr = double(n) * n;
      const double formula = (1.0 / nt_nr) * (1.0 - 1.0 / p) + 1.0 / p;
      const double gap = std::abs(mc.mean - formula);
      const double budget = std::max(3.0 * mc.ci_half_width, 0.10 * formula);
      result.subs.push_back(
          {gap <= budget, "N=" + std::to_string(n) + " P=" + std::to_string(p) +
                              ": MC " + num(mc.mean) + " vs formula " +
                              num(formula) + ", |gap| " + num(gap) +
                              " <= " + num(budget)});
    }
  }
  result.elapsed_s = timer.seconds();
  result.subs.push_back({result.elapsed_s < 300.0,
                         "runtime " + num(result.elapsed_s) + " s < 300 s"});
  return result;
}

// --- criterion 3: large-scale floor at N = 32 ----------------------------------

CriterionResult criterion_3() {
  CriterionResult result{3, "large-scale floor: 1/P < CV^2 < 1/P + 2/(Nt Nr) at N=32"};
  Timer timer;
  const ArrayTopology array = make_ula(32, 0.5, 1.0);
  const struct {
    int p;
    std::uint64_t trials;
  } points[] = {{2, 40000000}, {4, 8000000}, {5, 6000000}, {6, 5000000}};
  std::uint64_t stream = 200;
  for (const auto& point : points) {
    const MomentEstimate mc =
        channel_cv2_estimate(RayDistribution{}, point.p, array, array,
                             point.trials, SeedSpec{kMasterSeed, stream++});
    const double floor = 1.0 / point.p;
    const double ceiling = floor + 2.0 / 1024.0;
    result.subs.push_back(
        {mc.mean > floor && mc.mean < ceiling,
         "P=" + std::to_string(point.p) + " (" + std::to_string(point.trials) +
             " trials): CV^2 = " + num(mc.mean) + " in (" + num(floor) + ", " +
             num(ceiling) + "), ci = " + num(mc.ci_half_width)});
  }
  result.elapsed_s = timer.seconds();
  return result;
}

// --- criterion 4: E^2 asymptote ---------------------------------------------------

CriterionResult criterion_4() {
  CriterionResult result{4, "E2 asymptote: N E2 in [0.9, 1.1] at lambda/2"};
  Timer timer;
  std::uint64_t stream = 300;
  for (const ArrayType type : {ArrayType::Ula, ArrayType::Uca, ArrayType::Upa}) {
    for (const int n : {8, 16, 64}) {
      const ArrayTopology array = make_array(type, n, 0.5, 1.0);
      const MomentEstimate est =
          e2_estimate(array, UniformSphere{}, 1000000,
                      SeedSpec{kMasterSeed, stream++});
      const double n_e2 = n * est.mean;
      result.subs.push_back(
          {n_e2 >= 0.9 && n_e2 <= 1.1,
           to_string(type) + " N=" + std::to_string(n) + ": N E2 = " +
               num(n_e2) + " (ci " + num(n * est.ci_half_width) +
               "), exact lattice value " + num(n * e2_lattice_sum(array))});
    }
  }
  const ArrayTopology tight = make_ula(16, 0.01, 1.0);
  const MomentEstimate tight_est = e2_estimate(
      tight, UniformSphere{}, 1000000, SeedSpec{kMasterSeed, stream++});
  result.subs.push_back({16.0 * tight_est.mean >= 5.0,
                         "ULA N=16 at lambda/100: N E2 = " +
                             num(16.0 * tight_est.mean) + " >= 5"});
  result.elapsed_s = timer.seconds();
  result.subs.push_back({result.elapsed_s < 60.0,
                         "runtime " + num(result.elapsed_s) + " s < 60 s"});
  return result;
}

// --- criterion 5: alpha^2 bounds ---------------------------------------------------

CriterionResult criterion_5() {
  CriterionResult result{5, "alpha^2 bounds and equalities"};
  Timer timer;
  RngStream rng = SeedSpec{kMasterSeed, 400}.trial_stream(0);
  bool bounds_ok = true;
  for (int i = 0; i < 10000; ++i) {
    const std::size_t p = 1 + rng.uniform_index(16);
    std::vector<double> amps(p);
    double max_a = 0.0;
    const int style = static_cast<int>(rng.uniform_index(3));
    for (double& a : amps) {
      if (style == 0) {
        a = rng.uniform();
      } else if (style == 1) {
        a = std::exp(3.0 * rng.normal());
      } else {
        a = rng.uniform() < 0.4 ? 0.0 : rng.uniform();
      }
      max_a = std::max(max_a, a);
    }
    if (max_a == 0.0) amps[0] = 1.0;
    const double value = alpha2(amps);
    if (!(value >= 0.0 && value <= 1.0 - 1.0 / double(p))) bounds_ok = false;
  }
  result.subs.push_back(
      {bounds_ok, "0 <= alpha^2 <= 1 - 1/P over 10^4 random vectors, P in 1..16"});

  bool single_ok = true;
  for (int i = 0; i < 100; ++i) {
    const double a = std::exp(2.0 * rng.normal());
    if (alpha2(std::vector<double>{a}) != 0.0) single_ok = false;
  }
  result.subs.push_back({single_ok, "single-ray vectors give exactly 0"});

  bool equal_ok = true;
  for (std::size_t p = 2; p <= 16; ++p) {
    const double a = std::exp(rng.normal());
    const std::vector<double> equal(p, a);
    if (alpha2(equal) != 1.0 - 1.0 / double(p)) equal_ok = false;
  }
  result.subs.push_back({equal_ok, "equal-power vectors give exactly 1 - 1/P"});
  result.elapsed_s = timer.seconds();
  return result;
}

// --- criterion 6: large-scale toy formula ------------------------------------------

CriterionResult criterion_6() {
  CriterionResult result{6, "large-scale toy formula: CV^2(||c||^2) = 1/P"};
  Timer timer;
  std::uint64_t stream = 500;
  for (const int p : {1, 2, 4, 8}) {
    const MomentAccumulator acc = accumulate_trials(
        [p](std::uint64_t, RngStream& rng) {
          double power = 0.0;
          for (int k = 0; k < p; ++k) power += std::norm(rng.complex_normal(1.0));
          return power;
        },
        1000000, SeedSpec{kMasterSeed, stream++});
    const MomentEstimate est = cv2_from_accumulator(acc);
    const double gap = std::abs(est.mean - 1.0 / p);
    result.subs.push_back(
        {gap <= 3.0 * est.ci_half_width,
         "P=" + std::to_string(p) + ": large_scale_term = " + num(est.mean) +
             " vs 1/P = " + num(1.0 / p) + ", |gap| " + num(gap) +
             " <= 3 ci = " + num(3.0 * est.ci_half_width)});
  }
  result.elapsed_s = timer.seconds();
  return result;
}

// --- criterion 7: conditional model -------------------------------------------------

CriterionResult criterion_7() {
  CriterionResult result{7, "conditional model: CV^2 = E2 E2 alpha^2 for fixed amplitudes"};
  Timer timer;
  const ArrayTopology array = make_ula(4, 0.5, 1.0);
  const MomentEstimate e2_tx = e2_estimate(array, UniformSphere{}, 1000000,
                                           SeedSpec{kMasterSeed, 600});
  const MomentEstimate e2_rx = e2_estimate(array, UniformSphere{}, 1000000,
                                           SeedSpec{kMasterSeed, 601});

  std::vector<Eigen::VectorXd> vectors;
  vectors.push_back((Eigen::VectorXd(1) << 1.0).finished());
  vectors.push_back((Eigen::VectorXd(4) << 1.0, 1.0, 1.0, 1.0).finished());
  vectors.push_back((Eigen::VectorXd(3) << 1.0, 1.0, 2.0).finished());

  std::uint64_t stream = 610;
  for (const auto& amps : vectors) {
    const RayDistribution dist{FixedAmplitudesGain{amps}, UniformSphere{},
                               UniformSphere{}};
    const MomentEstimate mc =
        channel_cv2_estimate(dist, amps.size(), array, array, 200000,
                             SeedSpec{kMasterSeed, stream++});
    const double a2 = alpha2(amps);
    const double formula = e2_tx.mean * e2_rx.mean * a2;
    const double formula_ci =
        a2 * std::sqrt(std::pow(e2_rx.mean * e2_tx.ci_half_width, 2) +
                       std::pow(e2_tx.mean * e2_rx.ci_half_width, 2));
    const double budget =
        3.0 * std::sqrt(mc.ci_half_width * mc.ci_half_width +
                        formula_ci * formula_ci) +
        1e-12;
    std::ostringstream label;
    label << "amplitudes [";
    for (Eigen::Index i = 0; i < amps.size(); ++i) {
      if (i > 0) label << ", ";
      label << amps(i);
    }
    label << "]: MC " << num(mc.mean) << " vs " << num(formula) << ", |gap| "
          << num(std::abs(mc.mean - formula)) << " <= " << num(budget);
    result.subs.push_back({std::abs(mc.mean - formula) <= budget, label.str()});
  }
  result.elapsed_s = timer.seconds();
  return result;
}

// --- criterion 8: Appendix fourth-moment oracle --------------------------------------

CriterionResult criterion_8() {
  CriterionResult result{8, "fourth-moment decomposition agrees with direct estimate"};
  Timer timer;
  const struct {
    int nt, nr, p;
  } cases[] = {{2, 2, 2}, {2, 4, 3}, {4, 4, 5}};
  std::uint64_t stream = 700;
  for (const auto& c : cases) {
    const ArrayTopology tx = make_ula(c.nt, 0.5, 1.0);
    const ArrayTopology rx = make_ula(c.nr, 0.5, 1.0);
    const FourthMomentPair pair =
        fourth_moment_oracle(RayDistribution{}, tx, rx, c.p, 100000,
                             SeedSpec{kMasterSeed, stream++});
    const double budget = 3.0 * std::sqrt(
        pair.direct.ci_half_width * pair.direct.ci_half_width +
        pair.decomposed.ci_half_width * pair.decomposed.ci_half_width);
    const double gap = std::abs(pair.direct.mean - pair.decomposed.mean);
    result.subs.push_back(
        {gap <= budget,
         "(Nt,Nr,P)=(" + std::to_string(c.nt) + "," + std::to_string(c.nr) +
             "," + std::to_string(c.p) + "): direct " + num(pair.direct.mean) +
             " vs decomposed " + num(pair.decomposed.mean) + ", |gap| " +
             num(gap) + " <= " + num(budget)});
  }
  result.elapsed_s = timer.seconds();
  return result;
}

// --- criterion 9: mean-gain law -------------------------------------------------------

CriterionResult criterion_9() {
  CriterionResult result{9, "mean gain law: E{gain}/(Nt Nr P) = 1"};
  Timer timer;
  std::uint64_t stream = 800;
  const int p = 4;
  for (const ArrayType type : {ArrayType::Ula, ArrayType::Uca, ArrayType::Upa}) {
    const ArrayTopology array = make_array(type, 8, 0.5, 1.0);
    const double scale = 1.0 / (64.0 * p);
    const MomentEstimate est = run_trials(
        [&](std::uint64_t, RngStream& rng) {
          return scale * channel_gain(assemble_channel(
                             sample_rayset(RayDistribution{}, p, rng), array, array));
        },
        100000, SeedSpec{kMasterSeed, stream++});
    const double gap = std::abs(est.mean - 1.0);
    result.subs.push_back(
        {gap <= 3.0 * est.ci_half_width,
         to_string(type) + ": normalized mean gain = " + num(est.mean) +
             ", |gap| " + num(gap) + " <= 3 ci = " + num(3.0 * est.ci_half_width)});
  }
  result.elapsed_s = timer.seconds();
  return result;
}

// --- criterion 10: CLI determinism ----------------------------------------------------

std::string read_file_without_timestamp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing " + path.string() + ">";
  std::string out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# timestamp:", 0) == 0) continue;
    out += line;
    out += '\n';
  }
  return out;
}

CriterionResult criterion_10(const std::string& cli_path) {
  CriterionResult result{10, "figure commands are byte-deterministic across workers"};
  Timer timer;
  if (cli_path.empty()) {
    result.subs.push_back({false, "no --cli path given"});
    return result;
  }

  const auto base = std::filesystem::temp_directory_path() / "hardening_acceptance";
  std::filesystem::remove_all(base);
  std::filesystem::create_directories(base);

  const auto fig3_cfg = base / "fig3.cfg";
  {
    std::ofstream out(fig3_cfg);
    out << "experiment = e2-vs-antennas\naxis = 1, 2, 4\n"
           "array_types = ula, uca\ntrials = 20000\nseed = 7\n";
  }
  const auto fig1_cfg = base / "fig1.cfg";
  {
    std::ofstream out(fig1_cfg);
    out << "experiment = cv2-vs-antennas\naxis = 2, 4\np_rays = 2, 3\n"
           "trials = 20000\nseed = 9\n";
  }

  struct Run {
    const char* subcommand;
    std::filesystem::path config;
    const char* workers;
    const char* out_name;
    const char* csv_name;
  };
  const Run runs[] = {
      {"fig3", fig3_cfg, "1", "out3_w1", "fig3.csv"},
      {"fig3", fig3_cfg, "2", "out3_w2", "fig3.csv"},
      {"fig3", fig3_cfg, "1", "out3_w1_again", "fig3.csv"},
      {"fig1", fig1_cfg, "1", "out1_w1", "fig1.csv"},
      {"fig1", fig1_cfg, "2", "out1_w2", "fig1.csv"},
  };
  bool commands_ok = true;
  for (const Run& run : runs) {
    setenv("HARDENING_WORKERS", run.workers, 1);
    std::ostringstream cmd;
    cmd << '"' << cli_path << "\" " << run.subcommand << " --config \""
        << run.config.string() << "\" --out \"" << (base / run.out_name).string()
        << "\" --plot";
    const int rc = std::system(cmd.str().c_str());
    if (rc != 0) commands_ok = false;
  }
  unsetenv("HARDENING_WORKERS");
  result.subs.push_back({commands_ok, "all figure commands exited 0"});

  const std::string fig3_w1 = read_file_without_timestamp(base / "out3_w1" / "fig3.csv");
  const std::string fig3_w2 = read_file_without_timestamp(base / "out3_w2" / "fig3.csv");
  const std::string fig3_again =
      read_file_without_timestamp(base / "out3_w1_again" / "fig3.csv");
  result.subs.push_back({fig3_w1 == fig3_w2 && !fig3_w1.empty(),
                         "fig3 CSV identical for 1 vs 2 workers"});
  result.subs.push_back({fig3_w1 == fig3_again, "fig3 CSV identical across re-runs"});

  const std::string fig1_w1 = read_file_without_timestamp(base / "out1_w1" / "fig1.csv");
  const std::string fig1_w2 = read_file_without_timestamp(base / "out1_w2" / "fig1.csv");
  result.subs.push_back({fig1_w1 == fig1_w2 && !fig1_w1.empty(),
                         "fig1 CSV identical for 1 vs 2 workers"});

  result.elapsed_s = timer.seconds();
  return result;
}

}  // namespace

int main(int argc, char** argv) {
  int only_criterion = 0;
  std::string cli_path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      only_criterion = std::atoi(argv[++i]);
    } else if (arg == "--cli" && i + 1 < argc) {
      cli_path = argv[++i];
    } else {
      std::cerr << "usage: acceptance [--criterion N] [--cli PATH]\n";
      return 2;
    }
  }

  std::vector<CriterionResult> results;
  for (int id = 1; id <= 10; ++id) {
    if (only_criterion != 0 && id != only_criterion) continue;
    switch (id) {
      case 1: results.push_back(criterion_1()); break;
      case 2: results.push_back(criterion_2()); break;
      case 3: results.push_back(criterion_3()); break;
      case 4: results.push_back(criterion_4()); break;
      case 5: results.push_back(criterion_5()); break;
      case 6: results.push_back(criterion_6()); break;
      case 7: results.push_back(criterion_7()); break;
      case 8: results.push_back(criterion_8()); break;
      case 9: results.push_back(criterion_9()); break;
      case 10: results.push_back(criterion_10(cli_path)); break;
    }
  }

  bool all_passed = true;
  for (const auto& result : results) {
    const bool passed = result.passed();
    all_passed = all_passed && passed;
    std::cout << "criterion " << result.id << ": " << (passed ? "PASS" : "FAIL")
              << " — " << result.title << " (" << num(result.elapsed_s)
              << " s)\n";
    for (const auto& sub : result.subs) {
      std::cout << "    [" << (sub.passed ? "ok" : "FAIL") << "] " << sub.text
                << '\n';
    }
  }
  std::cout << (all_passed ? "acceptance: all run criteria passed"
                           : "acceptance: FAILURES present")
            << '\n';
  return all_passed ? 0 : 1;
}
