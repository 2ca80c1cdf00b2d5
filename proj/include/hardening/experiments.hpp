// SPDX-License-Identifier: Apache-2.0
//
// hardening: configuration-driven experiment runners.
//
// Each experiment sweeps one axis and writes a CSV table (plus an optional
// SVG plot derived from the same rows). Output files embed the artifact
// version, config hash, master seed and trial count; re-running with the
// same header reproduces the file byte-for-byte apart from the timestamp
// line, regardless of the worker count.

#ifndef HARDENING_EXPERIMENTS_HPP
#define HARDENING_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hardening/hardening_stats.hpp"
#include "hardening/ray_channel.hpp"

namespace hardening {

/// Configuration problem (bad file, bad key, bad value). Messages carry the
/// offending file/line or field name.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind {
  Cv2VsAntennas,    // fig1
  E2VsSpacing,      // fig2
  E2VsAntennas,     // fig3
  Cv2VsFormula,     // fig4
  RayleighBaseline  // validation baseline
};

enum class ArrayType { Ula, Uca, Upa };

std::string to_string(ExperimentKind kind);
std::string to_string(ArrayType type);
ExperimentKind parse_experiment_kind(const std::string& text);
ArrayType parse_array_type(const std::string& text);

/// Builds the requested array type; n = 1 degenerates to a single antenna
/// at the origin for every type.
ArrayTopology make_array(ArrayType type, Eigen::Index n, double spacing,
                         double wavelength);

/// One experiment axis: what varies, what stays fixed, how many trials,
/// which seed. Parsed from a flat key-value file and/or CLI overrides.
struct SweepConfig {
  ExperimentKind experiment = ExperimentKind::Cv2VsAntennas;
  std::vector<double> axis;           // swept values, strictly increasing
  std::vector<int> p_rays;            // fig1 / fig4
  std::vector<ArrayType> array_types; // fig2 / fig3
  GainLaw gain_law = ComplexGaussianGain{1.0};
  DirectionLaw direction_law = UniformSphere{};
  double snr = 10.0;
  double spacing_over_lambda = 0.5;   // fixed spacing for fig1/fig3/fig4
  int n_antennas = 16;                // fixed array size for fig2
  double wavelength = 1.0;
  std::uint64_t trials = 0;           // 0 = experiment default
  std::uint64_t seed = 1;

  /// Canonical flat key=value serialization (sorted keys); hashing this
  /// yields the config hash embedded in output headers.
  std::string canonical_text() const;
  std::uint64_t hash() const;
};

/// Default configuration for an experiment kind.
SweepConfig default_config(ExperimentKind kind);

/// Parses a flat key-value config file (lines of `key = value`, `#`
/// comments). Unknown keys, malformed values and non-increasing axes raise
/// ConfigError with file/line diagnostics.
SweepConfig parse_config_file(const std::filesystem::path& path);

/// Applies defaults for fields the file left unset and validates the
/// result against the experiment kind.
void finalize_config(SweepConfig& cfg);

// --- result rows ---------------------------------------------------------------

struct Fig1Row {
  int n_antennas;
  int p_rays;
  double cv2_mc;
  double ci_half;
  double asymptote;  // 1/P floor
};

struct Fig2Row {
  ArrayType array_type;
  double spacing_over_lambda;
  double n_e2;  // N * E2, normalized so the asymptote is 1
  double ci_half;
};

struct Fig3Row {
  ArrayType array_type;
  int n_antennas;
  double e2;
  double ci_half;
  double inv_n;  // 1/N reference
};

struct Fig4Row {
  int n_antennas;
  int p_rays;
  double cv2_mc;
  double ci_half;
  double cv2_formula;  // (1/(Nt Nr))(1 - 1/P) + 1/P
  double rel_gap;
};

struct RayleighBaselineRow {
  int n_dims;
  double cv2_exact;  // Tr(R^2)/Tr(R)^2 with R = I, i.e. 1/N
  double cv2_mc;
  double ci_half;
};

/// Simulated CV^2 versus antenna count for each ray count, with the 1/P
/// asymptote column.
std::vector<Fig1Row> run_fig1(const SweepConfig& cfg, unsigned workers = 0);

/// N * E2 versus antenna spacing for each array type.
std::vector<Fig2Row> run_fig2(const SweepConfig& cfg, unsigned workers = 0);

/// E2 versus antenna count at fixed spacing for each array type, with the
/// 1/N reference column.
std::vector<Fig3Row> run_fig3(const SweepConfig& cfg, unsigned workers = 0);

/// Simulated CV^2 against the illustration closed form.
std::vector<Fig4Row> run_fig4(const SweepConfig& cfg, unsigned workers = 0);

/// Monte-Carlo CV^2 of ||h||^2, h ~ CN(0, I_N), against the exact 1/N.
std::vector<RayleighBaselineRow> run_rayleigh_baseline(const SweepConfig& cfg,
                                                       unsigned workers = 0);

// --- output --------------------------------------------------------------------

/// Runs the experiment named by cfg.experiment and writes `<figname>.csv`
/// (and `<figname>.svg` when `plot` is set) under out_dir. Returns the CSV
/// path.
std::filesystem::path run_experiment_to_files(const SweepConfig& cfg,
                                              const std::filesystem::path& out_dir,
                                              bool plot, unsigned workers = 0);

std::string csv_text(const SweepConfig& cfg, const std::vector<Fig1Row>& rows);
std::string csv_text(const SweepConfig& cfg, const std::vector<Fig2Row>& rows);
std::string csv_text(const SweepConfig& cfg, const std::vector<Fig3Row>& rows);
std::string csv_text(const SweepConfig& cfg, const std::vector<Fig4Row>& rows);
std::string csv_text(const SweepConfig& cfg,
                     const std::vector<RayleighBaselineRow>& rows);

}  // namespace hardening

#endif  // HARDENING_EXPERIMENTS_HPP
