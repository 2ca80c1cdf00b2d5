// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "hardening/experiments.hpp"
#include "hardening/plot.hpp"
#include "hardening/version.hpp"

namespace hardening {

namespace {

std::string fmt(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buffer;
}

std::string csv_header(const SweepConfig& cfg) {
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  std::ostringstream out;
  out << "# artifact_version: " << kVersion << '\n'
      << "# experiment: " << to_string(cfg.experiment) << '\n'
      << "# config_hash: " << hash_hex << '\n'
      << "# seed: " << cfg.seed << '\n'
      << "# trials: " << cfg.trials << '\n'
      << "# timestamp: " << utc_timestamp() << '\n';
  return out.str();
}

int axis_as_int(double value) { return static_cast<int>(std::llround(value)); }

}  // namespace

std::vector<Fig1Row> run_fig1(const SweepConfig& cfg, unsigned workers) {
  if (cfg.experiment != ExperimentKind::Cv2VsAntennas) {
    throw ConfigError("run_fig1 needs experiment = cv2-vs-antennas");
  }
  const double spacing = cfg.spacing_over_lambda * cfg.wavelength;
  std::vector<Fig1Row> rows;
  std::uint64_t stream = 0;
  for (const double axis_value : cfg.axis) {
    const int n = axis_as_int(axis_value);
    const ArrayTopology array =
        make_array(cfg.array_types.front(), n, spacing, cfg.wavelength);
    for (const int p : cfg.p_rays) {
      RayDistribution dist{cfg.gain_law, cfg.direction_law, cfg.direction_law};
      const MomentEstimate est =
          channel_cv2_estimate(dist, p, array, array, cfg.trials,
                               SeedSpec{cfg.seed, stream++}, workers);
      rows.push_back({n, p, est.mean, est.ci_half_width, 1.0 / p});
    }
  }
  return rows;
}

std::vector<Fig2Row> run_fig2(const SweepConfig& cfg, unsigned workers) {
  if (cfg.experiment != ExperimentKind::E2VsSpacing) {
    throw ConfigError("run_fig2 needs experiment = e2-vs-spacing");
  }
  const int n = cfg.n_antennas;
  std::vector<Fig2Row> rows;
  std::uint64_t stream = 0;
  for (const ArrayType type : cfg.array_types) {
    for (const double rel_spacing : cfg.axis) {
      const ArrayTopology array =
          make_array(type, n, rel_spacing * cfg.wavelength, cfg.wavelength);
      const MomentEstimate est =
          e2_estimate(array, cfg.direction_law, cfg.trials,
                      SeedSpec{cfg.seed, stream++}, workers);
      rows.push_back({type, rel_spacing, n * est.mean, n * est.ci_half_width});
    }
  }
  return rows;
}

std::vector<Fig3Row> run_fig3(const SweepConfig& cfg, unsigned workers) {
  if (cfg.experiment != ExperimentKind::E2VsAntennas) {
    throw ConfigError("run_fig3 needs experiment = e2-vs-antennas");
  }
  const double spacing = cfg.spacing_over_lambda * cfg.wavelength;
  std::vector<Fig3Row> rows;
  std::uint64_t stream = 0;
  for (const ArrayType type : cfg.array_types) {
    for (const double axis_value : cfg.axis) {
      const int n = axis_as_int(axis_value);
      const ArrayTopology array = make_array(type, n, spacing, cfg.wavelength);
      const MomentEstimate est =
          e2_estimate(array, cfg.direction_law, cfg.trials,
                      SeedSpec{cfg.seed, stream++}, workers);
      rows.push_back({type, n, est.mean, est.ci_half_width, 1.0 / n});
    }
  }
  return rows;
}

std::vector<Fig4Row> run_fig4(const SweepConfig& cfg, unsigned workers) {
  if (cfg.experiment != ExperimentKind::Cv2VsFormula) {
    throw ConfigError("run_fig4 needs experiment = cv2-vs-formula");
  }
  const double spacing = cfg.spacing_over_lambda * cfg.wavelength;
  std::vector<Fig4Row> rows;
  std::uint64_t stream = 0;
  for (const double axis_value : cfg.axis) {
    const int n = axis_as_int(axis_value);
    const ArrayTopology array =
        make_array(cfg.array_types.front(), n, spacing, cfg.wavelength);
    for (const int p : cfg.p_rays) {
      RayDistribution dist{cfg.gain_law, cfg.direction_law, cfg.direction_law};
      const MomentEstimate est =
          channel_cv2_estimate(dist, p, array, array, cfg.trials,
                               SeedSpec{cfg.seed, stream++}, workers);
      const double nt_nr = static_cast<double>(n) * n;
      const double formula = (1.0 / nt_nr) * (1.0 - 1.0 / p) + 1.0 / p;
      rows.push_back({n, p, est.mean, est.ci_half_width, formula,
                      std::abs(est.mean - formula) / formula});
    }
  }
  return rows;
}

std::vector<RayleighBaselineRow> run_rayleigh_baseline(const SweepConfig& cfg,
                                                       unsigned workers) {
  if (cfg.experiment != ExperimentKind::RayleighBaseline) {
    throw ConfigError("run_rayleigh_baseline needs experiment = rayleigh-baseline");
  }
  std::vector<RayleighBaselineRow> rows;
  std::uint64_t stream = 0;
  for (const double axis_value : cfg.axis) {
    const int n = axis_as_int(axis_value);
    const CovarianceMatrix identity(
        Eigen::MatrixXcd::Identity(n, n));
    const double exact = rayleigh_cv2(identity);
    const MomentAccumulator acc = accumulate_trials(
        [n](std::uint64_t, RngStream& rng) {
          double power = 0.0;
          for (int i = 0; i < n; ++i) power += std::norm(rng.complex_normal(1.0));
          return power;
        },
        cfg.trials, SeedSpec{cfg.seed, stream++}, workers);
    const MomentEstimate est = cv2_from_accumulator(acc);
    rows.push_back({n, exact, est.mean, est.ci_half_width});
  }
  return rows;
}

// --- CSV ------------------------------------------------------------------------

std::string csv_text(const SweepConfig& cfg, const std::vector<Fig1Row>& rows) {
  std::string out = csv_header(cfg);
  out += "n_antennas,p_rays,cv2_mc,ci_half,asymptote\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n_antennas) + ',' + std::to_string(row.p_rays) +
           ',' + fmt(row.cv2_mc) + ',' + fmt(row.ci_half) + ',' +
           fmt(row.asymptote) + '\n';
  }
  return out;
}

std::string csv_text(const SweepConfig& cfg, const std::vector<Fig2Row>& rows) {
  std::string out = csv_header(cfg);
  out += "array_type,spacing_over_lambda,n_e2,ci_half\n";
  for (const auto& row : rows) {
    out += to_string(row.array_type) + ',' + fmt(row.spacing_over_lambda) +
           ',' + fmt(row.n_e2) + ',' + fmt(row.ci_half) + '\n';
  }
  return out;
}

std::string csv_text(const SweepConfig& cfg, const std::vector<Fig3Row>& rows) {
  std::string out = csv_header(cfg);
  out += "array_type,n_antennas,e2,ci_half,inv_n\n";
  for (const auto& row : rows) {
    out += to_string(row.array_type) + ',' + std::to_string(row.n_antennas) +
           ',' + fmt(row.e2) + ',' + fmt(row.ci_half) + ',' + fmt(row.inv_n) +
           '\n';
  }
  return out;
}

std::string csv_text(const SweepConfig& cfg, const std::vector<Fig4Row>& rows) {
  std::string out = csv_header(cfg);
  out += "n_antennas,p_rays,cv2_mc,ci_half,cv2_formula,rel_gap\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n_antennas) + ',' + std::to_string(row.p_rays) +
           ',' + fmt(row.cv2_mc) + ',' + fmt(row.ci_half) + ',' +
           fmt(row.cv2_formula) + ',' + fmt(row.rel_gap) + '\n';
  }
  return out;
}

std::string csv_text(const SweepConfig& cfg,
                     const std::vector<RayleighBaselineRow>& rows) {
  std::string out = csv_header(cfg);
  out += "n_dims,cv2_exact,cv2_mc,ci_half\n";
  for (const auto& row : rows) {
    out += std::to_string(row.n_dims) + ',' + fmt(row.cv2_exact) + ',' +
           fmt(row.cv2_mc) + ',' + fmt(row.ci_half) + '\n';
  }
  return out;
}

// --- plots ----------------------------------------------------------------------

namespace {

PlotSpec plot_spec(const SweepConfig& cfg, const std::vector<Fig1Row>& rows) {
  PlotSpec spec{"Simulated CV^2 vs antenna count", "N (= Nt = Nr)", "CV^2",
                true, true, {}};
  for (const int p : cfg.p_rays) {
    PlotSeries mc{"P=" + std::to_string(p), {}, false};
    PlotSeries floor{"1/P, P=" + std::to_string(p), {}, true};
    for (const auto& row : rows) {
      if (row.p_rays != p) continue;
      mc.points.emplace_back(row.n_antennas, row.cv2_mc);
      floor.points.emplace_back(row.n_antennas, row.asymptote);
    }
    spec.series.push_back(std::move(mc));
    spec.series.push_back(std::move(floor));
  }
  return spec;
}

PlotSpec plot_spec(const SweepConfig& cfg, const std::vector<Fig2Row>& rows) {
  PlotSpec spec{"Normalized ray correlation vs spacing", "spacing / lambda",
                "N * E2", false, true, {}};
  for (const ArrayType type : cfg.array_types) {
    PlotSeries series{to_string(type), {}, false};
    for (const auto& row : rows) {
      if (row.array_type != type) continue;
      series.points.emplace_back(row.spacing_over_lambda, row.n_e2);
    }
    spec.series.push_back(std::move(series));
  }
  return spec;
}

PlotSpec plot_spec(const SweepConfig& cfg, const std::vector<Fig3Row>& rows) {
  PlotSpec spec{"Ray correlation vs antenna count", "N", "E2", true, true, {}};
  for (const ArrayType type : cfg.array_types) {
    PlotSeries series{to_string(type), {}, false};
    for (const auto& row : rows) {
      if (row.array_type != type) continue;
      series.points.emplace_back(row.n_antennas, row.e2);
    }
    spec.series.push_back(std::move(series));
  }
  PlotSeries reference{"1/N", {}, true};
  for (const auto& row : rows) {
    if (row.array_type != cfg.array_types.front()) continue;
    reference.points.emplace_back(row.n_antennas, row.inv_n);
  }
  spec.series.push_back(std::move(reference));
  return spec;
}

PlotSpec plot_spec(const SweepConfig& cfg, const std::vector<Fig4Row>& rows) {
  PlotSpec spec{"Simulated CV^2 vs closed form", "N (= Nt = Nr)", "CV^2",
                true, true, {}};
  for (const int p : cfg.p_rays) {
    PlotSeries mc{"MC P=" + std::to_string(p), {}, false};
    PlotSeries formula{"formula P=" + std::to_string(p), {}, true};
    for (const auto& row : rows) {
      if (row.p_rays != p) continue;
      mc.points.emplace_back(row.n_antennas, row.cv2_mc);
      formula.points.emplace_back(row.n_antennas, row.cv2_formula);
    }
    spec.series.push_back(std::move(mc));
    spec.series.push_back(std::move(formula));
  }
  return spec;
}

PlotSpec plot_spec(const SweepConfig&,
                   const std::vector<RayleighBaselineRow>& rows) {
  PlotSpec spec{"Rayleigh baseline CV^2", "N", "CV^2", true, true, {}};
  PlotSeries mc{"MC", {}, false};
  PlotSeries exact{"1/N", {}, true};
  for (const auto& row : rows) {
    mc.points.emplace_back(row.n_dims, row.cv2_mc);
    exact.points.emplace_back(row.n_dims, row.cv2_exact);
  }
  spec.series.push_back(std::move(mc));
  spec.series.push_back(std::move(exact));
  return spec;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file '" + path.string() + "'");
  }
  out << text;
}

std::string file_stem(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Cv2VsAntennas: return "fig1";
    case ExperimentKind::E2VsSpacing: return "fig2";
    case ExperimentKind::E2VsAntennas: return "fig3";
    case ExperimentKind::Cv2VsFormula: return "fig4";
    case ExperimentKind::RayleighBaseline: return "rayleigh_baseline";
  }
  return "experiment";
}

}  // namespace

std::filesystem::path run_experiment_to_files(
    const SweepConfig& cfg, const std::filesystem::path& out_dir, bool plot,
    unsigned workers) {
  std::filesystem::create_directories(out_dir);
  const std::string stem = file_stem(cfg.experiment);
  const std::filesystem::path csv_path = out_dir / (stem + ".csv");

  std::string csv;
  PlotSpec spec;
  switch (cfg.experiment) {
    case ExperimentKind::Cv2VsAntennas: {
      const auto rows = run_fig1(cfg, workers);
      csv = csv_text(cfg, rows);
      spec = plot_spec(cfg, rows);
      break;
    }
    case ExperimentKind::E2VsSpacing: {
      const auto rows = run_fig2(cfg, workers);
      csv = csv_text(cfg, rows);
      spec = plot_spec(cfg, rows);
      break;
    }
    case ExperimentKind::E2VsAntennas: {
      const auto rows = run_fig3(cfg, workers);
      csv = csv_text(cfg, rows);
      spec = plot_spec(cfg, rows);
      break;
    }
    case ExperimentKind::Cv2VsFormula: {
      const auto rows = run_fig4(cfg, workers);
      csv = csv_text(cfg, rows);
      spec = plot_spec(cfg, rows);
      break;
    }
    case ExperimentKind::RayleighBaseline: {
      const auto rows = run_rayleigh_baseline(cfg, workers);
      csv = csv_text(cfg, rows);
      spec = plot_spec(cfg, rows);
      break;
    }
  }

  write_text_file(csv_path, csv);
  if (plot) {
    write_svg(out_dir / (stem + ".svg"), spec);
  }
  return csv_path;
}

}  // namespace hardening
