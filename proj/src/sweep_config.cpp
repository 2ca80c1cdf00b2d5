// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "hardening/experiments.hpp"

namespace hardening {

namespace {

std::string fmt_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = text.find_last_not_of(" \t\r\n");
  return text.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, sep)) parts.push_back(trim(current));
  return parts;
}

double parse_double(const std::string& text, const std::string& where) {
  try {
    std::size_t pos = 0;
    const double value = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + text + "'");
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& where) {
  try {
    std::size_t pos = 0;
    const unsigned long long value = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected an unsigned integer, got '" + text +
                      "'");
  }
}

int parse_positive_int(const std::string& text, const std::string& where) {
  const double value = parse_double(text, where);
  const int as_int = static_cast<int>(std::llround(value));
  if (!(value > 0.0) || std::abs(value - as_int) > 1e-9) {
    throw ConfigError(where + ": expected a positive integer, got '" + text +
                      "'");
  }
  return as_int;
}

GainLaw parse_gain_law(const std::string& text, const std::string& where) {
  if (text == "equal-power") return EqualPowerGain{};
  const std::string gaussian_prefix = "complex-gaussian";
  if (text.rfind(gaussian_prefix, 0) == 0) {
    double variance = 1.0;
    if (text.size() > gaussian_prefix.size()) {
      if (text[gaussian_prefix.size()] != ':') {
        throw ConfigError(where + ": malformed gain law '" + text + "'");
      }
      variance =
          parse_double(text.substr(gaussian_prefix.size() + 1), where);
    }
    if (!(variance > 0.0)) {
      throw ConfigError(where + ": gain variance must be positive");
    }
    return ComplexGaussianGain{variance};
  }
  const std::string fixed_prefix = "fixed-amplitudes:";
  if (text.rfind(fixed_prefix, 0) == 0) {
    const auto parts = split(text.substr(fixed_prefix.size()), ';');
    if (parts.empty()) {
      throw ConfigError(where + ": fixed-amplitudes needs at least one value");
    }
    Eigen::VectorXd amps(static_cast<Eigen::Index>(parts.size()));
    for (std::size_t i = 0; i < parts.size(); ++i) {
      amps(static_cast<Eigen::Index>(i)) = parse_double(parts[i], where);
      if (amps(static_cast<Eigen::Index>(i)) < 0.0) {
        throw ConfigError(where + ": amplitudes must be nonnegative");
      }
    }
    return FixedAmplitudesGain{std::move(amps)};
  }
  throw ConfigError(where + ": unknown gain law '" + text + "'");
}

DirectionLaw parse_direction_law(const std::string& text,
                                 const std::string& where) {
  if (text == "uniform-sphere") return UniformSphere{};
  const std::string list_prefix = "fixed-direction-list:";
  if (text.rfind(list_prefix, 0) == 0) {
    const auto vectors = split(text.substr(list_prefix.size()), ';');
    if (vectors.empty()) {
      throw ConfigError(where + ": direction list needs at least one vector");
    }
    DirectionList list;
    for (const auto& vec_text : vectors) {
      const auto coords = split(vec_text, ',');
      if (coords.size() != 3) {
        throw ConfigError(where + ": direction '" + vec_text +
                          "' must have three coordinates");
      }
      Vec3 d(parse_double(coords[0], where), parse_double(coords[1], where),
             parse_double(coords[2], where));
      const double norm = d.norm();
      if (norm <= 0.0) {
        throw ConfigError(where + ": zero direction vector");
      }
      list.directions.push_back(d / norm);
    }
    return DirectionLaw{std::move(list)};
  }
  throw ConfigError(where + ": unknown direction law '" + text + "'");
}

std::string gain_law_text(const GainLaw& law) {
  if (const auto* gaussian = std::get_if<ComplexGaussianGain>(&law)) {
    return "complex-gaussian:" + fmt_double(gaussian->variance);
  }
  if (const auto* fixed = std::get_if<FixedAmplitudesGain>(&law)) {
    std::string text = "fixed-amplitudes:";
    for (Eigen::Index i = 0; i < fixed->amplitudes.size(); ++i) {
      if (i > 0) text += ';';
      text += fmt_double(fixed->amplitudes(i));
    }
    return text;
  }
  return "equal-power";
}

std::string direction_law_text(const DirectionLaw& law) {
  if (std::holds_alternative<UniformSphere>(law)) return "uniform-sphere";
  const auto& list = std::get<DirectionList>(law);
  std::string text = "fixed-direction-list:";
  for (std::size_t i = 0; i < list.directions.size(); ++i) {
    if (i > 0) text += ';';
    const Vec3& d = list.directions[i];
    text += fmt_double(d.x()) + "," + fmt_double(d.y()) + "," + fmt_double(d.z());
  }
  return text;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Cv2VsAntennas: return "cv2-vs-antennas";
    case ExperimentKind::E2VsSpacing: return "e2-vs-spacing";
    case ExperimentKind::E2VsAntennas: return "e2-vs-antennas";
    case ExperimentKind::Cv2VsFormula: return "cv2-vs-formula";
    case ExperimentKind::RayleighBaseline: return "rayleigh-baseline";
  }
  return "unknown";
}

std::string to_string(ArrayType type) {
  switch (type) {
    case ArrayType::Ula: return "ula";
    case ArrayType::Uca: return "uca";
    case ArrayType::Upa: return "upa";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& text) {
  if (text == "cv2-vs-antennas") return ExperimentKind::Cv2VsAntennas;
  if (text == "e2-vs-spacing") return ExperimentKind::E2VsSpacing;
  if (text == "e2-vs-antennas") return ExperimentKind::E2VsAntennas;
  if (text == "cv2-vs-formula") return ExperimentKind::Cv2VsFormula;
  if (text == "rayleigh-baseline") return ExperimentKind::RayleighBaseline;
  throw ConfigError("unknown experiment '" + text + "'");
}

ArrayType parse_array_type(const std::string& text) {
  if (text == "ula") return ArrayType::Ula;
  if (text == "uca") return ArrayType::Uca;
  if (text == "upa") return ArrayType::Upa;
  throw ConfigError("unknown array type '" + text + "'");
}

ArrayTopology make_array(ArrayType type, Eigen::Index n, double spacing,
                         double wavelength) {
  if (n == 1) return make_ula(1, spacing, wavelength);
  switch (type) {
    case ArrayType::Ula: return make_ula(n, spacing, wavelength);
    case ArrayType::Uca: return make_uca(n, spacing, wavelength);
    case ArrayType::Upa: return make_upa(n, spacing, wavelength);
  }
  throw std::invalid_argument("make_array: unknown array type");
}

std::string SweepConfig::canonical_text() const {
  std::map<std::string, std::string> kv;
  kv["experiment"] = to_string(experiment);
  {
    std::string text;
    for (std::size_t i = 0; i < axis.size(); ++i) {
      if (i > 0) text += ',';
      text += fmt_double(axis[i]);
    }
    kv["axis"] = text;
  }
  {
    std::string text;
    for (std::size_t i = 0; i < p_rays.size(); ++i) {
      if (i > 0) text += ',';
      text += std::to_string(p_rays[i]);
    }
    kv["p_rays"] = text;
  }
  {
    std::string text;
    for (std::size_t i = 0; i < array_types.size(); ++i) {
      if (i > 0) text += ',';
      text += to_string(array_types[i]);
    }
    kv["array_types"] = text;
  }
  kv["gain_law"] = gain_law_text(gain_law);
  kv["direction_law"] = direction_law_text(direction_law);
  kv["snr"] = fmt_double(snr);
  kv["spacing_over_lambda"] = fmt_double(spacing_over_lambda);
  kv["n_antennas"] = std::to_string(n_antennas);
  kv["wavelength"] = fmt_double(wavelength);
  kv["trials"] = std::to_string(trials);
  kv["seed"] = std::to_string(seed);

  std::string text;
  for (const auto& [key, value] : kv) {
    text += key;
    text += " = ";
    text += value;
    text += '\n';
  }
  return text;
}

std::uint64_t SweepConfig::hash() const {
  // FNV-1a over the canonical serialization.
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : canonical_text()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

SweepConfig default_config(ExperimentKind kind) {
  SweepConfig cfg;
  cfg.experiment = kind;
  switch (kind) {
    case ExperimentKind::Cv2VsAntennas:
    case ExperimentKind::Cv2VsFormula:
      cfg.axis = {1, 2, 4, 8, 16, 32, 64};
      cfg.p_rays = {2, 4, 5, 6};
      cfg.array_types = {ArrayType::Ula};
      cfg.trials = 100000;
      break;
    case ExperimentKind::E2VsSpacing:
      cfg.axis = {0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35,
                  0.4,  0.45, 0.5, 0.625, 0.75, 1.0, 1.5, 2.0};
      cfg.array_types = {ArrayType::Ula, ArrayType::Uca, ArrayType::Upa};
      cfg.n_antennas = 16;
      cfg.trials = 1000000;
      break;
    case ExperimentKind::E2VsAntennas:
      cfg.axis = {1, 2, 4, 8, 16, 32, 64};
      cfg.array_types = {ArrayType::Ula, ArrayType::Uca, ArrayType::Upa};
      cfg.trials = 1000000;
      break;
    case ExperimentKind::RayleighBaseline:
      cfg.axis = {1, 2, 4, 8, 16, 32, 64};
      cfg.trials = 100000;
      break;
  }
  return cfg;
}

SweepConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file '" + path.string() + "'");
  }

  std::map<std::string, std::pair<std::string, int>> entries;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": empty key");
    }
    if (entries.count(key) != 0) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                        ": duplicate key '" + key + "'");
    }
    entries[key] = {value, line_no};
  }

  auto where = [&](const std::string& key) {
    return path.string() + ":" + std::to_string(entries.at(key).second) +
           ": key '" + key + "'";
  };

  if (entries.count("experiment") == 0) {
    throw ConfigError(path.string() + ": missing required key 'experiment'");
  }
  SweepConfig cfg = default_config(
      parse_experiment_kind(entries.at("experiment").first));
  cfg.trials = 0;  // re-defaulted in finalize_config unless the file sets it

  for (const auto& [key, value_line] : entries) {
    const std::string& value = value_line.first;
    if (key == "experiment") {
      continue;
    } else if (key == "axis") {
      cfg.axis.clear();
      for (const auto& part : split(value, ',')) {
        cfg.axis.push_back(parse_double(part, where(key)));
      }
    } else if (key == "p_rays") {
      cfg.p_rays.clear();
      for (const auto& part : split(value, ',')) {
        cfg.p_rays.push_back(parse_positive_int(part, where(key)));
      }
    } else if (key == "array_types") {
      cfg.array_types.clear();
      for (const auto& part : split(value, ',')) {
        try {
          cfg.array_types.push_back(parse_array_type(part));
        } catch (const ConfigError& err) {
          throw ConfigError(where(key) + ": " + err.what());
        }
      }
    } else if (key == "gain_law") {
      cfg.gain_law = parse_gain_law(value, where(key));
    } else if (key == "direction_law") {
      cfg.direction_law = parse_direction_law(value, where(key));
    } else if (key == "snr") {
      cfg.snr = parse_double(value, where(key));
    } else if (key == "spacing_over_lambda") {
      cfg.spacing_over_lambda = parse_double(value, where(key));
    } else if (key == "n_antennas") {
      cfg.n_antennas = parse_positive_int(value, where(key));
    } else if (key == "wavelength") {
      cfg.wavelength = parse_double(value, where(key));
    } else if (key == "trials") {
      cfg.trials = parse_u64(value, where(key));
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, where(key));
    } else {
      throw ConfigError(path.string() + ":" +
                        std::to_string(value_line.second) +
                        ": unknown key '" + key + "'");
    }
  }

  finalize_config(cfg);
  return cfg;
}

void finalize_config(SweepConfig& cfg) {
  const SweepConfig defaults = default_config(cfg.experiment);
  if (cfg.trials == 0) cfg.trials = defaults.trials;
  if (cfg.axis.empty()) cfg.axis = defaults.axis;

  if (cfg.axis.empty()) throw ConfigError("field 'axis': no swept values");
  for (std::size_t i = 0; i < cfg.axis.size(); ++i) {
    if (!std::isfinite(cfg.axis[i]) || cfg.axis[i] <= 0.0) {
      throw ConfigError("field 'axis': values must be positive and finite");
    }
    if (i > 0 && cfg.axis[i] <= cfg.axis[i - 1]) {
      throw ConfigError("field 'axis': values must be strictly increasing");
    }
  }

  const bool axis_is_antenna_count =
      cfg.experiment != ExperimentKind::E2VsSpacing;
  if (axis_is_antenna_count) {
    for (const double value : cfg.axis) {
      if (std::abs(value - std::llround(value)) > 1e-9) {
        throw ConfigError(
            "field 'axis': antenna counts must be integers for experiment '" +
            to_string(cfg.experiment) + "'");
      }
    }
  }

  const bool needs_p = cfg.experiment == ExperimentKind::Cv2VsAntennas ||
                       cfg.experiment == ExperimentKind::Cv2VsFormula;
  if (needs_p) {
    if (cfg.p_rays.empty()) {
      throw ConfigError("field 'p_rays': required for experiment '" +
                        to_string(cfg.experiment) + "'");
    }
    for (const int p : cfg.p_rays) {
      if (p < 1) throw ConfigError("field 'p_rays': values must be >= 1");
    }
    if (const auto* fixed = std::get_if<FixedAmplitudesGain>(&cfg.gain_law)) {
      for (const int p : cfg.p_rays) {
        if (p != fixed->amplitudes.size()) {
          throw ConfigError(
              "field 'p_rays': fixed-amplitudes law requires every ray count "
              "to equal the amplitude count (" +
              std::to_string(fixed->amplitudes.size()) + ")");
        }
      }
    }
    if (cfg.array_types.size() != 1) {
      throw ConfigError("field 'array_types': experiment '" +
                        to_string(cfg.experiment) +
                        "' uses exactly one array type");
    }
  }

  const bool needs_types = cfg.experiment == ExperimentKind::E2VsSpacing ||
                           cfg.experiment == ExperimentKind::E2VsAntennas;
  if (needs_types && cfg.array_types.empty()) {
    throw ConfigError("field 'array_types': required for experiment '" +
                      to_string(cfg.experiment) + "'");
  }

  if (cfg.experiment == ExperimentKind::E2VsSpacing && cfg.n_antennas < 1) {
    throw ConfigError("field 'n_antennas': must be >= 1");
  }
  if (!(cfg.spacing_over_lambda > 0.0)) {
    throw ConfigError("field 'spacing_over_lambda': must be positive");
  }
  if (!(cfg.wavelength > 0.0)) {
    throw ConfigError("field 'wavelength': must be positive");
  }
  if (!(cfg.snr >= 0.0)) {
    throw ConfigError("field 'snr': must be >= 0");
  }
  if (cfg.trials < 1) {
    throw ConfigError("field 'trials': must be >= 1");
  }
}

}  // namespace hardening
