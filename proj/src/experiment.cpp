#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "timebin/errors.hpp"
#include "timebin/experiment.hpp"

namespace timebin {

std::string to_string(ScanKind k) {
  return k == ScanKind::Phase ? "phase" : "delay";
}

namespace {

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t"));
  s.erase(s.find_last_not_of(" \t") + 1);
  return s;
}

[[noreturn]] void bad_line(int line_no, const std::string& what) {
  std::ostringstream os;
  os << "spec line " << line_no << ": " << what;
  throw SpecError(os.str());
}

double parse_number(const std::string& v, int line_no, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    bad_line(line_no, "cannot parse number for " + key + " from '" + v + "'");
  }
}

std::uint64_t parse_seed(const std::string& v, int line_no) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    bad_line(line_no, "cannot parse integer for scan.seed from '" + v + "'");
  }
}

bool parse_bool(const std::string& v, int line_no, const std::string& key) {
  if (v == "true") return true;
  if (v == "false") return false;
  bad_line(line_no, key + " must be true or false, got '" + v + "'");
}

std::vector<double> parse_values(const std::string& v, int line_no) {
  std::vector<double> out;
  if (v.rfind("linspace(", 0) == 0) {
    if (v.back() != ')') bad_line(line_no, "unterminated linspace in scan.values");
    const std::string inner = v.substr(9, v.size() - 10);
    std::vector<std::string> parts;
    std::istringstream is(inner);
    std::string field;
    while (std::getline(is, field, ',')) parts.push_back(trim(field));
    if (parts.size() != 3)
      bad_line(line_no, "linspace takes (first, last, count)");
    const double a = parse_number(parts[0], line_no, "scan.values");
    const double b = parse_number(parts[1], line_no, "scan.values");
    const double nd = parse_number(parts[2], line_no, "scan.values");
    const int n = static_cast<int>(nd);
    if (nd != n || n < 2) bad_line(line_no, "linspace count must be an integer >= 2");
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
      out.push_back(a + (b - a) * static_cast<double>(i) / (n - 1));
    return out;
  }
  std::istringstream is(v);
  std::string field;
  while (std::getline(is, field, ','))
    out.push_back(parse_number(trim(field), line_no, "scan.values"));
  if (out.empty()) bad_line(line_no, "scan.values is empty");
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ExperimentSpec::validate() const {
  config.validate();
  auto fail = [](const std::string& msg) { throw ConfigError(msg); };
  if (scan.values.empty()) fail("scan.values: at least one scan point is required");
  for (double v : scan.values)
    if (!std::isfinite(v)) fail("scan.values: values must be finite");
  for (std::size_t i = 1; i < scan.values.size(); ++i) {
    const bool up = scan.values[1] > scan.values[0];
    if (up ? !(scan.values[i] > scan.values[i - 1])
           : !(scan.values[i] < scan.values[i - 1]))
      fail("scan.values: values must be strictly monotone");
  }
  if (!(scan.duration_per_point > 0.0) || !std::isfinite(scan.duration_per_point))
    fail("scan.duration_per_point_s: must be positive and finite");
  if (!(analysis.scan_value_sigma >= 0.0) || !std::isfinite(analysis.scan_value_sigma))
    fail("analysis.scan_value_sigma: must be nonnegative and finite");
}

ExperimentSpec parse_experiment_spec(const std::string& text) {
  ExperimentSpec spec;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  std::set<std::string> seen;

  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) bad_line(line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) bad_line(line_no, "missing key before '='");
    if (val.empty()) bad_line(line_no, "missing value for " + key);
    if (!seen.insert(key).second) bad_line(line_no, "duplicate key " + key);

    InterferometerConfig& c = spec.config;
    if (key == "geometry") {
      try {
        c.geometry = geometry_from_string(val);
      } catch (const ConfigError& e) {
        bad_line(line_no, e.what());
      }
    } else if (key == "arm_short_m") {
      c.arm_short = parse_number(val, line_no, key);
    } else if (key == "arm_long_m") {
      c.arm_long = parse_number(val, line_no, key);
    } else if (key == "bs_reflectivity") {
      c.bs_reflectivity = parse_number(val, line_no, key);
    } else if (key == "phase_a_rad") {
      c.phase_a = parse_number(val, line_no, key);
    } else if (key == "phase_b_rad") {
      c.phase_b = parse_number(val, line_no, key);
    } else if (key == "piezo_gain_rad_per_v") {
      c.piezo_gain = parse_number(val, line_no, key);
    } else if (key == "pump_coherence_time_s") {
      c.pump_coherence_time = parse_number(val, line_no, key);
    } else if (key == "single_photon_coherence_time_s") {
      c.single_coherence_time = parse_number(val, line_no, key);
    } else if (key == "coincidence_window_s") {
      c.coincidence_window = parse_number(val, line_no, key);
    } else if (key == "pair_rate_hz") {
      c.pair_rate = parse_number(val, line_no, key);
    } else if (key == "background_singles_a_hz") {
      c.background_singles_a = parse_number(val, line_no, key);
    } else if (key == "background_singles_b_hz") {
      c.background_singles_b = parse_number(val, line_no, key);
    } else if (key == "detection_efficiency_a") {
      c.detection_efficiency_a = parse_number(val, line_no, key);
    } else if (key == "detection_efficiency_b") {
      c.detection_efficiency_b = parse_number(val, line_no, key);
    } else if (key == "mode_match_visibility") {
      c.mode_match_visibility = parse_number(val, line_no, key);
    } else if (key == "scan.kind") {
      if (val == "phase") {
        spec.scan.kind = ScanKind::Phase;
      } else if (val == "delay") {
        spec.scan.kind = ScanKind::Delay;
      } else {
        bad_line(line_no, "scan.kind must be phase or delay, got '" + val + "'");
      }
    } else if (key == "scan.values") {
      spec.scan.values = parse_values(val, line_no);
    } else if (key == "scan.duration_per_point_s") {
      spec.scan.duration_per_point = parse_number(val, line_no, key);
    } else if (key == "scan.seed") {
      spec.scan.seed = parse_seed(val, line_no);
    } else if (key == "analysis.fit") {
      spec.analysis.fit = parse_bool(val, line_no, key);
    } else if (key == "analysis.subtract") {
      spec.analysis.subtract = parse_bool(val, line_no, key);
    } else if (key == "analysis.series") {
      if (val == "coincidences") {
        spec.analysis.series = FitSeries::Coincidences;
      } else if (val == "singles_a") {
        spec.analysis.series = FitSeries::SinglesA;
      } else if (val == "singles_b") {
        spec.analysis.series = FitSeries::SinglesB;
      } else {
        bad_line(line_no, "analysis.series must be coincidences, singles_a or singles_b");
      }
    } else if (key == "analysis.scan_value_sigma") {
      spec.analysis.scan_value_sigma = parse_number(val, line_no, key);
    } else {
      bad_line(line_no, "unknown key " + key);
    }
  }

  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw SpecError("cannot open spec file " + path.string());
  std::ostringstream os;
  os << f.rdbuf();
  std::string text = os.str();

  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    // Run manifest: replay the spec text it embeds.
    try {
      const nlohmann::json j = nlohmann::json::parse(text);
      text = j.at("spec_text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw SpecError("cannot read manifest " + path.string() + ": " + e.what());
    }
  }
  return parse_experiment_spec(text);
}

std::string canonical_spec_text(const ExperimentSpec& spec) {
  const InterferometerConfig& c = spec.config;
  std::ostringstream os;
  os << "geometry = " << to_string(c.geometry) << "\n"
     << "arm_short_m = " << fmt(c.arm_short) << "\n"
     << "arm_long_m = " << fmt(c.arm_long) << "\n"
     << "bs_reflectivity = " << fmt(c.bs_reflectivity) << "\n"
     << "phase_a_rad = " << fmt(c.phase_a) << "\n"
     << "phase_b_rad = " << fmt(c.phase_b) << "\n"
     << "piezo_gain_rad_per_v = " << fmt(c.piezo_gain) << "\n"
     << "pump_coherence_time_s = " << fmt(c.pump_coherence_time) << "\n"
     << "single_photon_coherence_time_s = " << fmt(c.single_coherence_time) << "\n"
     << "coincidence_window_s = " << fmt(c.coincidence_window) << "\n"
     << "pair_rate_hz = " << fmt(c.pair_rate) << "\n"
     << "background_singles_a_hz = " << fmt(c.background_singles_a) << "\n"
     << "background_singles_b_hz = " << fmt(c.background_singles_b) << "\n"
     << "detection_efficiency_a = " << fmt(c.detection_efficiency_a) << "\n"
     << "detection_efficiency_b = " << fmt(c.detection_efficiency_b) << "\n"
     << "mode_match_visibility = " << fmt(c.mode_match_visibility) << "\n";
  os << "scan.kind = " << to_string(spec.scan.kind) << "\n";
  os << "scan.values = ";
  for (std::size_t i = 0; i < spec.scan.values.size(); ++i)
    os << (i ? "," : "") << fmt(spec.scan.values[i]);
  os << "\n";
  os << "scan.duration_per_point_s = " << fmt(spec.scan.duration_per_point) << "\n"
     << "scan.seed = " << spec.scan.seed << "\n"
     << "analysis.fit = " << (spec.analysis.fit ? "true" : "false") << "\n"
     << "analysis.subtract = " << (spec.analysis.subtract ? "true" : "false") << "\n"
     << "analysis.series = " << to_string(spec.analysis.series) << "\n"
     << "analysis.scan_value_sigma = " << fmt(spec.analysis.scan_value_sigma) << "\n";
  return os.str();
}

std::uint64_t config_hash(const ExperimentSpec& spec) {
  const std::string text = canonical_spec_text(spec);
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char b : text) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace timebin
