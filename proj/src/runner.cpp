#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "timebin/bundled_specs.hpp"
#include "timebin/csv.hpp"
#include "timebin/errors.hpp"
#include "timebin/runner.hpp"
#include "timebin/version.hpp"

namespace timebin {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<BundledScenario>& bundled_scenarios() {
  static const std::vector<BundledScenario> scenarios = {
      {"swap_window_1p5ns", std::string(bundled::swap_window_1p5ns)},
      {"swap_window_21p5ns", std::string(bundled::swap_window_21p5ns)},
      {"delay_scan_21p5ns", std::string(bundled::delay_scan_21p5ns)},
      {"balanced_product", std::string(bundled::balanced_product)},
  };
  return scenarios;
}

const BundledScenario& bundled_scenario(const std::string& name) {
  for (const BundledScenario& s : bundled_scenarios())
    if (s.name == name) return s;
  std::ostringstream os;
  os << "no bundled scenario named '" << name << "'; available:";
  for (const BundledScenario& s : bundled_scenarios()) os << ' ' << s.name;
  throw SpecError(os.str());
}

RunResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  RunResult result;
  result.spec = spec;
  result.regimes = classify_regimes(spec.config);
  result.hash = config_hash(spec);

  switch (spec.scan.kind) {
    case ScanKind::Phase:
      result.records = scan_phase(spec.config, spec.scan.values,
                                  spec.scan.duration_per_point, spec.scan.seed);
      break;
    case ScanKind::Delay:
      result.records = delay_scan(spec.config, spec.scan.values,
                                  spec.scan.duration_per_point, spec.scan.seed);
      break;
  }

  if (spec.analysis.subtract)
    result.records = subtract_accidentals(result.records, spec.config.coincidence_window);

  if (spec.analysis.fit) {
    if (spec.scan.kind == ScanKind::Phase) {
      result.fit = fit_fringe(result.records, spec.analysis.scan_value_sigma,
                              spec.analysis.series);
    } else {
      result.window = estimate_window(result.records);
    }
  }
  return result;
}

namespace {

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

json fit_to_json(const FitResult& f, FitSeries series) {
  return json{{"series", to_string(series)},
              {"c0", f.c0},
              {"visibility", f.visibility},
              {"omega", f.omega},
              {"x0", f.x0},
              {"sigma_c0", f.sigma_c0},
              {"sigma_visibility", f.sigma_visibility},
              {"sigma_omega", f.sigma_omega},
              {"sigma_x0", f.sigma_x0},
              {"chi2_reduced", f.chi2_reduced},
              {"iterations", f.iterations},
              {"converged", f.converged},
              {"n_points", f.n_points}};
}

json window_to_json(const WindowEstimate& w) {
  return json{{"window_s", w.window},
              {"sigma_window_s", w.sigma_window},
              {"baseline_hz", w.baseline},
              {"sigma_baseline_hz", w.sigma_baseline},
              {"plateau_hz", w.plateau},
              {"sigma_plateau_hz", w.sigma_plateau}};
}

std::string regimes_text(const RunResult& r) {
  const InterferometerConfig& c = r.spec.config;
  const RegimeReport& g = r.regimes;
  std::ostringstream os;
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", c.imbalance());
  os << "geometry = " << to_string(c.geometry) << "\n"
     << "imbalance_m = " << buf << "\n"
     << "single_photon_interference_suppressed = "
     << (g.cond_single_ok ? "true" : "false") << "\n"
     << "pump_coherence_sufficient = " << (g.cond_pump_ok ? "true" : "false") << "\n"
     << "satellites_resolvable_in_window = "
     << (g.cond_window_ok ? "true" : "false") << "\n"
     << "pump_coherence_exceeds_window = "
     << (g.cond_tau_gt_window ? "true" : "false") << "\n"
     << "franson_entanglement_feasible = "
     << (g.franson_entanglement_feasible ? "true" : "false") << "\n"
     << "swap_entanglement_feasible = "
     << (g.swap_entanglement_feasible ? "true" : "false") << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", min_postselect_imbalance(c.coincidence_window));
  os << "min_postselect_imbalance_m = " << buf << "\n";
  return os.str();
}

json manifest_json(const RunResult& r) {
  return json{{"tool", "tbsim"},
              {"version", version_string},
              {"config_hash", hash_hex(r.hash)},
              {"seed", r.spec.scan.seed},
              {"scan_kind", to_string(r.spec.scan.kind)},
              {"n_points", r.spec.scan.values.size()},
              {"spec_text", canonical_spec_text(r.spec)}};
}

// Stage-and-rename so a crash mid-write cannot leave a torn file, and undo
// every rename of this call on failure so the artifact set stays atomic.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const fs::path& dir) : dir_(dir) {
    fs::create_directories(dir_);
  }
  ~ArtifactWriter() {
    if (committed_) return;
    std::error_code ec;
    for (const fs::path& p : written_) fs::remove(p, ec);
  }

  void put(const std::string& name, const std::string& content) {
    const fs::path tmp = dir_ / (".tmp." + name);
    const fs::path final_path = dir_ / name;
    {
      std::ofstream f(tmp, std::ios::binary);
      if (!f) throw DataError("cannot open " + tmp.string() + " for writing");
      f << content;
      f.flush();
      if (!f) {
        std::error_code ec;
        fs::remove(tmp, ec);
        throw DataError("failed while writing " + tmp.string());
      }
    }
    fs::rename(tmp, final_path);
    written_.push_back(final_path);
  }

  void commit() { committed_ = true; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

std::vector<CountRecord> strip_correction(std::vector<CountRecord> records) {
  for (CountRecord& r : records) {
    r.coincidences_corrected.reset();
    r.corrected_sigma.reset();
    r.clamped = false;
  }
  return records;
}

ReproduceCheck make_check(const std::string& name, double observed, double expected,
                          double tolerance, double sigma) {
  ReproduceCheck c;
  c.name = name;
  c.observed = observed;
  c.expected = expected;
  c.tolerance = tolerance;
  c.sigma = sigma;
  c.pass = std::abs(observed - expected) <= tolerance;
  return c;
}

}  // namespace

void write_run_artifacts(const RunResult& result, const fs::path& out_dir) {
  ArtifactWriter w(out_dir);
  w.put("records.csv", count_records_to_csv(result.records));
  if (result.fit)
    w.put("fit.json", fit_to_json(*result.fit, result.spec.analysis.series).dump(2) + "\n");
  if (result.window)
    w.put("window.json", window_to_json(*result.window).dump(2) + "\n");
  w.put("regimes.txt", regimes_text(result));
  w.put("manifest.json", manifest_json(result).dump(2) + "\n");
  w.commit();
}

bool ReproduceReport::all_pass() const {
  for (const ReproduceCheck& c : checks)
    if (!c.pass) return false;
  return true;
}

ReproduceReport reproduce(const std::optional<fs::path>& out_root) {
  ReproduceReport report;

  // Short window, corrected visibility.
  {
    const ExperimentSpec spec =
        parse_experiment_spec(bundled_scenario("swap_window_1p5ns").text);
    const RunResult res = run_experiment(spec);
    if (out_root) write_run_artifacts(res, *out_root / "swap_window_1p5ns");
    report.checks.push_back(make_check("visibility_1p5ns_corrected",
                                       res.fit->visibility, 0.916, 0.03,
                                       res.fit->sigma_visibility));
  }

  // Long window: one simulation, fitted raw and after subtraction.
  {
    const ExperimentSpec spec =
        parse_experiment_spec(bundled_scenario("swap_window_21p5ns").text);
    const RunResult res = run_experiment(spec);
    if (out_root) write_run_artifacts(res, *out_root / "swap_window_21p5ns");
    const FitResult raw_fit =
        fit_fringe(strip_correction(res.records), spec.analysis.scan_value_sigma,
                   spec.analysis.series);
    report.checks.push_back(make_check("visibility_21p5ns_raw", raw_fit.visibility,
                                       0.664, 0.02, raw_fit.sigma_visibility));
    report.checks.push_back(make_check("visibility_21p5ns_corrected",
                                       res.fit->visibility, 0.949, 0.02,
                                       res.fit->sigma_visibility));
  }

  // Delay scan: window half-width and accidental baseline.
  {
    const ExperimentSpec spec =
        parse_experiment_spec(bundled_scenario("delay_scan_21p5ns").text);
    const RunResult res = run_experiment(spec);
    if (out_root) write_run_artifacts(res, *out_root / "delay_scan_21p5ns");
    report.checks.push_back(make_check("window_s", res.window->window, 21.5e-9, 1e-9,
                                       res.window->sigma_window));
    report.checks.push_back(make_check("baseline_hz", res.window->baseline, 1600.0,
                                       3.0 * std::sqrt(1600.0),
                                       res.window->sigma_baseline));
  }

  return report;
}

}  // namespace timebin
