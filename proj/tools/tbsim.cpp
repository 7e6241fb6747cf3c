// tbsim: simulate time-bin interferometry runs and analyze the records.
//
// Exit codes: 0 success, 1 usage/spec/config error, 2 runtime error
// (simulation, analysis or I/O failure, including fit non-convergence).

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "timebin/csv.hpp"
#include "timebin/errors.hpp"
#include "timebin/runner.hpp"
#include "timebin/version.hpp"

namespace fs = std::filesystem;
using namespace timebin;

namespace {

struct CommonOpts {
  std::string spec_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::string format = "csv";
};

ExperimentSpec load_spec_or_bundled(const std::string& spec_path) {
  if (spec_path.rfind("bundled:", 0) == 0)
    return parse_experiment_spec(bundled_scenario(spec_path.substr(8)).text);
  return load_experiment_spec(spec_path);
}

void print_fit(std::ostream& os, const FitResult& f, FitSeries series) {
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "series = %s\n"
                "c0 = %.10g\n"
                "visibility = %.10g\n"
                "omega = %.10g\n"
                "x0 = %.10g\n"
                "sigma_c0 = %.6g\n"
                "sigma_visibility = %.6g\n"
                "sigma_omega = %.6g\n"
                "sigma_x0 = %.6g\n"
                "chi2_reduced = %.6g\n"
                "iterations = %d\n"
                "n_points = %d\n",
                to_string(series).c_str(), f.c0, f.visibility, f.omega, f.x0,
                f.sigma_c0, f.sigma_visibility, f.sigma_omega, f.sigma_x0,
                f.chi2_reduced, f.iterations, f.n_points);
  os << buf;
}

void print_window(std::ostream& os, const WindowEstimate& w) {
  char buf[384];
  std::snprintf(buf, sizeof(buf),
                "window_s = %.10g\n"
                "sigma_window_s = %.6g\n"
                "baseline_hz = %.10g\n"
                "sigma_baseline_hz = %.6g\n"
                "plateau_hz = %.10g\n"
                "sigma_plateau_hz = %.6g\n",
                w.window, w.sigma_window, w.baseline, w.sigma_baseline, w.plateau,
                w.sigma_plateau);
  os << buf;
}

int run_scan(const CommonOpts& opts, ScanKind expected_kind) {
  ExperimentSpec spec = load_spec_or_bundled(opts.spec_path);
  if (spec.scan.kind != expected_kind) {
    std::cerr << "error: spec declares scan.kind = " << to_string(spec.scan.kind)
              << "; use the matching subcommand\n";
    return 1;
  }
  if (opts.seed) spec.scan.seed = *opts.seed;
  const RunResult res = run_experiment(spec);
  if (!opts.out_dir.empty()) write_run_artifacts(res, opts.out_dir);

  std::cout << "points = " << res.records.size() << "\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, res.hash);
  std::cout << "config_hash = " << buf << "\n";
  if (res.fit) print_fit(std::cout, *res.fit, spec.analysis.series);
  if (res.window) print_window(std::cout, *res.window);
  if (!opts.out_dir.empty()) std::cout << "artifacts = " << opts.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tbsim: time-bin interferometry simulator and analysis toolkit"};
  app.set_version_flag("--version", std::string("tbsim ") + version_string);
  app.require_subcommand(1);

  CommonOpts opts;
  double sim_phase = 0.0;
  double sim_duration = 1.0;
  std::string records_path;
  std::string series_name = "coincidences";
  std::optional<double> scan_sigma;
  std::optional<double> window_override;

  auto add_common = [&](CLI::App* cmd, bool spec_required) {
    cmd->add_option("--spec", opts.spec_path,
                    "spec file path, or bundled:<name> for a bundled scenario")
        ->required(spec_required);
    cmd->add_option("--out", opts.out_dir, "output directory for artifacts");
    cmd->add_option("--seed", opts.seed, "override scan.seed from the spec");
    cmd->add_option("--format", opts.format, "records format (only csv)")
        ->check(CLI::IsMember({"csv"}));
  };

  CLI::App* simulate = app.add_subcommand(
      "simulate", "one acquisition point; event streams to --out/events.txt or stdout");
  add_common(simulate, true);
  simulate->add_option("--phase", sim_phase, "total two-photon phase [rad]");
  simulate->add_option("--duration", sim_duration, "acquisition time [s]")
      ->check(CLI::PositiveNumber);

  CLI::App* scan = app.add_subcommand("scan", "run the spec's phase scan and analysis");
  add_common(scan, true);

  CLI::App* delay = app.add_subcommand(
      "delay-scan", "run the spec's delay scan and window estimate");
  add_common(delay, true);

  CLI::App* fit = app.add_subcommand("fit", "fringe fit on an existing records.csv");
  fit->add_option("--records", records_path, "records.csv path")->required();
  fit->add_option("--series", series_name, "coincidences|singles_a|singles_b")
      ->check(CLI::IsMember({"coincidences", "singles_a", "singles_b"}));
  fit->add_option("--scan-sigma", scan_sigma, "scan coordinate uncertainty");
  fit->add_option("--out", opts.out_dir, "directory for fit.json");

  CLI::App* correct = app.add_subcommand(
      "correct", "subtract accidentals from records.csv; corrected CSV to --out or stdout");
  correct->add_option("--records", records_path, "records.csv path")->required();
  correct->add_option("--window", window_override, "coincidence window [s]");
  correct->add_option("--spec", opts.spec_path, "spec supplying the window");
  correct->add_option("--out", opts.out_dir, "output directory for records.csv");

  CLI::App* regimes = app.add_subcommand("regimes", "timing-regime report for a spec");
  regimes->add_option("--spec", opts.spec_path, "spec file path or bundled:<name>")
      ->required();

  CLI::App* repro = app.add_subcommand(
      "reproduce", "run the bundled headline scenarios and compare against targets");
  repro->add_option("--out", opts.out_dir, "root directory for per-scenario artifacts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (simulate->parsed()) {
      ExperimentSpec spec = load_spec_or_bundled(opts.spec_path);
      const std::uint64_t seed = opts.seed.value_or(spec.scan.seed);
      const SimulatedPoint point =
          simulate_point(spec.config, sim_phase, sim_duration, seed);
      if (opts.out_dir.empty()) {
        write_event_streams(std::cout, point.stream_a, point.stream_b);
      } else {
        fs::create_directories(opts.out_dir);
        std::ofstream f(fs::path(opts.out_dir) / "events.txt");
        if (!f) throw DataError("cannot open events.txt under " + opts.out_dir);
        write_event_streams(f, point.stream_a, point.stream_b);
      }
      std::cerr << "singles_a = " << point.record.singles_a
                << "\nsingles_b = " << point.record.singles_b
                << "\ncoincidences = " << point.record.coincidences_raw << "\n";
      return 0;
    }
    if (scan->parsed()) return run_scan(opts, ScanKind::Phase);
    if (delay->parsed()) return run_scan(opts, ScanKind::Delay);

    if (fit->parsed()) {
      const std::vector<CountRecord> records = read_count_records(records_path);
      FitSeries series = FitSeries::Coincidences;
      if (series_name == "singles_a") series = FitSeries::SinglesA;
      if (series_name == "singles_b") series = FitSeries::SinglesB;
      const FitResult f = fit_fringe(records, scan_sigma.value_or(0.0), series);
      print_fit(std::cout, f, series);
      return 0;
    }

    if (correct->parsed()) {
      double window = 0.0;
      if (window_override) {
        window = *window_override;
      } else if (!opts.spec_path.empty()) {
        window = load_spec_or_bundled(opts.spec_path).config.coincidence_window;
      } else {
        std::cerr << "error: correct needs --window or --spec\n";
        return 1;
      }
      const std::vector<CountRecord> corrected =
          subtract_accidentals(read_count_records(records_path), window);
      if (opts.out_dir.empty()) {
        std::cout << count_records_to_csv(corrected);
      } else {
        fs::create_directories(opts.out_dir);
        write_count_records(fs::path(opts.out_dir) / "records.csv", corrected);
      }
      return 0;
    }

    if (regimes->parsed()) {
      const ExperimentSpec spec = load_spec_or_bundled(opts.spec_path);
      RunResult res;
      res.spec = spec;
      res.regimes = classify_regimes(spec.config);
      // regimes.txt body without touching disk
      const RegimeReport& g = res.regimes;
      char buf[40];
      std::snprintf(buf, sizeof(buf), "%.10g", spec.config.imbalance());
      std::cout << "geometry = " << to_string(spec.config.geometry) << "\n"
                << "imbalance_m = " << buf << "\n"
                << "single_photon_interference_suppressed = "
                << (g.cond_single_ok ? "true" : "false") << "\n"
                << "pump_coherence_sufficient = "
                << (g.cond_pump_ok ? "true" : "false") << "\n"
                << "satellites_resolvable_in_window = "
                << (g.cond_window_ok ? "true" : "false") << "\n"
                << "pump_coherence_exceeds_window = "
                << (g.cond_tau_gt_window ? "true" : "false") << "\n"
                << "franson_entanglement_feasible = "
                << (g.franson_entanglement_feasible ? "true" : "false") << "\n"
                << "swap_entanglement_feasible = "
                << (g.swap_entanglement_feasible ? "true" : "false") << "\n";
      std::snprintf(buf, sizeof(buf), "%.10g",
                    min_postselect_imbalance(spec.config.coincidence_window));
      std::cout << "min_postselect_imbalance_m = " << buf << "\n";
      return 0;
    }

    if (repro->parsed()) {
      std::optional<fs::path> out_root;
      if (!opts.out_dir.empty()) out_root = fs::path(opts.out_dir);
      const ReproduceReport report = reproduce(out_root);
      for (const ReproduceCheck& c : report.checks) {
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "%-28s observed %12.6g  expected %10.6g +/- %-9.3g sigma %-9.3g %s\n",
                      c.name.c_str(), c.observed, c.expected, c.tolerance, c.sigma,
                      c.pass ? "PASS" : "FAIL");
        std::cout << buf;
      }
      std::cout << (report.all_pass() ? "REPRODUCE: ALL PASS" : "REPRODUCE: FAIL")
                << "\n";
      return report.all_pass() ? 0 : 2;
    }
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const FitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    print_fit(std::cerr, e.last_iterate, FitSeries::Coincidences);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
