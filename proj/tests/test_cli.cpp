#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "timebin/csv.hpp"
#include "timebin/errors.hpp"
#include "timebin/experiment.hpp"
#include "timebin/runner.hpp"

using namespace timebin;
namespace fs = std::filesystem;

namespace {

// Scratch directory per test case; removed on destruction.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& tag) {
    dir = fs::temp_directory_path() /
          ("tbsim_cli_" + std::to_string(static_cast<long>(::getpid())) + "_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path operator/(const std::string& name) const { return dir / name; }
};

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd =
      std::string(TBSIM_BIN) + " " + args + " > " + log.string() + " 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::string fast_phase_spec() {
  return "geometry = michelson_swap\n"
         "arm_short_m = 0.05\n"
         "arm_long_m = 0.65\n"
         "bs_reflectivity = 0.5\n"
         "piezo_gain_rad_per_v = 1.0\n"
         "pump_coherence_time_s = 1e-7\n"
         "single_photon_coherence_time_s = 1e-13\n"
         "coincidence_window_s = 1.5e-9\n"
         "pair_rate_hz = 60000\n"
         "scan.kind = phase\n"
         "scan.values = linspace(0, 12.5, 10)\n"
         "scan.duration_per_point_s = 0.02\n"
         "scan.seed = 9\n";
}

std::string fast_delay_spec() {
  return "geometry = michelson_swap\n"
         "arm_short_m = 0.05\n"
         "arm_long_m = 0.65\n"
         "pump_coherence_time_s = 1e-7\n"
         "single_photon_coherence_time_s = 1e-13\n"
         "coincidence_window_s = 1.5e-9\n"
         "pair_rate_hz = 100000\n"
         "background_singles_a_hz = 50000\n"
         "background_singles_b_hz = 50000\n"
         "scan.kind = delay\n"
         "scan.values = linspace(-5e-9, 5e-9, 11)\n"
         "scan.duration_per_point_s = 0.02\n"
         "scan.seed = 4\n";
}

}  // namespace

TEST_CASE("spec text parses into the expected structure") {
  const ExperimentSpec s = parse_experiment_spec(fast_phase_spec());
  s.validate();
  CHECK(s.config.geometry == Geometry::MichelsonSwap);
  CHECK(s.config.arm_short == 0.05);
  CHECK(s.config.arm_long == 0.65);
  CHECK(s.config.coincidence_window == 1.5e-9);
  CHECK(s.scan.kind == ScanKind::Phase);
  REQUIRE(s.scan.values.size() == 10);
  CHECK(s.scan.values.front() == 0.0);
  CHECK(s.scan.values.back() == 12.5);
  CHECK(s.scan.duration_per_point == 0.02);
  CHECK(s.scan.seed == 9);
  CHECK(s.analysis.fit);            // defaults
  CHECK_FALSE(s.analysis.subtract);
  CHECK(s.analysis.series == FitSeries::Coincidences);

  const ExperimentSpec lin = parse_experiment_spec(
      "scan.values = linspace(0, 12, 5)\n");
  REQUIRE(lin.scan.values.size() == 5);
  CHECK(lin.scan.values == std::vector<double>{0.0, 3.0, 6.0, 9.0, 12.0});

  const ExperimentSpec lst = parse_experiment_spec("scan.values = 0.5, 1.5, 2.5\n");
  CHECK(lst.scan.values == std::vector<double>{0.5, 1.5, 2.5});
}

TEST_CASE("spec parser reports line-precise errors") {
  CHECK_THROWS_WITH_AS(parse_experiment_spec("geometry = michelson_swap\nbogus_key = 1\n"),
                       doctest::Contains("line 2"), SpecError);
  CHECK_THROWS_WITH_AS(parse_experiment_spec("arm_long_m = 0.6\narm_long_m = 0.7\n"),
                       doctest::Contains("duplicate"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec("analysis.fit = maybe\n"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec("pair_rate_hz = fast\n"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec("scan.kind = sideways\n"), SpecError);
  CHECK_THROWS_AS(parse_experiment_spec("scan.values = linspace(0, 1)\n"), SpecError);

  // parse also validates; repeated or direction-flipping values are rejected
  CHECK_THROWS_WITH_AS(parse_experiment_spec("scan.values = 1, 1, 2\n"),
                       doctest::Contains("monotone"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_spec("scan.values = 0, 2, 1\n"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_experiment_spec("bs_reflectivity = 1.2\n"),
                       doctest::Contains("bs_reflectivity"), ConfigError);
}

TEST_CASE("canonical spec text is a fixed point and keys the hash") {
  const ExperimentSpec s = parse_experiment_spec(fast_phase_spec());
  const std::string canon = canonical_spec_text(s);
  const ExperimentSpec again = parse_experiment_spec(canon);
  CHECK(canonical_spec_text(again) == canon);
  CHECK(config_hash(again) == config_hash(s));

  ExperimentSpec tweaked = s;
  tweaked.config.pair_rate += 1.0;
  CHECK(config_hash(tweaked) != config_hash(s));
  tweaked = s;
  tweaked.scan.seed += 1;
  CHECK(config_hash(tweaked) != config_hash(s));
}

TEST_CASE("spec files and manifest json load through the same entry point") {
  const Scratch tmp("load");
  put(tmp / "a.spec", fast_phase_spec());
  const ExperimentSpec from_file = load_experiment_spec(tmp / "a.spec");
  const ExperimentSpec from_text = parse_experiment_spec(fast_phase_spec());
  CHECK(config_hash(from_file) == config_hash(from_text));

  put(tmp / "manifest.json",
      "{\"tool\": \"tbsim\", \"spec_text\": \"scan.values = 1, 2\\npair_rate_hz = 5\\n\"}");
  const ExperimentSpec from_manifest = load_experiment_spec(tmp / "manifest.json");
  CHECK(from_manifest.scan.values == std::vector<double>{1.0, 2.0});
  CHECK(from_manifest.config.pair_rate == 5.0);

  CHECK_THROWS_AS(load_experiment_spec(tmp / "missing.spec"), SpecError);
}

TEST_CASE("bundled scenarios parse and are addressable by name") {
  const auto all = bundled_scenarios();
  REQUIRE(all.size() == 4);
  for (const BundledScenario& b : all) {
    CAPTURE(b.name);
    const ExperimentSpec s = parse_experiment_spec(std::string(b.text));
    CHECK_NOTHROW(s.validate());
  }
  CHECK_NOTHROW(bundled_scenario("swap_window_21p5ns"));
  CHECK_THROWS_WITH_AS(bundled_scenario("nope"),
                       doctest::Contains("swap_window_1p5ns"), SpecError);
}

TEST_CASE("scan produces deterministic artifacts and a replayable manifest") {
  const Scratch tmp("scan");
  put(tmp / "a.spec", fast_phase_spec());
  const std::string spec = (tmp / "a.spec").string();

  CHECK(run_cli("scan --spec " + spec + " --out " + (tmp / "o1").string(),
                tmp / "log1") == 0);
  for (const char* name : {"records.csv", "fit.json", "regimes.txt", "manifest.json"})
    CHECK(fs::exists(tmp / "o1" / name));

  const auto records = count_records_from_csv(slurp(tmp / "o1" / "records.csv"));
  REQUIRE(records.size() == 10);
  CHECK(records[0].unit == ScanUnit::Volts);
  CHECK(records[0].duration == 0.02);

  // same spec, same seed: byte-identical records
  CHECK(run_cli("scan --spec " + spec + " --out " + (tmp / "o2").string(),
                tmp / "log2") == 0);
  CHECK(slurp(tmp / "o1" / "records.csv") == slurp(tmp / "o2" / "records.csv"));

  // replaying the manifest reproduces every artifact byte for byte
  CHECK(run_cli("scan --spec " + (tmp / "o1" / "manifest.json").string() + " --out " +
                    (tmp / "o3").string(),
                tmp / "log3") == 0);
  CHECK(slurp(tmp / "o1" / "records.csv") == slurp(tmp / "o3" / "records.csv"));
  CHECK(slurp(tmp / "o1" / "fit.json") == slurp(tmp / "o3" / "fit.json"));
  CHECK(slurp(tmp / "o1" / "manifest.json") == slurp(tmp / "o3" / "manifest.json"));

  // a different seed changes the data
  CHECK(run_cli("scan --spec " + spec + " --seed 10 --out " + (tmp / "o4").string(),
                tmp / "log4") == 0);
  CHECK(slurp(tmp / "o1" / "records.csv") != slurp(tmp / "o4" / "records.csv"));

  // stdout reports the same config hash the library computes
  char expect[64];
  std::snprintf(expect, sizeof expect, "config_hash = %016" PRIx64,
                config_hash(parse_experiment_spec(fast_phase_spec())));
  const std::string log = slurp(tmp / "log1");
  CHECK(log.find("points = 10") != std::string::npos);
  CHECK(log.find(expect) != std::string::npos);
  CHECK(log.find("visibility = ") != std::string::npos);
}

TEST_CASE("delay scan reports a window estimate") {
  const Scratch tmp("delay");
  put(tmp / "d.spec", fast_delay_spec());
  CHECK(run_cli("delay-scan --spec " + (tmp / "d.spec").string() + " --out " +
                    (tmp / "out").string(),
                tmp / "log") == 0);
  CHECK(fs::exists(tmp / "out" / "window.json"));
  CHECK_FALSE(fs::exists(tmp / "out" / "fit.json"));
  const std::string log = slurp(tmp / "log");
  CHECK(log.find("window_s = 1.5") != std::string::npos);  // grid pins 1.5 ns
  CHECK(log.find("plateau_hz = ") != std::string::npos);
}

TEST_CASE("config and usage errors exit 1 with a pointed message") {
  const Scratch tmp("errors");
  put(tmp / "bad_r.spec", "bs_reflectivity = 1.2\n");
  CHECK(run_cli("scan --spec " + (tmp / "bad_r.spec").string(), tmp / "log1") == 1);
  CHECK(slurp(tmp / "log1").find("bs_reflectivity") != std::string::npos);

  put(tmp / "unknown.spec", "grating_period = 3\n");
  CHECK(run_cli("scan --spec " + (tmp / "unknown.spec").string(), tmp / "log2") == 1);
  CHECK(slurp(tmp / "log2").find("spec line 1") != std::string::npos);

  CHECK(run_cli("scan --spec " + (tmp / "absent.spec").string(), tmp / "log3") == 1);

  // scan.kind routes to exactly one subcommand
  put(tmp / "p.spec", fast_phase_spec());
  put(tmp / "d.spec", fast_delay_spec());
  CHECK(run_cli("delay-scan --spec " + (tmp / "p.spec").string(), tmp / "log4") == 1);
  CHECK(slurp(tmp / "log4").find("matching subcommand") != std::string::npos);
  CHECK(run_cli("scan --spec " + (tmp / "d.spec").string(), tmp / "log5") == 1);

  CHECK(run_cli("scan", tmp / "log6") != 0);             // missing --spec
  CHECK(run_cli("", tmp / "log7") != 0);                 // missing subcommand
  CHECK(run_cli("scan --spec " + (tmp / "p.spec").string() + " --format json",
                tmp / "log8") != 0);
}

TEST_CASE("fit and correct subcommands work from records files") {
  const Scratch tmp("fitcorrect");
  put(tmp / "a.spec", fast_phase_spec());
  REQUIRE(run_cli("scan --spec " + (tmp / "a.spec").string() + " --out " +
                      (tmp / "out").string(),
                  tmp / "log0") == 0);
  const std::string records = (tmp / "out" / "records.csv").string();

  CHECK(run_cli("fit --records " + records, tmp / "log1") == 0);
  CHECK(slurp(tmp / "log1").find("visibility = ") != std::string::npos);
  CHECK(run_cli("fit --records " + records + " --series singles_a", tmp / "log2") == 0);
  CHECK(run_cli("fit --records " + (tmp / "nothing.csv").string(), tmp / "log3") == 2);

  // correct with an explicit window: stdout is a parsable csv
  CHECK(run_cli("correct --records " + records + " --window 21.5e-9", tmp / "log4") == 0);
  const auto corrected = count_records_from_csv(slurp(tmp / "log4"));
  REQUIRE(corrected.size() == 10);
  CHECK(corrected[0].coincidences_corrected.has_value());

  // correct taking the window from the spec, written to a directory
  CHECK(run_cli("correct --records " + records + " --spec " + (tmp / "a.spec").string() +
                    " --out " + (tmp / "corr").string(),
                tmp / "log5") == 0);
  CHECK(fs::exists(tmp / "corr" / "records.csv"));

  CHECK(run_cli("correct --records " + records, tmp / "log6") == 1);
  CHECK(slurp(tmp / "log6").find("--window or --spec") != std::string::npos);
}

TEST_CASE("simulate emits event streams") {
  const Scratch tmp("simulate");
  put(tmp / "a.spec", fast_phase_spec());
  CHECK(run_cli("simulate --spec " + (tmp / "a.spec").string() +
                    " --phase 0.5 --duration 0.02 --out " + (tmp / "ev").string(),
                tmp / "log") == 0);
  CHECK(fs::exists(tmp / "ev" / "events.txt"));
  const std::string text = slurp(tmp / "ev" / "events.txt");
  CHECK(text.rfind("# detector_id timestamp_s", 0) == 0);
  const std::string log = slurp(tmp / "log");
  CHECK(log.find("singles_a = ") != std::string::npos);
  CHECK(log.find("coincidences = ") != std::string::npos);
}

TEST_CASE("regimes subcommand and bundled specs") {
  const Scratch tmp("regimes");
  CHECK(run_cli("regimes --spec bundled:swap_window_1p5ns", tmp / "log1") == 0);
  const std::string log = slurp(tmp / "log1");
  CHECK(log.find("swap_entanglement_feasible = true") != std::string::npos);
  CHECK(log.find("franson_entanglement_feasible = ") != std::string::npos);
  CHECK(log.find("min_postselect_imbalance_m = ") != std::string::npos);

  CHECK(run_cli("regimes --spec bundled:nope", tmp / "log2") == 1);
  CHECK(slurp(tmp / "log2").find("swap_window_21p5ns") != std::string::npos);

  CHECK(run_cli("--version", tmp / "log3") == 0);
  CHECK(slurp(tmp / "log3").find("tbsim 0.1.0") != std::string::npos);
}
