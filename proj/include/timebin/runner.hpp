#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "timebin/analysis.hpp"
#include "timebin/events.hpp"
#include "timebin/experiment.hpp"
#include "timebin/regimes.hpp"

namespace timebin {

/// A spec shipped inside the binary so `reproduce` needs no input files.
struct BundledScenario {
  std::string name;  ///< also the artifact subdirectory name
  std::string text;
};

const std::vector<BundledScenario>& bundled_scenarios();
const BundledScenario& bundled_scenario(const std::string& name);  // throws SpecError

struct RunResult {
  ExperimentSpec spec;
  std::vector<CountRecord> records;     ///< corrected columns filled when subtracting
  std::optional<FitResult> fit;         ///< phase scans with analysis.fit
  std::optional<WindowEstimate> window; ///< delay scans with analysis.fit
  RegimeReport regimes;
  std::uint64_t hash = 0;
};

/// Simulates and analyzes per the spec; touches no files. Phase scans run
/// the fringe fit, delay scans the window estimate (both behind
/// analysis.fit). Throws ConfigError/DataError/FitError on stage failures.
RunResult run_experiment(const ExperimentSpec& spec);

/// Writes records.csv, fit.json or window.json when present, regimes.txt
/// and manifest.json into out_dir (created if needed). Files are staged
/// under temporary names and renamed; on failure everything this call
/// wrote is removed, so out_dir never keeps a partial artifact set.
void write_run_artifacts(const RunResult& result, const std::filesystem::path& out_dir);

struct ReproduceCheck {
  std::string name;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  double sigma = 0.0;  ///< statistical uncertainty of `observed`, 0 if n/a
  bool pass = false;
};

struct ReproduceReport {
  std::vector<ReproduceCheck> checks;
  bool all_pass() const;
};

/// Runs the bundled headline scenarios end-to-end: the 1.5 ns fringe scan
/// (corrected visibility), the 21.5 ns fringe scan (raw and corrected
/// visibility from one simulation), and the delay scan (window half-width
/// and accidental baseline). Artifacts land in out_root/<scenario>/ when
/// out_root is given.
ReproduceReport reproduce(const std::optional<std::filesystem::path>& out_root);

}  // namespace timebin
