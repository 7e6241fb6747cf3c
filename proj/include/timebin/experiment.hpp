#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "timebin/analysis.hpp"
#include "timebin/config.hpp"

namespace timebin {

enum class ScanKind { Phase, Delay };

std::string to_string(ScanKind k);

/// How a scan walks its coordinate. `values` holds piezo voltages for a
/// phase scan and imposed delays in seconds for a delay scan.
struct ScanSettings {
  ScanKind kind = ScanKind::Phase;
  std::vector<double> values;
  double duration_per_point = 1.0;  ///< [s]
  std::uint64_t seed = 1;
};

struct AnalysisSettings {
  bool fit = true;
  bool subtract = false;
  FitSeries series = FitSeries::Coincidences;
  double scan_value_sigma = 0.0;  ///< uncertainty of the scan coordinate
};

/// Everything needed to run, analyze and reproduce one experiment.
struct ExperimentSpec {
  InterferometerConfig config;
  ScanSettings scan;
  AnalysisSettings analysis;

  /// config.validate() plus scan constraints (nonempty values, positive
  /// duration, phase/delay domain sanity). Throws ConfigError.
  void validate() const;
};

/// Parses the `key = value` spec format. One setting per line, '#' starts
/// a comment, blank lines are skipped. Dotted keys address the scan and
/// analysis groups (scan.kind, analysis.fit, ...); bare keys address the
/// interferometer. `scan.values` takes either a comma list or
/// linspace(first, last, count). Unknown keys, bad values and duplicate
/// assignments throw SpecError naming the line.
ExperimentSpec parse_experiment_spec(const std::string& text);

/// Reads a spec file. A file whose first non-space character is '{' is
/// treated as a run manifest: the embedded spec_text is extracted and
/// parsed, so a manifest reproduces the run that wrote it.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Round-trippable normal form: every setting on its own line, fixed key
/// order, full floating-point precision. Two specs with equal canonical
/// text run identically.
std::string canonical_spec_text(const ExperimentSpec& spec);

/// FNV-1a over canonical_spec_text; stamped into run manifests.
std::uint64_t config_hash(const ExperimentSpec& spec);

}  // namespace timebin
