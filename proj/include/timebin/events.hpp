#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "timebin/config.hpp"
#include "timebin/outcomes.hpp"

namespace timebin {

enum class Detector : int { A = 0, B = 1 };

struct DetectionEvent {
  Detector detector = Detector::A;
  double timestamp = 0.0;  ///< [s], within [0, stream duration]
};

/// Time-ordered click record of one detector over one acquisition.
struct EventStream {
  std::vector<DetectionEvent> events;  ///< sorted by timestamp, one detector
  double duration = 0.0;               ///< acquisition length [s]
};

/// What the scan_value column of a record means.
enum class ScanUnit { Volts, Radians, Seconds };

/// One acquisition point of a scan.
struct CountRecord {
  double scan_value = 0.0;
  ScanUnit unit = ScanUnit::Volts;
  double duration = 0.0;  ///< [s]
  std::uint64_t singles_a = 0;
  std::uint64_t singles_b = 0;
  std::uint64_t coincidences_raw = 0;

  // Filled by subtract_accidentals().
  std::optional<double> coincidences_corrected;
  std::optional<double> corrected_sigma;
  bool clamped = false;  ///< corrected value was negative and clamped to 0
};

struct SimulatedPoint {
  EventStream stream_a;
  EventStream stream_b;
  CountRecord record;  ///< scan_value = total phase [rad]
};

/// Simulates one acquisition: pair emissions form a homogeneous Poisson
/// process at pair_rate; each pair's detector outcome is drawn from
/// pair_outcome_table(config, total_phase); independent Poisson background
/// singles are merged in. Coincidences are counted with the config window.
///
/// Event placement: central outcomes put one click on each detector at the
/// emission time; dual-layout satellites offset the long-path click by
/// imbalance()/c; same-detector outcomes put two clicks at one detector at
/// identical timestamps (never an A-B coincidence); surviving singles sit
/// at the emission time. Clicks pushed past `duration` are dropped.
///
/// Deterministic: the pair, background-A and background-B processes use
/// substreams mix_seed(seed, 0..2); equal seeds give bit-identical streams.
SimulatedPoint simulate_point(const InterferometerConfig& config, double total_phase,
                              double duration, std::uint64_t seed);

/// Number of (a, b) pairs with |t_a - t_b| <= window (inclusive). Streams
/// must be sorted; throws DataError otherwise. O(n + m + matches).
std::uint64_t count_coincidences(const EventStream& a, const EventStream& b,
                                 double window);

/// count_coincidences with stream B shifted by `delay` before comparison.
std::uint64_t count_coincidences_shifted(const EventStream& a, const EventStream& b,
                                         double delay, double window);

/// One simulate_point per piezo voltage; point i runs with seed
/// mix_seed(seed, i) and total phase piezo_gain * voltage[i]. Records carry
/// the voltage (ScanUnit::Volts).
std::vector<CountRecord> scan_phase(const InterferometerConfig& config,
                                    const std::vector<double>& voltages,
                                    double duration_per_point, std::uint64_t seed);

/// One simulate_point per imposed delay, at piezo rest (total phase 0);
/// stream B is shifted by the delay before counting. Records carry the
/// delay in seconds (ScanUnit::Seconds). True coincidences survive only
/// for |delay| <= coincidence_window; outside, the accidental floor
/// 2 S_A S_B window remains.
std::vector<CountRecord> delay_scan(const InterferometerConfig& config,
                                    const std::vector<double>& delays,
                                    double duration_per_point, std::uint64_t seed);

/// Two-column text export, merged and time-ordered:
/// detector_id (0 = D_A, 1 = D_B) and timestamp in seconds with 12
/// significant digits. Lines starting with '#' are comments.
void write_event_streams(std::ostream& os, const EventStream& a, const EventStream& b);

/// Parses the write_event_streams format back into two streams.
std::pair<EventStream, EventStream> read_event_streams(std::istream& is, double duration);

}  // namespace timebin
