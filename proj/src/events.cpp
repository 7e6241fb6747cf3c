#include "timebin/events.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "timebin/errors.hpp"
#include "timebin/rng.hpp"

namespace timebin {

namespace {

void require_sorted(const EventStream& s, const char* which) {
  const auto& ev = s.events;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    if (ev[i].timestamp < ev[i - 1].timestamp) {
      std::ostringstream os;
      os << "event stream " << which << " is not sorted at index " << i;
      throw DataError(os.str());
    }
  }
}

std::vector<double> poisson_arrivals(double rate, double duration, Random& rng) {
  std::vector<double> times;
  if (rate <= 0.0) return times;
  times.reserve(static_cast<std::size_t>(rate * duration * 1.1) + 16);
  double t = rng.exponential(rate);
  while (t < duration) {
    times.push_back(t);
    t += rng.exponential(rate);
  }
  return times;
}

// Sorted merge of pair-generated clicks (already near-sorted) with the
// background arrivals.
std::vector<DetectionEvent> merge_stream(std::vector<DetectionEvent> pair_events,
                                         const std::vector<double>& background,
                                         Detector det, double duration) {
  auto by_time = [](const DetectionEvent& x, const DetectionEvent& y) {
    return x.timestamp < y.timestamp;
  };
  std::erase_if(pair_events, [duration](const DetectionEvent& e) {
    return e.timestamp > duration;
  });
  if (!std::is_sorted(pair_events.begin(), pair_events.end(), by_time))
    std::sort(pair_events.begin(), pair_events.end(), by_time);

  std::vector<DetectionEvent> merged;
  merged.reserve(pair_events.size() + background.size());
  std::size_t i = 0, j = 0;
  while (i < pair_events.size() || j < background.size()) {
    const bool take_pair =
        j >= background.size() ||
        (i < pair_events.size() && pair_events[i].timestamp <= background[j]);
    if (take_pair) {
      merged.push_back(pair_events[i++]);
    } else {
      merged.push_back({det, background[j++]});
    }
  }
  return merged;
}

}  // namespace

SimulatedPoint simulate_point(const InterferometerConfig& config, double total_phase,
                              double duration, std::uint64_t seed) {
  config.validate();
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw DataError("duration must be positive and finite");

  const OutcomeTable table = pair_outcome_table(config, total_phase);
  // Cumulative thresholds in the documented sampling order.
  const std::array<double, 7> cum = {
      table.central,
      table.central + table.sat_early,
      table.central + table.sat_early + table.sat_late,
      table.central + table.sat_early + table.sat_late + table.both_a,
      table.central + table.sat_early + table.sat_late + table.both_a + table.both_b,
      table.central + table.sat_early + table.sat_late + table.both_a + table.both_b +
          table.single_a,
      table.central + table.sat_early + table.sat_late + table.both_a + table.both_b +
          table.single_a + table.single_b,
  };
  const double sat_delay = config.imbalance() / speed_of_light;

  Random pair_rng(mix_seed(seed, 0));
  Random bg_a_rng(mix_seed(seed, 1));
  Random bg_b_rng(mix_seed(seed, 2));

  std::vector<DetectionEvent> pair_a, pair_b;
  if (config.pair_rate > 0.0) {
    const std::size_t guess =
        static_cast<std::size_t>(config.pair_rate * duration * 0.6) + 16;
    pair_a.reserve(guess);
    pair_b.reserve(guess);
    double t = pair_rng.exponential(config.pair_rate);
    while (t < duration) {
      const double u = pair_rng.uniform();
      if (u < cum[0]) {  // central
        pair_a.push_back({Detector::A, t});
        pair_b.push_back({Detector::B, t});
      } else if (u < cum[1]) {  // satellite, A early
        pair_a.push_back({Detector::A, t});
        pair_b.push_back({Detector::B, t + sat_delay});
      } else if (u < cum[2]) {  // satellite, B early
        pair_a.push_back({Detector::A, t + sat_delay});
        pair_b.push_back({Detector::B, t});
      } else if (u < cum[3]) {  // bunched at D_A
        pair_a.push_back({Detector::A, t});
        pair_a.push_back({Detector::A, t});
      } else if (u < cum[4]) {  // bunched at D_B
        pair_b.push_back({Detector::B, t});
        pair_b.push_back({Detector::B, t});
      } else if (u < cum[5]) {  // surviving single at D_A
        pair_a.push_back({Detector::A, t});
      } else if (u < cum[6]) {  // surviving single at D_B
        pair_b.push_back({Detector::B, t});
      }  // else: pair lost entirely
      t += pair_rng.exponential(config.pair_rate);
    }
  }

  SimulatedPoint point;
  point.stream_a.duration = duration;
  point.stream_b.duration = duration;
  point.stream_a.events =
      merge_stream(std::move(pair_a),
                   poisson_arrivals(config.background_singles_a, duration, bg_a_rng),
                   Detector::A, duration);
  point.stream_b.events =
      merge_stream(std::move(pair_b),
                   poisson_arrivals(config.background_singles_b, duration, bg_b_rng),
                   Detector::B, duration);

  point.record.scan_value = total_phase;
  point.record.unit = ScanUnit::Radians;
  point.record.duration = duration;
  point.record.singles_a = point.stream_a.events.size();
  point.record.singles_b = point.stream_b.events.size();
  point.record.coincidences_raw =
      count_coincidences(point.stream_a, point.stream_b, config.coincidence_window);
  return point;
}

std::uint64_t count_coincidences_shifted(const EventStream& a, const EventStream& b,
                                         double delay, double window) {
  if (!(window >= 0.0) || !std::isfinite(window))
    throw DataError("coincidence window must be nonnegative and finite");
  require_sorted(a, "A");
  require_sorted(b, "B");

  const auto& ea = a.events;
  const auto& eb = b.events;
  std::uint64_t count = 0;
  std::size_t lo = 0;
  for (const DetectionEvent& ev : ea) {
    const double t = ev.timestamp;
    while (lo < eb.size() && eb[lo].timestamp + delay < t - window) ++lo;
    for (std::size_t j = lo; j < eb.size() && eb[j].timestamp + delay <= t + window; ++j)
      ++count;
  }
  return count;
}

std::uint64_t count_coincidences(const EventStream& a, const EventStream& b,
                                 double window) {
  return count_coincidences_shifted(a, b, 0.0, window);
}

std::vector<CountRecord> scan_phase(const InterferometerConfig& config,
                                    const std::vector<double>& voltages,
                                    double duration_per_point, std::uint64_t seed) {
  if (voltages.empty()) throw DataError("phase scan needs at least one voltage");
  std::vector<CountRecord> records;
  records.reserve(voltages.size());
  for (std::size_t i = 0; i < voltages.size(); ++i) {
    const double phi = config.piezo_gain * voltages[i];
    SimulatedPoint p = simulate_point(config, phi, duration_per_point, mix_seed(seed, i));
    p.record.scan_value = voltages[i];
    p.record.unit = ScanUnit::Volts;
    records.push_back(p.record);
  }
  return records;
}

std::vector<CountRecord> delay_scan(const InterferometerConfig& config,
                                    const std::vector<double>& delays,
                                    double duration_per_point, std::uint64_t seed) {
  if (delays.empty()) throw DataError("delay scan needs at least one delay");
  std::vector<CountRecord> records;
  records.reserve(delays.size());
  for (std::size_t i = 0; i < delays.size(); ++i) {
    SimulatedPoint p = simulate_point(config, 0.0, duration_per_point, mix_seed(seed, i));
    p.record.scan_value = delays[i];
    p.record.unit = ScanUnit::Seconds;
    p.record.coincidences_raw = count_coincidences_shifted(
        p.stream_a, p.stream_b, delays[i], config.coincidence_window);
    records.push_back(p.record);
  }
  return records;
}

void write_event_streams(std::ostream& os, const EventStream& a, const EventStream& b) {
  os << "# detector_id timestamp_s\n";
  char line[64];
  std::size_t i = 0, j = 0;
  const auto& ea = a.events;
  const auto& eb = b.events;
  while (i < ea.size() || j < eb.size()) {
    const bool take_a =
        j >= eb.size() || (i < ea.size() && ea[i].timestamp <= eb[j].timestamp);
    const DetectionEvent& e = take_a ? ea[i++] : eb[j++];
    std::snprintf(line, sizeof line, "%d %.11e\n", static_cast<int>(e.detector),
                  e.timestamp);
    os << line;
  }
}

std::pair<EventStream, EventStream> read_event_streams(std::istream& is, double duration) {
  EventStream a, b;
  a.duration = duration;
  b.duration = duration;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    int id = -1;
    double t = 0.0;
    if (std::sscanf(line.c_str(), "%d %lf", &id, &t) != 2 || (id != 0 && id != 1)) {
      std::ostringstream os;
      os << "bad event line " << lineno << ": '" << line << "'";
      throw DataError(os.str());
    }
    if (id == 0)
      a.events.push_back({Detector::A, t});
    else
      b.events.push_back({Detector::B, t});
  }
  return {std::move(a), std::move(b)};
}

}  // namespace timebin
