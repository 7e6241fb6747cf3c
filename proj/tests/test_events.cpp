#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "timebin/errors.hpp"
#include "timebin/events.hpp"
#include "timebin/outcomes.hpp"
#include "timebin/rng.hpp"

using namespace timebin;

namespace {

InterferometerConfig swap_config() {
  InterferometerConfig c;
  c.geometry = Geometry::MichelsonSwap;
  c.arm_short = 0.05;
  c.arm_long = 0.65;
  c.pump_coherence_time = 1e-7;
  c.single_coherence_time = 1e-13;
  c.coincidence_window = 1.5e-9;
  c.pair_rate = 5000.0;
  return c;
}

// O(n m) reference counter.
std::uint64_t count_all_pairs(const EventStream& a, const EventStream& b, double delay,
                              double window) {
  std::uint64_t n = 0;
  for (const DetectionEvent& x : a.events)
    for (const DetectionEvent& y : b.events)
      if (std::abs(x.timestamp - (y.timestamp + delay)) <= window) ++n;
  return n;
}

EventStream random_stream(Detector det, std::size_t n, double duration, Random& rng) {
  EventStream s;
  s.duration = duration;
  for (std::size_t i = 0; i < n; ++i)
    s.events.push_back({det, duration * rng.uniform()});
  std::sort(s.events.begin(), s.events.end(),
            [](const DetectionEvent& x, const DetectionEvent& y) {
              return x.timestamp < y.timestamp;
            });
  return s;
}

bool identical(const EventStream& a, const EventStream& b) {
  if (a.events.size() != b.events.size()) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i)
    if (a.events[i].timestamp != b.events[i].timestamp ||
        a.events[i].detector != b.events[i].detector)
      return false;
  return true;
}

}  // namespace

TEST_CASE("seed substream derivation is a frozen contract") {
  CHECK(mix_seed(42, 0) == 0x28efe333b266f103ull);
  CHECK(mix_seed(42, 1) == 0x47526757130f9f52ull);
  CHECK(mix_seed(0, 0) == 0x6e789e6aa1b965f4ull);
}

TEST_CASE("simulation is reproducible and seed-sensitive") {
  const InterferometerConfig c = swap_config();
  const SimulatedPoint p1 = simulate_point(c, 0.3, 0.5, 77);
  const SimulatedPoint p2 = simulate_point(c, 0.3, 0.5, 77);
  const SimulatedPoint p3 = simulate_point(c, 0.3, 0.5, 78);

  CHECK(identical(p1.stream_a, p2.stream_a));
  CHECK(identical(p1.stream_b, p2.stream_b));
  CHECK(p1.record.coincidences_raw == p2.record.coincidences_raw);
  CHECK_FALSE(identical(p1.stream_a, p3.stream_a));
}

TEST_CASE("streams are sorted, clipped and fully counted") {
  InterferometerConfig c = swap_config();
  c.background_singles_a = 2000.0;
  c.background_singles_b = 1500.0;
  const double duration = 0.8;
  const SimulatedPoint p = simulate_point(c, 1.0, duration, 5);

  for (const EventStream* s : {&p.stream_a, &p.stream_b}) {
    CHECK(s->duration == duration);
    for (std::size_t i = 0; i < s->events.size(); ++i) {
      CHECK(s->events[i].timestamp >= 0.0);
      CHECK(s->events[i].timestamp <= duration);
      if (i) CHECK(s->events[i].timestamp >= s->events[i - 1].timestamp);
    }
  }
  CHECK(p.record.singles_a == p.stream_a.events.size());
  CHECK(p.record.singles_b == p.stream_b.events.size());
  CHECK(p.record.unit == ScanUnit::Radians);
  CHECK(p.record.scan_value == 1.0);
  for (const DetectionEvent& e : p.stream_a.events) CHECK(e.detector == Detector::A);
  for (const DetectionEvent& e : p.stream_b.events) CHECK(e.detector == Detector::B);
}

TEST_CASE("background-only counts follow Poisson statistics") {
  InterferometerConfig c = swap_config();
  c.pair_rate = 0.0;
  c.background_singles_a = 4.0e4;
  c.background_singles_b = 4.0e4;

  double sum_a = 0.0, sum_sq = 0.0;
  const int n = 50;
  for (int k = 0; k < n; ++k) {
    const SimulatedPoint p = simulate_point(c, 0.0, 1.0, 1000 + k);
    sum_a += static_cast<double>(p.record.singles_a);
    sum_sq += static_cast<double>(p.record.singles_a) *
              static_cast<double>(p.record.singles_a);
  }
  const double mean = sum_a / n;
  const double var = sum_sq / n - mean * mean;
  // mean = 4e4 +- 4e4/sqrt(50 * 4e4) ~ 28; allow 5 sigma
  CHECK(std::abs(mean - 4.0e4) < 5.0 * std::sqrt(4.0e4 / n));
  // variance ~ mean for a Poisson count; loose factor-two band
  CHECK(var > 0.5 * mean);
  CHECK(var < 2.0 * mean);
}

TEST_CASE("per-pair outcome frequencies track the analytic table") {
  InterferometerConfig c = swap_config();
  c.pair_rate = 2.0e5;
  c.detection_efficiency_a = 0.85;
  c.detection_efficiency_b = 0.7;
  const double phase = 0.9;
  const SimulatedPoint p = simulate_point(c, phase, 1.0, 99);

  const OutcomeTable t = pair_outcome_table(c, phase);
  const double pairs = c.pair_rate;  // 1 s
  // raw coincidences = central events only in the swap layout (no
  // satellites, bunched clicks never span detectors); accidentals at these
  // rates contribute ~ 2 * 1.5e5^2 * 1.5e-9 ~ 40, absorbed by the band
  const double expect = pairs * t.central;
  CHECK(std::abs(static_cast<double>(p.record.coincidences_raw) - expect) <
        5.0 * std::sqrt(expect) + 100.0);

  const double expect_a = pairs * (t.central + 2.0 * t.both_a + t.single_a);
  CHECK(std::abs(static_cast<double>(p.record.singles_a) - expect_a) <
        5.0 * std::sqrt(expect_a));
}

TEST_CASE("franson satellites sit at +-dx/c and enter only wide windows") {
  InterferometerConfig c = swap_config();
  c.geometry = Geometry::FransonDual;  // imbalance 0.6 m -> 2.0 ns delay
  c.pair_rate = 3.0e4;
  const double phase = 0.4;

  c.coincidence_window = 1.5e-9;  // satellites resolved away
  const SimulatedPoint narrow = simulate_point(c, phase, 1.0, 1234);
  c.coincidence_window = 21.5e-9;  // satellites inside
  const SimulatedPoint wide = simulate_point(c, phase, 1.0, 1234);

  // identical streams, only the counting window differs
  CHECK(identical(narrow.stream_a, wide.stream_a));
  CHECK(identical(narrow.stream_b, wide.stream_b));

  const OutcomeTable t = pair_outcome_table(c, phase);
  const double central = c.pair_rate * t.central;
  const double sats = c.pair_rate * (t.sat_early + t.sat_late);
  CHECK(std::abs(static_cast<double>(narrow.record.coincidences_raw) - central) <
        5.0 * std::sqrt(central) + 50.0);
  CHECK(std::abs(static_cast<double>(wide.record.coincidences_raw) - (central + sats)) <
        5.0 * std::sqrt(central + sats) + 50.0);
}

TEST_CASE("coincidence counting matches the all-pairs reference") {
  Random rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t na = static_cast<std::size_t>(rng.uniform() * 60);
    const std::size_t nb = static_cast<std::size_t>(rng.uniform() * 60);
    const EventStream a = random_stream(Detector::A, na, 1e-3, rng);
    const EventStream b = random_stream(Detector::B, nb, 1e-3, rng);
    const double window = 1e-5 * rng.uniform();
    const double delay = (trial % 2) ? 2e-5 * (rng.uniform() - 0.5) : 0.0;

    CHECK(count_coincidences_shifted(a, b, delay, window) ==
          count_all_pairs(a, b, delay, window));
  }
}

TEST_CASE("window boundary is inclusive and argument errors are thrown") {
  // dyadic gap so |t_a - t_b| == window holds exactly in binary
  const double gap = std::ldexp(1.0, -30);
  EventStream a, b;
  a.duration = b.duration = 1.0;
  a.events = {{Detector::A, 0.5}};
  b.events = {{Detector::B, 0.5 + gap}};
  CHECK(count_coincidences(a, b, gap) == 1);           // exactly at the edge
  CHECK(count_coincidences(a, b, 0.999 * gap) == 0);   // just inside the gap
  CHECK(count_coincidences(a, b, 0.0) == 0);
  b.events[0].timestamp = 0.5;
  CHECK(count_coincidences(a, b, 0.0) == 1);  // zero window keeps exact ties

  CHECK_THROWS_AS(count_coincidences(a, b, -1e-9), DataError);
  CHECK_THROWS_AS(count_coincidences(a, b, std::nan("")), DataError);

  EventStream unsorted;
  unsorted.duration = 1.0;
  unsorted.events = {{Detector::A, 0.6}, {Detector::A, 0.2}};
  CHECK_THROWS_WITH_AS(count_coincidences(unsorted, b, 1e-9),
                       doctest::Contains("not sorted"), DataError);
}

TEST_CASE("phase scan carries voltages and reacts to the piezo gain") {
  InterferometerConfig c = swap_config();
  c.pair_rate = 4.0e4;
  c.piezo_gain = 0.8;
  const std::vector<double> volts = {0.0, 1.0, 2.0, 3.0, 3.9269908169872414};  // pi/0.8

  const std::vector<CountRecord> rec = scan_phase(c, volts, 0.5, 7);
  REQUIRE(rec.size() == volts.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec[i].unit == ScanUnit::Volts);
    CHECK(rec[i].scan_value == volts[i]);
    CHECK(rec[i].duration == 0.5);
  }
  // max of fringe at 0 V, min at pi/piezo_gain V
  const double mu = c.mode_match_visibility * c.pump_dephasing();
  const double hi = coincidence_rate_analytic(c, 0.0, false) * 0.5;
  const double lo = hi * (1.0 - mu) / (1.0 + mu);
  CHECK(std::abs(static_cast<double>(rec[0].coincidences_raw) - hi) <
        5.0 * std::sqrt(hi) + 10.0);
  CHECK(std::abs(static_cast<double>(rec[4].coincidences_raw) - lo) <
        5.0 * std::sqrt(lo) + 10.0);

  // same seed, same voltages: reproducible end to end
  const std::vector<CountRecord> rec2 = scan_phase(c, volts, 0.5, 7);
  for (std::size_t i = 0; i < rec.size(); ++i)
    CHECK(rec[i].coincidences_raw == rec2[i].coincidences_raw);
}

TEST_CASE("delay scan shows the plateau and the accidental floor") {
  InterferometerConfig c = swap_config();
  c.pair_rate = 2.0e4;
  c.background_singles_a = 5.0e4;
  c.background_singles_b = 5.0e4;
  c.coincidence_window = 21.5e-9;

  const std::vector<double> delays = {-40e-9, -21e-9, 0.0, 21e-9, 40e-9};
  const std::vector<CountRecord> rec = delay_scan(c, delays, 1.0, 11);
  REQUIRE(rec.size() == delays.size());
  for (std::size_t i = 0; i < rec.size(); ++i) {
    CHECK(rec[i].unit == ScanUnit::Seconds);
    CHECK(rec[i].scan_value == delays[i]);
  }

  const double plateau = coincidence_rate_analytic(c, 0.0, false);
  // inside the window the true pairs ride on the accidental floor
  for (int i : {1, 2, 3})
    CHECK(static_cast<double>(rec[i].coincidences_raw) >
          plateau - 5.0 * std::sqrt(plateau));
  // outside only accidentals remain (well under half the plateau)
  for (int i : {0, 4})
    CHECK(static_cast<double>(rec[i].coincidences_raw) < 0.5 * plateau);
}

TEST_CASE("event stream text round trip") {
  InterferometerConfig c = swap_config();
  c.background_singles_a = 1000.0;
  const SimulatedPoint p = simulate_point(c, 0.2, 0.05, 3);

  std::ostringstream os;
  write_event_streams(os, p.stream_a, p.stream_b);
  std::istringstream is(os.str());
  const auto [a, b] = read_event_streams(is, 0.05);

  REQUIRE(a.events.size() == p.stream_a.events.size());
  REQUIRE(b.events.size() == p.stream_b.events.size());
  for (std::size_t i = 0; i < a.events.size(); ++i)
    CHECK(a.events[i].timestamp ==
          doctest::Approx(p.stream_a.events[i].timestamp).epsilon(1e-10));

  std::istringstream bad("# header\n0 0.5\n2 0.25\n");
  CHECK_THROWS_WITH_AS(read_event_streams(bad, 1.0), doctest::Contains("line 3"),
                       DataError);
}

TEST_CASE("simulate_point argument validation") {
  const InterferometerConfig c = swap_config();
  CHECK_THROWS_AS(simulate_point(c, 0.0, 0.0, 1), DataError);
  CHECK_THROWS_AS(simulate_point(c, 0.0, -1.0, 1), DataError);
  InterferometerConfig bad = c;
  bad.bs_reflectivity = 2.0;
  CHECK_THROWS_AS(simulate_point(bad, 0.0, 1.0, 1), ConfigError);
}
