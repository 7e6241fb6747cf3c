#include "timebin/outcomes.hpp"

#include <cmath>

namespace timebin {

PairOutcomeDistribution OutcomeTable::summary() const {
  PairOutcomeDistribution d;
  d.p_coincidence_central = central;
  d.p_satellite_early = sat_early;
  d.p_satellite_late = sat_late;
  d.p_same_detector = both_a + both_b;
  d.p_lost = single_a + single_b + none;
  return d;
}

namespace {

// Quantum (pre-detection) channel weights shared by the two unbalanced
// layouts. Per-path detected amplitude i t r, unmonitored-port amplitudes
// t^2 and -r^2; ss and ll summed coherently with weight mu.
struct UnbalancedChannels {
  double pair_detected;  // one photon on each monitored path (ss + ll, interfering)
  double mixed;          // sl or ls, both photons on monitored paths (each)
  double single_a;       // photon A on a monitored path, B unmonitored
  double single_b;
  double none;
};

UnbalancedChannels unbalanced_channels(double R, double mu, double cos_phi) {
  const double T = 1.0 - R;
  const double RT = R * T;
  UnbalancedChannels q;
  q.pair_detected = 2.0 * RT * RT * (1.0 + mu * cos_phi);
  q.mixed = RT * RT;
  // The coherent ss/ll cross term reappears with opposite sign in the
  // one-photon-unmonitored channels and cancels in the total, keeping the
  // single rates phase independent.
  q.single_a = 2.0 * RT * (R * R + T * T) - 2.0 * mu * RT * RT * cos_phi;
  q.single_b = q.single_a;
  q.none = R * R * R * R + T * T * T * T + 2.0 * RT * RT + 2.0 * mu * RT * RT * cos_phi;
  return q;
}

}  // namespace

OutcomeTable pair_outcome_table(const InterferometerConfig& config, double total_phase) {
  config.validate();
  const double ea = config.detection_efficiency_a;
  const double eb = config.detection_efficiency_b;
  OutcomeTable t;

  if (config.geometry == Geometry::MichelsonBalanced) {
    const double RT = config.bs_reflectivity * config.bs_transmissivity();
    const double nu = config.mode_match_visibility * config.single_envelope();
    const double pa = config.phase_a + 0.5 * total_phase;
    const double pb = config.phase_b + 0.5 * total_phase;
    const double out_a = 2.0 * RT * (1.0 + nu * std::cos(pa));
    const double out_b = 2.0 * RT * (1.0 + nu * std::cos(pb));
    const double det_a = ea * out_a;  // photon A detected at D_A
    const double det_b = eb * out_b;
    t.central = det_a * det_b;
    t.single_a = det_a * (1.0 - det_b);
    t.single_b = det_b * (1.0 - det_a);
    t.none = (1.0 - det_a) * (1.0 - det_b);
    return t;
  }

  const double mu = config.mode_match_visibility * config.pump_dephasing();
  const double cos_phi = std::cos(total_phase + config.phase_a + config.phase_b);
  const UnbalancedChannels q = unbalanced_channels(config.bs_reflectivity, mu, cos_phi);

  if (config.geometry == Geometry::FransonDual) {
    t.central = ea * eb * q.pair_detected;
    t.sat_early = ea * eb * q.mixed;  // A short / B long: A clicks first
    t.sat_late = ea * eb * q.mixed;
    const double pair_any = q.pair_detected + 2.0 * q.mixed;
    t.single_a = ea * (1.0 - eb) * pair_any + ea * q.single_a;
    t.single_b = eb * (1.0 - ea) * pair_any + eb * q.single_b;
    t.none = (1.0 - ea) * (1.0 - eb) * pair_any + (1.0 - ea) * q.single_a +
             (1.0 - eb) * q.single_b + q.none;
    return t;
  }

  // MichelsonSwap: the mode exchange in the long arm routes sl to two
  // clicks at D_A and ls to two clicks at D_B, so no +-dx/c coincidences
  // survive between distinct detectors.
  t.central = ea * eb * q.pair_detected;
  t.both_a = ea * ea * q.mixed;
  t.both_b = eb * eb * q.mixed;
  t.single_a = ea * (1.0 - eb) * q.pair_detected + 2.0 * ea * (1.0 - ea) * q.mixed +
               ea * q.single_a;
  t.single_b = eb * (1.0 - ea) * q.pair_detected + 2.0 * eb * (1.0 - eb) * q.mixed +
               eb * q.single_b;
  t.none = (1.0 - ea) * (1.0 - eb) * q.pair_detected +
           (1.0 - ea) * (1.0 - ea) * q.mixed + (1.0 - eb) * (1.0 - eb) * q.mixed +
           (1.0 - ea) * q.single_a + (1.0 - eb) * q.single_b + q.none;
  return t;
}

PairOutcomeDistribution pair_outcome_distribution(const InterferometerConfig& config,
                                                  double total_phase) {
  return pair_outcome_table(config, total_phase).summary();
}

bool satellites_within_window(const InterferometerConfig& config) {
  if (config.geometry != Geometry::FransonDual) return false;
  return config.imbalance() <= speed_of_light * config.coincidence_window;
}

double coincidence_rate_analytic(const InterferometerConfig& config, double total_phase,
                                 bool include_satellites) {
  const OutcomeTable t = pair_outcome_table(config, total_phase);
  double p = t.central;
  if (config.geometry == Geometry::FransonDual && include_satellites)
    p += t.sat_early + t.sat_late;
  return config.pair_rate * p;
}

}  // namespace timebin
