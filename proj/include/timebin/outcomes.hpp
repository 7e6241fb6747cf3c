#pragma once

#include "timebin/config.hpp"

namespace timebin {

/// Per-generated-pair outcome summary.
struct PairOutcomeDistribution {
  double p_coincidence_central = 0.0;  ///< distinct detectors, zero relative delay
  double p_satellite_early = 0.0;      ///< distinct detectors, A earlier by dx/c
  double p_satellite_late = 0.0;       ///< distinct detectors, B earlier by dx/c
  double p_same_detector = 0.0;        ///< both photons detected by one detector
  double p_lost = 0.0;                 ///< at least one photon undetected

  double sum() const {
    return p_coincidence_central + p_satellite_early + p_satellite_late +
           p_same_detector + p_lost;
  }
};

/// Fine-grained per-pair outcome table used by the event simulator. The
/// categories are mutually exclusive, sum to 1, and are listed in the order
/// the simulator samples them.
struct OutcomeTable {
  double central = 0.0;    ///< one click at D_A and one at D_B, equal times
  double sat_early = 0.0;  ///< A at t, B at t + dx/c (dual layout only)
  double sat_late = 0.0;   ///< A at t + dx/c, B at t (dual layout only)
  double both_a = 0.0;     ///< two clicks at D_A (swap routing of sl / ls)
  double both_b = 0.0;     ///< two clicks at D_B
  double single_a = 0.0;   ///< exactly one surviving click, at D_A
  double single_b = 0.0;   ///< exactly one surviving click, at D_B
  double none = 0.0;

  double sum() const {
    return central + sat_early + sat_late + both_a + both_b + single_a +
           single_b + none;
  }

  PairOutcomeDistribution summary() const;
};

/// Detector-level outcome probabilities for one generated pair.
///
/// Amplitude model. A splitter reflection carries phase i, a transmission
/// phase 1 (r = sqrt(R), t = sqrt(1-R)). In every layout a photon reaches
/// its monitored output through exactly one reflection and one transmission
/// (short or long path alike), so the per-path detected amplitude is
/// i t r e^{i phi_long}; the unmonitored-port amplitudes are t^2 and
/// -r^2 e^{i phi_long}. For the unbalanced layouts only the ss <-> ll pair
/// of alternatives stays coherent (emission-time shifted by dx/c, inside
/// the pump coherence), damped by
///
///     mu = mode_match_visibility * pump_dephasing().
///
/// The sl / ls alternatives are resolved by the detection filter
/// (dx >> c tau_c assumed for FransonDual / MichelsonSwap) and add
/// incoherently: they appear as +-dx/c satellites in the dual layout, and
/// as two clicks on one detector in the swap layout. In the balanced
/// layout the two paths of each photon interfere individually with
/// visibility mode_match_visibility * single_envelope(), and the pair
/// coincidence factorizes into the product of the two single rates.
///
/// `total_phase` is the piezo-controlled two-photon phase Phi. The static
/// glass phases add on top: the unbalanced interference term oscillates as
/// cos(Phi + phase_a + phase_b); in the balanced layout each photon sees
/// phase_i + Phi / 2.
///
/// Detector efficiencies thin each click independently.
OutcomeTable pair_outcome_table(const InterferometerConfig& config, double total_phase);

PairOutcomeDistribution pair_outcome_distribution(const InterferometerConfig& config,
                                                  double total_phase);

/// True iff the satellite peaks of the dual layout fall inside the
/// coincidence window: dx <= c * coincidence_window. Always false for the
/// Michelson layouts (they have no satellites).
bool satellites_within_window(const InterferometerConfig& config);

/// True-coincidence rate [1/s] at the given phase; accidentals excluded.
/// For FransonDual `include_satellites` selects whether the +-dx/c peaks
/// are inside the counting window; the Michelson layouts ignore it.
double coincidence_rate_analytic(const InterferometerConfig& config, double total_phase,
                                 bool include_satellites);

}  // namespace timebin
