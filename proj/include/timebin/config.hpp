#pragma once

#include <string>

#include "timebin/constants.hpp"

namespace timebin {

/// Interferometer layout.
///
/// FransonDual       two unbalanced Mach-Zehnders, one photon and one
///                   monitored detector per interferometer.
/// MichelsonSwap     both photons traverse one unbalanced Michelson whose
///                   long arm exchanges the two transverse modes, so a
///                   long-path photon exits on the other photon's output.
/// MichelsonBalanced one Michelson with (near) equal arms and no mode swap;
///                   single-photon interference regime.
enum class Geometry { FransonDual, MichelsonSwap, MichelsonBalanced };

std::string to_string(Geometry g);
Geometry geometry_from_string(const std::string& name);  // throws ConfigError

/// Full description of one experimental arrangement.
/// Lengths in meters, times in seconds, rates in 1/s, phases in radians.
struct InterferometerConfig {
  Geometry geometry = Geometry::MichelsonSwap;

  double arm_short = 0.05;  ///< short arm length [m]
  double arm_long = 0.65;   ///< long arm length [m]

  /// Beam-splitter power reflectivity R; the transmissivity is 1 - R.
  double bs_reflectivity = 0.5;

  double phase_a = 0.0;  ///< static phase on photon A's long path [rad]
  double phase_b = 0.0;  ///< static phase on photon B's long path [rad]

  /// Piezo calibration: applied voltage -> total two-photon phase [rad/V].
  double piezo_gain = 1.0;

  double pump_coherence_time = 1e-7;     ///< pump coherence time [s]
  double single_coherence_time = 1e-13;  ///< down-converted photon coherence time [s]
  double coincidence_window = 1.5e-9;    ///< coincidence acceptance window [s]

  double pair_rate = 1000.0;           ///< generated photon pairs [1/s]
  double background_singles_a = 0.0;   ///< uncorrelated clicks at D_A [1/s]
  double background_singles_b = 0.0;   ///< uncorrelated clicks at D_B [1/s]
  double detection_efficiency_a = 1.0;
  double detection_efficiency_b = 1.0;

  /// Spatial mode overlap at recombination; scales every interference term.
  double mode_match_visibility = 1.0;

  /// Optical path imbalance [m]: (l - s) for the dual-interferometer
  /// layout, 2 (l - s) for the Michelson layouts where each arm is
  /// traversed twice.
  double imbalance() const;

  double bs_transmissivity() const { return 1.0 - bs_reflectivity; }

  /// Attenuation of the ss <-> ll interference term caused by pump phase
  /// diffusion over the imbalance delay: exp(-dx / (c tau_pump)).
  double pump_dephasing() const;

  /// Single-photon wavepacket overlap between the two arms,
  /// exp(-(dx / (c tau_c))^2 / 2); Gaussian spectral filter model.
  double single_envelope() const;

  /// Throws ConfigError naming the violated field.
  void validate() const;
};

}  // namespace timebin
