#pragma once

#include "timebin/config.hpp"

namespace timebin {

/// Timing-regime classification for a configuration. All comparisons are
/// strict inequalities on the optical imbalance dx = imbalance().
struct RegimeReport {
  bool cond_single_ok = false;      ///< dx > c * tau_c: no single-photon interference
  bool cond_pump_ok = false;        ///< dx < c * tau_pump: pair interference survives
  bool cond_window_ok = false;      ///< dx > c * window: satellites resolvable
  bool cond_tau_gt_window = false;  ///< tau_pump > window

  /// Dual layout needs all three timing conditions.
  bool franson_entanglement_feasible = false;
  /// Swap layout only needs the pump condition: satellites are rerouted
  /// optically, so the window may be arbitrarily long.
  bool swap_entanglement_feasible = false;
};

RegimeReport classify_regimes(const InterferometerConfig& config);

/// Smallest imbalance [m] for which a dual-layout window of the given
/// length can still separate the satellites (strict bound c * window).
double min_postselect_imbalance(double coincidence_window);

}  // namespace timebin
