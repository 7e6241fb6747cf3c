#include "timebin/regimes.hpp"

namespace timebin {

RegimeReport classify_regimes(const InterferometerConfig& config) {
  config.validate();
  const double dx = config.imbalance();
  RegimeReport r;
  r.cond_single_ok = dx > speed_of_light * config.single_coherence_time;
  r.cond_pump_ok = dx < speed_of_light * config.pump_coherence_time;
  r.cond_window_ok = dx > speed_of_light * config.coincidence_window;
  r.cond_tau_gt_window = config.pump_coherence_time > config.coincidence_window;
  r.franson_entanglement_feasible = r.cond_single_ok && r.cond_pump_ok && r.cond_window_ok;
  r.swap_entanglement_feasible = r.cond_pump_ok;
  return r;
}

double min_postselect_imbalance(double coincidence_window) {
  return speed_of_light * coincidence_window;
}

}  // namespace timebin
