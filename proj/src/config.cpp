#include "timebin/config.hpp"

#include <cmath>
#include <sstream>

#include "timebin/errors.hpp"

namespace timebin {

std::string to_string(Geometry g) {
  switch (g) {
    case Geometry::FransonDual: return "franson_dual";
    case Geometry::MichelsonSwap: return "michelson_swap";
    case Geometry::MichelsonBalanced: return "michelson_balanced";
  }
  return "unknown";
}

Geometry geometry_from_string(const std::string& name) {
  if (name == "franson_dual") return Geometry::FransonDual;
  if (name == "michelson_swap") return Geometry::MichelsonSwap;
  if (name == "michelson_balanced") return Geometry::MichelsonBalanced;
  throw ConfigError("geometry: unknown value '" + name +
                    "' (expected franson_dual, michelson_swap or michelson_balanced)");
}

double InterferometerConfig::imbalance() const {
  const double passes = (geometry == Geometry::FransonDual) ? 1.0 : 2.0;
  return passes * (arm_long - arm_short);
}

double InterferometerConfig::pump_dephasing() const {
  const double dx = imbalance();
  if (dx == 0.0) return 1.0;
  return std::exp(-dx / (speed_of_light * pump_coherence_time));
}

double InterferometerConfig::single_envelope() const {
  const double dx = imbalance();
  if (dx == 0.0) return 1.0;
  const double z = dx / (speed_of_light * single_coherence_time);
  return std::exp(-0.5 * z * z);
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& constraint, double got) {
  std::ostringstream os;
  os << field << ": " << constraint << ", got " << got;
  throw ConfigError(os.str());
}

void require_finite(const std::string& field, double v) {
  if (!std::isfinite(v)) fail(field, "must be finite", v);
}

void require_unit_interval(const std::string& field, double v) {
  if (!(v >= 0.0 && v <= 1.0)) fail(field, "must lie in [0, 1]", v);
}

void require_nonneg(const std::string& field, double v, bool allow_inf = false) {
  if (!(v >= 0.0)) fail(field, "must be nonnegative", v);
  if (!allow_inf) require_finite(field, v);
}

}  // namespace

void InterferometerConfig::validate() const {
  require_nonneg("arm_short", arm_short);
  require_nonneg("arm_long", arm_long);
  if (!(arm_long >= arm_short))
    fail("arm_long", "must be >= arm_short (the imbalance is nonnegative)", arm_long);
  require_unit_interval("bs_reflectivity", bs_reflectivity);
  require_finite("phase_a", phase_a);
  require_finite("phase_b", phase_b);
  require_finite("piezo_gain", piezo_gain);
  require_nonneg("pump_coherence_time", pump_coherence_time, /*allow_inf=*/true);
  require_nonneg("single_coherence_time", single_coherence_time, /*allow_inf=*/true);
  require_nonneg("coincidence_window", coincidence_window);
  require_nonneg("pair_rate", pair_rate);
  require_nonneg("background_singles_a", background_singles_a);
  require_nonneg("background_singles_b", background_singles_b);
  require_unit_interval("detection_efficiency_a", detection_efficiency_a);
  require_unit_interval("detection_efficiency_b", detection_efficiency_b);
  require_unit_interval("mode_match_visibility", mode_match_visibility);
}

}  // namespace timebin
