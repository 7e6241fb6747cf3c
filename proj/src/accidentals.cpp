#include <cmath>

#include "timebin/analysis.hpp"
#include "timebin/errors.hpp"

namespace timebin {

std::vector<CountRecord> subtract_accidentals(std::vector<CountRecord> records,
                                              double coincidence_window) {
  if (!(coincidence_window >= 0.0) || !std::isfinite(coincidence_window))
    throw DataError("coincidence window must be nonnegative and finite");

  for (CountRecord& r : records) {
    if (!(r.duration > 0.0))
      throw DataError("subtract_accidentals requires a positive duration per record");
    const double sa = static_cast<double>(r.singles_a);
    const double sb = static_cast<double>(r.singles_b);
    // Accidental rate 2 S_A S_B w for uncorrelated streams (rates in Hz);
    // one duration cancels when converting back to expected counts.
    const double expected = 2.0 * sa * sb * coincidence_window / r.duration;
    double corrected = static_cast<double>(r.coincidences_raw) - expected;
    r.clamped = corrected < 0.0;
    if (r.clamped) corrected = 0.0;
    // raw is Poisson; the subtraction term inherits the relative errors of
    // both singles counts.
    const double var_sub =
        expected * expected * ((sa > 0.0 ? 1.0 / sa : 0.0) + (sb > 0.0 ? 1.0 / sb : 0.0));
    r.coincidences_corrected = corrected;
    r.corrected_sigma = std::sqrt(static_cast<double>(r.coincidences_raw) + var_sub);
  }
  return records;
}

}  // namespace timebin
