#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "timebin/events.hpp"

namespace timebin {

/// (c_max - c_min) / (c_max + c_min). Requires c_max >= c_min >= 0 and a
/// nonzero sum; throws DataError otherwise.
double visibility(double c_max, double c_min);

/// Which column of the records a fit runs on.
enum class FitSeries { Coincidences, SinglesA, SinglesB };

std::string to_string(FitSeries s);

/// Parameters of the fringe model y(x) = c0 * (1 + V cos(omega (x - x0))).
struct FitResult {
  double c0 = 0.0;
  double visibility = 0.0;  ///< constrained to [0, 1]
  double omega = 0.0;       ///< [rad per scan unit], > 0
  double x0 = 0.0;          ///< wrapped into [0, 2 pi / omega)

  double sigma_c0 = 0.0;
  double sigma_visibility = 0.0;
  double sigma_omega = 0.0;
  double sigma_x0 = 0.0;

  double chi2_reduced = 0.0;
  int iterations = 0;
  bool converged = false;
  int n_points = 0;
};

/// Fit did not converge within the iteration budget; carries the last
/// iterate so callers can inspect how far it got.
class FitError : public std::runtime_error {
 public:
  FitError(const std::string& msg, FitResult last)
      : std::runtime_error(msg), last_iterate(last) {}
  FitResult last_iterate;
};

/// Weighted least-squares fringe fit (damped Gauss-Newton with analytic
/// Jacobian, <= 200 iterations, relative step tolerance 1e-10).
///
/// Per-point variance is the counting variance (Poisson of the raw counts,
/// or the propagated uncertainty of corrected counts) plus the
/// scan-coordinate term (model slope * scan_sigma)^2 re-evaluated as the
/// parameters move. The visibility is kept inside [0, 1] by fitting its
/// logit; its uncertainty is mapped back through the bijection. For
/// FitSeries::Coincidences the corrected counts are used when present.
///
/// Requires >= 8 points spanning at least one fringe period; throws
/// DataError for insufficient or degenerate data and FitError on
/// non-convergence.
FitResult fit_fringe(const std::vector<CountRecord>& records, double scan_sigma = 0.0,
                     FitSeries series = FitSeries::Coincidences);

/// Subtracts the accidental estimate 2 (S_A/d) (S_B/d) * window * d from
/// each record's raw coincidences; negative results are clamped to zero
/// and flagged. corrected_sigma combines the Poisson variance of the raw
/// counts with the propagated singles variances.
std::vector<CountRecord> subtract_accidentals(std::vector<CountRecord> records,
                                              double coincidence_window);

/// Top-hat-plus-baseline decomposition of a delay scan.
struct WindowEstimate {
  double window = 0.0;    ///< estimated half-width [s]
  double baseline = 0.0;  ///< accidental rate outside the window [1/s]
  double plateau = 0.0;   ///< rate inside the window [1/s]
  double sigma_window = 0.0;
  double sigma_baseline = 0.0;
  double sigma_plateau = 0.0;
};

/// Profiled least squares over candidate half-widths at the resolution of
/// the delay grid: for each candidate the plateau and baseline levels are
/// the optimal (profiled-out) region rates. Throws DataError when the scan
/// cannot identify a window (no candidate leaves both regions populated,
/// or the plateau does not exceed the baseline).
WindowEstimate estimate_window(const std::vector<CountRecord>& delay_records);

}  // namespace timebin
