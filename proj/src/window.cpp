#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "timebin/analysis.hpp"
#include "timebin/errors.hpp"

namespace timebin {

namespace {

struct Region {
  double counts = 0.0;
  double duration = 0.0;
  int points = 0;

  double rate() const { return counts / duration; }
  // Poisson error on the aggregated region count, propagated to the rate.
  double sigma_rate() const { return std::sqrt(std::max(counts, 1.0)) / duration; }
};

double region_chi2(const std::vector<double>& c, const std::vector<double>& dur,
                   const std::vector<std::size_t>& idx, double rate) {
  double chi2 = 0.0;
  for (std::size_t i : idx) {
    const double mu = rate * dur[i];
    const double r = c[i] - mu;
    chi2 += r * r / std::max(mu, 1.0);
  }
  return chi2;
}

}  // namespace

WindowEstimate estimate_window(const std::vector<CountRecord>& delay_records) {
  const std::size_t n = delay_records.size();
  if (n < 4)
    throw DataError("window estimate needs at least 4 delay points (2 per region)");

  std::vector<double> abs_delay(n), counts(n), dur(n);
  for (std::size_t i = 0; i < n; ++i) {
    const CountRecord& r = delay_records[i];
    if (!(r.duration > 0.0))
      throw DataError("window estimate requires a positive duration per record");
    abs_delay[i] = std::abs(r.scan_value);
    counts[i] = static_cast<double>(r.coincidences_raw);
    dur[i] = r.duration;
  }

  // Candidate half-widths sit at midpoints between consecutive distinct
  // |delay| values; the step function cannot be localized any finer.
  std::vector<double> uniq = abs_delay;
  std::sort(uniq.begin(), uniq.end());
  const double merge_tol = std::max(uniq.back(), 1.0e-300) * 1e-6;
  uniq.erase(std::unique(uniq.begin(), uniq.end(),
                         [merge_tol](double a, double b) { return b - a <= merge_tol; }),
             uniq.end());
  if (uniq.size() < 2)
    throw DataError("window estimate needs at least two distinct |delay| values");

  std::vector<double> candidates(uniq.size() - 1);
  for (std::size_t k = 0; k + 1 < uniq.size(); ++k)
    candidates[k] = 0.5 * (uniq[k] + uniq[k + 1]);

  double best_chi2 = std::numeric_limits<double>::infinity();
  std::size_t best_k = candidates.size();
  Region best_in, best_out;

  for (std::size_t k = 0; k < candidates.size(); ++k) {
    const double w = candidates[k];
    Region in, out;
    std::vector<std::size_t> in_idx, out_idx;
    for (std::size_t i = 0; i < n; ++i) {
      if (abs_delay[i] <= w) {
        in.counts += counts[i];
        in.duration += dur[i];
        ++in.points;
        in_idx.push_back(i);
      } else {
        out.counts += counts[i];
        out.duration += dur[i];
        ++out.points;
        out_idx.push_back(i);
      }
    }
    if (in.points < 2 || out.points < 2) continue;

    const double chi2 = region_chi2(counts, dur, in_idx, in.rate()) +
                        region_chi2(counts, dur, out_idx, out.rate());
    if (chi2 < best_chi2) {
      best_chi2 = chi2;
      best_k = k;
      best_in = in;
      best_out = out;
    }
  }

  if (best_k == candidates.size())
    throw DataError("window estimate found no candidate with 2 points per region");
  if (!(best_in.rate() > best_out.rate())) {
    std::ostringstream os;
    os << "window not identifiable: plateau rate " << best_in.rate()
       << " Hz does not exceed baseline rate " << best_out.rate() << " Hz";
    throw DataError(os.str());
  }

  WindowEstimate e;
  e.window = candidates[best_k];
  e.plateau = best_in.rate();
  e.baseline = best_out.rate();
  e.sigma_plateau = best_in.sigma_rate();
  e.sigma_baseline = best_out.sigma_rate();
  // The edge is only located to within the neighboring candidates.
  const double lo = (best_k == 0) ? uniq.front() : candidates[best_k - 1];
  const double hi = (best_k + 1 == candidates.size()) ? uniq.back() : candidates[best_k + 1];
  e.sigma_window = 0.5 * std::max(e.window - lo, hi - e.window);
  return e;
}

}  // namespace timebin
