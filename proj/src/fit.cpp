#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "timebin/analysis.hpp"
#include "timebin/constants.hpp"
#include "timebin/errors.hpp"

namespace timebin {

double visibility(double c_max, double c_min) {
  if (!(c_min >= 0.0) || !(c_max >= c_min))
    throw DataError("visibility requires c_max >= c_min >= 0");
  const double sum = c_max + c_min;
  if (sum == 0.0) throw DataError("visibility undefined: c_max + c_min = 0");
  return (c_max - c_min) / sum;
}

std::string to_string(FitSeries s) {
  switch (s) {
    case FitSeries::Coincidences: return "coincidences";
    case FitSeries::SinglesA: return "singles_a";
    case FitSeries::SinglesB: return "singles_b";
  }
  return "unknown";
}

namespace {

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;

double logistic(double u) { return 1.0 / (1.0 + std::exp(-u)); }

struct SeriesData {
  std::vector<double> x, y, sigma;  // sigma: counting error, >= 1 count
};

SeriesData extract_series(const std::vector<CountRecord>& records, FitSeries series) {
  SeriesData d;
  d.x.reserve(records.size());
  d.y.reserve(records.size());
  d.sigma.reserve(records.size());
  for (const CountRecord& r : records) {
    d.x.push_back(r.scan_value);
    double y = 0.0, sigma = 0.0;
    switch (series) {
      case FitSeries::Coincidences:
        if (r.coincidences_corrected) {
          y = *r.coincidences_corrected;
          sigma = r.corrected_sigma.value_or(std::sqrt(std::max(y, 1.0)));
        } else {
          y = static_cast<double>(r.coincidences_raw);
          sigma = std::sqrt(std::max(y, 1.0));
        }
        break;
      case FitSeries::SinglesA:
        y = static_cast<double>(r.singles_a);
        sigma = std::sqrt(std::max(y, 1.0));
        break;
      case FitSeries::SinglesB:
        y = static_cast<double>(r.singles_b);
        sigma = std::sqrt(std::max(y, 1.0));
        break;
    }
    d.y.push_back(y);
    d.sigma.push_back(std::max(sigma, 1.0));
  }
  return d;
}

// Least-squares periodogram on the mean-subtracted data; returns the
// frequency of maximum power and the phase-derived offset estimate.
void periodogram_init(const SeriesData& d, double& omega0, double& x00) {
  const std::size_t n = d.x.size();
  const auto [xmin_it, xmax_it] = std::minmax_element(d.x.begin(), d.x.end());
  const double span = *xmax_it - *xmin_it;

  double min_gap = span;
  std::vector<double> xs = d.x;
  std::sort(xs.begin(), xs.end());
  for (std::size_t i = 1; i < n; ++i)
    min_gap = std::min(min_gap, std::max(xs[i] - xs[i - 1], 1e-300));

  double ybar = 0.0;
  for (double v : d.y) ybar += v;
  ybar /= static_cast<double>(n);

  const double w_lo = 0.5 * two_pi / span;  // half a period over the scan
  const double w_hi = pi / min_gap;         // Nyquist of the densest spacing
  const int grid = 4096;
  double best_power = -1.0;
  std::complex<double> best_z;
  omega0 = w_lo;
  for (int k = 0; k <= grid; ++k) {
    const double w = w_lo + (w_hi - w_lo) * static_cast<double>(k) / grid;
    std::complex<double> z(0.0, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      z += (d.y[i] - ybar) * std::exp(std::complex<double>(0.0, -w * d.x[i]));
    const double power = std::norm(z);
    if (power > best_power) {
      best_power = power;
      omega0 = w;
      best_z = z;
    }
  }
  // y - ybar ~ c0 V cos(omega (x - x0)) makes z ~ (n c0 V / 2) e^{-i omega x0}.
  x00 = -std::arg(best_z) / omega0;
}

struct Model {
  // p = (c0, u, omega, x0), V = logistic(u)
  double c0, u, omega, x0;

  double value(double x) const {
    return c0 * (1.0 + logistic(u) * std::cos(omega * (x - x0)));
  }
  double slope(double x) const {
    return -c0 * logistic(u) * omega * std::sin(omega * (x - x0));
  }
  Eigen::Vector4d jacobian_row(double x) const {
    const double V = logistic(u);
    const double th = omega * (x - x0);
    const double c = std::cos(th), s = std::sin(th);
    Eigen::Vector4d j;
    j(0) = 1.0 + V * c;
    j(1) = c0 * c * V * (1.0 - V);  // dV/du = V(1-V)
    j(2) = -c0 * V * s * (x - x0);
    j(3) = c0 * V * s * omega;
    return j;
  }
};

double chi_square(const SeriesData& d, const Model& m, double scan_sigma,
                  std::vector<double>* weights_out) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    const double slope = m.slope(d.x[i]);
    const double var = d.sigma[i] * d.sigma[i] + slope * slope * scan_sigma * scan_sigma;
    const double r = d.y[i] - m.value(d.x[i]);
    chi2 += r * r / var;
    if (weights_out) (*weights_out)[i] = 1.0 / var;
  }
  return chi2;
}

FitResult to_result(const Model& m, const SeriesData& d, double chi2, int iter,
                    bool converged) {
  FitResult r;
  r.c0 = m.c0;
  r.visibility = logistic(m.u);
  r.omega = m.omega;
  r.x0 = m.x0;
  r.chi2_reduced = chi2 / std::max<double>(1.0, static_cast<double>(d.x.size()) - 4.0);
  r.iterations = iter;
  r.converged = converged;
  r.n_points = static_cast<int>(d.x.size());
  return r;
}

}  // namespace

FitResult fit_fringe(const std::vector<CountRecord>& records, double scan_sigma,
                     FitSeries series) {
  if (records.size() < 8) {
    std::ostringstream os;
    os << "insufficient data: fringe fit needs at least 8 points, got " << records.size();
    throw DataError(os.str());
  }
  if (!(scan_sigma >= 0.0)) throw DataError("scan_sigma must be nonnegative");

  const SeriesData d = extract_series(records, series);
  const std::size_t n = d.x.size();

  double ybar = 0.0;
  for (double v : d.y) ybar += v;
  ybar /= static_cast<double>(n);
  if (!(ybar > 0.0))
    throw DataError("degenerate fringe: mean level is zero, c0 would not be positive");

  // Initial guesses: mean level, smoothed min/max contrast, periodogram
  // frequency and phase.
  std::vector<double> smooth(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = (i == 0) ? 0 : i - 1;
    const std::size_t b = (i + 1 == n) ? n - 1 : i + 1;
    smooth[i] = (d.y[a] + d.y[i] + d.y[b]) / 3.0;
  }
  const auto [smin, smax] = std::minmax_element(smooth.begin(), smooth.end());
  double v0 = (*smax + *smin > 0.0) ? (*smax - *smin) / (*smax + *smin) : 0.5;
  v0 = std::clamp(v0, 0.02, 0.98);

  Model m;
  m.c0 = ybar;
  m.u = std::log(v0 / (1.0 - v0));
  periodogram_init(d, m.omega, m.x0);

  std::vector<double> w(n);
  double chi2 = chi_square(d, m, scan_sigma, &w);
  double lambda = 1e-3;
  bool converged = false;
  int iter = 0;

  for (; iter < kMaxIterations && !converged; ++iter) {
    Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
    Eigen::Vector4d g = Eigen::Vector4d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
      const Eigen::Vector4d j = m.jacobian_row(d.x[i]);
      const double r = d.y[i] - m.value(d.x[i]);
      a += w[i] * j * j.transpose();
      g += w[i] * r * j;
    }

    bool accepted = false;
    while (!accepted) {
      Eigen::Matrix4d damped = a;
      for (int k = 0; k < 4; ++k)
        damped(k, k) += lambda * std::max(a(k, k), 1e-30);
      const Eigen::Vector4d step = damped.ldlt().solve(g);
      Model trial = m;
      trial.c0 += step(0);
      trial.u += step(1);
      trial.omega += step(2);
      trial.x0 += step(3);

      const double trial_chi2 =
          std::isfinite(trial.c0 + trial.u + trial.omega + trial.x0)
              ? chi_square(d, trial, scan_sigma, nullptr)
              : std::numeric_limits<double>::infinity();
      if (trial_chi2 <= chi2) {
        const double period = two_pi / std::max(std::abs(m.omega), 1e-300);
        const bool small_step =
            std::abs(step(0)) <= kStepTolerance * (std::abs(m.c0) + 1.0) &&
            std::abs(step(1)) <= kStepTolerance * (std::abs(m.u) + 1.0) &&
            std::abs(step(2)) <= kStepTolerance * std::abs(m.omega) &&
            std::abs(step(3)) <= kStepTolerance * period;
        m = trial;
        chi2 = trial_chi2;
        chi_square(d, m, scan_sigma, &w);  // refresh effective variances
        lambda = std::max(lambda * 0.1, 1e-14);
        accepted = true;
        if (small_step) converged = true;
      } else {
        lambda *= 10.0;
        if (lambda > 1e14) {
          accepted = true;  // stuck; outer loop will run out and report
        }
      }
    }
    if (lambda > 1e14) break;
  }

  if (!converged)
    throw FitError("fringe fit did not converge within 200 iterations",
                   to_result(m, d, chi2, iter, false));

  // Canonical form: omega > 0 and x0 in [0, period).
  if (m.omega < 0.0) m.omega = -m.omega;  // cos is even in omega (x - x0)
  const double period = two_pi / m.omega;
  m.x0 -= period * std::floor(m.x0 / period);

  // Covariance from the undamped normal matrix at the optimum.
  Eigen::Matrix4d a = Eigen::Matrix4d::Zero();
  chi_square(d, m, scan_sigma, &w);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector4d j = m.jacobian_row(d.x[i]);
    a += w[i] * j * j.transpose();
  }
  const Eigen::Matrix4d cov = a.inverse();

  FitResult r = to_result(m, d, chi2, iter, true);
  const double v = logistic(m.u);
  r.sigma_c0 = std::sqrt(std::max(cov(0, 0), 0.0));
  r.sigma_visibility = v * (1.0 - v) * std::sqrt(std::max(cov(1, 1), 0.0));
  r.sigma_omega = std::sqrt(std::max(cov(2, 2), 0.0));
  r.sigma_x0 = std::sqrt(std::max(cov(3, 3), 0.0));
  return r;
}

}  // namespace timebin
