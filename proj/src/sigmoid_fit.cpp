#include "sidm/sigmoid_fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "sidm/nelder_mead.hpp"

namespace sidm {

double sigmoid_model(double x, double a, double lambda, double x0) {
  const double t = -lambda * (x - x0);
  if (t > 0.0) {
    const double e = std::exp(-t);
    return a * e / (1.0 + e);
  }
  return a / (1.0 + std::exp(t));
}

std::vector<double> min_max_normalize(std::span<const double> v) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  std::vector<double> out(v.size(), 0.0);
  if (hi > lo) {
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - lo) / (hi - lo);
  }
  return out;
}

SigmoidFit fit_sigmoid(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 4) {
    throw std::invalid_argument("fit_sigmoid: need >= 4 (x, y) points");
  }
  const std::size_t n = x.size();
  double y_min = y[0], y_max = y[0], y_mean = 0.0;
  for (double v : y) {
    y_min = std::min(y_min, v);
    y_max = std::max(y_max, v);
    y_mean += v;
  }
  y_mean /= static_cast<double>(n);
  if (y_max == y_min) {
    throw std::invalid_argument("fit_sigmoid: degenerate constant data");
  }

  // Heuristic initials: amplitude from the plateau, midpoint at half
  // rise, steepness from the 25-75% rise width (which spans 2 ln 3 / λ).
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  auto x_at_level = [&](double level) {
    for (std::size_t k = 1; k < n; ++k) {
      const double y0 = y[order[k - 1]], y1 = y[order[k]];
      if ((y0 < level) != (y1 < level) && y1 != y0) {
        const double w = (level - y0) / (y1 - y0);
        return x[order[k - 1]] + w * (x[order[k]] - x[order[k - 1]]);
      }
    }
    return 0.5 * (x[order.front()] + x[order.back()]);
  };
  const double a0 = y_max;
  const double x0_init = x_at_level(0.5 * y_max);
  const double q25 = x_at_level(0.25 * y_max);
  const double q75 = x_at_level(0.75 * y_max);
  const double width = std::fabs(q75 - q25);
  const double span = x[order.back()] - x[order.front()];
  double lambda0 = width > 0.0 ? 2.0 * std::log(3.0) / width
                               : (span > 0.0 ? 4.0 / span : 1.0);
  if (q75 < q25) lambda0 = -lambda0;  // decreasing data

  auto sse_of = [&](const std::vector<double>& theta) {
    double sse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = y[i] - sigmoid_model(x[i], theta[0], theta[1], theta[2]);
      sse += d * d;
    }
    return sse;
  };

  std::vector<std::vector<double>> starts = {
      {a0, lambda0, x0_init},
      {a0, lambda0 * 4.0, x0_init},
      {a0, lambda0 * 0.25, x0_init},
      {a0 * 1.2, lambda0, x0_init + 0.2 * span},
      {a0 * 0.8, lambda0, x0_init - 0.2 * span},
      {y_mean * 2.0, lambda0, 0.5 * (x[order.front()] + x[order.back()])},
  };

  NelderMeadOptions opts;
  opts.max_iterations = 8000;
  opts.restarts = 2;
  opts.f_tolerance = 1e-16;
  opts.x_tolerance = 1e-13;
  std::vector<double> best;
  double best_sse = std::numeric_limits<double>::infinity();
  for (auto& s : starts) {
    const NelderMeadResult r = nelder_mead(sse_of, s, opts);
    if (r.fx < best_sse) {
      best_sse = r.fx;
      best = r.x;
    }
  }

  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - y_mean) * (v - y_mean);
  const double r2 = 1.0 - best_sse / ss_tot;
  const double dof = static_cast<double>(n) - 4.0;  // n - p - 1, p = 3
  const double adj =
      dof > 0.0 ? 1.0 - (1.0 - r2) * (static_cast<double>(n) - 1.0) / dof
                : r2;

  SigmoidFit fit;
  fit.a = best[0];
  fit.lambda = best[1];
  fit.x0 = best[2];
  fit.sse = best_sse;
  fit.r2 = r2;
  fit.adj_r2 = adj;
  fit.rmse = std::sqrt(best_sse / static_cast<double>(n));
  return fit;
}

}  // namespace sidm
