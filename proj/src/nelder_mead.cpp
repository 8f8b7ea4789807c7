#include "sidm/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sidm {

namespace {

struct Vertex {
  std::vector<double> x;
  double f;
};

Vertex run_simplex(const std::function<double(const std::vector<double>&)>& f,
                   const std::vector<double>& x0, double step, int max_iter,
                   double ftol, double xtol, int* used) {
  const std::size_t n = x0.size();
  std::vector<Vertex> s;
  s.reserve(n + 1);
  s.push_back({x0, f(x0)});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = x0;
    x[i] += (x[i] != 0.0) ? step * x[i] : step;
    s.push_back({x, f(x)});
  }

  auto order = [&] {
    std::sort(s.begin(), s.end(),
              [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
  };
  order();

  int it = 0;
  for (; it < max_iter; ++it) {
    const double fspread = std::fabs(s.back().f - s.front().f);
    double xspread = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      xspread = std::max(xspread, std::fabs(s.back().x[i] - s.front().x[i]));
    }
    if (fspread < ftol && xspread < xtol) break;

    // centroid of all but the worst
    std::vector<double> c(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
      for (std::size_t i = 0; i < n; ++i) c[i] += s[v].x[i];
    }
    for (double& ci : c) ci /= static_cast<double>(n);

    auto at = [&](double coeff) {
      std::vector<double> x(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = c[i] + coeff * (s.back().x[i] - c[i]);
      }
      return x;
    };

    const std::vector<double> xr = at(-1.0);
    const double fr = f(xr);
    if (fr < s.front().f) {
      const std::vector<double> xe = at(-2.0);
      const double fe = f(xe);
      s.back() = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
    } else if (fr < s[n - 1].f) {
      s.back() = {xr, fr};
    } else {
      const bool outside = fr < s.back().f;
      const std::vector<double> xc = at(outside ? -0.5 : 0.5);
      const double fc = f(xc);
      if (fc < std::min(fr, s.back().f)) {
        s.back() = {xc, fc};
      } else {
        // shrink toward the best vertex
        for (std::size_t v = 1; v <= n; ++v) {
          for (std::size_t i = 0; i < n; ++i) {
            s[v].x[i] = s.front().x[i] + 0.5 * (s[v].x[i] - s.front().x[i]);
          }
          s[v].f = f(s[v].x);
        }
      }
    }
    order();
  }
  if (used) *used = it;
  return s.front();
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, const NelderMeadOptions& opts) {
  const double f0 = f(x0);
  Vertex best{x0, f0};
  int total = 0;
  double step = opts.initial_step;
  for (int r = 0; r <= opts.restarts; ++r) {
    int used = 0;
    Vertex v = run_simplex(f, best.x, step, opts.max_iterations,
                           opts.f_tolerance, opts.x_tolerance, &used);
    total += used;
    if (v.f < best.f) best = v;
    step *= 0.25;  // tighter simplex on restart
  }
  const bool conv = total < (opts.restarts + 1) * opts.max_iterations;
  return {best.x, best.f, total, conv};
}

}  // namespace sidm
