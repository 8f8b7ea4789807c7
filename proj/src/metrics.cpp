#include "sidm/metrics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sidm {

namespace {

double rms(std::span<const double> s) {
  double sum = 0.0;
  for (double x : s) sum += x * x;
  return std::sqrt(sum / static_cast<double>(s.size()));
}

void require_equal_nonempty(std::span<const double> a,
                            std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("series length mismatch");
  }
  if (a.empty()) throw std::invalid_argument("empty series");
}

}  // namespace

double rmse(std::span<const double> observed,
            std::span<const double> simulated) {
  require_equal_nonempty(observed, simulated);
  double sum = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double d = observed[i] - simulated[i];
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(observed.size()));
}

double theils_u(std::span<const double> observed,
                std::span<const double> simulated) {
  require_equal_nonempty(observed, simulated);
  const double denom = rms(observed) + rms(simulated);
  if (denom == 0.0) {
    throw std::domain_error("theils_u undefined: both series are zero");
  }
  return rmse(observed, simulated) / denom;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  require_equal_nonempty(x, y);
  if (x.size() < 2) throw std::invalid_argument("need at least 2 samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw std::domain_error("pearson undefined: zero variance");
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> jerk_series(const Trajectory& traj, int vehicle) {
  const auto& s = traj.states.at(static_cast<std::size_t>(vehicle));
  if (s.size() < 2) throw std::invalid_argument("need at least 2 samples");
  const double dt = traj.dt;
  std::vector<double> jerk(s.size());
  jerk.front() = (s[1].acceleration - s[0].acceleration) / dt;
  for (std::size_t k = 1; k + 1 < s.size(); ++k) {
    jerk[k] = (s[k + 1].acceleration - s[k - 1].acceleration) / (2.0 * dt);
  }
  jerk.back() =
      (s[s.size() - 1].acceleration - s[s.size() - 2].acceleration) / dt;
  return jerk;
}

FuelCoefficients load_fuel_coefficients(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open fuel coefficients file: " + path);
  }
  nlohmann::json j = nlohmann::json::parse(in);
  auto read_matrix = [](const nlohmann::json& m) {
    std::array<std::array<double, 4>, 4> k{};
    if (!m.is_array() || m.size() != 4) {
      throw std::runtime_error("fuel coefficients: expected 4x4 array");
    }
    for (int i = 0; i < 4; ++i) {
      if (!m[i].is_array() || m[i].size() != 4) {
        throw std::runtime_error("fuel coefficients: expected 4x4 array");
      }
      for (int c = 0; c < 4; ++c) k[i][c] = m[i][c].get<double>();
    }
    return k;
  };
  if (!j.contains("k_pos")) {
    throw std::runtime_error("fuel coefficients: missing k_pos");
  }
  FuelCoefficients out;
  out.k_pos = read_matrix(j["k_pos"]);
  if (j.contains("k_neg")) out.k_neg = read_matrix(j["k_neg"]);
  return out;
}

FuelResult vt_micro_fuel(const Trajectory& traj, int vehicle,
                         const FuelCoefficients& coeffs) {
  const auto& s = traj.states.at(static_cast<std::size_t>(vehicle));
  FuelResult out;
  out.moe.reserve(s.size());
  out.total = 0.0;
  for (const auto& st : s) {
    const auto& k = (st.acceleration < 0.0 && coeffs.k_neg) ? *coeffs.k_neg
                                                            : coeffs.k_pos;
    double expo = 0.0;
    double vi = 1.0;
    for (int i = 0; i < 4; ++i) {
      double aj = 1.0;
      for (int jj = 0; jj < 4; ++jj) {
        expo += k[i][jj] * vi * aj;
        aj *= st.acceleration;
      }
      vi *= st.velocity;
    }
    const double moe = std::exp(expo);
    out.moe.push_back(moe);
    out.total += moe * traj.dt;
  }
  return out;
}

std::vector<double> velocity_from_positions(std::span<const double> t,
                                            std::span<const double> x,
                                            double window) {
  if (t.size() != x.size() || t.size() < 2) {
    throw std::invalid_argument("velocity_from_positions: bad series");
  }
  const std::size_t n = t.size();
  std::vector<double> raw(n);
  raw.front() = (x[1] - x[0]) / (t[1] - t[0]);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    raw[k] = (x[k + 1] - x[k - 1]) / (t[k + 1] - t[k - 1]);
  }
  raw.back() = (x[n - 1] - x[n - 2]) / (t[n - 1] - t[n - 2]);

  const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
  const std::size_t half =
      static_cast<std::size_t>(std::max(0.0, window / (2.0 * dt)));
  if (half == 0) return raw;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t lo = k >= half ? k - half : 0;
    const std::size_t hi = std::min(n - 1, k + half);
    double sum = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) sum += raw[j];
    out[k] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace sidm
