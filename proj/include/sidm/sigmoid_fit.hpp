#pragma once

#include <span>
#include <vector>

namespace sidm {

/// Logistic fit y = a / (1 + exp(-lambda (x - x0))) by multi-start
/// Nelder-Mead least squares. Goodness-of-fit columns match the usual
/// curve-fitting report (R^2, adjusted R^2, RMSE).
struct SigmoidFit {
  double a;
  double lambda;
  double x0;
  double r2;
  double adj_r2;
  double rmse;
  double sse;
};

double sigmoid_model(double x, double a, double lambda, double x0);

/// Throws std::invalid_argument for fewer than 4 points or constant y.
SigmoidFit fit_sigmoid(std::span<const double> x, std::span<const double> y);

/// Min-max scaling to [0,1]; constant series map to all zeros.
std::vector<double> min_max_normalize(std::span<const double> v);

}  // namespace sidm
