#pragma once

#include <cmath>
#include <numbers>

// Reference implementations kept independent of the library code.
namespace bugprobe::oracles {

// Student-t density with `dof` degrees of freedom.
inline double t_density(double x, double dof) {
  const double c = std::exp(std::lgamma((dof + 1) / 2) - std::lgamma(dof / 2)) /
                   std::sqrt(dof * std::numbers::pi);
  return c * std::pow(1 + x * x / dof, -(dof + 1) / 2);
}

// P(T <= x) by composite Simpson integration from 0.
inline double t_cdf(double x, double dof) {
  const int steps = 20000;
  const double h = x / steps;
  double sum = t_density(0, dof) + t_density(x, dof);
  for (int i = 1; i < steps; ++i) {
    sum += (i % 2 == 1 ? 4 : 2) * t_density(i * h, dof);
  }
  return 0.5 + sum * h / 3;
}

// Upper quantile by bisection on t_cdf.
inline double t_quantile(double p, double dof) {
  double lo = 0;
  double hi = 1000;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (t_cdf(mid, dof) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace bugprobe::oracles
