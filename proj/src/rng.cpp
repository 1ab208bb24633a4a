#include "sbsos/rng.hpp"

#include <cmath>
#include <numbers>

namespace sbsos {

double Rng::normal(double sigma) {
  // Box-Muller; discard the second deviate to keep the stream simple.
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return sigma * std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::von_mises(double kappa) {
  if (kappa < 1e-8) return uniform(-std::numbers::pi, std::numbers::pi);
  const double tau = 1.0 + std::sqrt(1.0 + 4.0 * kappa * kappa);
  const double rho = (tau - std::sqrt(2.0 * tau)) / (2.0 * kappa);
  const double r = (1.0 + rho * rho) / (2.0 * rho);
  double f = 0.0;
  for (;;) {
    const double u1 = uniform();
    const double u2 = uniform();
    const double z = std::cos(std::numbers::pi * u1);
    f = (1.0 + r * z) / (r + z);
    const double c = kappa * (r - f);
    if (c * (2.0 - c) - u2 > 0.0) break;
    if (c <= 0.0) continue;
    if (std::log(c / u2) + 1.0 - c >= 0.0) break;
  }
  const double u3 = uniform();
  const double angle = std::acos(std::clamp(f, -1.0, 1.0));
  return u3 < 0.5 ? -angle : angle;
}

}  // namespace sbsos
