#pragma once

#include <array>

#include "favar/types.hpp"

namespace favar {

// Seven-component normal mixture approximating the log chi-squared(1)
// density, offset convention -1.2704, jitter constant c = 1e-4 for the
// log-square transform.
struct MixtureTable {
  static constexpr int kComponents = 7;
  static constexpr double kOffset = -1.2704;
  static constexpr double kJitter = 1e-4;

  std::array<double, kComponents> prob;
  std::array<double, kComponents> mean_raw;  // before the offset shift
  std::array<double, kComponents> var;

  // observation mean contribution of component k: mean_raw[k] + kOffset
  double component_mean(int k) const { return mean_raw[k] + kOffset; }

  double mixture_mean() const;
  double mixture_variance() const;

  static const MixtureTable& ksc7();
};

// numerically safe log(e^2 + c); exact 2*log|e| once e^2 would overflow
double log_square_plus_jitter(double e);

}  // namespace favar
