#include "favar/mixture.hpp"

#include <cmath>

namespace favar {

const MixtureTable& MixtureTable::ksc7() {
  static const MixtureTable table = {
      {0.00730, 0.10556, 0.00002, 0.04395, 0.34001, 0.24566, 0.25750},
      {-10.12999, -3.97281, -8.56686, 2.77786, 0.61942, 1.79518, -1.08819},
      {5.79596, 2.61369, 5.17950, 0.16735, 0.64009, 0.34023, 1.26261}};
  return table;
}

double MixtureTable::mixture_mean() const {
  double m = 0.0;
  for (int k = 0; k < kComponents; ++k) m += prob[k] * component_mean(k);
  return m;
}

double MixtureTable::mixture_variance() const {
  const double m = mixture_mean();
  double v = 0.0;
  for (int k = 0; k < kComponents; ++k) {
    const double d = component_mean(k) - m;
    v += prob[k] * (var[k] + d * d);
  }
  return v;
}

double log_square_plus_jitter(double e) {
  const double a = std::abs(e);
  if (a > 1e100) return 2.0 * std::log(a);
  return std::log(a * a + MixtureTable::kJitter);
}

}  // namespace favar
