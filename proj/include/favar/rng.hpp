#pragma once

#include <cstdint>
#include <random>

#include "favar/types.hpp"

namespace favar {

// Stream-splitting rule: every sampler step of every sweep draws from its own
// engine, seeded as splitmix64(chain_key ^ mix(sweep, step)). Runs are
// reproducible given (seed, spec) and insensitive to how many variates a
// step consumes.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  RngStream sub(std::uint64_t tag) const;
  RngStream sub(std::uint64_t a, std::uint64_t b) const { return sub(a).sub(b); }

  std::mt19937_64 engine() const;
  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

std::uint64_t splitmix64(std::uint64_t x);

// thin wrappers so call sites stay deterministic and uniform in style
double draw_uniform(std::mt19937_64& rng);                  // U(0,1)
double draw_normal(std::mt19937_64& rng);                   // N(0,1)
double draw_gamma(std::mt19937_64& rng, double shape);      // Gamma(shape, 1)
int draw_categorical(std::mt19937_64& rng, const VectorXd& weights);

// exact one/two-sided truncated standard normal; Robert exponential-tilting
// rejection once the region sits beyond ~6 sd
double draw_truncated_std_normal(std::mt19937_64& rng, double lo, double hi);
double draw_truncated_normal(std::mt19937_64& rng, double mean, double sd,
                             double lo, double hi);

// inverse gamma: X ~ IG(shape, scale) via scale / Gamma(shape)
double draw_inverse_gamma(std::mt19937_64& rng, double shape, double scale);
// truncated to (floor, cap]; exact via the gamma quantile of 1/X
double draw_inverse_gamma_truncated(std::mt19937_64& rng, double shape,
                                    double scale, double cap,
                                    double floor = 1e-10);

// multivariate normal helpers
VectorXd draw_std_normal_vector(std::mt19937_64& rng, int n);
// mean + chol(cov) z; throws SingularPosterior when cov is not SPD
VectorXd draw_mvn(std::mt19937_64& rng, const VectorXd& mean,
                  const MatrixXd& cov);

}  // namespace favar
