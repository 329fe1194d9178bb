#pragma once

#include <cstdint>

#include "favar/types.hpp"

namespace favar {

struct DgpTruth {
  DataSet data;
  MatrixXd factors;    // T x 2
  MatrixXd presample;  // (q-1) x r
  MatrixXd shocks;     // T x n structural shocks
  MatrixXd h_out;      // simulated volatility paths
  MatrixXd h_inf;
};

double companion_spectral_radius(const MatrixXd& A, const ModelSpec& spec);

// Generates data exactly from the estimated model: pre-sample state from
// N(0, state_init_variance * I), VAR recursion with impact B, random-walk
// log-volatilities from (h0, tau*lam), factor-equation observations, proxy
// equation for m. No burn-in, so the likelihood the sampler targets is the
// exact simulation law.
DgpTruth simulate_dgp(const ModelSpec& spec, const McmcState& true_params,
                      int T, std::uint64_t seed,
                      const PriorConfig& priors = PriorConfig{},
                      Month start = Month(2003, 1));

// reference parameterization for synthetic runs: staggered loadings,
// diagonal lag-1 dynamics with strength own_lag, sign-consistent impact
// matrix, near-constant volatilities around log(noise_scale^2)
struct TrueParamKnobs {
  double own_lag = 0.4;
  double phi01 = 1.0;     // proxy relevance
  double phi02 = 0.05;    // proxy measurement-error scale
  double noise_scale = 0.5;
  double sv_walk_variance = 1e-8;
};
McmcState default_true_params(const ModelSpec& spec, int T,
                              const TrueParamKnobs& knobs = {});

}  // namespace favar
