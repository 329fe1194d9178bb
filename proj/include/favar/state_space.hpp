#pragma once

#include <random>

#include "favar/types.hpp"

namespace favar {

// Companion-form state space for the factor draw:
//   obs_t   = H beta_t + r_t,          r_t ~ N(0, diag(R_t))
//   beta_t  = c + F beta_{t-1} + eta_t, eta_t ~ N(0, [Q_top 0; 0 0])
// beta_t stacks (g_t, ..., g_{t-q+1}) with g = (f_out, f_inf, z').
struct StateSpaceSystem {
  MatrixXd H;       // n_obs x dim
  VectorXd c;       // dim
  MatrixXd F;       // dim x dim
  MatrixXd Q_top;   // r x r, the only stochastic rows
  int r = 0;        // stochastic block size
  int blocks = 1;   // q

  int dim() const { return r * blocks; }
};

StateSpaceSystem build_state_space(const ModelSpec& spec,
                                   const McmcState& state);

// observations (x_out, x_inf, z) stacked per t, and their diagonal variances
MatrixXd stack_observations(const DataSet& data);
MatrixXd observation_variances(const McmcState& state, const DataSet& data);

struct CarterKohnDraw {
  MatrixXd g;          // T x r draw of the stochastic block
  MatrixXd presample;  // (q-1) x r, rows g_{-1}, g_{-2}, ...
};

// Forward filter from beta_{-1} ~ N(init_mean, init_cov), then backward
// simulation. Only the stochastic rows are redrawn per t; the full state
// vector is drawn at t = 0 to recover the pre-sample lags. draw_coords
// selects which contemporaneous coordinates carry randomness (empty = all);
// exactly-observed coordinates must be excluded or the draw covariance is
// singular.
CarterKohnDraw carter_kohn_sample(const StateSpaceSystem& sys,
                                  const MatrixXd& obs, const MatrixXd& obs_var,
                                  const VectorXd& init_mean,
                                  const MatrixXd& init_cov,
                                  std::mt19937_64& rng,
                                  std::vector<int> draw_coords = {});

// filtered moments (for oracle tests): returns beta_{t|t} rows and V_{t|t}
struct FilterResult {
  MatrixXd mean;                 // T x dim
  std::vector<MatrixXd> cov;     // T of dim x dim
};
FilterResult kalman_filter(const StateSpaceSystem& sys, const MatrixXd& obs,
                           const MatrixXd& obs_var, const VectorXd& init_mean,
                           const MatrixXd& init_cov);

// Step 8 applied to the model state: rebuilds the system, draws the factor
// path and pre-sample block, writes both back.
void sample_factors(McmcState& state, const ModelSpec& spec,
                    const DataSet& data, const PriorConfig& priors,
                    std::mt19937_64& rng);

}  // namespace favar
