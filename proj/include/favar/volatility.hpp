#pragma once

#include <random>

#include "favar/mixture.hpp"
#include "favar/types.hpp"

namespace favar {

// overflow guard on log-volatilities; unreachable at data scale but keeps
// exp(h) and its reciprocals inside double range in prior-tail regions
constexpr double kLogVolClamp = 300.0;

// Symmetric tridiagonal precision system K h = d with K = diag + off bands.
// Solved by a fixed-bandwidth Cholesky; no dense T x T object is formed.
struct Tridiagonal {
  VectorXd diag;
  VectorXd off;  // subdiagonal, size T-1
};

// Cholesky factor of a tridiagonal SPD matrix (bands only).
struct TridiagonalCholesky {
  VectorXd l;  // diagonal of L
  VectorXd m;  // subdiagonal of L

  static TridiagonalCholesky factor(const Tridiagonal& K);
  VectorXd solve(const VectorXd& rhs) const;          // K x = rhs
  VectorXd solve_transposed(const VectorXd& z) const; // L' x = z
};

// One draw of a random-walk path with Gaussian observations:
//   obs_t   = h_t + obs_mean_t + N(0, obs_var_t)
//   h_t     = h_{t-1} + N(0, walk_var_t),  h_0 given.
VectorXd draw_random_walk_path(std::mt19937_64& rng, double h0,
                               const VectorXd& walk_var,
                               const VectorXd& obs,
                               const VectorXd& obs_mean,
                               const VectorXd& obs_var);

// Step 2: auxiliary-mixture draw of one series' log-volatility path given
// factor-equation residuals. Indicators are drawn against the current path,
// then the path jointly from the banded precision system.
VectorXd sample_volatility_path(std::mt19937_64& rng, const VectorXd& residuals,
                                const VectorXd& h_current, double h0,
                                const VectorXd& walk_var,
                                const MixtureTable& table);

// Step 3: initial condition draw, precision 1/V_{h,1} + 1/prior_var.
double sample_sv_initial(std::mt19937_64& rng, double h1, double v_h1,
                         double prior_var);

// Step 4: horseshoe hyperparameter draws for one series. Updates lam/nu_lam
// (length T), tau and nu_tau in place and returns the new walk variances
// V_{h,t} = tau * lam_t.
VectorXd sample_horseshoe(std::mt19937_64& rng, const VectorXd& h, double h0,
                          VectorXd& lam, VectorXd& nu_lam, double& tau,
                          double& nu_tau);

}  // namespace favar
