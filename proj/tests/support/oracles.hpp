#pragma once

#include <random>
#include <vector>

#include "favar/state_space.hpp"
#include "favar/types.hpp"

namespace favar::test {

// Dense joint-Gaussian conditioning for a linear-Gaussian state-space model:
// builds the covariance of (states, observations) explicitly and conditions.
// Independent of the filter implementation path.
struct DenseSmoother {
  // moments of the full state path given all observations
  VectorXd mean;    // stacked beta_0..beta_{T-1}
  MatrixXd cov;
};
DenseSmoother dense_joint_conditioning(const StateSpaceSystem& sys,
                                       const MatrixXd& obs,
                                       const MatrixXd& obs_var,
                                       const VectorXd& init_mean,
                                       const MatrixXd& init_cov);

// dense-Cholesky draw from a random-walk-plus-noise posterior (oracle for
// the banded precision sampler)
struct DensePathPosterior {
  VectorXd mean;
  MatrixXd cov;
};
DensePathPosterior dense_walk_posterior(double h0, const VectorXd& walk_var,
                                        const VectorXd& obs,
                                        const VectorXd& obs_mean,
                                        const VectorXd& obs_var);

// mean and covariance of a sample of vectors
struct SampleMoments {
  VectorXd mean;
  MatrixXd cov;
};
SampleMoments sample_moments(const std::vector<VectorXd>& draws);

// Monte-Carlo standard error of a sample mean (per coordinate)
VectorXd mc_standard_error(const std::vector<VectorXd>& draws);

// simple deterministic toy-state builder shared by sampler tests
McmcState make_toy_state(const ModelSpec& spec, int T);

// default toy spec: N countries, nz z-series, L lags
ModelSpec make_toy_spec(int n_countries, int nz, int L, int P = 0,
                        bool channels = false);

// brute-force evaluation of the column likelihood exponent for the impact
// step: sum_t || B^-1 u_t ||^2 with column col replaced by (u, w)
double impact_exponent_bruteforce(const MatrixXd& B, int col, double u,
                                  const VectorXd& w, const MatrixXd& U);

}  // namespace favar::test
