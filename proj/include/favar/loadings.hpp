#pragma once

#include <random>

#include "favar/model.hpp"
#include "favar/types.hpp"

namespace favar {

// Conjugate posterior of a heteroskedastic Bayesian regression
//   x_t = Z_t' beta + N(0, 1/weight_t)
struct GaussianPosterior {
  VectorXd mean;
  MatrixXd covariance;
};

GaussianPosterior weighted_regression_posterior(const MatrixXd& Z,
                                                const VectorXd& x,
                                                const VectorXd& weights,
                                                const VectorXd& prior_mean,
                                                const VectorXd& prior_var);

// Step 1: redraw every unpinned loading row of both blocks. EA19 rows stay
// at (1, 0, ..., 0) and zero z-loadings.
void sample_loadings(McmcState& state, const ModelSpec& spec,
                     const DataSet& data, const PriorConfig& priors,
                     std::mt19937_64& rng);

}  // namespace favar
