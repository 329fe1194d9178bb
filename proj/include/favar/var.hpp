#pragma once

#include <random>

#include "favar/loadings.hpp"
#include "favar/model.hpp"
#include "favar/types.hpp"

namespace favar {

// residual variance of an AR(L) model with intercept, per column of Y,
// degrees-of-freedom corrected
VectorXd ar_residual_variances(const MatrixXd& Y, int L);

// Minnesota prior moments for equation i over (const, Gamma_. lag blocks)
struct EquationPrior {
  VectorXd mean;
  VectorXd variance;
};
EquationPrior minnesota_prior(const ModelSpec& spec, const PriorConfig& priors,
                              int equation, double kappa1, double kappa2,
                              const VectorXd& sigma2);

// Conditional posterior of equation i's free coefficients given the rest of
// A and B (equation-by-equation whitening by the i-th column of B^-1).
GaussianPosterior var_equation_posterior(int equation, const MatrixXd& Y,
                                         const MatrixXd& X, const MatrixXd& A,
                                         const MatrixXd& B,
                                         const EquationPrior& prior);

// Step 5: redraw the endogenous columns of A in place; instrument columns
// stay identically zero.
void sample_var_coefficients(McmcState& state, const ModelSpec& spec,
                             const DataSet& data, const PriorConfig& priors,
                             std::mt19937_64& rng);

// Step 7: truncated inverse-gamma draws for (kappa1, kappa2)
std::pair<double, double> sample_shrinkage(const McmcState& state,
                                           const ModelSpec& spec,
                                           const PriorConfig& priors,
                                           std::mt19937_64& rng);

// shape/scale bookkeeping, exposed for the direct-substitution tests
struct ShrinkageKernel {
  double shape1 = 0.0, scale1 = 0.0;
  double shape2 = 0.0, scale2 = 0.0;
};
ShrinkageKernel shrinkage_kernel(const MatrixXd& A, const VectorXd& sigma2,
                                 double kappa1, double kappa2,
                                 const ModelSpec& spec);

}  // namespace favar
