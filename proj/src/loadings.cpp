#include "favar/loadings.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "favar/rng.hpp"
#include "favar/volatility.hpp"

namespace favar {

GaussianPosterior weighted_regression_posterior(const MatrixXd& Z,
                                                const VectorXd& x,
                                                const VectorXd& weights,
                                                const VectorXd& prior_mean,
                                                const VectorXd& prior_var) {
  const int k = static_cast<int>(Z.cols());
  MatrixXd precision = MatrixXd::Zero(k, k);
  VectorXd rhs = VectorXd::Zero(k);
  for (int i = 0; i < k; ++i) {
    precision(i, i) = 1.0 / prior_var(i);
    rhs(i) = prior_mean(i) / prior_var(i);
  }
  precision.noalias() += Z.transpose() * weights.asDiagonal() * Z;
  rhs.noalias() += Z.transpose() * (weights.asDiagonal() * x);

  Eigen::LLT<MatrixXd> llt(0.5 * (precision + precision.transpose()));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularPosterior,
                "regression posterior precision not positive definite");
  GaussianPosterior post;
  post.mean = llt.solve(rhs);
  post.covariance = llt.solve(MatrixXd::Identity(k, k));
  return post;
}

namespace {

VectorXd draw_from_posterior(std::mt19937_64& rng,
                             const GaussianPosterior& post) {
  return draw_mvn(rng, post.mean, post.covariance);
}

}  // namespace

void sample_loadings(McmcState& state, const ModelSpec& spec,
                     const DataSet& data, const PriorConfig& priors,
                     std::mt19937_64& rng) {
  const GPath path(state, data);
  const int T = data.T();
  const int P = spec.factor_lag_order;
  const int nz = spec.n_z();
  const int n_factor_terms = P + 1;
  const int n_z_terms = spec.include_country_channels ? (P + 1) * nz : 0;
  const int k = n_factor_terms + n_z_terms;

  VectorXd prior_mean(k), prior_var(k);
  for (int p = 0; p < n_factor_terms; ++p) {
    prior_mean(p) = priors.loading_mean;
    prior_var(p) = priors.loading_variance;
  }
  for (int j = 0; j < n_z_terms; ++j) {
    prior_mean(n_factor_terms + j) = priors.z_loading_mean;
    prior_var(n_factor_terms + j) = priors.z_loading_variance;
  }

  for (int block = 0; block < 2; ++block) {
    const MatrixXd& x = block == 0 ? data.x_out : data.x_inf;
    const MatrixXd& h = block == 0 ? state.h_out : state.h_inf;
    MatrixXd& lambda = block == 0 ? state.lambda_out : state.lambda_inf;
    MatrixXd& lambda_z = block == 0 ? state.lambda_z_out : state.lambda_z_inf;

    MatrixXd Z(T, k);
    for (int t = 0; t < T; ++t)
      Z.row(t) = factor_regressors(path, spec, block, t).transpose();

    for (int i = 0; i < x.cols(); ++i) {
      if (Pinned::loading_pinned(i)) continue;
      VectorXd weights(T);
      for (int t = 0; t < T; ++t) weights(t) = std::exp(-h(t, i));
      const GaussianPosterior post = weighted_regression_posterior(
          Z, x.col(i), weights, prior_mean, prior_var);
      const VectorXd draw = draw_from_posterior(rng, post);
      for (int p = 0; p < n_factor_terms; ++p) lambda(i, p) = draw(p);
      for (int j = 0; j < n_z_terms; ++j)
        lambda_z(i, j) = draw(n_factor_terms + j);
    }
  }
}

}  // namespace favar
