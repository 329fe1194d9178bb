#include "favar/var.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "favar/rng.hpp"

namespace favar {

VectorXd ar_residual_variances(const MatrixXd& Y, int L) {
  if (L < 1)
    throw Error(ErrorCode::InvalidMcmcSettings, "AR scale fit needs L >= 1");
  const int T = static_cast<int>(Y.rows());
  if (T <= L + 2)
    throw Error(ErrorCode::SeriesTooShort,
                "AR(" + std::to_string(L) + ") scale fit needs T > L + 2");
  const int n = T - L;
  VectorXd out(Y.cols());
  for (int i = 0; i < Y.cols(); ++i) {
    MatrixXd X(n, L + 1);
    X.col(0).setOnes();
    for (int l = 1; l <= L; ++l) X.col(l) = Y.col(i).segment(L - l, n);
    const VectorXd y = Y.col(i).segment(L, n);
    const VectorXd coef =
        (X.transpose() * X).ldlt().solve(X.transpose() * y);
    const double rss = (y - X * coef).squaredNorm();
    out(i) = rss / std::max(n - L - 1, 1);
  }
  return out;
}

EquationPrior minnesota_prior(const ModelSpec& spec, const PriorConfig& priors,
                              int equation, double kappa1, double kappa2,
                              const VectorXd& sigma2) {
  const int r = spec.n_endogenous();
  const int L = spec.var_lag_order;
  EquationPrior prior;
  prior.mean.resize(1 + r * L);
  prior.variance.resize(1 + r * L);
  prior.mean(0) = 0.0;
  prior.variance(0) = priors.constant_variance;
  for (int l = 1; l <= L; ++l)
    for (int j = 0; j < r; ++j) {
      const int idx = 1 + (l - 1) * r + j;
      prior.mean(idx) = PriorConfig::minnesota_mean(equation, j, l);
      prior.variance(idx) =
          priors.minnesota_variance(equation, j, l, kappa1, kappa2, sigma2);
    }
  return prior;
}

GaussianPosterior var_equation_posterior(int equation, const MatrixXd& Y,
                                         const MatrixXd& X, const MatrixXd& A,
                                         const MatrixXd& B,
                                         const EquationPrior& prior) {
  const int K = static_cast<int>(X.cols());
  Eigen::PartialPivLU<MatrixXd> blu(B);
  const MatrixXd Binv = blu.inverse();
  const VectorXd bcol = Binv.col(equation);

  MatrixXd A0 = A;
  A0.col(equation).setZero();
  const MatrixXd M = (Y - X * A0) * Binv.transpose();

  MatrixXd precision = (bcol.squaredNorm()) * (X.transpose() * X);
  VectorXd rhs = X.transpose() * (M * bcol);
  for (int i = 0; i < K; ++i) {
    precision(i, i) += 1.0 / prior.variance(i);
    rhs(i) += prior.mean(i) / prior.variance(i);
  }
  Eigen::LLT<MatrixXd> llt(0.5 * (precision + precision.transpose()));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularPosterior,
                "VAR equation posterior precision not positive definite");
  GaussianPosterior post;
  post.mean = llt.solve(rhs);
  post.covariance = llt.solve(MatrixXd::Identity(K, K));
  return post;
}

void sample_var_coefficients(McmcState& state, const ModelSpec& spec,
                             const DataSet& data, const PriorConfig& priors,
                             std::mt19937_64& rng) {
  const GPath path(state, data);
  const MatrixXd Y = stack_y(state, data);
  const MatrixXd X = stack_x(path, spec, data.T());
  const int r = spec.n_endogenous();

  for (int i = 0; i < r; ++i) {
    const EquationPrior prior = minnesota_prior(
        spec, priors, i, state.kappa1, state.kappa2, state.sigma_scale);
    const GaussianPosterior post =
        var_equation_posterior(i, Y, X, state.A, state.B, prior);
    state.A.col(i) = draw_mvn(rng, post.mean, post.covariance);
  }
  // instrument equations carry no dynamics
  state.A.rightCols(spec.instrument_count).setZero();
}

ShrinkageKernel shrinkage_kernel(const MatrixXd& A, const VectorXd& sigma2,
                                 double kappa1, double kappa2,
                                 const ModelSpec& spec) {
  const int r = spec.n_endogenous();
  const int L = spec.var_lag_order;
  ShrinkageKernel k;
  k.shape1 = 0.5 * double(r) * r * L - 1.0;
  k.shape2 = 0.5 * double(r) * (r - 1) * L - 1.0;
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < r; ++j)
      for (int l = 1; l <= L; ++l) {
        const double dev =
            A(1 + (l - 1) * r + j, i) - PriorConfig::minnesota_mean(i, j, l);
        const double l2 = double(l) * l;
        const double ratio = sigma2(j) / sigma2(i);
        if (i == j) {
          k.scale1 += 0.5 * l2 * dev * dev;
        } else {
          k.scale1 += 0.5 * ratio * l2 * dev * dev / kappa2;
          k.scale2 += 0.5 * ratio * l2 * dev * dev / kappa1;
        }
      }
  return k;
}

std::pair<double, double> sample_shrinkage(const McmcState& state,
                                           const ModelSpec& spec,
                                           const PriorConfig& priors,
                                           std::mt19937_64& rng) {
  const ShrinkageKernel k = shrinkage_kernel(state.A, state.sigma_scale,
                                             state.kappa1, state.kappa2, spec);
  if (k.shape1 <= 0.0 || k.shape2 <= 0.0)
    throw Error(ErrorCode::NonPositiveShape,
                "shrinkage shapes require r^2 L / 2 > 1");
  const double kappa1 = draw_inverse_gamma_truncated(rng, k.shape1, k.scale1,
                                                     priors.kappa_max);
  // kappa2's kernel conditions on the freshly drawn kappa1
  const ShrinkageKernel k2 = shrinkage_kernel(state.A, state.sigma_scale,
                                              kappa1, state.kappa2, spec);
  const double kappa2 = draw_inverse_gamma_truncated(rng, k2.shape2, k2.scale2,
                                                     priors.kappa_max);
  return {kappa1, kappa2};
}

}  // namespace favar
