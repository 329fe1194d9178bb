#include "favar/init.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "favar/validate.hpp"
#include "favar/var.hpp"

namespace favar {

VectorXd principal_component_factor(const MatrixXd& block) {
  const int T = static_cast<int>(block.rows());
  const int n = static_cast<int>(block.cols());
  MatrixXd X(T, n);
  for (int j = 0; j < n; ++j) {
    const double mean = block.col(j).mean();
    const double ss = (block.col(j).array() - mean).square().sum();
    if (!(ss > 0.0))
      throw Error(ErrorCode::DegenerateData,
                  "principal component: zero-variance series " +
                      std::to_string(j));
    X.col(j) = (block.col(j).array() - mean) / std::sqrt(ss / (T - 1));
  }
  const MatrixXd cov = X.transpose() * X / double(T - 1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  const VectorXd v = eig.eigenvectors().col(n - 1);
  VectorXd f = X * v;

  // sign: positive comovement with EA19; scale: EA19's OLS loading is 1
  const VectorXd ea = block.col(0).array() - block.col(0).mean();
  const double cov_fe = ea.dot(f) / double(T - 1);
  const double var_f = f.squaredNorm() / double(T - 1);
  const double slope = cov_fe / var_f;  // EA19 on f
  if (slope == 0.0)
    throw Error(ErrorCode::DegenerateData,
                "principal component orthogonal to the EA19 series");
  return f * slope;
}

McmcState initialize_state(const ModelSpec& spec, const DataSet& data,
                           const PriorConfig& priors, std::uint64_t seed) {
  (void)seed;  // recorded by the caller; initialization is deterministic
  const int T = data.T();
  const int N1 = spec.n_series_per_block();
  const int P = spec.factor_lag_order;
  const int nz = spec.n_z();
  const int r = spec.n_endogenous();
  const int n = spec.n_var();
  const int q = spec.companion_blocks();
  const int K = 1 + r * spec.var_lag_order;

  McmcState s;
  s.factors.resize(T, 2);
  s.factors.col(0) = principal_component_factor(data.x_out);
  s.factors.col(1) = principal_component_factor(data.x_inf);

  s.lambda_out = MatrixXd::Zero(N1, P + 1);
  s.lambda_inf = MatrixXd::Zero(N1, P + 1);
  s.lambda_z_out = MatrixXd::Zero(N1, nz * (P + 1));
  s.lambda_z_inf = MatrixXd::Zero(N1, nz * (P + 1));
  s.lambda_out(0, 0) = 1.0;
  s.lambda_inf(0, 0) = 1.0;

  s.h_out.resize(T, N1);
  s.h_inf.resize(T, N1);
  s.h0_out.resize(N1);
  s.h0_inf.resize(N1);
  for (int block = 0; block < 2; ++block) {
    const MatrixXd& x = block == 0 ? data.x_out : data.x_inf;
    const VectorXd f = s.factors.col(block);
    MatrixXd& lambda = block == 0 ? s.lambda_out : s.lambda_inf;
    MatrixXd& h = block == 0 ? s.h_out : s.h_inf;
    VectorXd& h0 = block == 0 ? s.h0_out : s.h0_inf;
    const double var_f = (f.array() - f.mean()).square().sum() / (T - 1);
    for (int i = 0; i < N1; ++i) {
      const double var_x =
          (x.col(i).array() - x.col(i).mean()).square().sum() / (T - 1);
      if (!(var_x > 0.0))
        throw Error(ErrorCode::DegenerateData,
                    "constant series in block " + std::to_string(block));
      if (i > 0) {
        const double cov_xf =
            (x.col(i).array() - x.col(i).mean()).matrix().dot(
                (f.array() - f.mean()).matrix()) /
            (T - 1);
        lambda(i, 0) = cov_xf / var_f;  // single-pass regression on the factor
      }
      h.col(i).setConstant(std::log(var_x) + 1.0);
      h0(i) = std::log(var_x) + 1.0;
    }
  }

  s.lam_h_out = MatrixXd::Ones(T, N1);
  s.lam_h_inf = MatrixXd::Ones(T, N1);
  s.nu_lam_out = MatrixXd::Ones(T, N1);
  s.nu_lam_inf = MatrixXd::Ones(T, N1);
  s.tau_h_out = VectorXd::Ones(N1);
  s.tau_h_inf = VectorXd::Ones(N1);
  s.nu_tau_out = VectorXd::Ones(N1);
  s.nu_tau_inf = VectorXd::Ones(N1);

  s.A = MatrixXd::Zero(K, n);
  s.B = MatrixXd::Identity(n, n);
  const ImpactPattern pattern = build_pattern(spec, priors);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Restriction tag = pattern.at(i, j);
      if (tag == Restriction::Zero) s.B(i, j) = 0.0;
      if (i != j && tag == Restriction::Positive) s.B(i, j) = 0.1;
      if (i != j && tag == Restriction::Negative) s.B(i, j) = -0.1;
      if (i == j && tag == Restriction::Negative) s.B(i, j) = -1.0;
    }

  s.presample = MatrixXd::Zero(q - 1, r);
  s.kappa1 = priors.fixed_kappa1 > 0.0 ? priors.fixed_kappa1 : 1.0;
  s.kappa2 = priors.fixed_kappa2 > 0.0 ? priors.fixed_kappa2 : 1.0;

  MatrixXd Y0(T, r);
  Y0.col(0) = s.factors.col(0);
  Y0.col(1) = s.factors.col(1);
  Y0.rightCols(nz) = data.z;
  s.sigma_scale = ar_residual_variances(Y0, spec.var_lag_order);
  for (int i = 0; i < r; ++i)
    s.sigma_scale(i) = std::max(s.sigma_scale(i), 1e-12);
  return s;
}

}  // namespace favar
