#include "favar/model.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace favar {

VectorXd factor_regressors(const GPath& path, const ModelSpec& spec, int block,
                           int t) {
  const int P = spec.factor_lag_order;
  const int nz = spec.n_z();
  const int k = (P + 1) * (spec.include_country_channels ? 1 + nz : 1);
  VectorXd out(k);
  for (int p = 0; p <= P; ++p) out(p) = path.factor(block, t - p);
  if (spec.include_country_channels) {
    int idx = P + 1;
    for (int p = 0; p <= P; ++p)
      for (int j = 0; j < nz; ++j) out(idx++) = path.z(j, t - p);
  }
  return out;
}

MatrixXd stack_y(const McmcState& state, const DataSet& data) {
  const int T = data.T();
  const int r = 2 + static_cast<int>(data.z.cols());
  const int k = static_cast<int>(data.m.cols());
  MatrixXd Y(T, r + k);
  Y.col(0) = state.factors.col(0);
  Y.col(1) = state.factors.col(1);
  Y.middleCols(2, r - 2) = data.z;
  Y.rightCols(k) = data.m;
  return Y;
}

MatrixXd stack_x(const GPath& path, const ModelSpec& spec, int T) {
  const int r = spec.n_endogenous();
  const int L = spec.var_lag_order;
  MatrixXd X(T, 1 + r * L);
  X.col(0).setOnes();
  for (int t = 0; t < T; ++t)
    for (int l = 1; l <= L; ++l)
      X.row(t).segment(1 + (l - 1) * r, r) = path.g(t - l).transpose();
  return X;
}

MatrixXd var_residuals(const McmcState& state, const ModelSpec& spec,
                       const DataSet& data) {
  const GPath path(state, data);
  const MatrixXd Y = stack_y(state, data);
  const MatrixXd X = stack_x(path, spec, data.T());
  return Y - X * state.A;
}

MatrixXd factor_fit(const GPath& path, const ModelSpec& spec, int block,
                    const MatrixXd& lambda, const MatrixXd& lambda_z, int T) {
  const int n_series = static_cast<int>(lambda.rows());
  const int P = spec.factor_lag_order;
  const int nz = spec.n_z();
  MatrixXd fit(T, n_series);
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < n_series; ++i) {
      double v = 0.0;
      for (int p = 0; p <= P; ++p) v += lambda(i, p) * path.factor(block, t - p);
      if (spec.include_country_channels)
        for (int p = 0; p <= P; ++p)
          for (int j = 0; j < nz; ++j)
            v += lambda_z(i, p * nz + j) * path.z(j, t - p);
      fit(t, i) = v;
    }
  }
  return fit;
}

double log_likelihood(const McmcState& state, const ModelSpec& spec,
                      const DataSet& data) {
  constexpr double kLog2Pi = 1.8378770664093453;
  const GPath path(state, data);
  const int T = data.T();
  double ll = 0.0;

  for (int block = 0; block < 2; ++block) {
    const MatrixXd& x = block == 0 ? data.x_out : data.x_inf;
    const MatrixXd& h = block == 0 ? state.h_out : state.h_inf;
    const MatrixXd fit = factor_fit(
        path, spec, block, block == 0 ? state.lambda_out : state.lambda_inf,
        block == 0 ? state.lambda_z_out : state.lambda_z_inf, T);
    for (int i = 0; i < x.cols(); ++i)
      for (int t = 0; t < T; ++t) {
        const double e = x(t, i) - fit(t, i);
        ll += -0.5 * (kLog2Pi + h(t, i) + e * e * std::exp(-h(t, i)));
      }
  }

  const MatrixXd U = var_residuals(state, spec, data);
  const int n = spec.n_var();
  Eigen::PartialPivLU<MatrixXd> lu(state.B);
  const double logdet = std::log(std::abs(lu.determinant()));
  for (int t = 0; t < T; ++t) {
    const VectorXd eps = lu.solve(U.row(t).transpose());
    ll += -0.5 * (n * kLog2Pi + eps.squaredNorm()) - logdet;
  }
  return ll;
}

}  // namespace favar
