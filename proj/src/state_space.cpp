#include "favar/state_space.hpp"

#include <cmath>

#include <Eigen/Cholesky>

#include "favar/rng.hpp"

namespace favar {

StateSpaceSystem build_state_space(const ModelSpec& spec,
                                   const McmcState& state) {
  const int r = spec.n_endogenous();
  const int q = spec.companion_blocks();
  const int dim = r * q;
  const int N1 = spec.n_series_per_block();
  const int nz = spec.n_z();
  const int n_obs = 2 * N1 + nz;
  const int P = spec.factor_lag_order;
  const int L = spec.var_lag_order;

  StateSpaceSystem sys;
  sys.r = r;
  sys.blocks = q;
  sys.H = MatrixXd::Zero(n_obs, dim);
  sys.c = VectorXd::Zero(dim);
  sys.F = MatrixXd::Zero(dim, dim);
  sys.Q_top = state.B.topLeftCorner(r, r) *
              state.B.topLeftCorner(r, r).transpose();

  for (int block = 0; block < 2; ++block) {
    const MatrixXd& lambda = block == 0 ? state.lambda_out : state.lambda_inf;
    const MatrixXd& lambda_z =
        block == 0 ? state.lambda_z_out : state.lambda_z_inf;
    for (int i = 0; i < N1; ++i) {
      const int row = block * N1 + i;
      for (int p = 0; p <= P; ++p) {
        sys.H(row, p * r + block) = lambda(i, p);
        if (spec.include_country_channels)
          for (int j = 0; j < nz; ++j)
            sys.H(row, p * r + 2 + j) = lambda_z(i, p * nz + j);
      }
    }
  }
  for (int j = 0; j < nz; ++j) sys.H(2 * N1 + j, 2 + j) = 1.0;

  for (int i = 0; i < r; ++i) {
    sys.c(i) = state.A(0, i);
    for (int l = 1; l <= L; ++l)
      for (int j = 0; j < r; ++j)
        sys.F(i, (l - 1) * r + j) = state.A(1 + (l - 1) * r + j, i);
  }
  for (int b = 1; b < q; ++b)
    for (int i = 0; i < r; ++i) sys.F(b * r + i, (b - 1) * r + i) = 1.0;
  return sys;
}

MatrixXd stack_observations(const DataSet& data) {
  const int T = data.T();
  const int N1 = static_cast<int>(data.x_out.cols());
  const int nz = static_cast<int>(data.z.cols());
  MatrixXd obs(T, 2 * N1 + nz);
  obs.leftCols(N1) = data.x_out;
  obs.middleCols(N1, N1) = data.x_inf;
  obs.rightCols(nz) = data.z;
  return obs;
}

MatrixXd observation_variances(const McmcState& state, const DataSet& data) {
  const int T = data.T();
  const int N1 = static_cast<int>(data.x_out.cols());
  const int nz = static_cast<int>(data.z.cols());
  MatrixXd R(T, 2 * N1 + nz);
  R.leftCols(N1) = state.h_out.array().exp();
  R.middleCols(N1, N1) = state.h_inf.array().exp();
  R.rightCols(nz).setZero();
  return R;
}

namespace {

void check_finite(const MatrixXd& m, const char* where) {
  if (!m.allFinite())
    throw Error(ErrorCode::FilterDivergence,
                std::string("non-finite covariance in ") + where);
}

MatrixXd embed_q(const StateSpaceSystem& sys) {
  MatrixXd Q = MatrixXd::Zero(sys.dim(), sys.dim());
  Q.topLeftCorner(sys.r, sys.r) = sys.Q_top;
  return Q;
}

}  // namespace

FilterResult kalman_filter(const StateSpaceSystem& sys, const MatrixXd& obs,
                           const MatrixXd& obs_var, const VectorXd& init_mean,
                           const MatrixXd& init_cov) {
  const int T = static_cast<int>(obs.rows());
  const int dim = sys.dim();
  const MatrixXd Q = embed_q(sys);

  FilterResult out;
  out.mean.resize(T, dim);
  out.cov.resize(T);

  VectorXd beta = init_mean;
  MatrixXd V = init_cov;
  for (int t = 0; t < T; ++t) {
    // predict
    beta = sys.c + sys.F * beta;
    V = sys.F * V * sys.F.transpose() + Q;
    V = 0.5 * (V + V.transpose()).eval();

    // update
    const MatrixXd HV = sys.H * V;
    MatrixXd S = HV * sys.H.transpose();
    S.diagonal() += obs_var.row(t).transpose();
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::LLT<MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
      S.diagonal().array() += 1e-10 * (1.0 + S.diagonal().maxCoeff());
      llt.compute(S);
      if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::FilterDivergence,
                    "innovation covariance not positive definite");
    }
    const VectorXd innov = obs.row(t).transpose() - sys.H * beta;
    const MatrixXd K = llt.solve(HV).transpose();  // dim x n_obs
    beta += K * innov;
    V -= K * HV;
    V = 0.5 * (V + V.transpose()).eval();
    check_finite(V, "kalman update");

    out.mean.row(t) = beta.transpose();
    out.cov[t] = V;
  }
  return out;
}

namespace {

// draw N(mean, cov) on a coordinate subset, leaving the rest at the mean
VectorXd draw_subset(std::mt19937_64& rng, const VectorXd& mean,
                     const MatrixXd& cov, const std::vector<int>& coords) {
  const int k = static_cast<int>(coords.size());
  VectorXd mu(k);
  MatrixXd C(k, k);
  for (int a = 0; a < k; ++a) {
    mu(a) = mean(coords[a]);
    for (int b = 0; b < k; ++b) C(a, b) = cov(coords[a], coords[b]);
  }
  VectorXd out = mean;
  const VectorXd draw = draw_mvn(rng, mu, C);
  for (int a = 0; a < k; ++a) out(coords[a]) = draw(a);
  return out;
}

}  // namespace

CarterKohnDraw carter_kohn_sample(const StateSpaceSystem& sys,
                                  const MatrixXd& obs, const MatrixXd& obs_var,
                                  const VectorXd& init_mean,
                                  const MatrixXd& init_cov,
                                  std::mt19937_64& rng,
                                  std::vector<int> draw_coords) {
  const FilterResult filt =
      kalman_filter(sys, obs, obs_var, init_mean, init_cov);
  const int T = static_cast<int>(obs.rows());
  const int r = sys.r;
  const int dim = sys.dim();
  const MatrixXd F_top = sys.F.topRows(r);
  const VectorXd c_top = sys.c.head(r);

  std::vector<int>& stoch_coords = draw_coords;
  if (stoch_coords.empty())
    for (int i = 0; i < r; ++i) stoch_coords.push_back(i);

  CarterKohnDraw out;
  out.g.resize(T, r);
  out.presample.resize(sys.blocks - 1, r);

  VectorXd mean = filt.mean.row(T - 1).transpose();
  MatrixXd cov = filt.cov[T - 1];
  VectorXd drawn = draw_subset(rng, mean, cov, stoch_coords);
  out.g.row(T - 1) = drawn.head(r).transpose();

  for (int t = T - 2; t >= 0; --t) {
    mean = filt.mean.row(t).transpose();
    cov = filt.cov[t];
    // condition on the drawn g_{t+1} through the stochastic transition rows
    MatrixXd S = F_top * cov * F_top.transpose() + sys.Q_top;
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::LLT<MatrixXd> llt(S);
    if (llt.info() != Eigen::Success) {
      S.diagonal().array() += 1e-10 * (1.0 + S.diagonal().maxCoeff());
      llt.compute(S);
      if (llt.info() != Eigen::Success)
        throw Error(ErrorCode::FilterDivergence,
                    "backward conditioning covariance not positive definite");
    }
    const VectorXd resid =
        out.g.row(t + 1).transpose() - c_top - F_top * mean;
    const MatrixXd K = llt.solve(F_top * cov).transpose();  // dim x r
    mean += K * resid;
    cov -= K * (F_top * cov);
    cov = 0.5 * (cov + cov.transpose()).eval();
    check_finite(cov, "backward pass");

    if (t > 0) {
      drawn = draw_subset(rng, mean, cov, stoch_coords);
      out.g.row(t) = drawn.head(r).transpose();
    } else {
      // full state at t = 0: factors plus every pre-sample lag block
      std::vector<int> coords = stoch_coords;
      for (int idx = r; idx < dim; ++idx) coords.push_back(idx);
      drawn = draw_subset(rng, mean, cov, coords);
      out.g.row(0) = drawn.head(r).transpose();
      for (int b = 1; b < sys.blocks; ++b)
        out.presample.row(b - 1) = drawn.segment(b * r, r).transpose();
    }
  }
  return out;
}

void sample_factors(McmcState& state, const ModelSpec& spec,
                    const DataSet& data, const PriorConfig& priors,
                    std::mt19937_64& rng) {
  const StateSpaceSystem sys = build_state_space(spec, state);
  const MatrixXd obs = stack_observations(data);
  const MatrixXd obs_var = observation_variances(state, data);
  const VectorXd init_mean = VectorXd::Zero(sys.dim());
  const MatrixXd init_cov =
      priors.state_init_variance * MatrixXd::Identity(sys.dim(), sys.dim());

  // z coordinates are exactly observed; only the factor entries are random
  const CarterKohnDraw draw =
      carter_kohn_sample(sys, obs, obs_var, init_mean, init_cov, rng, {0, 1});
  state.factors.col(0) = draw.g.col(0);
  state.factors.col(1) = draw.g.col(1);
  state.presample = draw.presample;
}

}  // namespace favar
