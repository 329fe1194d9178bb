#pragma once

#include "favar/types.hpp"

namespace favar {

// Access to g_t = (f_t', z_t')' for t down to -(q-1); negative t reads the
// pre-sample rows drawn by the factor step.
class GPath {
 public:
  GPath(const McmcState& state, const DataSet& data)
      : state_(state), data_(data) {}

  int r() const { return 2 + static_cast<int>(data_.z.cols()); }

  double factor(int block, int t) const {  // block 0 = OUT, 1 = INF
    if (t >= 0) return state_.factors(t, block);
    return state_.presample(-t - 1, block);
  }
  double z(int j, int t) const {
    if (t >= 0) return data_.z(t, j);
    return state_.presample(-t - 1, 2 + j);
  }
  VectorXd g(int t) const {
    if (t < 0) return state_.presample.row(-t - 1).transpose();
    VectorXd out(r());
    out(0) = state_.factors(t, 0);
    out(1) = state_.factors(t, 1);
    out.tail(r() - 2) = data_.z.row(t).transpose();
    return out;
  }

 private:
  const McmcState& state_;
  const DataSet& data_;
};

// Factor-equation regressor row for series i of a block at time t:
// (f_{t}, .., f_{t-P}[, z_t, .., z_{t-P}]). Size (P+1)*(1 + channels*nz).
VectorXd factor_regressors(const GPath& path, const ModelSpec& spec, int block,
                           int t);

// y_t = (g_t', m_t')' stacked over the sample: T x n
MatrixXd stack_y(const McmcState& state, const DataSet& data);
// VAR regressor matrix with rows (1, g_{t-1}', ..., g_{t-L}'): T x (1 + r L)
MatrixXd stack_x(const GPath& path, const ModelSpec& spec, int T);

// reduced-form innovations U = Y - X A (instrument columns pass through)
MatrixXd var_residuals(const McmcState& state, const ModelSpec& spec,
                       const DataSet& data);

// factor-equation fit and residuals for one block (x T x (N+1))
MatrixXd factor_fit(const GPath& path, const ModelSpec& spec, int block,
                    const MatrixXd& lambda, const MatrixXd& lambda_z, int T);

// complete-data log likelihood given the state (x part + VAR innovation part)
double log_likelihood(const McmcState& state, const ModelSpec& spec,
                      const DataSet& data);

}  // namespace favar
