#include "favar/volatility.hpp"

#include <cmath>

#include "favar/rng.hpp"

namespace favar {

TridiagonalCholesky TridiagonalCholesky::factor(const Tridiagonal& K) {
  const int T = static_cast<int>(K.diag.size());
  TridiagonalCholesky chol;
  chol.l.resize(T);
  chol.m.resize(std::max(T - 1, 0));
  double prev_m = 0.0;
  for (int t = 0; t < T; ++t) {
    const double d = K.diag(t) - prev_m * prev_m;
    if (!(d > 0.0))
      throw Error(ErrorCode::SingularPosterior,
                  "tridiagonal precision not positive definite");
    chol.l(t) = std::sqrt(d);
    if (t + 1 < T) {
      chol.m(t) = K.off(t) / chol.l(t);
      prev_m = chol.m(t);
    }
  }
  return chol;
}

VectorXd TridiagonalCholesky::solve(const VectorXd& rhs) const {
  const int T = static_cast<int>(l.size());
  VectorXd y(T);
  y(0) = rhs(0) / l(0);
  for (int t = 1; t < T; ++t) y(t) = (rhs(t) - m(t - 1) * y(t - 1)) / l(t);
  VectorXd x(T);
  x(T - 1) = y(T - 1) / l(T - 1);
  for (int t = T - 2; t >= 0; --t) x(t) = (y(t) - m(t) * x(t + 1)) / l(t);
  return x;
}

VectorXd TridiagonalCholesky::solve_transposed(const VectorXd& z) const {
  const int T = static_cast<int>(l.size());
  VectorXd x(T);
  x(T - 1) = z(T - 1) / l(T - 1);
  for (int t = T - 2; t >= 0; --t) x(t) = (z(t) - m(t) * x(t + 1)) / l(t);
  return x;
}

VectorXd draw_random_walk_path(std::mt19937_64& rng, double h0,
                               const VectorXd& walk_var, const VectorXd& obs,
                               const VectorXd& obs_mean,
                               const VectorXd& obs_var) {
  const int T = static_cast<int>(obs.size());
  Tridiagonal K;
  K.diag.resize(T);
  K.off.resize(std::max(T - 1, 0));
  VectorXd d(T);
  for (int t = 0; t < T; ++t) {
    const double wv = 1.0 / walk_var(t);
    const double wv_next = t + 1 < T ? 1.0 / walk_var(t + 1) : 0.0;
    const double ov = 1.0 / obs_var(t);
    K.diag(t) = wv + wv_next + ov;
    if (t + 1 < T) K.off(t) = -wv_next;
    d(t) = ov * (obs(t) - obs_mean(t));
  }
  d(0) += h0 / walk_var(0);

  const TridiagonalCholesky chol = TridiagonalCholesky::factor(K);
  const VectorXd mean = chol.solve(d);
  const VectorXd z = draw_std_normal_vector(rng, T);
  VectorXd h = mean + chol.solve_transposed(z);
  for (int t = 0; t < T; ++t)
    h(t) = std::clamp(h(t), -kLogVolClamp, kLogVolClamp);
  return h;
}

VectorXd sample_volatility_path(std::mt19937_64& rng, const VectorXd& residuals,
                                const VectorXd& h_current, double h0,
                                const VectorXd& walk_var,
                                const MixtureTable& table) {
  const int T = static_cast<int>(residuals.size());
  VectorXd estar(T);
  for (int t = 0; t < T; ++t) estar(t) = log_square_plus_jitter(residuals(t));

  // mixture indicators s_t | estar_t, h_t
  VectorXd obs_mean(T), obs_var(T);
  VectorXd logw(MixtureTable::kComponents), w(MixtureTable::kComponents);
  for (int t = 0; t < T; ++t) {
    double max_lw = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < MixtureTable::kComponents; ++k) {
      const double mu = h_current(t) + table.component_mean(k);
      const double dv = estar(t) - mu;
      logw(k) = std::log(table.prob[k]) - 0.5 * std::log(table.var[k]) -
                0.5 * dv * dv / table.var[k];
      max_lw = std::max(max_lw, logw(k));
    }
    for (int k = 0; k < MixtureTable::kComponents; ++k)
      w(k) = std::exp(logw(k) - max_lw);
    const int s = draw_categorical(rng, w);
    obs_mean(t) = table.component_mean(s);
    obs_var(t) = table.var[s];
  }

  return draw_random_walk_path(rng, h0, walk_var, estar, obs_mean, obs_var);
}

double sample_sv_initial(std::mt19937_64& rng, double h1, double v_h1,
                         double prior_var) {
  const double precision = 1.0 / v_h1 + 1.0 / prior_var;
  const double mean = (h1 / v_h1) / precision;
  const double draw = mean + draw_normal(rng) / std::sqrt(precision);
  return std::clamp(draw, -kLogVolClamp, kLogVolClamp);
}

VectorXd sample_horseshoe(std::mt19937_64& rng, const VectorXd& h, double h0,
                          VectorXd& lam, VectorXd& nu_lam, double& tau,
                          double& nu_tau) {
  const int T = static_cast<int>(h.size());
  VectorXd dh(T);
  dh(0) = h(0) - h0;
  for (int t = 1; t < T; ++t) dh(t) = h(t) - h(t - 1);

  for (int t = 0; t < T; ++t) {
    nu_lam(t) = draw_inverse_gamma(rng, 1.0, 1.0 + 1.0 / lam(t));
    lam(t) = draw_inverse_gamma(
        rng, 1.0, 1.0 / nu_lam(t) + 0.5 * dh(t) * dh(t) / tau);
  }
  nu_tau = draw_inverse_gamma(rng, 1.0, 1.0 + 1.0 / tau);
  double scale = 1.0 / nu_tau;
  for (int t = 0; t < T; ++t) scale += 0.5 * dh(t) * dh(t) / lam(t);
  tau = draw_inverse_gamma(rng, 0.5 * (T + 1), scale);

  VectorXd walk_var(T);
  for (int t = 0; t < T; ++t)
    walk_var(t) = std::max(tau * lam(t), 1e-300);
  return walk_var;
}

}  // namespace favar
