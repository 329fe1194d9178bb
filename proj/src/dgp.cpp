#include "favar/dgp.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "favar/model.hpp"
#include "favar/rng.hpp"
#include "favar/volatility.hpp"

namespace favar {

double companion_spectral_radius(const MatrixXd& A, const ModelSpec& spec) {
  const int r = spec.n_endogenous();
  const int L = spec.var_lag_order;
  MatrixXd F = MatrixXd::Zero(r * L, r * L);
  for (int i = 0; i < r; ++i)
    for (int l = 1; l <= L; ++l)
      for (int j = 0; j < r; ++j)
        F(i, (l - 1) * r + j) = A(1 + (l - 1) * r + j, i);
  for (int b = 1; b < L; ++b)
    for (int i = 0; i < r; ++i) F(b * r + i, (b - 1) * r + i) = 1.0;
  return F.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// random-walk path from h0 with variances walk_var, clamped like the samplers
VectorXd walk_path(std::mt19937_64& rng, double h0, const VectorXd& walk_var) {
  const int T = static_cast<int>(walk_var.size());
  VectorXd h(T);
  double prev = h0;
  for (int t = 0; t < T; ++t) {
    prev += std::sqrt(std::max(walk_var(t), 0.0)) * draw_normal(rng);
    prev = std::clamp(prev, -kLogVolClamp, kLogVolClamp);
    h(t) = prev;
  }
  return h;
}

}  // namespace

DgpTruth simulate_dgp(const ModelSpec& spec, const McmcState& true_params,
                      int T, std::uint64_t seed, const PriorConfig& priors,
                      Month start) {
  const int r = spec.n_endogenous();
  const int n = spec.n_var();
  const int q = spec.companion_blocks();
  const int N1 = spec.n_series_per_block();
  const int nz = spec.n_z();
  const int L = spec.var_lag_order;
  const int P = spec.factor_lag_order;

  if (companion_spectral_radius(true_params.A, spec) >= 1.0)
    throw Error(ErrorCode::ExplosiveVar,
                "companion matrix has spectral radius >= 1");

  const RngStream root(seed);
  auto rng_pre = root.sub(1).engine();
  auto rng_var = root.sub(2).engine();
  auto rng_sv = root.sub(3).engine();
  auto rng_x = root.sub(4).engine();

  DgpTruth out;
  out.presample.resize(q - 1, r);
  for (int b = 0; b < q - 1; ++b)
    out.presample.row(b) =
        (std::sqrt(priors.state_init_variance) *
         draw_std_normal_vector(rng_pre, r))
            .transpose();

  // g recursion; lag access spans the pre-sample block
  MatrixXd g(T, r);
  out.shocks.resize(T, n);
  MatrixXd m(T, spec.instrument_count);
  const auto g_at = [&](int t) -> VectorXd {
    if (t >= 0) return g.row(t).transpose();
    return out.presample.row(-t - 1).transpose();
  };
  for (int t = 0; t < T; ++t) {
    const VectorXd eps = draw_std_normal_vector(rng_var, n);
    out.shocks.row(t) = eps.transpose();
    VectorXd y = VectorXd::Zero(n);
    // deterministic part: constants and lags (instrument rows have none)
    for (int i = 0; i < n; ++i) y(i) = true_params.A(0, i);
    for (int l = 1; l <= L; ++l) {
      const VectorXd gl = g_at(t - l);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < r; ++j)
          y(i) += true_params.A(1 + (l - 1) * r + j, i) * gl(j);
    }
    y += true_params.B * eps;
    g.row(t) = y.head(r).transpose();
    m.row(t) = y.tail(spec.instrument_count).transpose();
  }

  // volatility walks and factor-equation observations
  out.h_out.resize(T, N1);
  out.h_inf.resize(T, N1);
  for (int i = 0; i < N1; ++i) {
    VectorXd v_out(T), v_inf(T);
    for (int t = 0; t < T; ++t) {
      v_out(t) = true_params.tau_h_out(i) * true_params.lam_h_out(t, i);
      v_inf(t) = true_params.tau_h_inf(i) * true_params.lam_h_inf(t, i);
    }
    out.h_out.col(i) = walk_path(rng_sv, true_params.h0_out(i), v_out);
    out.h_inf.col(i) = walk_path(rng_sv, true_params.h0_inf(i), v_inf);
  }

  out.factors = g.leftCols(2);

  DataSet data;
  data.dates = month_range(start, T);
  data.z = g.rightCols(nz);
  data.z_mean = VectorXd::Zero(nz);
  data.z_stdev = VectorXd::Ones(nz);  // simulated z stays on model scale
  data.m = m;
  for (int j = 0; j < nz; ++j)
    data.z_names.push_back(j < static_cast<int>(spec.var_names_z.size())
                               ? spec.var_names_z[j]
                               : "z" + std::to_string(j));
  data.country_names.push_back("EA19");
  for (int i = 1; i < N1; ++i)
    data.country_names.push_back("C" + std::to_string(i));

  data.x_out.resize(T, N1);
  data.x_inf.resize(T, N1);
  // a temporary state so the shared factor-fit path sees the true latents
  McmcState tmp = true_params;
  tmp.factors = out.factors;
  tmp.presample = out.presample;
  {
    DataSet probe = data;  // z/presample access only
    const GPath path(tmp, probe);
    for (int block = 0; block < 2; ++block) {
      const MatrixXd& lambda =
          block == 0 ? true_params.lambda_out : true_params.lambda_inf;
      const MatrixXd& lambda_z =
          block == 0 ? true_params.lambda_z_out : true_params.lambda_z_inf;
      const MatrixXd& h = block == 0 ? out.h_out : out.h_inf;
      MatrixXd& x = block == 0 ? data.x_out : data.x_inf;
      for (int t = 0; t < T; ++t)
        for (int i = 0; i < N1; ++i) {
          double fit = 0.0;
          for (int p = 0; p <= P; ++p)
            fit += lambda(i, p) * path.factor(block, t - p);
          if (spec.include_country_channels)
            for (int p = 0; p <= P; ++p)
              for (int j = 0; j < nz; ++j)
                fit += lambda_z(i, p * nz + j) * path.z(j, t - p);
          x(t, i) = fit + std::exp(0.5 * h(t, i)) * draw_normal(rng_x);
        }
    }
  }
  out.data = std::move(data);
  return out;
}

McmcState default_true_params(const ModelSpec& spec, int T,
                              const TrueParamKnobs& knobs) {
  const int N1 = spec.n_series_per_block();
  const int P1 = spec.factor_lag_order + 1;
  const int nz = spec.n_z();
  const int r = spec.n_endogenous();
  const int n = spec.n_var();
  const int q = spec.companion_blocks();
  const int K = 1 + r * spec.var_lag_order;
  const double h_level = 2.0 * std::log(knobs.noise_scale);

  McmcState s;
  s.lambda_out = MatrixXd::Zero(N1, P1);
  s.lambda_inf = MatrixXd::Zero(N1, P1);
  s.lambda_out(0, 0) = 1.0;
  s.lambda_inf(0, 0) = 1.0;
  for (int i = 1; i < N1; ++i) {
    s.lambda_out(i, 0) = 0.7 + 0.25 * i;
    s.lambda_inf(i, 0) = 1.3 - 0.2 * i;
  }
  s.lambda_z_out = MatrixXd::Zero(N1, nz * P1);
  s.lambda_z_inf = MatrixXd::Zero(N1, nz * P1);
  if (spec.include_country_channels)
    for (int i = 1; i < N1; ++i)
      for (int j = 0; j < nz; ++j) {
        s.lambda_z_out(i, j) = 0.3 * ((i + j) % 3 - 1);
        s.lambda_z_inf(i, j) = 0.2 * ((i + 2 * j) % 3 - 1);
      }
  s.h_out = MatrixXd::Constant(T, N1, h_level);
  s.h_inf = MatrixXd::Constant(T, N1, h_level);
  s.h0_out = VectorXd::Constant(N1, h_level);
  s.h0_inf = VectorXd::Constant(N1, h_level);
  s.lam_h_out = MatrixXd::Constant(T, N1, 1.0);
  s.lam_h_inf = MatrixXd::Constant(T, N1, 1.0);
  s.nu_lam_out = MatrixXd::Ones(T, N1);
  s.nu_lam_inf = MatrixXd::Ones(T, N1);
  s.tau_h_out = VectorXd::Constant(N1, knobs.sv_walk_variance);
  s.tau_h_inf = VectorXd::Constant(N1, knobs.sv_walk_variance);
  s.nu_tau_out = VectorXd::Ones(N1);
  s.nu_tau_inf = VectorXd::Ones(N1);
  s.factors = MatrixXd::Zero(T, 2);
  s.presample = MatrixXd::Zero(q - 1, r);
  s.A = MatrixXd::Zero(K, n);
  for (int i = 0; i < r; ++i) s.A(1 + i, i) = knobs.own_lag;
  s.B = MatrixXd::Identity(n, n);
  for (const SignRestriction& sr : spec.sign_restrictions) {
    if (sr.variable >= r) continue;
    if (sr.variable == 0) s.B(0, 0) = sr.sign > 0 ? 1.0 : -1.0;
    else s.B(sr.variable, 0) = sr.sign > 0 ? 0.4 : -0.4;
  }
  // mild cross-impact so the shock moves the whole block
  for (int i = 1; i < r; ++i)
    if (s.B(i, 0) == 0.0) s.B(i, 0) = 0.15;
  s.B(n - 1, 0) = knobs.phi01;
  s.B(n - 1, n - 1) = knobs.phi02;
  s.kappa1 = 0.2;
  s.kappa2 = 0.5;
  s.sigma_scale = VectorXd::Ones(r);
  return s;
}

}  // namespace favar
