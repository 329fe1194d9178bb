#include "favar/gibbs.hpp"

#include <cmath>

#include "favar/init.hpp"
#include "favar/loadings.hpp"
#include "favar/model.hpp"
#include "favar/rng.hpp"
#include "favar/state_space.hpp"
#include "favar/validate.hpp"
#include "favar/var.hpp"
#include "favar/volatility.hpp"

namespace favar {

GibbsSampler::GibbsSampler(const ModelSpec& spec, const DataSet& data,
                           const PriorConfig& priors, std::uint64_t seed)
    : spec_(spec), data_(data), priors_(priors), seed_(seed),
      pattern_(build_pattern(spec, priors)) {
  require_valid(spec_, data_, priors_);
  state_ = initialize_state(spec_, data_, priors_, seed_);
}

void GibbsSampler::sweep(int sweep_index) {
  const RngStream stream = RngStream(seed_).sub(0x5eed, sweep_index);
  const int T = data_.T();
  const GPath path(state_, data_);

  // Step 1: factor loadings
  {
    auto rng = stream.sub(1).engine();
    sample_loadings(state_, spec_, data_, priors_, rng);
  }

  // Steps 2-4 per series: volatilities, initial conditions, horseshoe
  {
    auto rng2 = stream.sub(2).engine();
    auto rng3 = stream.sub(3).engine();
    auto rng4 = stream.sub(4).engine();
    for (int block = 0; block < 2; ++block) {
      const MatrixXd& x = block == 0 ? data_.x_out : data_.x_inf;
      const MatrixXd fit = factor_fit(
          path, spec_, block,
          block == 0 ? state_.lambda_out : state_.lambda_inf,
          block == 0 ? state_.lambda_z_out : state_.lambda_z_inf, T);
      MatrixXd& h = block == 0 ? state_.h_out : state_.h_inf;
      VectorXd& h0 = block == 0 ? state_.h0_out : state_.h0_inf;
      MatrixXd& lam = block == 0 ? state_.lam_h_out : state_.lam_h_inf;
      MatrixXd& nu_lam = block == 0 ? state_.nu_lam_out : state_.nu_lam_inf;
      VectorXd& tau = block == 0 ? state_.tau_h_out : state_.tau_h_inf;
      VectorXd& nu_tau = block == 0 ? state_.nu_tau_out : state_.nu_tau_inf;

      for (int i = 0; i < x.cols(); ++i) {
        VectorXd walk_var(T);
        for (int t = 0; t < T; ++t)
          walk_var(t) = std::max(tau(i) * lam(t, i), 1e-300);
        const VectorXd resid = x.col(i) - fit.col(i);
        h.col(i) = sample_volatility_path(rng2, resid, h.col(i), h0(i),
                                          walk_var, MixtureTable::ksc7());
        h0(i) = sample_sv_initial(rng3, h(0, i), walk_var(0),
                                  priors_.sv_initial_variance);
        VectorXd lam_i = lam.col(i), nu_lam_i = nu_lam.col(i);
        double tau_i = tau(i), nu_tau_i = nu_tau(i);
        sample_horseshoe(rng4, h.col(i), h0(i), lam_i, nu_lam_i, tau_i,
                         nu_tau_i);
        lam.col(i) = lam_i;
        nu_lam.col(i) = nu_lam_i;
        tau(i) = tau_i;
        nu_tau(i) = nu_tau_i;
      }
    }
  }

  // Step 5: VAR coefficients
  {
    auto rng = stream.sub(5).engine();
    sample_var_coefficients(state_, spec_, data_, priors_, rng);
  }

  // Step 6: impact matrix with zero and sign restrictions
  {
    auto rng = stream.sub(6).engine();
    const MatrixXd U = var_residuals(state_, spec_, data_);
    const MatrixXd previous_B = state_.B;
    sample_impact_matrix(state_, spec_, priors_, pattern_, U, rng, diag_);
    // reject numerically degenerate draws
    const double det = state_.B.determinant();
    if (!std::isfinite(det) || det == 0.0) state_.B = previous_B;
  }

  // Step 7: Minnesota shrinkage scalars
  if (priors_.fixed_kappa1 <= 0.0 || priors_.fixed_kappa2 <= 0.0) {
    auto rng = stream.sub(7).engine();
    const auto [k1, k2] = sample_shrinkage(state_, spec_, priors_, rng);
    state_.kappa1 = k1;
    state_.kappa2 = k2;
  }

  // Step 8: factor paths
  {
    auto rng = stream.sub(8).engine();
    sample_factors(state_, spec_, data_, priors_, rng);
  }
}

PosteriorDraws GibbsSampler::run(const std::function<void(int, int)>& progress) {
  PosteriorDraws draws;
  draws.seed = seed_;
  const McmcSettings& mc = spec_.mcmc;
  draws.states.reserve(mc.retained());
  for (int s = 0; s < mc.total_iterations; ++s) {
    sweep(s);
    if (s >= mc.burn_in && (s - mc.burn_in) % mc.thinning == 0) {
      draws.states.push_back(state_);
      draws.draw_indices.push_back(s);
    }
    if (progress && (s + 1) % 500 == 0) progress(s + 1, mc.total_iterations);
  }
  return draws;
}

}  // namespace favar
