#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "favar/csv.hpp"
#include "favar/dgp.hpp"
#include "favar/draws_io.hpp"
#include "favar/init.hpp"
#include "favar/model.hpp"
#include "favar/rng.hpp"
#include "favar/validate.hpp"
#include "support/oracles.hpp"

using namespace favar;
using favar::test::make_toy_spec;
using favar::test::make_toy_state;

namespace {

DgpTruth toy_dgp(const ModelSpec& spec, int T, std::uint64_t seed) {
  return simulate_dgp(spec, make_toy_state(spec, T), T, seed);
}

}  // namespace

TEST_CASE("validate: well-formed baseline bundle passes") {
  const ModelSpec spec = make_toy_spec(2, 2, 2);
  const DgpTruth truth = toy_dgp(spec, 60, 1);
  CHECK(validate_spec(spec, truth.data, PriorConfig{}).empty());
}

TEST_CASE("validate: boundary and contradiction cases") {
  ModelSpec spec = make_toy_spec(2, 2, 2);
  const DgpTruth truth = toy_dgp(spec, 60, 2);
  PriorConfig priors;

  SUBCASE("burn_in equal to total iterations") {
    spec.mcmc.burn_in = spec.mcmc.total_iterations;
    const auto v = validate_spec(spec, truth.data, priors);
    REQUIRE(!v.empty());
    CHECK(v.front().code == ErrorCode::InvalidMcmcSettings);
  }
  SUBCASE("sign tag on a structural zero") {
    priors.extra_impact_tags.push_back(
        {0, spec.n_var() - 1, Restriction::Positive});
    bool found = false;
    for (const auto& violation : validate_spec(spec, truth.data, priors))
      if (violation.code == ErrorCode::InvalidRestriction) found = true;
    CHECK(found);
  }
  SUBCASE("sign restriction outside the system") {
    spec.sign_restrictions.push_back({99, +1});
    bool found = false;
    for (const auto& violation : validate_spec(spec, truth.data, priors))
      if (violation.code == ErrorCode::InvalidRestriction) found = true;
    CHECK(found);
  }
  SUBCASE("thinning below one") {
    spec.mcmc.thinning = 0;
    CHECK_THROWS_AS(require_valid(spec, truth.data, priors), Error);
  }
  SUBCASE("policy rate outside z") {
    spec.policy_rate_index = 5;
    CHECK_THROWS_AS(require_valid(spec, truth.data, priors), Error);
  }
}

TEST_CASE("pattern: structural zeros and anchors") {
  const ModelSpec spec = make_toy_spec(1, 2, 1);
  const ImpactPattern p(spec);
  const int n = spec.n_var();
  const int r = spec.n_endogenous();
  for (int i = 0; i < r; ++i)
    for (int j = r; j < n; ++j) CHECK(p.at(i, j) == Restriction::Zero);
  CHECK(p.at(n - 1, 0) == Restriction::Unrestricted);
  for (int j = 1; j < r; ++j) CHECK(p.at(n - 1, j) == Restriction::Zero);
  CHECK(p.at(n - 1, n - 1) == Restriction::Unrestricted);
  CHECK(p.at(2, 0) == Restriction::Positive);
  CHECK(p.at(1, 0) == Restriction::Negative);
}

TEST_CASE("initialize: h from log variance plus one, pins, determinism") {
  const ModelSpec spec = make_toy_spec(2, 2, 2);
  const DgpTruth truth = toy_dgp(spec, 80, 3);
  const PriorConfig priors;
  const McmcState a = initialize_state(spec, truth.data, priors, 42);
  const McmcState b = initialize_state(spec, truth.data, priors, 42);

  // bit-identical across runs
  CHECK((a.factors - b.factors).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.h_out - b.h_out).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.B - b.B).cwiseAbs().maxCoeff() == 0.0);

  // exact h initialization
  for (int i = 0; i < spec.n_series_per_block(); ++i) {
    const auto col = truth.data.x_out.col(i);
    const double var = (col.array() - col.mean()).square().sum() / (col.size() - 1);
    CHECK(a.h_out(0, i) == doctest::Approx(std::log(var) + 1.0).epsilon(1e-12));
    CHECK(a.h0_out(i) == doctest::Approx(std::log(var) + 1.0).epsilon(1e-12));
  }

  // pinned entries
  CHECK(a.lambda_out(0, 0) == 1.0);
  CHECK(a.lambda_inf(0, 0) == 1.0);
  CHECK(a.lambda_z_out.row(0).cwiseAbs().maxCoeff() == 0.0);

  // PCA factor correlates positively with the EA19 series
  const VectorXd f = a.factors.col(0);
  const VectorXd ea = truth.data.x_out.col(0);
  const double corr = ((f.array() - f.mean()) * (ea.array() - ea.mean())).sum();
  CHECK(corr > 0.0);

  // sign-restricted entries honored at initialization
  CHECK(a.B(2, 0) > 0.0);
  CHECK(a.B(1, 0) < 0.0);

  SUBCASE("constant series rejected") {
    DataSet bad = truth.data;
    bad.x_out.col(1).setConstant(3.0);
    CHECK_THROWS_AS(initialize_state(spec, bad, priors, 1), Error);
  }
}

TEST_CASE("dgp: white-noise reduction") {
  ModelSpec spec = make_toy_spec(1, 1, 1);
  spec.sign_restrictions.clear();
  McmcState params = make_toy_state(spec, 1);
  const int T = 200000;
  params.h_out = MatrixXd::Zero(T, 2);
  params.h_inf = MatrixXd::Zero(T, 2);
  params.h0_out.setZero();
  params.h0_inf.setZero();
  params.tau_h_out.setConstant(1e-30);
  params.tau_h_inf.setConstant(1e-30);
  params.lam_h_out = MatrixXd::Ones(T, 2);
  params.lam_h_inf = MatrixXd::Ones(T, 2);
  params.A.setZero();
  params.B = MatrixXd::Identity(spec.n_var(), spec.n_var());
  const DgpTruth truth = simulate_dgp(spec, params, T, 11);

  // y = (f, z, m) should be iid standard normal per element
  MatrixXd Y(T, spec.n_var());
  Y.col(0) = truth.factors.col(0);
  Y.col(1) = truth.factors.col(1);
  Y.col(2) = truth.data.z.col(0);
  Y.col(3) = truth.data.m.col(0);
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(Y.col(j).mean()) < 0.01);
    const double var = (Y.col(j).array() - Y.col(j).mean()).square().sum() / (T - 1);
    CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("dgp: proxy equation with no measurement error") {
  ModelSpec spec = make_toy_spec(1, 1, 1);
  spec.sign_restrictions.clear();
  McmcState params = make_toy_state(spec, 1);
  const int T = 500;
  params.h_out = MatrixXd::Zero(T, 2);
  params.h_inf = MatrixXd::Zero(T, 2);
  params.lam_h_out = MatrixXd::Ones(T, 2);
  params.lam_h_inf = MatrixXd::Ones(T, 2);
  params.tau_h_out.setConstant(1e-30);
  params.tau_h_inf.setConstant(1e-30);
  const int n = spec.n_var();
  params.B = MatrixXd::Identity(n, n);
  params.B(n - 1, 0) = 0.7;   // Phi_{0,1}
  params.B(n - 1, n - 1) = 0.0;  // Phi_{0,2} = 0: m_t = 0.7 eps_1t exactly
  const DgpTruth truth = simulate_dgp(spec, params, T, 12);
  for (int t = 0; t < T; ++t)
    CHECK(truth.data.m(t, 0) ==
          doctest::Approx(0.7 * truth.shocks(t, 0)).epsilon(1e-12));
}

TEST_CASE("dgp: shock covariance matches identity at scale") {
  ModelSpec spec = make_toy_spec(1, 1, 1);
  spec.sign_restrictions.clear();
  McmcState params = make_toy_state(spec, 1);
  const int T = 1000000;
  params.h_out = MatrixXd::Zero(T, 2);
  params.h_inf = MatrixXd::Zero(T, 2);
  params.lam_h_out = MatrixXd::Ones(T, 2);
  params.lam_h_inf = MatrixXd::Ones(T, 2);
  params.tau_h_out.setConstant(1e-30);
  params.tau_h_inf.setConstant(1e-30);
  const DgpTruth truth = simulate_dgp(spec, params, T, 13);
  const MatrixXd cov =
      truth.shocks.transpose() * truth.shocks / double(T);
  // Monte-Carlo s.e.: var entries ~ sqrt(2/T), covariances ~ sqrt(1/T)
  const int n = spec.n_var();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double se = (i == j ? std::sqrt(2.0 / T) : std::sqrt(1.0 / T));
      CHECK(std::abs(cov(i, j) - (i == j ? 1.0 : 0.0)) < 3.0 * se);
    }
}

TEST_CASE("dgp: explosive systems rejected") {
  const ModelSpec spec = make_toy_spec(1, 1, 1);
  McmcState params = make_toy_state(spec, 10);
  params.A(1, 0) = 1.05;  // own lag above one
  CHECK_THROWS_AS(simulate_dgp(spec, params, 10, 1), Error);
}

TEST_CASE("likelihood at the truth beats perturbed parameters on average") {
  const ModelSpec spec = make_toy_spec(2, 2, 2);
  const int T = 300;
  McmcState params = make_toy_state(spec, T);
  const DgpTruth truth = simulate_dgp(spec, params, T, 21);

  McmcState at_truth = params;
  at_truth.factors = truth.factors;
  at_truth.presample = truth.presample;
  at_truth.h_out = truth.h_out;
  at_truth.h_inf = truth.h_inf;
  const double ll_truth = log_likelihood(at_truth, spec, truth.data);

  std::mt19937_64 rng(5);
  int wins = 0;
  for (int rep = 0; rep < 20; ++rep) {
    McmcState perturbed = at_truth;
    for (int i = 1; i < spec.n_series_per_block(); ++i) {
      perturbed.lambda_out(i, 0) += 0.25 * draw_normal(rng);
      perturbed.lambda_inf(i, 0) += 0.25 * draw_normal(rng);
    }
    perturbed.B(0, 0) += 0.2 * draw_normal(rng);
    if (log_likelihood(perturbed, spec, truth.data) < ll_truth) ++wins;
  }
  CHECK(wins >= 15);  // exceeds on average; allow a few lucky perturbations
}

TEST_CASE("dataset csv round trip is lossless") {
  const ModelSpec spec = make_toy_spec(2, 2, 1);
  const DgpTruth truth = toy_dgp(spec, 50, 31);
  const std::string dir = "/tmp/favar_test_dataset";
  std::filesystem::remove_all(dir);
  save_dataset(dir, truth.data, /*z_already_standardized=*/true);
  const DataSet loaded = load_dataset(dir);
  CHECK((loaded.x_out - truth.data.x_out).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.x_inf - truth.data.x_inf).cwiseAbs().maxCoeff() == 0.0);
  CHECK((loaded.m - truth.data.m).cwiseAbs().maxCoeff() == 0.0);
  // z is re-standardized at load; the de-standardized values must agree
  const MatrixXd z_orig =
      loaded.z * loaded.z_stdev.asDiagonal();
  MatrixXd z_expected = truth.data.z;
  for (int j = 0; j < z_expected.cols(); ++j)
    z_expected.col(j).array() -= loaded.z_mean(j);
  CHECK((z_orig - z_expected).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(loaded.dates == truth.data.dates);
}

TEST_CASE("draws round trip through the per-block store") {
  const ModelSpec spec = make_toy_spec(1, 2, 2);
  const int T = 40;
  PosteriorDraws draws;
  draws.seed = 999;
  std::mt19937_64 rng(1);
  for (int d = 0; d < 3; ++d) {
    McmcState s = make_toy_state(spec, T);
    s.factors = MatrixXd::NullaryExpr(T, 2, [&] { return draw_normal(rng); });
    s.kappa1 = 0.1 + d;
    draws.states.push_back(std::move(s));
    draws.draw_indices.push_back(100 + 5 * d);
  }
  const std::string dir = "/tmp/favar_test_draws";
  std::filesystem::remove_all(dir);
  save_draws(dir, draws, spec, PriorConfig{});
  const LoadedDraws loaded = load_draws(dir);
  REQUIRE(loaded.draws.size() == 3);
  CHECK(loaded.draws.seed == 999);
  CHECK(loaded.draws.draw_indices == draws.draw_indices);
  for (int d = 0; d < 3; ++d) {
    const McmcState& a = draws.states[d];
    const McmcState& b = loaded.draws.states[d];
    CHECK((a.factors - b.factors).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.h_out - b.h_out).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.A - b.A).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.B - b.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.presample - b.presample).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.kappa1 == b.kappa1);
    CHECK((a.tau_h_inf - b.tau_h_inf).cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(loaded.spec.var_lag_order == spec.var_lag_order);
  CHECK(loaded.spec.n_countries == spec.n_countries);
}

TEST_CASE("spec and prior json round trips") {
  ModelSpec spec = make_toy_spec(3, 2, 4, 1, true);
  const ModelSpec back = spec_from_json(spec_to_json(spec));
  CHECK(back.n_countries == spec.n_countries);
  CHECK(back.factor_lag_order == spec.factor_lag_order);
  CHECK(back.include_country_channels == spec.include_country_channels);
  CHECK(back.sign_restrictions.size() == spec.sign_restrictions.size());
  CHECK(back.mcmc.total_iterations == spec.mcmc.total_iterations);

  PriorConfig priors;
  priors.proxy_noise_variance = 123.0;
  priors.extra_impact_tags.push_back({1, 0, Restriction::Negative});
  const PriorConfig pback = priors_from_json(priors_to_json(priors));
  CHECK(pback.proxy_noise_variance == 123.0);
  REQUIRE(pback.extra_impact_tags.size() == 1);
  CHECK(pback.extra_impact_tags[0].tag == Restriction::Negative);
}

TEST_CASE("retention arithmetic") {
  McmcSettings mc{600, 100, 5};
  CHECK(mc.retained() == 100);
  McmcSettings base{18000, 3000, 5};
  CHECK(base.retained() == 3000);
}
