#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "favar/dgp.hpp"
#include "favar/draws_io.hpp"
#include "favar/gibbs.hpp"
#include "favar/model.hpp"
#include "favar/rng.hpp"
#include "favar/validate.hpp"
#include "support/oracles.hpp"

using namespace favar;
using favar::test::make_toy_spec;
using favar::test::make_toy_state;

namespace {

double correlation(const VectorXd& a, const VectorXd& b) {
  return ((a.array() - a.mean()) * (b.array() - b.mean())).sum() /
         std::sqrt((a.array() - a.mean()).square().sum() *
                   (b.array() - b.mean()).square().sum());
}

}  // namespace

TEST_CASE("sweep preserves pins and zero patterns") {
  const ModelSpec spec = make_toy_spec(2, 2, 2);
  McmcState truth = make_toy_state(spec, 120);
  const DgpTruth dgp = simulate_dgp(spec, truth, 120, 51);
  GibbsSampler sampler(spec, dgp.data, PriorConfig{}, 7);
  const ImpactPattern& pattern = sampler.pattern();
  const int n = spec.n_var();
  for (int s = 0; s < 25; ++s) {
    sampler.sweep(s);
    const McmcState& st = sampler.state();
    CHECK(st.lambda_out(0, 0) == 1.0);
    CHECK(st.lambda_inf(0, 0) == 1.0);
    CHECK(st.lambda_z_out.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(st.lambda_z_inf.row(0).cwiseAbs().maxCoeff() == 0.0);
    // instrument columns of A identically zero
    CHECK(st.A.rightCols(1).cwiseAbs().maxCoeff() == 0.0);
    // impact pattern holds after every sweep
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(satisfies(st.B(i, j), pattern.at(i, j)));
    CHECK(st.h_out.allFinite());
    CHECK(st.factors.allFinite());
    CHECK(std::abs(st.B.determinant()) > 0.0);
  }
}

TEST_CASE("same seed reproduces the state bit for bit") {
  const ModelSpec spec = make_toy_spec(1, 2, 2);
  McmcState truth = make_toy_state(spec, 80);
  const DgpTruth dgp = simulate_dgp(spec, truth, 80, 52);

  GibbsSampler a(spec, dgp.data, PriorConfig{}, 1234);
  GibbsSampler b(spec, dgp.data, PriorConfig{}, 1234);
  for (int s = 0; s < 10; ++s) {
    a.sweep(s);
    b.sweep(s);
  }
  CHECK((a.state().factors - b.state().factors).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.state().B - b.state().B).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.state().A - b.state().A).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.state().h_out - b.state().h_out).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.state().kappa1 == b.state().kappa1);

  // a different seed diverges
  GibbsSampler c(spec, dgp.data, PriorConfig{}, 99);
  c.sweep(0);
  CHECK((a.state().factors - c.state().factors).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("run retains the documented number of draws") {
  ModelSpec spec = make_toy_spec(1, 1, 1);
  spec.mcmc = {60, 20, 4};
  McmcState truth = make_toy_state(spec, 60);
  const DgpTruth dgp = simulate_dgp(spec, truth, 60, 53);
  GibbsSampler sampler(spec, dgp.data, PriorConfig{}, 5);
  int progress_calls = 0;
  const PosteriorDraws draws =
      sampler.run([&](int, int) { ++progress_calls; });
  CHECK(draws.size() == spec.mcmc.retained());
  CHECK(draws.size() == 10);
  CHECK(draws.draw_indices.front() == 20);
  CHECK(draws.draw_indices.back() == 56);
}

TEST_CASE("small-scale recovery: loadings and factor paths") {
  // reduced version of the acceptance recovery: 2 countries, T = 250
  const ModelSpec spec = make_toy_spec(2, 2, 2);
  McmcState truth = make_toy_state(spec, 250);
  truth.h_out.setConstant(std::log(0.2));
  truth.h_inf.setConstant(std::log(0.2));
  truth.h0_out.setConstant(std::log(0.2));
  truth.h0_inf.setConstant(std::log(0.2));
  truth.lam_h_out.setConstant(1e-8);
  truth.lam_h_inf.setConstant(1e-8);
  truth.tau_h_out.setOnes();
  truth.tau_h_inf.setOnes();
  const DgpTruth dgp = simulate_dgp(spec, truth, 250, 54);

  ModelSpec run_spec = spec;
  run_spec.mcmc = {1500, 500, 2};
  GibbsSampler sampler(run_spec, dgp.data, PriorConfig{}, 11);
  const PosteriorDraws draws = sampler.run();

  // posterior medians of the unpinned loadings
  for (int i = 1; i < spec.n_series_per_block(); ++i) {
    std::vector<double> lo, li;
    for (const auto& s : draws.states) {
      lo.push_back(s.lambda_out(i, 0));
      li.push_back(s.lambda_inf(i, 0));
    }
    std::sort(lo.begin(), lo.end());
    std::sort(li.begin(), li.end());
    CHECK(std::abs(lo[lo.size() / 2] - truth.lambda_out(i, 0)) < 0.2);
    CHECK(std::abs(li[li.size() / 2] - truth.lambda_inf(i, 0)) < 0.2);
  }

  // factor paths
  VectorXd mean_f_out = VectorXd::Zero(250);
  VectorXd mean_f_inf = VectorXd::Zero(250);
  for (const auto& s : draws.states) {
    mean_f_out += s.factors.col(0);
    mean_f_inf += s.factors.col(1);
  }
  mean_f_out /= draws.size();
  mean_f_inf /= draws.size();
  CHECK(correlation(mean_f_out, dgp.factors.col(0)) > 0.9);
  CHECK(correlation(mean_f_inf, dgp.factors.col(1)) > 0.9);
}

TEST_CASE("contradictory sign tags fail validation before sampling") {
  ModelSpec spec = make_toy_spec(1, 1, 1);
  McmcState truth = make_toy_state(spec, 50);
  const DgpTruth dgp = simulate_dgp(spec, truth, 50, 55);
  PriorConfig priors;
  priors.extra_impact_tags.push_back({0, spec.n_var() - 1, Restriction::Positive});
  CHECK_THROWS_AS(GibbsSampler(spec, dgp.data, priors, 1), Error);
}

TEST_CASE("persisted draws from a run round-trip exactly") {
  ModelSpec spec = make_toy_spec(1, 1, 1);
  spec.mcmc = {40, 10, 3};
  McmcState truth = make_toy_state(spec, 50);
  const DgpTruth dgp = simulate_dgp(spec, truth, 50, 56);
  GibbsSampler sampler(spec, dgp.data, PriorConfig{}, 3);
  const PosteriorDraws draws = sampler.run();

  const std::string dir = "/tmp/favar_gibbs_roundtrip";
  std::filesystem::remove_all(dir);
  save_draws(dir, draws, spec, PriorConfig{});
  const LoadedDraws loaded = load_draws(dir);
  REQUIRE(loaded.draws.size() == draws.size());
  for (int d = 0; d < draws.size(); ++d) {
    CHECK((loaded.draws.states[d].factors - draws.states[d].factors)
              .cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.draws.states[d].B - draws.states[d].B)
              .cwiseAbs().maxCoeff() == 0.0);
  }
}
