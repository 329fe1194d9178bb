#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "favar/impact.hpp"
#include "favar/rng.hpp"
#include "favar/validate.hpp"
#include "support/oracles.hpp"

using namespace favar;
using favar::test::make_toy_spec;

namespace {

MatrixXd random_admissible_b(std::mt19937_64& rng, const ModelSpec& spec,
                             const ImpactPattern& pattern) {
  const int n = spec.n_var();
  MatrixXd B(n, n);
  for (;;) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        switch (pattern.at(i, j)) {
          case Restriction::Zero: B(i, j) = 0.0; break;
          case Restriction::Positive: B(i, j) = std::abs(draw_normal(rng)); break;
          case Restriction::Negative: B(i, j) = -std::abs(draw_normal(rng)); break;
          default: B(i, j) = draw_normal(rng);
        }
      }
    B.diagonal().array() += 2.0;  // keep comfortably invertible
    if (std::abs(B.determinant()) > 1e-3) return B;
  }
}

}  // namespace

TEST_CASE("(u, w) transform round-trips admissible columns to 1e-12") {
  const ModelSpec spec = make_toy_spec(1, 2, 1);
  const ImpactPattern pattern = build_pattern(spec, PriorConfig{});
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const MatrixXd B = random_admissible_b(rng, spec, pattern);
    for (int col = 0; col < spec.n_var(); ++col) {
      const ColumnTransform t = column_to_uw(B, col, pattern);
      const VectorXd rebuilt = column_from_uw(B, t);
      // entry a of the rebuilt column belongs to row perm[a]
      CHECK(std::abs(rebuilt(0) - B(col, col)) < 1e-12);
      for (size_t a = 1; a < t.perm.size(); ++a)
        CHECK(std::abs(rebuilt(a) - B(t.perm[a], col)) < 1e-12);
    }
  }
}

TEST_CASE("u-kernel coefficients reproduce the full likelihood exponent") {
  // the factored kernel gamma1/u + gamma2/u^2 must match the brute-force
  // exponent up to a u-free constant, at random points
  const ModelSpec spec = make_toy_spec(1, 2, 1);
  const ImpactPattern pattern = build_pattern(spec, PriorConfig{});
  std::mt19937_64 rng(17);
  const int n = spec.n_var();
  const int T = 12;

  for (int rep = 0; rep < 100; ++rep) {
    const MatrixXd B = random_admissible_b(rng, spec, pattern);
    MatrixXd U(T, n);
    for (int t = 0; t < T; ++t)
      for (int j = 0; j < n; ++j) U(t, j) = draw_normal(rng);

    const int col = rep % n;
    // assemble the pieces the sampler derives
    std::vector<int> others;
    for (int j = 0; j < n; ++j)
      if (j != col) others.push_back(j);
    MatrixXd B22(n - 1, n - 1);
    VectorXd b12(n - 1), w(n - 1);
    for (int a = 0; a < n - 1; ++a) {
      b12(a) = B(col, others[a]);
      w(a) = B(others[a], col);
      for (int b = 0; b < n - 1; ++b) B22(a, b) = B(others[a], others[b]);
    }
    MatrixXd Up(T, n);
    Up.col(0) = U.col(col);
    for (int a = 0; a < n - 1; ++a) Up.col(a + 1) = U.col(others[a]);

    const Eigen::FullPivLU<MatrixXd> lu22(B22);
    const MatrixXd A_mat = lu22.solve(Up.rightCols(n - 1).transpose());
    const VectorXd c = Up.col(0) - A_mat.transpose() * b12;
    const VectorXd g = lu22.solve(w);
    const double gamma2 = (1.0 + g.squaredNorm()) * c.squaredNorm();
    const double gamma1 = -2.0 * g.dot(A_mat * c);

    const double u1 = 0.5 + draw_uniform(rng);
    const double u2 = -0.3 - draw_uniform(rng);
    const double lhs = favar::test::impact_exponent_bruteforce(B, col, u1, w, U) -
                       favar::test::impact_exponent_bruteforce(B, col, u2, w, U);
    const double rhs = gamma1 * (1.0 / u1 - 1.0 / u2) +
                       gamma2 * (1.0 / (u1 * u1) - 1.0 / (u2 * u2));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("scalar u step matches a quadrature oracle (no restrictions)") {
  // n = 1 reduction: posterior on u with kernel |u|^-T exp(-g2/(2u^2)) N(0,1)
  std::mt19937_64 data_rng(7);
  const int T = 40;
  VectorXd u_data(T);
  for (int t = 0; t < T; ++t) u_data(t) = 0.8 * draw_normal(data_rng);
  const double gamma2 = u_data.squaredNorm();

  // quadrature oracle over the positive branch (kernel is symmetric in sign;
  // the chain explores one lobe at a time, so compare |u| moments)
  const auto log_post = [&](double u) {
    return -T * std::log(std::abs(u)) - 0.5 * gamma2 / (u * u) -
           0.5 * u * u / 1.0;
  };
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  const int nq = 200000;
  const double lo = 1e-4, hi = 5.0;
  double max_lp = -1e300;
  for (int i = 0; i < nq; ++i) {
    const double u = lo + (hi - lo) * (i + 0.5) / nq;
    max_lp = std::max(max_lp, log_post(u));
  }
  for (int i = 0; i < nq; ++i) {
    const double u = lo + (hi - lo) * (i + 0.5) / nq;
    const double wgt = std::exp(log_post(u) - max_lp);
    z += wgt;
    m1 += wgt * u;
    m2 += wgt * u * u;
  }
  const double mean_oracle = m1 / z;
  const double var_oracle = m2 / z - mean_oracle * mean_oracle;

  ImpactDiagnostics diag;
  auto rng = RngStream(9).engine();
  double u = mean_oracle;
  double sum = 0.0, sum2 = 0.0;
  const int sweeps = 200000;
  for (int it = 0; it < sweeps; ++it) {
    u = sample_u(rng, u, T, 0.0, gamma2, 0.0, 0.0, 1.0,
                 Restriction::Positive, diag);
    sum += u;
    sum2 += u * u;
  }
  const double mean_chain = sum / sweeps;
  const double var_chain = sum2 / sweeps - mean_chain * mean_chain;
  CHECK(mean_chain == doctest::Approx(mean_oracle).epsilon(0.02));
  CHECK(var_chain == doctest::Approx(var_oracle).epsilon(0.10));
  CHECK(diag.u_accepts > 0);
}

TEST_CASE("sign-truncated mvn: moments match a rejection oracle") {
  VectorXd mean(3);
  mean << 0.4, -0.3, 0.1;
  MatrixXd cov(3, 3);
  cov << 1.0, 0.4, -0.2, 0.4, 0.8, 0.1, -0.2, 0.1, 0.6;
  const std::vector<Restriction> tags = {Restriction::Positive,
                                         Restriction::Negative,
                                         Restriction::Unrestricted};
  auto rng = RngStream(40).engine();

  // oracle: plain rejection from the untruncated normal
  const Eigen::LLT<MatrixXd> llt(cov);
  const MatrixXd L = llt.matrixL();
  std::vector<VectorXd> oracle;
  while (oracle.size() < 60000) {
    const VectorXd v = mean + L * draw_std_normal_vector(rng, 3);
    if (v(0) > 0.0 && v(1) < 0.0) oracle.push_back(v);
  }
  std::vector<VectorXd> mine;
  VectorXd start(3);
  start << 0.5, -0.5, 0.0;
  for (int d = 0; d < 60000; ++d) {
    start = draw_sign_truncated_mvn(rng, mean, cov, tags, start);
    mine.push_back(start);
    CHECK(start(0) > 0.0);
    CHECK(start(1) < 0.0);
  }
  const auto mo = favar::test::sample_moments(oracle);
  const auto mm = favar::test::sample_moments(mine);
  for (int i = 0; i < 3; ++i)
    CHECK(std::abs(mm.mean(i) - mo.mean(i)) < 0.02);
}

TEST_CASE("all retained draws satisfy the sign tags (toy run)") {
  const ModelSpec spec = make_toy_spec(1, 2, 1);
  PriorConfig priors;
  const ImpactPattern pattern = build_pattern(spec, priors);
  const int n = spec.n_var();
  const int T = 60;

  std::mt19937_64 data_rng(21);
  MatrixXd B_true = MatrixXd::Identity(n, n);
  B_true(2, 0) = 0.4;
  B_true(1, 0) = -0.3;
  B_true(n - 1, 0) = 0.8;
  B_true(n - 1, n - 1) = 0.05;
  MatrixXd U(T, n);
  for (int t = 0; t < T; ++t) {
    const VectorXd eps = draw_std_normal_vector(data_rng, n);
    U.row(t) = (B_true * eps).transpose();
  }

  McmcState state;
  state.B = MatrixXd::Identity(n, n);
  state.B(2, 0) = 0.1;
  state.B(1, 0) = -0.1;
  ImpactDiagnostics diag;
  auto rng = RngStream(31).engine();
  for (int it = 0; it < 10000; ++it) {
    sample_impact_matrix(state, spec, priors, pattern, U, rng, diag);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        CHECK(satisfies(state.B(i, j), pattern.at(i, j)));
  }
  // the gate and the proposal must both be live
  CHECK(diag.u_proposals == 10000LL * n);
  CHECK(diag.r1_proposals > 0);
}

TEST_CASE("2x2 impact recovery with sign tags fixing the column signs") {
  // gamma_0 = [[1, 0], [0.5, 1]] inside the smallest proxy system (r=2,k=1)
  ModelSpec spec = make_toy_spec(0, 0, 1);
  spec.var_names_z = {};
  spec.sign_restrictions.clear();
  const int n = spec.n_var();
  REQUIRE(n == 3);

  PriorConfig priors;
  priors.extra_impact_tags = {{0, 0, Restriction::Positive},
                              {1, 0, Restriction::Positive},
                              {0, 1, Restriction::Zero},
                              {1, 1, Restriction::Positive}};
  const ImpactPattern pattern = build_pattern(spec, priors);

  MatrixXd B_true(3, 3);
  B_true << 1.0, 0.0, 0.0,
            0.5, 1.0, 0.0,
            0.8, 0.0, 0.05;
  const int T = 500;
  std::mt19937_64 data_rng(12);
  MatrixXd U(T, 3);
  for (int t = 0; t < T; ++t)
    U.row(t) = (B_true * draw_std_normal_vector(data_rng, 3)).transpose();

  McmcState state;
  state.B = MatrixXd::Identity(3, 3);
  ImpactDiagnostics diag;
  auto rng = RngStream(55).engine();
  MatrixXd mean_B = MatrixXd::Zero(3, 3);
  const int sweeps = 10000, burn = 2000;
  for (int it = 0; it < sweeps; ++it) {
    sample_impact_matrix(state, spec, priors, pattern, U, rng, diag);
    if (it >= burn) mean_B += state.B;
  }
  mean_B /= (sweeps - burn);
  CHECK(std::abs(mean_B(0, 0) - 1.0) < 0.1);
  CHECK(std::abs(mean_B(1, 0) - 0.5) < 0.1);
  CHECK(std::abs(mean_B(1, 1) - 1.0) < 0.1);
  CHECK(std::abs(mean_B(0, 1)) == 0.0);
  CHECK(std::abs(mean_B(2, 0) - 0.8) < 0.15);
}

TEST_CASE("reliability concentrates when the proxy has no measurement noise") {
  // with the tight Phi02 prior, the measurement share stays small
  ModelSpec spec = make_toy_spec(0, 0, 1);
  spec.var_names_z = {};
  spec.sign_restrictions.clear();
  PriorConfig priors;
  const ImpactPattern pattern = build_pattern(spec, priors);

  MatrixXd B_true(3, 3);
  B_true << 1.0, 0.0, 0.0,
            0.5, 1.0, 0.0,
            1.0, 0.0, 1e-6;  // essentially no measurement error
  const int T = 500;
  std::mt19937_64 data_rng(14);
  MatrixXd U(T, 3);
  for (int t = 0; t < T; ++t)
    U.row(t) = (B_true * draw_std_normal_vector(data_rng, 3)).transpose();

  McmcState state;
  state.B = MatrixXd::Identity(3, 3);
  ImpactDiagnostics diag;
  auto rng = RngStream(66).engine();
  std::vector<double> shares;
  for (int it = 0; it < 4000; ++it) {
    sample_impact_matrix(state, spec, priors, pattern, U, rng, diag);
    if (it >= 1000) {
      const double p1 = state.B(2, 0), p2 = state.B(2, 2);
      shares.push_back(p2 * p2 / (p1 * p1 + p2 * p2));
    }
  }
  std::sort(shares.begin(), shares.end());
  CHECK(shares[shares.size() / 2] < 0.05);
}

TEST_CASE("contradictory anchor region raises StuckRegion") {
  ModelSpec spec = make_toy_spec(0, 0, 1);
  spec.var_names_z = {};
  spec.sign_restrictions.clear();
  PriorConfig priors;
  priors.extra_impact_tags = {{0, 0, Restriction::Positive},
                              {1, 0, Restriction::Positive}};
  const ImpactPattern pattern = build_pattern(spec, priors);

  // b12/B22 geometry forces the anchor negative whenever w is positive, so
  // the first gate check rejects; a pre-loaded consecutive-rejection count
  // verifies the guard fires at the documented threshold
  McmcState state;
  state.B.resize(3, 3);
  state.B << 1e-3, -100.0, 0.0,
             1e-3, 1.0, 0.0,
             0.1, 0.0, 0.05;
  MatrixXd U = 0.01 * MatrixXd::Ones(5, 3);
  ImpactDiagnostics diag;
  diag.r1_consecutive_rejects = 99999;
  auto rng = RngStream(77).engine();
  bool threw = false;
  try {
    for (int it = 0; it < 50 && !threw; ++it)
      sample_impact_matrix(state, spec, priors, pattern, U, rng, diag);
  } catch (const Error& e) {
    threw = e.code() == ErrorCode::StuckRegion;
  }
  CHECK(threw);
}
