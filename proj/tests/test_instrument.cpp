#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "favar/instrument.hpp"
#include "favar/rng.hpp"

using namespace favar;

namespace {

AnnouncementPanel synthetic_panel(int events, std::uint64_t seed,
                                  double info_share = 0.4) {
  std::mt19937_64 rng(seed);
  AnnouncementPanel panel;
  panel.ois.resize(events, 4);
  panel.stock.resize(events);
  int year = 2004, month = 1, day = 10;
  for (int t = 0; t < events; ++t) {
    const double policy = 0.05 * draw_normal(rng);
    const double info = info_share * 0.05 * draw_normal(rng);
    for (int j = 0; j < 4; ++j)
      panel.ois(t, j) = policy * (0.8 + 0.1 * j) + 0.005 * draw_normal(rng);
    // pure policy moves stocks opposite; information moves them along
    panel.stock(t) = -8.0 * policy + 12.0 * info + 0.1 * draw_normal(rng);
    panel.dates.push_back({year, month, day});
    month += 1;
    if (month > 12) {
      month = 1;
      ++year;
    }
  }
  return panel;
}

}  // namespace

TEST_CASE("rotational instrument: pair sums to the principal component") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull, 17ull}) {
    const AnnouncementPanel panel = synthetic_panel(40, seed);
    const InstrumentPair pair = build_rotational_instrument(panel);
    CHECK((pair.m + pair.cbi - pair.pc).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(pair.gamma >= 0.0);
    CHECK(pair.alpha == doctest::Approx(std::sqrt(pair.gamma)));
  }
}

TEST_CASE("rotational instrument: all-opposite panel gives gamma 1") {
  // construct a panel where sign(pc) != sign(stock) on every event
  AnnouncementPanel panel = synthetic_panel(30, 5, 0.0);
  const VectorXd pc = ois_principal_component(panel);
  for (int t = 0; t < panel.events(); ++t)
    panel.stock(t) = pc(t) > 0.0 ? -std::abs(panel.stock(t)) - 0.1
                                 : std::abs(panel.stock(t)) + 0.1;
  const InstrumentPair pair = build_rotational_instrument(panel);
  CHECK(pair.gamma == doctest::Approx(1.0));
  CHECK(pair.alpha == doctest::Approx(1.0));
}

TEST_CASE("rotational instrument: no opposite signs means identity rotation") {
  AnnouncementPanel panel = synthetic_panel(30, 6, 0.0);
  const VectorXd pc = ois_principal_component(panel);
  for (int t = 0; t < panel.events(); ++t)
    panel.stock(t) = pc(t) >= 0.0 ? std::abs(panel.stock(t)) + 0.1
                                  : -std::abs(panel.stock(t)) - 0.1;
  const InstrumentPair pair = build_rotational_instrument(panel);
  CHECK(pair.gamma == doctest::Approx(0.0));
  CHECK(pair.alpha == doctest::Approx(0.0));
  // identity rotation: the policy vector carries the whole component
  CHECK((pair.m - pair.pc).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(pair.cbi.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rotational instrument: 6-event step-by-step oracle") {
  // fixed panel; every step of the construction recomputed independently
  AnnouncementPanel panel;
  panel.ois.resize(6, 4);
  panel.ois << 0.02, 0.03, 0.04, 0.05,
              -0.01, -0.02, -0.02, -0.03,
               0.05, 0.06, 0.05, 0.07,
              -0.04, -0.03, -0.05, -0.04,
               0.01, 0.00, 0.01, 0.02,
              -0.02, -0.01, -0.02, -0.01;
  panel.stock.resize(6);
  panel.stock << -1.2, 0.8, 1.5, -0.9, -0.3, 0.4;
  for (int t = 0; t < 6; ++t) panel.dates.push_back({2010, 1 + t, 5});

  // (1) centered PCA, sign-aligned with the 3m column
  MatrixXd X = panel.ois;
  for (int j = 0; j < 4; ++j) X.col(j).array() -= X.col(j).mean();
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(X.transpose() * X / 5.0);
  VectorXd v = eig.eigenvectors().col(3);
  if (v(1) < 0.0) v = -v;
  const VectorXd i_oracle = X * v;

  // (2) QR with positive diagonal
  MatrixXd U(6, 2);
  U.col(0) = i_oracle;
  U.col(1) = panel.stock;
  Eigen::HouseholderQR<MatrixXd> qr(U);
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(6, 2);
  MatrixXd R = Q.transpose() * U;
  for (int j = 0; j < 2; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);

  // (3)-(5) mask, gamma, alpha, rotation
  std::vector<double> masked;
  for (int t = 0; t < 6; ++t)
    if ((i_oracle(t) > 0) != (panel.stock(t) > 0) && i_oracle(t) != 0 &&
        panel.stock(t) != 0)
      masked.push_back(i_oracle(t));
  auto pop_var = [](const std::vector<double>& a) {
    double m = 0.0;
    for (double x : a) m += x;
    m /= a.size();
    double ss = 0.0;
    for (double x : a) ss += (x - m) * (x - m);
    return ss / a.size();
  };
  std::vector<double> all(i_oracle.data(), i_oracle.data() + 6);
  const double gamma_oracle = masked.empty() ? 0.0 : pop_var(masked) / pop_var(all);
  const double alpha_oracle = std::sqrt(gamma_oracle);
  Eigen::Matrix2d P;
  P << std::cos(alpha_oracle), std::sin(alpha_oracle),
      -std::sin(alpha_oracle), std::cos(alpha_oracle);
  const MatrixXd rotated = Q * P.transpose();

  // (6) rescale so the two columns sum to the principal component
  const Eigen::Vector2d s = rotated.transpose() * i_oracle;
  const VectorXd m_oracle = rotated.col(0) * s(0);
  const VectorXd cbi_oracle = rotated.col(1) * s(1);

  const InstrumentPair pair = build_rotational_instrument(panel);
  CHECK(pair.gamma == doctest::Approx(gamma_oracle).epsilon(1e-12));
  CHECK(pair.alpha == doctest::Approx(alpha_oracle).epsilon(1e-12));
  CHECK((pair.m - m_oracle).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((pair.cbi - cbi_oracle).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((pair.m + pair.cbi - i_oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rotational instrument: invariant to event reordering") {
  const AnnouncementPanel panel = synthetic_panel(25, 8);
  const InstrumentPair base = build_rotational_instrument(panel);

  std::vector<int> order(25);
  for (int i = 0; i < 25; ++i) order[i] = i;
  std::mt19937_64 rng(123);
  std::shuffle(order.begin(), order.end(), rng);
  AnnouncementPanel shuffled;
  shuffled.ois.resize(25, 4);
  shuffled.stock.resize(25);
  for (int t = 0; t < 25; ++t) {
    shuffled.ois.row(t) = panel.ois.row(order[t]);
    shuffled.stock(t) = panel.stock(order[t]);
    shuffled.dates.push_back(panel.dates[order[t]]);
  }
  const InstrumentPair perm = build_rotational_instrument(shuffled);
  CHECK(perm.gamma == doctest::Approx(base.gamma).epsilon(1e-10));
  for (int t = 0; t < 25; ++t)
    CHECK(perm.m(t) == doctest::Approx(base.m(order[t])).epsilon(1e-8));
}

TEST_CASE("rotational instrument: degenerate panels rejected") {
  AnnouncementPanel tiny = synthetic_panel(2, 9);
  CHECK_THROWS_AS(build_rotational_instrument(tiny), Error);

  AnnouncementPanel flat = synthetic_panel(10, 10);
  flat.ois.col(2).setZero();
  CHECK_THROWS_AS(build_rotational_instrument(flat), Error);
}

TEST_CASE("poor man's proxy: sign cases") {
  AnnouncementPanel panel;
  panel.ois.resize(3, 4);
  panel.stock.resize(3);
  // columns: 1m, 3m, 6m, 1y
  panel.ois << 0.0, 0.05, 0.0, 0.0,
               0.0, 0.05, 0.0, 0.0,
               0.0, 0.00, 0.0, 0.0;
  panel.stock << 1.0, -1.0, -1.0;
  panel.dates = {{2010, 1, 1}, {2010, 2, 1}, {2010, 3, 1}};
  const VectorXd proxy = poor_mans_proxy(panel);
  CHECK(proxy(0) == 0.0);        // identical signs
  CHECK(proxy(1) == doctest::Approx(0.05));  // opposite signs
  CHECK(proxy(2) == 0.0);        // zero counts as agreement
}

TEST_CASE("events to monthly: sums within months, zero otherwise") {
  std::vector<Day> dates = {{2020, 3, 5}, {2020, 3, 20}, {2020, 5, 8}};
  VectorXd values(3);
  values << 0.02, -0.01, 0.07;
  const RawSeries monthly =
      events_to_monthly(dates, values, Month(2020, 1), 6);
  CHECK(monthly.values(0) == 0.0);
  CHECK(monthly.values(2) == doctest::Approx(0.01));
  CHECK(monthly.values(3) == 0.0);
  CHECK(monthly.values(4) == doctest::Approx(0.07));

  // permutation inside a month changes nothing
  std::vector<Day> swapped = {dates[1], dates[0], dates[2]};
  VectorXd values2(3);
  values2 << -0.01, 0.02, 0.07;
  const RawSeries monthly2 =
      events_to_monthly(swapped, values2, Month(2020, 1), 6);
  CHECK((monthly.values - monthly2.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("reliability indicator") {
  CHECK(reliability_indicator(1.0, 0.0) == doctest::Approx(1.0));
  CHECK(reliability_indicator(1.0, 1.0) == doctest::Approx(0.5));
  CHECK(reliability_indicator(3.0, 4.0) == doctest::Approx(0.36));
  CHECK_THROWS_AS(reliability_indicator(0.0, 0.0), Error);

  // scale invariance
  std::mt19937_64 rng(77);
  for (int rep = 0; rep < 50; ++rep) {
    const double a = draw_normal(rng);
    const double b = draw_normal(rng);
    if (a == 0.0 && b == 0.0) continue;
    const double c = draw_normal(rng);
    if (c == 0.0) continue;
    CHECK(reliability_indicator(c * a, c * b) ==
          doctest::Approx(reliability_indicator(a, b)).epsilon(1e-12));
  }
}

TEST_CASE("default exclusion drops the 2008-10-08 coordinated announcement") {
  AnnouncementPanel panel = synthetic_panel(5, 12);
  panel.dates[2] = {2008, 10, 8};
  const AnnouncementPanel filtered = apply_exclusions(panel, {});
  CHECK(filtered.events() == 4);
  for (const Day& d : filtered.dates)
    CHECK(!(d.year == 2008 && d.month == 10 && d.day == 8));
}

TEST_CASE("aggregate-then-rotate tracks rotate-then-aggregate") {
  // restated at the testable level: monthly policy series from the two
  // orderings correlate strongly on synthetic panels
  for (std::uint64_t seed : {31ull, 32ull, 33ull}) {
    const AnnouncementPanel panel = synthetic_panel(120, seed);
    const InstrumentPair pair = build_rotational_instrument(panel);
    const auto [first, count] = [&] {
      Month lo = panel.dates.front().month_index();
      Month hi = panel.dates.back().month_index();
      return std::pair<Month, int>(lo, hi.ym - lo.ym + 1);
    }();
    const RawSeries m_monthly =
        events_to_monthly(panel.dates, pair.m, first, count);

    // aggregate the raw panel to monthly, then rotate
    AnnouncementPanel monthly_panel;
    std::vector<Day> month_days;
    {
      std::vector<std::vector<int>> buckets(count);
      for (int t = 0; t < panel.events(); ++t)
        buckets[panel.dates[t].month_index().ym - first.ym].push_back(t);
      int n_months = 0;
      for (const auto& b : buckets)
        if (!b.empty()) ++n_months;
      monthly_panel.ois.resize(n_months, 4);
      monthly_panel.stock.resize(n_months);
      int row = 0;
      for (int mi = 0; mi < count; ++mi) {
        if (buckets[mi].empty()) continue;
        VectorXd ois_sum = VectorXd::Zero(4);
        double stock_sum = 0.0;
        for (int t : buckets[mi]) {
          ois_sum += panel.ois.row(t).transpose();
          stock_sum += panel.stock(t);
        }
        monthly_panel.ois.row(row) = ois_sum.transpose();
        monthly_panel.stock(row) = stock_sum;
        Month m;
        m.ym = first.ym + mi;
        monthly_panel.dates.push_back({m.year(), m.month(), 1});
        ++row;
      }
    }
    const InstrumentPair rotated_after =
        build_rotational_instrument(monthly_panel);
    const RawSeries m_after = events_to_monthly(
        monthly_panel.dates, rotated_after.m, first, count);

    const VectorXd a = m_monthly.values, b = m_after.values;
    const double corr =
        ((a.array() - a.mean()) * (b.array() - b.mean())).sum() /
        std::sqrt((a.array() - a.mean()).square().sum() *
                  (b.array() - b.mean()).square().sum());
    CHECK(corr > 0.99);
  }
}
