#include "favar/instrument.hpp"

#include <cmath>
#include <set>

#include <Eigen/Dense>
#include <Eigen/QR>

namespace favar {

namespace {

double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size());
}

}  // namespace

AnnouncementPanel apply_exclusions(const AnnouncementPanel& panel,
                                   const std::vector<std::string>& exclude_dates) {
  std::set<std::string> drop(exclude_dates.begin(), exclude_dates.end());
  drop.insert("2008-10-08");
  std::vector<int> keep;
  for (int t = 0; t < panel.events(); ++t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", panel.dates[t].year,
                  panel.dates[t].month, panel.dates[t].day);
    if (!drop.count(buf)) keep.push_back(t);
  }
  AnnouncementPanel out;
  out.ois.resize(static_cast<int>(keep.size()), panel.ois.cols());
  out.stock.resize(static_cast<int>(keep.size()));
  for (size_t i = 0; i < keep.size(); ++i) {
    out.dates.push_back(panel.dates[keep[i]]);
    out.ois.row(static_cast<int>(i)) = panel.ois.row(keep[i]);
    out.stock(static_cast<int>(i)) = panel.stock(keep[i]);
  }
  return out;
}

VectorXd ois_principal_component(const AnnouncementPanel& panel) {
  if (panel.events() < 3)
    throw Error(ErrorCode::DegeneratePanel, "need at least 3 events");
  MatrixXd X = panel.ois;
  for (int j = 0; j < X.cols(); ++j) {
    const double mean = X.col(j).mean();
    X.col(j).array() -= mean;
    if (X.col(j).squaredNorm() <= 0.0)
      throw Error(ErrorCode::DegeneratePanel,
                  "OIS column " + std::to_string(j) + " has zero variance");
  }
  const MatrixXd cov = X.transpose() * X / double(panel.events() - 1);
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  VectorXd v = eig.eigenvectors().col(cov.cols() - 1);  // largest eigenvalue
  if (v(1) < 0.0) v = -v;  // load positively on the 3m rate
  return X * v;
}

InstrumentPair build_rotational_instrument(const AnnouncementPanel& panel) {
  const VectorXd pc = ois_principal_component(panel);
  const int T = panel.events();

  MatrixXd U(T, 2);
  U.col(0) = pc;
  U.col(1) = panel.stock;
  Eigen::HouseholderQR<MatrixXd> qr(U);
  MatrixXd Q = qr.householderQ() * MatrixXd::Identity(T, 2);
  MatrixXd R = Q.transpose() * U;
  for (int j = 0; j < 2; ++j)
    if (R(j, j) < 0.0) {
      Q.col(j) = -Q.col(j);
      R.row(j) = -R.row(j);
    }
  if (std::abs(R(0, 0)) < 1e-12 || std::abs(R(1, 1)) < 1e-12)
    throw Error(ErrorCode::DegeneratePanel, "rank-deficient announcement panel");

  // opposite-sign mask: events where the rate surprise and the stock move
  // disagree carry the pure policy content
  std::vector<double> masked;
  for (int t = 0; t < T; ++t) {
    const double a = pc(t);
    const double b = panel.stock(t);
    const bool opposite = (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0);
    if (opposite) masked.push_back(a);
  }
  const double var_pc = population_variance(
      std::vector<double>(pc.data(), pc.data() + pc.size()));
  const double gamma = masked.empty() ? 0.0
                                      : population_variance(masked) / var_pc;
  const double alpha = std::sqrt(gamma);

  Eigen::Matrix2d P;
  P << std::cos(alpha), std::sin(alpha), -std::sin(alpha), std::cos(alpha);
  const MatrixXd rotated = Q * P.transpose();

  // rescale so the pair sums to the principal component
  const Eigen::Vector2d s = rotated.transpose() * pc;
  InstrumentPair out;
  out.m = rotated.col(0) * s(0);
  out.cbi = rotated.col(1) * s(1);
  out.pc = pc;
  out.gamma = gamma;
  out.alpha = alpha;
  return out;
}

VectorXd poor_mans_proxy(const AnnouncementPanel& panel) {
  const int T = panel.events();
  VectorXd out = VectorXd::Zero(T);
  for (int t = 0; t < T; ++t) {
    const double ois3m = panel.ois(t, 1);
    const double stock = panel.stock(t);
    const bool opposite =
        (ois3m > 0.0 && stock < 0.0) || (ois3m < 0.0 && stock > 0.0);
    out(t) = opposite ? ois3m : 0.0;
  }
  return out;
}

RawSeries events_to_monthly(const std::vector<Day>& event_dates,
                            const VectorXd& values, Month first, int count) {
  RawSeries out;
  out.frequency = Frequency::Monthly;
  out.months = month_range(first, count);
  out.values = VectorXd::Zero(count);
  for (size_t t = 0; t < event_dates.size(); ++t) {
    const int idx = event_dates[t].month_index().ym - first.ym;
    if (idx >= 0 && idx < count) out.values(idx) += values(static_cast<int>(t));
  }
  return out;
}

double reliability_indicator(double phi01, double phi02) {
  if (phi01 == 0.0 && phi02 == 0.0)
    throw Error(ErrorCode::BothZero, "reliability: both coefficients zero");
  return phi01 * phi01 / (phi01 * phi01 + phi02 * phi02);
}

}  // namespace favar
