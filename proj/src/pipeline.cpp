#include "favar/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>

#include <Eigen/Dense>

namespace favar {

Day parse_day(const std::string& text) {
  Day d;
  if (text.size() < 10 || text[4] != '-' || text[7] != '-')
    throw Error(ErrorCode::IoError, "bad day '" + text + "' (want YYYY-MM-DD)");
  auto ok = [](std::from_chars_result r) { return r.ec == std::errc(); };
  if (!ok(std::from_chars(text.data(), text.data() + 4, d.year)) ||
      !ok(std::from_chars(text.data() + 5, text.data() + 7, d.month)) ||
      !ok(std::from_chars(text.data() + 8, text.data() + 10, d.day)) ||
      d.month < 1 || d.month > 12 || d.day < 1 || d.day > 31)
    throw Error(ErrorCode::IoError, "bad day '" + text + "'");
  return d;
}

// ---------------------------------------------------------------------- //
// Chow-Lin
// ---------------------------------------------------------------------- //

namespace {

// n_q x n_m aggregator; rows pick the three months of each quarter
MatrixXd aggregation_matrix(int n_q, MatchConvention convention) {
  const int n_m = 3 * n_q;
  MatrixXd C = MatrixXd::Zero(n_q, n_m);
  const double w = convention == MatchConvention::Average ? 1.0 / 3.0 : 1.0;
  for (int q = 0; q < n_q; ++q)
    for (int j = 0; j < 3; ++j) C(q, 3 * q + j) = w;
  return C;
}

MatrixXd ar1_covariance(int n, double rho) {
  MatrixXd omega(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      omega(i, j) = std::pow(rho, std::abs(i - j));
  return omega / (1.0 - rho * rho);
}

struct ChowLinFit {
  VectorXd beta;
  VectorXd monthly;
  double loglik = -std::numeric_limits<double>::infinity();
};

ChowLinFit chow_lin_at_rho(const VectorXd& yq, const MatrixXd& Xm,
                           const MatrixXd& C, double rho) {
  const int n_q = static_cast<int>(yq.size());
  const MatrixXd omega = ar1_covariance(static_cast<int>(Xm.rows()), rho);
  const MatrixXd Vq = C * omega * C.transpose();
  Eigen::LDLT<MatrixXd> Vq_ldlt(Vq);
  const MatrixXd Xq = C * Xm;
  const MatrixXd ViX = Vq_ldlt.solve(Xq);
  const MatrixXd XtViX = Xq.transpose() * ViX;
  Eigen::FullPivLU<MatrixXd> lu(XtViX);
  if (!lu.isInvertible())
    throw Error(ErrorCode::SingularRegression,
                "chow-lin: collinear indicators");
  ChowLinFit fit;
  fit.beta = lu.solve(Xq.transpose() * Vq_ldlt.solve(yq));
  const VectorXd resid_q = yq - Xq * fit.beta;
  // distribute low-frequency residuals: y_m = X_m b + Omega C' Vq^-1 resid
  fit.monthly = Xm * fit.beta +
                omega * C.transpose() * Vq_ldlt.solve(resid_q);
  const double rss = resid_q.dot(Vq_ldlt.solve(resid_q));
  double logdet = 0.0;
  for (int i = 0; i < n_q; ++i) logdet += std::log(Vq_ldlt.vectorD()(i));
  const double sigma2 = rss / n_q;
  fit.loglik = -0.5 * (n_q * std::log(std::max(sigma2, 1e-300)) + logdet);
  return fit;
}

}  // namespace

RawSeries chow_lin_interpolate(const RawSeries& quarterly,
                               const std::vector<RawSeries>& indicators,
                               MatchConvention convention, double fixed_ar) {
  if (quarterly.frequency != Frequency::Quarterly)
    throw Error(ErrorCode::DimensionMismatch, "chow-lin: series not quarterly");
  if (indicators.empty())
    throw Error(ErrorCode::CoverageGap, "chow-lin: need at least one indicator");
  const int n_q = quarterly.size();
  const int n_m = 3 * n_q;
  const Month first = quarterly.months.front();

  std::vector<VectorXd> columns;
  for (size_t k = 0; k < indicators.size(); ++k) {
    const RawSeries& ind = indicators[k];
    if (ind.frequency != Frequency::Monthly)
      throw Error(ErrorCode::DimensionMismatch, "chow-lin: indicator not monthly");
    const int offset = first.ym - ind.months.front().ym;
    if (offset < 0 || offset + n_m > ind.size())
      throw Error(ErrorCode::CoverageGap,
                  "chow-lin: indicator '" + ind.name +
                      "' does not cover the quarterly span");
    VectorXd col = ind.values.segment(offset, n_m);
    // a flat indicator duplicates the intercept; drop it instead of failing
    if ((col.array() - col.mean()).abs().maxCoeff() > 1e-12)
      columns.push_back(std::move(col));
  }
  MatrixXd Xm(n_m, 1 + static_cast<int>(columns.size()));
  Xm.col(0).setOnes();
  for (size_t k = 0; k < columns.size(); ++k)
    Xm.col(static_cast<int>(k) + 1) = columns[k];

  const MatrixXd C = aggregation_matrix(n_q, convention);
  ChowLinFit best;
  if (std::isnan(fixed_ar)) {
    for (double rho = -0.98; rho <= 0.985; rho += 0.02) {
      ChowLinFit fit = chow_lin_at_rho(quarterly.values, Xm, C, rho);
      if (fit.loglik > best.loglik) best = std::move(fit);
    }
  } else {
    best = chow_lin_at_rho(quarterly.values, Xm, C, fixed_ar);
  }

  RawSeries out;
  out.frequency = Frequency::Monthly;
  out.months = month_range(first, n_m);
  out.values = best.monthly;
  out.name = quarterly.name;
  return out;
}

// ---------------------------------------------------------------------- //
// additive outliers
// ---------------------------------------------------------------------- //

namespace {

struct ArFit {
  VectorXd phi;   // AR coefficients, order p
  double intercept = 0.0;
  VectorXd resid;  // length T - p, aligned to t = p..T-1
};

ArFit fit_ar(const VectorXd& y, int p) {
  const int T = static_cast<int>(y.size());
  const int n = T - p;
  MatrixXd X(n, p + 1);
  X.col(0).setOnes();
  for (int l = 1; l <= p; ++l) X.col(l) = y.segment(p - l, n);
  const VectorXd rhs = y.segment(p, n);
  const VectorXd coef =
      (X.transpose() * X).ldlt().solve(X.transpose() * rhs);
  ArFit fit;
  fit.intercept = coef(0);
  fit.phi = coef.segment(1, p);
  fit.resid = rhs - X * coef;
  return fit;
}

int select_ar_order(const VectorXd& y, int max_order) {
  const int T = static_cast<int>(y.size());
  int best_p = 0;
  double best_bic = std::numeric_limits<double>::infinity();
  for (int p = 0; p <= max_order; ++p) {
    if (T - p < 2 * (p + 1) + 4) break;
    double sigma2;
    int n;
    if (p == 0) {
      const double mean = y.mean();
      n = T;
      sigma2 = (y.array() - mean).square().sum() / n;
    } else {
      ArFit fit = fit_ar(y, p);
      n = static_cast<int>(fit.resid.size());
      sigma2 = fit.resid.squaredNorm() / n;
    }
    const double bic =
        n * std::log(std::max(sigma2, 1e-300)) + (p + 1) * std::log(double(n));
    if (bic < best_bic) {
      best_bic = bic;
      best_p = p;
    }
  }
  return best_p;
}

double robust_scale(const VectorXd& resid) {
  std::vector<double> a(resid.data(), resid.data() + resid.size());
  const auto mid = a.begin() + a.size() / 2;
  std::nth_element(a.begin(), mid, a.end());
  const double med = *mid;
  for (auto& v : a) v = std::abs(v - med);
  std::nth_element(a.begin(), a.begin() + a.size() / 2, a.end());
  return 1.4826 * a[a.size() / 2];
}

}  // namespace

std::pair<RawSeries, OutlierReport> adjust_additive_outliers(
    const RawSeries& series, double critical_value) {
  if (series.frequency != Frequency::Monthly &&
      series.frequency != Frequency::Quarterly)
    throw Error(ErrorCode::DimensionMismatch,
                "outlier adjustment expects a monthly or quarterly series");
  const int T = series.size();
  if (T < 36)
    throw Error(ErrorCode::SeriesTooShort,
                "outlier adjustment needs >= 36 observations, got " +
                    std::to_string(T));

  RawSeries adjusted = series;
  OutlierReport report;
  report.series = series.name;
  std::map<int, double> originals;  // time index -> original value

  const int max_pass = std::max(8, T / 10);
  for (int pass = 0; pass < max_pass; ++pass) {
    const VectorXd& y = adjusted.values;
    const int p = select_ar_order(y, 12);
    const ArFit fit = p > 0 ? fit_ar(y, p) : ArFit{VectorXd(), y.mean(),
                                                   y.array() - y.mean()};
    const double sigma = robust_scale(fit.resid);
    if (!(sigma > 0.0)) break;

    // AO at s shifts residual t by omega * pi_{t-s}, pi = (1, -phi_1, ...)
    VectorXd pi(p + 1);
    pi(0) = 1.0;
    for (int l = 1; l <= p; ++l) pi(l) = -fit.phi(l - 1);

    double best_stat = 0.0;
    int best_s = -1;
    double best_omega = 0.0;
    const int r0 = p;  // residual t corresponds to y index t (t >= p)
    for (int s = p; s < T; ++s) {
      double num = 0.0, den = 0.0;
      for (int j = 0; j <= p && s + j < T; ++j) {
        num += fit.resid(s + j - r0) * pi(j);
        den += pi(j) * pi(j);
      }
      const double omega = num / den;
      const double stat = omega * std::sqrt(den) / sigma;
      if (std::abs(stat) > std::abs(best_stat)) {
        best_stat = stat;
        best_s = s;
        best_omega = omega;
      }
    }
    if (best_s < 0 || std::abs(best_stat) <= critical_value) break;

    if (!originals.count(best_s)) originals[best_s] = adjusted.values(best_s);
    adjusted.values(best_s) -= best_omega;  // model-implied value
    OutlierRecord rec;
    rec.date = series.months.empty() ? Month() : series.months[best_s];
    rec.original = originals[best_s];
    rec.adjusted = adjusted.values(best_s);
    rec.statistic = best_stat;
    // an earlier pass may have touched this date already; keep the last word
    auto it = std::find_if(report.records.begin(), report.records.end(),
                           [&](const OutlierRecord& r) { return r.date == rec.date; });
    if (it == report.records.end()) report.records.push_back(rec);
    else *it = rec;
  }
  return {std::move(adjusted), std::move(report)};
}

// ---------------------------------------------------------------------- //
// growth rates, standardization, aggregation
// ---------------------------------------------------------------------- //

RawSeries annual_growth(const RawSeries& series, GrowthMethod method) {
  if (series.frequency != Frequency::Monthly)
    throw Error(ErrorCode::DimensionMismatch, "annual growth expects monthly data");
  const int T = series.size();
  if (T <= 12)
    throw Error(ErrorCode::SeriesTooShort, "annual growth needs > 12 months");
  if (method != GrowthMethod::Standard)
    for (int t = 0; t < T; ++t)
      if (!(series.values(t) > 0.0))
        throw Error(ErrorCode::NonPositiveLevel,
                    "annual growth: non-positive level in '" + series.name +
                        "' at " + to_string(series.months[t]));

  RawSeries out;
  out.frequency = Frequency::Monthly;
  out.months.assign(series.months.begin() + 12, series.months.end());
  out.values.resize(T - 12);
  out.name = series.name;
  for (int t = 12; t < T; ++t) {
    const double xt = series.values(t);
    const double xl = series.values(t - 12);
    double g = 0.0;
    switch (method) {
      case GrowthMethod::Standard: g = 100.0 * (xt / xl - 1.0); break;
      case GrowthMethod::Log: g = 100.0 * (std::log(xt) - std::log(xl)); break;
      case GrowthMethod::Symmetric:
        g = 100.0 * (xt - xl) / (0.5 * (xt + xl));
        break;
    }
    out.values(t - 12) = g;
  }
  return out;
}

Standardization standardize_z(const MatrixXd& z) {
  const int T = static_cast<int>(z.rows());
  const int n = static_cast<int>(z.cols());
  Standardization s;
  s.standardized.resize(T, n);
  s.mean.resize(n);
  s.stdev.resize(n);
  for (int j = 0; j < n; ++j) {
    const double mean = z.col(j).mean();
    const double ss = (z.col(j).array() - mean).square().sum();
    if (T < 2 || ss <= 0.0)
      throw Error(ErrorCode::ZeroVariance,
                  "standardize: column " + std::to_string(j) + " has zero variance");
    const double sd = std::sqrt(ss / (T - 1));
    s.mean(j) = mean;
    s.stdev(j) = sd;
    s.standardized.col(j) = (z.col(j).array() - mean) / sd;
  }
  return s;
}

MatrixXd destandardize_z(const MatrixXd& z, const VectorXd& mean,
                         const VectorXd& stdev) {
  MatrixXd out(z.rows(), z.cols());
  for (int j = 0; j < z.cols(); ++j)
    out.col(j) = z.col(j) * stdev(j) + VectorXd::Constant(z.rows(), mean(j));
  return out;
}

RawSeries aggregate_to_monthly(const RawSeries& daily, AggregationRule rule) {
  if (daily.frequency != Frequency::Daily)
    throw Error(ErrorCode::DimensionMismatch, "aggregate expects daily data");
  if (daily.size() == 0)
    throw Error(ErrorCode::EmptyMonth, "aggregate: empty series");

  std::map<int, std::vector<double>> buckets;
  for (int t = 0; t < daily.size(); ++t)
    buckets[daily.days[t].month_index().ym].push_back(daily.values(t));

  // months inside the span with no observations are errors
  for (int ym = buckets.begin()->first; ym <= buckets.rbegin()->first; ++ym)
    if (!buckets.count(ym)) {
      Month m;
      m.ym = ym;
      throw Error(ErrorCode::EmptyMonth,
                  "aggregate: no observations in " + to_string(m));
    }

  RawSeries out;
  out.frequency = Frequency::Monthly;
  out.name = daily.name;
  out.values.resize(static_cast<int>(buckets.size()));
  int i = 0;
  for (const auto& [ym, vals] : buckets) {
    Month m;
    m.ym = ym;
    out.months.push_back(m);
    double v = 0.0;
    switch (rule) {
      case AggregationRule::Mean: {
        for (double x : vals) v += x;
        v /= static_cast<double>(vals.size());
        break;
      }
      case AggregationRule::Sum: {
        for (double x : vals) v += x;
        break;
      }
      case AggregationRule::EndOfMonth: v = vals.back(); break;
    }
    out.values(i++) = v;
  }
  return out;
}

std::pair<Month, int> common_span(const std::vector<const RawSeries*>& series) {
  int lo = std::numeric_limits<int>::min();
  int hi = std::numeric_limits<int>::max();
  for (const RawSeries* s : series) {
    lo = std::max(lo, s->months.front().ym);
    hi = std::min(hi, s->months.back().ym);
  }
  if (hi < lo)
    throw Error(ErrorCode::CoverageGap, "series have no common span");
  Month first;
  first.ym = lo;
  return {first, hi - lo + 1};
}

VectorXd slice_months(const RawSeries& s, Month first, int count) {
  const int offset = first.ym - s.months.front().ym;
  if (offset < 0 || offset + count > s.size())
    throw Error(ErrorCode::CoverageGap,
                "series '" + s.name + "' does not cover the requested span");
  return s.values.segment(offset, count);
}

}  // namespace favar
