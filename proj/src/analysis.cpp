#include "favar/analysis.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>

namespace favar {

IrfSet compute_irfs(const PosteriorDraws& draws, const ModelSpec& spec, int H,
                    int shock_index, const VectorXd& z_stdev, double target) {
  if (draws.empty()) throw Error(ErrorCode::EmptyDraws, "no draws for IRFs");
  const int r = spec.n_endogenous();
  const int L = spec.var_lag_order;
  const int nz = spec.n_z();

  IrfSet irf;
  irf.names.push_back("f_out");
  irf.names.push_back("f_inf");
  for (int j = 0; j < nz; ++j)
    irf.names.push_back(j < static_cast<int>(spec.var_names_z.size())
                            ? spec.var_names_z[j]
                            : "z" + std::to_string(j));
  irf.policy_index = 2 + spec.policy_rate_index;
  irf.target = target;
  irf.shock_index = shock_index;
  irf.z_stdev = z_stdev;

  for (const McmcState& s : draws.states) {
    MatrixXd resp(r, H + 1);
    // companion iteration of the gamma blocks applied to the impact column
    std::vector<VectorXd> lags;  // psi_{h-1}, psi_{h-2}, ...
    VectorXd psi = s.B.block(0, shock_index, r, 1);
    resp.col(0) = psi;
    lags.push_back(psi);
    for (int h = 1; h <= H; ++h) {
      VectorXd next = VectorXd::Zero(r);
      for (int l = 1; l <= L && l <= static_cast<int>(lags.size()); ++l) {
        const VectorXd& prev = lags[lags.size() - l];
        for (int i = 0; i < r; ++i)
          for (int j = 0; j < r; ++j)
            next(i) += s.A(1 + (l - 1) * r + j, i) * prev(j);
      }
      resp.col(h) = next;
      lags.push_back(next);
    }
    // de-standardize z rows, then normalize the policy-rate impact
    for (int j = 0; j < nz; ++j) resp.row(2 + j) *= z_stdev(j);
    const double impact = resp(irf.policy_index, 0);
    if (impact == 0.0 || !std::isfinite(impact))
      throw Error(ErrorCode::ZeroImpact,
                  "policy-rate impact is zero; normalization impossible");
    resp *= target / impact;
    irf.responses.push_back(std::move(resp));
  }
  return irf;
}

CountryIrf decompose_country_responses(const IrfSet& irf,
                                       const PosteriorDraws& draws,
                                       const ModelSpec& spec) {
  if (irf.draws() != draws.size())
    throw Error(ErrorCode::DrawMismatch,
                "IRF and draw counts differ: " + std::to_string(irf.draws()) +
                    " vs " + std::to_string(draws.size()));
  const int H1 = irf.horizons();
  const int N1 = spec.n_series_per_block();
  const int P = spec.factor_lag_order;
  const int nz = spec.n_z();

  CountryIrf out;
  for (int d = 0; d < irf.draws(); ++d) {
    const McmcState& s = draws.states[d];
    const MatrixXd& resp = irf.responses[d];
    for (int block = 0; block < 2; ++block) {
      const MatrixXd& lambda = block == 0 ? s.lambda_out : s.lambda_inf;
      const MatrixXd& lambda_z = block == 0 ? s.lambda_z_out : s.lambda_z_inf;
      MatrixXd common = MatrixXd::Zero(N1, H1);
      MatrixXd channel = MatrixXd::Zero(N1, H1);
      for (int i = 0; i < N1; ++i)
        for (int h = 0; h < H1; ++h) {
          for (int p = 0; p <= P && h - p >= 0; ++p)
            common(i, h) += lambda(i, p) * resp(block, h - p);
          if (spec.include_country_channels)
            for (int p = 0; p <= P && h - p >= 0; ++p)
              for (int j = 0; j < nz; ++j)
                channel(i, h) += lambda_z(i, p * nz + j) *
                                 resp(2 + j, h - p) / irf.z_stdev(j);
        }
      const MatrixXd total = common + channel;
      if (block == 0) {
        out.common_out.push_back(common);
        out.channel_out.push_back(channel);
        out.total_out.push_back(total);
      } else {
        out.common_inf.push_back(common);
        out.channel_inf.push_back(channel);
        out.total_inf.push_back(total);
      }
    }
  }
  return out;
}

CovTable coefficient_of_variation(const std::vector<MatrixXd>& responses,
                                  const std::vector<int>& horizons,
                                  CovBenchmark benchmark) {
  if (responses.empty()) throw Error(ErrorCode::EmptyDraws, "no responses");
  const int N1 = static_cast<int>(responses[0].rows());
  if (N1 < 3)
    throw Error(ErrorCode::InsufficientCountries,
                "coefficient of variation needs >= 2 countries plus EA19");

  CovTable table;
  table.horizons = horizons;
  const int nh = static_cast<int>(horizons.size());
  table.median.resize(nh);
  table.lo.resize(nh);
  table.hi.resize(nh);

  std::vector<double> values;
  for (int hi = 0; hi < nh; ++hi) {
    const int h = horizons[hi];
    values.clear();
    for (const MatrixXd& resp : responses) {
      if (h >= resp.cols())
        throw Error(ErrorCode::DimensionMismatch, "horizon beyond the IRF");
      double bench;
      if (benchmark == CovBenchmark::CountryMean) {
        bench = resp.col(h).tail(N1 - 1).mean();
      } else {
        bench = resp(0, h);  // EA19 row
      }
      if (bench == 0.0 || !std::isfinite(bench))
        throw Error(ErrorCode::ZeroBenchmark,
                    "benchmark response is zero at horizon " +
                        std::to_string(h));
      double ss = 0.0;
      const int n = N1 - 1;
      const double mean = resp.col(h).tail(n).mean();
      for (int i = 1; i < N1; ++i) {
        const double scaled = resp(i, h) / bench;  // benchmark scaled to 1
        const double mu = mean / bench;
        ss += (scaled - mu) * (scaled - mu);
      }
      values.push_back(std::sqrt(ss / (n - 1)));
    }
    table.median(hi) = quantile_type7(values, 0.5);
    table.lo(hi) = quantile_type7(values, 0.16);
    table.hi(hi) = quantile_type7(values, 0.84);
  }
  return table;
}

ExposureFit exposure_fit(const VectorXd& x, const PosteriorDraws& draws,
                         const ModelSpec& spec, int block, int series) {
  const int T = static_cast<int>(x.size());
  const int P = spec.factor_lag_order;
  std::vector<double> cell(draws.size());
  ExposureFit out;
  out.fitted.resize(T);
  for (int t = 0; t < T; ++t) {
    for (int d = 0; d < draws.size(); ++d) {
      const McmcState& s = draws.states[d];
      const MatrixXd& lambda = block == 0 ? s.lambda_out : s.lambda_inf;
      double v = 0.0;
      for (int p = 0; p <= P; ++p) {
        const double f = t - p >= 0 ? s.factors(t - p, block)
                                    : s.presample(-(t - p) - 1, block);
        v += lambda(series, p) * f;
      }
      cell[d] = v;
    }
    out.fitted(t) = quantile_type7(cell, 0.5);
  }
  const double mean = x.mean();
  const double sst = (x.array() - mean).square().sum();
  const double ssr = (x - out.fitted).squaredNorm();
  out.r_squared = 1.0 - ssr / sst;
  return out;
}

double pearson_correlation(const VectorXd& x, const VectorXd& y) {
  const double mx = x.mean(), my = y.mean();
  const double sxy = ((x.array() - mx) * (y.array() - my)).sum();
  const double sxx = (x.array() - mx).square().sum();
  const double syy = (y.array() - my).square().sum();
  if (sxx <= 0.0 || syy <= 0.0)
    throw Error(ErrorCode::PerfectCollinearity,
                "correlation undefined for a constant vector");
  return sxy / std::sqrt(sxx * syy);
}

double semi_partial_correlation(double r_xy, double r_yz, double r_xz) {
  const double denom = 1.0 - r_xz * r_xz;
  if (denom <= 0.0)
    throw Error(ErrorCode::PerfectCollinearity,
                "semi-partial correlation undefined: |r_xz| = 1");
  return (r_xy - r_yz * r_xz) / std::sqrt(denom);
}

double correlation_p_value(double r, int n) {
  if (n < 3) return 1.0;
  const double r2 = std::min(r * r, 1.0 - 1e-15);
  const double t = std::abs(r) * std::sqrt((n - 2) / (1.0 - r2));
  const boost::math::students_t_distribution<double> dist(n - 2);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, t));
}

std::string significance_stars(double p) {
  if (p < 0.01) return "***";
  if (p < 0.05) return "**";
  if (p < 0.1) return "*";
  return "";
}

std::vector<CorrelationRow> correlation_table(
    const VectorXd& channel_peaks, const VectorXd& common_peaks,
    const MatrixXd& characteristics,
    const std::vector<std::string>& characteristic_names) {
  const int n = static_cast<int>(channel_peaks.size());
  if (n < 4)
    throw Error(ErrorCode::InsufficientCountries,
                "correlation table needs >= 4 countries");
  if (characteristics.rows() != n || common_peaks.size() != n)
    throw Error(ErrorCode::DimensionMismatch,
                "characteristics do not align with the peak vectors");

  std::vector<CorrelationRow> rows;
  const double r_cc = pearson_correlation(channel_peaks, common_peaks);
  for (int c = 0; c < characteristics.cols(); ++c) {
    const VectorXd x = characteristics.col(c);
    CorrelationRow row;
    row.characteristic = c < static_cast<int>(characteristic_names.size())
                             ? characteristic_names[c]
                             : "char" + std::to_string(c);
    row.r_channel = pearson_correlation(x, channel_peaks);
    row.r_common = pearson_correlation(x, common_peaks);
    row.p_channel = correlation_p_value(row.r_channel, n);
    row.p_common = correlation_p_value(row.r_common, n);
    row.r_semi_partial =
        semi_partial_correlation(row.r_channel, row.r_common, r_cc);
    row.p_semi_partial = correlation_p_value(row.r_semi_partial, n);
    rows.push_back(row);
  }
  return rows;
}

double peak_response(const std::vector<MatrixXd>& responses, int row) {
  if (responses.empty()) throw Error(ErrorCode::EmptyDraws, "no responses");
  const int H1 = static_cast<int>(responses[0].cols());
  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> cell(responses.size());
  for (int h = 0; h < H1; ++h) {
    for (size_t d = 0; d < responses.size(); ++d) cell[d] = responses[d](row, h);
    peak = std::max(peak, quantile_type7(cell, 0.5));
  }
  return peak;
}

double quantile_type7(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorCode::EmptyDraws, "empty quantile input");
  std::sort(values.begin(), values.end());
  const double idx = p * (static_cast<double>(values.size()) - 1.0);
  const size_t lo = static_cast<size_t>(std::floor(idx));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = idx - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::vector<SummaryRow> summarize(const IrfSet& irf) {
  std::vector<SummaryRow> rows;
  const int H1 = irf.horizons();
  std::vector<double> cell(irf.draws());
  for (size_t v = 0; v < irf.names.size(); ++v)
    for (int h = 0; h < H1; ++h) {
      for (int d = 0; d < irf.draws(); ++d)
        cell[d] = irf.responses[d](static_cast<int>(v), h);
      SummaryRow row;
      row.name = irf.names[v];
      row.horizon = h;
      row.q16 = quantile_type7(cell, 0.16);
      row.q50 = quantile_type7(cell, 0.5);
      row.q84 = quantile_type7(cell, 0.84);
      rows.push_back(row);
    }
  return rows;
}

std::vector<double> summarize_draws(const std::vector<double>& values,
                                    const std::vector<double>& quantiles) {
  std::vector<double> out;
  out.reserve(quantiles.size());
  for (double q : quantiles) out.push_back(quantile_type7(values, q));
  return out;
}

}  // namespace favar
