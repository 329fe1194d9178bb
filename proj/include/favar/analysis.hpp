#pragma once

#include <optional>
#include <string>
#include <vector>

#include "favar/types.hpp"

namespace favar {

// Impulse responses to one structural shock, per retained draw. Responses
// are stored on the reporting scale: z rows de-standardized, every path
// scaled so the policy rate moves by `target` on impact. The z scale vector
// is kept so the decomposition can map z responses back to the estimation
// scale where the Lambda^z loadings live.
struct IrfSet {
  std::vector<std::string> names;        // r endogenous variables
  std::vector<MatrixXd> responses;       // draw -> (r x H+1)
  int policy_index = 0;                  // row within the r variables
  double target = -0.25;
  int shock_index = 0;
  VectorXd z_stdev;
  bool destandardized = true;

  int horizons() const {
    return responses.empty() ? 0 : static_cast<int>(responses[0].cols());
  }
  int draws() const { return static_cast<int>(responses.size()); }
};

IrfSet compute_irfs(const PosteriorDraws& draws, const ModelSpec& spec, int H,
                    int shock_index, const VectorXd& z_stdev,
                    double target = -0.25);

// Country responses split into the common-cycle part (loadings times factor
// response) and the country-channel part (z loadings times z responses).
struct CountryIrf {
  // draw -> (country x H+1); EA19 is row 0
  std::vector<MatrixXd> total_out, common_out, channel_out;
  std::vector<MatrixXd> total_inf, common_inf, channel_inf;
};

CountryIrf decompose_country_responses(const IrfSet& irf,
                                       const PosteriorDraws& draws,
                                       const ModelSpec& spec);

enum class CovBenchmark { CountryMean, Ea19 };

struct CovTable {
  std::vector<int> horizons;
  VectorXd median, lo, hi;  // 16th / 84th percentiles across draws
};

// Cross-country dispersion over the N countries (EA19 row excluded); the
// responses are scaled so the benchmark is 1 before taking the standard
// deviation (sample convention).
CovTable coefficient_of_variation(const std::vector<MatrixXd>& responses,
                                  const std::vector<int>& horizons,
                                  CovBenchmark benchmark);

struct ExposureFit {
  VectorXd fitted;  // pointwise median over draws of the common component
  double r_squared = 0.0;  // not clamped; negative values are informative
};
ExposureFit exposure_fit(const VectorXd& x, const PosteriorDraws& draws,
                         const ModelSpec& spec, int block, int series);

struct CorrelationRow {
  std::string characteristic;
  double r_channel = 0.0, p_channel = 1.0;
  double r_common = 0.0, p_common = 1.0;
  double r_semi_partial = 0.0, p_semi_partial = 1.0;
};
std::vector<CorrelationRow> correlation_table(
    const VectorXd& channel_peaks, const VectorXd& common_peaks,
    const MatrixXd& characteristics,
    const std::vector<std::string>& characteristic_names);

double pearson_correlation(const VectorXd& x, const VectorXd& y);
// r_{y(x.z)} = (r_xy - r_yz r_xz) / sqrt(1 - r_xz^2)
double semi_partial_correlation(double r_xy, double r_yz, double r_xz);
double correlation_p_value(double r, int n);
std::string significance_stars(double p);

// maximum of the across-draw median path over h in [0, H]
double peak_response(const std::vector<MatrixXd>& responses, int row);

// type-7 quantile (linear interpolation) on a copy of the data
double quantile_type7(std::vector<double> values, double p);

struct SummaryRow {
  std::string name;
  int horizon = 0;
  double q16 = 0.0, q50 = 0.0, q84 = 0.0;
};
std::vector<SummaryRow> summarize(const IrfSet& irf);
std::vector<double> summarize_draws(const std::vector<double>& values,
                                    const std::vector<double>& quantiles);

}  // namespace favar
