#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace favar {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

// ---------------------------------------------------------------------- //
// errors
// ---------------------------------------------------------------------- //

// Machine-readable categories; the CLI maps them to exit codes
// (2 = validation, 3 = numerical, 4 = io).
enum class ErrorCode {
  DimensionMismatch,
  InvalidRestriction,
  InvalidMcmcSettings,
  DegenerateData,
  ExplosiveVar,
  CoverageGap,
  SingularRegression,
  SeriesTooShort,
  NonPositiveLevel,
  ZeroVariance,
  EmptyMonth,
  DegeneratePanel,
  BothZero,
  SingularPosterior,
  FilterDivergence,
  StuckRegion,
  NonPositiveShape,
  EmptyDraws,
  ZeroImpact,
  DrawMismatch,
  ZeroBenchmark,
  InsufficientCountries,
  PerfectCollinearity,
  IoError,
  ConfigError,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code);

// validation failures, numerical failures, io failures
int exit_code_for(ErrorCode code);

// ---------------------------------------------------------------------- //
// calendar
// ---------------------------------------------------------------------- //

// Month index encoded as year*12 + (month-1); keeps date arithmetic integral.
struct Month {
  int ym = 0;

  Month() = default;
  Month(int year, int month) : ym(year * 12 + (month - 1)) {}

  int year() const { return ym / 12; }
  int month() const { return ym % 12 + 1; }

  Month next() const { Month m; m.ym = ym + 1; return m; }
  bool operator==(const Month&) const = default;
  auto operator<=>(const Month&) const = default;
};

std::string to_string(Month m);                 // "YYYY-MM"
Month parse_month(const std::string& text);     // accepts YYYY-MM or YYYY-MM-DD

std::vector<Month> month_range(Month first, int count);

// ---------------------------------------------------------------------- //
// model specification
// ---------------------------------------------------------------------- //

enum class Restriction { Unrestricted, Positive, Negative, Zero };

struct SignRestriction {
  int variable = 0;   // row into y = (f_out, f_inf, z...): 0,1 are the factors
  int sign = 0;       // +1 or -1 at h = 0 on the identified shock column
};

struct McmcSettings {
  int total_iterations = 18000;
  int burn_in = 3000;
  int thinning = 5;

  int retained() const { return (total_iterations - burn_in) / thinning; }
};

struct ModelSpec {
  int n_countries = 0;                    // excluding EA19
  std::vector<std::string> var_names_z;   // macro-financial series names
  int factor_lag_order = 0;               // P, baseline 0
  int var_lag_order = 6;                  // L, baseline 6
  bool include_country_channels = false;  // Lambda^z active or muted
  int policy_rate_index = 0;              // index into z
  std::vector<SignRestriction> sign_restrictions;
  int instrument_count = 1;               // k, baseline 1
  McmcSettings mcmc;

  int n_z() const { return static_cast<int>(var_names_z.size()); }
  int n_endogenous() const { return 2 + n_z(); }            // r
  int n_var() const { return n_endogenous() + instrument_count; }  // n = r + k
  int n_series_per_block() const { return n_countries + 1; }
  // companion blocks; one extra lag so the t=0 regression row has its
  // pre-sample regressors after the backward draw
  int companion_blocks() const {
    return std::max(var_lag_order + 1, factor_lag_order + 1);
  }
  int state_dim() const { return n_endogenous() * companion_blocks(); }
};

// ---------------------------------------------------------------------- //
// data
// ---------------------------------------------------------------------- //

struct DataSet {
  std::vector<Month> dates;
  MatrixXd x_out;       // T x (N+1), EA19 in column 0, annual growth (percent)
  MatrixXd x_inf;       // T x (N+1), EA19 in column 0
  MatrixXd z;           // T x nz, standardized for estimation
  MatrixXd m;           // T x k, percentage-point changes
  VectorXd z_mean;      // de-standardization parameters
  VectorXd z_stdev;
  std::vector<std::string> country_names;  // EA19 first
  std::vector<std::string> z_names;

  int T() const { return static_cast<int>(x_out.rows()); }
};

// ---------------------------------------------------------------------- //
// priors (appendix-C constants are the defaults)
// ---------------------------------------------------------------------- //

struct PriorConfig {
  double loading_mean = 0.0;
  double loading_variance = 10.0;
  double z_loading_mean = 0.0;
  double z_loading_variance = 10.0;
  double impact_mean = 0.0;        // beta_{i,j}
  double impact_variance = 1.0;    // v_{i,j}
  double proxy_relevance_mean = 0.0;       // phi_{0,1}
  double proxy_relevance_variance = 10.0;  // V_{0,1}
  double proxy_noise_mean = 0.0;           // phi_{0,2}
  double proxy_noise_variance = 1e-4;      // V_{0,2} = 0.01^2
  double constant_variance = 1e4;          // 100^2
  double sv_initial_variance = 10.0;
  double state_init_variance = 10.0;       // Kalman prior covariance at t=0
  double kappa_max = 10.0;
  // fixed shrinkage for configurations whose flat kappa prior must be
  // bypassed (the Geweke run); <= 0 means "sample kappas"
  double fixed_kappa1 = -1.0;
  double fixed_kappa2 = -1.0;
  // additional per-entry impact tags layered over the structural pattern
  struct ImpactTag {
    int row = 0, col = 0;
    Restriction tag = Restriction::Unrestricted;
  };
  std::vector<ImpactTag> extra_impact_tags;

  // Minnesota prior mean for equation i, variable j, lag l
  // (unit roots except the two factor equations, which hold growth rates)
  static double minnesota_mean(int i, int j, int l) {
    return (l == 1 && i == j && i >= 2) ? 1.0 : 0.0;
  }
  double minnesota_variance(int i, int j, int l, double kappa1, double kappa2,
                            const VectorXd& sigma2) const {
    const double l2 = static_cast<double>(l) * l;
    if (i == j) return kappa1 / l2;
    return kappa1 * kappa2 * sigma2(i) / (l2 * sigma2(j));
  }
};

// Restriction pattern over the n x n impact matrix B.
// Rows 0..r-1 are the endogenous equations, rows r..n-1 the instrument(s).
class ImpactPattern {
 public:
  ImpactPattern() = default;
  ImpactPattern(const ModelSpec& spec);

  Restriction at(int row, int col) const { return tags_[row * n_ + col]; }
  void set(int row, int col, Restriction r) { tags_[row * n_ + col] = r; }
  int size() const { return n_; }

 private:
  int n_ = 0;
  std::vector<Restriction> tags_;
};

bool satisfies(double value, Restriction tag);

// ---------------------------------------------------------------------- //
// sampler state
// ---------------------------------------------------------------------- //

// One full parameter configuration. Loadings are stored per block with the
// EA19 row pinned (1 contemporaneous, 0 on lags; z-loadings 0).
struct McmcState {
  // (N+1) x (P+1); column p = loading on f_{t-p}
  MatrixXd lambda_out;
  MatrixXd lambda_inf;
  // (N+1) x nz*(P+1); block p = loadings on z_{t-p}
  MatrixXd lambda_z_out;
  MatrixXd lambda_z_inf;

  // log-volatility paths, T x (N+1); initial conditions per series
  MatrixXd h_out;
  MatrixXd h_inf;
  VectorXd h0_out;
  VectorXd h0_inf;

  // horseshoe components (lam/nu_lam are T x (N+1))
  MatrixXd lam_h_out, lam_h_inf;
  MatrixXd nu_lam_out, nu_lam_inf;
  VectorXd tau_h_out, tau_h_inf;
  VectorXd nu_tau_out, nu_tau_inf;

  MatrixXd factors;    // T x 2: (f_out, f_inf)
  MatrixXd presample;  // (q-1) x r: row j = g_{-1-j} = (f', z') before the sample
  MatrixXd A;          // K x n, K = 1 + n*L; instrument columns identically 0
  MatrixXd B;          // n x n impact matrix

  double kappa1 = 1.0;
  double kappa2 = 1.0;
  VectorXd sigma_scale;  // r-vector of AR(L) residual variances

  VectorXd volatility(const MatrixXd& h, int i) const;  // exp(h.col(i))
};

// Pinned-entry bookkeeping shared by samplers and validation.
struct Pinned {
  static bool loading_pinned(int series) { return series == 0; }  // EA19 row
};

// ---------------------------------------------------------------------- //
// retained draws
// ---------------------------------------------------------------------- //

struct PosteriorDraws {
  std::vector<McmcState> states;
  std::vector<int> draw_indices;   // sweep number of each retained draw
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(states.size()); }
  bool empty() const { return states.empty(); }
};

}  // namespace favar
