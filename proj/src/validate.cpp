#include "favar/validate.hpp"

#include <cmath>

namespace favar {

ImpactPattern build_pattern(const ModelSpec& spec, const PriorConfig& priors) {
  ImpactPattern pattern(spec);
  for (const auto& t : priors.extra_impact_tags) pattern.set(t.row, t.col, t.tag);
  return pattern;
}

std::vector<Violation> validate_spec(const ModelSpec& spec,
                                     const DataSet& data,
                                     const PriorConfig& priors) {
  std::vector<Violation> v;
  const auto add = [&](ErrorCode code, std::string msg) {
    v.push_back({code, std::move(msg)});
  };

  // MCMC and lag settings
  if (spec.mcmc.total_iterations <= spec.mcmc.burn_in)
    add(ErrorCode::InvalidMcmcSettings,
        "total_iterations must exceed burn_in");
  if (spec.mcmc.thinning < 1)
    add(ErrorCode::InvalidMcmcSettings, "thinning must be >= 1");
  if (spec.var_lag_order < 1)
    add(ErrorCode::InvalidMcmcSettings, "var_lag_order L must be >= 1");
  if (spec.factor_lag_order < 0)
    add(ErrorCode::InvalidMcmcSettings, "factor_lag_order P must be >= 0");
  if (spec.instrument_count < 1)
    add(ErrorCode::InvalidMcmcSettings, "instrument_count k must be >= 1");
  if (spec.policy_rate_index < 0 || spec.policy_rate_index >= spec.n_z())
    add(ErrorCode::DimensionMismatch,
        "policy_rate_index does not address an element of z");

  // data block dimensions
  const int N1 = spec.n_series_per_block();
  if (data.x_out.cols() != N1 || data.x_inf.cols() != N1)
    add(ErrorCode::DimensionMismatch,
        "x blocks must have n_countries + 1 columns (EA19 first)");
  if (data.z.cols() != spec.n_z())
    add(ErrorCode::DimensionMismatch, "z columns do not match var_names_z");
  if (data.m.cols() != spec.instrument_count)
    add(ErrorCode::DimensionMismatch, "m columns do not match instrument_count");
  const int T = data.T();
  if (data.x_inf.rows() != T || data.z.rows() != T || data.m.rows() != T)
    add(ErrorCode::DimensionMismatch, "data blocks differ in length");
  if (T <= spec.var_lag_order + 2)
    add(ErrorCode::DimensionMismatch, "sample too short for the VAR lag order");
  const bool finite = data.x_out.allFinite() && data.x_inf.allFinite() &&
                      data.z.allFinite() && data.m.allFinite();
  if (!finite)
    add(ErrorCode::DimensionMismatch, "data contain missing or non-finite cells");

  // priors
  const double variances[] = {priors.loading_variance,
                              priors.z_loading_variance,
                              priors.impact_variance,
                              priors.proxy_relevance_variance,
                              priors.proxy_noise_variance,
                              priors.constant_variance,
                              priors.sv_initial_variance,
                              priors.state_init_variance};
  for (double x : variances)
    if (!(x > 0.0)) {
      add(ErrorCode::InvalidRestriction, "all prior variances must be positive");
      break;
    }

  // restriction pattern vs the structural zero pattern
  const ImpactPattern structural(spec);
  const int n = spec.n_var();
  for (const SignRestriction& s : spec.sign_restrictions) {
    if (s.variable < 0 || s.variable >= n) {
      add(ErrorCode::InvalidRestriction,
          "sign restriction addresses variable " + std::to_string(s.variable) +
              " outside the system");
      continue;
    }
    if (structural.at(s.variable, 0) == Restriction::Zero)
      add(ErrorCode::InvalidRestriction,
          "sign restriction on an entry the zero pattern forces to 0");
    if (s.sign == 0)
      add(ErrorCode::InvalidRestriction, "sign restriction needs +1 or -1");
  }
  for (const auto& t : priors.extra_impact_tags) {
    if (t.row < 0 || t.row >= n || t.col < 0 || t.col >= n) {
      add(ErrorCode::InvalidRestriction, "impact tag outside the matrix");
      continue;
    }
    if (structural.at(t.row, t.col) == Restriction::Zero &&
        t.tag != Restriction::Zero)
      add(ErrorCode::InvalidRestriction,
          "impact tag conflicts with the structural zero pattern at (" +
              std::to_string(t.row) + "," + std::to_string(t.col) + ")");
  }
  const ImpactPattern pattern = build_pattern(spec, priors);
  for (int i = 0; i < n; ++i)
    if (pattern.at(i, i) == Restriction::Zero)
      add(ErrorCode::InvalidRestriction,
          "diagonal impact entries must stay non-zero (column anchors)");

  // printed shrinkage shapes
  if (priors.fixed_kappa1 <= 0.0 || priors.fixed_kappa2 <= 0.0) {
    const double r = spec.n_endogenous();
    const double L = spec.var_lag_order;
    if (0.5 * r * r * L - 1.0 <= 0.0 || 0.5 * r * (r - 1.0) * L - 1.0 <= 0.0)
      add(ErrorCode::NonPositiveShape,
          "shrinkage shapes r^2 L/2 - 1 and r(r-1)L/2 - 1 must be positive");
  }
  return v;
}

void require_valid(const ModelSpec& spec, const DataSet& data,
                   const PriorConfig& priors) {
  const auto violations = validate_spec(spec, data, priors);
  if (!violations.empty())
    throw Error(violations.front().code, violations.front().message);
}

}  // namespace favar
