#include "favar/types.hpp"

#include <charconv>
#include <cstdio>

namespace favar {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidRestriction: return "InvalidRestriction";
    case ErrorCode::InvalidMcmcSettings: return "InvalidMcmcSettings";
    case ErrorCode::DegenerateData: return "DegenerateData";
    case ErrorCode::ExplosiveVar: return "ExplosiveVar";
    case ErrorCode::CoverageGap: return "CoverageGap";
    case ErrorCode::SingularRegression: return "SingularRegression";
    case ErrorCode::SeriesTooShort: return "SeriesTooShort";
    case ErrorCode::NonPositiveLevel: return "NonPositiveLevel";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptyMonth: return "EmptyMonth";
    case ErrorCode::DegeneratePanel: return "DegeneratePanel";
    case ErrorCode::BothZero: return "BothZero";
    case ErrorCode::SingularPosterior: return "SingularPosterior";
    case ErrorCode::FilterDivergence: return "FilterDivergence";
    case ErrorCode::StuckRegion: return "StuckRegion";
    case ErrorCode::NonPositiveShape: return "NonPositiveShape";
    case ErrorCode::EmptyDraws: return "EmptyDraws";
    case ErrorCode::ZeroImpact: return "ZeroImpact";
    case ErrorCode::DrawMismatch: return "DrawMismatch";
    case ErrorCode::ZeroBenchmark: return "ZeroBenchmark";
    case ErrorCode::InsufficientCountries: return "InsufficientCountries";
    case ErrorCode::PerfectCollinearity: return "PerfectCollinearity";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidRestriction:
    case ErrorCode::InvalidMcmcSettings:
    case ErrorCode::NonPositiveShape:
    case ErrorCode::InsufficientCountries:
    case ErrorCode::ConfigError:
      return 2;
    case ErrorCode::IoError:
      return 4;
    default:
      return 3;
  }
}

std::string to_string(Month m) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d", m.year(), m.month());
  return buf;
}

Month parse_month(const std::string& text) {
  int year = 0, month = 0;
  if (text.size() < 7 || text[4] != '-')
    throw Error(ErrorCode::IoError, "bad date '" + text + "' (want YYYY-MM)");
  auto r1 = std::from_chars(text.data(), text.data() + 4, year);
  auto r2 = std::from_chars(text.data() + 5, text.data() + 7, month);
  if (r1.ec != std::errc() || r2.ec != std::errc() || month < 1 || month > 12)
    throw Error(ErrorCode::IoError, "bad date '" + text + "' (want YYYY-MM)");
  return Month(year, month);
}

std::vector<Month> month_range(Month first, int count) {
  std::vector<Month> out;
  out.reserve(count);
  Month m = first;
  for (int i = 0; i < count; ++i) {
    out.push_back(m);
    m = m.next();
  }
  return out;
}

ImpactPattern::ImpactPattern(const ModelSpec& spec) : n_(spec.n_var()) {
  tags_.assign(static_cast<size_t>(n_) * n_, Restriction::Unrestricted);
  const int r = spec.n_endogenous();
  // endogenous rows never load on instrument shocks
  for (int i = 0; i < r; ++i)
    for (int j = r; j < n_; ++j) set(i, j, Restriction::Zero);
  // instrument rows: one relevance entry on the identified shock plus the
  // own measurement-error diagonal
  for (int i = r; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      set(i, j, (j == 0 || j == i) ? Restriction::Unrestricted
                                   : Restriction::Zero);
  for (const SignRestriction& s : spec.sign_restrictions) {
    const Restriction tag =
        s.sign > 0 ? Restriction::Positive : Restriction::Negative;
    set(s.variable, 0, tag);
  }
}

bool satisfies(double value, Restriction tag) {
  switch (tag) {
    case Restriction::Unrestricted: return true;
    case Restriction::Positive: return value > 0.0;
    case Restriction::Negative: return value < 0.0;
    case Restriction::Zero: return value == 0.0;
  }
  return false;
}

VectorXd McmcState::volatility(const MatrixXd& h, int i) const {
  return h.col(i).array().exp();
}

}  // namespace favar
