#pragma once

#include <string>
#include <vector>

#include "favar/types.hpp"

namespace favar {

enum class Frequency { Daily, Monthly, Quarterly };

// A calendar day, only needed for daily inputs before aggregation.
struct Day {
  int year = 0, month = 0, day = 0;
  Month month_index() const { return Month(year, month); }
};

Day parse_day(const std::string& text);  // YYYY-MM-DD

struct RawSeries {
  Frequency frequency = Frequency::Monthly;
  std::vector<Month> months;  // monthly/quarterly (quarter stamped by its first month)
  std::vector<Day> days;      // daily only
  VectorXd values;
  std::string name;

  int size() const { return static_cast<int>(values.size()); }
};

struct OutlierRecord {
  Month date;
  double original = 0.0;
  double adjusted = 0.0;
  double statistic = 0.0;
};

struct OutlierReport {
  std::string series;
  std::vector<OutlierRecord> records;
};

enum class GrowthMethod { Standard, Log, Symmetric };
enum class AggregationRule { Mean, Sum, EndOfMonth };
enum class MatchConvention { Average, Sum };

// Chow-Lin temporal disaggregation of a quarterly series against monthly
// indicators: GLS with AR(1) residuals, the AR parameter picked by maximum
// likelihood on a grid over (-0.99, 0.99). Every quarter's three monthly
// values average (or sum) back to the quarterly figure.
RawSeries chow_lin_interpolate(const RawSeries& quarterly,
                               const std::vector<RawSeries>& indicators,
                               MatchConvention convention = MatchConvention::Average,
                               double fixed_ar = std::nan(""));

// Iterative additive-outlier detection against an AR model picked by BIC
// (order <= 12), robust scale 1.4826*MAD; flagged points are replaced by the
// model-implied value. Idempotent at a fixed critical value.
std::pair<RawSeries, OutlierReport> adjust_additive_outliers(
    const RawSeries& series, double critical_value = 3.5);

RawSeries annual_growth(const RawSeries& series, GrowthMethod method);

struct Standardization {
  MatrixXd standardized;
  VectorXd mean;
  VectorXd stdev;  // sample (n-1) convention
};
Standardization standardize_z(const MatrixXd& z);
MatrixXd destandardize_z(const MatrixXd& z, const VectorXd& mean,
                         const VectorXd& stdev);

RawSeries aggregate_to_monthly(const RawSeries& daily, AggregationRule rule);

// intersect monthly series onto a common span; throws CoverageGap when empty
std::pair<Month, int> common_span(const std::vector<const RawSeries*>& series);
VectorXd slice_months(const RawSeries& s, Month first, int count);

}  // namespace favar
