#pragma once

#include <string>
#include <vector>

#include "favar/pipeline.hpp"
#include "favar/types.hpp"

namespace favar {

// Announcement-day changes: OIS maturities 1m/3m/6m/1y (percentage points)
// and the stock-index change (percent). The 2008-10-08 coordinated
// announcement is excluded by default.
struct AnnouncementPanel {
  std::vector<Day> dates;
  MatrixXd ois;     // events x 4
  VectorXd stock;   // events

  int events() const { return static_cast<int>(stock.size()); }
};

AnnouncementPanel apply_exclusions(const AnnouncementPanel& panel,
                                   const std::vector<std::string>& exclude_dates);

struct InstrumentPair {
  VectorXd m;     // pure policy surprise per event
  VectorXd cbi;   // information surprise per event
  VectorXd pc;    // first principal component the pair sums to
  double gamma = 0.0;  // variance share of opposite-sign events
  double alpha = 0.0;  // rotation angle (radians)
};

// First principal component of the OIS changes (centered, unstandardized,
// sign-normalized to load positively on the 3m column).
VectorXd ois_principal_component(const AnnouncementPanel& panel);

// Rotational untangling of the policy surprise from the information
// surprise; m + cbi reproduces the principal component elementwise.
InstrumentPair build_rotational_instrument(const AnnouncementPanel& panel);

// 3m OIS change where rate and stock move in opposite directions, else 0;
// a zero change on either side counts as sign agreement.
VectorXd poor_mans_proxy(const AnnouncementPanel& panel);

// Sum of event values per calendar month over the given span; empty months 0.
RawSeries events_to_monthly(const std::vector<Day>& event_dates,
                            const VectorXd& values, Month first, int count);

// rho = Phi01^2 / (Phi01^2 + Phi02^2)
double reliability_indicator(double phi01, double phi02);

}  // namespace favar
