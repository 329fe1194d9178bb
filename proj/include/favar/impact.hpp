#pragma once

#include <random>
#include <vector>

#include "favar/types.hpp"

namespace favar {

// per-entry prior moments over B
struct ImpactPriors {
  MatrixXd mean;
  MatrixXd variance;
};
ImpactPriors impact_priors(const ModelSpec& spec, const PriorConfig& priors);

struct ImpactDiagnostics {
  long long u_proposals = 0, u_accepts = 0;
  long long r1_proposals = 0, r1_accepts = 0;
  // consecutive-rejection counter backing the StuckRegion guard
  long long r1_consecutive_rejects = 0;
};

// (u, w) parameterization of one column: u is the Schur-complement
// coordinate of the anchor entry, w the remaining column entries.
struct ColumnTransform {
  int col = 0;
  double u = 0.0;
  VectorXd w;                   // n-1 entries in permuted order
  std::vector<int> perm;        // permuted position -> original index
  std::vector<int> free_idx;    // positions in w that are not tagged zero
};

ColumnTransform column_to_uw(const MatrixXd& B, int col,
                             const ImpactPattern& pattern);
VectorXd column_from_uw(const MatrixXd& B, const ColumnTransform& t);

// exact draw kernel for the truncated normal over the free entries;
// rejection from the untruncated normal with a sequential-conditional
// fallback (exact univariate truncated conditionals per coordinate)
VectorXd draw_sign_truncated_mvn(std::mt19937_64& rng, const VectorXd& mean,
                                 const MatrixXd& cov,
                                 const std::vector<Restriction>& tags,
                                 const VectorXd& start);

// grid inverse-CDF proposal from |u|^-T exp(-(g1/u + g2/u^2)/2) on the
// admissible region, followed by the prior-ratio acceptance
double sample_u(std::mt19937_64& rng, double u_current, int T, double gamma1,
                double gamma2, double offset, double prior_mean,
                double prior_var, Restriction anchor_tag,
                ImpactDiagnostics& diag);

// Step 6: column-by-column redraw of B given VAR residuals U (T x n)
void sample_impact_matrix(McmcState& state, const ModelSpec& spec,
                          const PriorConfig& priors,
                          const ImpactPattern& pattern, const MatrixXd& U,
                          std::mt19937_64& rng, ImpactDiagnostics& diag);

// likelihood exponent coefficients of u^-1 and u^-2, exposed so tests can
// verify the factored kernel against the full likelihood
struct UKernelCoefficients {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
};

}  // namespace favar
