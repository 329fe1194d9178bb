#pragma once

#include <cstdint>

#include "favar/types.hpp"

namespace favar {

// first principal component of a (per-series standardized) block, scaled so
// the EA19 column's regression coefficient on it equals 1 and sign-aligned
// with the EA19 series
VectorXd principal_component_factor(const MatrixXd& block);

// Appendix-D initialization: PCA factors, h = log(var) + 1, unit horseshoe,
// identity-pattern B, zero A, single-pass loadings.
McmcState initialize_state(const ModelSpec& spec, const DataSet& data,
                           const PriorConfig& priors, std::uint64_t seed);

}  // namespace favar
