#pragma once

#include <string>
#include <vector>

#include "favar/types.hpp"

namespace favar {

struct Violation {
  ErrorCode code;
  std::string message;
};

// Structural checks over the (spec, data, priors) bundle: dimensions,
// MCMC settings, restriction/zero-pattern conflicts, shrinkage shapes.
std::vector<Violation> validate_spec(const ModelSpec& spec,
                                     const DataSet& data,
                                     const PriorConfig& priors);

// throws the first violation as a typed Error
void require_valid(const ModelSpec& spec, const DataSet& data,
                   const PriorConfig& priors);

// base zero pattern plus the spec's sign tags and any extra prior tags
ImpactPattern build_pattern(const ModelSpec& spec, const PriorConfig& priors);

}  // namespace favar
