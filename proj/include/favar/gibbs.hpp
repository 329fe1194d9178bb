#pragma once

#include <cstdint>
#include <functional>

#include "favar/impact.hpp"
#include "favar/types.hpp"

namespace favar {

// Full sweep driver in the printed step order:
//   1 loadings, 2 volatilities, 3 initial conditions, 4 horseshoe,
//   5 VAR coefficients, 6 impact matrix, 7 shrinkage, 8 factors.
class GibbsSampler {
 public:
  GibbsSampler(const ModelSpec& spec, const DataSet& data,
               const PriorConfig& priors, std::uint64_t seed);

  // one full sweep; the index seeds the per-step substreams
  void sweep(int sweep_index);

  // run total_iterations sweeps, retaining per the MCMC settings
  PosteriorDraws run(const std::function<void(int, int)>& progress = {});

  McmcState& state() { return state_; }
  const McmcState& state() const { return state_; }
  const ImpactDiagnostics& diagnostics() const { return diag_; }
  const ImpactPattern& pattern() const { return pattern_; }

 private:
  ModelSpec spec_;
  DataSet data_;
  PriorConfig priors_;
  std::uint64_t seed_;
  McmcState state_;
  ImpactPattern pattern_;
  ImpactDiagnostics diag_;
};

}  // namespace favar
