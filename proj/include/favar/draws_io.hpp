#pragma once

#include <map>
#include <string>

#include "favar/types.hpp"

namespace favar {

// Retained draws persisted as one CSV per parameter block (one row per
// retained draw, fixed column order) plus manifest.json carrying the spec,
// priors, seed and a SHA-256 content hash over the block files.
void save_draws(const std::string& dir, const PosteriorDraws& draws,
                const ModelSpec& spec, const PriorConfig& priors,
                const std::map<std::string, std::string>& extra = {});

struct LoadedDraws {
  PosteriorDraws draws;
  ModelSpec spec;
  PriorConfig priors;
};
LoadedDraws load_draws(const std::string& dir);

std::string sha256_file(const std::string& path);
std::string dataset_content_hash(const std::string& dir);

// spec/prior JSON round-trip (shared with the manifest and the CLI)
std::string spec_to_json(const ModelSpec& spec);
std::string priors_to_json(const PriorConfig& priors);
ModelSpec spec_from_json(const std::string& text);
PriorConfig priors_from_json(const std::string& text);

}  // namespace favar
