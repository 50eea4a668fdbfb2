#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "bvs/sampler.hpp"

namespace bvs {

// Portable chain artifact. Line 1 is a single-line JSON header (format tag,
// factor names, prior, chain config, seed, move counts); the rest is CSV
// with one row per draw: gamma bits, then beta (intercept first). Doubles
// use the shortest round-trip representation, so reading back is lossless.
// Wall time is deliberately absent: the artifact is a pure function of
// data, config and seed.
void write_draws(std::ostream& os, const PosteriorDraws& draws);
PosteriorDraws read_draws(std::istream& is);

void save_draws(const std::filesystem::path& path, const PosteriorDraws& draws);
PosteriorDraws load_draws(const std::filesystem::path& path);

std::string chain_to_json(const ChainConfig& chain);
ChainConfig chain_from_json(std::string_view json_text);

}  // namespace bvs
