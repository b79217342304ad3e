#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flapkit/config.hpp"

namespace flapkit::io {

// FNV-1a over the file bytes; stable across platforms.
std::uint64_t fnv1a_file(const std::filesystem::path& path);

// Writes <out_dir>/manifest.json echoing the command, seed, configuration and
// per-output checksums of a run.
void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                    std::uint64_t seed, const cfg::Config& config,
                    const std::vector<std::filesystem::path>& outputs);

}  // namespace flapkit::io
