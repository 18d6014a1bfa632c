#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace semlift {

inline constexpr const char* kToolName = "semlift";
inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit, hex-encoded; identifies a resolved configuration.
std::string fnv1a64_hex(const std::string& text);

// Everything that determined a run's outputs.
struct RunManifest {
  std::string command;
  std::string config_dump;  // canonical key=value text
  uint64_t seed = 0;
  std::map<std::string, std::string> inputs;
  std::vector<std::string> outputs;
};

// JSON sidecar with tool name/version, command, config hash, resolved
// config, seed, inputs and outputs.
void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path);

}  // namespace semlift
