#include "semlift/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "semlift/errors.hpp"

namespace semlift {

std::string fnv1a64_hex(const std::string& text) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return os.str();
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& path) {
  nlohmann::json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["command"] = manifest.command;
  j["config_hash"] = fnv1a64_hex(manifest.config_dump);
  j["config"] = manifest.config_dump;
  j["seed"] = manifest.seed;
  j["inputs"] = manifest.inputs;
  j["outputs"] = manifest.outputs;

  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << j.dump(2) << "\n";
}

}  // namespace semlift
