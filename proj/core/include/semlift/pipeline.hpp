#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "semlift/config.hpp"
#include "semlift/render.hpp"
#include "semlift/scene.hpp"

namespace semlift {

// Runs fn(0..count-1) on `workers` threads pulling from a shared index
// counter. Items never split, so per-item outputs are schedule-independent.
// The first exception thrown by any item is rethrown after the pool drains.
void run_parallel(size_t count, int workers, const std::function<void(size_t)>& fn);

// Renders every frame of the scene into `<image stem>.label.png` under
// out_dir, applying the remap table to the finished maps. Returns the written
// file names in frame order. Output bytes do not depend on `workers`.
std::vector<std::string> render_scene_to_dir(
    const SceneModel& scene, const SemanticPointCloud& cloud,
    const RenderConfig& cfg, const std::map<int, int>& remap, int workers,
    const std::filesystem::path& out_dir);

// `stem.label.png` -> `stem`; `stem.png` -> `stem`.
std::string label_output_name(const std::string& image_name);
std::string strip_label_suffix(const std::string& file_name);

}  // namespace semlift
