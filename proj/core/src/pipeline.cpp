#include "semlift/pipeline.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "semlift/errors.hpp"
#include "semlift/png_io.hpp"

namespace semlift {

void run_parallel(size_t count, int workers,
                  const std::function<void(size_t)>& fn) {
  if (workers < 1) throw std::invalid_argument("run_parallel: workers must be >= 1");
  if (count == 0) return;
  if (workers == 1 || count == 1) {
    for (size_t i = 0; i < count; ++i) fn(i);
    return;
  }

  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto body = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };

  std::vector<std::thread> pool;
  const int n = static_cast<int>(std::min<size_t>(workers, count));
  pool.reserve(n);
  for (int t = 0; t < n; ++t) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string label_output_name(const std::string& image_name) {
  const size_t dot = image_name.find_last_of('.');
  const std::string stem =
      dot == std::string::npos ? image_name : image_name.substr(0, dot);
  return stem + ".label.png";
}

std::string strip_label_suffix(const std::string& file_name) {
  std::string stem = file_name;
  const size_t dot = stem.find_last_of('.');
  if (dot != std::string::npos) stem = stem.substr(0, dot);
  if (stem.size() > 6 && stem.substr(stem.size() - 6) == ".label") {
    stem = stem.substr(0, stem.size() - 6);
  }
  return stem;
}

std::vector<std::string> render_scene_to_dir(
    const SceneModel& scene, const SemanticPointCloud& cloud,
    const RenderConfig& cfg, const std::map<int, int>& remap, int workers,
    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  std::vector<std::string> outputs(scene.frames.size());
  run_parallel(scene.frames.size(), workers, [&](size_t n) {
    const Frame& frame = scene.frames[n];
    const CameraModel& cam = scene.cameras.at(frame.camera_id);
    LabelMap map = render_view(cloud, frame.pose, cam, cfg);
    remap_labels(map, remap);
    const std::string name = label_output_name(frame.name);
    write_label_png(map, out_dir / name);
    outputs[n] = name;
  });
  return outputs;
}

}  // namespace semlift
