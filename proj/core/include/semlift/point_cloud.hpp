#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace semlift {

// 3D points with per-point class labels; label 0 means unlabeled.
// Colors are optional (kept for PLY round trips), either empty or per-point.
struct SemanticPointCloud {
  std::vector<Eigen::Vector3d> points;
  std::vector<uint8_t> labels;
  std::vector<std::array<uint8_t, 3>> colors;

  size_t size() const { return points.size(); }

  size_t count_unlabeled() const {
    size_t n = 0;
    for (uint8_t c : labels) n += (c == 0);
    return n;
  }

  // Throws std::invalid_argument on length mismatches.
  void validate() const;
};

// One pixel-to-point link of an image: the 3D point `point_index` projects to
// subpixel location (u, v).
struct PixelPointCorr {
  double u = 0.0;
  double v = 0.0;
  uint32_t point_index = 0;
};

// Per-image correspondence lists, aligned with the frame order of the scene.
struct CorrespondenceSet {
  std::vector<std::vector<PixelPointCorr>> per_image;

  size_t num_images() const { return per_image.size(); }
};

// Semantic class table. Class ids run 1..size(); 0 is reserved for unlabeled.
struct ClassCatalog {
  struct Entry {
    std::string name;
    double prior = 0.0;  // fixed class-frequency prior, fraction in [0,1]
  };

  std::vector<Entry> entries;  // entries[i] describes class id i+1

  int num_classes() const { return static_cast<int>(entries.size()); }

  const std::string& name(int class_id) const { return entries[class_id - 1].name; }
  double prior(int class_id) const { return entries[class_id - 1].prior; }

  // num_classes() unnamed classes with uniform priors.
  static ClassCatalog uniform(int num_classes);

  void validate() const;
};

// Sparse per-point vote counts gathered while lifting 2D labels into 3D.
// Each point's tally is a short (class, count) list; most points see only a
// couple of distinct classes.
struct VoteTallies {
  std::vector<std::vector<std::pair<uint8_t, uint32_t>>> per_point;

  explicit VoteTallies(size_t num_points = 0) : per_point(num_points) {}

  size_t num_points() const { return per_point.size(); }

  void add_vote(uint32_t point_index, uint8_t class_id) {
    auto& tally = per_point[point_index];
    for (auto& [cls, count] : tally) {
      if (cls == class_id) {
        ++count;
        return;
      }
    }
    tally.emplace_back(class_id, 1);
  }
};

}  // namespace semlift
