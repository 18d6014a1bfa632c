#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "semlift/label_map.hpp"
#include "semlift/scene.hpp"

namespace semlift {

// Horizontal rectangle at height z spanning [x0,x1] x [y0,y1].
struct RectPrim {
  double z = 0.0;
  double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;
  uint8_t cls = 1;
};

// Axis-aligned box; all six faces carry the class.
struct BoxPrim {
  Eigen::Vector3d min = Eigen::Vector3d::Zero();
  Eigen::Vector3d max = Eigen::Vector3d::Zero();
  uint8_t cls = 1;
};

// One camera of the rig. yaw rotates about world z; pitch tilts away from
// straight-down (0 = nadir).
struct RigCamera {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
};

struct SynthSpec {
  std::vector<RectPrim> rects;
  std::vector<BoxPrim> boxes;
  std::vector<RigCamera> rig;
  CameraModel camera;  // shared intrinsics for the whole rig
  size_t point_count = 100000;
  uint64_t seed = 0;
  // Generate per-frame observations (projection + exact visibility ray test).
  // Costly for huge clouds; render-only scenes can skip it.
  bool with_observations = true;
};

struct SynthScene {
  SceneModel model;  // cloud.labels hold the true per-point classes
  std::vector<LabelMap> gt_views;  // analytic ray-cast ground truth per frame
};

// World-to-camera pose for a rig entry.
PoseSE3 rig_pose(const RigCamera& rig);

// Samples `point_count` surface points (area-weighted, mt19937_64-driven and
// bit-reproducible for a fixed seed), builds posed frames, and ray-casts the
// exact per-pixel ground truth for every camera. Throws EmptySpec when no
// primitive is given.
SynthScene synth_scene(const SynthSpec& spec);

// Canned scenes shared by the CLI and the test suite.
SynthSpec boxes_scene_spec(size_t point_count, uint64_t seed, int num_cameras = 5,
                           int width = 640, int height = 480);
SynthSpec occluder_scene_spec(size_t point_count, uint64_t seed);
SynthSpec two_plane_scene_spec(size_t point_count, uint64_t seed);

}  // namespace semlift
