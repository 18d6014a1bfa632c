#pragma once

#include <vector>

#include "semlift/geometry.hpp"
#include "semlift/label_map.hpp"
#include "semlift/point_cloud.hpp"

namespace semlift {

// Per-view label/depth state as it moves through the rendering stages.
// Depths are undefined (stored as 0) wherever the label is 0.
struct FrameLabelState {
  enum class Stage { proj, filt, dense, final };

  LabelMap labels;
  std::vector<float> depths;  // [m], aligned with labels.data
  Stage stage = Stage::proj;

  FrameLabelState() = default;
  FrameLabelState(int w, int h, Stage s)
      : labels(w, h), depths(static_cast<size_t>(w) * h, 0.0f), stage(s) {}

  float depth_at(int u, int v) const {
    return depths[static_cast<size_t>(v) * labels.width + u];
  }
};

// Stage parameters. Defaults are the RGB preset; thermal_defaults() shrinks
// the kernel and splat radius for the lower-resolution sensor.
struct RenderConfig {
  double occlusion_tau = 0.2;  // [m]
  int occlusion_kernel = 9;    // odd window size
  int splat_radius = 3;        // [px]
  int knn_pass1_k = 5;
  int knn_pass2_k = 15;
  bool enable_occlusion = true;
  bool enable_splat = true;
  bool enable_depth_guided = true;  // gates both pass-1 fill and pass-2 smooth

  static RenderConfig rgb_defaults() { return {}; }

  static RenderConfig thermal_defaults() {
    RenderConfig cfg;
    cfg.occlusion_kernel = 5;
    cfg.splat_radius = 1;
    cfg.knn_pass2_k = 14;
    return cfg;
  }

  // Throws std::invalid_argument when a field violates its range.
  void validate() const;
};

// Stage 1: project every cloud point (full distortion) and keep, per integer
// pixel, the label/depth of the minimal-depth point. Depth ties resolve to
// the lower point index. Out-of-bounds and behind-camera points are skipped.
FrameLabelState project_zbuffer(const SemanticPointCloud& cloud,
                                const PoseSE3& pose, const CameraModel& cam);

// Stage 2: zero out a labeled pixel when any pixel in its kernel window has a
// different nonzero label and a depth smaller by more than tau. One pass over
// the input snapshot; kernels clip at the image border.
FrameLabelState occlusion_filter(const FrameLabelState& state,
                                 const RenderConfig& cfg);

// Stage 3: splat each labeled pixel onto the disk du^2+dv^2 <= r^2, processed
// back-to-front. A splat paints label and depth, and only onto pixels that
// are unlabeled or strictly farther.
FrameLabelState splat_densify(const FrameLabelState& state,
                              const RenderConfig& cfg);

// Stage 4a: every unlabeled pixel takes label and depth of the minimal-depth
// neighbor among its knn_pass1_k nearest labeled pixels (2D pixel distance,
// snapshot semantics, distance ties by scanline order). Throws
// NoLabeledPixels when the input has no labeled pixel at all.
FrameLabelState depth_guided_fill(const FrameLabelState& state,
                                  const RenderConfig& cfg);

// Stage 4b: depth-agnostic refinement; each pixel becomes the unweighted
// majority among its k nearest labeled pixels (self included). Majority ties
// keep the current label. Requires a fully labeled input.
FrameLabelState knn_smooth(const FrameLabelState& state, int k);

// Stages 1..4 composed under the config toggles. An empty projection yields
// an all-zero map; otherwise, with enable_depth_guided set, the result has no
// unlabeled pixels.
LabelMap render_view(const SemanticPointCloud& cloud, const PoseSE3& pose,
                     const CameraModel& cam, const RenderConfig& cfg);

}  // namespace semlift
