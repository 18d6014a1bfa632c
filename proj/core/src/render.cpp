#include "semlift/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

#include "semlift/errors.hpp"
#include "semlift/kdtree.hpp"

namespace semlift {

void RenderConfig::validate() const {
  if (!(occlusion_tau > 0.0)) {
    throw std::invalid_argument("RenderConfig: occlusion_tau must be > 0");
  }
  if (occlusion_kernel < 3 || occlusion_kernel % 2 == 0) {
    throw std::invalid_argument("RenderConfig: occlusion_kernel must be odd and >= 3");
  }
  if (splat_radius < 0) {
    throw std::invalid_argument("RenderConfig: splat_radius must be >= 0");
  }
  if (knn_pass1_k < 1 || knn_pass2_k < 1) {
    throw std::invalid_argument("RenderConfig: kNN counts must be >= 1");
  }
}

namespace {

void require_stage(const FrameLabelState& state, FrameLabelState::Stage expected,
                   const char* op) {
  if (state.stage != expected) {
    throw std::invalid_argument(std::string(op) + ": input has wrong stage tag");
  }
}

}  // namespace

FrameLabelState project_zbuffer(const SemanticPointCloud& cloud,
                                const PoseSE3& pose, const CameraModel& cam) {
  cloud.validate();
  FrameLabelState state(cam.width, cam.height, FrameLabelState::Stage::proj);

  const size_t n = cloud.size();
  for (size_t m = 0; m < n; ++m) {
    const auto px = project(cloud.points[m], pose, cam, /*apply_distortion=*/true);
    if (!px) continue;
    const int u = static_cast<int>(std::lround(px->u));
    const int v = static_cast<int>(std::lround(px->v));
    if (u < 0 || u >= cam.width || v < 0 || v >= cam.height) continue;
    const size_t idx = static_cast<size_t>(v) * cam.width + u;
    const auto depth = static_cast<float>(px->depth);
    // Strict comparison: equal depths keep the earlier (lower-index) point.
    if (state.labels.data[idx] == 0 || depth < state.depths[idx]) {
      state.labels.data[idx] = cloud.labels[m];
      state.depths[idx] = depth;
    }
  }
  // Unlabeled points may have claimed pixels; clear their depths.
  for (size_t i = 0; i < state.labels.data.size(); ++i) {
    if (state.labels.data[i] == 0) state.depths[i] = 0.0f;
  }
  return state;
}

FrameLabelState occlusion_filter(const FrameLabelState& state,
                                 const RenderConfig& cfg) {
  require_stage(state, FrameLabelState::Stage::proj, "occlusion_filter");
  cfg.validate();

  const int w = state.labels.width;
  const int h = state.labels.height;
  const int half = cfg.occlusion_kernel / 2;
  const auto tau = static_cast<float>(cfg.occlusion_tau);

  FrameLabelState out = state;
  out.stage = FrameLabelState::Stage::filt;

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const uint8_t c = state.labels.at(u, v);
      if (c == 0) continue;
      const float margin = state.depth_at(u, v) - tau;
      bool occluded = false;
      const int v0 = std::max(0, v - half), v1 = std::min(h - 1, v + half);
      const int u0 = std::max(0, u - half), u1 = std::min(w - 1, u + half);
      for (int vv = v0; vv <= v1 && !occluded; ++vv) {
        for (int uu = u0; uu <= u1; ++uu) {
          const uint8_t cn = state.labels.at(uu, vv);
          if (cn != 0 && cn != c && state.depth_at(uu, vv) < margin) {
            occluded = true;
            break;
          }
        }
      }
      if (occluded) {
        out.labels.at(u, v) = 0;
        out.depths[static_cast<size_t>(v) * w + u] = 0.0f;
      }
    }
  }
  return out;
}

namespace {

// Integer offsets with du^2+dv^2 <= r^2, row-major order.
std::vector<std::pair<int, int>> disc_offsets(int radius) {
  std::vector<std::pair<int, int>> offsets;
  for (int dv = -radius; dv <= radius; ++dv) {
    for (int du = -radius; du <= radius; ++du) {
      if (du * du + dv * dv <= radius * radius) offsets.emplace_back(du, dv);
    }
  }
  return offsets;
}

}  // namespace

FrameLabelState splat_densify(const FrameLabelState& state,
                              const RenderConfig& cfg) {
  require_stage(state, FrameLabelState::Stage::filt, "splat_densify");
  cfg.validate();

  FrameLabelState out = state;
  out.stage = FrameLabelState::Stage::dense;
  if (cfg.splat_radius == 0) return out;

  const int w = state.labels.width;
  const int h = state.labels.height;

  struct Splat {
    float depth;
    int u, v;
    uint8_t label;
  };
  std::vector<Splat> splats;
  splats.reserve(state.labels.count_labeled());
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      const uint8_t c = state.labels.at(u, v);
      if (c != 0) splats.push_back({state.depth_at(u, v), u, v, c});
    }
  }
  // Back-to-front; equal depths in scanline order.
  std::sort(splats.begin(), splats.end(), [](const Splat& a, const Splat& b) {
    if (a.depth != b.depth) return a.depth > b.depth;
    return a.v != b.v ? a.v < b.v : a.u < b.u;
  });

  const auto offsets = disc_offsets(cfg.splat_radius);
  for (const Splat& s : splats) {
    for (const auto& [du, dv] : offsets) {
      const int u = s.u + du;
      const int v = s.v + dv;
      if (u < 0 || u >= w || v < 0 || v >= h) continue;
      const size_t idx = static_cast<size_t>(v) * w + u;
      // Paint only unlabeled or strictly farther pixels, so existing labels
      // are only ever replaced by nearer geometry.
      if (out.labels.data[idx] == 0 || s.depth < out.depths[idx]) {
        out.labels.data[idx] = s.label;
        out.depths[idx] = s.depth;
      }
    }
  }
  return out;
}

namespace {

// Labeled-pixel coordinates in scanline order, so kd-tree tie resolution by
// index equals scanline order.
struct LabeledPixels {
  std::vector<uint32_t> flat_index;
  KdTree2 tree;
};

LabeledPixels collect_labeled(const FrameLabelState& state) {
  LabeledPixels out;
  const int w = state.labels.width;
  const int h = state.labels.height;
  std::vector<KdTree2::Point> coords;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (state.labels.at(u, v) != 0) {
        out.flat_index.push_back(static_cast<uint32_t>(v) * w + u);
        coords.push_back({static_cast<double>(u), static_cast<double>(v)});
      }
    }
  }
  out.tree = KdTree2(std::move(coords));
  return out;
}

}  // namespace

FrameLabelState depth_guided_fill(const FrameLabelState& state,
                                  const RenderConfig& cfg) {
  require_stage(state, FrameLabelState::Stage::dense, "depth_guided_fill");
  cfg.validate();

  FrameLabelState out = state;
  out.stage = FrameLabelState::Stage::dense;

  const size_t labeled = state.labels.count_labeled();
  if (labeled == 0) {
    throw NoLabeledPixels("depth_guided_fill: no labeled pixels");
  }
  if (labeled == state.labels.pixel_count()) return out;

  const LabeledPixels lp = collect_labeled(state);
  const int w = state.labels.width;
  const int h = state.labels.height;

  std::vector<KdTree2::Neighbor> neighbors;
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (state.labels.at(u, v) != 0) continue;
      lp.tree.knn({static_cast<double>(u), static_cast<double>(v)},
                  cfg.knn_pass1_k, neighbors);
      // Foreground priority: the minimal-depth neighbor wins; depth ties keep
      // the first in (distance, scanline) order.
      uint32_t best_flat = 0;
      float best_depth = 0.0f;
      bool have = false;
      for (const auto& nb : neighbors) {
        const uint32_t flat = lp.flat_index[nb.index];
        const float d = state.depths[flat];
        if (!have || d < best_depth) {
          have = true;
          best_depth = d;
          best_flat = flat;
        }
      }
      const size_t idx = static_cast<size_t>(v) * w + u;
      out.labels.data[idx] = state.labels.data[best_flat];
      out.depths[idx] = best_depth;
    }
  }
  return out;
}

namespace {

// Offsets sorted by (squared distance, dv, du): for a fully labeled map the
// k nearest labeled pixels of any location are a prefix of this list, with
// exactly the scanline tie order the kd-tree would produce.
std::vector<std::pair<int, int>> sorted_stencil(int radius) {
  auto offsets = disc_offsets(radius);
  std::sort(offsets.begin(), offsets.end(),
            [](const std::pair<int, int>& a, const std::pair<int, int>& b) {
              const int da = a.first * a.first + a.second * a.second;
              const int db = b.first * b.first + b.second * b.second;
              if (da != db) return da < db;
              return a.second != b.second ? a.second < b.second : a.first < b.first;
            });
  return offsets;
}

// Majority over the collected window; ties keep `current` when it is among
// the tied maxima, otherwise the lowest tied class id.
struct MajorityCounter {
  std::array<uint32_t, 256> counts{};
  std::vector<uint8_t> seen;

  void reset() {
    for (uint8_t c : seen) counts[c] = 0;
    seen.clear();
  }

  void add(uint8_t cls) {
    if (counts[cls]++ == 0) seen.push_back(cls);
  }

  uint8_t resolve(uint8_t current) const {
    uint32_t max_count = 0;
    for (uint8_t c : seen) max_count = std::max(max_count, counts[c]);
    if (max_count == 0) return current;
    if (counts[current] == max_count) return current;
    int best = 256;
    for (uint8_t c : seen) {
      if (counts[c] == max_count) best = std::min(best, static_cast<int>(c));
    }
    return static_cast<uint8_t>(best);
  }
};

FrameLabelState knn_smooth_full(const FrameLabelState& state, int k) {
  const int w = state.labels.width;
  const int h = state.labels.height;
  const size_t want = std::min<size_t>(k, state.labels.pixel_count());

  // Radius covering k in-bounds pixels even from a corner; grown when a
  // narrow image exhausts the stencil early.
  const int diag = static_cast<int>(std::ceil(std::hypot(w - 1, h - 1)));
  int radius = static_cast<int>(2.0 * std::sqrt(static_cast<double>(k))) + 2;
  radius = std::min(radius, diag + 1);

  FrameLabelState out = state;
  out.stage = FrameLabelState::Stage::final;

  for (;;) {
    const auto offsets = sorted_stencil(radius);
    bool exhausted = false;
    MajorityCounter counter;
    for (int v = 0; v < h && !exhausted; ++v) {
      for (int u = 0; u < w; ++u) {
        counter.reset();
        size_t taken = 0;
        for (const auto& [du, dv] : offsets) {
          const int uu = u + du;
          const int vv = v + dv;
          if (uu < 0 || uu >= w || vv < 0 || vv >= h) continue;
          counter.add(state.labels.at(uu, vv));
          if (++taken == want) break;
        }
        if (taken < want) {
          exhausted = true;  // stencil too small for this aspect ratio
          break;
        }
        out.labels.at(u, v) = counter.resolve(state.labels.at(u, v));
      }
    }
    if (!exhausted) return out;
    radius = diag + 1;
  }
}

}  // namespace

FrameLabelState knn_smooth(const FrameLabelState& state, int k) {
  if (k < 1) throw std::invalid_argument("knn_smooth: k must be >= 1");
  if (state.labels.count_labeled() != state.labels.pixel_count()) {
    throw std::invalid_argument("knn_smooth: input must be fully labeled");
  }
  if (state.labels.pixel_count() == 0) {
    FrameLabelState out = state;
    out.stage = FrameLabelState::Stage::final;
    return out;
  }
  return knn_smooth_full(state, k);
}

LabelMap render_view(const SemanticPointCloud& cloud, const PoseSE3& pose,
                     const CameraModel& cam, const RenderConfig& cfg) {
  cam.validate();
  cfg.validate();

  FrameLabelState state = project_zbuffer(cloud, pose, cam);
  if (cfg.enable_occlusion) {
    state = occlusion_filter(state, cfg);
  } else {
    state.stage = FrameLabelState::Stage::filt;
  }
  if (cfg.enable_splat) {
    state = splat_densify(state, cfg);
  } else {
    state.stage = FrameLabelState::Stage::dense;
  }
  if (cfg.enable_depth_guided && state.labels.count_labeled() > 0) {
    state = depth_guided_fill(state, cfg);
    state = knn_smooth(state, cfg.knn_pass2_k);
  }
  return state.labels;
}

}  // namespace semlift
