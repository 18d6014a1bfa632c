#include "semlift/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "semlift/errors.hpp"

namespace semlift {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Uniform double in [0,1) from the top 53 bits; fully specified, unlike the
// standard distributions.
double unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct Hit {
  double t = std::numeric_limits<double>::infinity();
  uint8_t cls = 0;
};

void hit_rect(const RectPrim& rect, const Eigen::Vector3d& origin,
              const Eigen::Vector3d& dir, Hit& best) {
  if (dir.z() == 0.0) return;
  const double t = (rect.z - origin.z()) / dir.z();
  if (t <= 0.0 || t >= best.t) return;
  const double x = origin.x() + t * dir.x();
  const double y = origin.y() + t * dir.y();
  if (x >= rect.x0 && x <= rect.x1 && y >= rect.y0 && y <= rect.y1) {
    best = {t, rect.cls};
  }
}

void hit_box(const BoxPrim& box, const Eigen::Vector3d& origin,
             const Eigen::Vector3d& dir, Hit& best) {
  double t_enter = 0.0;
  double t_exit = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir(a) == 0.0) {
      if (origin(a) < box.min(a) || origin(a) > box.max(a)) return;
      continue;
    }
    double t0 = (box.min(a) - origin(a)) / dir(a);
    double t1 = (box.max(a) - origin(a)) / dir(a);
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return;
  }
  if (t_enter > 0.0 && t_enter < best.t) best = {t_enter, box.cls};
}

Hit raycast(const SynthSpec& spec, const Eigen::Vector3d& origin,
            const Eigen::Vector3d& dir) {
  Hit best;
  for (const RectPrim& r : spec.rects) hit_rect(r, origin, dir, best);
  for (const BoxPrim& b : spec.boxes) hit_box(b, origin, dir, best);
  return best;
}

struct Sampler {
  // Flattened sampleable faces: rects plus the six faces of each box.
  struct Face {
    Eigen::Vector3d base;
    Eigen::Vector3d edge_u;
    Eigen::Vector3d edge_v;
    double cum_area;
    uint8_t cls;
  };
  std::vector<Face> faces;
  double total_area = 0.0;

  void add_face(const Eigen::Vector3d& base, const Eigen::Vector3d& eu,
                const Eigen::Vector3d& ev, uint8_t cls) {
    const double area = eu.cross(ev).norm();
    if (area <= 0.0) return;
    total_area += area;
    faces.push_back({base, eu, ev, total_area, cls});
  }

  explicit Sampler(const SynthSpec& spec) {
    for (const RectPrim& r : spec.rects) {
      add_face({r.x0, r.y0, r.z}, {r.x1 - r.x0, 0.0, 0.0}, {0.0, r.y1 - r.y0, 0.0},
               r.cls);
    }
    for (const BoxPrim& b : spec.boxes) {
      const Eigen::Vector3d d = b.max - b.min;
      const Eigen::Vector3d ex(d.x(), 0, 0), ey(0, d.y(), 0), ez(0, 0, d.z());
      add_face(b.min, ex, ey, b.cls);                      // bottom
      add_face({b.min.x(), b.min.y(), b.max.z()}, ex, ey, b.cls);  // top
      add_face(b.min, ex, ez, b.cls);                      // front
      add_face({b.min.x(), b.max.y(), b.min.z()}, ex, ez, b.cls);  // back
      add_face(b.min, ey, ez, b.cls);                      // left
      add_face({b.max.x(), b.min.y(), b.min.z()}, ey, ez, b.cls);  // right
    }
  }

  std::pair<Eigen::Vector3d, uint8_t> sample(std::mt19937_64& rng) const {
    const double pick = unit(rng) * total_area;
    const auto it = std::lower_bound(
        faces.begin(), faces.end(), pick,
        [](const Face& f, double v) { return f.cum_area < v; });
    const Face& f = it == faces.end() ? faces.back() : *it;
    return {f.base + unit(rng) * f.edge_u + unit(rng) * f.edge_v, f.cls};
  }
};

}  // namespace

PoseSE3 rig_pose(const RigCamera& rig) {
  // Nadir base: camera x = world x, camera y = -world y, camera z = -world z
  // (looking straight down), then pitch about the camera x axis and yaw about
  // the world z axis.
  Eigen::Matrix3d base;
  base << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  const Eigen::Matrix3d pitch =
      Eigen::AngleAxisd(rig.pitch_deg * kPi / 180.0, Eigen::Vector3d::UnitX())
          .toRotationMatrix();
  const Eigen::Matrix3d yaw =
      Eigen::AngleAxisd(rig.yaw_deg * kPi / 180.0, Eigen::Vector3d::UnitZ())
          .toRotationMatrix();
  PoseSE3 pose;
  pose.rotation = pitch * base * yaw;
  pose.translation = -(pose.rotation * rig.position);
  return pose;
}

SynthScene synth_scene(const SynthSpec& spec) {
  if (spec.rects.empty() && spec.boxes.empty()) {
    throw EmptySpec("synth_scene: no primitives");
  }
  spec.camera.validate();

  SynthScene scene;
  SceneModel& model = scene.model;
  model.cameras[1] = spec.camera;

  std::mt19937_64 rng(spec.seed);
  const Sampler sampler(spec);
  model.cloud.points.reserve(spec.point_count);
  model.cloud.labels.reserve(spec.point_count);
  for (size_t i = 0; i < spec.point_count; ++i) {
    const auto [point, cls] = sampler.sample(rng);
    model.cloud.points.push_back(point);
    model.cloud.labels.push_back(cls);
  }
  model.point_ids.resize(spec.point_count);
  for (size_t i = 0; i < spec.point_count; ++i) {
    model.point_ids[i] = static_cast<int64_t>(i);
  }

  const int w = spec.camera.width;
  const int h = spec.camera.height;
  for (size_t n = 0; n < spec.rig.size(); ++n) {
    Frame frame;
    frame.name = "view_" + std::to_string(n) + ".png";
    frame.camera_id = 1;
    frame.pose = rig_pose(spec.rig[n]);

    if (spec.with_observations) {
      const Eigen::Vector3d center = frame.pose.center();
      for (size_t m = 0; m < model.cloud.size(); ++m) {
        const auto px = project(model.cloud.points[m], frame.pose, spec.camera);
        if (!px) continue;
        if (!(px->u >= -0.5 && px->u < w - 0.5 && px->v >= -0.5 && px->v < h - 0.5)) {
          continue;
        }
        // Exact visibility: occluded when some primitive sits strictly in
        // front of the point along the ray from the camera center.
        const Eigen::Vector3d to_point = model.cloud.points[m] - center;
        const double dist = to_point.norm();
        const Hit hit = raycast(spec, center, to_point / dist);
        if (hit.t < dist * (1.0 - 1e-9) - 1e-9) continue;
        frame.observations.push_back(
            {px->u, px->v, static_cast<int64_t>(m)});
      }
    }
    model.frames.push_back(std::move(frame));

    // Analytic ground truth: nearest-hit class along each pixel-center ray.
    LabelMap gt(w, h);
    const PoseSE3 inv_pose = invert(model.frames.back().pose);
    for (int v = 0; v < h; ++v) {
      for (int u = 0; u < w; ++u) {
        Eigen::Vector2d norm((u - spec.camera.principal_x) / spec.camera.focal_x,
                             (v - spec.camera.principal_y) / spec.camera.focal_y);
        if (!spec.camera.distortion.is_zero()) {
          norm = undistort_normalized(norm, spec.camera.distortion);
        }
        const Eigen::Vector3d dir_world =
            inv_pose.rotation * Eigen::Vector3d(norm.x(), norm.y(), 1.0);
        const Hit hit = raycast(spec, inv_pose.translation, dir_world.normalized());
        gt.at(u, v) = hit.cls;
      }
    }
    scene.gt_views.push_back(std::move(gt));
  }

  return scene;
}

namespace {

CameraModel default_camera(int width, int height) {
  CameraModel cam;
  cam.width = width;
  cam.height = height;
  cam.focal_x = cam.focal_y = 0.8 * width;
  cam.principal_x = width / 2.0;
  cam.principal_y = height / 2.0;
  return cam;
}

}  // namespace

SynthSpec boxes_scene_spec(size_t point_count, uint64_t seed, int num_cameras,
                           int width, int height) {
  SynthSpec spec;
  spec.camera = default_camera(width, height);
  spec.point_count = point_count;
  spec.seed = seed;

  spec.rects.push_back({0.0, -60.0, -60.0, 60.0, 60.0, 1});
  spec.boxes.push_back({{-14.0, -10.0, 0.0}, {-4.0, 2.0, 6.0}, 2});
  spec.boxes.push_back({{3.0, -14.0, 0.0}, {15.0, -5.0, 9.0}, 3});
  spec.boxes.push_back({{-3.0, 6.0, 0.0}, {10.0, 16.0, 4.0}, 4});

  for (int i = 0; i < num_cameras; ++i) {
    RigCamera cam;
    const double angle = 2.0 * kPi * i / std::max(1, num_cameras);
    cam.position = {10.0 * std::cos(angle), 10.0 * std::sin(angle),
                    40.0 + 2.0 * i};
    cam.yaw_deg = 15.0 * i;
    cam.pitch_deg = i % 2 == 0 ? 0.0 : 8.0;
    spec.rig.push_back(cam);
  }
  return spec;
}

SynthSpec occluder_scene_spec(size_t point_count, uint64_t seed) {
  SynthSpec spec;
  spec.camera = default_camera(640, 480);
  spec.point_count = point_count;
  spec.seed = seed;

  spec.rects.push_back({0.0, -50.0, -50.0, 50.0, 50.0, 1});
  // Tall slabs; oblique views let far-plane points project into the pixels
  // behind their roof lines.
  spec.boxes.push_back({{-16.0, -16.0, 0.0}, {-2.0, -4.0, 12.0}, 2});
  spec.boxes.push_back({{4.0, 2.0, 0.0}, {18.0, 14.0, 16.0}, 3});

  spec.rig.push_back({{-30.0, 0.0, 35.0}, 0.0, 25.0});
  spec.rig.push_back({{25.0, -20.0, 38.0}, 120.0, 22.0});
  spec.rig.push_back({{0.0, 28.0, 40.0}, 240.0, 20.0});
  return spec;
}

SynthSpec two_plane_scene_spec(size_t point_count, uint64_t seed) {
  SynthSpec spec;
  spec.camera = default_camera(640, 480);
  spec.point_count = point_count;
  spec.seed = seed;

  spec.rects.push_back({0.0, -40.0, -40.0, 40.0, 40.0, 1});   // far ground
  spec.rects.push_back({5.0, -12.0, -10.0, 12.0, 10.0, 2});   // near occluder
  spec.rig.push_back({{0.0, 0.0, 45.0}, 0.0, 0.0});
  return spec;
}

}  // namespace semlift
