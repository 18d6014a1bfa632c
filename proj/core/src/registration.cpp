#include "semlift/registration.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "semlift/errors.hpp"
#include "semlift/kdtree.hpp"

namespace semlift {

void IcpParams::validate() const {
  if (max_iterations < 1) {
    throw std::invalid_argument("IcpParams: max_iterations must be >= 1");
  }
  if (!(convergence_tol > 0.0)) {
    throw std::invalid_argument("IcpParams: convergence_tol must be > 0");
  }
  if (!(max_correspondence_dist > 0.0)) {
    throw std::invalid_argument("IcpParams: max_correspondence_dist must be > 0");
  }
  if (subsample_voxel < 0.0) {
    throw std::invalid_argument("IcpParams: subsample_voxel must be >= 0");
  }
}

namespace {

// Keeps the lowest-index point per voxel; deterministic and order-free.
std::vector<Eigen::Vector3d> voxel_subsample(
    const std::vector<Eigen::Vector3d>& points, double voxel) {
  if (voxel <= 0.0) return points;
  std::map<std::array<int64_t, 3>, size_t> cells;
  for (size_t i = 0; i < points.size(); ++i) {
    const std::array<int64_t, 3> key = {
        static_cast<int64_t>(std::floor(points[i].x() / voxel)),
        static_cast<int64_t>(std::floor(points[i].y() / voxel)),
        static_cast<int64_t>(std::floor(points[i].z() / voxel))};
    cells.try_emplace(key, i);
  }
  std::vector<size_t> keep;
  keep.reserve(cells.size());
  for (const auto& [key, idx] : cells) keep.push_back(idx);
  std::sort(keep.begin(), keep.end());
  std::vector<Eigen::Vector3d> out;
  out.reserve(keep.size());
  for (size_t idx : keep) out.push_back(points[idx]);
  return out;
}

bool is_degenerate(const std::vector<Eigen::Vector3d>& points) {
  if (points.size() < 3) return true;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (const auto& p : points) mean += p;
  mean /= static_cast<double>(points.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& p : points) {
    const Eigen::Vector3d d = p - mean;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  // Collinear or coincident: at most one significant principal direction.
  const double scale = es.eigenvalues().maxCoeff();
  return !(scale > 0.0) || es.eigenvalues()(1) <= scale * 1e-12;
}

// Closed-form rigid fit (Umeyama/Kabsch without scale) mapping a -> b.
PoseSE3 fit_rigid(const std::vector<Eigen::Vector3d>& a,
                  const std::vector<Eigen::Vector3d>& b) {
  const auto n = static_cast<double>(a.size());
  Eigen::Vector3d ca = Eigen::Vector3d::Zero(), cb = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
  }
  ca /= n;
  cb /= n;
  Eigen::Matrix3d h = Eigen::Matrix3d::Zero();
  for (size_t i = 0; i < a.size(); ++i) {
    h += (a[i] - ca) * (b[i] - cb).transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) {
    d(2, 2) = -1.0;
  }
  PoseSE3 t;
  t.rotation = svd.matrixV() * d * svd.matrixU().transpose();
  t.translation = cb - t.rotation * ca;
  return t;
}

}  // namespace

IcpResult icp_align(const std::vector<Eigen::Vector3d>& source,
                    const std::vector<Eigen::Vector3d>& target,
                    const IcpParams& params) {
  params.validate();
  if (source.empty() || target.empty()) {
    throw EmptyInput("icp_align: empty source or target cloud");
  }

  const std::vector<Eigen::Vector3d> src =
      voxel_subsample(source, params.subsample_voxel);
  if (is_degenerate(src)) {
    throw DegenerateGeometry(
        "icp_align: source is degenerate after subsampling (needs >= 3 "
        "non-collinear points)");
  }

  std::vector<KdTree3::Point> tgt_pts;
  tgt_pts.reserve(target.size());
  for (const auto& p : target) tgt_pts.push_back({p.x(), p.y(), p.z()});
  const KdTree3 tree(std::move(tgt_pts));

  const double gate2 = params.max_correspondence_dist * params.max_correspondence_dist;

  PoseSE3 current = params.initial_guess;
  IcpResult best;
  best.transform = current;
  best.rmse = std::numeric_limits<double>::infinity();

  std::vector<Eigen::Vector3d> matched_src, matched_tgt;
  double prev_rmse = std::numeric_limits<double>::infinity();
  int iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    matched_src.clear();
    matched_tgt.clear();
    double sq_sum = 0.0;
    for (const auto& p : src) {
      const Eigen::Vector3d q = current.rotation * p + current.translation;
      const auto nb = tree.nearest({q.x(), q.y(), q.z()});
      if (nb.index == UINT32_MAX || nb.dist2 > gate2) continue;
      matched_src.push_back(q);
      matched_tgt.push_back(target[nb.index]);
      sq_sum += nb.dist2;
    }
    if (matched_src.empty()) {
      throw NoCorrespondences(
          "icp_align: distance gate rejected every correspondence");
    }
    const double rmse = std::sqrt(sq_sum / static_cast<double>(matched_src.size()));
    best.rmse_history.push_back(rmse);
    if (rmse < best.rmse) {
      best.rmse = rmse;
      best.transform = current;
      best.inlier_fraction =
          static_cast<double>(matched_src.size()) / static_cast<double>(src.size());
    }

    const double rel_change =
        std::abs(prev_rmse - rmse) / std::max(prev_rmse, 1e-30);
    if (iter > 0 && rel_change < params.convergence_tol) {
      ++iter;
      break;
    }
    prev_rmse = rmse;

    if (is_degenerate(matched_src)) {
      throw DegenerateGeometry("icp_align: gated correspondences are degenerate");
    }
    current = compose(fit_rigid(matched_src, matched_tgt), current);
  }

  best.iterations = iter;
  return best;
}

std::vector<PoseSE3> register_poses(const PoseSE3& t_reg,
                                    const std::vector<PoseSE3>& poses) {
  const PoseSE3 inv_reg = invert(t_reg);
  std::vector<PoseSE3> out;
  out.reserve(poses.size());
  for (const PoseSE3& pose : poses) out.push_back(compose(pose, inv_reg));
  return out;
}

std::vector<uint32_t> visible_points(const SemanticPointCloud& cloud,
                                     const PoseSE3& pose,
                                     const CameraModel& cam) {
  cam.validate();
  std::vector<uint32_t> indices;
  for (uint32_t m = 0; m < cloud.size(); ++m) {
    const auto px = project(cloud.points[m], pose, cam, /*apply_distortion=*/false);
    if (!px) continue;
    if (px->u >= 0.0 && px->u < cam.width && px->v >= 0.0 && px->v < cam.height) {
      indices.push_back(m);
    }
  }
  return indices;
}

SupportBBox compute_support_bbox(const SemanticPointCloud& cloud,
                                 const PoseSE3& thermal_pose_reg,
                                 const CameraModel& thermal_cam,
                                 const PoseSE3& rgb_pose,
                                 const CameraModel& rgb_cam) {
  const std::vector<uint32_t> visible =
      visible_points(cloud, thermal_pose_reg, thermal_cam);
  if (visible.empty()) {
    throw NoVisiblePoints(
        "compute_support_bbox: no cloud point visible in the thermal camera");
  }

  SupportBBox bbox;
  bbox.min_x = bbox.min_y = std::numeric_limits<double>::infinity();
  bbox.max_x = bbox.max_y = -std::numeric_limits<double>::infinity();
  size_t used = 0;
  for (uint32_t m : visible) {
    const auto px =
        project(cloud.points[m], rgb_pose, rgb_cam, /*apply_distortion=*/false);
    if (!px) continue;  // behind the RGB camera
    bbox.min_x = std::min(bbox.min_x, px->u);
    bbox.max_x = std::max(bbox.max_x, px->u);
    bbox.min_y = std::min(bbox.min_y, px->v);
    bbox.max_y = std::max(bbox.max_y, px->v);
    ++used;
  }
  if (used == 0) {
    throw NoVisiblePoints(
        "compute_support_bbox: no thermal-visible point projects in front of "
        "the RGB camera");
  }
  if (!(bbox.max_x > bbox.min_x)) {
    bbox.min_x -= 1.0;
    bbox.max_x += 1.0;
  }
  if (!(bbox.max_y > bbox.min_y)) {
    bbox.min_y -= 1.0;
    bbox.max_y += 1.0;
  }
  return bbox;
}

namespace {

// Pixel centers sit at integer coordinates: (u, v) samples channel values at
// exactly (u, v), and the frame occupies [-0.5, width - 0.5).
struct Warp {
  const CameraModel& cam;

  Eigen::Vector2d pixel_to_normalized(double u, double v) const {
    return {(u - cam.principal_x) / cam.focal_x,
            (v - cam.principal_y) / cam.focal_y};
  }

  Eigen::Vector2d normalized_to_pixel(const Eigen::Vector2d& n) const {
    return {cam.focal_x * n.x() + cam.principal_x,
            cam.focal_y * n.y() + cam.principal_y};
  }
};

bool sample_bilinear(const ImageU8& img, double u, double v, uint8_t* out) {
  if (!(u >= 0.0 && u <= img.width - 1 && v >= 0.0 && v <= img.height - 1)) {
    return false;
  }
  const int x0 = static_cast<int>(u);
  const int y0 = static_cast<int>(v);
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = u - x0;
  const double fy = v - y0;
  for (int c = 0; c < img.channels; ++c) {
    const double top = (1.0 - fx) * img.at(x0, y0, c) + fx * img.at(x1, y0, c);
    const double bot = (1.0 - fx) * img.at(x0, y1, c) + fx * img.at(x1, y1, c);
    const double val = (1.0 - fy) * top + fy * bot;
    out[c] = static_cast<uint8_t>(std::lround(std::clamp(val, 0.0, 255.0)));
  }
  return true;
}

bool sample_nearest(const ImageU8& img, double u, double v, uint8_t* out) {
  const int x = static_cast<int>(std::lround(u));
  const int y = static_cast<int>(std::lround(v));
  if (x < 0 || x >= img.width || y < 0 || y >= img.height) return false;
  for (int c = 0; c < img.channels; ++c) out[c] = img.at(x, y, c);
  return true;
}

}  // namespace

TransferResult distortion_transfer(const ImageU8& rgb_image,
                                   const CameraModel& rgb_cam,
                                   const CameraModel& thermal_cam,
                                   const SupportBBox& bbox, Sampling sampling) {
  rgb_cam.validate();
  thermal_cam.validate();
  if (!(bbox.max_x > bbox.min_x) || !(bbox.max_y > bbox.min_y)) {
    throw DegenerateBBox("distortion_transfer: bbox has non-positive extent");
  }
  if (rgb_image.width != rgb_cam.width || rgb_image.height != rgb_cam.height) {
    throw ResolutionMismatch(
        "distortion_transfer: image does not match the RGB camera resolution");
  }

  const Warp rgb{rgb_cam};
  const Warp thermal{thermal_cam};

  // Thermal camera warp of the bbox corners: pinhole domain -> thermal
  // distorted pixels. The axis-aligned hull of the four corners is the crop.
  double crop_min_x = std::numeric_limits<double>::infinity();
  double crop_min_y = std::numeric_limits<double>::infinity();
  double crop_max_x = -std::numeric_limits<double>::infinity();
  double crop_max_y = -std::numeric_limits<double>::infinity();
  for (const double bx : {bbox.min_x, bbox.max_x}) {
    for (const double by : {bbox.min_y, bbox.max_y}) {
      const Eigen::Vector2d n = rgb.pixel_to_normalized(bx, by);
      const Eigen::Vector2d td = thermal.normalized_to_pixel(
          distort_normalized(n, thermal_cam.distortion));
      crop_min_x = std::min(crop_min_x, td.x());
      crop_max_x = std::max(crop_max_x, td.x());
      crop_min_y = std::min(crop_min_y, td.y());
      crop_max_y = std::max(crop_max_y, td.y());
    }
  }
  if (!(crop_max_x > crop_min_x) || !(crop_max_y > crop_min_y)) {
    throw DegenerateBBox("distortion_transfer: warped bbox collapsed");
  }

  const int out_w = thermal_cam.width;
  const int out_h = thermal_cam.height;
  TransferResult result;
  result.image = ImageU8(out_w, out_h, rgb_image.channels);
  result.mask = ImageU8(out_w, out_h, 1);

  const double scale_x = (crop_max_x - crop_min_x) / out_w;
  const double scale_y = (crop_max_y - crop_min_y) / out_h;

  std::vector<uint8_t> px(rgb_image.channels);
  for (int j = 0; j < out_h; ++j) {
    for (int i = 0; i < out_w; ++i) {
      // Resize: output pixel center -> crop rectangle coordinates.
      const double u_td = crop_min_x + (i + 0.5) * scale_x;
      const double v_td = crop_min_y + (j + 0.5) * scale_y;

      // Thermal distorted -> common pinhole -> RGB distorted pixel.
      Eigen::Vector2d n = thermal.pixel_to_normalized(u_td, v_td);
      bool ok = true;
      if (!thermal_cam.distortion.is_zero()) {
        try {
          n = undistort_normalized(n, thermal_cam.distortion);
        } catch (const NonConvergence&) {
          ok = false;  // outside the invertible region of the thermal model
        }
      }
      if (ok) {
        const Eigen::Vector2d src = rgb.normalized_to_pixel(
            distort_normalized(n, rgb_cam.distortion));
        ok = sampling == Sampling::bilinear
                 ? sample_bilinear(rgb_image, src.x(), src.y(), px.data())
                 : sample_nearest(rgb_image, src.x(), src.y(), px.data());
      }
      if (ok) {
        for (int c = 0; c < rgb_image.channels; ++c) {
          result.image.at(i, j, c) = px[c];
        }
        result.mask.at(i, j, 0) = 255;
      }
    }
  }
  return result;
}

}  // namespace semlift
