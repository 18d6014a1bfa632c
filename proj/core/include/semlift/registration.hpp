#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

#include "semlift/geometry.hpp"
#include "semlift/label_map.hpp"
#include "semlift/point_cloud.hpp"

namespace semlift {

struct IcpParams {
  int max_iterations = 100;
  double convergence_tol = 1e-6;       // relative RMSE change
  double max_correspondence_dist = 2.0;  // [m]
  double subsample_voxel = 0.5;        // [m], 0 disables source subsampling
  PoseSE3 initial_guess;

  void validate() const;
};

struct IcpResult {
  PoseSE3 transform;  // maps source-cloud coordinates into target coordinates
  double rmse = 0.0;  // [m], over gated correspondences of the best iteration
  int iterations = 0;
  double inlier_fraction = 0.0;  // gated pairs / (subsampled) source size
  std::vector<double> rmse_history;
};

// Axis-aligned box in undistorted-pinhole pixel coordinates of the RGB
// camera.
struct SupportBBox {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
};

// Point-to-point ICP with nearest-neighbor gating and closed-form SVD rigid
// fits. Returns the best (lowest-RMSE) transform seen. Throws
// DegenerateGeometry when the (subsampled) source is collinear or when a fit
// collapses, NoCorrespondences when the distance gate rejects every pair.
IcpResult icp_align(const std::vector<Eigen::Vector3d>& source,
                    const std::vector<Eigen::Vector3d>& target,
                    const IcpParams& params = {});

// Composes the alignment into each refined pose: a point given in target
// (RGB) world coordinates passes through invert(t_reg) and then the original
// pose, so registered = pose * invert(t_reg).
std::vector<PoseSE3> register_poses(const PoseSE3& t_reg,
                                    const std::vector<PoseSE3>& poses);

// Indices of points whose undistorted-pinhole projection lands inside
// [0,width) x [0,height) with positive depth. No occlusion test.
std::vector<uint32_t> visible_points(const SemanticPointCloud& cloud,
                                     const PoseSE3& pose,
                                     const CameraModel& cam);

// Projects points visible in the (registered) thermal camera into the
// undistorted RGB image and returns their extremal coordinates. A zero-extent
// side is expanded by 1 px each way. Throws NoVisiblePoints.
SupportBBox compute_support_bbox(const SemanticPointCloud& cloud,
                                 const PoseSE3& thermal_pose_reg,
                                 const CameraModel& thermal_cam,
                                 const PoseSE3& rgb_pose,
                                 const CameraModel& rgb_cam);

enum class Sampling { bilinear, nearest };

struct TransferResult {
  ImageU8 image;  // thermal resolution, same channel count as the source
  ImageU8 mask;   // single channel; 255 where the source sample was in frame
};

// Lens-distortion transfer of an RGB-camera raster into thermal distorted
// space: the bbox corners map through the thermal warp, their axis-aligned
// hull is cropped and resized to the thermal resolution, and every output
// pixel is traced back thermal->pinhole->RGB for sampling. Out-of-source
// samples are zero with mask=0. Throws DegenerateBBox.
TransferResult distortion_transfer(const ImageU8& rgb_image,
                                   const CameraModel& rgb_cam,
                                   const CameraModel& thermal_cam,
                                   const SupportBBox& bbox, Sampling sampling);

}  // namespace semlift
