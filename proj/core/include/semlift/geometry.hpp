#pragma once

#include <Eigen/Core>

#include <optional>

namespace semlift {

// Brown-Conrady distortion coefficients. All-zero is the valid pinhole case.
struct DistortionCoeffs {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  bool is_zero() const {
    return k1 == 0.0 && k2 == 0.0 && k3 == 0.0 && p1 == 0.0 && p2 == 0.0;
  }
};

// Intrinsics, resolution and distortion for one sensor.
struct CameraModel {
  double focal_x = 0.0;   // [px]
  double focal_y = 0.0;   // [px]
  double principal_x = 0.0;
  double principal_y = 0.0;
  int width = 0;
  int height = 0;
  DistortionCoeffs distortion;

  // Throws std::invalid_argument if the intrinsics are inconsistent.
  void validate() const;
};

// Rigid world-to-camera transform: x_cam = rotation * x_world + translation.
struct PoseSE3 {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static PoseSE3 identity() { return {}; }

  // Camera center in world coordinates, -R^T t.
  Eigen::Vector3d center() const { return -rotation.transpose() * translation; }

  // Orthonormality and det(R)=+1 within tol.
  bool is_valid(double tol = 1e-9) const;
  void validate(double tol = 1e-9) const;
};

// Subpixel image location together with camera-frame z.
struct PixelDepth {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;  // [m], camera-frame z
};

// Forward Brown-Conrady model on normalized image coordinates:
//   x' = x(1 + k1 r^2 + k2 r^4 + k3 r^6) + 2 p1 x y + p2 (r^2 + 2 x^2)
//   y' = y(1 + k1 r^2 + k2 r^4 + k3 r^6) + p1 (r^2 + 2 y^2) + 2 p2 x y
Eigen::Vector2d distort_normalized(const Eigen::Vector2d& p,
                                   const DistortionCoeffs& d);

// Inverts distort_normalized by damped fixed-point iteration. Returns q with
// |distort_normalized(q, d) - p| <= tol. Throws NonConvergence if the
// residual still exceeds tol after max_iter iterations.
Eigen::Vector2d undistort_normalized(const Eigen::Vector2d& p,
                                     const DistortionCoeffs& d,
                                     double tol = 1e-10, int max_iter = 50);

// Projects a world point. Empty when the camera-frame z is <= 0. No bounds
// check against the image rectangle; callers filter as needed.
std::optional<PixelDepth> project(const Eigen::Vector3d& x, const PoseSE3& pose,
                                  const CameraModel& cam,
                                  bool apply_distortion = true);

// compose(a, b) applies b first: x -> a(b(x)).
PoseSE3 compose(const PoseSE3& a, const PoseSE3& b);
PoseSE3 invert(const PoseSE3& a);

// Hamilton-convention quaternion to rotation matrix; normalizes the input.
// Throws ZeroQuaternion when the norm is (numerically) zero.
Eigen::Matrix3d quaternion_to_rotation(double qw, double qx, double qy,
                                       double qz);

}  // namespace semlift
