#include "semlift/geometry.hpp"

#include <Eigen/LU>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "semlift/errors.hpp"

namespace semlift {

void CameraModel::validate() const {
  if (!(focal_x > 0.0) || !(focal_y > 0.0)) {
    throw std::invalid_argument("CameraModel: focal lengths must be positive");
  }
  if (width < 1 || height < 1) {
    throw std::invalid_argument("CameraModel: resolution must be at least 1x1");
  }
  if (!(principal_x >= 0.0 && principal_x < width) ||
      !(principal_y >= 0.0 && principal_y < height)) {
    throw std::invalid_argument(
        "CameraModel: principal point must lie inside the image");
  }
  if (!std::isfinite(distortion.k1) || !std::isfinite(distortion.k2) ||
      !std::isfinite(distortion.k3) || !std::isfinite(distortion.p1) ||
      !std::isfinite(distortion.p2)) {
    throw std::invalid_argument("CameraModel: distortion must be finite");
  }
}

bool PoseSE3::is_valid(double tol) const {
  const Eigen::Matrix3d err =
      rotation.transpose() * rotation - Eigen::Matrix3d::Identity();
  if (err.cwiseAbs().maxCoeff() > tol) return false;
  if (std::abs(rotation.determinant() - 1.0) > tol) return false;
  return translation.allFinite();
}

void PoseSE3::validate(double tol) const {
  if (!is_valid(tol)) {
    throw std::invalid_argument("PoseSE3: rotation is not a proper rotation");
  }
}

Eigen::Vector2d distort_normalized(const Eigen::Vector2d& p,
                                   const DistortionCoeffs& d) {
  const double x = p.x();
  const double y = p.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + r2 * (d.k1 + r2 * (d.k2 + r2 * d.k3));
  const double xd = x * radial + 2.0 * d.p1 * x * y + d.p2 * (r2 + 2.0 * x * x);
  const double yd = y * radial + d.p1 * (r2 + 2.0 * y * y) + 2.0 * d.p2 * x * y;
  return {xd, yd};
}

namespace {

// Jacobian of the forward model at q.
Eigen::Matrix2d distort_jacobian(const Eigen::Vector2d& q,
                                 const DistortionCoeffs& d) {
  const double x = q.x();
  const double y = q.y();
  const double r2 = x * x + y * y;
  const double radial = 1.0 + r2 * (d.k1 + r2 * (d.k2 + r2 * d.k3));
  const double dradial = d.k1 + r2 * (2.0 * d.k2 + 3.0 * d.k3 * r2);
  Eigen::Matrix2d j;
  j(0, 0) = radial + 2.0 * x * x * dradial + 2.0 * d.p1 * y + 6.0 * d.p2 * x;
  j(0, 1) = 2.0 * x * y * dradial + 2.0 * d.p1 * x + 2.0 * d.p2 * y;
  j(1, 0) = 2.0 * x * y * dradial + 2.0 * d.p1 * x + 2.0 * d.p2 * y;
  j(1, 1) = radial + 2.0 * y * y * dradial + 6.0 * d.p1 * y + 2.0 * d.p2 * x;
  return j;
}

}  // namespace

Eigen::Vector2d undistort_normalized(const Eigen::Vector2d& p,
                                     const DistortionCoeffs& d, double tol,
                                     int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("undistort: tol must be > 0");
  if (max_iter < 1) throw std::invalid_argument("undistort: max_iter must be >= 1");
  if (d.is_zero()) return p;

  // Damped Newton on distort(q) - p = 0, starting from the distorted point.
  Eigen::Vector2d q = p;
  Eigen::Vector2d res = distort_normalized(q, d) - p;
  double residual = res.norm();
  double step = 1.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    if (residual <= tol) return q;
    const Eigen::Matrix2d j = distort_jacobian(q, d);
    const double det = j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0);
    Eigen::Vector2d delta;
    if (std::abs(det) > 1e-15) {
      delta = {(j(1, 1) * res.x() - j(0, 1) * res.y()) / det,
               (j(0, 0) * res.y() - j(1, 0) * res.x()) / det};
    } else {
      delta = res;  // singular Jacobian: fall back to a plain residual step
    }
    const Eigen::Vector2d candidate = q - step * delta;
    const Eigen::Vector2d cand_res = distort_normalized(candidate, d) - p;
    if (cand_res.norm() < residual) {
      q = candidate;
      res = cand_res;
      residual = cand_res.norm();
      step = std::min(1.0, step * 2.0);
    } else {
      step *= 0.5;  // damp near the fold of the model
    }
  }
  if (residual <= tol) return q;
  std::ostringstream msg;
  msg << "undistort_normalized: residual " << residual << " > tol " << tol
      << " after " << max_iter << " iterations";
  throw NonConvergence(msg.str());
}

std::optional<PixelDepth> project(const Eigen::Vector3d& x, const PoseSE3& pose,
                                  const CameraModel& cam,
                                  bool apply_distortion) {
  const Eigen::Vector3d xc = pose.rotation * x + pose.translation;
  if (!(xc.z() > 0.0)) return std::nullopt;
  Eigen::Vector2d n(xc.x() / xc.z(), xc.y() / xc.z());
  if (apply_distortion && !cam.distortion.is_zero()) {
    n = distort_normalized(n, cam.distortion);
  }
  return PixelDepth{cam.focal_x * n.x() + cam.principal_x,
                    cam.focal_y * n.y() + cam.principal_y, xc.z()};
}

PoseSE3 compose(const PoseSE3& a, const PoseSE3& b) {
  PoseSE3 out;
  out.rotation = a.rotation * b.rotation;
  out.translation = a.rotation * b.translation + a.translation;
  return out;
}

PoseSE3 invert(const PoseSE3& a) {
  PoseSE3 out;
  out.rotation = a.rotation.transpose();
  out.translation = -(out.rotation * a.translation);
  return out;
}

Eigen::Matrix3d quaternion_to_rotation(double qw, double qx, double qy,
                                       double qz) {
  const double norm2 = qw * qw + qx * qx + qy * qy + qz * qz;
  if (!(norm2 > 1e-30)) {
    throw ZeroQuaternion("quaternion_to_rotation: zero-norm quaternion");
  }
  const double s = 1.0 / std::sqrt(norm2);
  const double w = qw * s, x = qx * s, y = qy * s, z = qz * s;
  Eigen::Matrix3d r;
  r << 1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y),
      2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x),
      2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y);
  return r;
}

}  // namespace semlift
