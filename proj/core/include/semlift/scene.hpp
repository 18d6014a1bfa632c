#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "semlift/geometry.hpp"
#include "semlift/point_cloud.hpp"

namespace semlift {

// One 2D observation of an image: subpixel location plus the id of the 3D
// point it tracks, or -1 when unmatched.
struct SfmObservation {
  double u = 0.0;
  double v = 0.0;
  int64_t point3d_id = -1;
};

struct Frame {
  std::string name;
  int camera_id = 0;
  PoseSE3 pose;  // world -> camera
  std::vector<SfmObservation> observations;
};

// In-memory model of an SfM text reconstruction: cameras, posed frames with
// observations, and the reconstructed cloud.
struct SceneModel {
  std::map<int, CameraModel> cameras;
  std::vector<Frame> frames;
  SemanticPointCloud cloud;
  std::vector<int64_t> point_ids;  // original 3D point ids, aligned with cloud

  // Matched observations resolved to cloud indices, per frame.
  CorrespondenceSet correspondences() const;

  // Ground-plane camera centers (x, y), per frame.
  std::vector<Eigen::Vector2d> camera_ground_positions() const;

  // Throws DanglingReference when a frame names a missing camera or an
  // observation names a missing point.
  void validate() const;
};

// Reads cameras.txt, images.txt and points3D.txt from `dir`. Camera models
// PINHOLE, SIMPLE_PINHOLE, OPENCV and FULL_OPENCV are understood; missing
// radial terms default to zero. Throws ParseError (with file and line),
// UnknownCameraModel or DanglingReference.
SceneModel ingest_sfm_text(const std::filesystem::path& dir);

// Writes the three text files back; ingest(write(ingest(x))) is a fixed
// point. Cameras with any distortion serialize as OPENCV (plus k3 as
// FULL_OPENCV when nonzero), pinhole cameras as PINHOLE.
void write_sfm_text(const SceneModel& model, const std::filesystem::path& dir);

}  // namespace semlift
