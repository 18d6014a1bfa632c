#pragma once

#include <stdexcept>
#include <string>

namespace semlift {

// Base class for all domain errors. `kind()` is a stable machine-readable
// identifier; the CLI maps it into its single-line error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SEMLIFT_DEFINE_ERROR(Name, kind_literal)            \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& message)                \
        : Error(kind_literal, message) {}                    \
  }

SEMLIFT_DEFINE_ERROR(NonConvergence, "non_convergence");
SEMLIFT_DEFINE_ERROR(ZeroQuaternion, "zero_quaternion");
SEMLIFT_DEFINE_ERROR(EmptyInput, "empty_input");
SEMLIFT_DEFINE_ERROR(ResolutionMismatch, "resolution_mismatch");
SEMLIFT_DEFINE_ERROR(NoLabeledPoints, "no_labeled_points");
SEMLIFT_DEFINE_ERROR(NoLabeledPixels, "no_labeled_pixels");
SEMLIFT_DEFINE_ERROR(DegenerateGeometry, "degenerate_geometry");
SEMLIFT_DEFINE_ERROR(NoCorrespondences, "no_correspondences");
SEMLIFT_DEFINE_ERROR(NoVisiblePoints, "no_visible_points");
SEMLIFT_DEFINE_ERROR(DegenerateBBox, "degenerate_bbox");
SEMLIFT_DEFINE_ERROR(ParseError, "parse_error");
SEMLIFT_DEFINE_ERROR(UnknownCameraModel, "unknown_camera_model");
SEMLIFT_DEFINE_ERROR(DanglingReference, "dangling_reference");
SEMLIFT_DEFINE_ERROR(MalformedHeader, "malformed_header");
SEMLIFT_DEFINE_ERROR(TruncatedPayload, "truncated_payload");
SEMLIFT_DEFINE_ERROR(WrongBitDepth, "wrong_bit_depth");
SEMLIFT_DEFINE_ERROR(WrongChannelCount, "wrong_channel_count");
SEMLIFT_DEFINE_ERROR(EmptySpec, "empty_spec");
SEMLIFT_DEFINE_ERROR(EmptyMatrix, "empty_matrix");
SEMLIFT_DEFINE_ERROR(IoError, "io_error");

#undef SEMLIFT_DEFINE_ERROR

}  // namespace semlift
