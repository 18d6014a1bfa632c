#pragma once

#include <filesystem>

#include "semlift/geometry.hpp"

namespace semlift {

// Plain-text sidecar holding one rigid transform as a 4x4 row-major matrix
// (four lines of four numbers; comment lines start with '#').
void write_transform_text(const PoseSE3& transform,
                          const std::filesystem::path& path);
PoseSE3 read_transform_text(const std::filesystem::path& path);

}  // namespace semlift
