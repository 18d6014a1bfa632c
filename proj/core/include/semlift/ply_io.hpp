#pragma once

#include <filesystem>

#include "semlift/point_cloud.hpp"

namespace semlift {

enum class PlyEncoding { ascii, binary_le };

// Reads a point cloud from PLY. The header must declare float or double
// x/y/z; an optional uchar `label` property fills labels (absent = all
// unlabeled) and optional uchar red/green/blue fill colors. Unknown vertex
// properties are skipped. Throws MalformedHeader / TruncatedPayload.
SemanticPointCloud read_ply(const std::filesystem::path& path);

// Writes x/y/z as float64 plus uchar label (and uchar red/green/blue when
// colors are present).
void write_ply(const SemanticPointCloud& cloud, const std::filesystem::path& path,
               PlyEncoding encoding = PlyEncoding::binary_le);

}  // namespace semlift
