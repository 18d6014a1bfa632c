#pragma once

#include <filesystem>

#include "semlift/label_map.hpp"

namespace semlift {

// 8-bit single-channel label raster; pixel value = class id, 0 = unlabeled.
// Throws WrongBitDepth for non-8-bit files and WrongChannelCount for
// multi-channel or palette input.
LabelMap read_label_png(const std::filesystem::path& path);
void write_label_png(const LabelMap& map, const std::filesystem::path& path);

// General 8-bit raster (1 or 3 channels); alpha is rejected.
ImageU8 read_image_png(const std::filesystem::path& path);
void write_image_png(const ImageU8& image, const std::filesystem::path& path);

}  // namespace semlift
