#pragma once

#include <cstdint>
#include <vector>

namespace semlift {

// Dense H x W map of class ids; 0 means unlabeled. Row-major storage.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  LabelMap() = default;
  LabelMap(int w, int h, uint8_t fill = 0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  uint8_t at(int u, int v) const { return data[static_cast<size_t>(v) * width + u]; }
  uint8_t& at(int u, int v) { return data[static_cast<size_t>(v) * width + u]; }

  size_t pixel_count() const { return data.size(); }

  size_t count_labeled() const {
    size_t n = 0;
    for (uint8_t c : data) n += (c != 0);
    return n;
  }

  bool operator==(const LabelMap&) const = default;
};

// Interleaved 8-bit raster (grayscale or RGB imagery, validity masks).
struct ImageU8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> data;

  ImageU8() = default;
  ImageU8(int w, int h, int ch, uint8_t fill = 0)
      : width(w), height(h), channels(ch),
        data(static_cast<size_t>(w) * h * ch, fill) {}

  uint8_t at(int u, int v, int c) const {
    return data[(static_cast<size_t>(v) * width + u) * channels + c];
  }
  uint8_t& at(int u, int v, int c) {
    return data[(static_cast<size_t>(v) * width + u) * channels + c];
  }

  bool operator==(const ImageU8&) const = default;
};

}  // namespace semlift
