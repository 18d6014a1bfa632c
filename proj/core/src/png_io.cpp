#include "semlift/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <vector>

#include "semlift/errors.hpp"

namespace semlift {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngReader() {
    png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng allocation failed");
  }
  ~PngReader() { png_destroy_read_struct(&png, &info, nullptr); }
  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;
};

struct PngWriter {
  png_structp png = nullptr;
  png_infop info = nullptr;

  PngWriter() {
    png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (png) info = png_create_info_struct(png);
    if (!png || !info) throw IoError("libpng allocation failed");
  }
  ~PngWriter() { png_destroy_write_struct(&png, &info); }
  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;
};

struct PngMeta {
  int width;
  int height;
  int bit_depth;
  int color_type;
  int channels;
};

PngMeta read_png_into(const std::filesystem::path& path,
                      std::vector<uint8_t>& out) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw MalformedHeader(path.string() + ": not a PNG file");
  }

  PngReader reader;
  if (setjmp(png_jmpbuf(reader.png))) {
    throw TruncatedPayload(path.string() + ": libpng decode failed");
  }
  png_init_io(reader.png, file.get());
  png_set_sig_bytes(reader.png, 8);
  png_read_info(reader.png, reader.info);

  PngMeta meta{};
  meta.width = static_cast<int>(png_get_image_width(reader.png, reader.info));
  meta.height = static_cast<int>(png_get_image_height(reader.png, reader.info));
  meta.bit_depth = png_get_bit_depth(reader.png, reader.info);
  meta.color_type = png_get_color_type(reader.png, reader.info);

  if (meta.bit_depth != 8) {
    throw WrongBitDepth(path.string() + ": bit depth " +
                        std::to_string(meta.bit_depth) + ", expected 8");
  }
  meta.channels = png_get_channels(reader.png, reader.info);

  out.resize(static_cast<size_t>(meta.width) * meta.height * meta.channels);
  std::vector<png_bytep> rows(meta.height);
  const size_t row_bytes = static_cast<size_t>(meta.width) * meta.channels;
  if (png_get_rowbytes(reader.png, reader.info) != row_bytes) {
    throw MalformedHeader(path.string() + ": unexpected row stride");
  }
  for (int v = 0; v < meta.height; ++v) rows[v] = out.data() + v * row_bytes;
  png_read_image(reader.png, rows.data());
  png_read_end(reader.png, nullptr);
  return meta;
}

void write_png(const std::filesystem::path& path, const uint8_t* data, int width,
               int height, int channels) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw IoError("cannot write " + path.string());

  PngWriter writer;
  if (setjmp(png_jmpbuf(writer.png))) {
    throw IoError(path.string() + ": libpng encode failed");
  }
  png_init_io(writer.png, file.get());
  const int color_type = channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(writer.png, writer.info, width, height, 8, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png, writer.info);

  std::vector<png_bytep> rows(height);
  const size_t row_bytes = static_cast<size_t>(width) * channels;
  for (int v = 0; v < height; ++v) {
    rows[v] = const_cast<png_bytep>(data + v * row_bytes);
  }
  png_write_image(writer.png, rows.data());
  png_write_end(writer.png, nullptr);
}

}  // namespace

LabelMap read_label_png(const std::filesystem::path& path) {
  std::vector<uint8_t> data;
  const PngMeta meta = read_png_into(path, data);
  if (meta.color_type != PNG_COLOR_TYPE_GRAY || meta.channels != 1) {
    throw WrongChannelCount(path.string() + ": label maps must be single-channel "
                            "grayscale, got " + std::to_string(meta.channels) +
                            " channel(s)");
  }
  LabelMap map(meta.width, meta.height);
  map.data = std::move(data);
  return map;
}

void write_label_png(const LabelMap& map, const std::filesystem::path& path) {
  write_png(path, map.data.data(), map.width, map.height, 1);
}

ImageU8 read_image_png(const std::filesystem::path& path) {
  std::vector<uint8_t> data;
  const PngMeta meta = read_png_into(path, data);
  if (meta.channels != 1 && meta.channels != 3) {
    throw WrongChannelCount(path.string() + ": expected grayscale or RGB, got " +
                            std::to_string(meta.channels) + " channel(s)");
  }
  ImageU8 image(meta.width, meta.height, meta.channels);
  image.data = std::move(data);
  return image;
}

void write_image_png(const ImageU8& image, const std::filesystem::path& path) {
  if (image.channels != 1 && image.channels != 3) {
    throw WrongChannelCount("write_image_png: only 1 or 3 channels supported");
  }
  write_png(path, image.data.data(), image.width, image.height, image.channels);
}

}  // namespace semlift
