#include <doctest.h>

#include <png.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "semlift/config.hpp"
#include "semlift/errors.hpp"
#include "semlift/ply_io.hpp"
#include "semlift/png_io.hpp"
#include "semlift/scene.hpp"
#include "semlift/transform_io.hpp"
#include "test_helpers.hpp"

using namespace semlift;
using namespace semlift::testing;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
}

const char* kCameras =
    "# Camera list\n"
    "1 PINHOLE 640 480 500 500 320 240\n"
    "2 OPENCV 640 512 480 480 320 256 0.05 -0.01 0.001 -0.002\n";

const char* kImages =
    "# Image list\n"
    "1 1 0 0 0 0.5 -0.25 10 1 frame_a.png\n"
    "1.5 2.5 7 10.25 20.5 -1 33.5 40.5 9\n"
    "2 0.7071067811865476 0 0 0.7071067811865476 0 0 5 2 frame_b.png\n"
    "\n";

const char* kPoints =
    "# 3D points\n"
    "7 1.5 -2.25 30 255 0 0 0.5 1 0 \n"
    "9 -4 4 28 0 255 0 1.25 1 1 2 0\n";

SemanticPointCloud random_cloud(std::mt19937_64& rng, int n, bool with_colors) {
  SemanticPointCloud cloud;
  for (int i = 0; i < n; ++i) {
    cloud.points.emplace_back(uniform(rng, -100, 100), uniform(rng, -100, 100),
                              uniform(rng, -20, 20));
    cloud.labels.push_back(static_cast<uint8_t>(rng() % 16));
    if (with_colors) {
      cloud.colors.push_back({static_cast<uint8_t>(rng() % 256),
                              static_cast<uint8_t>(rng() % 256),
                              static_cast<uint8_t>(rng() % 256)});
    }
  }
  return cloud;
}

bool clouds_close(const SemanticPointCloud& a, const SemanticPointCloud& b,
                  double tol) {
  if (a.size() != b.size() || a.labels != b.labels || a.colors != b.colors) {
    return false;
  }
  for (size_t i = 0; i < a.size(); ++i) {
    if ((a.points[i] - b.points[i]).norm() > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("ingest_sfm_text reads a minimal model") {
  TempDir dir("sfm_minimal");
  write_file(dir.path() / "cameras.txt", kCameras);
  write_file(dir.path() / "images.txt", kImages);
  write_file(dir.path() / "points3D.txt", kPoints);

  const SceneModel model = ingest_sfm_text(dir.path());
  REQUIRE(model.cameras.size() == 2);
  REQUIRE(model.frames.size() == 2);
  REQUIRE(model.cloud.size() == 2);

  const CameraModel& pinhole = model.cameras.at(1);
  CHECK(pinhole.focal_x == 500.0);
  CHECK(pinhole.distortion.is_zero());

  const CameraModel& opencv = model.cameras.at(2);
  CHECK(opencv.distortion.k1 == 0.05);
  CHECK(opencv.distortion.p2 == -0.002);
  CHECK(opencv.distortion.k3 == 0.0);  // 8-parameter model has no k3

  CHECK(model.frames[0].name == "frame_a.png");
  CHECK(model.frames[0].camera_id == 1);
  REQUIRE(model.frames[0].observations.size() == 3);
  CHECK(model.frames[0].observations[1].point3d_id == -1);
  CHECK(model.frames[1].observations.empty());

  // Frame b: 90-degree rotation about z from its quaternion.
  CHECK((model.frames[1].pose.rotation - rot_z(90.0)).cwiseAbs().maxCoeff() < 1e-9);

  // Unmatched observation casts no correspondence.
  const CorrespondenceSet corrs = model.correspondences();
  REQUIRE(corrs.per_image[0].size() == 2);
  CHECK(corrs.per_image[0][0].point_index == 0);  // pid 7 -> index 0
  CHECK(corrs.per_image[0][1].point_index == 1);  // pid 9 -> index 1
}

TEST_CASE("ingest_sfm_text error paths") {
  TempDir dir("sfm_errors");
  write_file(dir.path() / "images.txt", "");
  write_file(dir.path() / "points3D.txt", "");

  SUBCASE("unknown camera model") {
    write_file(dir.path() / "cameras.txt", "1 FISHEYE 640 480 400 320 240\n");
    CHECK_THROWS_AS(ingest_sfm_text(dir.path()), UnknownCameraModel);
  }
  SUBCASE("wrong parameter count") {
    write_file(dir.path() / "cameras.txt", "1 PINHOLE 640 480 500 500 320\n");
    CHECK_THROWS_AS(ingest_sfm_text(dir.path()), ParseError);
  }
  SUBCASE("bad number") {
    write_file(dir.path() / "cameras.txt", "1 PINHOLE 640 480 li 500 320 240\n");
    CHECK_THROWS_AS(ingest_sfm_text(dir.path()), ParseError);
  }
  SUBCASE("dangling camera reference") {
    write_file(dir.path() / "cameras.txt", kCameras);
    write_file(dir.path() / "images.txt",
               "1 1 0 0 0 0 0 10 9 frame.png\n\n");
    CHECK_THROWS_AS(ingest_sfm_text(dir.path()), DanglingReference);
  }
  SUBCASE("dangling point reference") {
    write_file(dir.path() / "cameras.txt", kCameras);
    write_file(dir.path() / "images.txt",
               "1 1 0 0 0 0 0 10 1 frame.png\n1 1 42\n");
    CHECK_THROWS_AS(ingest_sfm_text(dir.path()), DanglingReference);
  }
  SUBCASE("parse errors carry file and line") {
    write_file(dir.path() / "cameras.txt", "# ok\n\n1 PINHOLE 640 480 500\n");
    try {
      ingest_sfm_text(dir.path());
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("cameras.txt:3") != std::string::npos);
    }
  }
}

TEST_CASE("sfm ingest/serialize round trip is a fixed point") {
  TempDir dir("sfm_roundtrip");
  write_file(dir.path() / "cameras.txt", kCameras);
  write_file(dir.path() / "images.txt", kImages);
  write_file(dir.path() / "points3D.txt", kPoints);

  const SceneModel a = ingest_sfm_text(dir.path());
  TempDir out("sfm_roundtrip_out");
  write_sfm_text(a, out.path());
  const SceneModel b = ingest_sfm_text(out.path());
  TempDir out2("sfm_roundtrip_out2");
  write_sfm_text(b, out2.path());
  const SceneModel c = ingest_sfm_text(out2.path());

  REQUIRE(b.frames.size() == a.frames.size());
  REQUIRE(b.cloud.size() == a.cloud.size());
  CHECK(b.point_ids == a.point_ids);
  for (size_t n = 0; n < a.frames.size(); ++n) {
    CHECK(b.frames[n].name == a.frames[n].name);
    CHECK((b.frames[n].pose.rotation - a.frames[n].pose.rotation)
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    CHECK((b.frames[n].pose.translation - a.frames[n].pose.translation).norm() <
          1e-12);
    REQUIRE(b.frames[n].observations.size() == a.frames[n].observations.size());
  }
  CHECK(clouds_close(b.cloud, a.cloud, 1e-12));
  CHECK(clouds_close(c.cloud, b.cloud, 0.0));
}

TEST_CASE("ply round trips") {
  std::mt19937_64 rng(149);
  TempDir dir("ply");

  SUBCASE("binary round trip is lossless") {
    const SemanticPointCloud cloud = random_cloud(rng, 1000, true);
    write_ply(cloud, dir.path() / "a.ply", PlyEncoding::binary_le);
    const SemanticPointCloud back = read_ply(dir.path() / "a.ply");
    CHECK(clouds_close(back, cloud, 0.0));
  }

  SUBCASE("ascii and binary agree") {
    const SemanticPointCloud cloud = random_cloud(rng, 200, false);
    write_ply(cloud, dir.path() / "a.ply", PlyEncoding::ascii);
    write_ply(cloud, dir.path() / "b.ply", PlyEncoding::binary_le);
    const SemanticPointCloud from_ascii = read_ply(dir.path() / "a.ply");
    const SemanticPointCloud from_binary = read_ply(dir.path() / "b.ply");
    CHECK(clouds_close(from_ascii, cloud, 1e-9));
    CHECK(clouds_close(from_binary, cloud, 0.0));
  }

  SUBCASE("empty cloud") {
    write_ply({}, dir.path() / "empty.ply");
    const SemanticPointCloud back = read_ply(dir.path() / "empty.ply");
    CHECK(back.size() == 0);
  }

  SUBCASE("missing label property reads as unlabeled") {
    write_file(dir.path() / "nolabel.ply",
               "ply\nformat ascii 1.0\nelement vertex 2\n"
               "property float x\nproperty float y\nproperty float z\n"
               "end_header\n1 2 3\n4 5 6\n");
    const SemanticPointCloud back = read_ply(dir.path() / "nolabel.ply");
    REQUIRE(back.size() == 2);
    CHECK(back.count_unlabeled() == 2);
    CHECK(back.points[1].x() == doctest::Approx(4.0));
  }

  SUBCASE("float32 coordinates survive within float precision") {
    write_file(dir.path() / "f32.ply",
               "ply\nformat ascii 1.0\nelement vertex 1\n"
               "property float x\nproperty float y\nproperty float z\n"
               "property uchar label\nend_header\n1.25 -2.5 1e4 3\n");
    const SemanticPointCloud back = read_ply(dir.path() / "f32.ply");
    CHECK(back.points[0].z() == doctest::Approx(1e4));
    CHECK(back.labels[0] == 3);
  }

  SUBCASE("malformed headers") {
    write_file(dir.path() / "bad1.ply", "png\nformat ascii 1.0\nend_header\n");
    CHECK_THROWS_AS(read_ply(dir.path() / "bad1.ply"), MalformedHeader);
    write_file(dir.path() / "bad2.ply",
               "ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"
               "property float y\nend_header\n1 2\n");
    CHECK_THROWS_AS(read_ply(dir.path() / "bad2.ply"), MalformedHeader);
    write_file(dir.path() / "bad3.ply",
               "ply\nformat binary_big_endian 1.0\nelement vertex 0\n"
               "property float x\nproperty float y\nproperty float z\n"
               "end_header\n");
    CHECK_THROWS_AS(read_ply(dir.path() / "bad3.ply"), MalformedHeader);
  }

  SUBCASE("truncated payloads") {
    write_file(dir.path() / "trunc.ply",
               "ply\nformat ascii 1.0\nelement vertex 3\n"
               "property float x\nproperty float y\nproperty float z\n"
               "end_header\n1 2 3\n4 5 6\n");
    CHECK_THROWS_AS(read_ply(dir.path() / "trunc.ply"), TruncatedPayload);

    const SemanticPointCloud cloud = random_cloud(rng, 10, false);
    write_ply(cloud, dir.path() / "truncb.ply", PlyEncoding::binary_le);
    // Chop the last bytes of the binary payload.
    const auto size = std::filesystem::file_size(dir.path() / "truncb.ply");
    std::filesystem::resize_file(dir.path() / "truncb.ply", size - 5);
    CHECK_THROWS_AS(read_ply(dir.path() / "truncb.ply"), TruncatedPayload);
  }
}

TEST_CASE("label png round trips") {
  TempDir dir("png");
  std::mt19937_64 rng(151);

  SUBCASE("random map survives") {
    LabelMap map(64, 64);
    for (auto& v : map.data) v = static_cast<uint8_t>(rng() % 16);
    write_label_png(map, dir.path() / "map.png");
    const LabelMap back = read_label_png(dir.path() / "map.png");
    CHECK(back == map);
  }

  SUBCASE("all-zero map is valid") {
    LabelMap map(16, 8);
    write_label_png(map, dir.path() / "zero.png");
    const LabelMap back = read_label_png(dir.path() / "zero.png");
    CHECK(back == map);
    CHECK(back.count_labeled() == 0);
  }

  SUBCASE("rgb input is rejected for label maps") {
    ImageU8 rgb(8, 8, 3, 77);
    write_image_png(rgb, dir.path() / "rgb.png");
    CHECK_THROWS_AS(read_label_png(dir.path() / "rgb.png"), WrongChannelCount);
    const ImageU8 back = read_image_png(dir.path() / "rgb.png");
    CHECK(back == rgb);
  }

  SUBCASE("16-bit input is rejected") {
    // Hand-written 16-bit grayscale PNG.
    std::FILE* f = std::fopen((dir.path() / "deep.png").string().c_str(), "wb");
    REQUIRE(f);
    png_structp png =
        png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, f);
    png_set_IHDR(png, info, 4, 4, 16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<uint16_t> row(4, 0x1234);
    for (int v = 0; v < 4; ++v) {
      png_write_row(png, reinterpret_cast<png_bytep>(row.data()));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);

    CHECK_THROWS_AS(read_label_png(dir.path() / "deep.png"), WrongBitDepth);
  }

  SUBCASE("non-png input") {
    write_file(dir.path() / "fake.png", "definitely not a png");
    CHECK_THROWS_AS(read_label_png(dir.path() / "fake.png"), MalformedHeader);
  }
}

TEST_CASE("transform sidecar round trip") {
  TempDir dir("transform");
  const PoseSE3 t = make_pose(rot_z(17.0), {1.5, -2.25, 0.125});
  write_transform_text(t, dir.path() / "t.txt");
  const PoseSE3 back = read_transform_text(dir.path() / "t.txt");
  CHECK((back.rotation - t.rotation).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((back.translation - t.translation).norm() < 1e-15);

  write_file(dir.path() / "bad.txt", "1 0 0\n");
  CHECK_THROWS_AS(read_transform_text(dir.path() / "bad.txt"), ParseError);
}

TEST_CASE("config parsing") {
  const std::string text =
      "# pipeline config\n"
      "workers = 4\n"
      "[lift]\n"
      "complete_k = 8\n"
      "tie_break = common\n"
      "[rgb]\n"
      "occlusion_tau = 0.25\n"
      "knn_pass2_k = 21\n"
      "[thermal]\n"
      "splat_radius = 2\n"
      "[classes]\n"
      "1 = road 0.3\n"
      "2 = building 0.2\n"
      "3 = tree 0.1\n"
      "[remap]\n"
      "3 = 1\n";

  const PipelineConfig cfg = parse_config_text(text);
  CHECK(cfg.workers == 4);
  CHECK(cfg.complete_k == 8);
  CHECK(cfg.tie_break == TieBreak::common);
  CHECK(cfg.rgb.occlusion_tau == doctest::Approx(0.25));
  CHECK(cfg.rgb.knn_pass2_k == 21);
  CHECK(cfg.rgb.occlusion_kernel == 9);   // untouched default
  CHECK(cfg.thermal.splat_radius == 2);
  CHECK(cfg.thermal.occlusion_kernel == 5);
  REQUIRE(cfg.catalog.num_classes() == 3);
  CHECK(cfg.catalog.name(2) == "building");
  CHECK(cfg.class_remap.at(3) == 1);

  SUBCASE("unknown keys are rejected") {
    CHECK_THROWS_AS(parse_config_text("[rgb]\nsigma = 3\n"), ParseError);
    CHECK_THROWS_AS(parse_config_text("bogus = 1\n"), ParseError);
    CHECK_THROWS_AS(parse_config_text("[nope]\n"), ParseError);
  }

  SUBCASE("invalid values fail validation") {
    CHECK_THROWS_AS(parse_config_text("[rgb]\nocclusion_kernel = 4\n"),
                    std::invalid_argument);
  }

  SUBCASE("canonical dump is stable and hashes the remap table") {
    const std::string dump = cfg.canonical_dump();
    CHECK(dump.find("rgb.occlusion_tau = 0.25") != std::string::npos);
    CHECK(dump.find("remap.3 = 1") != std::string::npos);
    CHECK(parse_config_text(text).canonical_dump() == dump);
  }

  SUBCASE("remap_labels applies the table") {
    LabelMap map(4, 1);
    map.data = {0, 3, 2, 3};
    remap_labels(map, cfg.class_remap);
    CHECK(map.data == std::vector<uint8_t>{0, 1, 2, 1});
  }
}
