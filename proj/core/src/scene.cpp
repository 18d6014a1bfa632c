#include "semlift/scene.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "semlift/errors.hpp"

namespace semlift {

CorrespondenceSet SceneModel::correspondences() const {
  std::unordered_map<int64_t, uint32_t> id_to_index;
  id_to_index.reserve(point_ids.size());
  for (uint32_t i = 0; i < point_ids.size(); ++i) id_to_index[point_ids[i]] = i;

  CorrespondenceSet corrs;
  corrs.per_image.resize(frames.size());
  for (size_t n = 0; n < frames.size(); ++n) {
    for (const SfmObservation& obs : frames[n].observations) {
      if (obs.point3d_id < 0) continue;
      const auto it = id_to_index.find(obs.point3d_id);
      if (it == id_to_index.end()) {
        throw DanglingReference("correspondences: observation references point " +
                                std::to_string(obs.point3d_id));
      }
      corrs.per_image[n].push_back({obs.u, obs.v, it->second});
    }
  }
  return corrs;
}

std::vector<Eigen::Vector2d> SceneModel::camera_ground_positions() const {
  std::vector<Eigen::Vector2d> positions;
  positions.reserve(frames.size());
  for (const Frame& f : frames) {
    const Eigen::Vector3d c = f.pose.center();
    positions.emplace_back(c.x(), c.y());
  }
  return positions;
}

void SceneModel::validate() const {
  std::unordered_map<int64_t, uint32_t> ids;
  for (uint32_t i = 0; i < point_ids.size(); ++i) ids[point_ids[i]] = i;
  for (const Frame& f : frames) {
    if (!cameras.count(f.camera_id)) {
      throw DanglingReference("frame '" + f.name + "' references camera " +
                              std::to_string(f.camera_id));
    }
    for (const SfmObservation& obs : f.observations) {
      if (obs.point3d_id >= 0 && !ids.count(obs.point3d_id)) {
        throw DanglingReference("frame '" + f.name + "' references point " +
                                std::to_string(obs.point3d_id));
      }
    }
  }
  cloud.validate();
  if (point_ids.size() != cloud.size()) {
    throw DanglingReference("point id table does not match the cloud");
  }
}

namespace {

struct LineReader {
  std::ifstream stream;
  std::string file;
  int line_no = 0;

  LineReader(const std::filesystem::path& path) : stream(path), file(path.string()) {
    if (!stream) throw IoError("cannot open " + file);
  }

  // Next non-comment, non-empty line; false at EOF.
  bool next(std::string& line) {
    while (std::getline(stream, line)) {
      ++line_no;
      const size_t start = line.find_first_not_of(" \t\r");
      if (start == std::string::npos) continue;
      if (line[start] == '#') continue;
      const size_t end = line.find_last_not_of(" \t\r");
      line = line.substr(start, end - start + 1);
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(file + ":" + std::to_string(line_no) + ": " + what);
  }
};

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

double parse_double(const LineReader& r, const std::string& tok) {
  try {
    size_t pos = 0;
    const double val = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return val;
  } catch (const std::exception&) {
    r.fail("expected a number, got '" + tok + "'");
  }
}

int64_t parse_int(const LineReader& r, const std::string& tok) {
  int64_t val = 0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), val);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size()) {
    r.fail("expected an integer, got '" + tok + "'");
  }
  return val;
}

std::map<int, CameraModel> read_cameras(const std::filesystem::path& path) {
  LineReader reader(path);
  std::map<int, CameraModel> cameras;
  std::string line;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.size() < 4) reader.fail("camera line needs ID MODEL W H params...");
    const int id = static_cast<int>(parse_int(reader, tok[0]));
    const std::string& model = tok[1];
    CameraModel cam;
    cam.width = static_cast<int>(parse_int(reader, tok[2]));
    cam.height = static_cast<int>(parse_int(reader, tok[3]));
    std::vector<double> params;
    for (size_t i = 4; i < tok.size(); ++i) params.push_back(parse_double(reader, tok[i]));

    auto need = [&](size_t n) {
      if (params.size() != n) {
        reader.fail(model + " expects " + std::to_string(n) + " params, got " +
                    std::to_string(params.size()));
      }
    };
    if (model == "PINHOLE") {
      need(4);
      cam.focal_x = params[0];
      cam.focal_y = params[1];
      cam.principal_x = params[2];
      cam.principal_y = params[3];
    } else if (model == "SIMPLE_PINHOLE") {
      need(3);
      cam.focal_x = cam.focal_y = params[0];
      cam.principal_x = params[1];
      cam.principal_y = params[2];
    } else if (model == "OPENCV") {
      need(8);
      cam.focal_x = params[0];
      cam.focal_y = params[1];
      cam.principal_x = params[2];
      cam.principal_y = params[3];
      cam.distortion.k1 = params[4];
      cam.distortion.k2 = params[5];
      cam.distortion.p1 = params[6];
      cam.distortion.p2 = params[7];
      // k3 = 0: the 8-parameter model carries no third radial term.
    } else if (model == "FULL_OPENCV") {
      need(12);
      cam.focal_x = params[0];
      cam.focal_y = params[1];
      cam.principal_x = params[2];
      cam.principal_y = params[3];
      cam.distortion.k1 = params[4];
      cam.distortion.k2 = params[5];
      cam.distortion.p1 = params[6];
      cam.distortion.p2 = params[7];
      cam.distortion.k3 = params[8];
      if (params[9] != 0.0 || params[10] != 0.0 || params[11] != 0.0) {
        reader.fail("FULL_OPENCV rational terms k4..k6 are unsupported unless zero");
      }
    } else {
      throw UnknownCameraModel(path.string() + ":" + std::to_string(reader.line_no) +
                               ": camera model '" + model + "'");
    }
    try {
      cam.validate();
    } catch (const std::invalid_argument& e) {
      reader.fail(e.what());
    }
    if (!cameras.emplace(id, cam).second) {
      reader.fail("duplicate camera id " + std::to_string(id));
    }
  }
  return cameras;
}

std::vector<Frame> read_images(const std::filesystem::path& path) {
  LineReader reader(path);
  std::vector<Frame> frames;
  std::string line;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.size() != 10) {
      reader.fail("image line needs ID QW QX QY QZ TX TY TZ CAMERA_ID NAME");
    }
    Frame frame;
    const double qw = parse_double(reader, tok[1]);
    const double qx = parse_double(reader, tok[2]);
    const double qy = parse_double(reader, tok[3]);
    const double qz = parse_double(reader, tok[4]);
    try {
      frame.pose.rotation = quaternion_to_rotation(qw, qx, qy, qz);
    } catch (const ZeroQuaternion& e) {
      reader.fail(e.what());
    }
    frame.pose.translation =
        Eigen::Vector3d(parse_double(reader, tok[5]), parse_double(reader, tok[6]),
                        parse_double(reader, tok[7]));
    frame.camera_id = static_cast<int>(parse_int(reader, tok[8]));
    frame.name = tok[9];

    // Observation line follows, possibly blank (blank lines are skipped by
    // the reader, so a frame without observations must end the file or be
    // followed by another image line -- detect by token shape).
    std::string obs_line;
    if (!std::getline(reader.stream, obs_line)) {
      frames.push_back(std::move(frame));
      break;
    }
    ++reader.line_no;
    const auto obs_tok = split_ws(obs_line);
    if (obs_tok.size() % 3 != 0) {
      reader.fail("observation line must hold X Y POINT3D_ID triplets");
    }
    for (size_t i = 0; i < obs_tok.size(); i += 3) {
      SfmObservation obs;
      obs.u = parse_double(reader, obs_tok[i]);
      obs.v = parse_double(reader, obs_tok[i + 1]);
      obs.point3d_id = parse_int(reader, obs_tok[i + 2]);
      frame.observations.push_back(obs);
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

void read_points(const std::filesystem::path& path, SemanticPointCloud& cloud,
                 std::vector<int64_t>& point_ids) {
  LineReader reader(path);
  std::string line;
  while (reader.next(line)) {
    const auto tok = split_ws(line);
    if (tok.size() < 8) {
      reader.fail("point line needs PID X Y Z R G B ERROR [track...]");
    }
    if ((tok.size() - 8) % 2 != 0) {
      reader.fail("track elements must be IMAGE_ID POINT2D_IDX pairs");
    }
    point_ids.push_back(parse_int(reader, tok[0]));
    cloud.points.emplace_back(parse_double(reader, tok[1]),
                              parse_double(reader, tok[2]),
                              parse_double(reader, tok[3]));
    const auto r = parse_int(reader, tok[4]);
    const auto g = parse_int(reader, tok[5]);
    const auto b = parse_int(reader, tok[6]);
    if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) {
      reader.fail("color out of byte range");
    }
    cloud.colors.push_back({static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                            static_cast<uint8_t>(b)});
    cloud.labels.push_back(0);
  }
}

}  // namespace

SceneModel ingest_sfm_text(const std::filesystem::path& dir) {
  SceneModel model;
  model.cameras = read_cameras(dir / "cameras.txt");
  model.frames = read_images(dir / "images.txt");
  read_points(dir / "points3D.txt", model.cloud, model.point_ids);
  model.validate();
  return model;
}

void write_sfm_text(const SceneModel& model, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    std::ofstream os(dir / "cameras.txt");
    if (!os) throw IoError("cannot write " + (dir / "cameras.txt").string());
    os << "# Camera list: CAMERA_ID MODEL WIDTH HEIGHT PARAMS[]\n";
    os.precision(17);
    for (const auto& [id, cam] : model.cameras) {
      const DistortionCoeffs& d = cam.distortion;
      if (d.is_zero()) {
        os << id << " PINHOLE " << cam.width << " " << cam.height << " "
           << cam.focal_x << " " << cam.focal_y << " " << cam.principal_x << " "
           << cam.principal_y << "\n";
      } else if (d.k3 == 0.0) {
        os << id << " OPENCV " << cam.width << " " << cam.height << " "
           << cam.focal_x << " " << cam.focal_y << " " << cam.principal_x << " "
           << cam.principal_y << " " << d.k1 << " " << d.k2 << " " << d.p1 << " "
           << d.p2 << "\n";
      } else {
        os << id << " FULL_OPENCV " << cam.width << " " << cam.height << " "
           << cam.focal_x << " " << cam.focal_y << " " << cam.principal_x << " "
           << cam.principal_y << " " << d.k1 << " " << d.k2 << " " << d.p1 << " "
           << d.p2 << " " << d.k3 << " 0 0 0\n";
      }
    }
  }

  {
    std::ofstream os(dir / "images.txt");
    if (!os) throw IoError("cannot write " + (dir / "images.txt").string());
    os << "# Image list: IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME\n";
    os << "#   followed by: X Y POINT3D_ID triplets\n";
    os.precision(17);
    for (size_t n = 0; n < model.frames.size(); ++n) {
      const Frame& f = model.frames[n];
      const Eigen::Matrix3d& r = f.pose.rotation;
      // Rotation -> quaternion (Shepperd's stable branch selection).
      const double tr = r.trace();
      double qw, qx, qy, qz;
      if (tr > 0.0) {
        const double s = std::sqrt(tr + 1.0) * 2.0;
        qw = 0.25 * s;
        qx = (r(2, 1) - r(1, 2)) / s;
        qy = (r(0, 2) - r(2, 0)) / s;
        qz = (r(1, 0) - r(0, 1)) / s;
      } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
        const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
        qw = (r(2, 1) - r(1, 2)) / s;
        qx = 0.25 * s;
        qy = (r(0, 1) + r(1, 0)) / s;
        qz = (r(0, 2) + r(2, 0)) / s;
      } else if (r(1, 1) > r(2, 2)) {
        const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
        qw = (r(0, 2) - r(2, 0)) / s;
        qx = (r(0, 1) + r(1, 0)) / s;
        qy = 0.25 * s;
        qz = (r(1, 2) + r(2, 1)) / s;
      } else {
        const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
        qw = (r(1, 0) - r(0, 1)) / s;
        qx = (r(0, 2) + r(2, 0)) / s;
        qy = (r(1, 2) + r(2, 1)) / s;
        qz = 0.25 * s;
      }
      os << (n + 1) << " " << qw << " " << qx << " " << qy << " " << qz << " "
         << f.pose.translation.x() << " " << f.pose.translation.y() << " "
         << f.pose.translation.z() << " " << f.camera_id << " " << f.name << "\n";
      for (size_t i = 0; i < f.observations.size(); ++i) {
        const SfmObservation& obs = f.observations[i];
        os << (i ? " " : "") << obs.u << " " << obs.v << " " << obs.point3d_id;
      }
      os << "\n";
    }
  }

  {
    std::ofstream os(dir / "points3D.txt");
    if (!os) throw IoError("cannot write " + (dir / "points3D.txt").string());
    os << "# 3D point list: POINT3D_ID X Y Z R G B ERROR TRACK[]\n";
    os.precision(17);
    for (size_t i = 0; i < model.cloud.size(); ++i) {
      const Eigen::Vector3d& p = model.cloud.points[i];
      const std::array<uint8_t, 3> rgb =
          model.cloud.colors.empty() ? std::array<uint8_t, 3>{128, 128, 128}
                                     : model.cloud.colors[i];
      os << model.point_ids[i] << " " << p.x() << " " << p.y() << " " << p.z()
         << " " << int(rgb[0]) << " " << int(rgb[1]) << " " << int(rgb[2])
         << " 0\n";
    }
  }
}

}  // namespace semlift
