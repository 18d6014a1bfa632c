#include "semlift/transform_io.hpp"

#include <fstream>
#include <sstream>
#include <vector>

#include "semlift/errors.hpp"

namespace semlift {

void write_transform_text(const PoseSE3& transform,
                          const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << "# rigid transform, 4x4 row-major\n";
  os.precision(17);
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) os << transform.rotation(r, c) << " ";
    os << transform.translation(r) << "\n";
  }
  os << "0 0 0 1\n";
}

PoseSE3 read_transform_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ss(line);
    double v;
    while (ss >> v) values.push_back(v);
  }
  if (values.size() != 16) {
    throw ParseError(path.string() + ": expected 16 matrix entries, got " +
                     std::to_string(values.size()));
  }
  if (values[12] != 0.0 || values[13] != 0.0 || values[14] != 0.0 ||
      values[15] != 1.0) {
    throw ParseError(path.string() + ": last row must be 0 0 0 1");
  }
  PoseSE3 pose;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = values[r * 4 + c];
    pose.translation(r) = values[r * 4 + 3];
  }
  pose.validate(1e-6);
  return pose;
}

}  // namespace semlift
