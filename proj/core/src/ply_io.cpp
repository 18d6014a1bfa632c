#include "semlift/ply_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "semlift/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary PLY path assumes a little-endian host");

namespace semlift {

namespace {

enum class PropType { f32, f64, u8, i8, u16, i16, u32, i32 };

size_t prop_size(PropType t) {
  switch (t) {
    case PropType::f64: return 8;
    case PropType::f32: case PropType::u32: case PropType::i32: return 4;
    case PropType::u16: case PropType::i16: return 2;
    default: return 1;
  }
}

PropType parse_type(const std::string& name, const std::string& where) {
  if (name == "float" || name == "float32") return PropType::f32;
  if (name == "double" || name == "float64") return PropType::f64;
  if (name == "uchar" || name == "uint8") return PropType::u8;
  if (name == "char" || name == "int8") return PropType::i8;
  if (name == "ushort" || name == "uint16") return PropType::u16;
  if (name == "short" || name == "int16") return PropType::i16;
  if (name == "uint" || name == "uint32") return PropType::u32;
  if (name == "int" || name == "int32") return PropType::i32;
  throw MalformedHeader(where + ": unsupported property type '" + name + "'");
}

struct Property {
  std::string name;
  PropType type;
};

struct Header {
  bool binary = false;
  size_t vertex_count = 0;
  std::vector<Property> vertex_props;
};

Header read_header(std::istream& in, const std::string& where) {
  std::string line;
  if (!std::getline(in, line)) throw MalformedHeader(where + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "ply") throw MalformedHeader(where + ": missing 'ply' magic");

  Header header;
  bool have_format = false;
  bool in_vertex = false;
  bool done = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ss(line);
    std::string kw;
    ss >> kw;
    if (kw == "comment" || kw == "obj_info" || kw.empty()) continue;
    if (kw == "format") {
      std::string fmt, version;
      ss >> fmt >> version;
      if (fmt == "ascii") {
        header.binary = false;
      } else if (fmt == "binary_little_endian") {
        header.binary = true;
      } else {
        throw MalformedHeader(where + ": unsupported format '" + fmt + "'");
      }
      have_format = true;
    } else if (kw == "element") {
      std::string name;
      size_t count = 0;
      ss >> name >> count;
      if (!ss) throw MalformedHeader(where + ": bad element line");
      in_vertex = name == "vertex";
      if (in_vertex) header.vertex_count = count;
      if (!in_vertex && count > 0) {
        throw MalformedHeader(where + ": non-vertex element '" + name +
                              "' is unsupported");
      }
    } else if (kw == "property") {
      std::string type;
      ss >> type;
      if (type == "list") {
        throw MalformedHeader(where + ": list properties are unsupported");
      }
      std::string name;
      ss >> name;
      if (name.empty()) throw MalformedHeader(where + ": property without a name");
      if (in_vertex) header.vertex_props.push_back({name, parse_type(type, where)});
    } else if (kw == "end_header") {
      done = true;
      break;
    } else {
      throw MalformedHeader(where + ": unknown header keyword '" + kw + "'");
    }
  }
  if (!done) throw MalformedHeader(where + ": missing end_header");
  if (!have_format) throw MalformedHeader(where + ": missing format line");
  return header;
}

double decode(const unsigned char* p, PropType t) {
  switch (t) {
    case PropType::f32: {
      float v;
      std::memcpy(&v, p, 4);
      return v;
    }
    case PropType::f64: {
      double v;
      std::memcpy(&v, p, 8);
      return v;
    }
    case PropType::u8: return *p;
    case PropType::i8: return static_cast<int8_t>(*p);
    case PropType::u16: {
      uint16_t v;
      std::memcpy(&v, p, 2);
      return v;
    }
    case PropType::i16: {
      int16_t v;
      std::memcpy(&v, p, 2);
      return v;
    }
    case PropType::u32: {
      uint32_t v;
      std::memcpy(&v, p, 4);
      return v;
    }
    case PropType::i32: {
      int32_t v;
      std::memcpy(&v, p, 4);
      return v;
    }
  }
  return 0.0;
}

}  // namespace

SemanticPointCloud read_ply(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string where = path.string();
  const Header header = read_header(in, where);

  int ix = -1, iy = -1, iz = -1, ilabel = -1, ir = -1, ig = -1, ib = -1;
  for (size_t i = 0; i < header.vertex_props.size(); ++i) {
    const Property& p = header.vertex_props[i];
    const int idx = static_cast<int>(i);
    if (p.name == "x") ix = idx;
    else if (p.name == "y") iy = idx;
    else if (p.name == "z") iz = idx;
    else if (p.name == "label") ilabel = idx;
    else if (p.name == "red" || p.name == "r") ir = idx;
    else if (p.name == "green" || p.name == "g") ig = idx;
    else if (p.name == "blue" || p.name == "b") ib = idx;
  }
  if (ix < 0 || iy < 0 || iz < 0) {
    throw MalformedHeader(where + ": vertex element must declare x, y, z");
  }
  for (const int idx : {ix, iy, iz}) {
    const PropType t = header.vertex_props[idx].type;
    if (t != PropType::f32 && t != PropType::f64) {
      throw MalformedHeader(where + ": coordinates must be float32 or float64");
    }
  }
  const bool has_color = ir >= 0 && ig >= 0 && ib >= 0;

  SemanticPointCloud cloud;
  cloud.points.reserve(header.vertex_count);
  cloud.labels.reserve(header.vertex_count);
  if (has_color) cloud.colors.reserve(header.vertex_count);

  if (header.binary) {
    size_t stride = 0;
    std::vector<size_t> offsets;
    for (const Property& p : header.vertex_props) {
      offsets.push_back(stride);
      stride += prop_size(p.type);
    }
    std::vector<unsigned char> row(stride);
    for (size_t v = 0; v < header.vertex_count; ++v) {
      in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(stride));
      if (static_cast<size_t>(in.gcount()) != stride) {
        throw TruncatedPayload(where + ": vertex payload ends at record " +
                               std::to_string(v) + " of " +
                               std::to_string(header.vertex_count));
      }
      auto get = [&](int idx) {
        return decode(row.data() + offsets[idx], header.vertex_props[idx].type);
      };
      cloud.points.emplace_back(get(ix), get(iy), get(iz));
      cloud.labels.push_back(ilabel >= 0 ? static_cast<uint8_t>(get(ilabel)) : 0);
      if (has_color) {
        cloud.colors.push_back({static_cast<uint8_t>(get(ir)),
                                static_cast<uint8_t>(get(ig)),
                                static_cast<uint8_t>(get(ib))});
      }
    }
  } else {
    std::vector<double> values(header.vertex_props.size());
    for (size_t v = 0; v < header.vertex_count; ++v) {
      for (size_t p = 0; p < values.size(); ++p) {
        if (!(in >> values[p])) {
          throw TruncatedPayload(where + ": vertex payload ends at record " +
                                 std::to_string(v) + " of " +
                                 std::to_string(header.vertex_count));
        }
      }
      cloud.points.emplace_back(values[ix], values[iy], values[iz]);
      cloud.labels.push_back(
          ilabel >= 0 ? static_cast<uint8_t>(values[ilabel]) : 0);
      if (has_color) {
        cloud.colors.push_back({static_cast<uint8_t>(values[ir]),
                                static_cast<uint8_t>(values[ig]),
                                static_cast<uint8_t>(values[ib])});
      }
    }
  }
  return cloud;
}

void write_ply(const SemanticPointCloud& cloud, const std::filesystem::path& path,
               PlyEncoding encoding) {
  cloud.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path.string());

  const bool has_color = !cloud.colors.empty();
  os << "ply\n";
  os << (encoding == PlyEncoding::ascii ? "format ascii 1.0\n"
                                        : "format binary_little_endian 1.0\n");
  os << "element vertex " << cloud.size() << "\n";
  os << "property double x\nproperty double y\nproperty double z\n";
  os << "property uchar label\n";
  if (has_color) {
    os << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  }
  os << "end_header\n";

  if (encoding == PlyEncoding::ascii) {
    os.precision(17);
    for (size_t i = 0; i < cloud.size(); ++i) {
      const Eigen::Vector3d& p = cloud.points[i];
      os << p.x() << " " << p.y() << " " << p.z() << " " << int(cloud.labels[i]);
      if (has_color) {
        os << " " << int(cloud.colors[i][0]) << " " << int(cloud.colors[i][1])
           << " " << int(cloud.colors[i][2]);
      }
      os << "\n";
    }
  } else {
    for (size_t i = 0; i < cloud.size(); ++i) {
      std::array<double, 3> xyz = {cloud.points[i].x(), cloud.points[i].y(),
                                   cloud.points[i].z()};
      os.write(reinterpret_cast<const char*>(xyz.data()), 24);
      os.write(reinterpret_cast<const char*>(&cloud.labels[i]), 1);
      if (has_color) {
        os.write(reinterpret_cast<const char*>(cloud.colors[i].data()), 3);
      }
    }
  }
  if (!os) throw IoError("write failed for " + path.string());
}

}  // namespace semlift
