#include "semlift/config.hpp"

#include <array>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "semlift/errors.hpp"

namespace semlift {

const RenderConfig& PipelineConfig::modality(const std::string& name) const {
  if (name == "rgb") return rgb;
  if (name == "thermal") return thermal;
  throw std::invalid_argument("unknown modality '" + name + "'");
}

void PipelineConfig::validate() const {
  rgb.validate();
  thermal.validate();
  catalog.validate();
  if (complete_k < 1 || denoise_k < 1) {
    throw std::invalid_argument("PipelineConfig: kNN counts must be >= 1");
  }
  if (!(select_cell_size > 0.0)) {
    throw std::invalid_argument("PipelineConfig: select_cell_size must be > 0");
  }
  if (workers < 1) {
    throw std::invalid_argument("PipelineConfig: workers must be >= 1");
  }
  for (const auto& [from, to] : class_remap) {
    if (from < 1 || from > 255 || to < 0 || to > 255) {
      throw std::invalid_argument("PipelineConfig: remap ids must be in 1..255 -> 0..255");
    }
  }
}

std::string PipelineConfig::canonical_dump() const {
  std::ostringstream os;
  os.precision(17);
  auto dump_render = [&](const char* prefix, const RenderConfig& r) {
    os << prefix << ".enable_depth_guided = " << r.enable_depth_guided << "\n";
    os << prefix << ".enable_occlusion = " << r.enable_occlusion << "\n";
    os << prefix << ".enable_splat = " << r.enable_splat << "\n";
    os << prefix << ".knn_pass1_k = " << r.knn_pass1_k << "\n";
    os << prefix << ".knn_pass2_k = " << r.knn_pass2_k << "\n";
    os << prefix << ".occlusion_kernel = " << r.occlusion_kernel << "\n";
    os << prefix << ".occlusion_tau = " << r.occlusion_tau << "\n";
    os << prefix << ".splat_radius = " << r.splat_radius << "\n";
  };
  for (int c = 1; c <= catalog.num_classes(); ++c) {
    os << "class." << c << " = " << catalog.name(c) << " " << catalog.prior(c)
       << "\n";
  }
  os << "lift.complete_k = " << complete_k << "\n";
  os << "lift.denoise_k = " << denoise_k << "\n";
  os << "lift.select_cell_size = " << select_cell_size << "\n";
  os << "lift.tie_break = " << (tie_break == TieBreak::rare ? "rare" : "common")
     << "\n";
  for (const auto& [from, to] : class_remap) {
    os << "remap." << from << " = " << to << "\n";
  }
  dump_render("rgb", rgb);
  dump_render("thermal", thermal);
  os << "workers = " << workers << "\n";
  return os.str();
}

namespace {

struct KeyValue {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
  throw ParseError(origin + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const KeyValue& kv, const std::string& origin) {
  try {
    size_t pos = 0;
    const double v = std::stod(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument(kv.value);
    return v;
  } catch (const std::exception&) {
    fail(origin, kv.line, "expected a number for '" + kv.key + "'");
  }
}

int to_int(const KeyValue& kv, const std::string& origin) {
  try {
    size_t pos = 0;
    const int v = std::stoi(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument(kv.value);
    return v;
  } catch (const std::exception&) {
    fail(origin, kv.line, "expected an integer for '" + kv.key + "'");
  }
}

bool to_bool(const KeyValue& kv, const std::string& origin) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "on") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "off") return false;
  fail(origin, kv.line, "expected a boolean for '" + kv.key + "'");
}

bool apply_render_key(RenderConfig& r, const KeyValue& kv,
                      const std::string& origin) {
  if (kv.key == "occlusion_tau") r.occlusion_tau = to_double(kv, origin);
  else if (kv.key == "occlusion_kernel") r.occlusion_kernel = to_int(kv, origin);
  else if (kv.key == "splat_radius") r.splat_radius = to_int(kv, origin);
  else if (kv.key == "knn_pass1_k") r.knn_pass1_k = to_int(kv, origin);
  else if (kv.key == "knn_pass2_k") r.knn_pass2_k = to_int(kv, origin);
  else if (kv.key == "enable_occlusion") r.enable_occlusion = to_bool(kv, origin);
  else if (kv.key == "enable_splat") r.enable_splat = to_bool(kv, origin);
  else if (kv.key == "enable_depth_guided") r.enable_depth_guided = to_bool(kv, origin);
  else return false;
  return true;
}

}  // namespace

PipelineConfig parse_config_text(const std::string& text,
                                 const std::string& origin) {
  PipelineConfig cfg;
  std::map<int, ClassCatalog::Entry> class_entries;

  std::istringstream in(text);
  std::string raw;
  std::string section = "general";
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(origin, line_no, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "general" && section != "lift" && section != "rgb" &&
          section != "thermal" && section != "classes" && section != "remap") {
        fail(origin, line_no, "unknown section '" + section + "'");
      }
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
    const KeyValue kv{section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)),
                      line_no};
    if (kv.key.empty()) fail(origin, line_no, "empty key");

    if (section == "rgb") {
      if (!apply_render_key(cfg.rgb, kv, origin)) {
        fail(origin, line_no, "unknown key '" + kv.key + "' in [rgb]");
      }
    } else if (section == "thermal") {
      if (!apply_render_key(cfg.thermal, kv, origin)) {
        fail(origin, line_no, "unknown key '" + kv.key + "' in [thermal]");
      }
    } else if (section == "classes") {
      // id = name prior
      int id = 0;
      try {
        id = std::stoi(kv.key);
      } catch (const std::exception&) {
        fail(origin, line_no, "class key must be a numeric id");
      }
      if (id < 1 || id > 255) fail(origin, line_no, "class id must be in 1..255");
      std::istringstream vs(kv.value);
      ClassCatalog::Entry entry;
      if (!(vs >> entry.name >> entry.prior)) {
        fail(origin, line_no, "class value must be '<name> <prior>'");
      }
      class_entries[id] = entry;
    } else if (section == "remap") {
      int from = 0;
      try {
        from = std::stoi(kv.key);
      } catch (const std::exception&) {
        fail(origin, line_no, "remap key must be a numeric id");
      }
      cfg.class_remap[from] = to_int(kv, origin);
    } else if (section == "lift") {
      if (kv.key == "complete_k") cfg.complete_k = to_int(kv, origin);
      else if (kv.key == "denoise_k") cfg.denoise_k = to_int(kv, origin);
      else if (kv.key == "select_cell_size") cfg.select_cell_size = to_double(kv, origin);
      else if (kv.key == "tie_break") {
        if (kv.value == "rare") cfg.tie_break = TieBreak::rare;
        else if (kv.value == "common") cfg.tie_break = TieBreak::common;
        else fail(origin, line_no, "tie_break must be 'rare' or 'common'");
      } else {
        fail(origin, line_no, "unknown key '" + kv.key + "' in [lift]");
      }
    } else {  // general
      if (kv.key == "workers") cfg.workers = to_int(kv, origin);
      else fail(origin, line_no, "unknown key '" + kv.key + "' in [general]");
    }
  }

  if (!class_entries.empty()) {
    const int max_id = class_entries.rbegin()->first;
    cfg.catalog.entries.assign(max_id, {"unnamed", 0.0});
    for (const auto& [id, entry] : class_entries) {
      cfg.catalog.entries[id - 1] = entry;
    }
  }
  cfg.validate();
  return cfg;
}

PipelineConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path.string());
}

void remap_labels(LabelMap& map, const std::map<int, int>& remap) {
  if (remap.empty()) return;
  std::array<uint8_t, 256> lut;
  for (int i = 0; i < 256; ++i) lut[i] = static_cast<uint8_t>(i);
  for (const auto& [from, to] : remap) {
    lut[static_cast<uint8_t>(from)] = static_cast<uint8_t>(to);
  }
  for (uint8_t& v : map.data) v = lut[v];
}

}  // namespace semlift
