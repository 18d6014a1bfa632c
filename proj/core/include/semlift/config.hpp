#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "semlift/label_lift.hpp"
#include "semlift/point_cloud.hpp"
#include "semlift/render.hpp"

namespace semlift {

// Resolved pipeline configuration. All stage constants live here as
// defaults; the algorithms only ever see what this struct hands them.
struct PipelineConfig {
  RenderConfig rgb = RenderConfig::rgb_defaults();
  RenderConfig thermal = RenderConfig::thermal_defaults();
  ClassCatalog catalog;
  std::map<int, int> class_remap;  // applied to rendered label maps
  TieBreak tie_break = TieBreak::rare;
  int complete_k = 10;
  int denoise_k = 10;
  double select_cell_size = 25.0;  // [m]
  int workers = 1;

  const RenderConfig& modality(const std::string& name) const;

  void validate() const;

  // Canonical flat key=value dump of every effective setting, sorted by key.
  // Feeds the run manifest and the config hash.
  std::string canonical_dump() const;
};

// Flat `key = value` file with `[section]` headers and '#' comments.
// Sections: [general], [lift], [rgb], [thermal], [classes], [remap].
// Unknown keys are rejected. Missing file fields keep their defaults.
PipelineConfig parse_config(const std::filesystem::path& path);
PipelineConfig parse_config_text(const std::string& text,
                                 const std::string& origin = "<config>");

// Applies the remap table in place; ids without an entry pass through.
void remap_labels(LabelMap& map, const std::map<int, int>& remap);

}  // namespace semlift
