#include "semlift/point_cloud.hpp"

#include <stdexcept>

namespace semlift {

void SemanticPointCloud::validate() const {
  if (labels.size() != points.size()) {
    throw std::invalid_argument("SemanticPointCloud: points/labels length mismatch");
  }
  if (!colors.empty() && colors.size() != points.size()) {
    throw std::invalid_argument("SemanticPointCloud: points/colors length mismatch");
  }
}

ClassCatalog ClassCatalog::uniform(int num_classes) {
  ClassCatalog catalog;
  catalog.entries.resize(num_classes);
  for (int i = 0; i < num_classes; ++i) {
    catalog.entries[i].name = "class" + std::to_string(i + 1);
    catalog.entries[i].prior = num_classes > 0 ? 1.0 / num_classes : 0.0;
  }
  return catalog;
}

void ClassCatalog::validate() const {
  double sum = 0.0;
  for (const Entry& e : entries) {
    if (e.prior < 0.0) {
      throw std::invalid_argument("ClassCatalog: negative prior");
    }
    sum += e.prior;
  }
  if (sum > 1.0 + 1e-9) {
    throw std::invalid_argument("ClassCatalog: priors sum above 1");
  }
}

}  // namespace semlift
