#include "semlift/label_lift.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>

#include "semlift/errors.hpp"
#include "semlift/kdtree.hpp"

namespace semlift {

std::vector<int> select_views(const std::vector<Eigen::Vector2d>& camera_positions,
                              double cell_size) {
  if (!(cell_size > 0.0)) {
    throw std::invalid_argument("select_views: cell_size must be > 0");
  }
  if (camera_positions.empty()) {
    throw EmptyInput("select_views: no camera positions");
  }

  struct Best {
    double dist2;
    int index;
  };
  std::map<std::pair<int64_t, int64_t>, Best> cells;

  for (int i = 0; i < static_cast<int>(camera_positions.size()); ++i) {
    const Eigen::Vector2d& p = camera_positions[i];
    const auto cx = static_cast<int64_t>(std::floor(p.x() / cell_size));
    const auto cy = static_cast<int64_t>(std::floor(p.y() / cell_size));
    const Eigen::Vector2d center((cx + 0.5) * cell_size, (cy + 0.5) * cell_size);
    const double dist2 = (p - center).squaredNorm();

    auto [it, inserted] = cells.try_emplace({cx, cy}, Best{dist2, i});
    if (!inserted && dist2 < it->second.dist2) {
      it->second = {dist2, i};
    }
  }

  std::vector<int> selected;
  selected.reserve(cells.size());
  for (const auto& [cell, best] : cells) selected.push_back(best.index);
  std::sort(selected.begin(), selected.end());
  return selected;
}

double coverage(const SemanticPointCloud& cloud, const CorrespondenceSet& corrs,
                const std::vector<int>& subset) {
  if (cloud.size() == 0) return 0.0;
  std::vector<uint8_t> observed(cloud.size(), 0);
  for (int n : subset) {
    if (n < 0 || n >= static_cast<int>(corrs.per_image.size())) {
      throw std::out_of_range("coverage: subset index outside image range");
    }
    for (const PixelPointCorr& c : corrs.per_image[n]) {
      observed[c.point_index] = 1;
    }
  }
  size_t count = 0;
  for (uint8_t o : observed) count += o;
  return static_cast<double>(count) / static_cast<double>(cloud.size());
}

void lift_labels(VoteTallies& tallies, const std::vector<PixelPointCorr>& corrs,
                 const LabelMap& label_map, int cam_width, int cam_height) {
  if (label_map.width != cam_width || label_map.height != cam_height) {
    std::ostringstream msg;
    msg << "lift_labels: label map " << label_map.width << "x" << label_map.height
        << " does not match camera " << cam_width << "x" << cam_height;
    throw ResolutionMismatch(msg.str());
  }
  for (const PixelPointCorr& c : corrs) {
    int u = static_cast<int>(std::lround(c.u));
    int v = static_cast<int>(std::lround(c.v));
    u = std::clamp(u, 0, label_map.width - 1);
    v = std::clamp(v, 0, label_map.height - 1);
    const uint8_t label = label_map.at(u, v);
    if (label != 0) tallies.add_vote(c.point_index, label);
  }
}

namespace {

// Pick among classes with maximal score. `prefer_low_prior` selects the tie
// winner by catalog prior; equal priors fall back to the lower class id.
uint8_t break_tie(const std::vector<uint8_t>& candidates,
                  const ClassCatalog& catalog, TieBreak tie) {
  uint8_t best = candidates[0];
  for (size_t i = 1; i < candidates.size(); ++i) {
    const uint8_t c = candidates[i];
    const double pc = catalog.prior(c);
    const double pb = catalog.prior(best);
    const bool wins = tie == TieBreak::rare ? pc < pb : pc > pb;
    if (wins || (pc == pb && c < best)) best = c;
  }
  return best;
}

}  // namespace

std::vector<uint8_t> fuse_votes(const VoteTallies& tallies,
                                const ClassCatalog& catalog, TieBreak tie) {
  std::vector<uint8_t> labels(tallies.num_points(), 0);
  std::vector<uint8_t> tied;
  for (size_t m = 0; m < tallies.num_points(); ++m) {
    const auto& tally = tallies.per_point[m];
    if (tally.empty()) continue;
    uint32_t max_count = 0;
    for (const auto& [cls, count] : tally) max_count = std::max(max_count, count);
    tied.clear();
    for (const auto& [cls, count] : tally) {
      if (cls == 0 || cls > catalog.num_classes()) {
        throw std::out_of_range("fuse_votes: class id outside catalog");
      }
      if (count == max_count) tied.push_back(cls);
    }
    labels[m] = tied.size() == 1 ? tied[0] : break_tie(tied, catalog, tie);
  }
  return labels;
}

namespace {

KdTree3 build_tree(const std::vector<Eigen::Vector3d>& points,
                   const std::vector<uint32_t>& subset) {
  std::vector<KdTree3::Point> pts;
  pts.reserve(subset.size());
  for (uint32_t idx : subset) {
    const Eigen::Vector3d& p = points[idx];
    pts.push_back({p.x(), p.y(), p.z()});
  }
  return KdTree3(std::move(pts));
}

}  // namespace

void complete_idw_knn(SemanticPointCloud& cloud, int k) {
  if (k < 1) throw std::invalid_argument("complete_idw_knn: k must be >= 1");
  cloud.validate();

  std::vector<uint32_t> labeled;
  labeled.reserve(cloud.size());
  for (uint32_t i = 0; i < cloud.size(); ++i) {
    if (cloud.labels[i] != 0) labeled.push_back(i);
  }
  if (labeled.empty()) {
    throw NoLabeledPoints("complete_idw_knn: cloud has no labeled points");
  }
  if (labeled.size() == cloud.size()) return;

  const KdTree3 tree = build_tree(cloud.points, labeled);
  constexpr double kEps = 1e-9;  // [m]

  std::vector<KdTree3::Neighbor> neighbors;
  std::map<uint8_t, double> weights;
  for (uint32_t i = 0; i < cloud.size(); ++i) {
    if (cloud.labels[i] != 0) continue;
    const Eigen::Vector3d& p = cloud.points[i];
    tree.knn({p.x(), p.y(), p.z()}, k, neighbors);
    weights.clear();
    for (const auto& nb : neighbors) {
      const uint8_t cls = cloud.labels[labeled[nb.index]];
      weights[cls] += 1.0 / (std::sqrt(nb.dist2) + kEps);
    }
    uint8_t best = 0;
    double best_weight = -1.0;
    for (const auto& [cls, w] : weights) {  // ascending class id, ties keep lower
      if (w > best_weight) {
        best = cls;
        best_weight = w;
      }
    }
    cloud.labels[i] = best;
  }
}

void denoise_knn(SemanticPointCloud& cloud, int k) {
  if (k < 1) throw std::invalid_argument("denoise_knn: k must be >= 1");
  cloud.validate();
  if (cloud.size() == 0) return;

  std::vector<uint32_t> all(cloud.size());
  for (uint32_t i = 0; i < cloud.size(); ++i) all[i] = i;
  const KdTree3 tree = build_tree(cloud.points, all);

  const std::vector<uint8_t> snapshot = cloud.labels;
  std::vector<KdTree3::Neighbor> neighbors;
  std::map<uint8_t, uint32_t> counts;
  for (uint32_t i = 0; i < cloud.size(); ++i) {
    const Eigen::Vector3d& p = cloud.points[i];
    tree.knn({p.x(), p.y(), p.z()}, k, neighbors);
    counts.clear();
    for (const auto& nb : neighbors) {
      const uint8_t cls = snapshot[nb.index];
      if (cls != 0) ++counts[cls];
    }
    if (counts.empty()) continue;
    uint32_t max_count = 0;
    for (const auto& [cls, n] : counts) max_count = std::max(max_count, n);
    uint8_t winner = 0;
    bool current_tied = false;
    for (const auto& [cls, n] : counts) {
      if (n != max_count) continue;
      if (cls == snapshot[i]) current_tied = true;
      if (winner == 0) winner = cls;  // lowest tied class id
    }
    cloud.labels[i] = current_tied ? snapshot[i] : winner;
  }
}

}  // namespace semlift
