#pragma once

#include <Eigen/Core>

#include <vector>

#include "semlift/label_map.hpp"
#include "semlift/point_cloud.hpp"

namespace semlift {

// Tie rule when majority voting lands on multiple classes with equal counts.
// `rare` prefers the class with the lowest catalog prior (protects thin and
// rare structures); `common` prefers the highest prior. Equal priors resolve
// to the lower class id.
enum class TieBreak { rare, common };

// Picks one view per non-empty ground-plane grid cell: the camera whose
// horizontal position is closest to the cell center, ties by lowest index.
// Cells are half-open squares, cell = floor(position / cell_size).
// Returns ascending image indices. Throws EmptyInput.
std::vector<int> select_views(const std::vector<Eigen::Vector2d>& camera_positions,
                              double cell_size = 25.0);

// Fraction of cloud points observed by at least one image in `subset`.
double coverage(const SemanticPointCloud& cloud, const CorrespondenceSet& corrs,
                const std::vector<int>& subset);

// Accumulates one annotated image into the tallies: for every correspondence
// the label is sampled at the nearest integer pixel (clamped to bounds) and
// counted unless it is 0. cam_width/cam_height are the camera resolution the
// label map must match; throws ResolutionMismatch otherwise.
void lift_labels(VoteTallies& tallies, const std::vector<PixelPointCorr>& corrs,
                 const LabelMap& label_map, int cam_width, int cam_height);

// Majority vote per point; ties resolved per `tie`. Empty tallies stay 0.
std::vector<uint8_t> fuse_votes(const VoteTallies& tallies,
                                const ClassCatalog& catalog,
                                TieBreak tie = TieBreak::rare);

// Assigns every unlabeled point the class maximizing sum(1 / (d_i + eps))
// over its k nearest labeled neighbors, eps = 1e-9 m. Labeled points are
// unchanged; all decisions read the pre-pass label snapshot. Weight ties go
// to the lower class id. Throws NoLabeledPoints.
void complete_idw_knn(SemanticPointCloud& cloud, int k = 10);

// Relabels each point to the unweighted majority among its k nearest
// neighbors (self included), from a snapshot of the input labels. Majority
// ties keep the point's current label.
void denoise_knn(SemanticPointCloud& cloud, int k = 10);

}  // namespace semlift
