#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "semlift/geometry.hpp"
#include "semlift/label_map.hpp"
#include "semlift/point_cloud.hpp"
#include "semlift/registration.hpp"

namespace semlift {

// (C+1) x (C+1) counts indexed (ground-truth class, predicted class);
// row/column 0 is the unlabeled class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const { return num_classes_; }

  uint64_t at(int gt, int pred) const {
    return counts_[static_cast<size_t>(gt) * (num_classes_ + 1) + pred];
  }

  uint64_t total() const;

  // Per-pixel accumulation. Pixels with gt == 0 are skipped when
  // ignore_unlabeled_gt is set. Throws ResolutionMismatch.
  void accumulate(const LabelMap& pred, const LabelMap& gt,
                  bool ignore_unlabeled_gt = true);

  // Same, additionally skipping pixels whose mask value is 0.
  void accumulate_masked(const LabelMap& pred, const LabelMap& gt,
                         const ImageU8& mask, bool ignore_unlabeled_gt = true);

  // Associative merge for parallel reductions.
  void merge(const ConfusionMatrix& other);

 private:
  void bump(uint8_t gt, uint8_t pred) {
    ++counts_[static_cast<size_t>(gt) * (num_classes_ + 1) + pred];
  }

  int num_classes_;
  std::vector<uint64_t> counts_;
};

// Trace over the labeled-gt submatrix divided by the total count. Throws
// EmptyMatrix when nothing was accumulated.
double pixel_accuracy(const ConfusionMatrix& cm);

// Sum over classes of gt-frequency * IoU; classes absent from the ground
// truth contribute 0. Throws EmptyMatrix.
double fw_miou(const ConfusionMatrix& cm);

// IoU per class id 1..C; NaN-free (classes with empty union score 0).
std::vector<double> per_class_iou(const ConfusionMatrix& cm);

// Fraction of compared pixels whose prediction is unlabeled.
double unlabeled_fraction(const ConfusionMatrix& cm);

// Registration-evaluation protocol: transfers the RGB ground-truth labels
// into thermal distorted space with nearest sampling, masks invalid pixels,
// and scores the result against the thermal labels.
std::pair<double, double> eval_registration(const LabelMap& rgb_gt_label,
                                            const LabelMap& thermal_gt_label,
                                            const CameraModel& rgb_cam,
                                            const CameraModel& thermal_cam,
                                            const SupportBBox& bbox);

// Human-readable report: one key per metric plus a per-class IoU table.
// Percentages carry two decimals.
void write_metrics_report(std::ostream& os, const ConfusionMatrix& cm,
                          const ClassCatalog* catalog = nullptr);

// Machine-readable companion: `key,value` lines.
void write_metrics_delimited(std::ostream& os, const ConfusionMatrix& cm,
                             const ClassCatalog* catalog = nullptr);

}  // namespace semlift
