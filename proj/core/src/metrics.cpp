#include "semlift/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "semlift/errors.hpp"

namespace semlift {

ConfusionMatrix::ConfusionMatrix(int num_classes)
    : num_classes_(num_classes),
      counts_(static_cast<size_t>(num_classes + 1) * (num_classes + 1), 0) {
  if (num_classes < 1) {
    throw std::invalid_argument("ConfusionMatrix: need at least one class");
  }
}

uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), uint64_t{0});
}

namespace {

void check_dims(const LabelMap& pred, const LabelMap& gt) {
  if (pred.width != gt.width || pred.height != gt.height) {
    std::ostringstream msg;
    msg << "accumulate: prediction " << pred.width << "x" << pred.height
        << " vs ground truth " << gt.width << "x" << gt.height;
    throw ResolutionMismatch(msg.str());
  }
}

}  // namespace

void ConfusionMatrix::accumulate(const LabelMap& pred, const LabelMap& gt,
                                 bool ignore_unlabeled_gt) {
  check_dims(pred, gt);
  for (size_t i = 0; i < gt.data.size(); ++i) {
    const uint8_t g = gt.data[i];
    if (ignore_unlabeled_gt && g == 0) continue;
    if (g > num_classes_ || pred.data[i] > num_classes_) {
      throw std::out_of_range("accumulate: class id outside the matrix");
    }
    bump(g, pred.data[i]);
  }
}

void ConfusionMatrix::accumulate_masked(const LabelMap& pred, const LabelMap& gt,
                                        const ImageU8& mask,
                                        bool ignore_unlabeled_gt) {
  check_dims(pred, gt);
  if (mask.width != gt.width || mask.height != gt.height || mask.channels != 1) {
    throw ResolutionMismatch("accumulate_masked: mask dimensions mismatch");
  }
  for (size_t i = 0; i < gt.data.size(); ++i) {
    if (mask.data[i] == 0) continue;
    const uint8_t g = gt.data[i];
    if (ignore_unlabeled_gt && g == 0) continue;
    if (g > num_classes_ || pred.data[i] > num_classes_) {
      throw std::out_of_range("accumulate: class id outside the matrix");
    }
    bump(g, pred.data[i]);
  }
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (other.num_classes_ != num_classes_) {
    throw std::invalid_argument("merge: class count mismatch");
  }
  for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

double pixel_accuracy(const ConfusionMatrix& cm) {
  const uint64_t total = cm.total();
  if (total == 0) throw EmptyMatrix("pixel_accuracy: empty confusion matrix");
  uint64_t correct = 0;
  for (int c = 1; c <= cm.num_classes(); ++c) correct += cm.at(c, c);
  return static_cast<double>(correct) / static_cast<double>(total);
}

std::vector<double> per_class_iou(const ConfusionMatrix& cm) {
  const int n = cm.num_classes();
  std::vector<double> iou(n, 0.0);
  for (int c = 1; c <= n; ++c) {
    uint64_t tp = cm.at(c, c);
    uint64_t fn = 0, fp = 0;
    for (int o = 0; o <= n; ++o) {
      if (o != c) {
        fn += cm.at(c, o);
        fp += cm.at(o, c);
      }
    }
    const uint64_t uni = tp + fp + fn;
    iou[c - 1] = uni > 0 ? static_cast<double>(tp) / static_cast<double>(uni) : 0.0;
  }
  return iou;
}

double fw_miou(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw EmptyMatrix("fw_miou: empty confusion matrix");
  const int n = cm.num_classes();
  uint64_t labeled_gt = 0;
  std::vector<uint64_t> gt_count(n + 1, 0);
  for (int c = 1; c <= n; ++c) {
    for (int o = 0; o <= n; ++o) gt_count[c] += cm.at(c, o);
    labeled_gt += gt_count[c];
  }
  if (labeled_gt == 0) return 0.0;
  const std::vector<double> iou = per_class_iou(cm);
  double sum = 0.0;
  for (int c = 1; c <= n; ++c) {
    if (gt_count[c] == 0) continue;
    const double freq =
        static_cast<double>(gt_count[c]) / static_cast<double>(labeled_gt);
    sum += freq * iou[c - 1];
  }
  return sum;
}

double unlabeled_fraction(const ConfusionMatrix& cm) {
  const uint64_t total = cm.total();
  if (total == 0) throw EmptyMatrix("unlabeled_fraction: empty confusion matrix");
  uint64_t unlabeled = 0;
  for (int g = 0; g <= cm.num_classes(); ++g) unlabeled += cm.at(g, 0);
  return static_cast<double>(unlabeled) / static_cast<double>(total);
}

std::pair<double, double> eval_registration(const LabelMap& rgb_gt_label,
                                            const LabelMap& thermal_gt_label,
                                            const CameraModel& rgb_cam,
                                            const CameraModel& thermal_cam,
                                            const SupportBBox& bbox) {
  ImageU8 rgb_raster(rgb_gt_label.width, rgb_gt_label.height, 1);
  rgb_raster.data = rgb_gt_label.data;

  const TransferResult transferred = distortion_transfer(
      rgb_raster, rgb_cam, thermal_cam, bbox, Sampling::nearest);

  LabelMap pred(transferred.image.width, transferred.image.height);
  pred.data = transferred.image.data;

  int max_class = 0;
  for (uint8_t c : pred.data) max_class = std::max<int>(max_class, c);
  for (uint8_t c : thermal_gt_label.data) max_class = std::max<int>(max_class, c);

  ConfusionMatrix cm(std::max(max_class, 1));
  cm.accumulate_masked(pred, thermal_gt_label, transferred.mask);
  return {pixel_accuracy(cm), fw_miou(cm)};
}

namespace {

double pct(double fraction) { return 100.0 * fraction; }

}  // namespace

void write_metrics_report(std::ostream& os, const ConfusionMatrix& cm,
                          const ClassCatalog* catalog) {
  const std::vector<double> iou = per_class_iou(cm);
  os << std::fixed << std::setprecision(2);
  os << "pixel_accuracy = " << pct(pixel_accuracy(cm)) << "\n";
  os << "fw_miou = " << pct(fw_miou(cm)) << "\n";
  os << "unlabeled_fraction = " << pct(unlabeled_fraction(cm)) << "\n";
  os << "compared_pixels = " << cm.total() << "\n";
  for (int c = 1; c <= cm.num_classes(); ++c) {
    os << "iou_class_" << c;
    if (catalog && c <= catalog->num_classes()) os << " (" << catalog->name(c) << ")";
    os << " = " << pct(iou[c - 1]) << "\n";
  }
}

void write_metrics_delimited(std::ostream& os, const ConfusionMatrix& cm,
                             const ClassCatalog* catalog) {
  os << std::setprecision(12);
  os << "metric,value\n";
  os << "pixel_accuracy," << pixel_accuracy(cm) << "\n";
  os << "fw_miou," << fw_miou(cm) << "\n";
  os << "unlabeled_fraction," << unlabeled_fraction(cm) << "\n";
  os << "compared_pixels," << cm.total() << "\n";
  const std::vector<double> iou = per_class_iou(cm);
  for (int c = 1; c <= cm.num_classes(); ++c) {
    os << "iou_class_" << c;
    if (catalog && c <= catalog->num_classes()) os << "_" << catalog->name(c);
    os << "," << iou[c - 1] << "\n";
  }
}

}  // namespace semlift
