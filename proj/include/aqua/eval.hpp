#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aqua/types.hpp"

namespace aqua {

// Rows are true classes, columns are predictions.
struct ConfusionMatrix {
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  static ConfusionMatrix from_predictions(std::span<const int> preds, std::span<const int> labels,
                                          int num_classes);
  std::int64_t total() const { return counts.sum(); }
  std::int64_t trace() const { return counts.trace(); }
  Index classes() const { return counts.rows(); }
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;  // macro-averaged
  double recall = 0.0;     // macro-averaged
  double f1 = 0.0;         // macro-averaged
  std::optional<double> auroc;
};

// Per-class precision/recall with a 0 convention for empty denominators,
// macro-averaged with equal class weight; accuracy is trace/total.
Metrics macro_metrics(const ConfusionMatrix& cm);

// Mann-Whitney rank statistic; tied scores contribute one half. Truths are
// 0/1 with 1 the positive class. Both classes must be present.
double auroc(std::span<const double> scores, std::span<const int> truths);

}  // namespace aqua
