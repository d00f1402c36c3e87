#include "aqua/eval.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace aqua {

ConfusionMatrix ConfusionMatrix::from_predictions(std::span<const int> preds,
                                                  std::span<const int> labels, int num_classes) {
  if (preds.size() != labels.size())
    throw std::invalid_argument("confusion_matrix: prediction/label length mismatch");
  ConfusionMatrix cm;
  cm.counts.setZero(num_classes, num_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const int t = labels[i], p = preds[i];
    if (t < 0 || t >= num_classes || p < 0 || p >= num_classes)
      throw std::invalid_argument("confusion_matrix: class index out of range");
    ++cm.counts(t, p);
  }
  return cm;
}

Metrics macro_metrics(const ConfusionMatrix& cm) {
  const std::int64_t total = cm.total();
  if (total == 0) throw std::invalid_argument("macro_metrics: empty confusion matrix");
  const Index c = cm.classes();

  Metrics m;
  m.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  double psum = 0, rsum = 0, fsum = 0;
  for (Index k = 0; k < c; ++k) {
    const auto tp = static_cast<double>(cm.counts(k, k));
    const auto col = static_cast<double>(cm.counts.col(k).sum());  // tp + fp
    const auto row = static_cast<double>(cm.counts.row(k).sum());  // tp + fn
    const double prec = col > 0 ? tp / col : 0.0;
    const double rec = row > 0 ? tp / row : 0.0;
    psum += prec;
    rsum += rec;
    fsum += (prec + rec) > 0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
  }
  m.precision = psum / static_cast<double>(c);
  m.recall = rsum / static_cast<double>(c);
  m.f1 = fsum / static_cast<double>(c);
  return m;
}

double auroc(std::span<const double> scores, std::span<const int> truths) {
  if (scores.size() != truths.size()) throw std::invalid_argument("auroc: length mismatch");
  const std::size_t n = scores.size();
  std::size_t pos = 0;
  for (int t : truths) pos += t ? 1 : 0;
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("auroc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Midranks give the half-credit tie convention of the rank-sum statistic.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
    for (std::size_t k = i; k <= j; ++k)
      if (truths[order[k]]) rank_sum_pos += midrank;
    i = j + 1;
  }
  const double u = rank_sum_pos - 0.5 * static_cast<double>(pos) * static_cast<double>(pos + 1);
  return u / (static_cast<double>(pos) * static_cast<double>(neg));
}

}  // namespace aqua
