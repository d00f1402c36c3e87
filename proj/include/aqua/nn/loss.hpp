#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "aqua/nn/tensor.hpp"

namespace aqua::nn {

enum class LossKind { mse, cross_entropy, binary_cross_entropy };

constexpr double kBceClamp = 1e-7;

// Mean over the batch of -log softmax(logits)[label], with max-subtraction.
// Accepts (N,C) logits with N labels, or a rank-1 (C) tensor with one label.
template <class S>
double cross_entropy(const Tensor<S>& logits, std::span<const int> labels, Tensor<S>* dlogits = nullptr) {
  const int n = logits.rank() == 1 ? 1 : logits.dim(0);
  const int c = logits.rank() == 1 ? logits.dim(0) : logits.dim(1);
  if (c < 2) throw std::invalid_argument("cross_entropy: need at least 2 classes");
  if (static_cast<int>(labels.size()) != n)
    throw std::invalid_argument("cross_entropy: label count does not match batch");
  if (dlogits) {
    dlogits->dims = logits.dims;
    dlogits->data.setZero(logits.size());
  }

  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= c) throw std::out_of_range("cross_entropy: label index out of range");
    const S* row = logits.data.data() + static_cast<Index>(i) * c;
    double mx = static_cast<double>(row[0]);
    for (int j = 1; j < c; ++j) mx = std::max(mx, static_cast<double>(row[j]));
    double z = 0.0;
    for (int j = 0; j < c; ++j) z += std::exp(static_cast<double>(row[j]) - mx);
    total += std::log(z) - (static_cast<double>(row[label]) - mx);
    if (dlogits) {
      S* drow = dlogits->data.data() + static_cast<Index>(i) * c;
      for (int j = 0; j < c; ++j) {
        const double p = std::exp(static_cast<double>(row[j]) - mx) / z;
        drow[j] = static_cast<S>((p - (j == label ? 1.0 : 0.0)) / n);
      }
    }
  }
  return total / n;
}

// Mean over all elements of -[t log p + (1-t) log(1-p)], p clamped to
// [1e-7, 1-1e-7].
template <class S>
double binary_cross_entropy(const Tensor<S>& pred, const Tensor<S>& target, Tensor<S>* dpred = nullptr) {
  if (pred.dims != target.dims)
    throw std::invalid_argument("binary_cross_entropy: shape mismatch " + dims_str(pred.dims) +
                                " vs " + dims_str(target.dims));
  const Index n = pred.size();
  if (dpred) {
    dpred->dims = pred.dims;
    dpred->data.setZero(n);
  }
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double p = std::clamp(static_cast<double>(pred.data[i]), kBceClamp, 1.0 - kBceClamp);
    const double t = static_cast<double>(target.data[i]);
    total += -(t * std::log(p) + (1.0 - t) * std::log1p(-p));
    if (dpred) dpred->data[i] = static_cast<S>((p - t) / (p * (1.0 - p)) / static_cast<double>(n));
  }
  return total / static_cast<double>(n);
}

// Mean squared error over all elements.
template <class S>
double mse_loss(const Tensor<S>& pred, const Tensor<S>& target, Tensor<S>* dpred = nullptr) {
  if (pred.dims != target.dims)
    throw std::invalid_argument("mse: shape mismatch " + dims_str(pred.dims) + " vs " +
                                dims_str(target.dims));
  const Index n = pred.size();
  double total = 0.0;
  if (dpred) {
    dpred->dims = pred.dims;
    dpred->data.setZero(n);
  }
  for (Index i = 0; i < n; ++i) {
    const double d = static_cast<double>(pred.data[i]) - static_cast<double>(target.data[i]);
    total += d * d;
    if (dpred) dpred->data[i] = static_cast<S>(2.0 * d / static_cast<double>(n));
  }
  return total / static_cast<double>(n);
}

template <class S>
double loss_with_grad(LossKind kind, const Tensor<S>& out, const Tensor<S>& target, Tensor<S>* dout) {
  switch (kind) {
    case LossKind::mse: return mse_loss(out, target, dout);
    case LossKind::binary_cross_entropy: return binary_cross_entropy(out, target, dout);
    default: throw std::invalid_argument("loss_with_grad: cross_entropy needs labels");
  }
}

}  // namespace aqua::nn
