#pragma once

#include <functional>
#include <vector>

#include "aqua/nn/loss.hpp"
#include "aqua/nn/network.hpp"

namespace aqua::nn {

// Central finite differences against the analytic reverse-mode gradients.
// Returns the maximum over parameters of |analytic - numeric| /
// max(|analytic|, |numeric|, 1e-8). Cost is two forward passes per parameter.
template <class S>
double gradient_check_fn(Network<S>& net, const std::function<double()>& loss_fn,
                         const std::function<double(Tensor<S>*)>& loss_grad_fn, double h = 1e-4) {
  net.zero_grads();
  loss_grad_fn(nullptr);  // populate caches + grads via the caller's backward
  std::vector<VecX<S>> analytic;
  for (auto* p : net.param_list()) analytic.push_back(p->grad);

  double worst = 0.0;
  std::size_t pi = 0;
  for (auto* p : net.param_list()) {
    for (Index i = 0; i < p->size(); ++i) {
      const S saved = p->data[i];
      p->data[i] = saved + static_cast<S>(h);
      const double lp = loss_fn();
      p->data[i] = saved - static_cast<S>(h);
      const double lm = loss_fn();
      p->data[i] = saved;
      const double numeric = (lp - lm) / (2.0 * h);
      const double a = static_cast<double>(analytic[pi][i]);
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
    ++pi;
  }
  return worst;
}

template <class S>
double gradient_check(Network<S>& net, const Tensor<S>& input, const Tensor<S>& target,
                      LossKind kind, double h = 1e-4) {
  auto loss_fn = [&]() {
    Tensor<S> out = net.forward(input, Mode::train);
    return loss_with_grad<S>(kind, out, target, nullptr);
  };
  auto loss_grad = [&](Tensor<S>*) {
    Tensor<S> out = net.forward(input, Mode::train);
    Tensor<S> dout;
    const double l = loss_with_grad<S>(kind, out, target, &dout);
    net.backward(dout);
    return l;
  };
  return gradient_check_fn<S>(net, loss_fn, loss_grad, h);
}

template <class S>
double gradient_check_labels(Network<S>& net, const Tensor<S>& input, std::span<const int> labels,
                             double h = 1e-4) {
  auto loss_fn = [&]() {
    Tensor<S> out = net.forward(input, Mode::train);
    return cross_entropy<S>(out, labels, nullptr);
  };
  auto loss_grad = [&](Tensor<S>*) {
    Tensor<S> out = net.forward(input, Mode::train);
    Tensor<S> dout;
    const double l = cross_entropy<S>(out, labels, &dout);
    net.backward(dout);
    return l;
  };
  return gradient_check_fn<S>(net, loss_fn, loss_grad, h);
}

}  // namespace aqua::nn
