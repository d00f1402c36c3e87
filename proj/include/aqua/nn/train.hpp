#pragma once

#include <sstream>
#include <stdexcept>

#include "aqua/nn/adam.hpp"
#include "aqua/nn/loss.hpp"
#include "aqua/nn/network.hpp"

namespace aqua::nn {

struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class S>
std::string param_norms(Network<S>& net) {
  std::ostringstream os;
  os.precision(4);
  int i = 0;
  for (auto* p : net.param_list()) {
    os << (i++ ? " " : "") << "|p" << i - 1 << "|=" << p->data.template cast<double>().norm();
  }
  return os.str();
}

template <class S>
void check_finite(double loss, Network<S>& net, int epoch, int batch) {
  if (std::isfinite(loss)) return;
  std::ostringstream os;
  os << "training diverged: non-finite loss " << loss << " at epoch " << epoch << " batch " << batch
     << "; " << param_norms(net);
  throw TrainingError(os.str());
}

// One optimizer step on one batch: forward, loss, reverse accumulation,
// single Adam update. Reductions run in fixed order, so repeated runs with
// the same seed produce bit-identical loss sequences.
template <class S>
double train_step(Network<S>& net, const Tensor<S>& input, const Tensor<S>& target, LossKind kind,
                  AdamState<S>& adam, int epoch = -1, int batch = -1) {
  net.zero_grads();
  Tensor<S> out = net.forward(input, Mode::train);
  Tensor<S> dout;
  const double loss = loss_with_grad(kind, out, target, &dout);
  check_finite(loss, net, epoch, batch);
  net.backward(dout);
  adam_update(net.param_list(), adam);
  return loss;
}

// Cross-entropy variant with integer labels.
template <class S>
double train_step(Network<S>& net, const Tensor<S>& input, std::span<const int> labels,
                  AdamState<S>& adam, int epoch = -1, int batch = -1) {
  net.zero_grads();
  Tensor<S> out = net.forward(input, Mode::train);
  Tensor<S> dout;
  const double loss = cross_entropy(out, labels, &dout);
  check_finite(loss, net, epoch, batch);
  net.backward(dout);
  adam_update(net.param_list(), adam);
  return loss;
}

}  // namespace aqua::nn
