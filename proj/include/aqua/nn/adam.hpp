#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aqua/nn/tensor.hpp"

namespace aqua::nn {

template <class S>
struct AdamState {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step_count = 0;
  std::vector<VecX<S>> m, v;

  void init(const std::vector<Tensor<S>*>& params) {
    if (!(beta1 >= 0 && beta1 < 1 && beta2 >= 0 && beta2 < 1))
      throw std::invalid_argument("adam: betas must lie in [0, 1)");
    m.clear();
    v.clear();
    for (const auto* p : params) {
      m.emplace_back(VecX<S>::Zero(p->size()));
      v.emplace_back(VecX<S>::Zero(p->size()));
    }
    step_count = 0;
  }
};

// Standard Adam recurrences with bias correction; gradients are read from the
// tensors' grad slots. One call advances step_count once for all tensors.
template <class S>
void adam_update(const std::vector<Tensor<S>*>& params, AdamState<S>& st) {
  if (st.m.size() != params.size()) throw std::invalid_argument("adam: state not initialized for these params");
  ++st.step_count;
  const double bc1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step_count));
  const double bc2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step_count));
  const S b1 = static_cast<S>(st.beta1), b2 = static_cast<S>(st.beta2);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor<S>& p = *params[i];
    if (!p.has_grad()) throw std::invalid_argument("adam: parameter tensor has no gradient slot");
    if (st.m[i].size() != p.size()) throw std::invalid_argument("adam: moment buffer shape mismatch");
    st.m[i] = b1 * st.m[i] + (S(1) - b1) * p.grad;
    st.v[i].array() = b2 * st.v[i].array() + (S(1) - b2) * p.grad.array().square();
    const auto mhat = st.m[i].array() / static_cast<S>(bc1);
    const auto vhat = st.v[i].array() / static_cast<S>(bc2);
    p.data.array() -= static_cast<S>(st.lr) * mhat / (vhat.sqrt() + static_cast<S>(st.eps));
  }
}

}  // namespace aqua::nn
