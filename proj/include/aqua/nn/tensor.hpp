#pragma once

#include <initializer_list>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "aqua/types.hpp"

namespace aqua::nn {

inline Index numel(const std::vector<int>& dims) {
  Index n = 1;
  for (int d : dims) n *= d;
  return n;
}

inline std::string dims_str(const std::vector<int>& dims) {
  std::string s = "(";
  for (std::size_t i = 0; i < dims.size(); ++i) s += (i ? "," : "") + std::to_string(dims[i]);
  return s + ")";
}

// Dense n-d array, row-major, with an optional gradient slot of the same
// shape. Parameters keep the slot allocated; activations usually do not.
template <class S>
struct Tensor {
  std::vector<int> dims;
  VecX<S> data;
  VecX<S> grad;  // empty unless allocated

  Tensor() = default;
  explicit Tensor(std::vector<int> d) : dims(std::move(d)) { data.setZero(numel(dims)); }

  static Tensor zeros(std::vector<int> d) { return Tensor(std::move(d)); }

  Index size() const { return data.size(); }
  int dim(std::size_t i) const { return dims.at(i); }
  int rank() const { return static_cast<int>(dims.size()); }

  bool has_grad() const { return grad.size() == data.size() && data.size() > 0; }
  void alloc_grad() { grad.setZero(data.size()); }
  void zero_grad() {
    if (has_grad()) grad.setZero();
  }

  void require_dims(const std::vector<int>& expect, const std::string& who) const {
    if (dims != expect)
      throw std::invalid_argument(who + ": expected input dims " + dims_str(expect) + ", got " +
                                  dims_str(dims));
  }
};

using Tensorf = Tensor<float>;
using Tensord = Tensor<double>;

}  // namespace aqua::nn
