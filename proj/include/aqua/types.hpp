#pragma once

#include <Eigen/Core>
#include <cstdint>

namespace aqua {

template <class S>
using MatX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VecX = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using RowMajorX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class S>
using ArrXX = Eigen::Array<S, Eigen::Dynamic, Eigen::Dynamic>;

using Matd = MatX<double>;
using Matf = MatX<float>;
using Vecd = VecX<double>;
using Vecf = VecX<float>;
using Index = Eigen::Index;

// FNV-1a, used for config/normalizer fingerprints and per-name RNG streams.
inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  return fnv1a64(s.data(), s.size(), h);
}

}  // namespace aqua
