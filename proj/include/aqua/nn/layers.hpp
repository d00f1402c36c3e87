#pragma once

#include <cmath>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "aqua/nn/tensor.hpp"
#include "aqua/rng.hpp"

namespace aqua::nn {

enum class Mode { train, infer };

// Serialization records; kinds are stable across checkpoint versions.
enum LayerKind : std::uint16_t {
  kDense = 1,
  kConv2d = 2,
  kMaxPool = 3,
  kRelu = 4,
  kSigmoid = 5,
  kBatchNorm = 6,
  kResidualBlock = 7,
  kUpsample = 8,
  kGlobalAvgPool = 9,
  kFlatten = 10,
};

struct LayerSpecRec {
  std::uint16_t kind = 0;
  std::vector<std::int32_t> ints;
};

template <class S>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string name() const = 0;
  virtual LayerSpecRec spec() const = 0;
  virtual Tensor<S> forward(const Tensor<S>& x, Mode mode) = 0;
  virtual Tensor<S> backward(const Tensor<S>& dy) = 0;
  virtual void params(std::vector<Tensor<S>*>& out) {}
  virtual void buffers(std::vector<Tensor<S>*>& out) {}
  virtual void init(Rng& rng) {}
};

template <class S>
void glorot_uniform(Tensor<S>& w, Index fan_in, Index fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (Index i = 0; i < w.size(); ++i) w.data[i] = static_cast<S>(rng.uniform(-a, a));
}

// ---------------------------------------------------------------------------

template <class S>
class Dense : public Layer<S> {
 public:
  Dense(int in, int out) : in_(in), out_(out), w_({out, in}), b_({out}) {
    w_.alloc_grad();
    b_.alloc_grad();
  }

  std::string name() const override { return "dense(" + std::to_string(in_) + "->" + std::to_string(out_) + ")"; }
  LayerSpecRec spec() const override { return {kDense, {in_, out_}}; }
  void params(std::vector<Tensor<S>*>& out) override { out.push_back(&w_); out.push_back(&b_); }
  void init(Rng& rng) override {
    glorot_uniform(w_, in_, out_, rng);
    b_.data.setZero();
  }

  Tensor<S> forward(const Tensor<S>& x, Mode) override {
    if (x.rank() != 2 || x.dim(1) != in_)
      throw std::invalid_argument(name() + ": expected (N," + std::to_string(in_) + "), got " + dims_str(x.dims));
    x_ = x;
    const int n = x.dim(0);
    Tensor<S> y({n, out_});
    Eigen::Map<const RowMajorX<S>> X(x.data.data(), n, in_);
    Eigen::Map<const RowMajorX<S>> W(w_.data.data(), out_, in_);
    Eigen::Map<RowMajorX<S>> Y(y.data.data(), n, out_);
    Y.noalias() = X * W.transpose();
    Y.rowwise() += Eigen::Map<const VecX<S>>(b_.data.data(), out_).transpose();
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    const int n = x_.dim(0);
    Tensor<S> dx({n, in_});
    Eigen::Map<const RowMajorX<S>> dY(dy.data.data(), n, out_);
    Eigen::Map<const RowMajorX<S>> X(x_.data.data(), n, in_);
    Eigen::Map<const RowMajorX<S>> W(w_.data.data(), out_, in_);
    Eigen::Map<RowMajorX<S>> dX(dx.data.data(), n, in_);
    Eigen::Map<RowMajorX<S>> dW(w_.grad.data(), out_, in_);
    dX.noalias() = dY * W;
    dW.noalias() += dY.transpose() * X;
    Eigen::Map<VecX<S>>(b_.grad.data(), out_) += dY.colwise().sum().transpose();
    return dx;
  }

 private:
  int in_, out_;
  Tensor<S> w_, b_, x_;
};

// ---------------------------------------------------------------------------

template <class S>
class Conv2d : public Layer<S> {
 public:
  Conv2d(int ic, int ih, int iw, int oc, int k, int stride, int pad)
      : ic_(ic), ih_(ih), iw_(iw), oc_(oc), k_(k), stride_(stride), pad_(pad),
        oh_((ih + 2 * pad - k) / stride + 1), ow_((iw + 2 * pad - k) / stride + 1),
        w_({oc, ic * k * k}), b_({oc}) {
    if (oh_ <= 0 || ow_ <= 0) throw std::invalid_argument(name() + ": empty output");
    w_.alloc_grad();
    b_.alloc_grad();
  }

  std::string name() const override {
    return "conv2d(" + std::to_string(ic_) + "x" + std::to_string(ih_) + "x" + std::to_string(iw_) +
           "->" + std::to_string(oc_) + ",k" + std::to_string(k_) + ",s" + std::to_string(stride_) + ")";
  }
  LayerSpecRec spec() const override { return {kConv2d, {ic_, ih_, iw_, oc_, k_, stride_, pad_}}; }
  void params(std::vector<Tensor<S>*>& out) override { out.push_back(&w_); out.push_back(&b_); }
  void init(Rng& rng) override {
    glorot_uniform(w_, static_cast<Index>(ic_) * k_ * k_, static_cast<Index>(oc_) * k_ * k_, rng);
    b_.data.setZero();
  }

  std::vector<int> out_dims(int n) const { return {n, oc_, oh_, ow_}; }

  Tensor<S> forward(const Tensor<S>& x, Mode) override {
    check_input(x);
    x_ = x;
    const int n = x.dim(0);
    const Index hw = static_cast<Index>(oh_) * ow_;
    const Index kk = static_cast<Index>(ic_) * k_ * k_;
    Tensor<S> y({n, oc_, oh_, ow_});
    col_.resize(hw, kk);
    // Row-major (oc,K) weights alias a column-major (K,oc) matrix, so each
    // sample is a single (HW x K) * (K x oc) product written straight into
    // the row-major output block.
    Eigen::Map<const MatX<S>> W(w_.data.data(), kk, oc_);
    const auto bias = Eigen::Map<const VecX<S>>(b_.data.data(), oc_);
    for (int i = 0; i < n; ++i) {
      fill_col(x.data.data() + static_cast<Index>(i) * ic_ * ih_ * iw_);
      Eigen::Map<MatX<S>> O(y.data.data() + static_cast<Index>(i) * oc_ * hw, hw, oc_);
      O.noalias() = col_ * W;
      O.rowwise() += bias.transpose();
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    const int n = x_.dim(0);
    const Index hw = static_cast<Index>(oh_) * ow_;
    const Index kk = static_cast<Index>(ic_) * k_ * k_;
    Tensor<S> dx(x_.dims);
    Eigen::Map<const MatX<S>> W(w_.data.data(), kk, oc_);
    Eigen::Map<MatX<S>> dW(w_.grad.data(), kk, oc_);
    auto db = Eigen::Map<VecX<S>>(b_.grad.data(), oc_);
    MatX<S> dcol(hw, kk);
    for (int i = 0; i < n; ++i) {
      Eigen::Map<const MatX<S>> dY(dy.data.data() + static_cast<Index>(i) * oc_ * hw, hw, oc_);
      fill_col(x_.data.data() + static_cast<Index>(i) * ic_ * ih_ * iw_);
      dW.noalias() += col_.transpose() * dY;
      db += dY.colwise().sum().transpose();
      dcol.noalias() = dY * W.transpose();
      scatter_col(dcol, dx.data.data() + static_cast<Index>(i) * ic_ * ih_ * iw_);
    }
    return dx;
  }

 private:
  void check_input(const Tensor<S>& x) const {
    if (x.rank() != 4 || x.dim(1) != ic_ || x.dim(2) != ih_ || x.dim(3) != iw_)
      throw std::invalid_argument(name() + ": expected (N," + std::to_string(ic_) + "," +
                                  std::to_string(ih_) + "," + std::to_string(iw_) + "), got " +
                                  dims_str(x.dims));
  }

  // col_(p, kcol): output pixel p, kernel column kcol = (c*k + ky)*k + kx.
  void fill_col(const S* xp) {
    for (int c = 0; c < ic_; ++c) {
      const S* plane = xp + static_cast<Index>(c) * ih_ * iw_;
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          S* dst = col_.data() + (static_cast<Index>(c) * k_ * k_ + ky * k_ + kx) *
                                     (static_cast<Index>(oh_) * ow_);
          for (int oy = 0; oy < oh_; ++oy) {
            const int iy = oy * stride_ + ky - pad_;
            S* drow = dst + static_cast<Index>(oy) * ow_;
            if (iy < 0 || iy >= ih_) {
              std::memset(drow, 0, sizeof(S) * static_cast<std::size_t>(ow_));
              continue;
            }
            const S* srow = plane + static_cast<Index>(iy) * iw_;
            int lo = 0, hi = ow_;  // valid ox range: 0 <= ox*stride + kx - pad < iw
            while (lo < ow_ && lo * stride_ + kx - pad_ < 0) ++lo;
            while (hi > lo && (hi - 1) * stride_ + kx - pad_ >= iw_) --hi;
            if (lo > 0) std::memset(drow, 0, sizeof(S) * static_cast<std::size_t>(lo));
            if (stride_ == 1) {
              std::memcpy(drow + lo, srow + lo + kx - pad_, sizeof(S) * static_cast<std::size_t>(hi - lo));
            } else {
              for (int ox = lo; ox < hi; ++ox) drow[ox] = srow[ox * stride_ + kx - pad_];
            }
            if (hi < ow_) std::memset(drow + hi, 0, sizeof(S) * static_cast<std::size_t>(ow_ - hi));
          }
        }
      }
    }
  }

  void scatter_col(const MatX<S>& dcol, S* dxp) {
    for (int c = 0; c < ic_; ++c) {
      S* plane = dxp + static_cast<Index>(c) * ih_ * iw_;
      for (int ky = 0; ky < k_; ++ky) {
        for (int kx = 0; kx < k_; ++kx) {
          const S* src = dcol.data() + (static_cast<Index>(c) * k_ * k_ + ky * k_ + kx) *
                                           (static_cast<Index>(oh_) * ow_);
          for (int oy = 0; oy < oh_; ++oy) {
            const int iy = oy * stride_ + ky - pad_;
            if (iy < 0 || iy >= ih_) continue;
            const S* srow = src + static_cast<Index>(oy) * ow_;
            S* drow = plane + static_cast<Index>(iy) * iw_;
            for (int ox = 0; ox < ow_; ++ox) {
              const int ix = ox * stride_ + kx - pad_;
              if (ix >= 0 && ix < iw_) drow[ix] += srow[ox];
            }
          }
        }
      }
    }
  }

  int ic_, ih_, iw_, oc_, k_, stride_, pad_, oh_, ow_;
  Tensor<S> w_, b_, x_;
  MatX<S> col_;
};

// ---------------------------------------------------------------------------

template <class S>
class MaxPool2d : public Layer<S> {
 public:
  MaxPool2d(int c, int h, int w, int k = 2, int stride = 2)
      : c_(c), h_(h), w_(w), k_(k), stride_(stride),
        oh_((h - k) / stride + 1), ow_((w - k) / stride + 1) {
    if (oh_ <= 0 || ow_ <= 0) throw std::invalid_argument(name() + ": empty output");
  }

  std::string name() const override { return "maxpool(k" + std::to_string(k_) + ",s" + std::to_string(stride_) + ")"; }
  LayerSpecRec spec() const override { return {kMaxPool, {c_, h_, w_, k_, stride_}}; }

  std::vector<int> out_dims(int n) const { return {n, c_, oh_, ow_}; }

  Tensor<S> forward(const Tensor<S>& x, Mode) override {
    if (x.rank() != 4 || x.dim(1) != c_ || x.dim(2) != h_ || x.dim(3) != w_)
      throw std::invalid_argument(name() + ": unexpected input dims " + dims_str(x.dims));
    const int n = x.dim(0);
    in_dims_ = x.dims;
    Tensor<S> y({n, c_, oh_, ow_});
    argmax_.resize(y.size());
    const Index planes = static_cast<Index>(n) * c_;
    for (Index pl = 0; pl < planes; ++pl) {
      const S* in = x.data.data() + pl * h_ * w_;
      S* out = y.data.data() + pl * oh_ * ow_;
      Index* arg = argmax_.data() + pl * oh_ * ow_;
      for (int oy = 0; oy < oh_; ++oy) {
        for (int ox = 0; ox < ow_; ++ox) {
          // First maximum in scan order wins; ties resolve deterministically.
          S best{};
          Index best_idx = -1;
          for (int ky = 0; ky < k_; ++ky) {
            for (int kx = 0; kx < k_; ++kx) {
              const Index idx = static_cast<Index>(oy * stride_ + ky) * w_ + (ox * stride_ + kx);
              if (best_idx < 0 || in[idx] > best) {
                best = in[idx];
                best_idx = idx;
              }
            }
          }
          out[oy * ow_ + ox] = best;
          arg[oy * ow_ + ox] = pl * h_ * w_ + best_idx;
        }
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> dx(in_dims_);
    for (Index i = 0; i < dy.size(); ++i) dx.data[argmax_[i]] += dy.data[i];
    return dx;
  }

 private:
  int c_, h_, w_, k_, stride_, oh_, ow_;
  std::vector<int> in_dims_;
  std::vector<Index> argmax_;
};

// ---------------------------------------------------------------------------

template <class S>
class ReLU : public Layer<S> {
 public:
  std::string name() const override { return "relu"; }
  LayerSpecRec spec() const override { return {kRelu, {}}; }

  Tensor<S> forward(const Tensor<S>& x, Mode) override {
    x_ = x;
    Tensor<S> y = x;
    y.data = y.data.cwiseMax(S(0));
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> dx = dy;
    dx.data = (x_.data.array() > S(0)).select(dy.data.array(), S(0));
    return dx;
  }

 private:
  Tensor<S> x_;
};

template <class S>
class Sigmoid : public Layer<S> {
 public:
  std::string name() const override { return "sigmoid"; }
  LayerSpecRec spec() const override { return {kSigmoid, {}}; }

  Tensor<S> forward(const Tensor<S>& x, Mode) override {
    y_ = x;
    y_.data = (S(1) / (S(1) + (-x.data.array()).exp())).matrix();
    return y_;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> dx = dy;
    dx.data.array() *= y_.data.array() * (S(1) - y_.data.array());
    return dx;
  }

 private:
  Tensor<S> y_;
};

// ---------------------------------------------------------------------------

// Per-channel affine with batch statistics while training and frozen running
// statistics at inference; momentum 0.9. Accepts (N,C,H,W) or (N,C).
template <class S>
class BatchNormLite : public Layer<S> {
 public:
  explicit BatchNormLite(int channels) : c_(channels), gamma_({channels}), beta_({channels}),
                                         run_mean_({channels}), run_var_({channels}) {
    gamma_.data.setOnes();
    run_var_.data.setOnes();
    gamma_.alloc_grad();
    beta_.alloc_grad();
  }

  std::string name() const override { return "batchnorm(" + std::to_string(c_) + ")"; }
  LayerSpecRec spec() const override { return {kBatchNorm, {c_}}; }
  void params(std::vector<Tensor<S>*>& out) override { out.push_back(&gamma_); out.push_back(&beta_); }
  void buffers(std::vector<Tensor<S>*>& out) override { out.push_back(&run_mean_); out.push_back(&run_var_); }

  Tensor<S> forward(const Tensor<S>& x, Mode mode) override {
    if ((x.rank() != 4 && x.rank() != 2) || x.dim(1) != c_)
      throw std::invalid_argument(name() + ": unexpected input dims " + dims_str(x.dims));
    mode_ = mode;
    const int n = x.dim(0);
    const Index plane = x.size() / (static_cast<Index>(n) * c_);
    const Index m = static_cast<Index>(n) * plane;

    Tensor<S> y(x.dims);
    if (mode == Mode::train) {
      mean_.resize(c_);
      inv_std_.resize(c_);
      xhat_ = Tensor<S>(x.dims);
      for (int c = 0; c < c_; ++c) {
        double sum = 0;
        for_channel(x, c, [&](Index idx) { sum += static_cast<double>(x.data[idx]); });
        const double mu = sum / static_cast<double>(m);
        double sq = 0;
        for_channel(x, c, [&](Index idx) {
          const double d = static_cast<double>(x.data[idx]) - mu;
          sq += d * d;
        });
        const double var = sq / static_cast<double>(m);
        const double inv = 1.0 / std::sqrt(var + kEps);
        mean_[c] = static_cast<S>(mu);
        inv_std_[c] = static_cast<S>(inv);
        const S g = gamma_.data[c], b = beta_.data[c];
        for_channel(x, c, [&](Index idx) {
          const S xh = static_cast<S>((static_cast<double>(x.data[idx]) - mu) * inv);
          xhat_.data[idx] = xh;
          y.data[idx] = g * xh + b;
        });
        run_mean_.data[c] = static_cast<S>(0.9 * static_cast<double>(run_mean_.data[c]) + 0.1 * mu);
        run_var_.data[c] = static_cast<S>(0.9 * static_cast<double>(run_var_.data[c]) + 0.1 * var);
      }
      m_ = m;
    } else {
      for (int c = 0; c < c_; ++c) {
        const double inv = 1.0 / std::sqrt(static_cast<double>(run_var_.data[c]) + kEps);
        const double mu = static_cast<double>(run_mean_.data[c]);
        const S g = gamma_.data[c], b = beta_.data[c];
        for_channel_dims(x.dims, c, [&](Index idx) {
          y.data[idx] = static_cast<S>(g * (static_cast<double>(x.data[idx]) - mu) * inv + b);
        });
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    if (mode_ != Mode::train)
      throw std::logic_error(name() + ": backward requires a training-mode forward pass");
    Tensor<S> dx(dy.dims);
    const auto m = static_cast<double>(m_);
    for (int c = 0; c < c_; ++c) {
      double dg = 0, db = 0;
      for_channel(dy, c, [&](Index idx) {
        dg += static_cast<double>(dy.data[idx]) * static_cast<double>(xhat_.data[idx]);
        db += static_cast<double>(dy.data[idx]);
      });
      gamma_.grad[c] += static_cast<S>(dg);
      beta_.grad[c] += static_cast<S>(db);
      const double g = static_cast<double>(gamma_.data[c]);
      const double inv = static_cast<double>(inv_std_[c]);
      // dx = gamma*inv/m * (m*dy - sum(dy) - xhat * sum(dy*xhat))
      for_channel(dy, c, [&](Index idx) {
        const double t = m * static_cast<double>(dy.data[idx]) - db -
                         static_cast<double>(xhat_.data[idx]) * dg;
        dx.data[idx] = static_cast<S>(g * inv / m * t);
      });
    }
    return dx;
  }

 private:
  static constexpr double kEps = 1e-5;

  template <class F>
  void for_channel(const Tensor<S>& t, int c, F&& f) const {
    for_channel_dims(t.dims, c, std::forward<F>(f));
  }
  template <class F>
  void for_channel_dims(const std::vector<int>& dims, int c, F&& f) const {
    const int n = dims[0];
    Index plane = 1;
    for (std::size_t i = 2; i < dims.size(); ++i) plane *= dims[i];
    for (int i = 0; i < n; ++i) {
      const Index base = (static_cast<Index>(i) * c_ + c) * plane;
      for (Index p = 0; p < plane; ++p) f(base + p);
    }
  }

  int c_;
  Tensor<S> gamma_, beta_, run_mean_, run_var_, xhat_;
  VecX<S> mean_, inv_std_;
  Index m_ = 0;
  Mode mode_ = Mode::infer;
};

// ---------------------------------------------------------------------------

// conv3x3(s)-bn-relu-conv3x3-bn plus a shortcut (1x1 conv + bn when the shape
// changes), relu after the join.
template <class S>
class ResidualBlock : public Layer<S> {
 public:
  ResidualBlock(int ic, int ih, int iw, int oc, int stride)
      : ic_(ic), ih_(ih), iw_(iw), oc_(oc), stride_(stride),
        conv1_(ic, ih, iw, oc, 3, stride, 1),
        bn1_(oc),
        conv2_(oc, (ih + 2 - 3) / stride + 1, (iw + 2 - 3) / stride + 1, oc, 3, 1, 1),
        bn2_(oc) {
    if (stride != 1 || ic != oc) {
      proj_conv_ = std::make_unique<Conv2d<S>>(ic, ih, iw, oc, 1, stride, 0);
      proj_bn_ = std::make_unique<BatchNormLite<S>>(oc);
    }
  }

  std::string name() const override {
    return "residual(" + std::to_string(ic_) + "->" + std::to_string(oc_) + ",s" + std::to_string(stride_) + ")";
  }
  LayerSpecRec spec() const override { return {kResidualBlock, {ic_, ih_, iw_, oc_, stride_}}; }

  void params(std::vector<Tensor<S>*>& out) override {
    conv1_.params(out); bn1_.params(out); conv2_.params(out); bn2_.params(out);
    if (proj_conv_) { proj_conv_->params(out); proj_bn_->params(out); }
  }
  void buffers(std::vector<Tensor<S>*>& out) override {
    bn1_.buffers(out); bn2_.buffers(out);
    if (proj_bn_) proj_bn_->buffers(out);
  }
  void init(Rng& rng) override {
    conv1_.init(rng); conv2_.init(rng);
    if (proj_conv_) proj_conv_->init(rng);
  }

  Tensor<S> forward(const Tensor<S>& x, Mode mode) override {
    Tensor<S> t = conv1_.forward(x, mode);
    t = bn1_.forward(t, mode);
    t = relu1_.forward(t, mode);
    t = conv2_.forward(t, mode);
    t = bn2_.forward(t, mode);
    Tensor<S> s = proj_conv_ ? proj_bn_->forward(proj_conv_->forward(x, mode), mode) : x;
    sum_ = std::move(t);
    sum_.data += s.data;
    Tensor<S> y = sum_;
    y.data = y.data.cwiseMax(S(0));
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> dsum = dy;
    dsum.data = (sum_.data.array() > S(0)).select(dy.data.array(), S(0));
    Tensor<S> dmain = conv1_.backward(bn1_.backward(relu1_.backward(conv2_.backward(bn2_.backward(dsum)))));
    if (proj_conv_) {
      Tensor<S> dskip = proj_conv_->backward(proj_bn_->backward(dsum));
      dmain.data += dskip.data;
    } else {
      dmain.data += dsum.data;
    }
    return dmain;
  }

 private:
  int ic_, ih_, iw_, oc_, stride_;
  Conv2d<S> conv1_;
  BatchNormLite<S> bn1_;
  ReLU<S> relu1_;
  Conv2d<S> conv2_;
  BatchNormLite<S> bn2_;
  std::unique_ptr<Conv2d<S>> proj_conv_;
  std::unique_ptr<BatchNormLite<S>> proj_bn_;
  Tensor<S> sum_;
};

// ---------------------------------------------------------------------------

template <class S>
class Upsample2x : public Layer<S> {
 public:
  Upsample2x(int c, int h, int w) : c_(c), h_(h), w_(w) {}

  std::string name() const override { return "upsample2x"; }
  LayerSpecRec spec() const override { return {kUpsample, {c_, h_, w_}}; }

  Tensor<S> forward(const Tensor<S>& x, Mode) override {
    if (x.rank() != 4 || x.dim(1) != c_ || x.dim(2) != h_ || x.dim(3) != w_)
      throw std::invalid_argument(name() + ": unexpected input dims " + dims_str(x.dims));
    const int n = x.dim(0);
    Tensor<S> y({n, c_, 2 * h_, 2 * w_});
    const Index planes = static_cast<Index>(n) * c_;
    for (Index pl = 0; pl < planes; ++pl) {
      const S* in = x.data.data() + pl * h_ * w_;
      S* out = y.data.data() + pl * 4 * h_ * w_;
      for (int i = 0; i < h_; ++i) {
        for (int j = 0; j < w_; ++j) {
          const S v = in[i * w_ + j];
          S* o = out + (2 * i) * (2 * w_) + 2 * j;
          o[0] = v;
          o[1] = v;
          o[2 * w_] = v;
          o[2 * w_ + 1] = v;
        }
      }
    }
    last_n_ = n;
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> dx({last_n_, c_, h_, w_});
    const Index planes = static_cast<Index>(last_n_) * c_;
    for (Index pl = 0; pl < planes; ++pl) {
      const S* in = dy.data.data() + pl * 4 * h_ * w_;
      S* out = dx.data.data() + pl * h_ * w_;
      for (int i = 0; i < h_; ++i) {
        for (int j = 0; j < w_; ++j) {
          const S* p = in + (2 * i) * (2 * w_) + 2 * j;
          out[i * w_ + j] = p[0] + p[1] + p[2 * w_] + p[2 * w_ + 1];
        }
      }
    }
    return dx;
  }

 private:
  int c_, h_, w_;
  int last_n_ = 0;
};

// ---------------------------------------------------------------------------

template <class S>
class GlobalAvgPool : public Layer<S> {
 public:
  GlobalAvgPool(int c, int h, int w) : c_(c), h_(h), w_(w) {}

  std::string name() const override { return "global_avg_pool"; }
  LayerSpecRec spec() const override { return {kGlobalAvgPool, {c_, h_, w_}}; }

  Tensor<S> forward(const Tensor<S>& x, Mode) override {
    if (x.rank() != 4 || x.dim(1) != c_ || x.dim(2) != h_ || x.dim(3) != w_)
      throw std::invalid_argument(name() + ": unexpected input dims " + dims_str(x.dims));
    const int n = x.dim(0);
    last_n_ = n;
    Tensor<S> y({n, c_});
    const Index plane = static_cast<Index>(h_) * w_;
    for (Index pl = 0; pl < static_cast<Index>(n) * c_; ++pl)
      y.data[pl] = x.data.segment(pl * plane, plane).sum() / static_cast<S>(plane);
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> dx({last_n_, c_, h_, w_});
    const Index plane = static_cast<Index>(h_) * w_;
    for (Index pl = 0; pl < static_cast<Index>(last_n_) * c_; ++pl)
      dx.data.segment(pl * plane, plane).setConstant(dy.data[pl] / static_cast<S>(plane));
    return dx;
  }

 private:
  int c_, h_, w_;
  int last_n_ = 0;
};

// (N,C,H,W) -> (N, C*H*W); the flat layout is shared so this is a relabeling.
template <class S>
class Flatten : public Layer<S> {
 public:
  Flatten(int c, int h, int w) : c_(c), h_(h), w_(w) {}

  std::string name() const override { return "flatten"; }
  LayerSpecRec spec() const override { return {kFlatten, {c_, h_, w_}}; }

  Tensor<S> forward(const Tensor<S>& x, Mode) override {
    if (x.rank() != 4 || x.dim(1) != c_ || x.dim(2) != h_ || x.dim(3) != w_)
      throw std::invalid_argument(name() + ": unexpected input dims " + dims_str(x.dims));
    Tensor<S> y = x;
    y.dims = {x.dim(0), c_ * h_ * w_};
    return y;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> dx = dy;
    dx.dims = {dy.dim(0), c_, h_, w_};
    return dx;
  }

 private:
  int c_, h_, w_;
};

}  // namespace aqua::nn
