#pragma once

#include <memory>
#include <vector>

#include "aqua/nn/layers.hpp"

namespace aqua::nn {

enum NetworkKind : std::uint16_t {
  kSequential = 1,
  kUNet = 2,
};

struct NetworkSpec {
  std::uint16_t net_kind = 0;
  std::vector<std::int32_t> ints;
  std::vector<LayerSpecRec> layers;  // sequential only
};

template <class S>
class Network {
 public:
  virtual ~Network() = default;
  virtual Tensor<S> forward(const Tensor<S>& x, Mode mode) = 0;
  virtual Tensor<S> backward(const Tensor<S>& dy) = 0;
  virtual void params(std::vector<Tensor<S>*>& out) = 0;
  virtual void buffers(std::vector<Tensor<S>*>& out) = 0;
  virtual NetworkSpec spec() const = 0;
  virtual void init(Rng& rng) = 0;

  std::vector<Tensor<S>*> param_list() {
    std::vector<Tensor<S>*> p;
    params(p);
    return p;
  }
  std::vector<Tensor<S>*> buffer_list() {
    std::vector<Tensor<S>*> b;
    buffers(b);
    return b;
  }
  void zero_grads() {
    for (auto* p : param_list()) p->zero_grad();
  }
  Index param_count() {
    Index n = 0;
    for (auto* p : param_list()) n += p->size();
    return n;
  }
};

template <class S>
class Sequential : public Network<S> {
 public:
  Sequential() = default;

  Sequential& add(std::unique_ptr<Layer<S>> layer) {
    layers_.push_back(std::move(layer));
    return *this;
  }
  template <class L, class... Args>
  Sequential& emplace(Args&&... args) {
    layers_.push_back(std::make_unique<L>(std::forward<Args>(args)...));
    return *this;
  }

  Tensor<S> forward(const Tensor<S>& x, Mode mode) override {
    Tensor<S> t = x;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      try {
        t = layers_[i]->forward(t, mode);
      } catch (const std::invalid_argument& e) {
        throw std::invalid_argument("layer " + std::to_string(i) + " " + e.what());
      }
    }
    return t;
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> t = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) t = (*it)->backward(t);
    return t;
  }

  void params(std::vector<Tensor<S>*>& out) override {
    for (auto& l : layers_) l->params(out);
  }
  void buffers(std::vector<Tensor<S>*>& out) override {
    for (auto& l : layers_) l->buffers(out);
  }
  void init(Rng& rng) override {
    for (auto& l : layers_) l->init(rng);
  }

  NetworkSpec spec() const override {
    NetworkSpec s;
    s.net_kind = kSequential;
    for (const auto& l : layers_) s.layers.push_back(l->spec());
    return s;
  }

  std::size_t layer_count() const { return layers_.size(); }

 private:
  std::vector<std::unique_ptr<Layer<S>>> layers_;
};

// ---------------------------------------------------------------------------

// Encoder/decoder with skip concatenation: two 2x2 maxpool stages, channel
// ladder base -> 2*base -> 4*base, one conv-bn-relu per level,
// nearest-neighbor upsampling and a linear 3x3 output head. Height and width
// must be divisible by 4.
template <class S>
class UNet : public Network<S> {
 public:
  UNet(int in_ch, int h, int w, int base, int out_ch = 1)
      : in_ch_(in_ch), h_(h), w_(w), base_(base), out_ch_(out_ch),
        enc0_(in_ch, h, w, base, 3, 1, 1),
        enc0_bn_(base),
        pool0_(base, h, w),
        enc1_(base, h / 2, w / 2, 2 * base, 3, 1, 1),
        enc1_bn_(2 * base),
        pool1_(2 * base, h / 2, w / 2),
        bot_(2 * base, h / 4, w / 4, 4 * base, 3, 1, 1),
        bot_bn_(4 * base),
        up1_(4 * base, h / 4, w / 4),
        dec1_(6 * base, h / 2, w / 2, 2 * base, 3, 1, 1),
        dec1_bn_(2 * base),
        up0_(2 * base, h / 2, w / 2),
        dec0_(3 * base, h, w, base, 3, 1, 1),
        dec0_bn_(base),
        out_conv_(base, h, w, out_ch, 3, 1, 1) {
    if (h % 4 != 0 || w % 4 != 0)
      throw std::invalid_argument("unet: input height and width must be divisible by 4");
  }

  Tensor<S> forward(const Tensor<S>& x, Mode mode) override {
    Tensor<S> e0 = enc0_relu_.forward(enc0_bn_.forward(enc0_.forward(x, mode), mode), mode);
    skip0_ = e0;
    Tensor<S> p0 = pool0_.forward(e0, mode);
    Tensor<S> e1 = enc1_relu_.forward(enc1_bn_.forward(enc1_.forward(p0, mode), mode), mode);
    skip1_ = e1;
    Tensor<S> p1 = pool1_.forward(e1, mode);
    Tensor<S> b = bot_relu_.forward(bot_bn_.forward(bot_.forward(p1, mode), mode), mode);
    Tensor<S> d1 = concat_channels(up1_.forward(b, mode), skip1_);
    d1 = dec1_relu_.forward(dec1_bn_.forward(dec1_.forward(d1, mode), mode), mode);
    Tensor<S> d0 = concat_channels(up0_.forward(d1, mode), skip0_);
    d0 = dec0_relu_.forward(dec0_bn_.forward(dec0_.forward(d0, mode), mode), mode);
    return out_conv_.forward(d0, mode);
  }

  Tensor<S> backward(const Tensor<S>& dy) override {
    Tensor<S> g = out_conv_.backward(dy);
    g = dec0_.backward(dec0_bn_.backward(dec0_relu_.backward(g)));
    auto [g_up0, g_skip0] = split_channels(g, 2 * base_);
    g = up0_.backward(g_up0);
    g = dec1_.backward(dec1_bn_.backward(dec1_relu_.backward(g)));
    auto [g_up1, g_skip1] = split_channels(g, 4 * base_);
    g = up1_.backward(g_up1);
    g = bot_.backward(bot_bn_.backward(bot_relu_.backward(g)));
    g = pool1_.backward(g);
    g.data += g_skip1.data;
    g = enc1_.backward(enc1_bn_.backward(enc1_relu_.backward(g)));
    g = pool0_.backward(g);
    g.data += g_skip0.data;
    return enc0_.backward(enc0_bn_.backward(enc0_relu_.backward(g)));
  }

  void params(std::vector<Tensor<S>*>& out) override {
    enc0_.params(out); enc0_bn_.params(out);
    enc1_.params(out); enc1_bn_.params(out);
    bot_.params(out); bot_bn_.params(out);
    dec1_.params(out); dec1_bn_.params(out);
    dec0_.params(out); dec0_bn_.params(out);
    out_conv_.params(out);
  }

  void buffers(std::vector<Tensor<S>*>& out) override {
    enc0_bn_.buffers(out);
    enc1_bn_.buffers(out);
    bot_bn_.buffers(out);
    dec1_bn_.buffers(out);
    dec0_bn_.buffers(out);
  }

  void init(Rng& rng) override {
    enc0_.init(rng); enc1_.init(rng); bot_.init(rng);
    dec1_.init(rng); dec0_.init(rng); out_conv_.init(rng);
  }

  NetworkSpec spec() const override {
    NetworkSpec s;
    s.net_kind = kUNet;
    s.ints = {in_ch_, h_, w_, base_, out_ch_};
    return s;
  }

 private:
  // [a; b] along the channel axis, per sample.
  static Tensor<S> concat_channels(const Tensor<S>& a, const Tensor<S>& b) {
    const int n = a.dim(0), ca = a.dim(1), cb = b.dim(1), h = a.dim(2), w = a.dim(3);
    Tensor<S> y({n, ca + cb, h, w});
    const Index plane = static_cast<Index>(h) * w;
    for (int i = 0; i < n; ++i) {
      y.data.segment(static_cast<Index>(i) * (ca + cb) * plane, ca * plane) =
          a.data.segment(static_cast<Index>(i) * ca * plane, ca * plane);
      y.data.segment(static_cast<Index>(i) * (ca + cb) * plane + ca * plane, cb * plane) =
          b.data.segment(static_cast<Index>(i) * cb * plane, cb * plane);
    }
    return y;
  }

  static std::pair<Tensor<S>, Tensor<S>> split_channels(const Tensor<S>& y, int ca) {
    const int n = y.dim(0), c = y.dim(1), h = y.dim(2), w = y.dim(3);
    const int cb = c - ca;
    Tensor<S> a({n, ca, h, w}), b({n, cb, h, w});
    const Index plane = static_cast<Index>(h) * w;
    for (int i = 0; i < n; ++i) {
      a.data.segment(static_cast<Index>(i) * ca * plane, ca * plane) =
          y.data.segment(static_cast<Index>(i) * c * plane, ca * plane);
      b.data.segment(static_cast<Index>(i) * cb * plane, cb * plane) =
          y.data.segment(static_cast<Index>(i) * c * plane + ca * plane, cb * plane);
    }
    return {std::move(a), std::move(b)};
  }

  int in_ch_, h_, w_, base_, out_ch_;
  Conv2d<S> enc0_;
  BatchNormLite<S> enc0_bn_;
  ReLU<S> enc0_relu_;
  MaxPool2d<S> pool0_;
  Conv2d<S> enc1_;
  BatchNormLite<S> enc1_bn_;
  ReLU<S> enc1_relu_;
  MaxPool2d<S> pool1_;
  Conv2d<S> bot_;
  BatchNormLite<S> bot_bn_;
  ReLU<S> bot_relu_;
  Upsample2x<S> up1_;
  Conv2d<S> dec1_;
  BatchNormLite<S> dec1_bn_;
  ReLU<S> dec1_relu_;
  Upsample2x<S> up0_;
  Conv2d<S> dec0_;
  BatchNormLite<S> dec0_bn_;
  ReLU<S> dec0_relu_;
  Conv2d<S> out_conv_;
  Tensor<S> skip0_, skip1_;
};

// ---------------------------------------------------------------------------

template <class S>
std::unique_ptr<Layer<S>> build_layer(const LayerSpecRec& rec) {
  const auto& v = rec.ints;
  auto need = [&](std::size_t n) {
    if (v.size() != n)
      throw std::runtime_error("layer spec kind " + std::to_string(rec.kind) + " expects " +
                               std::to_string(n) + " ints, got " + std::to_string(v.size()));
  };
  switch (rec.kind) {
    case kDense: need(2); return std::make_unique<Dense<S>>(v[0], v[1]);
    case kConv2d: need(7); return std::make_unique<Conv2d<S>>(v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
    case kMaxPool: need(5); return std::make_unique<MaxPool2d<S>>(v[0], v[1], v[2], v[3], v[4]);
    case kRelu: need(0); return std::make_unique<ReLU<S>>();
    case kSigmoid: need(0); return std::make_unique<Sigmoid<S>>();
    case kBatchNorm: need(1); return std::make_unique<BatchNormLite<S>>(v[0]);
    case kResidualBlock: need(5); return std::make_unique<ResidualBlock<S>>(v[0], v[1], v[2], v[3], v[4]);
    case kUpsample: need(3); return std::make_unique<Upsample2x<S>>(v[0], v[1], v[2]);
    case kGlobalAvgPool: need(3); return std::make_unique<GlobalAvgPool<S>>(v[0], v[1], v[2]);
    case kFlatten: need(3); return std::make_unique<Flatten<S>>(v[0], v[1], v[2]);
    default: throw std::runtime_error("unknown layer kind " + std::to_string(rec.kind));
  }
}

template <class S>
std::unique_ptr<Network<S>> build_network(const NetworkSpec& spec) {
  switch (spec.net_kind) {
    case kSequential: {
      auto net = std::make_unique<Sequential<S>>();
      for (const auto& rec : spec.layers) net->add(build_layer<S>(rec));
      return net;
    }
    case kUNet: {
      if (spec.ints.size() != 5) throw std::runtime_error("unet spec expects 5 ints");
      return std::make_unique<UNet<S>>(spec.ints[0], spec.ints[1], spec.ints[2], spec.ints[3],
                                       spec.ints[4]);
    }
    default:
      throw std::runtime_error("unknown network kind " + std::to_string(spec.net_kind));
  }
}

}  // namespace aqua::nn
