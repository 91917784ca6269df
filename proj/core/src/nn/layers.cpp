#include "lienc/nn/layers.hpp"

#include <cmath>

#include "lienc/error.hpp"

namespace lienc::nn {

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::LocallyConnected1x1: return "LocallyConnected1x1";
    case LayerKind::Conv2D: return "Conv2D";
    case LayerKind::Dense: return "Dense";
    case LayerKind::LeakyReLU: return "LeakyReLU";
    case LayerKind::Tanh: return "Tanh";
    case LayerKind::Sigmoid: return "Sigmoid";
  }
  return "Unknown";
}

LayerSpec LayerSpec::locally_connected(int in, int out, int height, int width) {
  LayerSpec s;
  s.kind = LayerKind::LocallyConnected1x1;
  s.in_channels = in;
  s.out_channels = out;
  s.height = height;
  s.width = width;
  return s;
}

LayerSpec LayerSpec::conv2d(int in, int out, int kernel, int stride, int padding) {
  LayerSpec s;
  s.kind = LayerKind::Conv2D;
  s.in_channels = in;
  s.out_channels = out;
  s.kernel = kernel;
  s.stride = stride;
  s.padding = padding;
  return s;
}

LayerSpec LayerSpec::dense(int in, int out) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.in_channels = in;
  s.out_channels = out;
  return s;
}

LayerSpec LayerSpec::leaky_relu(double slope) {
  LayerSpec s;
  s.kind = LayerKind::LeakyReLU;
  s.slope = slope;
  return s;
}

LayerSpec LayerSpec::tanh() {
  LayerSpec s;
  s.kind = LayerKind::Tanh;
  return s;
}

LayerSpec LayerSpec::sigmoid() {
  LayerSpec s;
  s.kind = LayerKind::Sigmoid;
  return s;
}

void LayerSpec::validate() const {
  auto fail = [this](const std::string& why) {
    throw Error(ErrorCode::InvalidParams, to_string(kind) + ": " + why);
  };
  switch (kind) {
    case LayerKind::LocallyConnected1x1:
      if (height < 1 || width < 1) fail("height and width must be >= 1");
      [[fallthrough]];
    case LayerKind::Dense:
      if (in_channels < 1 || out_channels < 1) fail("channel counts must be >= 1");
      break;
    case LayerKind::Conv2D:
      if (in_channels < 1 || out_channels < 1) fail("channel counts must be >= 1");
      if (kernel < 1) fail("kernel must be >= 1");
      if (stride < 1) fail("stride must be >= 1");
      if (padding < 0) fail("padding must be >= 0");
      break;
    case LayerKind::LeakyReLU:
      if (!(slope > 0.0 && slope < 1.0)) fail("slope must lie in (0, 1)");
      break;
    case LayerKind::Tanh:
    case LayerKind::Sigmoid:
      break;
    default:
      fail("unknown layer kind");
  }
}

void Layer::zero_grad() {
  for (auto* p : parameters()) p->grad.fill(0.0);
}

namespace {

void init_normal(Tensor& t, KeyStream& rng) {
  for (auto& v : t.data()) v = 0.02 * rng.next_normal();
}

std::size_t u(int v) { return static_cast<std::size_t>(v); }

}  // namespace

std::unique_ptr<Layer> make_layer(const LayerSpec& spec, Init init, KeyStream& rng) {
  spec.validate();
  switch (spec.kind) {
    case LayerKind::LocallyConnected1x1: {
      auto layer = std::make_unique<LocallyConnected1x1>(spec);
      auto& w = layer->weight().value;
      if (init == Init::Identity) {
        const std::size_t out = u(spec.out_channels);
        const std::size_t in = u(spec.in_channels);
        for (std::size_t p = 0; p < u(spec.height) * u(spec.width); ++p) {
          for (std::size_t o = 0; o < out && o < in; ++o) w[(p * out + o) * in + o] = 1.0;
        }
      } else {
        init_normal(w, rng);
      }
      return layer;
    }
    case LayerKind::Conv2D: {
      auto layer = std::make_unique<Conv2D>(spec);
      auto& w = layer->weight().value;
      if (init == Init::Identity) {
        const std::size_t k = u(spec.kernel);
        const std::size_t c = k / 2;
        for (std::size_t o = 0; o < u(spec.out_channels) && o < u(spec.in_channels); ++o) {
          w[((o * u(spec.in_channels) + o) * k + c) * k + c] = 1.0;
        }
      } else {
        init_normal(w, rng);
      }
      return layer;
    }
    case LayerKind::Dense: {
      auto layer = std::make_unique<Dense>(spec);
      auto& w = layer->weight().value;
      if (init == Init::Identity) {
        for (std::size_t o = 0; o < u(spec.out_channels) && o < u(spec.in_channels); ++o) {
          w[o * u(spec.in_channels) + o] = 1.0;
        }
      } else {
        init_normal(w, rng);
      }
      return layer;
    }
    case LayerKind::LeakyReLU:
      return std::make_unique<LeakyReLU>(spec);
    case LayerKind::Tanh:
      return std::make_unique<Tanh>();
    case LayerKind::Sigmoid:
      return std::make_unique<Sigmoid>();
  }
  throw Error(ErrorCode::InvalidParams, "unknown layer kind");
}

// ---------------------------------------------------------------------------
// LocallyConnected1x1

LocallyConnected1x1::LocallyConnected1x1(const LayerSpec& spec)
    : Layer(spec),
      weight_({u(spec.height), u(spec.width), u(spec.out_channels), u(spec.in_channels)}),
      bias_({u(spec.height), u(spec.width), u(spec.out_channels)}) {
  spec.validate();
}

void LocallyConnected1x1::check_input(const Tensor& input) const {
  const auto& s = spec();
  if (input.rank() != 4 || input.dim(1) != u(s.in_channels) || input.dim(2) != u(s.height) ||
      input.dim(3) != u(s.width)) {
    throw Error(ErrorCode::ShapeMismatch, "LocallyConnected1x1 expects [N," + std::to_string(s.in_channels) +
                                              "," + std::to_string(s.height) + "," + std::to_string(s.width) +
                                              "], got " + shape_string(input.shape()));
  }
}

Tensor LocallyConnected1x1::forward(const Tensor& input) const {
  check_input(input);
  const std::size_t n_batch = input.dim(0);
  const std::size_t in = u(spec().in_channels);
  const std::size_t out = u(spec().out_channels);
  const std::size_t h = u(spec().height);
  const std::size_t w = u(spec().width);
  Tensor result({n_batch, out, h, w});
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t p = y * w + x;
        for (std::size_t o = 0; o < out; ++o) {
          double acc = bias_.value[p * out + o];
          const double* wrow = weight_.value.data().data() + ((p * out + o) * in);
          for (std::size_t i = 0; i < in; ++i) acc += wrow[i] * input.at(n, i, y, x);
          result.at(n, o, y, x) = acc;
        }
      }
    }
  }
  return result;
}

Tensor LocallyConnected1x1::backward(const Tensor& input, const Tensor& upstream) {
  check_input(input);
  const std::size_t n_batch = input.dim(0);
  const std::size_t in = u(spec().in_channels);
  const std::size_t out = u(spec().out_channels);
  const std::size_t h = u(spec().height);
  const std::size_t w = u(spec().width);
  expect_shape(upstream, {n_batch, out, h, w}, "LocallyConnected1x1 upstream");
  Tensor grad_in(input.shape());
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const std::size_t p = y * w + x;
        for (std::size_t o = 0; o < out; ++o) {
          const double g = upstream.at(n, o, y, x);
          bias_.grad[p * out + o] += g;
          const std::size_t row = (p * out + o) * in;
          for (std::size_t i = 0; i < in; ++i) {
            weight_.grad[row + i] += g * input.at(n, i, y, x);
            grad_in.at(n, i, y, x) += weight_.value[row + i] * g;
          }
        }
      }
    }
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// Conv2D

Conv2D::Conv2D(const LayerSpec& spec)
    : Layer(spec),
      weight_({u(spec.out_channels), u(spec.in_channels), u(spec.kernel), u(spec.kernel)}),
      bias_({u(spec.out_channels)}) {
  spec.validate();
}

std::size_t Conv2D::output_extent(std::size_t extent) const {
  const long padded = static_cast<long>(extent) + 2L * spec().padding;
  if (padded < spec().kernel) {
    throw Error(ErrorCode::ShapeMismatch, "Conv2D input extent " + std::to_string(extent) + " smaller than kernel");
  }
  return static_cast<std::size_t>((padded - spec().kernel) / spec().stride + 1);
}

void Conv2D::check_input(const Tensor& input) const {
  if (input.rank() != 4 || input.dim(1) != u(spec().in_channels)) {
    throw Error(ErrorCode::ShapeMismatch, "Conv2D expects [N," + std::to_string(spec().in_channels) +
                                              ",H,W], got " + shape_string(input.shape()));
  }
}

namespace {

/// Kernel taps [lo, hi) that land inside [0, extent) for output position o.
struct TapRange {
  long lo;
  long hi;
};

TapRange valid_taps(long o, long stride, long pad, long k, long extent) {
  const long base = o * stride - pad;
  return {std::max(0L, -base), std::min(k, extent - base)};
}

}  // namespace

Tensor Conv2D::forward(const Tensor& input) const {
  check_input(input);
  const std::size_t n_batch = input.dim(0);
  const std::size_t in = u(spec().in_channels);
  const std::size_t out = u(spec().out_channels);
  const long k = spec().kernel;
  const long s = spec().stride;
  const long pad = spec().padding;
  const long ih = static_cast<long>(input.dim(2));
  const long iw = static_cast<long>(input.dim(3));
  const std::size_t oh = output_extent(input.dim(2));
  const std::size_t ow = output_extent(input.dim(3));
  Tensor result({n_batch, out, oh, ow});
  const double* x = input.data().data();
  const double* w = weight_.value.data().data();
  double* y = result.data().data();
  const std::size_t plane = u(ih) * u(iw);
  const std::size_t kk = u(k) * u(k);
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        const auto ry = valid_taps(static_cast<long>(oy), s, pad, k, ih);
        const long by = static_cast<long>(oy) * s - pad;
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const auto rx = valid_taps(static_cast<long>(ox), s, pad, k, iw);
          const long bx = static_cast<long>(ox) * s - pad;
          double acc = bias_.value[o];
          for (std::size_t i = 0; i < in; ++i) {
            const double* xp = x + (n * in + i) * plane;
            const double* wp = w + (o * in + i) * kk;
            for (long ky = ry.lo; ky < ry.hi; ++ky) {
              const double* xrow = xp + u(by + ky) * u(iw) + bx;
              const double* wrow = wp + u(ky) * u(k);
              for (long kx = rx.lo; kx < rx.hi; ++kx) acc += wrow[kx] * xrow[kx];
            }
          }
          y[((n * out + o) * oh + oy) * ow + ox] = acc;
        }
      }
    }
  }
  return result;
}

Tensor Conv2D::backward(const Tensor& input, const Tensor& upstream) {
  check_input(input);
  const std::size_t n_batch = input.dim(0);
  const std::size_t in = u(spec().in_channels);
  const std::size_t out = u(spec().out_channels);
  const long k = spec().kernel;
  const long s = spec().stride;
  const long pad = spec().padding;
  const long ih = static_cast<long>(input.dim(2));
  const long iw = static_cast<long>(input.dim(3));
  const std::size_t oh = output_extent(input.dim(2));
  const std::size_t ow = output_extent(input.dim(3));
  expect_shape(upstream, {n_batch, out, oh, ow}, "Conv2D upstream");
  Tensor grad_in(input.shape());
  const double* x = input.data().data();
  const double* w = weight_.value.data().data();
  double* gw = weight_.grad.data().data();
  double* gx = grad_in.data().data();
  const double* up = upstream.data().data();
  const std::size_t plane = u(ih) * u(iw);
  const std::size_t kk = u(k) * u(k);
  for (std::size_t n = 0; n < n_batch; ++n) {
    for (std::size_t o = 0; o < out; ++o) {
      for (std::size_t oy = 0; oy < oh; ++oy) {
        const auto ry = valid_taps(static_cast<long>(oy), s, pad, k, ih);
        const long by = static_cast<long>(oy) * s - pad;
        for (std::size_t ox = 0; ox < ow; ++ox) {
          const double g = up[((n * out + o) * oh + oy) * ow + ox];
          if (g == 0.0) continue;
          bias_.grad[o] += g;
          const auto rx = valid_taps(static_cast<long>(ox), s, pad, k, iw);
          const long bx = static_cast<long>(ox) * s - pad;
          for (std::size_t i = 0; i < in; ++i) {
            const std::size_t xoff = (n * in + i) * plane;
            const std::size_t woff = (o * in + i) * kk;
            for (long ky = ry.lo; ky < ry.hi; ++ky) {
              const std::size_t row = xoff + u(by + ky) * u(iw);
              const double* xrow = x + row + bx;
              double* gxrow = gx + row + bx;
              const double* wrow = w + woff + u(ky) * u(k);
              double* gwrow = gw + woff + u(ky) * u(k);
              for (long kx = rx.lo; kx < rx.hi; ++kx) {
                gwrow[kx] += g * xrow[kx];
                gxrow[kx] += wrow[kx] * g;
              }
            }
          }
        }
      }
    }
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// Dense

Dense::Dense(const LayerSpec& spec)
    : Layer(spec),
      weight_({u(spec.out_channels), u(spec.in_channels)}),
      bias_({u(spec.out_channels)}) {
  spec.validate();
}

void Dense::check_input(const Tensor& input) const {
  if (input.rank() < 2 || input.size() / input.dim(0) != u(spec().in_channels)) {
    throw Error(ErrorCode::ShapeMismatch, "Dense expects [N," + std::to_string(spec().in_channels) +
                                              "] after flattening, got " + shape_string(input.shape()));
  }
}

Tensor Dense::forward(const Tensor& input) const {
  check_input(input);
  const std::size_t n_batch = input.dim(0);
  const std::size_t in = u(spec().in_channels);
  const std::size_t out = u(spec().out_channels);
  Tensor result({n_batch, out});
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* x = input.data().data() + (n * in);
    for (std::size_t o = 0; o < out; ++o) {
      double acc = bias_.value[o];
      const double* wrow = weight_.value.data().data() + (o * in);
      for (std::size_t i = 0; i < in; ++i) acc += wrow[i] * x[i];
      result[n * out + o] = acc;
    }
  }
  return result;
}

Tensor Dense::backward(const Tensor& input, const Tensor& upstream) {
  check_input(input);
  const std::size_t n_batch = input.dim(0);
  const std::size_t in = u(spec().in_channels);
  const std::size_t out = u(spec().out_channels);
  expect_shape(upstream, {n_batch, out}, "Dense upstream");
  Tensor grad_in(input.shape());
  for (std::size_t n = 0; n < n_batch; ++n) {
    const double* x = input.data().data() + (n * in);
    for (std::size_t o = 0; o < out; ++o) {
      const double g = upstream[n * out + o];
      bias_.grad[o] += g;
      for (std::size_t i = 0; i < in; ++i) {
        weight_.grad[o * in + i] += g * x[i];
        grad_in[n * in + i] += weight_.value[o * in + i] * g;
      }
    }
  }
  return grad_in;
}

// ---------------------------------------------------------------------------
// Activations

Tensor LeakyReLU::forward(const Tensor& input) const {
  Tensor out = input;
  const double a = spec().slope;
  for (auto& v : out.data()) v = v > 0.0 ? v : a * v;
  return out;
}

Tensor LeakyReLU::backward(const Tensor& input, const Tensor& upstream) {
  expect_shape(upstream, input.shape(), "LeakyReLU upstream");
  Tensor grad = upstream;
  const double a = spec().slope;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(input[i] > 0.0)) grad[i] *= a;
  }
  return grad;
}

Tensor Tanh::forward(const Tensor& input) const {
  Tensor out = input;
  for (auto& v : out.data()) v = std::tanh(v);
  return out;
}

Tensor Tanh::backward(const Tensor& input, const Tensor& upstream) {
  expect_shape(upstream, input.shape(), "Tanh upstream");
  Tensor grad = upstream;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double t = std::tanh(input[i]);
    grad[i] *= 1.0 - t * t;
  }
  return grad;
}

namespace {

double sigmoid(double v) {
  if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
  const double e = std::exp(v);
  return e / (1.0 + e);
}

}  // namespace

Tensor Sigmoid::forward(const Tensor& input) const {
  Tensor out = input;
  for (auto& v : out.data()) v = sigmoid(v);
  return out;
}

Tensor Sigmoid::backward(const Tensor& input, const Tensor& upstream) {
  expect_shape(upstream, input.shape(), "Sigmoid upstream");
  Tensor grad = upstream;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double s = sigmoid(input[i]);
    grad[i] *= s * (1.0 - s);
  }
  return grad;
}

}  // namespace lienc::nn
