#include "lienc/itn_attack.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "lienc/blockwise.hpp"
#include "lienc/error.hpp"
#include "lienc/image_tensor.hpp"
#include "lienc/keystream.hpp"
#include "lienc/nn/loss.hpp"

namespace lienc {

namespace {

constexpr double kSingularRcond = 1e-12;

void check_ridge(double ridge) {
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw Error(ErrorCode::InvalidParams, "ridge must be a finite value >= 0");
  }
}

}  // namespace

void PairedSet::add(Image cipher, Image plain) {
  if (!cipher.same_shape(plain)) throw Error(ErrorCode::DimensionMismatch, "pair members differ in size");
  if (!cipher_.empty() && !cipher_.front().same_shape(cipher)) {
    throw Error(ErrorCode::DimensionMismatch, "all pairs must share dimensions");
  }
  cipher_.push_back(std::move(cipher));
  plain_.push_back(std::move(plain));
}

int PairedSet::width() const {
  if (empty()) throw Error(ErrorCode::InsufficientPairs, "empty paired set");
  return cipher_.front().width();
}

int PairedSet::height() const {
  if (empty()) throw Error(ErrorCode::InsufficientPairs, "empty paired set");
  return cipher_.front().height();
}

PixelAffineModel PixelAffineModel::identity(int width, int height) {
  PixelAffineModel m;
  m.width = width;
  m.height = height;
  m.maps.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height),
                {1, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0});
  return m;
}

BlockAffineModel BlockAffineModel::identity() {
  BlockAffineModel m;
  m.a.assign(kDim * kDim, 0.0);
  for (int i = 0; i < kDim; ++i) m.a[i * kDim + i] = 1.0;
  m.t.assign(kDim, 0.0);
  return m;
}

// ---------------------------------------------------------------------------
// Closed-form pixel-wise fit

PixelAffineModel fit_itn_pixelwise_closed(const PairedSet& pairs, double ridge) {
  check_ridge(ridge);
  if (pairs.size() < 4) {
    throw Error(ErrorCode::InsufficientPairs, "need >= 4 pairs, got " + std::to_string(pairs.size()));
  }
  const int w = pairs.width();
  const int h = pairs.height();
  PixelAffineModel model = PixelAffineModel::identity(w, h);
  const double g = static_cast<double>(pairs.size());

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      Eigen::Vector3d mean_e = Eigen::Vector3d::Zero();
      Eigen::Vector3d mean_t = Eigen::Vector3d::Zero();
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        for (int c = 0; c < 3; ++c) {
          mean_e[c] += pairs.ciphers()[k].at(x, y, c);
          mean_t[c] += pairs.plains()[k].at(x, y, c);
        }
      }
      mean_e /= g;
      mean_t /= g;
      Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
      Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();  // sum e_c t_c^T
      for (std::size_t k = 0; k < pairs.size(); ++k) {
        Eigen::Vector3d e;
        Eigen::Vector3d t;
        for (int c = 0; c < 3; ++c) {
          e[c] = pairs.ciphers()[k].at(x, y, c) - mean_e[c];
          t[c] = pairs.plains()[k].at(x, y, c) - mean_t[c];
        }
        cov.noalias() += e * e.transpose();
        cross.noalias() += e * t.transpose();
      }
      cov.diagonal().array() += ridge;

      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      Eigen::LDLT<Eigen::Matrix3d> ldlt(cov);
      const bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                            (cov.norm() == 0.0) || ldlt.rcond() < kSingularRcond;
      if (singular) {
        model.singular_pixels.push_back(p);
        continue;
      }
      const Eigen::Matrix3d at = ldlt.solve(cross);  // A^T
      const Eigen::Matrix3d a = at.transpose();
      const Eigen::Vector3d b = mean_t - a * mean_e;
      auto& map = model.maps[p];
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) map[r * 3 + c] = a(r, c);
        map[9 + r] = b[r];
      }
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// SGD pixel-wise fit

nn::SgdSpec itn_default_schedule() {
  nn::SgdSpec s;
  s.lr = 0.1;
  s.momentum = 0.9;
  s.weight_decay = 0.0005;
  s.schedule = {{40, 0.1}, {60, 0.1}};
  return s;
}

PixelAffineModel collapse_locally_connected(const nn::Sequential& net) {
  if (net.size() == 0) throw Error(ErrorCode::InvalidParams, "empty network");
  const auto first = net.layer(0).spec();
  const int h = first.height;
  const int w = first.width;
  const auto scaling = PixelScaling::symmetric();
  PixelAffineModel model = PixelAffineModel::identity(w, h);
  nn::Sequential copy = net;

  for (std::size_t p = 0; p < model.maps.size(); ++p) {
    // Running affine map in network units, in_dim inputs -> rows outputs.
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(3);
    for (std::size_t li = 0; li < copy.size(); ++li) {
      auto& layer = copy.layer(li);
      const auto& s = layer.spec();
      if (s.kind != nn::LayerKind::LocallyConnected1x1 || s.height != h || s.width != w) {
        throw Error(ErrorCode::InvalidParams, "only LocallyConnected1x1 stacks collapse to a pixel map");
      }
      const auto params = layer.parameters();
      const auto& wt = params[0]->value;
      const auto& bt = params[1]->value;
      const int out = s.out_channels;
      const int in = s.in_channels;
      Eigen::MatrixXd lw(out, in);
      Eigen::VectorXd lb(out);
      for (int o = 0; o < out; ++o) {
        for (int i = 0; i < in; ++i) lw(o, i) = wt[(p * out + o) * in + i];
        lb[o] = bt[p * out + o];
      }
      b = lw * b + lb;
      a = lw * a;
    }
    if (a.rows() != 3) throw Error(ErrorCode::InvalidParams, "stack must end with 3 channels");
    // v = s*pix + o  =>  pix' = A pix + (A o 1 + b - o 1) / s
    const Eigen::Vector3d ones = Eigen::Vector3d::Ones();
    const Eigen::Vector3d bias = (a * ones * scaling.offset + b - ones * scaling.offset) / scaling.scale;
    auto& map = model.maps[p];
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) map[r * 3 + c] = a(r, c);
      map[9 + r] = bias[r];
    }
  }
  return model;
}

ItnSgdResult fit_itn_pixelwise_sgd(const PairedSet& pairs, const nn::OptimizerSpec& spec,
                                   const ItnSgdOptions& options) {
  if (pairs.empty()) throw Error(ErrorCode::InsufficientPairs, "no training pairs");
  if (options.layers < 1 || options.hidden_channels < 1 || options.batch_size < 1 || options.epochs < 0) {
    throw Error(ErrorCode::InvalidParams, "invalid ITN SGD options");
  }
  nn::validate(spec);
  const int w = pairs.width();
  const int h = pairs.height();

  std::vector<nn::LayerSpec> specs;
  for (int l = 0; l < options.layers; ++l) {
    const int in = l == 0 ? 3 : options.hidden_channels;
    const int out = l == options.layers - 1 ? 3 : options.hidden_channels;
    specs.push_back(nn::LayerSpec::locally_connected(in, out, h, w));
  }
  KeyStream init_rng(options.seed);
  ItnSgdResult result{nn::Sequential::from_specs(specs, nn::Init::Identity, init_rng), {}, {}};

  const auto scaling = PixelScaling::symmetric();
  const nn::Tensor inputs = images_to_tensor(pairs.ciphers(), scaling);
  const nn::Tensor targets = images_to_tensor(pairs.plains(), scaling);
  const std::size_t per_image = 3 * static_cast<std::size_t>(h) * static_cast<std::size_t>(w);
  // Each pixel's unshared weights only see that pixel's error; summing over
  // positions keeps the per-parameter step independent of image area.
  const double position_weight = static_cast<double>(h) * static_cast<double>(w);

  nn::Optimizer opt(spec, result.net.parameters());
  KeyStream order_rng(options.seed ^ 0x5DEECE66DULL);
  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    opt.set_epoch(epoch);
    const auto order = order_rng.permutation(pairs.size());
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t count = std::min(options.batch_size, order.size() - start);
      nn::Tensor xb({count, 3, static_cast<std::size_t>(h), static_cast<std::size_t>(w)});
      nn::Tensor tb(xb.shape());
      for (std::size_t k = 0; k < count; ++k) {
        const std::size_t src = order[start + k] * per_image;
        std::copy_n(inputs.data().begin() + static_cast<std::ptrdiff_t>(src), per_image,
                    xb.data().begin() + static_cast<std::ptrdiff_t>(k * per_image));
        std::copy_n(targets.data().begin() + static_cast<std::ptrdiff_t>(src), per_image,
                    tb.data().begin() + static_cast<std::ptrdiff_t>(k * per_image));
      }
      result.net.zero_grad();
      const nn::Tensor pred = result.net.forward(xb);
      auto loss = nn::loss_mse(pred, tb);
      loss.value *= position_weight;
      for (auto& g : loss.grad.data()) g *= position_weight;
      if (!std::isfinite(loss.value)) {
        throw Error(ErrorCode::NumericalDivergence, "ITN loss became non-finite at epoch " + std::to_string(epoch));
      }
      result.net.backward(loss.grad);
      for (const auto* p : result.net.parameters()) {
        if (!p->grad.all_finite()) {
          throw Error(ErrorCode::NumericalDivergence, "non-finite ITN gradient at epoch " + std::to_string(epoch));
        }
      }
      opt.step();
      epoch_loss += loss.value * static_cast<double>(count);
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(pairs.size()));
  }
  result.model = collapse_locally_connected(result.net);
  return result;
}

// ---------------------------------------------------------------------------
// Block-wise nibble-affine fit

namespace {

using NibbleVector = Eigen::Matrix<double, BlockAffineModel::kDim, 1>;

NibbleVector to_vector(const NibbleBlock& nb) {
  NibbleVector v;
  for (int i = 0; i < BlockAffineModel::kDim; ++i) v[i] = nb[i];
  return v;
}

}  // namespace

BlockAffineModel fit_itn_blockwise_nibble(const PairedSet& pairs, double ridge) {
  check_ridge(ridge);
  if (pairs.empty()) throw Error(ErrorCode::InsufficientPairs, "no training pairs");
  check_block_dimensions(pairs.ciphers().front());
  const int bw = pairs.width() / BlockGeometry::kWidth;
  const int bh = pairs.height() / BlockGeometry::kHeight;
  const std::size_t blocks = pairs.size() * static_cast<std::size_t>(bw) * static_cast<std::size_t>(bh);
  if (blocks < BlockAffineModel::kDim + 1) {
    throw Error(ErrorCode::InsufficientPairs, "need >= 97 blocks, got " + std::to_string(blocks));
  }
  constexpr int d = BlockAffineModel::kDim;

  std::vector<NibbleVector> xs;
  std::vector<NibbleVector> ys;
  xs.reserve(blocks);
  ys.reserve(blocks);
  NibbleVector mean_x = NibbleVector::Zero();
  NibbleVector mean_y = NibbleVector::Zero();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    for (int by = 0; by < bh; ++by) {
      for (int bx = 0; bx < bw; ++bx) {
        xs.push_back(to_vector(split_nibbles(read_block(pairs.ciphers()[k], bx, by))));
        ys.push_back(to_vector(split_nibbles(read_block(pairs.plains()[k], bx, by))));
        mean_x += xs.back();
        mean_y += ys.back();
      }
    }
  }
  mean_x /= static_cast<double>(blocks);
  mean_y /= static_cast<double>(blocks);

  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(d, d);
  for (std::size_t i = 0; i < blocks; ++i) {
    const NibbleVector xc = xs[i] - mean_x;
    const NibbleVector yc = ys[i] - mean_y;
    cov.noalias() += xc * xc.transpose();
    cross.noalias() += xc * yc.transpose();
  }
  cov.diagonal().array() += ridge;

  Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < kSingularRcond) {
    throw Error(ErrorCode::SingularSystem, "nibble covariance is singular; add ridge or more blocks");
  }
  const Eigen::MatrixXd at = ldlt.solve(cross);
  const Eigen::MatrixXd a = at.transpose();
  const NibbleVector t = mean_y - a * mean_x;

  BlockAffineModel model;
  model.a.resize(static_cast<std::size_t>(d) * d);
  model.t.resize(d);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < d; ++c) model.a[static_cast<std::size_t>(r) * d + c] = a(r, c);
    model.t[r] = t[r];
  }
  return model;
}

// ---------------------------------------------------------------------------
// Application

Image apply_itn(const PixelAffineModel& model, const Image& image) {
  if (image.width() != model.width || image.height() != model.height) {
    throw Error(ErrorCode::DimensionMismatch, "model fitted for " + std::to_string(model.width) + "x" +
                                                  std::to_string(model.height));
  }
  Image out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const auto& m = model.maps[static_cast<std::size_t>(y) * image.width() + x];
      const Rgb e = image.pixel(x, y);
      Rgb r{};
      for (int o = 0; o < 3; ++o) {
        const double v = m[o * 3] * e[0] + m[o * 3 + 1] * e[1] + m[o * 3 + 2] * e[2] + m[9 + o];
        r[o] = round_clamp_u8(v);
      }
      out.set_pixel(x, y, r);
    }
  }
  return out;
}

Image apply_itn(const BlockAffineModel& model, const Image& image) {
  check_block_dimensions(image);
  constexpr int d = BlockAffineModel::kDim;
  Image out(image.width(), image.height());
  for (int by = 0; by < image.height() / BlockGeometry::kHeight; ++by) {
    for (int bx = 0; bx < image.width() / BlockGeometry::kWidth; ++bx) {
      const auto in = split_nibbles(read_block(image, bx, by));
      NibbleBlock res{};
      for (int r = 0; r < d; ++r) {
        double v = model.t[r];
        for (int c = 0; c < d; ++c) v += model.a[static_cast<std::size_t>(r) * d + c] * in[c];
        const double rounded = std::nearbyint(v);
        res[r] = static_cast<std::uint8_t>(rounded < 0.0 ? 0.0 : (rounded > 15.0 ? 15.0 : rounded));
      }
      write_block(out, bx, by, merge_nibbles(res));
    }
  }
  return out;
}

std::vector<Image> apply_itn(const PixelAffineModel& model, std::span<const Image> images) {
  std::vector<Image> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(apply_itn(model, img));
  return out;
}

std::vector<Image> apply_itn(const BlockAffineModel& model, std::span<const Image> images) {
  std::vector<Image> out;
  out.reserve(images.size());
  for (const auto& img : images) out.push_back(apply_itn(model, img));
  return out;
}

// ---------------------------------------------------------------------------
// Checkpoint forms

nn::Sequential to_network(const PixelAffineModel& model) {
  KeyStream unused(0);
  auto layer = nn::make_layer(nn::LayerSpec::locally_connected(3, 3, model.height, model.width),
                              nn::Init::Identity, unused);
  auto params = layer->parameters();
  for (std::size_t p = 0; p < model.maps.size(); ++p) {
    for (int i = 0; i < 9; ++i) params[0]->value[p * 9 + static_cast<std::size_t>(i)] = model.maps[p][i];
    for (int o = 0; o < 3; ++o) params[1]->value[p * 3 + static_cast<std::size_t>(o)] = model.maps[p][9 + o];
  }
  nn::Sequential net;
  net.add(std::move(layer));
  return net;
}

nn::Sequential to_network(const BlockAffineModel& model) {
  KeyStream unused(0);
  auto layer = nn::make_layer(nn::LayerSpec::dense(BlockAffineModel::kDim, BlockAffineModel::kDim),
                              nn::Init::Identity, unused);
  auto params = layer->parameters();
  std::copy(model.a.begin(), model.a.end(), params[0]->value.data().begin());
  std::copy(model.t.begin(), model.t.end(), params[1]->value.data().begin());
  nn::Sequential net;
  net.add(std::move(layer));
  return net;
}

PixelAffineModel pixel_model_from_network(const nn::Sequential& net) {
  if (net.size() != 1 || net.layer(0).kind() != nn::LayerKind::LocallyConnected1x1 ||
      net.layer(0).spec().in_channels != 3 || net.layer(0).spec().out_channels != 3) {
    throw Error(ErrorCode::BadCheckpoint, "expected a single 3->3 LocallyConnected1x1 layer");
  }
  nn::Sequential copy = net;
  const auto& s = copy.layer(0).spec();
  auto params = copy.layer(0).parameters();
  PixelAffineModel model = PixelAffineModel::identity(s.width, s.height);
  for (std::size_t p = 0; p < model.maps.size(); ++p) {
    for (int i = 0; i < 9; ++i) model.maps[p][i] = params[0]->value[p * 9 + static_cast<std::size_t>(i)];
    for (int o = 0; o < 3; ++o) model.maps[p][9 + o] = params[1]->value[p * 3 + static_cast<std::size_t>(o)];
  }
  return model;
}

BlockAffineModel block_model_from_network(const nn::Sequential& net) {
  if (net.size() != 1 || net.layer(0).kind() != nn::LayerKind::Dense ||
      net.layer(0).spec().in_channels != BlockAffineModel::kDim ||
      net.layer(0).spec().out_channels != BlockAffineModel::kDim) {
    throw Error(ErrorCode::BadCheckpoint, "expected a single Dense 96->96 layer");
  }
  nn::Sequential copy = net;
  auto params = copy.layer(0).parameters();
  BlockAffineModel model;
  model.a.assign(params[0]->value.data().begin(), params[0]->value.data().end());
  model.t.assign(params[1]->value.data().begin(), params[1]->value.data().end());
  return model;
}

}  // namespace lienc
