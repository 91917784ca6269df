#include "lienc/gan_attack.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "lienc/error.hpp"
#include "lienc/image_tensor.hpp"
#include "lienc/keystream.hpp"
#include "lienc/nn/loss.hpp"
#include "lienc/nn/optimizer.hpp"

namespace lienc {

namespace {

constexpr auto kScaling = PixelScaling::symmetric();

void check_finite(double value, const char* what, int epoch) {
  if (!std::isfinite(value)) {
    throw Error(ErrorCode::NumericalDivergence,
                std::string(what) + " became non-finite at epoch " + std::to_string(epoch));
  }
}

void check_grads(nn::Sequential& net, const char* what, int epoch) {
  for (const auto* p : net.parameters()) {
    if (!p->grad.all_finite()) {
      throw Error(ErrorCode::NumericalDivergence,
                  std::string("non-finite ") + what + " gradient at epoch " + std::to_string(epoch));
    }
  }
}

nn::Tensor batch_tensor(const Dataset& ds, std::span<const std::size_t> order, std::size_t start,
                        std::size_t count) {
  std::vector<const Image*> picks;
  picks.reserve(count);
  for (std::size_t k = 0; k < count; ++k) picks.push_back(&ds.images[order[(start + k) % order.size()]]);
  return images_to_tensor(std::span<const Image* const>(picks), kScaling);
}

double mean_of_tensor(const nn::Tensor& t) {
  double s = 0.0;
  for (double v : t.data()) s += v;
  return s / static_cast<double>(t.size());
}

}  // namespace

void GanConfig::validate() const {
  if (epochs < 0 || batch_size == 0 || !(lr > 0.0) || !(beta1 >= 0.0 && beta1 < 1.0) ||
      !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::InvalidParams, "invalid GAN configuration");
  }
  for (const auto& s : generator) s.validate();
  for (const auto& s : discriminator) s.validate();
}

std::vector<nn::LayerSpec> default_generator_specs(int width, int height) {
  return {nn::LayerSpec::locally_connected(3, 3, height, width), nn::LayerSpec::tanh()};
}

std::vector<nn::LayerSpec> default_discriminator_specs(int width, int height) {
  if (width < 4 || height < 4 || width % 4 != 0 || height % 4 != 0) {
    throw Error(ErrorCode::InvalidParams, "default discriminator needs sides divisible by 4");
  }
  const int flat = 16 * (width / 4) * (height / 4);
  return {nn::LayerSpec::conv2d(3, 8, 4, 2, 1), nn::LayerSpec::leaky_relu(0.2),
          nn::LayerSpec::conv2d(8, 16, 4, 2, 1), nn::LayerSpec::leaky_relu(0.2),
          nn::LayerSpec::dense(flat, 1),         nn::LayerSpec::sigmoid()};
}

GanModel train_gan_attack(const Dataset& enc_t1, const Dataset& plain_t2, const GanConfig& cfg) {
  cfg.validate();
  if (enc_t1.empty() || plain_t2.empty()) throw Error(ErrorCode::EmptyDataset, "GAN needs both halves");
  const std::set<std::size_t> t1_ids(enc_t1.ids.begin(), enc_t1.ids.end());
  for (std::size_t id : plain_t2.ids) {
    if (t1_ids.count(id) != 0) {
      throw Error(ErrorCode::DisjointnessViolation, "image id " + std::to_string(id) + " is in both T1 and T2");
    }
  }
  const int w = enc_t1.images.front().width();
  const int h = enc_t1.images.front().height();
  if (!enc_t1.images.front().same_shape(plain_t2.images.front())) {
    throw Error(ErrorCode::DimensionMismatch, "T1 and T2 differ in image size");
  }
  if (cfg.batch_size > enc_t1.size() || cfg.batch_size > plain_t2.size()) {
    throw Error(ErrorCode::InvalidParams, "batch size exceeds a training half");
  }

  KeyStream rng(cfg.seed);
  GanModel model;
  model.width = w;
  model.height = h;
  model.generator = nn::Sequential::from_specs(
      cfg.generator.empty() ? default_generator_specs(w, h) : cfg.generator, cfg.generator_init, rng);
  model.discriminator = nn::Sequential::from_specs(
      cfg.discriminator.empty() ? default_discriminator_specs(w, h) : cfg.discriminator, nn::Init::Normal, rng);

  const nn::AdamSpec adam{cfg.lr, cfg.beta1, cfg.beta2, 1e-8};
  nn::Optimizer opt_g(adam, model.generator.parameters());
  nn::Optimizer opt_d(adam, model.discriminator.parameters());
  auto& G = model.generator;
  auto& D = model.discriminator;

  const std::size_t steps = (enc_t1.size() + cfg.batch_size - 1) / cfg.batch_size;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto order_e = rng.permutation(enc_t1.size());
    const auto order_p = rng.permutation(plain_t2.size());
    GanEpochStats stats{epoch, 0, 0, 0, 0};
    for (std::size_t s = 0; s < steps; ++s) {
      const std::size_t start = s * cfg.batch_size;
      const std::size_t count = std::min(cfg.batch_size, enc_t1.size() - start);
      const nn::Tensor e = batch_tensor(enc_t1, order_e, start, count);
      const nn::Tensor real = batch_tensor(plain_t2, order_p, start, count);

      // Discriminator: real -> 1, fake -> 0.
      D.zero_grad();
      const nn::Tensor d_real = D.forward(real);
      const auto l_real = nn::loss_bce(d_real, 1);
      D.backward(l_real.grad);
      const nn::Tensor fake = G.infer(e);
      const nn::Tensor d_fake = D.forward(fake);
      const auto l_fake = nn::loss_bce(d_fake, 0);
      D.backward(l_fake.grad);
      check_finite(l_real.value + l_fake.value, "discriminator loss", epoch);
      check_grads(D, "discriminator", epoch);
      opt_d.step();

      // Generator: non-saturating -ln D(G(e)).
      G.zero_grad();
      D.zero_grad();
      const nn::Tensor g_out = G.forward(e);
      const nn::Tensor d_g = D.forward(g_out);
      const auto l_g = nn::loss_bce(d_g, 1);
      G.backward(D.backward(l_g.grad));
      check_finite(l_g.value, "generator loss", epoch);
      check_grads(G, "generator", epoch);
      opt_g.step();

      stats.d_loss += l_real.value + l_fake.value;
      stats.g_loss += l_g.value;
      stats.d_real_mean += mean_of_tensor(d_real);
      stats.d_fake_mean += mean_of_tensor(d_fake);
    }
    const double n = static_cast<double>(steps);
    stats.d_loss /= n;
    stats.g_loss /= n;
    stats.d_real_mean /= n;
    stats.d_fake_mean /= n;
    model.curves.push_back(stats);
  }
  D.zero_grad();
  G.zero_grad();
  return model;
}

Dataset gan_reconstruct(const GanModel& model, const Dataset& enc_q) {
  Dataset out;
  for (std::size_t i = 0; i < enc_q.size(); ++i) {
    const Image& img = enc_q.images[i];
    if (img.width() != model.width || img.height() != model.height) {
      throw Error(ErrorCode::DimensionMismatch, "generator expects " + std::to_string(model.width) + "x" +
                                                    std::to_string(model.height));
    }
    const Image* one[] = {&img};
    const auto rec = tensor_to_images(model.generator.infer(images_to_tensor(std::span<const Image* const>(one), kScaling)),
                                      kScaling);
    out.add(rec.front(), enc_q.roles[i], enc_q.ids[i]);
  }
  return out;
}

}  // namespace lienc
