#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lienc/image.hpp"
#include "lienc/nn/layers.hpp"
#include "lienc/nn/sequential.hpp"

namespace lienc {

struct GanConfig {
  int epochs = 100;
  double lr = 0.0002;
  double beta1 = 0.5;
  double beta2 = 0.999;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  /// Empty means the default for the image size (see default_generator_specs).
  std::vector<nn::LayerSpec> generator;
  nn::Init generator_init = nn::Init::Normal;
  /// Empty means default_discriminator_specs.
  std::vector<nn::LayerSpec> discriminator;

  void validate() const;
};

/// LocallyConnected1x1 3->3 followed by Tanh.
std::vector<nn::LayerSpec> default_generator_specs(int width, int height);

/// Conv 3->8 k4 s2 p1, LeakyReLU(0.2), Conv 8->16 k4 s2 p1, LeakyReLU(0.2),
/// Dense -> 1, Sigmoid. Needs width and height divisible by 4.
std::vector<nn::LayerSpec> default_discriminator_specs(int width, int height);

struct GanEpochStats {
  int epoch = 0;
  double d_loss = 0.0;  // real + fake BCE, averaged over the epoch's batches
  double g_loss = 0.0;
  double d_real_mean = 0.0;
  double d_fake_mean = 0.0;
};

struct GanModel {
  nn::Sequential generator;
  nn::Sequential discriminator;
  std::vector<GanEpochStats> curves;
  int width = 0;
  int height = 0;
};

/// Adversarial training on unpaired data: ciphertexts E(T1) and plain images
/// T2 that share no image id. Throws DisjointnessViolation,
/// NumericalDivergence, InvalidParams or DimensionMismatch.
GanModel train_gan_attack(const Dataset& enc_t1, const Dataset& plain_t2, const GanConfig& cfg);

/// Q' = G(E(Q)) mapped back to 8 bits. Keeps ids and roles.
Dataset gan_reconstruct(const GanModel& model, const Dataset& enc_q);

}  // namespace lienc
