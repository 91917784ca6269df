#include <cmath>

#include <gtest/gtest.h>

#include "gradcheck.hpp"
#include "lienc/error.hpp"
#include "lienc/keystream.hpp"
#include "lienc/nn/checkpoint.hpp"
#include "lienc/nn/loss.hpp"
#include "lienc/nn/optimizer.hpp"
#include "lienc/nn/sequential.hpp"

namespace lienc::nn {
namespace {

Tensor random_input(const Shape& shape, std::uint64_t seed) {
  KeyStream rng(seed);
  Tensor t(shape);
  for (double& v : t.data()) v = rng.next_unit() * 2 - 1;
  return t;
}

TEST(GradCheck, EveryLayerAndLoss) {
  for (const auto& r : testing::gradient_suite()) EXPECT_LT(r.max_rel_error, 1e-4) << r.what;
}

TEST(Tensor, ShapeChecks) {
  Tensor t({2, 3});
  EXPECT_EQ(t.size(), 6u);
  EXPECT_THROW(expect_shape(t, {3, 2}, "t"), Error);
  EXPECT_THROW(Tensor({2, 2}, std::vector<double>(3)), Error);
  EXPECT_EQ(t.reshaped({6}).shape(), (Shape{6}));
  t[1] = std::nan("");
  EXPECT_FALSE(t.all_finite());
}

TEST(Layers, SpecValidation) {
  EXPECT_THROW(LayerSpec::conv2d(0, 3, 3, 1, 1).validate(), Error);
  EXPECT_THROW(LayerSpec::locally_connected(3, 3, 0, 4).validate(), Error);
  EXPECT_NO_THROW(LayerSpec::dense(4, 1).validate());
}

TEST(Layers, LocallyConnectedIdentityInit) {
  KeyStream rng(1);
  auto lc = make_layer(LayerSpec::locally_connected(3, 3, 4, 5), Init::Identity, rng);
  const Tensor x = random_input({2, 3, 4, 5}, 9);
  EXPECT_EQ(lc->forward(x), x);
}

TEST(Layers, NormalInitStatistics) {
  KeyStream rng(2);
  auto conv = make_layer(LayerSpec::conv2d(16, 16, 4, 2, 1), Init::Normal, rng);
  const auto params = conv->parameters();
  double s = 0, s2 = 0;
  for (double v : params[0]->value.data()) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(params[0]->value.size());
  EXPECT_NEAR(s / n, 0.0, 0.002);
  EXPECT_NEAR(std::sqrt(s2 / n), 0.02, 0.002);
  for (double v : params[1]->value.data()) EXPECT_EQ(v, 0.0);
}

TEST(Layers, ConvOutputExtent) {
  KeyStream rng(3);
  auto conv = make_layer(LayerSpec::conv2d(3, 8, 4, 2, 1), Init::Normal, rng);
  EXPECT_EQ(conv->forward(Tensor({1, 3, 32, 32})).shape(), (Shape{1, 8, 16, 16}));
  EXPECT_THROW(conv->forward(Tensor({1, 2, 32, 32})), Error);
}

TEST(Layers, SigmoidStableAtExtremes) {
  auto s = make_layer(LayerSpec::sigmoid(), Init::Normal, *std::make_unique<KeyStream>(0));
  const Tensor out = s->forward(Tensor({1, 2}, std::vector<double>{-1000.0, 1000.0}));
  EXPECT_TRUE(out.all_finite());
  EXPECT_GT(out[0], 0.0 - 1e-300);
  EXPECT_LE(out[1], 1.0);
}

TEST(Loss, Examples) {
  EXPECT_NEAR(loss_bce(0.5, 0).value, std::log(2.0), 1e-15);
  EXPECT_NEAR(loss_bce(0.5, 1).value, std::log(2.0), 1e-15);
  const auto extreme = loss_bce(0.0, 1);
  EXPECT_TRUE(std::isfinite(extreme.value));
  EXPECT_TRUE(std::isfinite(extreme.grad));
  EXPECT_GT(extreme.value, 20.0);
  const auto m = loss_mse(Tensor({2}, std::vector<double>{1, 3}), Tensor({2}, std::vector<double>{0, 0}));
  EXPECT_DOUBLE_EQ(m.value, 5.0);
}

TEST(Optimizer, PlainSgdStep) {
  Parameter p({3});
  p.value = Tensor({3}, std::vector<double>{1, -2, 3});
  p.grad = p.value;
  Optimizer opt(SgdSpec{1.0, 0.0, 0.0, {}}, {&p});
  opt.step();
  for (double v : p.value.data()) EXPECT_EQ(v, 0.0);
}

TEST(Optimizer, MomentumAndDecay) {
  Parameter p({1});
  p.value[0] = 2.0;
  p.grad[0] = 1.0;
  Optimizer opt(SgdSpec{0.1, 0.9, 0.5, {}}, {&p});
  opt.step();  // v = 1 + 0.5*2 = 2 ; w = 2 - 0.2
  EXPECT_NEAR(p.value[0], 1.8, 1e-15);
  opt.step();  // v = 0.9*2 + 1 + 0.5*1.8 = 3.7 ; w = 1.8 - 0.37
  EXPECT_NEAR(p.value[0], 1.43, 1e-15);
}

TEST(Optimizer, StepSchedule) {
  SgdSpec s{0.1, 0.9, 5e-4, {{40, 0.1}, {60, 0.1}}};
  EXPECT_DOUBLE_EQ(s.lr_at(0), 0.1);
  EXPECT_DOUBLE_EQ(s.lr_at(39), 0.1);
  EXPECT_NEAR(s.lr_at(40), 0.01, 1e-15);
  EXPECT_NEAR(s.lr_at(59), 0.01, 1e-15);
  EXPECT_NEAR(s.lr_at(60), 0.001, 1e-15);
}

TEST(Optimizer, AdamFirstStep) {
  Parameter p({4});
  p.grad.fill(1.0);
  Optimizer opt(AdamSpec{}, {&p});
  opt.step();
  for (double v : p.value.data()) EXPECT_NEAR(v, -0.0002 / (1.0 + 1e-8), 1e-15);
  EXPECT_EQ(opt.steps_taken(), 1);
}

TEST(Optimizer, RejectsBadSpecs) {
  EXPECT_THROW(validate(SgdSpec{-1.0, 0, 0, {}}), Error);
  EXPECT_THROW(validate(AdamSpec{0.001, 1.0, 0.999, 1e-8}), Error);
}

TEST(Sequential, LinearStackCollapsesToAffine) {
  KeyStream rng(11);
  auto net = Sequential::from_specs({LayerSpec::dense(5, 4), LayerSpec::dense(4, 6), LayerSpec::dense(6, 3)},
                                    Init::Normal, rng);
  for (auto* p : net.parameters())
    for (double& v : p->value.data()) v = rng.next_unit() - 0.5;
  // Compose W3 W2 W1 and the bias chain explicitly.
  std::vector<std::vector<double>> a(5, std::vector<double>(5, 0.0));
  for (int i = 0; i < 5; ++i) a[i][i] = 1.0;
  std::vector<double> b(5, 0.0);
  for (std::size_t l = 0; l < net.size(); ++l) {
    const auto params = net.layer(l).parameters();
    const auto& s = net.layer(l).spec();
    const auto& w = params[0]->value;
    const auto& bias = params[1]->value;
    std::vector<std::vector<double>> na(s.out_channels, std::vector<double>(5, 0.0));
    std::vector<double> nb(s.out_channels, 0.0);
    for (int o = 0; o < s.out_channels; ++o) {
      nb[o] = bias[o];
      for (int i = 0; i < s.in_channels; ++i) {
        nb[o] += w[o * s.in_channels + i] * b[i];
        for (int k = 0; k < 5; ++k) na[o][k] += w[o * s.in_channels + i] * a[i][k];
      }
    }
    a = na;
    b = nb;
  }
  const Tensor x = random_input({7, 5}, 12);
  const Tensor y = net.infer(x);
  for (int n = 0; n < 7; ++n)
    for (int o = 0; o < 3; ++o) {
      double v = b[o];
      for (int k = 0; k < 5; ++k) v += a[o][k] * x[n * 5 + k];
      EXPECT_NEAR(y[n * 3 + o], v, 1e-9);
    }
}

TEST(Sequential, DeepCopyAndDeterminism) {
  auto train = [](std::uint64_t seed) {
    KeyStream rng(seed);
    auto net = Sequential::from_specs({LayerSpec::conv2d(3, 4, 3, 1, 1), LayerSpec::leaky_relu(0.2),
                                       LayerSpec::dense(4 * 6 * 6, 1), LayerSpec::sigmoid()},
                                      Init::Normal, rng);
    Optimizer opt(AdamSpec{}, net.parameters());
    for (int step = 0; step < 20; ++step) {
      net.zero_grad();
      const auto out = net.forward(random_input({4, 3, 6, 6}, seed * 100 + step));
      net.backward(loss_bce(out, step % 2).grad);
      opt.step();
    }
    return net;
  };
  const auto a = train(5);
  const auto b = train(5);
  Sequential copy = a;
  const Tensor probe = random_input({2, 3, 6, 6}, 77);
  EXPECT_EQ(a.infer(probe), b.infer(probe));
  EXPECT_EQ(copy.infer(probe), a.infer(probe));
  copy.parameters()[0]->value[0] += 1.0;
  EXPECT_NE(copy.infer(probe), a.infer(probe));
}

TEST(Checkpoint, RoundTrip) {
  KeyStream rng(21);
  auto net = Sequential::from_specs({LayerSpec::locally_connected(3, 2, 4, 4), LayerSpec::tanh(),
                                     LayerSpec::conv2d(2, 3, 3, 1, 1), LayerSpec::leaky_relu(0.1),
                                     LayerSpec::dense(48, 2), LayerSpec::sigmoid()},
                                    Init::Normal, rng);
  const auto bytes = save_checkpoint(net, Codec::NibbleBlock);
  ASSERT_GE(bytes.size(), 16u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "LIEN");
  const auto ck = load_checkpoint(bytes);
  EXPECT_EQ(ck.codec, Codec::NibbleBlock);
  EXPECT_EQ(ck.net.specs(), net.specs());
  const Tensor probe = random_input({2, 3, 4, 4}, 4);
  EXPECT_EQ(ck.net.infer(probe), net.infer(probe));
  EXPECT_EQ(save_checkpoint(ck.net, Codec::NibbleBlock), bytes);
}

TEST(Checkpoint, RejectsMalformed) {
  KeyStream rng(1);
  auto net = Sequential::from_specs({LayerSpec::dense(2, 2)}, Init::Normal, rng);
  auto bytes = save_checkpoint(net);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  EXPECT_THROW(load_checkpoint(bad_magic), Error);
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  EXPECT_THROW(load_checkpoint(truncated), Error);
  auto trailing = bytes;
  trailing.push_back(0);
  EXPECT_THROW(load_checkpoint(trailing), Error);
}

}  // namespace
}  // namespace lienc::nn
