#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "persona_lab/error.hpp"
#include "persona_lab/steer/network.hpp"
#include "persona_lab/steer/trait_neurons.hpp"

using namespace persona_lab;
using namespace persona_lab::steer;

TEST(ToyNetwork, IdentityLayerRectifies) {
  ToyNetwork net(2, {Layer{2, 2, {1, 0, 0, 1}, {0, 0}, Activation::Relu}});
  const std::vector<double> in{1.0, -1.0};
  const auto r = forward(net, in);
  ASSERT_EQ(r.activations.size(), 1u);
  EXPECT_EQ(r.activations[0], (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(r.output, r.activations[0]);
}

TEST(ToyNetwork, LinearLayerPassesNegatives) {
  ToyNetwork net(1, {Layer{1, 1, {2.0}, {0.5}, Activation::Linear}});
  const std::vector<double> in{-1.0};
  EXPECT_EQ(forward(net, in).output[0], -1.5);
}

TEST(ToyNetwork, SeededForwardMatchesHandRolledOracle) {
  const auto net = ToyNetwork::default_random(16, 42);
  EXPECT_EQ(net.num_layers(), 2u);
  EXPECT_EQ(net.layer_width(0), 64u);
  EXPECT_EQ(net.num_neurons(), 128u);
  std::mt19937_64 rng(42);
  for (const auto& x : testkit::random_samples(rng, 20, 16)) {
    const auto got = forward(net, x);
    const auto want = testkit::oracle::forward(net, x);
    ASSERT_EQ(got.activations.size(), want.size());
    for (std::size_t l = 0; l < want.size(); ++l) {
      for (std::size_t u = 0; u < want[l].size(); ++u) {
        EXPECT_NEAR(got.activations[l][u], want[l][u], 1e-12);
      }
    }
  }
}

TEST(ToyNetwork, SameSeedSameWeights) {
  EXPECT_EQ(ToyNetwork::default_random(8, 5), ToyNetwork::default_random(8, 5));
  EXPECT_FALSE(ToyNetwork::default_random(8, 5) == ToyNetwork::default_random(8, 6));
}

TEST(ToyNetwork, RejectsInconsistentShapes) {
  EXPECT_THROW(ToyNetwork(0, {Layer{0, 1, {}, {0}, Activation::Relu}}), InvalidInput);
  EXPECT_THROW(ToyNetwork(2, {}), InvalidInput);
  EXPECT_THROW(ToyNetwork(2, {Layer{3, 1, {1, 1, 1}, {0}, Activation::Relu}}), InvalidInput);
  EXPECT_THROW(ToyNetwork(2, {Layer{2, 1, {1, 1}, {0, 0}, Activation::Relu}}), InvalidInput);
  EXPECT_THROW(ToyNetwork(2, {Layer{2, 2, {1, 1, 1, 1}, {0, 0}, Activation::Relu},
                              Layer{3, 1, {1, 1, 1}, {0}, Activation::Relu}}),
               InvalidInput);
  const auto net = ToyNetwork::default_random(4, 1);
  const std::vector<double> wrong(5, 0.0);
  EXPECT_THROW(forward(net, wrong), InvalidInput);
}

TEST(ToyNetwork, TextRoundTripIsExact) {
  const auto net = ToyNetwork::default_random(7, 99);
  const std::string text = serialize_network(net);
  EXPECT_EQ(text.rfind("persona-lab-network 1 seed=99 input=7 layers=64:relu,64:relu\n", 0), 0u);
  std::istringstream in(text);
  const auto back = read_network(in);
  EXPECT_EQ(back, net);
  EXPECT_EQ(serialize_network(back), text);
}

TEST(ToyNetwork, ReadRejectsMalformedText) {
  std::istringstream bad_header("not-a-network\n");
  EXPECT_THROW(read_network(bad_header), ParseError);
  std::istringstream truncated("persona-lab-network 1 seed=1 input=2 layers=1:relu\n1 2\n");
  EXPECT_THROW(read_network(truncated), ParseError);
  std::istringstream bad_number("persona-lab-network 1 seed=1 input=2 layers=1:relu\n1 x\n0\n");
  EXPECT_THROW(read_network(bad_number), ParseError);
}

TEST(ToyNetwork, SaveAndLoadFile) {
  const auto dir = testkit::fresh_dir("network_file");
  const auto net = ToyNetwork::default_random(3, 2);
  save_network(dir + "/net.txt", net);
  EXPECT_EQ(load_network(dir + "/net.txt"), net);
  EXPECT_THROW(load_network(dir + "/missing.txt"), IoError);
}
