#include "mgcnn/checkpoint.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

namespace mgcnn {
namespace {

Checkpoint sample(std::uint64_t seed) {
  ModelConfig c;
  c.nodes = 4;
  c.features = 7;
  c.lookback = 5;
  c.hidden1 = 6;
  c.hidden2 = 3;
  Checkpoint ck;
  ck.params = ModelParams::initialize(c, seed);
  std::mt19937_64 rng(seed);
  ck.params.dense_b = test::random_matrix(kMovements, 1, rng, 1e-3);
  ck.horizon = 4;
  return ck;
}

TEST(Checkpoint, TextRoundTripIsExact) {
  for (std::uint64_t seed = 1; seed < 20; ++seed) {
    const auto ck = sample(seed);
    const auto text = checkpoint_to_text(ck);
    EXPECT_EQ(text.rfind("mgcnn-ckpt-v1\n", 0), 0u);
    const auto back = checkpoint_from_text(text);
    EXPECT_EQ(back.params.config, ck.params.config);
    EXPECT_EQ(back.horizon, 4);
    EXPECT_EQ(back.params.layer1.theta, ck.params.layer1.theta);
    EXPECT_EQ(back.params.layer2.theta, ck.params.layer2.theta);
    EXPECT_EQ(back.params.temporal_weights, ck.params.temporal_weights);
    EXPECT_EQ(back.params.dense_w, ck.params.dense_w);
    EXPECT_EQ(back.params.dense_b, ck.params.dense_b);
    EXPECT_EQ(checkpoint_to_text(back), text);
  }
}

TEST(Checkpoint, FileRoundTripAndMissingPath) {
  test::TempDir dir("ckpt");
  const auto ck = sample(3);
  save_checkpoint(ck, dir.path() / "m.ckpt");
  EXPECT_EQ(checkpoint_to_text(load_checkpoint(dir.path() / "m.ckpt")), checkpoint_to_text(ck));
  try {
    load_checkpoint(dir.path() / "missing.ckpt");
    FAIL() << "expected rejection";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.ckpt"), std::string::npos);
  }
}

TEST(Checkpoint, RejectsCorruption) {
  const auto text = checkpoint_to_text(sample(5));
  EXPECT_THROW(checkpoint_from_text("mgcnn-ckpt-v0\n"), DataError);
  EXPECT_THROW(checkpoint_from_text(text.substr(0, text.size() / 2)), DataError);
  std::string bad_shape = text;
  bad_shape.replace(bad_shape.find("tensor dense_b 12"), 17, "tensor dense_b 11");
  EXPECT_THROW(checkpoint_from_text(bad_shape), DataError);
  std::string bad_value = text;
  const auto pos = bad_value.find("tensor dense_b 12\n") + 18;
  bad_value.insert(pos, "x");
  EXPECT_THROW(checkpoint_from_text(bad_value), DataError);
  std::string missing = text;
  missing.erase(missing.find("tensor dense_b"));
  missing += "end\n";
  EXPECT_THROW(checkpoint_from_text(missing), DataError);
}

}  // namespace
}  // namespace mgcnn
