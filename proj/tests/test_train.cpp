#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "helpers.hpp"
#include "pgorder/error.hpp"
#include "pgorder/evaluation.hpp"
#include "pgorder/nn/checkpoint.hpp"
#include "pgorder/nn/train.hpp"
#include "pgorder/pipeline.hpp"

using namespace pgorder;
using namespace pgorder::nn;

namespace {

TrainConfig tiny_config() {
  TrainConfig c;
  c.model.hidden = 16;
  c.model.embed_dim = 16;
  c.model.steps = 1;
  c.model.entity_buckets = 64;
  c.model.seed = 3;
  c.batch_size = 4;
  c.learning_rate = 5e-3;
  c.epochs = 3;
  return c;
}

std::vector<GraphSample> samples(const std::vector<Story>& stories, const ModelConfig& config) {
  const HashEmbedder embedder(config.embed_dim, config.embed_seed);
  std::vector<GraphSample> out;
  for (std::size_t i = 0; i < stories.size(); ++i) {
    out.push_back(prepare_sample(shuffle_story(stories[i], 100 + i), embedder, config));
  }
  return out;
}

bool bitwise_equal(const ParamStore<float>& a, const ParamStore<float>& b) {
  if (a.entries().size() != b.entries().size()) return false;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    const auto& x = a.entries()[i];
    const auto& y = b.entries()[i];
    if (x.name != y.name || !x.value.same_shape(y.value)) return false;
    if (std::memcmp(x.value.data.data(), y.value.data.data(), x.value.data.size() * sizeof(float)) != 0) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("training is deterministic for a seed") {
  const auto config = tiny_config();
  const auto data = samples(generate_synthetic(24, 4, 30, 2), config.model);
  std::span<const GraphSample> all(data);
  const auto a = train(all.subspan(0, 20), all.subspan(20), config);
  const auto b = train(all.subspan(0, 20), all.subspan(20), config);
  REQUIRE(a.history.size() == 3);
  CHECK(a.history == b.history);
  CHECK(bitwise_equal(a.params, b.params));
  auto other = config;
  other.model.seed = 4;
  CHECK(train(all.subspan(0, 20), all.subspan(20), other).history != a.history);
}

TEST_CASE("training preconditions and divergence") {
  auto config = tiny_config();
  const auto data = samples(generate_synthetic(6, 4, 30, 2), config.model);
  std::span<const GraphSample> all(data);
  CHECK_THROWS_AS(train(all.subspan(0, 0), all, config), std::invalid_argument);
  CHECK_THROWS_AS(train(all, all.subspan(0, 0), config), std::invalid_argument);
  config.learning_rate = 1e300;
  config.clip_norm = 0.0;
  CHECK_THROWS_WITH_AS(train(all, all, config), doctest::Contains("epoch 1, batch 1"), Error);
}

TEST_CASE("memorizing a handful of stories") {
  auto config = tiny_config();
  config.model.hidden = 32;
  config.model.embed_dim = 32;
  config.model.steps = 2;
  config.epochs = 200;
  config.batch_size = 10;
  config.learning_rate = 1e-2;
  config.target_val_pmr = 1.0;
  const auto data = samples(generate_synthetic(10, 5, 100, 8), config.model);
  const auto ckpt = train(data, data, config);
  CHECK(ckpt.history.back().val_pmr == 1.0);
  CHECK(evaluate_samples(data, ckpt.params, config.model.steps, DecodeMode::greedy()).pmr == 1.0);
}

TEST_CASE("checkpoint round trip") {
  auto config = tiny_config();
  Checkpoint c{config.model, ParamStore<float>::initialize(config.model, 9), 4, {{1, 4.5, 0.1, 0.0}, {2, 3.25, 0.5, 0.25}}};
  std::stringstream buf;
  write_checkpoint(buf, c);
  const std::string bytes = buf.str();
  std::istringstream in(bytes);
  const auto back = read_checkpoint(in);
  CHECK(bitwise_equal(back.params, c.params));
  CHECK(back.config == c.config);
  CHECK(back.epoch == 4);
  CHECK(back.history == c.history);

  const auto path = std::filesystem::temp_directory_path() / "pgorder_test.ckpt";
  save_checkpoint(path, c);
  CHECK(bitwise_equal(load_checkpoint(path).params, c.params));
  std::filesystem::remove(path);

  for (std::size_t cut : {std::size_t{3}, std::size_t{12}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream truncated(bytes.substr(0, cut));
    CHECK_THROWS_AS(read_checkpoint(truncated), Error);
  }
  std::string other_version = bytes;
  other_version[8] = 2;
  std::istringstream versioned(other_version);
  CHECK_THROWS_WITH_AS(read_checkpoint(versioned), doctest::Contains("version 2"), Error);
  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream magic(bad_magic);
  CHECK_THROWS_AS(read_checkpoint(magic), Error);
}

TEST_CASE("checkpoints guard their graph variant") {
  Checkpoint c;
  c.config.variant = GraphVariant::PG2;
  CHECK_NOTHROW(require_compatible(c, GraphVariant::PG2, false));
  CHECK_THROWS_AS(require_compatible(c, GraphVariant::FullyConnected, false), Error);
  CHECK_NOTHROW(require_compatible(c, GraphVariant::FullyConnected, true));
}

TEST_CASE("oracle and random orderers") {
  const auto stories = generate_synthetic(600, 5, 100, 12);
  const auto oracle = evaluate(OracleOrderer{}, stories, 1);
  CHECK(oracle.mean_tau == 1.0);
  CHECK(oracle.pmr == 1.0);
  const auto random = evaluate(RandomOrderer{3}, stories, 1);
  CHECK(std::abs(random.mean_tau) <= 0.05);
  // 600 stories at p = 1/120: mean 5, so a count within [0, 15] is well inside 4 sd.
  CHECK(random.pmr <= 15.0 / 600.0);
  CHECK(evaluate(RandomOrderer{3}, stories, 1).stories.size() == 600);
}

TEST_CASE("model orderer handles single sentences and dimension mismatches") {
  auto config = tiny_config();
  Checkpoint c{config.model, ParamStore<float>::initialize(config.model, 1), 0, {}};
  ModelOrderer orderer(c, std::make_shared<HashEmbedder>(16, 0), DecodeMode::beam(8));
  CHECK(orderer.order(present_as_stored(testing::make_story("one", {"Alone."}))).rank == std::vector<int>{0});
  const auto story = testing::make_story("two", {"First, Tom ran.", "Finally, he slept."});
  CHECK(is_permutation(orderer.order(present_as_stored(story)).rank));
  ModelOrderer wrong(c, std::make_shared<HashEmbedder>(32, 0), DecodeMode::greedy());
  CHECK_THROWS_WITH_AS(wrong.order(present_as_stored(story)), doctest::Contains("two"), Error);
}
