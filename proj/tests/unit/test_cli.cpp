// Copyright 2026 The Trajformer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "test_support.hpp"
#include "trajformer/cli.hpp"
#include "trajformer/scene_io.hpp"
#include "trajformer/trainer.hpp"

namespace trajformer
{
namespace
{

namespace fs = std::filesystem;

struct Result
{
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string> & args)
{
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count(const std::string & s, const std::string & needle)
{
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) {
    ++n;
  }
  return n;
}

TEST(Cli, ParamsPrintsTheCount)
{
  auto r = run({"params", "--config", "tf12-ref"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("159237"), std::string::npos) << r.out;
  EXPECT_EQ(run({"params", "--config", "nope"}).code, cli::kExitUsage);
}

TEST(Cli, UsageErrorsExitWithTwo)
{
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"train", "--config", "tf12-ref"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"synth", "--out", "x", "--per-class", "-3"}).code, cli::kExitUsage);
  auto r = run({"predict", "--k", "3"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, RuntimeErrorsExitWithOne)
{
  const auto dir = testing::scratch_dir("cli_missing");
  auto r = run({"train", "--data", (dir / "none").string(), "--config", "tf12-ref", "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  EXPECT_FALSE(r.err.empty());
  EXPECT_EQ(run({"eval", "--ckpt", dir.string(), "--data", dir.string(), "--out", (dir / "m.json").string()}).code, cli::kExitRuntime);
}

TEST(Cli, SynthIsByteIdenticalForASeed)
{
  const auto a = testing::scratch_dir("cli_synth_a");
  const auto b = testing::scratch_dir("cli_synth_b");
  const auto c = testing::scratch_dir("cli_synth_c");
  ASSERT_EQ(run({"synth", "--out", a.string(), "--seed", "3", "--per-class", "2"}).code, 0);
  ASSERT_EQ(run({"synth", "--out", b.string(), "--seed", "3", "--per-class", "2"}).code, 0);
  ASSERT_EQ(run({"synth", "--out", c.string(), "--seed", "4", "--per-class", "2"}).code, 0);
  const auto bytes = testing::directory_bytes(a);
  EXPECT_EQ(bytes.size(), 9u);
  EXPECT_EQ(bytes, testing::directory_bytes(b));
  EXPECT_NE(bytes, testing::directory_bytes(c));
  EXPECT_EQ(load_dataset(a).size(), 8u);
}

TEST(Cli, MissingSeedIsReported)
{
  const auto a = testing::scratch_dir("cli_seed");
  auto r = run({"synth", "--out", a.string(), "--per-class", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE((r.out + r.err).find("seed not given, using 0"), std::string::npos);
}

TEST(Cli, TrainPredictEvalPlotPipeline)
{
  const auto root = testing::scratch_dir("cli_pipeline");
  const auto data = root / "data";
  const auto ckpt = root / "ckpt";
  ASSERT_EQ(run({"synth", "--out", data.string(), "--seed", "1", "--per-class", "1"}).code, 0);
  auto tr = run(
    {"train", "--data", data.string(), "--config", "tf12-ref", "--out", ckpt.string(), "--steps", "3",
     "--batch-size", "2", "--seed", "2"});
  ASSERT_EQ(tr.code, 0) << tr.err;
  EXPECT_TRUE(fs::exists(ckpt / kManifestName));
  std::ifstream loss(ckpt / "loss.csv");
  std::string header;
  std::getline(loss, header);
  EXPECT_EQ(header, "step,nll_term,prior_term,total,lr");
  EXPECT_EQ(load_checkpoint(ckpt).step, 3u);

  const auto scene = data / "scene_0002.json";
  const auto pred = root / "pred.json";
  auto pr = run({"predict", "--ckpt", ckpt.string(), "--scene", scene.string(), "--k", "4", "--seed", "1", "--out", pred.string()});
  ASSERT_EQ(pr.code, 0) << pr.err;
  const Prediction p = load_prediction(pred.string());
  EXPECT_EQ(p.scene_id, "scene_0002");
  const Scene s = load_scene(scene);
  ASSERT_EQ(p.agents.size(), s.agent_count());
  EXPECT_EQ(p.agents[0].samples.size(), 4u);
  EXPECT_EQ(p.agents[0].id, s.tracks[0].id);

  const auto metrics = root / "metrics.json";
  auto ev = run({"eval", "--ckpt", ckpt.string(), "--data", data.string(), "--k", "3", "--seed", "1", "--out", metrics.string()});
  ASSERT_EQ(ev.code, 0) << ev.err;
  std::ifstream mj(metrics);
  const auto j = nlohmann::json::parse(mj);
  EXPECT_EQ(j["per_scene"].size(), 4u);
  EXPECT_EQ(j["aggregate"]["k"], 3);
  EXPECT_TRUE(fs::exists(root / "metrics.csv"));

  const auto svg = root / "plot.svg";
  auto pl = run({"plot", "--scene", scene.string(), "--pred", pred.string(), "--out", svg.string()});
  ASSERT_EQ(pl.code, 0) << pl.err;
  std::ifstream in(svg);
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text.rfind("<?xml", 0), 0u);
  EXPECT_EQ(count(text, "<svg "), 1u);
  EXPECT_NE(text.find("</svg>"), std::string::npos);
  EXPECT_EQ(count(text, "<path"), 4 * s.agent_count());
  EXPECT_EQ(count(text, "<polyline"), 2 * s.agent_count());
  EXPECT_EQ(text, cli::render_svg(s, p));
}

}  // namespace
}  // namespace trajformer
