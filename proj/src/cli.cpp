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

#include "trajformer/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "binary.hpp"
#include "trajformer/config.hpp"
#include "trajformer/flow.hpp"
#include "trajformer/scene_io.hpp"
#include "trajformer/synth.hpp"
#include "trajformer/trainer.hpp"

namespace trajformer::cli
{

namespace fs = std::filesystem;

namespace
{

constexpr std::uint64_t kDefaultSeed = 0;

std::uint64_t resolve_seed(const std::optional<std::uint64_t> & seed, std::ostream & out)
{
  if (seed) {
    return *seed;
  }
  out << "seed not given, using " << kDefaultSeed << "\n";
  return kDefaultSeed;
}

std::string num(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Options
{
  // synth
  std::string synth_out;
  std::optional<std::uint64_t> synth_seed;
  std::size_t per_class = 10;
  // train
  std::string train_data, train_config, train_out;
  double alpha = 0.5;
  std::optional<std::size_t> steps, warmup, batch_size;
  std::optional<double> lr;
  std::size_t k_mc = 4;
  std::optional<std::uint64_t> train_seed;
  // predict
  std::string predict_ckpt, predict_scene, predict_out;
  std::size_t predict_k = 12;
  std::optional<std::uint64_t> predict_seed;
  // eval
  std::string eval_ckpt, eval_data, eval_out;
  std::size_t eval_k = 12;
  std::optional<std::uint64_t> eval_seed;
  // params
  std::string params_config;
  // plot
  std::string plot_scene, plot_pred, plot_out;
};

int cmd_synth(const Options & o, std::ostream & out)
{
  const std::uint64_t seed = resolve_seed(o.synth_seed, out);
  const SynthConfig cfg = SynthConfig::with_per_class(o.per_class);
  const auto scenes = synth_scenes(cfg, seed);
  write_dataset(o.synth_out, scenes);
  out << "wrote " << scenes.size() << " scenes to " << o.synth_out << "\n";
  return kExitOk;
}

int cmd_train(const Options & o, std::ostream & out)
{
  TrainConfig tc;
  tc.seed = resolve_seed(o.train_seed, out);
  tc.alpha = o.alpha;
  tc.k_mc = o.k_mc;
  if (o.steps) {
    tc.total_steps = *o.steps;
  }
  tc.warmup_steps = o.warmup ? *o.warmup : std::max<std::size_t>(1, tc.total_steps / 10);
  if (o.batch_size) {
    tc.batch_size = *o.batch_size;
  }
  if (o.lr) {
    tc.peak_lr = *o.lr;
  }
  tc.validate();
  const ModelConfig mc = model_config(o.train_config);
  const Dataset data = load_dataset(o.train_data);
  const std::size_t every = std::max<std::size_t>(1, tc.total_steps / 20);
  TrainResult r = train(data.scenes, mc, tc, [&](const LossRow & row) {
    if (row.step % every == 0 || row.step == 1 || row.step == tc.total_steps) {
      out << "step " << row.step << " nll " << num(row.nll_term) << " prior "
          << num(row.prior_term) << " total " << num(row.total) << "\n";
    }
  });
  save_checkpoint(r.checkpoint, o.train_out);
  detail::write_text_file(fs::path(o.train_out) / "loss.csv", loss_curve_csv(r.curve));
  out << "checkpoint written to " << o.train_out << "\n";
  return kExitOk;
}

int cmd_predict(const Options & o, std::ostream & out)
{
  const std::uint64_t seed = resolve_seed(o.predict_seed, out);
  const Checkpoint ckpt = load_checkpoint(o.predict_ckpt);
  const Scene scene = load_scene(o.predict_scene);
  const Model<float> model = ckpt.model();
  const auto samples = sample(model, scene, o.predict_k, seed);
  save_prediction(
    make_prediction(fs::path(o.predict_scene).stem().string(), scene, samples), o.predict_out);
  out << "wrote " << o.predict_k << " samples per agent to " << o.predict_out << "\n";
  return kExitOk;
}

int cmd_eval(const Options & o, std::ostream & out)
{
  const std::uint64_t seed = resolve_seed(o.eval_seed, out);
  const Checkpoint ckpt = load_checkpoint(o.eval_ckpt);
  const Dataset data = load_dataset(o.eval_data);
  std::vector<std::string> ids;
  for (const auto & n : data.names) {
    ids.push_back(fs::path(n).stem().string());
  }
  const Model<float> model = ckpt.model();
  const EvaluationReport report = evaluate(model, data.scenes, ids, o.eval_k, seed);
  fs::path json_path(o.eval_out);
  fs::path csv_path = json_path;
  csv_path.replace_extension(".csv");
  if (csv_path == json_path) {
    json_path.replace_extension(".json");
  }
  detail::write_text_file(json_path, to_json(report).dump(1) + "\n");
  detail::write_text_file(csv_path, to_csv(report));
  const MetricsReport & a = report.aggregate;
  out << "minADE " << a.min_ade << " minFDE " << a.min_fde << " rF " << a.rf << " DAO " << a.dao
      << " DAC " << a.dac << "\n";
  return kExitOk;
}

int cmd_plot(const Options & o, std::ostream & out)
{
  const Scene scene = load_scene(o.plot_scene);
  const Prediction pred = load_prediction(o.plot_pred);
  detail::write_text_file(o.plot_out, render_svg(scene, pred));
  out << "wrote " << o.plot_out << "\n";
  return kExitOk;
}

}  // namespace

std::string render_svg(const Scene & scene, const Prediction & pred)
{
  const GridGeometry & g = scene.mask.grid;
  const double px = 8.0;  // pixels per meter
  const double width = static_cast<double>(g.width) * g.resolution * px;
  const double height = static_cast<double>(g.height) * g.resolution * px;
  auto sx = [&](double x) { return num((x - g.origin.x) * px); };
  auto sy = [&](double y) { return num(height - (y - g.origin.y) * px); };
  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
       num(height) + "\" viewBox=\"0 0 " + num(width) + " " + num(height) + "\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"" + num(width) + "\" height=\"" + num(height) +
       "\" fill=\"#3a3a3a\"/>\n";
  s += "<g fill=\"#d8d8d8\">\n";
  const double cell = g.resolution * px;
  for (std::size_t r = 0; r < g.height; ++r) {
    std::size_t c = 0;
    while (c < g.width) {
      if (!scene.mask.drivable(r, c)) {
        ++c;
        continue;
      }
      const std::size_t start = c;
      while (c < g.width && scene.mask.drivable(r, c)) {
        ++c;
      }
      s += "<rect x=\"" + num(static_cast<double>(start) * cell) + "\" y=\"" +
           num(height - static_cast<double>(r + 1) * cell) + "\" width=\"" +
           num(static_cast<double>(c - start) * cell) + "\" height=\"" + num(cell) + "\"/>\n";
    }
  }
  s += "</g>\n";
  auto points = [&](const Trajectory & t) {
    std::string p;
    for (std::size_t i = 0; i < t.size(); ++i) {
      p += (i ? " " : "") + sx(t[i].x) + "," + sy(t[i].y);
    }
    return p;
  };
  s += "<g fill=\"none\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-opacity=\"0.6\">\n";
  for (const auto & a : pred.agents) {
    for (const auto & traj : a.samples) {
      const Pose * start = nullptr;
      for (const auto & tr : scene.tracks) {
        if (tr.id == a.id) {
          start = &tr.past.back();
        }
      }
      std::string d;
      if (start != nullptr) {
        d = "M " + sx(start->x) + " " + sy(start->y);
      }
      for (std::size_t i = 0; i < traj.size(); ++i) {
        d += std::string(d.empty() ? "M " : " L ") + sx(traj[i].x) + " " + sy(traj[i].y);
      }
      s += "<path d=\"" + d + "\"/>\n";
    }
  }
  s += "</g>\n";
  for (const auto & tr : scene.tracks) {
    s += "<polyline class=\"past\" points=\"" + points(tr.past) +
         "\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2.5\"/>\n";
    Trajectory gt{tr.past.back()};
    gt.insert(gt.end(), tr.future.begin(), tr.future.end());
    s += "<polyline class=\"ground-truth\" points=\"" + points(gt) +
         "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2.5\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

int run(const std::vector<std::string> & args, std::ostream & out, std::ostream & err)
{
  CLI::App app{"Trajformer: multimodal trajectory prediction", "trajformer"};
  app.require_subcommand(1);
  Options o;

  auto * synth = app.add_subcommand("synth", "Generate a synthetic scene dataset");
  synth->add_option("--out", o.synth_out, "Output directory")->required();
  synth->add_option("--seed", o.synth_seed, "Master seed (default 0)");
  synth->add_option("--per-class", o.per_class, "Scenes per maneuver class")
    ->check(CLI::PositiveNumber);

  const auto names = model_config_names();
  auto * tr = app.add_subcommand("train", "Train a model and write a checkpoint");
  tr->add_option("--data", o.train_data, "Dataset directory")->required();
  tr->add_option("--config", o.train_config, "Model config")->required()->check(CLI::IsMember(names));
  tr->add_option("--out", o.train_out, "Checkpoint directory")->required();
  tr->add_option("--alpha", o.alpha, "Weight of the prior term")->check(CLI::NonNegativeNumber);
  tr->add_option("--steps", o.steps, "Optimizer steps (default 2000)")->check(CLI::PositiveNumber);
  tr->add_option("--seed", o.train_seed, "Master seed (default 0)");
  tr->add_option("--batch-size", o.batch_size, "Scenes per batch (default 128)")
    ->check(CLI::PositiveNumber);
  tr->add_option("--warmup", o.warmup, "Warmup steps (default steps/10)")->check(CLI::PositiveNumber);
  tr->add_option("--lr", o.lr, "Peak learning rate (default 3e-4)")->check(CLI::PositiveNumber);
  tr->add_option("--k-mc", o.k_mc, "Samples per agent for the prior term")->check(CLI::PositiveNumber);

  auto * pr = app.add_subcommand("predict", "Sample futures for one scene");
  pr->add_option("--ckpt", o.predict_ckpt, "Checkpoint directory")->required();
  pr->add_option("--scene", o.predict_scene, "Scene file")->required();
  pr->add_option("--k", o.predict_k, "Samples per agent")->check(CLI::PositiveNumber);
  pr->add_option("--seed", o.predict_seed, "Sampling seed (default 0)");
  pr->add_option("--out", o.predict_out, "Prediction JSON")->required();

  auto * ev = app.add_subcommand("eval", "Evaluate a checkpoint on a dataset");
  ev->add_option("--ckpt", o.eval_ckpt, "Checkpoint directory")->required();
  ev->add_option("--data", o.eval_data, "Dataset directory")->required();
  ev->add_option("--k", o.eval_k, "Samples per agent")->check(CLI::PositiveNumber);
  ev->add_option("--seed", o.eval_seed, "Sampling seed (default 0)");
  ev->add_option("--out", o.eval_out, "Report JSON; the CSV table goes next to it")->required();

  auto * pa = app.add_subcommand("params", "Print the trainable parameter count");
  pa->add_option("--config", o.params_config, "Model config")->required()->check(CLI::IsMember(names));

  auto * pl = app.add_subcommand("plot", "Render a scene and its prediction as SVG");
  pl->add_option("--scene", o.plot_scene, "Scene file")->required();
  pl->add_option("--pred", o.plot_pred, "Prediction JSON")->required();
  pl->add_option("--out", o.plot_out, "SVG output")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError & e) {
    err << "error: " << e.what() << "\n\n";
    const auto used = app.get_subcommands();
    err << (used.empty() ? app.help() : used.front()->help());
    return kExitUsage;
  }

  try {
    if (synth->parsed()) {
      return cmd_synth(o, out);
    }
    if (tr->parsed()) {
      return cmd_train(o, out);
    }
    if (pr->parsed()) {
      return cmd_predict(o, out);
    }
    if (ev->parsed()) {
      return cmd_eval(o, out);
    }
    if (pa->parsed()) {
      out << count_parameters(model_config(o.params_config)) << "\n";
      return kExitOk;
    }
    if (pl->parsed()) {
      return cmd_plot(o, out);
    }
  } catch (const std::exception & e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace trajformer::cli
