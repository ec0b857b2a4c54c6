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

// Acceptance checks. Usage: trajformer_acceptance [c1 ... c9]
// With no arguments every criterion runs. One PASS/FAIL line per criterion;
// the exit code is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "op_cases.hpp"
#include "test_support.hpp"
#include "trajformer/cli.hpp"
#include "trajformer/encoder.hpp"
#include "trajformer/errors.hpp"
#include "trajformer/flow.hpp"
#include "trajformer/metrics.hpp"
#include "trajformer/objective.hpp"
#include "trajformer/prediction.hpp"
#include "trajformer/scene_io.hpp"
#include "trajformer/synth.hpp"
#include "trajformer/trainer.hpp"

namespace trajformer::acceptance
{
namespace
{

namespace fs = std::filesystem;
using testing::random_tensor;
using testing::tiny_config;

// Pinned tolerances and budgets.
constexpr double kGradStep = 1e-5;
constexpr double kGradTol = 1e-4;
constexpr int kGradConfigs = 100;
constexpr double kInverseTol = 1e-9;
constexpr int kInverseDraws = 10000;
constexpr double kJacobianRelTol = 1e-5;
constexpr int kJacobianCases = 1000;
constexpr double kMetricTol = 1e-9;
constexpr int kMetricCases = 100;
constexpr double kEquivarianceTol = 1e-6;
constexpr int kEquivarianceScenes = 100;
constexpr std::size_t kOverfitSteps = 500;
constexpr double kOverfitNllDrop = 2.0;
constexpr double kOverfitAde = 0.5;
constexpr std::size_t kAdmissibilitySteps = 1000;
constexpr std::size_t kAdmissibilityBatch = 32;
constexpr std::size_t kAdmissibilityK = 12;
constexpr double kBudgetTolerance = 0.10;
constexpr double kLog2Pi = 1.8378770664093453;

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char * f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

double normal(Rng & rng)
{
  return std::normal_distribution<double>()(rng);
}

// ---------------------------------------------------------------- c1
Outcome gradient_correctness()
{
  Rng rng(101);
  double op_worst = 0.0;
  std::string op_name;
  for (const auto & family : testing::op_families()) {
    for (int rep = 0; rep < kGradConfigs; ++rep) {
      auto c = family.make(rng);
      const double e = testing::gradcheck(c.inputs, c.f, kGradStep);
      if (e > op_worst) {
        op_worst = e;
        op_name = family.name;
      }
    }
  }
  double loss_worst = 0.0;
  int loss_failures = 0;
  double refined_worst = 0.0;
  for (int rep = 0; rep < kGradConfigs; ++rep) {
    const std::size_t layers = 1 + rep % 2;
    auto model = Model<double>::initialized(tiny_config(layers, 1 + (rep / 2) % 2), 1000 + rep);
    const auto scenes = synth_scenes(SynthConfig::with_per_class(1), 500 + rep);
    const std::vector<const Scene *> batch{&scenes[rep % 4], &scenes[(rep + 1) % 4]};
    const ObjectiveConfig cfg{0.5, 2};
    ParameterSet<double> grads = model.params();
    grads.zero_grad();
    total_loss(model, batch, cfg, rep, &grads);
    std::vector<std::pair<std::size_t, std::size_t>> coords;
    for (std::size_t p = 0; p < model.params().size(); ++p) {
      std::uniform_int_distribution<std::size_t> pick(0, model.params()[p].value.size() - 1);
      for (int c = 0; c < 4; ++c) {
        coords.emplace_back(p, pick(rng));
      }
    }
    auto check = [&](double h) {
      std::vector<double> analytic;
      std::vector<double> numeric;
      for (auto [p, i] : coords) {
        auto & v = model.params()[p].value;
        const double x0 = v[i];
        v[i] = x0 + h;
        const double up = total_loss(model, batch, cfg, rep).total;
        v[i] = x0 - h;
        const double down = total_loss(model, batch, cfg, rep).total;
        v[i] = x0;
        numeric.push_back((up - down) / (2.0 * h));
        analytic.push_back(grads[p].grad[i]);
      }
      return testing::relative_error(analytic, numeric);
    };
    const double e = check(kGradStep);
    loss_worst = std::max(loss_worst, e);
    if (e > kGradTol) {
      ++loss_failures;
      // Reported only; does not change the verdict.
      refined_worst = std::max(refined_worst, check(kGradStep / 100));
    }
  }
  Outcome o;
  o.pass = op_worst <= kGradTol && loss_failures == 0;
  o.detail = "ops worst " + fmt("%.2e", op_worst) + " (" + op_name + "), total_loss worst " +
             fmt("%.2e", loss_worst) + ", " + std::to_string(loss_failures) + "/" +
             std::to_string(kGradConfigs) + " loss configs above " + fmt("%.0e", kGradTol);
  if (loss_failures > 0) {
    o.detail += " at h=1e-5 (same configs at h=1e-7: worst " + fmt("%.2e", refined_worst) + ")";
  }
  return o;
}

// ---------------------------------------------------------------- c2
Outcome flow_bijectivity()
{
  auto model = Model<double>::initialized(tiny_config(), 7);
  const std::size_t latent = model.config().encoder.latent_dim;
  const std::size_t steps = model.config().flow.future_len;
  Rng rng(202);
  const std::size_t rows = 100;
  auto random_pasts = [&](std::size_t n) {
    std::vector<Trajectory> p(n);
    for (auto & t : p) {
      const Pose a{5.0 * normal(rng), 5.0 * normal(rng)};
      t = {a, Pose{a.x + normal(rng), a.y + normal(rng)}};
    }
    return p;
  };
  double inv_worst = 0.0;
  for (int b = 0; b < kInverseDraws / static_cast<int>(rows); ++b) {
    Tape<double> tape;
    auto w = bind(tape, model, false);
    auto codes = tape.constant(random_tensor(rng, {rows, latent}, -2, 2));
    auto ctx = make_flow_context(w, codes, random_pasts(rows));
    Tensor<double> z(Shape{rows, 2 * steps});
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = normal(rng);
    }
    auto r = rollout(ctx, z);
    std::vector<Trajectory> fut(rows);
    for (const auto & p : r.positions) {
      for (std::size_t i = 0; i < rows; ++i) {
        fut[i].push_back(Pose{p.value().at(i, 0), p.value().at(i, 1)});
      }
    }
    auto tf = teacher_forced(ctx, fut);
    for (std::size_t i = 0; i < z.size(); ++i) {
      inv_worst = std::max(inv_worst, std::abs(tf.z[i] - z[i]));
    }
  }
  double jac_worst = 0.0;
  const double h = 1e-6;
  for (int b = 0; b < kJacobianCases / static_cast<int>(rows); ++b) {
    Tape<double> tape;
    auto w = bind(tape, model, false);
    auto codes = tape.constant(random_tensor(rng, {rows, latent}, -2, 2));
    auto ctx = make_flow_context(w, codes, random_pasts(rows));
    auto st = decode_step(ctx, tape.constant(ctx.anchor), tape.constant(ctx.prev2), initial_hidden(ctx));
    Tensor<double> z(Shape{rows, 2});
    for (std::size_t i = 0; i < z.size(); ++i) {
      z[i] = normal(rng);
    }
    auto lp = step_log_density(st, tape.constant(z)).value();
    Tensor<double> jac[2][2];
    for (std::size_t c = 0; c < 2; ++c) {
      Tensor<double> up = z;
      Tensor<double> down = z;
      for (std::size_t i = 0; i < rows; ++i) {
        up.at(i, c) += h;
        down.at(i, c) -= h;
      }
      auto su = flow_forward(st, tape.constant(up)).value();
      auto sd = flow_forward(st, tape.constant(down)).value();
      for (std::size_t r = 0; r < 2; ++r) {
        jac[r][c] = Tensor<double>(Shape{rows});
        for (std::size_t i = 0; i < rows; ++i) {
          jac[r][c][i] = (su.at(i, r) - sd.at(i, r)) / (2.0 * h);
        }
      }
    }
    for (std::size_t i = 0; i < rows; ++i) {
      const double det = jac[0][0][i] * jac[1][1][i] - jac[0][1][i] * jac[1][0][i];
      const double zz = z.at(i, 0) * z.at(i, 0) + z.at(i, 1) * z.at(i, 1);
      const double expected = -0.5 * zz - kLog2Pi - std::log(std::abs(det));
      jac_worst = std::max(jac_worst, std::abs(lp[i] - expected) / std::max(std::abs(expected), 1e-12));
    }
  }
  Outcome o;
  o.pass = inv_worst <= kInverseTol && jac_worst <= kJacobianRelTol;
  o.detail = "inverse max |dz| " + fmt("%.2e", inv_worst) + " over " + std::to_string(kInverseDraws) +
             " draws, log-det rel err " + fmt("%.2e", jac_worst) + " over " +
             std::to_string(kJacobianCases) + " steps";
  return o;
}

// ---------------------------------------------------------------- c3
double dist(const Pose & a, const Pose & b)
{
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y));
}

Outcome metric_oracles()
{
  Rng rng(303);
  std::uniform_real_distribution<double> u(-2.0, 14.0);
  double worst = 0.0;
  for (int rep = 0; rep < kMetricCases; ++rep) {
    const Scene scene = testing::random_scene(rng, 1);
    const std::size_t k = 1 + rep % 8;
    SampleSet s(k);
    for (auto & t : s) {
      for (std::size_t i = 0; i < 6; ++i) t.push_back(Pose{u(rng), u(rng)});
    }
    Trajectory gt;
    for (std::size_t i = 0; i < 6; ++i) gt.push_back(Pose{u(rng), u(rng)});
    double ade = 1e300, fde = 1e300, fsum = 0.0;
    std::set<long> hit;
    std::size_t compliant = 0;
    for (const auto & t : s) {
      double acc = 0.0;
      bool ok = true;
      for (std::size_t i = 0; i < 6; ++i) {
        acc += dist(t[i], gt[i]);
        const long c = static_cast<long>(std::floor(t[i].x));
        const long r = static_cast<long>(std::floor(t[i].y));
        const bool inside = r >= 0 && r < 12 && c >= 0 && c < 12;
        const bool drivable = inside && scene.mask.cells[r * 12 + c] != 0;
        if (drivable) hit.insert(r * 12 + c);
        ok = ok && drivable;
      }
      compliant += ok;
      ade = std::min(ade, acc / 6.0);
      fde = std::min(fde, dist(t[5], gt[5]));
      fsum += dist(t[5], gt[5]);
    }
    const double ref_rf = fde == 0.0 ? 1.0 : fsum / double(k) / fde;
    const double ref_dao = double(hit.size()) / double(scene.mask.drivable_count()) * 1e4;
    const double ref_dac = double(compliant) / double(k);
    worst = std::max({worst, std::abs(min_ade(s, gt) - ade), std::abs(min_fde(s, gt) - fde),
                      std::abs(rf(s, gt) - ref_rf), std::abs(dao({s}, scene.mask) - ref_dao),
                      std::abs(dac(s, scene.mask) - ref_dac)});
  }
  // Hand cases.
  bool hand = true;
  const Trajectory gt{{1, 0}, {2, 0}, {3, 0}, {4, 0}};
  Trajectory up = gt;
  for (auto & p : up) p.y += 3.0;
  Trajectory diag = gt;
  diag.back() = Pose{7.0, 4.0};
  hand = hand && std::abs(min_ade({up, diag}, gt) - 1.25) <= kMetricTol;
  hand = hand && std::abs(min_fde({up, diag}, gt) - 3.0) <= kMetricTol;
  hand = hand && std::abs(rf({up, diag}, gt) - 4.0 / 3.0) <= kMetricTol;
  const double dup_rf = rf({up, up, up, up}, gt);
  hand = hand && std::abs(dup_rf - 1.0) <= kMetricTol;
  hand = hand && rf({gt, up}, gt) == 1.0;
  DrivableMask m;
  m.grid = GridGeometry{2, 2, 1.0, Pose{0.0, 0.0}};
  m.cells = {1, 1, 0, 1};
  const Trajectory a{{0.5, 0.5}, {0.2, 0.7}, {1.5, 1.5}};
  const Trajectory off{{0.5, 0.5}, {2.5, 0.5}};
  const Trajectory blocked{{0.5, 0.5}, {0.5, 1.5}};
  hand = hand && std::abs(dao({{a}}, m) - 2.0 / 3.0 * 1e4) <= kMetricTol;
  hand = hand && dac({a, off, blocked, a}, m) == 0.5;
  Outcome o;
  o.pass = worst <= kMetricTol && hand;
  o.detail = "max deviation from brute force " + fmt("%.2e", worst) + " over " +
             std::to_string(kMetricCases) + " cases, hand cases " + (hand ? "ok" : "MISMATCH") +
             ", duplicate-sample rF " + fmt("%.3f", dup_rf);
  return o;
}

// ---------------------------------------------------------------- c4
template <typename T>
double equivariance_error(const Model<T> & model, std::uint64_t seed)
{
  Rng rng(seed);
  double worst = 0.0;
  for (int rep = 0; rep < kEquivarianceScenes; ++rep) {
    const std::size_t agents = 2 + rep % 5;
    const Scene s = testing::random_scene(rng, agents, 40);
    std::vector<std::size_t> perm(agents);
    for (std::size_t i = 0; i < agents; ++i) perm[i] = i;
    do {
      std::shuffle(perm.begin(), perm.end(), rng);
    } while (std::is_sorted(perm.begin(), perm.end()));
    Scene p = s;
    for (std::size_t i = 0; i < agents; ++i) p.tracks[i] = s.tracks[perm[i]];
    auto codes = [&](const Scene & sc) {
      Tape<T> tape;
      auto w = bind(tape, model, false);
      return encode_scene(w, sc).value();
    };
    const auto c = codes(s);
    const auto cp = codes(p);
    for (std::size_t i = 0; i < agents; ++i) {
      for (std::size_t d = 0; d < c.cols(); ++d) {
        worst = std::max(worst, std::abs(static_cast<double>(cp.at(i, d)) - static_cast<double>(c.at(perm[i], d))));
      }
    }
  }
  return worst;
}

Outcome encoder_equivariance()
{
  const auto model = Model<double>::initialized(model_config("tf12-ref"), 404);
  const double worst = equivariance_error(model, 404);
  const double worst32 = equivariance_error(Model<float>(model.config(), model.params().cast<float>()), 404);
  Outcome o;
  o.pass = worst <= kEquivarianceTol;
  o.detail = "max |code(perm) - perm(code)| " + fmt("%.2e", worst) + " (64-bit) over " +
             std::to_string(kEquivarianceScenes) + " scenes, A in 2..6; float32 rounding " +
             fmt("%.2e", worst32);
  return o;
}

// ---------------------------------------------------------------- c5
Outcome overfit_sanity()
{
  const auto scenes = synth_scenes(SynthConfig::with_per_class(1), 505);
  std::vector<const Scene *> all;
  for (const auto & s : scenes) all.push_back(&s);
  const ModelConfig mc = model_config("tf12-ref");
  TrainConfig cfg;
  cfg.batch_size = scenes.size();
  cfg.total_steps = kOverfitSteps;
  cfg.warmup_steps = 50;
  cfg.seed = 5;
  const double before = nll_term(Model<float>::initialized(mc, cfg.seed), all);
  const auto result = train(scenes, mc, cfg);
  const Model<float> model = result.checkpoint.model();
  const double after = nll_term(model, all);
  double ade = 0.0;
  for (const auto & s : scenes) {
    const Tensor<double> z0(Shape{s.agent_count(), 2 * s.tracks[0].future.size()});
    const auto samples = sample_with_noise(model, s, 1, z0);
    double scene_ade = 0.0;
    for (std::size_t a = 0; a < s.agent_count(); ++a) {
      scene_ade += min_ade(to_sample_set(samples[a]), s.tracks[a].future);
    }
    ade += scene_ade / double(s.agent_count()) / double(scenes.size());
  }
  Outcome o;
  o.pass = before - after >= kOverfitNllDrop && ade < kOverfitAde;
  o.detail = "nll " + fmt("%.3f", before) + " -> " + fmt("%.3f", after) + " after " +
             std::to_string(kOverfitSteps) + " steps, z=0 min_ade " + fmt("%.3f", ade) + " m";
  return o;
}

// ---------------------------------------------------------------- c6
Outcome admissibility_effect()
{
  int wins = 0;
  std::string detail;
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto train_set = synth_scenes(SynthConfig::with_per_class(50), 600 + seed);
    auto pool = synth_scenes(SynthConfig::with_per_class(13), 700 + seed);
    // 13 per class is 52 scenes; dropping the last of two classes leaves 50.
    pool.erase(pool.begin() + 38);
    pool.erase(pool.begin() + 25);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < pool.size(); ++i) ids.push_back("eval_" + std::to_string(i));
    double dac_at[2];
    const double alphas[2] = {0.0, 0.5};
    for (int a = 0; a < 2; ++a) {
      TrainConfig cfg;
      cfg.batch_size = kAdmissibilityBatch;
      cfg.total_steps = kAdmissibilitySteps;
      cfg.warmup_steps = kAdmissibilitySteps / 10;
      cfg.alpha = alphas[a];
      cfg.seed = seed;
      const auto r = train(train_set, model_config("tf12-ref"), cfg);
      dac_at[a] = evaluate(r.checkpoint.model(), pool, ids, kAdmissibilityK, seed).aggregate.dac;
    }
    wins += dac_at[1] >= dac_at[0];
    detail += (detail.empty() ? "" : "; ") + std::string("seed ") + std::to_string(seed) + " DAC " +
              fmt("%.3f", dac_at[0]) + " (a=0) vs " + fmt("%.3f", dac_at[1]) + " (a=0.5)";
  }
  Outcome o;
  o.pass = wins >= 2;
  o.detail = std::to_string(wins) + "/3 seeds favour a=0.5: " + detail;
  return o;
}

// ---------------------------------------------------------------- c7
std::uintmax_t directory_size(const fs::path & dir)
{
  std::uintmax_t n = 0;
  for (const auto & e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) n += e.file_size();
  }
  return n;
}

Outcome parameter_budget()
{
  std::ostringstream out12, out24, err;
  const int c12 = cli::run({"params", "--config", "tf12-ref"}, out12, err);
  const int c24 = cli::run({"params", "--config", "tf24-ref"}, out24, err);
  const double n12 = std::stod(out12.str());
  const double n24 = std::stod(out24.str());
  auto within = [](double n, double target) { return std::abs(n - target) <= kBudgetTolerance * target; };
  std::uintmax_t sizes[2];
  const char * names[2] = {"tf12-ref", "tf24-ref"};
  for (int i = 0; i < 2; ++i) {
    const ModelConfig mc = model_config(names[i]);
    Checkpoint ck;
    ck.model_config = mc;
    const auto m = Model<float>::initialized(mc, 0);
    ck.params = m.params();
    ck.adam = make_adam_state(ck.params);
    const auto dir = testing::scratch_dir(std::string("acc_budget_") + names[i]);
    save_checkpoint(ck, dir);
    sizes[i] = directory_size(dir);
  }
  Outcome o;
  o.pass = c12 == 0 && c24 == 0 && within(n12, 164000) && within(n24, 192000) && sizes[1] > sizes[0];
  o.detail = "tf12-ref " + fmt("%.0f", n12) + " (target 164000), tf24-ref " + fmt("%.0f", n24) +
             " (target 192000), checkpoints " + std::to_string(sizes[0]) + " < " +
             std::to_string(sizes[1]) + " bytes";
  return o;
}

// ---------------------------------------------------------------- c8
bool run_pipeline(const fs::path & root)
{
  std::ostringstream out, err;
  const std::string d = (root / "data").string();
  const std::string c = (root / "ckpt").string();
  return cli::run({"synth", "--out", d, "--seed", "8", "--per-class", "2"}, out, err) == 0 &&
         cli::run({"train", "--data", d, "--config", "tf12-ref", "--out", c, "--steps", "20",
                   "--batch-size", "4", "--seed", "8"}, out, err) == 0 &&
         cli::run({"predict", "--ckpt", c, "--scene", (root / "data" / "scene_0005.json").string(),
                   "--k", "6", "--seed", "8", "--out", (root / "pred.json").string()}, out, err) == 0 &&
         cli::run({"eval", "--ckpt", c, "--data", d, "--k", "6", "--seed", "8", "--out",
                   (root / "metrics.json").string()}, out, err) == 0;
}

Outcome determinism()
{
  const auto a = testing::scratch_dir("acc_det_a");
  const auto b = testing::scratch_dir("acc_det_b");
  const bool ran = run_pipeline(a) && run_pipeline(b);
  const auto ba = testing::directory_bytes(a);
  const auto bb = testing::directory_bytes(b);
  std::size_t differing = 0;
  for (std::size_t i = 0; i < std::min(ba.size(), bb.size()); ++i) {
    differing += ba[i] != bb[i];
  }
  Outcome o;
  o.pass = ran && ba.size() == bb.size() && differing == 0 && !ba.empty();
  o.detail = std::to_string(ba.size()) + " files (data, checkpoint, loss curve, prediction, metrics), " +
             std::to_string(differing) + " differ between runs";
  return o;
}

// ---------------------------------------------------------------- c9
Outcome format_round_trips()
{
  const auto root = testing::scratch_dir("acc_formats");
  const auto scenes = synth_scenes(SynthConfig::with_per_class(2), 909);
  std::size_t scene_ok = 0;
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    const auto p1 = root / ("s" + std::to_string(i) + "_a.json");
    const auto p2 = root / ("s" + std::to_string(i) + "_b.json");
    save_scene(scenes[i], p1);
    const Scene back = load_scene(p1);
    save_scene(back, p2);
    scene_ok += testing::file_bytes(p1) == testing::file_bytes(p2) && back == scenes[i];
  }
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.total_steps = 5;
  cfg.warmup_steps = 1;
  const auto r = train(scenes, model_config("tf12-ref"), cfg);
  save_checkpoint(r.checkpoint, root / "ck_a");
  save_checkpoint(load_checkpoint(root / "ck_a"), root / "ck_b");
  const bool ckpt_ok = testing::directory_bytes(root / "ck_a") == testing::directory_bytes(root / "ck_b");
  const Model<float> model = r.checkpoint.model();
  const Prediction pred = make_prediction("s0", scenes[0], sample(model, scenes[0], 5, 9));
  save_prediction(pred, (root / "p.json").string());
  std::ifstream in(root / "p.json");
  const auto doc = nlohmann::json::parse(in);
  bool schema_ok = true;
  try {
    validate_prediction_json(doc);
  } catch (const FormatError &) {
    schema_ok = false;
  }
  auto bad = doc;
  bad["agents"][0]["log_probs"].erase(0);
  bool rejects = false;
  try {
    validate_prediction_json(bad);
  } catch (const FormatError &) {
    rejects = true;
  }
  const bool pred_ok = schema_ok && rejects && load_prediction((root / "p.json").string()) == pred;
  Outcome o;
  o.pass = scene_ok == scenes.size() && ckpt_ok && pred_ok;
  o.detail = std::to_string(scene_ok) + "/" + std::to_string(scenes.size()) +
             " scenes byte-identical, checkpoint " + (ckpt_ok ? "byte-identical" : "DIFFERS") +
             ", prediction schema " + (pred_ok ? "valid" : "INVALID");
  return o;
}

struct Criterion
{
  const char * id;
  const char * title;
  std::function<Outcome()> run;
};

const std::vector<Criterion> & criteria()
{
  static const std::vector<Criterion> list{
    {"c1", "gradient correctness", gradient_correctness},
    {"c2", "flow bijectivity", flow_bijectivity},
    {"c3", "metric oracle equivalence", metric_oracles},
    {"c4", "encoder equivariance", encoder_equivariance},
    {"c5", "overfit sanity", overfit_sanity},
    {"c6", "admissibility effect", admissibility_effect},
    {"c7", "parameter budget", parameter_budget},
    {"c8", "determinism", determinism},
    {"c9", "format round-trips", format_round_trips},
  };
  return list;
}

}  // namespace
}  // namespace trajformer::acceptance

int main(int argc, char ** argv)
{
  using namespace trajformer::acceptance;
  std::set<std::string> wanted(argv + 1, argv + argc);
  bool ok = true;
  for (const auto & c : criteria()) {
    if (!wanted.empty() && wanted.count(c.id) == 0) {
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs);
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
