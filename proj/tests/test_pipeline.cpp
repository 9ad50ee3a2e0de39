// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end checks: rendered sequences through the full recovery pipeline.
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "camh/pipeline.hpp"
#include "camh/simulator.hpp"

using namespace camh;

namespace {

SceneConfig small_scene(std::uint64_t seed) {
  SceneConfig cfg;
  cfg.width = 320;
  cfg.height = 96;
  cfg.K = {250.0, 250.0, 160.0, 48.0};
  cfg.camera_height = 1.65;
  cfg.seed = seed;
  cfg.boxes = {
      {-2.6, 8.0, 1.7, 4.0, 1.42, 12.0, "car"},
      {-0.4, 12.0, 1.7, 4.2, 1.50, 40.0, "car"},
      {2.2, 16.0, 1.8, 4.1, 1.46, 70.0, "car"},
  };
  return cfg;
}

// Renders a short sequence with mild per-frame pose and box jitter, then
// rescales the depth that the pipeline sees by `scale`.
std::vector<PipelineFrame> make_sequence(int n, double scale,
                                         std::uint64_t seed,
                                         SceneConfig base) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jx(-0.4, 0.4), jz(-1.5, 1.5),
      jyaw(-12.0, 12.0), jpitch(-0.8, 0.8);
  std::vector<PipelineFrame> out;
  for (int i = 0; i < n; ++i) {
    SceneConfig cfg = base;
    cfg.seed = seed + 977u * static_cast<unsigned>(i);
    cfg.pitch_deg = jpitch(rng);
    for (auto &b : cfg.boxes) {
      b.x += jx(rng);
      b.z = std::max(5.0, b.z + jz(rng));
      b.yaw_deg += jyaw(rng);
    }
    RenderedScene sc = render_scene(cfg);
    PipelineFrame f;
    f.id = "f" + std::to_string(i);
    f.depth = scale == 1.0 ? sc.depth : apply_global_scale(sc.depth, scale);
    f.road = sc.road;
    f.objects = sc.instances;
    std::map<int, Dimensions> table;
    for (size_t k = 0; k < sc.instances.size(); ++k)
      table[sc.instances[k].id] = {sc.instance_true_height[k], 1.7, 4.0};
    f.priors = PriorSource::dimension_table(std::move(table));
    f.gt_height = cfg.camera_height;
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

TEST(Pipeline, RecoversTheCameraHeightFromMisscaledDepth) {
  SceneConfig base = small_scene(21);
  auto frames = make_sequence(8, 0.5, 21, base);
  PipelineOptions opt;
  opt.epochs = 5;
  opt.compute_losses = false;

  PipelineResult res = run_pipeline(frames, base.K, opt);
  ASSERT_TRUE(res.state.hstar);
  EXPECT_NEAR(*res.state.hstar, base.camera_height,
              0.01 * base.camera_height);
  EXPECT_EQ(res.state.tau_completed, 5);
  EXPECT_EQ(static_cast<int>(res.epochs.size()), 5);

  // every processed frame recovers the height individually as well
  for (const auto &fr : res.frames) {
    ASSERT_TRUE(fr.error.empty()) << fr.error;
    ASSERT_TRUE(fr.scaled_height);
    EXPECT_NEAR(*fr.scaled_height, base.camera_height,
                0.02 * base.camera_height);
    EXPECT_GT(fr.inliers, 0);
  }
}

TEST(Pipeline, UnscaledHeightsTrackTheInputScale) {
  SceneConfig base = small_scene(33);
  auto half = make_sequence(4, 0.5, 33, base);
  auto full = make_sequence(4, 1.0, 33, base);
  PipelineOptions opt;
  opt.compute_losses = false;

  PipelineResult rh = run_pipeline(half, base.K, opt);
  PipelineResult rf = run_pipeline(full, base.K, opt);
  for (size_t i = 0; i < rh.frames.size(); ++i) {
    ASSERT_TRUE(rh.frames[i].unscaled_height && rf.frames[i].unscaled_height);
    EXPECT_NEAR(*rh.frames[i].unscaled_height,
                0.5 * *rf.frames[i].unscaled_height, 1e-9);
    // the recovered metric height is scale-free
    EXPECT_NEAR(*rh.frames[i].scaled_height, *rf.frames[i].scaled_height,
                1e-6);
  }
}

TEST(Pipeline, RunsAreDeterministic) {
  SceneConfig base = small_scene(5);
  auto frames = make_sequence(5, 2.0, 5, base);
  PipelineOptions opt;
  opt.epochs = 3;
  opt.compute_losses = false;

  PipelineResult a = run_pipeline(frames, base.K, opt);
  PipelineResult b = run_pipeline(frames, base.K, opt);
  ASSERT_TRUE(a.state.hstar && b.state.hstar);
  EXPECT_EQ(*a.state.hstar, *b.state.hstar);
  ASSERT_EQ(a.frames.size(), b.frames.size());
  for (size_t i = 0; i < a.frames.size(); ++i) {
    ASSERT_EQ(static_cast<bool>(a.frames[i].scaled_height),
              static_cast<bool>(b.frames[i].scaled_height));
    if (a.frames[i].scaled_height)
      EXPECT_EQ(*a.frames[i].scaled_height, *b.frames[i].scaled_height);
  }
}

TEST(Pipeline, OfflineModeFreezesTheFirstEstimate) {
  SceneConfig base = small_scene(9);
  auto frames = make_sequence(4, 1.0, 9, base);
  PipelineOptions opt;
  opt.epochs = 6;
  opt.mode = SupervisionMode::offline;
  opt.compute_losses = false;

  PipelineResult res = run_pipeline(frames, base.K, opt);
  ASSERT_TRUE(res.state.hstar);
  ASSERT_GE(res.epochs.size(), 2u);
  for (const auto &e : res.epochs)
    if (e.hstar_after) EXPECT_EQ(*e.hstar_after, *res.state.hstar);
  EXPECT_EQ(res.state.tau_applied, 1);
  EXPECT_EQ(res.state.tau_completed, 6);
}

TEST(Pipeline, ResumingFromSavedStateContinuesTheAverage) {
  SceneConfig base = small_scene(13);
  auto frames = make_sequence(4, 1.0, 13, base);
  PipelineOptions opt;
  opt.compute_losses = false;

  opt.epochs = 4;
  PipelineResult full = run_pipeline(frames, base.K, opt);

  opt.epochs = 2;
  PipelineResult first = run_pipeline(frames, base.K, opt);
  PipelineResult second =
      run_pipeline(frames, base.K, opt, std::move(first.state));
  ASSERT_TRUE(second.state.hstar && full.state.hstar);
  EXPECT_DOUBLE_EQ(*second.state.hstar, *full.state.hstar);
  EXPECT_EQ(second.state.tau_completed, full.state.tau_completed);
}

TEST(Pipeline, FramesWithoutRoadAreSkippedNotFatal) {
  SceneConfig base = small_scene(17);
  auto frames = make_sequence(3, 1.0, 17, base);
  frames[1].road = Mask(frames[1].road.width, frames[1].road.height, 0);

  PipelineOptions opt;
  opt.compute_losses = false;
  PipelineResult res = run_pipeline(frames, base.K, opt);
  EXPECT_TRUE(res.frames[1].error.empty());
  EXPECT_FALSE(res.frames[1].scaled_height);  // no road, no estimate
  EXPECT_TRUE(res.frames[0].scaled_height);
  EXPECT_TRUE(res.frames[2].scaled_height);
  ASSERT_TRUE(res.state.hstar);

  // a sequence where every frame fails outright reports a data problem
  std::vector<PipelineFrame> broken(1);
  broken[0].id = "empty";
  EXPECT_THROW(run_pipeline(broken, base.K, opt), data_error);
}

TEST(Refine, RecoversThePreScaleAppliedToDepth) {
  SceneConfig base = small_scene(41);
  for (const double k : {0.5, 2.0}) {
    auto frames = make_sequence(6, k, 41, base);
    RefineOptions opt;
    opt.hstar = base.camera_height;
    RefineResult res = scale_recovery_refine(frames, base.K, opt);
    EXPECT_NEAR(res.scale, 1.0 / k, 0.01 / k) << "input scale " << k;
    EXPECT_TRUE(res.converged);
  }
}

TEST(Refine, CorrectScaleStaysPut) {
  SceneConfig base = small_scene(43);
  auto frames = make_sequence(6, 1.0, 43, base);
  RefineOptions opt;
  opt.hstar = base.camera_height;
  RefineResult res = scale_recovery_refine(frames, base.K, opt);
  EXPECT_NEAR(res.scale, 1.0, 1e-3);
}

TEST(Refine, LossNeverIncreasesAlongTheAcceptedPath) {
  SceneConfig base = small_scene(47);
  auto frames = make_sequence(5, 0.25, 47, base);
  RefineOptions opt;
  opt.hstar = base.camera_height;
  RefineResult res = scale_recovery_refine(frames, base.K, opt);
  ASSERT_GE(res.history.size(), 2u);
  for (size_t i = 1; i < res.history.size(); ++i)
    EXPECT_LE(res.history[i].loss, res.history[i - 1].loss);
  EXPECT_NEAR(res.scale, 4.0, 0.04);
}

TEST(Refine, BootstrapsSupervisionFromSilhouettesWhenAbsent) {
  SceneConfig base = small_scene(53);
  auto frames = make_sequence(6, 0.5, 53, base);
  RefineOptions opt;  // no hstar given
  RefineResult res = scale_recovery_refine(frames, base.K, opt);
  EXPECT_NEAR(res.hstar, base.camera_height, 0.02 * base.camera_height);
  EXPECT_NEAR(res.scale, 2.0, 0.05);
}
