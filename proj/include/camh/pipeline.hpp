// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "camh/camheight.hpp"
#include "camh/epoch_optimizer.hpp"
#include "camh/geometry.hpp"
#include "camh/losses.hpp"
#include "camh/outlier_filter.hpp"
#include "camh/silhouette.hpp"
#include "camh/size_prior.hpp"

namespace camh {

// Everything one frame contributes to an epoch, already in memory.
struct PipelineFrame {
  std::string id;
  DepthMap depth;
  Mask road;
  std::vector<ObjectInstance> objects;
  PriorSource priors = PriorSource::fixed_height(kDefaultCarHeight);
  std::optional<Image> image;
  std::optional<Image> source_image;
  std::optional<RelativePose> pose_to_source;
  std::optional<double> gt_height;
};

// Frames are pulled through a provider so callers choose between keeping a
// sequence in memory and re-reading it from disk every epoch. Providers are
// called concurrently from worker threads and must not share mutable state.
using FrameProvider = std::function<PipelineFrame(size_t)>;

struct PipelineOptions {
  int epochs = 1;
  SupervisionMode mode = SupervisionMode::online;
  int unfreeze_epoch = 0;
  LossWeights weights;
  double outlier_threshold = kOutlierThreshold;
  bool automask = true;
  bool literal_aux = false;
  bool compute_losses = true;
};

struct FrameReport {
  int epoch = 0;
  std::string id;
  std::optional<double> unscaled_height;
  std::optional<double> scale;
  std::optional<double> scaled_height;
  int objects = 0;
  int measured = 0;   // silhouettes with a usable prior
  int inliers = 0;    // survivors of the plausibility filter
  std::optional<LossBreakdown> loss;
  std::string error;  // nonempty = frame skipped this epoch
};

struct EpochReport {
  int epoch = 0;
  int frames_ok = 0;
  std::optional<double> epoch_height;
  std::optional<double> hstar_after;
  double lambda_cam = 0.0;
  double lambda_aux = 0.0;
};

struct PipelineResult {
  std::vector<FrameReport> frames;
  std::vector<EpochReport> epochs;
  SequenceState state;
};

namespace detail {

inline Grid<double> disparity_of(const DepthMap &d) {
  Grid<double> disp(d.width, d.height, 0.0);
  for (size_t i = 0; i < d.v.size(); ++i)
    if (depth_valid(d.v[i])) disp.v[i] = 1.0 / d.v[i];
  return disp;
}

}  // namespace detail

// One frame through the geometric chain: normals, road plane, silhouettes,
// plausibility filter (only once supervision exists), frame scale, and the
// loss breakdown when the frame carries a view pair.
inline FrameReport process_frame(const PipelineFrame &f, const Intrinsics &K,
                                 const PipelineOptions &opt,
                                 std::optional<double> hstar, int tau) {
  FrameReport r;
  r.id = f.id;
  r.objects = static_cast<int>(f.objects.size());
  try {
    if (f.depth.empty())
      throw usage_error("frame '" + f.id + "': empty depth map");
    NormalMap normals = normal_map(f.depth, K);
    HeightMap heights = per_pixel_camera_height(f.depth, normals, f.road, K);
    std::optional<Vec3> road_n = road_normal(normals, f.road);
    std::optional<double> hframe;
    if (auto fh = frame_camera_height(heights)) hframe = fh->value;
    if (road_n && hframe) {
      r.unscaled_height = hframe;
      std::vector<SilhouetteMeasurement> ms;
      std::vector<double> priors;
      for (const auto &obj : f.objects) {
        ms.push_back(silhouette_height(f.depth, K, obj, *road_n, *hframe));
        auto p = try_prior_height(f.priors, obj);
        priors.push_back(p ? *p : std::nan(""));
        if (ms.back().valid && p) ++r.measured;
      }
      int kept = r.measured;
      if (hstar) {
        std::optional<HorizonLine> horizon;
        try {
          horizon = horizon_line(K, *road_n);
        } catch (const numeric_error &) {
          // camera-parallel plane: no usable horizon, keep every candidate
        }
        if (horizon) {
          std::vector<ObjectHeightPair> pairs;
          for (size_t i = 0; i < f.objects.size(); ++i) {
            if (!ms[i].valid || !(priors[i] > 0.0)) continue;
            auto approx =
                approx_object_height(f.objects[i], *horizon, *hstar);
            if (!approx) continue;
            pairs.push_back({f.objects[i].id, priors[i], *approx});
          }
          std::vector<int> inlier_ids =
              filter_outliers(pairs, opt.outlier_threshold);
          kept = 0;
          for (size_t i = 0; i < f.objects.size(); ++i) {
            if (!ms[i].valid || !(priors[i] > 0.0)) continue;
            bool judged = false;
            for (const auto &p : pairs)
              if (p.id == f.objects[i].id) judged = true;
            bool keep = !judged;  // too small to judge: leave it in
            for (int id : inlier_ids)
              if (id == f.objects[i].id) keep = true;
            if (keep) {
              ++kept;
            } else {
              ms[i].valid = false;
            }
          }
        }
      }
      r.inliers = kept;
      if (auto fs = frame_scale_factor(ms, priors)) {
        r.scale = fs->s;
        r.scaled_height = scaled_camera_height(*hframe, *fs).value;
      }
    }

    if (opt.compute_losses && f.image && f.source_image && f.pose_to_source) {
      WarpResult warp = warp_view(*f.source_image, f.depth, *f.pose_to_source, K);
      std::vector<Image> sources = {*f.source_image};
      std::vector<WarpResult> warps = {std::move(warp)};
      std::optional<double> rec =
          reconstruction_loss(*f.image, sources, warps, opt.automask,
                              opt.weights.lambda_pe);
      std::optional<double> sm;
      Grid<double> disp = detail::disparity_of(f.depth);
      sm = smoothness_loss(disp, *f.image);
      std::optional<double> cam;
      if (hstar) cam = camera_height_loss(heights, f.road, *hstar);
      std::vector<double> aux_priors;
      for (const auto &obj : f.objects) {
        auto p = try_prior_height(f.priors, obj);
        aux_priors.push_back(p ? *p : std::nan(""));
      }
      std::optional<double> aux =
          aux_geometric_loss(f.depth, f.objects, aux_priors, K);
      r.loss = total_loss(rec, sm, cam, aux, opt.weights, tau, opt.literal_aux);
    }
  } catch (const error &e) {
    r.error = e.what();
  }
  return r;
}

// Epoch loop: frame scales, epoch median, and the pseudo-height update.
inline PipelineResult run_pipeline(const FrameProvider &provider,
                                   size_t frame_count, const Intrinsics &K,
                                   const PipelineOptions &opt,
                                   SequenceState state = {}) {
  if (frame_count == 0) throw usage_error("pipeline: no frames");
  if (opt.epochs < 1) throw usage_error("pipeline: epochs must be >= 1");
  opt.weights.validate();
  if (state.id.empty()) state.id = "sequence";
  state.mode = opt.mode;
  state.unfreeze_epoch = opt.unfreeze_epoch;

  PipelineResult out;
  for (int e = 1; e <= opt.epochs; ++e) {
    int tau = state.tau_completed + 1;
    std::optional<double> hstar = supervision_for_epoch(state);
    // Frames are independent given the epoch's supervision, so they run in
    // parallel; slot-indexed writes and an ordered merge keep the output
    // identical to the serial order. CAMH_THREADS caps the worker pool.
    std::vector<FrameReport> reports(frame_count);
    std::exception_ptr first_err;
    std::mutex err_mu;
    parallel_for(static_cast<int>(frame_count), [&](int i) {
      try {
        PipelineFrame f = provider(static_cast<size_t>(i));
        reports[i] = process_frame(f, K, opt, hstar, tau);
        reports[i].epoch = e;
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!first_err) first_err = std::current_exception();
      }
    });
    if (first_err) std::rethrow_exception(first_err);
    std::vector<FrameRecord> records;
    int ok = 0;
    for (auto &r : reports) {
      if (r.error.empty()) ++ok;
      records.push_back({r.id, r.scaled_height, r.inliers});
      out.frames.push_back(std::move(r));
    }
    if (ok == 0)
      throw data_error("pipeline: every frame failed in epoch " +
                       std::to_string(e));
    std::optional<double> eh = epoch_camera_height(records);
    update_supervision(state, eh);
    ScheduleWeights sw = loss_weight_schedule(tau, opt.weights.tau_mid,
                                              opt.weights.eps, opt.literal_aux);
    out.epochs.push_back(
        {e, ok, eh, supervision_for_epoch(state), sw.lambda_cam,
         sw.lambda_aux});
  }
  out.state = std::move(state);
  return out;
}

inline PipelineResult run_pipeline(std::span<const PipelineFrame> frames,
                                   const Intrinsics &K,
                                   const PipelineOptions &opt,
                                   SequenceState state = {}) {
  return run_pipeline(
      [&frames](size_t i) { return frames[i]; }, frames.size(), K, opt,
      std::move(state));
}

// ---- global scale refinement -------------------------------------------------
// Demo optimizer: one log-scale parameter, supervised height + size terms.
// Heights scale exactly linearly with depth, so each frame reduces to cached
// piecewise-linear pieces; every descent step costs one linear pass.

struct RefineOptions {
  int max_steps = 200;
  double lr = 0.0;  // 0 = pick from the first gradient
  int tau = 25;     // schedule position: past tau_mid the height term leads
  LossWeights weights;
  std::optional<double> hstar;  // bootstrap from silhouettes when absent
  bool literal_aux = false;
  double grad_tol = 1e-10;
};

struct RefineStep {
  int step = 0;
  double log_scale = 0.0;
  double loss = 0.0;
  double grad = 0.0;
};

struct RefineResult {
  double scale = 1.0;
  double loss = 0.0;
  double hstar = 0.0;
  bool converged = false;
  std::vector<RefineStep> history;
};

namespace detail {

struct RefineTriple {
  double depth = 0.0;
  double anchor = 0.0;
  double weight = 0.0;  // 1 / (objects_used * mask pixel count)
};

struct RefineCache {
  std::vector<double> heights;       // all valid supervised heights, one frame
  std::vector<RefineTriple> sizes;   // auxiliary pieces, one frame
};

}  // namespace detail

inline RefineResult scale_recovery_refine(const FrameProvider &provider,
                                          size_t frame_count,
                                          const Intrinsics &K,
                                          const RefineOptions &opt) {
  if (frame_count == 0) throw usage_error("refine: no frames");
  if (opt.max_steps < 1) throw usage_error("refine: max_steps must be >= 1");
  opt.weights.validate();
  ScheduleWeights sw = loss_weight_schedule(opt.tau, opt.weights.tau_mid,
                                            opt.weights.eps, opt.literal_aux);

  std::vector<detail::RefineCache> caches;
  std::vector<double> bootstrap_heights;
  for (size_t i = 0; i < frame_count; ++i) {
    PipelineFrame f = provider(i);
    detail::RefineCache c;
    NormalMap normals = normal_map(f.depth, K);
    HeightMap heights = per_pixel_camera_height(f.depth, normals, f.road, K);
    for (int y = 0; y < heights.value.height; ++y)
      for (int u = 0; u < heights.value.width; ++u)
        if (heights.valid.at(u, y)) c.heights.push_back(heights.value.at(u, y));

    // auxiliary pieces: one anchor per object with a prior
    struct ObjPixels {
      double anchor;
      std::vector<double> depths;
    };
    std::vector<ObjPixels> objs;
    for (const auto &obj : f.objects) {
      auto p = try_prior_height(f.priors, obj);
      if (!p || !(*p > 0.0)) continue;
      int span = obj.bbox.span_rows();
      if (span <= 0) continue;
      ObjPixels op;
      op.anchor = *p / span * K.fy;
      for (int y = obj.bbox.min_v; y <= obj.bbox.max_v; ++y)
        for (int u = obj.bbox.min_u; u <= obj.bbox.max_u; ++u)
          if (obj.mask.at(u, y) && depth_valid(f.depth.at(u, y)))
            op.depths.push_back(f.depth.at(u, y));
      if (!op.depths.empty()) objs.push_back(std::move(op));
    }
    for (const auto &op : objs) {
      double wpx = 1.0 / (static_cast<double>(objs.size()) * op.depths.size());
      for (double d : op.depths) c.sizes.push_back({d, op.anchor, wpx});
    }

    if (!opt.hstar) {
      // silhouette bootstrap for the supervision target
      std::optional<Vec3> road_n = road_normal(normals, f.road);
      std::optional<double> hframe;
      if (auto fh = frame_camera_height(heights)) hframe = fh->value;
      if (road_n && hframe) {
        std::vector<SilhouetteMeasurement> ms;
        std::vector<double> priors;
        for (const auto &obj : f.objects) {
          ms.push_back(silhouette_height(f.depth, K, obj, *road_n, *hframe));
          auto p = try_prior_height(f.priors, obj);
          priors.push_back(p ? *p : std::nan(""));
        }
        if (auto fs = frame_scale_factor(ms, priors))
          bootstrap_heights.push_back(
              scaled_camera_height(*hframe, *fs).value);
      }
    }
    caches.push_back(std::move(c));
  }

  double hstar = 0.0;
  if (opt.hstar) {
    hstar = *opt.hstar;
  } else {
    if (bootstrap_heights.empty())
      throw data_error("refine: no frame produced a scaled height and no "
                       "supervision height was given");
    hstar = median(std::move(bootstrap_heights));
  }
  if (!(hstar > 0.0)) throw usage_error("refine: supervision height <= 0");

  long cam_frames = 0, aux_frames = 0;
  for (const auto &c : caches) {
    if (!c.heights.empty()) ++cam_frames;
    if (!c.sizes.empty()) ++aux_frames;
  }
  if (cam_frames == 0 && aux_frames == 0)
    throw data_error("refine: nothing to optimize (no road, no priors)");

  // loss and d(loss)/d(log s) in one pass; exact for this piecewise form
  auto eval = [&](double x, double &grad) {
    double s = std::exp(x);
    double loss = 0.0;
    grad = 0.0;
    for (const auto &c : caches) {
      if (!c.heights.empty()) {
        double l = 0.0, g = 0.0;
        for (double hp : c.heights) {
          double d = s * hp - hstar;
          l += std::abs(d);
          g += (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) * s * hp;
        }
        double wc = opt.weights.alpha * sw.lambda_cam /
                    (static_cast<double>(c.heights.size()) * cam_frames);
        loss += wc * l;
        grad += wc * g;
      }
      if (!c.sizes.empty()) {
        double l = 0.0, g = 0.0;
        for (const auto &t : c.sizes) {
          double d = s * t.depth - t.anchor;
          l += t.weight * std::abs(d);
          g += t.weight * (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) * s *
               t.depth;
        }
        double wa = opt.weights.beta * sw.lambda_aux / aux_frames;
        loss += wa * l;
        grad += wa * g;
      }
    }
    return loss;
  };

  RefineResult res;
  res.hstar = hstar;
  double x = 0.0, g = 0.0;
  double loss = eval(x, g);
  if (!std::isfinite(loss) || !std::isfinite(g))
    throw numeric_error("refine: loss is not finite at the initial scale");
  double best_x = x, best_loss = loss;
  double lr = opt.lr > 0.0 ? opt.lr
                           : 0.25 / std::max(std::abs(g), 1e-9);
  res.history.push_back({0, x, loss, g});
  // Rejected trials halve the step, so starting at (or reaching) a minimum
  // runs the step below tolerance and stops; it is never an error. A
  // non-finite trial compares false and lands in the same rejection path.
  for (int step = 1; step <= opt.max_steps; ++step) {
    if (std::abs(g) <= opt.grad_tol) {
      res.converged = true;
      break;
    }
    double trial_x = x - lr * g;
    double trial_g = 0.0;
    double trial_loss = eval(trial_x, trial_g);
    if (trial_loss <= loss && std::isfinite(trial_loss)) {
      x = trial_x;
      g = trial_g;
      loss = trial_loss;
      lr *= 1.3;
      if (loss < best_loss) {
        best_loss = loss;
        best_x = x;
      }
    } else {
      lr *= 0.5;
    }
    res.history.push_back({step, x, loss, g});
    if (lr * std::abs(g) < 1e-14) {
      res.converged = true;
      break;
    }
  }
  res.scale = std::exp(best_x);
  res.loss = best_loss;
  return res;
}

inline RefineResult scale_recovery_refine(std::span<const PipelineFrame> frames,
                                          const Intrinsics &K,
                                          const RefineOptions &opt) {
  return scale_recovery_refine(
      [&frames](size_t i) { return frames[i]; }, frames.size(), K, opt);
}

}  // namespace camh
