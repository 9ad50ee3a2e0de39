// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>

#include "camh/core.hpp"

namespace camh {

// Standard seven-number depth evaluation. Predictions are clamped to
// [1e-3, cap] before scoring, the usual protocol for road benchmarks.
struct MetricsReport {
  double abs_rel = 0.0;
  double sq_rel = 0.0;
  double rmse = 0.0;
  double rmse_log = 0.0;
  double delta1 = 0.0;  // max(pred/gt, gt/pred) < 1.25
  double delta2 = 0.0;  // ... < 1.25^2
  double delta3 = 0.0;  // ... < 1.25^3
  long valid_count = 0;
};

inline MetricsReport compute_depth_metrics(const DepthMap &pred,
                                           const DepthMap &gt, const Mask &valid,
                                           double cap = 80.0) {
  if (!pred.same_size(gt.width, gt.height) || pred.width != valid.width ||
      pred.height != valid.height)
    throw usage_error("metrics: prediction, truth, and mask sizes differ");
  if (!(cap > 0.0)) throw usage_error("metrics: depth cap must be positive");
  const double t1 = 1.25, t2 = 1.25 * 1.25, t3 = 1.25 * 1.25 * 1.25;
  MetricsReport r;
  double sum_abs = 0, sum_sq = 0, sum_rmse = 0, sum_log = 0;
  long n1 = 0, n2 = 0, n3 = 0;
  for (size_t i = 0; i < gt.v.size(); ++i) {
    if (!valid.v[i]) continue;
    double g = gt.v[i];
    if (!depth_valid(g) || g > cap) continue;
    double p = std::clamp(pred.v[i], 1e-3, cap);
    double diff = p - g;
    sum_abs += std::abs(diff) / g;
    sum_sq += diff * diff / g;
    sum_rmse += diff * diff;
    double dl = std::log(p) - std::log(g);
    sum_log += dl * dl;
    double ratio = std::max(p / g, g / p);
    if (ratio < t1) ++n1;
    if (ratio < t2) ++n2;
    if (ratio < t3) ++n3;
    ++r.valid_count;
  }
  if (r.valid_count == 0)
    throw data_error("metrics: no valid pixels under the mask and cap");
  double n = static_cast<double>(r.valid_count);
  r.abs_rel = sum_abs / n;
  r.sq_rel = sum_sq / n;
  r.rmse = std::sqrt(sum_rmse / n);
  r.rmse_log = std::sqrt(sum_log / n);
  r.delta1 = n1 / n;
  r.delta2 = n2 / n;
  r.delta3 = n3 / n;
  return r;
}

// Keep a frame pair only when enough pixels changed between the two shots;
// a near-static pair starves the reconstruction loss. Thresholds are
// calibrated defaults, not derived quantities.
inline bool static_frame_filter(const Image &a, const Image &b,
                                double intensity_threshold = 0.03,
                                double min_changed_fraction = 0.05) {
  if (!a.same_shape(b))
    throw usage_error("static filter: image shapes differ");
  if (!(intensity_threshold > 0.0) || !(min_changed_fraction >= 0.0))
    throw usage_error("static filter: bad thresholds");
  long changed = 0;
  long total = static_cast<long>(a.width) * a.height;
  for (int y = 0; y < a.height; ++y)
    for (int u = 0; u < a.width; ++u) {
      double diff = 0.0;
      for (int c = 0; c < a.channels; ++c)
        diff += std::abs(a.at(u, y, c) - b.at(u, y, c));
      diff /= a.channels;
      if (diff > intensity_threshold) ++changed;
    }
  return changed >= min_changed_fraction * total;
}

// ---- focal-length alignment --------------------------------------------------
// Uniform resize by target_f / fx (pixel-center convention), then center crop.
// Depth values are distances: resampling moves them, never rescales them.

struct FocalAlignment {
  double scale = 1.0;
  int src_w = 0, src_h = 0;
  int resized_w = 0, resized_h = 0;
  int crop_x = 0, crop_y = 0;
  int out_w = 0, out_h = 0;
  Intrinsics K;  // intrinsics of the aligned output
};

inline FocalAlignment make_focal_alignment(int src_w, int src_h,
                                           const Intrinsics &K,
                                           double target_f, int out_w,
                                           int out_h) {
  K.validate();
  if (!(target_f > 0.0)) throw usage_error("alignment: target_f must be > 0");
  if (out_w <= 0 || out_h <= 0)
    throw usage_error("alignment: output size must be positive");
  FocalAlignment a;
  a.scale = target_f / K.fx;
  a.src_w = src_w;
  a.src_h = src_h;
  a.resized_w = static_cast<int>(std::lround(src_w * a.scale));
  a.resized_h = static_cast<int>(std::lround(src_h * a.scale));
  if (out_w > a.resized_w || out_h > a.resized_h)
    throw usage_error("alignment: crop exceeds the resized image");
  a.crop_x = (a.resized_w - out_w) / 2;
  a.crop_y = (a.resized_h - out_h) / 2;
  a.out_w = out_w;
  a.out_h = out_h;
  a.K.fx = K.fx * a.scale;
  a.K.fy = K.fy * a.scale;
  a.K.cx = (K.cx + 0.5) * a.scale - 0.5 - a.crop_x;
  a.K.cy = (K.cy + 0.5) * a.scale - 0.5 - a.crop_y;
  return a;
}

namespace detail {

// source coordinate of an output pixel center, pixel-center convention
inline double align_src_coord(int out_coord, int crop, double scale) {
  return (out_coord + crop + 0.5) / scale - 0.5;
}

}  // namespace detail

inline Image align_image(const Image &img, const FocalAlignment &a) {
  if (img.width != a.src_w || img.height != a.src_h)
    throw usage_error("alignment: image size differs from the plan");
  Image out(a.out_w, a.out_h, img.channels, 0.0);
  for (int y = 0; y < a.out_h; ++y) {
    double sv = std::clamp(detail::align_src_coord(y, a.crop_y, a.scale), 0.0,
                           a.src_h - 1.0);
    int v0 = static_cast<int>(sv);
    int v1 = std::min(v0 + 1, a.src_h - 1);
    double fv = sv - v0;
    for (int u = 0; u < a.out_w; ++u) {
      double su = std::clamp(detail::align_src_coord(u, a.crop_x, a.scale),
                             0.0, a.src_w - 1.0);
      int u0 = static_cast<int>(su);
      int u1 = std::min(u0 + 1, a.src_w - 1);
      double fu = su - u0;
      for (int c = 0; c < img.channels; ++c) {
        double top =
            (1 - fu) * img.at(u0, v0, c) + fu * img.at(u1, v0, c);
        double bot =
            (1 - fu) * img.at(u0, v1, c) + fu * img.at(u1, v1, c);
        out.at(u, y, c) = (1 - fv) * top + fv * bot;
      }
    }
  }
  return out;
}

namespace detail {

template <typename G>
G align_nearest(const G &g, const FocalAlignment &a) {
  if (g.width != a.src_w || g.height != a.src_h)
    throw usage_error("alignment: grid size differs from the plan");
  G out(a.out_w, a.out_h);
  for (int y = 0; y < a.out_h; ++y) {
    int sv = static_cast<int>(std::lround(
        std::clamp(align_src_coord(y, a.crop_y, a.scale), 0.0, a.src_h - 1.0)));
    for (int u = 0; u < a.out_w; ++u) {
      int su = static_cast<int>(std::lround(std::clamp(
          align_src_coord(u, a.crop_x, a.scale), 0.0, a.src_w - 1.0)));
      out.at(u, y) = g.at(su, sv);
    }
  }
  return out;
}

}  // namespace detail

inline DepthMap align_depth(const DepthMap &d, const FocalAlignment &a) {
  return detail::align_nearest(d, a);
}

inline Mask align_mask(const Mask &m, const FocalAlignment &a) {
  return detail::align_nearest(m, a);
}

}  // namespace camh
