// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>

#include "camh/camheight.hpp"

namespace camh {

struct SilhouetteMeasurement {
  int object_id = 0;
  double height = 0.0;  // unscaled meters
  bool valid = false;
};

struct FrameScale {
  double s = 1.0;
  int count = 0;  // contributing objects
};

// Tallest point of the instance above the ground plane {x : n.x + H = 0},
// measured along the plane normal. Projecting the silhouette onto a plane
// parallel to n preserves this distance, so the projection step reduces to
// a per-pixel height evaluation.
inline SilhouetteMeasurement silhouette_height(const DepthMap &depth,
                                               const Intrinsics &K,
                                               const ObjectInstance &obj,
                                               const Vec3 &road_n,
                                               double cam_height_unscaled) {
  if (!depth.same_size(obj.mask.width, obj.mask.height))
    throw usage_error("silhouette_height: dimension mismatch");
  SilhouetteMeasurement out;
  out.object_id = obj.id;
  double best = -std::numeric_limits<double>::infinity();
  for (int y = obj.bbox.min_v; y <= obj.bbox.max_v; ++y)
    for (int u = obj.bbox.min_u; u <= obj.bbox.max_u; ++u) {
      if (!obj.mask.at(u, y)) continue;
      double d = depth.at(u, y);
      if (!depth_valid(d)) continue;
      Vec3 phi = pixel_ray(u, y, K) * d;
      best = std::max(best, road_n.dot(phi) + cam_height_unscaled);
    }
  if (std::isfinite(best) && best > 0.0) {
    out.height = best;
    out.valid = true;
  }
  return out;
}

// Median of per-object scale factors prior/measured. Objects with invalid
// measurements or missing priors (NaN or nonpositive) are skipped; nullopt
// when nothing contributes.
inline std::optional<FrameScale> frame_scale_factor(
    std::span<const SilhouetteMeasurement> measurements,
    std::span<const double> priors) {
  if (measurements.size() != priors.size())
    throw usage_error("frame_scale_factor: priors must align with measurements");
  std::vector<double> ratios;
  for (size_t i = 0; i < measurements.size(); ++i) {
    if (!measurements[i].valid) continue;
    double p = priors[i];
    if (!std::isfinite(p) || !(p > 0.0)) continue;
    ratios.push_back(p / measurements[i].height);
  }
  if (ratios.empty()) return std::nullopt;
  int n = static_cast<int>(ratios.size());
  return FrameScale{median(std::move(ratios)), n};
}

inline FrameCameraHeight scaled_camera_height(double cam_height_unscaled,
                                              const FrameScale &scale) {
  if (!(cam_height_unscaled > 0.0) || !(scale.s > 0.0))
    throw usage_error("scaled_camera_height: inputs must be positive");
  return FrameCameraHeight{scale.s * cam_height_unscaled, true};
}

}  // namespace camh
