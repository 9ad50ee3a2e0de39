// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "camh/core.hpp"

namespace camh {

inline constexpr double kOutlierThreshold = 0.2;

// Homogeneous image line a*u + b*v + c = 0.
struct HorizonLine {
  double a = 0.0, b = 0.0, c = 0.0;
};

// Image of the ground plane's points at infinity: l = K^{-T} n. Expanded so
// no matrix inverse is needed.
inline HorizonLine horizon_line(const Intrinsics &K, const Vec3 &n) {
  K.validate();
  double a = n.x / K.fx;
  double b = n.y / K.fy;
  double c = -n.x * K.cx / K.fx - n.y * K.cy / K.fy + n.z;
  if (std::hypot(a, b) < 1e-9)
    throw numeric_error("horizon_line: road normal parallel to optical axis");
  return {a, b, c};
}

inline double point_line_distance(const HorizonLine &l, double u, double v) {
  return std::abs(l.a * u + l.b * v + l.c) / std::hypot(l.a, l.b);
}

// Rough metric object height from image geometry alone: the object's pixel
// height relates to its distance below the horizon the same way the true
// height relates to the camera height. Nullopt when the object sits on the
// horizon (pixel distance < 1) and cannot be assessed.
inline std::optional<double> approx_object_height(const ObjectInstance &obj,
                                                  const HorizonLine &horizon,
                                                  double hstar_cam) {
  if (!(hstar_cam > 0.0))
    throw usage_error("approx_object_height: H* must be positive");
  double h_cam_px = 0.0;
  for (int y = obj.bbox.min_v; y <= obj.bbox.max_v; ++y)
    for (int u = obj.bbox.min_u; u <= obj.bbox.max_u; ++u)
      if (obj.mask.at(u, y))
        h_cam_px = std::max(h_cam_px, point_line_distance(horizon, u, y));
  if (h_cam_px < 1.0) return std::nullopt;
  double h_obj_px = obj.bbox.span_rows();
  return h_obj_px / h_cam_px * hstar_cam;
}

struct ObjectHeightPair {
  int id = 0;
  double prior = 0.0;   // trusted height
  double approx = 0.0;  // image-derived estimate
};

// Keeps objects whose prior and image-derived heights agree within the
// relative threshold; the comparison is strict, so a gap of exactly T stays.
inline std::vector<int> filter_outliers(std::span<const ObjectHeightPair> objs,
                                        double threshold = kOutlierThreshold) {
  if (!(threshold > 0.0)) throw usage_error("filter_outliers: threshold must be positive");
  std::vector<int> inliers;
  for (const auto &o : objs) {
    if (!(o.prior > 0.0)) continue;
    double gap = std::abs(o.prior - o.approx) / o.prior;
    if (!(gap > threshold)) inliers.push_back(o.id);
  }
  return inliers;
}

}  // namespace camh
