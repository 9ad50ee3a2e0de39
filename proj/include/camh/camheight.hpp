// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>

#include "camh/geometry.hpp"

namespace camh {

struct HeightMap {
  Grid<double> value;
  Mask valid;
};

struct FrameCameraHeight {
  double value = 0.0;
  bool scaled = false;
};

// Camera height above the local tangent plane at every road pixel:
// H'(p) = -phi(p).n(p). Valid only where the mask, depth and normal agree.
inline HeightMap per_pixel_camera_height(const DepthMap &depth,
                                         const NormalMap &normals,
                                         const Mask &road,
                                         const Intrinsics &K) {
  const int w = depth.width, h = depth.height;
  if (!normals.valid.same_size(w, h) || !road.same_size(w, h))
    throw usage_error("per_pixel_camera_height: dimension mismatch");
  HeightMap out;
  out.value = Grid<double>(w, h, 0.0);
  out.valid = Mask(w, h, 0);
  parallel_for(h, [&](int y) {
    for (int u = 0; u < w; ++u) {
      if (!road.at(u, y) || !normals.valid.at(u, y)) continue;
      double d = depth.at(u, y);
      if (!depth_valid(d)) continue;
      Vec3 phi = pixel_ray(u, y, K) * d;
      out.value.at(u, y) = -phi.dot(normals.normal.at(u, y));
      out.valid.at(u, y) = 1;
    }
  });
  return out;
}

// Median height over valid road pixels. Nullopt marks a frame that cannot
// contribute (empty road region or degenerate heights); callers skip it.
inline std::optional<FrameCameraHeight> frame_camera_height(
    const HeightMap &heights) {
  std::vector<double> vals;
  vals.reserve(256);
  for (int y = 0; y < heights.value.height; ++y)
    for (int u = 0; u < heights.value.width; ++u)
      if (heights.valid.at(u, y)) vals.push_back(heights.value.at(u, y));
  if (vals.empty()) return std::nullopt;
  double m = median(std::move(vals));
  if (!(m > 0.0) || !std::isfinite(m)) return std::nullopt;
  return FrameCameraHeight{m, false};
}

// Shared road-plane normal: component-wise median over valid road normals,
// renormalized. Nullopt when the set is empty or the median degenerates.
inline std::optional<Vec3> road_normal(const NormalMap &normals,
                                       const Mask &road) {
  if (!normals.valid.same_size(road.width, road.height))
    throw usage_error("road_normal: dimension mismatch");
  std::vector<double> xs, ys, zs;
  for (int y = 0; y < road.height; ++y)
    for (int u = 0; u < road.width; ++u)
      if (road.at(u, y) && normals.valid.at(u, y)) {
        const Vec3 &n = normals.normal.at(u, y);
        xs.push_back(n.x);
        ys.push_back(n.y);
        zs.push_back(n.z);
      }
  if (xs.empty()) return std::nullopt;
  Vec3 m{median(std::move(xs)), median(std::move(ys)), median(std::move(zs))};
  double len = m.norm();
  if (!(len > 1e-12)) return std::nullopt;
  return m / len;
}

}  // namespace camh
