// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "camh/core.hpp"

namespace camh {

// Viewing ray through pixel center, unnormalized with z = 1, so that
// backproject(u, v, d) = d * pixel_ray(u, v) has z-depth exactly d.
inline Vec3 pixel_ray(double u, double v, const Intrinsics &K) {
  return {(u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0};
}

inline Vec3 backproject(double u, double v, double d, const Intrinsics &K) {
  if (!depth_valid(d)) throw usage_error("backproject: nonpositive or NaN depth");
  return pixel_ray(u, v, K) * d;
}

struct PixelCoord {
  double u = 0.0, v = 0.0;
};

inline PixelCoord project(const Vec3 &x, const Intrinsics &K) {
  if (!(x.z > 0.0)) throw numeric_error("project: point behind camera");
  return {K.fx * x.x / x.z + K.cx, K.fy * x.y / x.z + K.cy};
}

struct NormalMap {
  Grid<Vec3> normal;
  Mask valid;
};

namespace detail {
// 8-neighborhood in fixed order E, NE, N, NW, W, SW, S, SE (image v grows
// downward, so N is v-1). Cross products pair each arm with the arm two
// steps ahead; adjacent arms would give near-parallel vectors on the axes.
constexpr int kNbrDu[8] = {1, 1, 0, -1, -1, -1, 0, 1};
constexpr int kNbrDv[8] = {0, -1, -1, -1, 0, 1, 1, 1};
}  // namespace detail

// Per-pixel unit surface normals oriented toward the camera. A pixel is
// valid only when it is interior, it and all 8 neighbours carry valid
// depth, and the summed cross products are not degenerate.
inline NormalMap normal_map(const DepthMap &depth, const Intrinsics &K) {
  K.validate();
  const int w = depth.width, h = depth.height;
  NormalMap out;
  out.normal = Grid<Vec3>(w, h);
  out.valid = Mask(w, h, 0);

  parallel_for(h, [&](int y) {
    if (y == 0 || y == h - 1) return;
    for (int u = 1; u < w - 1; ++u) {
      double dp = depth.at(u, y);
      if (!depth_valid(dp)) continue;
      Vec3 arm[8];
      bool ok = true;
      for (int k = 0; k < 8; ++k) {
        int uu = u + detail::kNbrDu[k], vv = y + detail::kNbrDv[k];
        double dn = depth.at(uu, vv);
        if (!depth_valid(dn)) {
          ok = false;
          break;
        }
        arm[k] = pixel_ray(uu, vv, K) * dn;
      }
      if (!ok) continue;
      Vec3 phi = pixel_ray(u, y, K) * dp;
      Vec3 m{};
      for (int k = 0; k < 8; ++k) {
        const Vec3 &a = arm[k];
        const Vec3 &b = arm[(k + 2) % 8];
        m += (a - phi).cross(b - phi);
      }
      double len = m.norm();
      if (!(len > 0.0) || !std::isfinite(len)) continue;
      Vec3 n = m / len;
      if (n.dot(phi) > 0.0) n = -n;
      out.normal.at(u, y) = n;
      out.valid.at(u, y) = 1;
    }
  });
  return out;
}

}  // namespace camh
