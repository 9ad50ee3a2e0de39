// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "camh/geometry.hpp"

namespace camh {

// Synthetic road scene: ground plane y = 0 in a y-up world, camera at
// (0, camera_height, 0) looking along +z, pitched down by pitch_deg.
// Boxes rest on the ground and may be yawed about the vertical axis.

struct BoxSpec {
  double x = 0.0;       // footprint centre, world x
  double z = 10.0;      // footprint centre, world z
  double width = 1.7;   // extent along local x
  double length = 4.0;  // extent along local z
  double height = 1.5;
  double yaw_deg = 0.0;
  std::string label = "car";
};

struct SceneConfig {
  int width = 640;
  int height = 192;
  Intrinsics K{500.0, 500.0, 320.0, 96.0};
  double camera_height = 1.65;
  double pitch_deg = 0.0;   // positive pitches the view down
  double depth_noise = 0.0; // sigma of multiplicative log-normal noise
  double max_depth = 300.0; // hits beyond this render as sky
  std::uint64_t seed = 0;
  std::vector<BoxSpec> boxes;
};

struct CameraPose {
  Mat3 cam_to_world = Mat3::identity();
  Vec3 center;
};

inline CameraPose scene_camera(const SceneConfig &cfg) {
  double t = cfg.pitch_deg * M_PI / 180.0;
  double c = std::cos(t), s = std::sin(t);
  // columns are the camera axes in world coordinates (x right, y down, z forward)
  Mat3 R{{1, 0, 0, 0, -c, -s, 0, -s, c}};
  return {R, {0.0, cfg.camera_height, 0.0}};
}

// Ground-plane upward normal expressed in the camera frame; satisfies
// n . x + camera_height = 0 for ground points x in camera coordinates.
inline Vec3 scene_road_normal(const SceneConfig &cfg) {
  double t = cfg.pitch_deg * M_PI / 180.0;
  return {0.0, -std::cos(t), -std::sin(t)};
}

struct RenderedScene {
  DepthMap depth;       // noise applied when configured
  DepthMap true_depth;  // noiseless z-depth
  Mask road;
  std::vector<ObjectInstance> instances;      // visible boxes, ids from 1
  std::vector<double> instance_true_height;   // aligned with instances
  Vec3 road_normal_cam;
  double camera_height = 0.0;
};

namespace detail {

inline std::optional<double> ray_box_local(const Vec3 &o, const Vec3 &d,
                                           const Vec3 &lo, const Vec3 &hi) {
  double t_enter = 0.0, t_exit = std::numeric_limits<double>::infinity();
  const double od[3] = {o.x, o.y, o.z};
  const double dd[3] = {d.x, d.y, d.z};
  const double lv[3] = {lo.x, lo.y, lo.z};
  const double hv[3] = {hi.x, hi.y, hi.z};
  for (int a = 0; a < 3; ++a) {
    if (std::abs(dd[a]) < 1e-15) {
      if (od[a] < lv[a] || od[a] > hv[a]) return std::nullopt;
      continue;
    }
    double t0 = (lv[a] - od[a]) / dd[a];
    double t1 = (hv[a] - od[a]) / dd[a];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit || t_enter <= 1e-12) return std::nullopt;
  return t_enter;
}

struct RayHit {
  double t = 0.0;  // equals z-depth because ray directions keep z = 1
  int box = -1;    // -1 for ground
  Vec3 world;
};

inline std::optional<RayHit> cast_ray(const SceneConfig &cfg,
                                      const CameraPose &cam, double u,
                                      double v) {
  Vec3 dc = pixel_ray(u, v, cfg.K);
  Vec3 dw = cam.cam_to_world * dc;
  std::optional<RayHit> best;

  if (dw.y < -1e-15) {
    double t = -cam.center.y / dw.y;
    if (t > 0.0 && t <= cfg.max_depth)
      best = RayHit{t, -1, cam.center + dw * t};
  }
  for (size_t b = 0; b < cfg.boxes.size(); ++b) {
    const BoxSpec &box = cfg.boxes[b];
    double psi = box.yaw_deg * M_PI / 180.0;
    double cp = std::cos(psi), sp = std::sin(psi);
    // into box frame: translate, then rotate by -yaw about world y
    Vec3 oc = cam.center - Vec3{box.x, 0.0, box.z};
    Vec3 ol{cp * oc.x - sp * oc.z, oc.y, sp * oc.x + cp * oc.z};
    Vec3 dl{cp * dw.x - sp * dw.z, dw.y, sp * dw.x + cp * dw.z};
    Vec3 lo{-box.width / 2, 0.0, -box.length / 2};
    Vec3 hi{box.width / 2, box.height, box.length / 2};
    auto t = ray_box_local(ol, dl, lo, hi);
    if (t && *t <= cfg.max_depth && (!best || *t < best->t))
      best = RayHit{*t, static_cast<int>(b), cam.center + dw * *t};
  }
  return best;
}

}  // namespace detail

inline RenderedScene render_scene(const SceneConfig &cfg) {
  cfg.K.validate();
  if (!(cfg.camera_height > 0.0))
    throw usage_error("scene: camera height must be positive");
  CameraPose cam = scene_camera(cfg);

  RenderedScene out;
  out.true_depth = DepthMap(cfg.width, cfg.height, 0.0);
  out.road = Mask(cfg.width, cfg.height, 0);
  out.road_normal_cam = scene_road_normal(cfg);
  out.camera_height = cfg.camera_height;

  Grid<int> hit_box(cfg.width, cfg.height, -2);
  parallel_for(cfg.height, [&](int y) {
    for (int u = 0; u < cfg.width; ++u) {
      auto hit = detail::cast_ray(cfg, cam, u, y);
      if (!hit) continue;
      out.true_depth.at(u, y) = hit->t;
      hit_box.at(u, y) = hit->box;
      if (hit->box < 0) out.road.at(u, y) = 1;
    }
  });

  out.depth = out.true_depth;
  if (cfg.depth_noise > 0.0) {
    parallel_for(cfg.height, [&](int y) {
      std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (y + 1)));
      std::normal_distribution<double> g(0.0, cfg.depth_noise);
      for (int u = 0; u < cfg.width; ++u) {
        double n = g(rng);
        if (depth_valid(out.depth.at(u, y)))
          out.depth.at(u, y) *= std::exp(n);
      }
    });
  }

  for (size_t b = 0; b < cfg.boxes.size(); ++b) {
    Mask m(cfg.width, cfg.height, 0);
    bool any = false;
    for (int y = 0; y < cfg.height; ++y)
      for (int u = 0; u < cfg.width; ++u)
        if (hit_box.at(u, y) == static_cast<int>(b)) {
          m.at(u, y) = 1;
          any = true;
        }
    if (!any) continue;
    ObjectInstance inst = make_instance(static_cast<int>(out.instances.size()) + 1,
                                        cfg.boxes[b].label, std::move(m));
    out.instances.push_back(std::move(inst));
    out.instance_true_height.push_back(cfg.boxes[b].height);
  }
  return out;
}

inline DepthMap apply_global_scale(const DepthMap &d, double k) {
  if (!(k > 0.0) || !std::isfinite(k))
    throw usage_error("depth scale must be positive and finite");
  DepthMap out = d;
  for (auto &x : out.v)
    if (depth_valid(x)) x *= k;
  return out;
}

// Smooth periodic albedo; low spatial frequency keeps bilinear resampling
// error well below photometric tolerances.
inline double procedural_texture(const Vec3 &pw) {
  return 0.5 + 0.2 * std::sin(0.8 * pw.x) * std::sin(0.7 * pw.z) +
         0.1 * std::sin(0.5 * pw.x + 0.6 * pw.z + 1.1 * pw.y);
}

struct RenderedView {
  Image image;
  DepthMap depth;
};

inline RenderedView render_view(const SceneConfig &cfg, const CameraPose &cam) {
  RenderedView out;
  out.image = Image(cfg.width, cfg.height, 1, 0.0);
  out.depth = DepthMap(cfg.width, cfg.height, 0.0);
  parallel_for(cfg.height, [&](int y) {
    for (int u = 0; u < cfg.width; ++u) {
      auto hit = detail::cast_ray(cfg, cam, u, y);
      if (!hit) continue;
      out.depth.at(u, y) = hit->t;
      out.image.at(u, y) = procedural_texture(hit->world);
    }
  });
  return out;
}

struct ViewPair {
  Image target;
  Image source;
  DepthMap target_depth;
  RelativePose target_to_source;
};

// Renders the same scene from the canonical camera and from a second camera
// displaced by the given target-to-source transform (x_s = R x_t + t).
inline ViewPair render_view_pair(const SceneConfig &cfg,
                                 const RelativePose &t2s) {
  t2s.validate();
  CameraPose target = scene_camera(cfg);
  CameraPose source;
  source.cam_to_world = target.cam_to_world * t2s.rotation.transposed();
  source.center = target.center - source.cam_to_world * t2s.translation;

  RenderedView tv = render_view(cfg, target);
  RenderedView sv = render_view(cfg, source);
  return {std::move(tv.image), std::move(sv.image), std::move(tv.depth), t2s};
}

}  // namespace camh
