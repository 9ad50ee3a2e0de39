// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "camh/camheight.hpp"
#include "camh/geometry.hpp"

namespace camh {

struct LossWeights {
  double lambda_pe = 0.85;  // SSIM/L1 mix in the photometric error
  double alpha = 0.01;      // camera-height term weight
  double beta = 0.5;        // auxiliary depth term weight
  double eps = 0.005;       // floor for the auxiliary schedule
  int tau_mid = 20;         // epoch where the schedules level off

  void validate() const {
    if (!(lambda_pe > 0.0) || !(lambda_pe < 1.0))
      throw usage_error("weights: lambda_pe must lie in (0,1)");
    if (!(alpha > 0.0) || !(beta > 0.0) || !(eps > 0.0))
      throw usage_error("weights: alpha, beta, eps must be positive");
    if (tau_mid < 1) throw usage_error("weights: tau_mid must be >= 1");
  }
};

namespace detail {

inline int reflect(int i, int n) {
  if (n == 1) return 0;
  if (i < 0) return -i;
  if (i >= n) return 2 * n - 2 - i;
  return i;
}

// 3x3 box mean with reflect padding, one channel.
inline void box3_mean(const Image &img, int ch, Grid<double> &out) {
  const int w = img.width, h = img.height;
  for (int y = 0; y < h; ++y)
    for (int u = 0; u < w; ++u) {
      double s = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int du = -1; du <= 1; ++du)
          s += img.at(reflect(u + du, w), reflect(y + dy, h), ch);
      out.at(u, y) = s / 9.0;
    }
}

}  // namespace detail

// Windowed SSIM with a 3x3 uniform window, C1 = 0.01^2, C2 = 0.03^2 and
// reflect padding; channels are averaged into one map.
inline Grid<double> ssim(const Image &a, const Image &b) {
  if (!a.same_shape(b)) throw usage_error("ssim: image shapes differ");
  const int w = a.width, h = a.height;
  const double C1 = 0.01 * 0.01, C2 = 0.03 * 0.03;
  Grid<double> out(w, h, 0.0);
  Grid<double> mu_a(w, h), mu_b(w, h);
  Image a2(w, h, 1), b2(w, h, 1), ab(w, h, 1);
  Grid<double> m_a2(w, h), m_b2(w, h), m_ab(w, h);
  for (int ch = 0; ch < a.channels; ++ch) {
    detail::box3_mean(a, ch, mu_a);
    detail::box3_mean(b, ch, mu_b);
    for (int y = 0; y < h; ++y)
      for (int u = 0; u < w; ++u) {
        double xa = a.at(u, y, ch), xb = b.at(u, y, ch);
        a2.at(u, y) = xa * xa;
        b2.at(u, y) = xb * xb;
        ab.at(u, y) = xa * xb;
      }
    detail::box3_mean(a2, 0, m_a2);
    detail::box3_mean(b2, 0, m_b2);
    detail::box3_mean(ab, 0, m_ab);
    for (int y = 0; y < h; ++y)
      for (int u = 0; u < w; ++u) {
        double ma = mu_a.at(u, y), mb = mu_b.at(u, y);
        double va = m_a2.at(u, y) - ma * ma;
        double vb = m_b2.at(u, y) - mb * mb;
        double cov = m_ab.at(u, y) - ma * mb;
        double s = ((2.0 * ma * mb + C1) * (2.0 * cov + C2)) /
                   ((ma * ma + mb * mb + C1) * (va + vb + C2));
        out.at(u, y) += s / a.channels;
      }
  }
  return out;
}

// pe = (lambda/2)(1 - SSIM) + (1 - lambda) |a - b|, L1 averaged over channels.
inline Grid<double> photometric_error(const Image &a, const Image &b,
                                      double lambda_pe = 0.85) {
  if (!a.same_shape(b)) throw usage_error("photometric_error: image shapes differ");
  Grid<double> s = ssim(a, b);
  Grid<double> out(a.width, a.height, 0.0);
  for (int y = 0; y < a.height; ++y)
    for (int u = 0; u < a.width; ++u) {
      double l1 = 0.0;
      for (int c = 0; c < a.channels; ++c)
        l1 += std::abs(a.at(u, y, c) - b.at(u, y, c));
      l1 /= a.channels;
      out.at(u, y) =
          lambda_pe / 2.0 * (1.0 - s.at(u, y)) + (1.0 - lambda_pe) * l1;
    }
  return out;
}

struct WarpResult {
  Image image;
  Mask valid;
};

// Synthesize the target view from a source image: back-project each target
// pixel with its depth, move it by the target-to-source pose, project, and
// sample bilinearly. Pixels leaving the source frustum are flagged invalid;
// their slots are still filled (border-clamped sample, or the source pixel
// itself when the geometry is undefined) so windowed scores computed next to
// the validity boundary never see an artificial cliff.
inline WarpResult warp_view(const Image &source, const DepthMap &target_depth,
                            const RelativePose &t2s, const Intrinsics &K) {
  t2s.validate();
  K.validate();
  const int w = target_depth.width, h = target_depth.height;
  if (source.width != w || source.height != h)
    throw usage_error("warp_view: source and depth dimensions differ");
  WarpResult out;
  out.image = Image(w, h, source.channels, 0.0);
  out.valid = Mask(w, h, 0);
  parallel_for(h, [&](int y) {
    for (int u = 0; u < w; ++u) {
      double us = u, vs = y;
      bool ok = false;
      double d = target_depth.at(u, y);
      if (depth_valid(d)) {
        Vec3 xs = t2s.rotation * (pixel_ray(u, y, K) * d) + t2s.translation;
        if (xs.z > 1e-9) {
          double pu = K.fx * xs.x / xs.z + K.cx;
          double pv = K.fy * xs.y / xs.z + K.cy;
          if (std::isfinite(pu) && std::isfinite(pv)) {
            ok = pu >= 0.0 && pu <= w - 1.0 && pv >= 0.0 && pv <= h - 1.0;
            us = std::clamp(pu, 0.0, w - 1.0);
            vs = std::clamp(pv, 0.0, h - 1.0);
          }
        }
      }
      int u0 = static_cast<int>(us), v0 = static_cast<int>(vs);
      int u1 = std::min(u0 + 1, w - 1), v1 = std::min(v0 + 1, h - 1);
      double fu = us - u0, fv = vs - v0;
      for (int c = 0; c < source.channels; ++c) {
        double top = (1 - fu) * source.at(u0, v0, c) + fu * source.at(u1, v0, c);
        double bot = (1 - fu) * source.at(u0, v1, c) + fu * source.at(u1, v1, c);
        out.image.at(u, y, c) = (1 - fv) * top + fv * bot;
      }
      out.valid.at(u, y) = ok ? 1 : 0;
    }
  });
  return out;
}

// Per-pixel minimum photometric error across warped sources, masked against
// pixels that a raw (unwarped) source already explains at least as well.
// Nullopt when no pixel survives, e.g. a static camera under auto-masking.
inline std::optional<double> reconstruction_loss(
    const Image &target, std::span<const Image> sources,
    std::span<const WarpResult> warps, bool automask,
    double lambda_pe = 0.85) {
  if (sources.empty() || sources.size() != warps.size())
    throw usage_error("reconstruction_loss: need matching sources and warps");
  const int w = target.width, h = target.height;

  std::vector<Grid<double>> warp_pe, ident_pe;
  warp_pe.reserve(warps.size());
  for (const auto &wr : warps) {
    if (!wr.image.same_shape(target))
      throw usage_error("reconstruction_loss: warp shape mismatch");
    warp_pe.push_back(photometric_error(target, wr.image, lambda_pe));
  }
  if (automask) {
    ident_pe.reserve(sources.size());
    for (const auto &s : sources)
      ident_pe.push_back(photometric_error(target, s, lambda_pe));
  }

  double sum = 0.0;
  long count = 0;
  for (int y = 0; y < h; ++y)
    for (int u = 0; u < w; ++u) {
      double best = std::numeric_limits<double>::infinity();
      for (size_t s = 0; s < warps.size(); ++s)
        if (warps[s].valid.at(u, y))
          best = std::min(best, warp_pe[s].at(u, y));
      if (!std::isfinite(best)) continue;
      if (automask) {
        double ident = std::numeric_limits<double>::infinity();
        for (const auto &ip : ident_pe) ident = std::min(ident, ip.at(u, y));
        if (!(best < ident)) continue;
      }
      sum += best;
      ++count;
    }
  if (count == 0) return std::nullopt;
  return sum / count;
}

// Edge-aware first-order smoothness on mean-normalized disparity. The x and
// y terms are averaged over their own pair counts and added. Pixels with
// nonpositive or non-finite disparity are left out.
inline double smoothness_loss(const Grid<double> &disparity,
                              const Image &image) {
  const int w = disparity.width, h = disparity.height;
  if (image.width != w || image.height != h)
    throw usage_error("smoothness_loss: image and disparity dimensions differ");
  auto ok = [&](int u, int y) {
    double d = disparity.at(u, y);
    return std::isfinite(d) && d > 0.0;
  };
  double mean = 0.0;
  long n = 0;
  for (int y = 0; y < h; ++y)
    for (int u = 0; u < w; ++u)
      if (ok(u, y)) {
        mean += disparity.at(u, y);
        ++n;
      }
  if (n == 0 || !(mean > 0.0))
    throw usage_error("smoothness_loss: disparity has no positive pixels");
  mean /= n;

  auto grad_img = [&](int u, int y, int u2, int y2) {
    double g = 0.0;
    for (int c = 0; c < image.channels; ++c)
      g += std::abs(image.at(u2, y2, c) - image.at(u, y, c));
    return g / image.channels;
  };

  double sx = 0.0, sy = 0.0;
  long nx = 0, ny = 0;
  for (int y = 0; y < h; ++y)
    for (int u = 0; u < w; ++u) {
      if (!ok(u, y)) continue;
      if (u + 1 < w && ok(u + 1, y)) {
        double dd = std::abs(disparity.at(u + 1, y) - disparity.at(u, y)) / mean;
        sx += dd * std::exp(-grad_img(u, y, u + 1, y));
        ++nx;
      }
      if (y + 1 < h && ok(u, y + 1)) {
        double dd = std::abs(disparity.at(u, y + 1) - disparity.at(u, y)) / mean;
        sy += dd * std::exp(-grad_img(u, y, u, y + 1));
        ++ny;
      }
    }
  double loss = 0.0;
  if (nx > 0) loss += sx / nx;
  if (ny > 0) loss += sy / ny;
  return loss;
}

// Mean absolute gap between per-pixel camera heights and the supervision
// value, over valid road pixels. Nullopt when the frame has none.
inline std::optional<double> camera_height_loss(const HeightMap &heights,
                                                const Mask &road,
                                                double hstar) {
  if (!(hstar > 0.0)) throw usage_error("camera_height_loss: H* must be positive");
  if (!heights.value.same_size(road.width, road.height))
    throw usage_error("camera_height_loss: dimension mismatch");
  double sum = 0.0;
  long count = 0;
  for (int y = 0; y < road.height; ++y)
    for (int u = 0; u < road.width; ++u)
      if (road.at(u, y) && heights.valid.at(u, y)) {
        sum += std::abs(heights.value.at(u, y) - hstar);
        ++count;
      }
  if (count == 0) return std::nullopt;
  return sum / count;
}

// Rough depth anchor per object: a prior-height object spanning h_obj pixel
// rows sits near depth (H_obj / h_obj) * fy. The loss is the mean absolute
// deviation from that anchor inside each mask, averaged over objects.
inline std::optional<double> aux_geometric_loss(
    const DepthMap &depth, std::span<const ObjectInstance> objects,
    std::span<const double> priors, const Intrinsics &K) {
  if (objects.size() != priors.size())
    throw usage_error("aux_geometric_loss: priors must align with objects");
  double total = 0.0;
  int used = 0;
  for (size_t k = 0; k < objects.size(); ++k) {
    const ObjectInstance &obj = objects[k];
    double prior = priors[k];
    if (!(prior > 0.0) || !std::isfinite(prior)) continue;
    int h_obj = obj.bbox.span_rows();
    if (h_obj <= 0) continue;
    double d_aprx = prior / h_obj * K.fy;
    double sum = 0.0;
    long count = 0;
    for (int y = obj.bbox.min_v; y <= obj.bbox.max_v; ++y)
      for (int u = obj.bbox.min_u; u <= obj.bbox.max_u; ++u) {
        if (!obj.mask.at(u, y)) continue;
        double d = depth.at(u, y);
        if (!depth_valid(d)) continue;
        sum += std::abs(d - d_aprx);
        ++count;
      }
    if (count == 0) continue;
    total += sum / count;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return total / used;
}

struct ScheduleWeights {
  double lambda_aux = 0.0;
  double lambda_cam = 0.0;
};

// Logarithmic ramp: the camera-height weight climbs 0 -> 1 over tau_mid
// epochs while the auxiliary weight decays 1 -> eps, then both hold. The
// literal_aux variant keeps the negated ramp some derivations state; it is
// provided for comparison only.
inline ScheduleWeights loss_weight_schedule(int tau, int tau_mid, double eps,
                                            bool literal_aux = false) {
  if (tau < 0) throw usage_error("schedule: epoch must be >= 0");
  if (tau_mid < 1) throw usage_error("schedule: tau_mid must be >= 1");
  if (!(eps > 0.0)) throw usage_error("schedule: eps must be positive");
  double ramp = std::log(static_cast<double>(tau) + 1.0) /
                std::log(static_cast<double>(tau_mid) + 1.0);
  ScheduleWeights sw;
  sw.lambda_cam = tau >= tau_mid ? 1.0 : ramp;
  if (literal_aux)
    sw.lambda_aux = tau > tau_mid ? eps : -ramp;
  else
    sw.lambda_aux = tau > tau_mid ? eps : std::max(eps, 1.0 - ramp);
  return sw;
}

struct LossBreakdown {
  std::optional<double> rec, sm, cam, aux;
  double lambda_aux = 0.0;
  double lambda_cam = 0.0;
  double total = 0.0;
};

// total = alpha * lambda_cam * L_cam + beta * lambda_aux * L_aux + L_sm + L_rec,
// with absent components contributing nothing.
inline LossBreakdown total_loss(std::optional<double> rec,
                                std::optional<double> sm,
                                std::optional<double> cam,
                                std::optional<double> aux,
                                const LossWeights &wts, int tau,
                                bool literal_aux = false) {
  wts.validate();
  for (const auto &c : {rec, sm, cam, aux})
    if (c && !std::isfinite(*c))
      throw numeric_error("total_loss: non-finite component");
  LossBreakdown b;
  b.rec = rec;
  b.sm = sm;
  b.cam = cam;
  b.aux = aux;
  ScheduleWeights sw = loss_weight_schedule(tau, wts.tau_mid, wts.eps, literal_aux);
  b.lambda_aux = sw.lambda_aux;
  b.lambda_cam = sw.lambda_cam;
  b.total = wts.alpha * b.lambda_cam * cam.value_or(0.0) +
            wts.beta * b.lambda_aux * aux.value_or(0.0) + sm.value_or(0.0) +
            rec.value_or(0.0);
  if (!std::isfinite(b.total)) throw numeric_error("total_loss: non-finite total");
  return b;
}

// Inputs for the metric-scale supervision terms (camera height + auxiliary
// object depth) and their gradients.
struct SupervisionTerms {
  std::optional<double> hstar;
  std::span<const ObjectInstance> objects;
  std::span<const double> priors;
  LossWeights weights{};
  int tau = 0;
  bool literal_aux = false;
};

namespace detail {

inline double sgn0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Shared walk over the supervised terms. Visitors:
//   cam(p_u, p_v, coef, arms...)  via callback on each valid road pixel
//   aux(p_u, p_v, coef_k, anchor) on each valid object pixel
template <typename CamFn, typename AuxFn>
void walk_supervision(const DepthMap &depth, const Intrinsics &K,
                      const Mask &road, const SupervisionTerms &t,
                      double &value_out, CamFn &&cam_pixel, AuxFn &&aux_pixel,
                      bool &cam_defined, bool &aux_defined) {
  t.weights.validate();
  K.validate();
  const int w = depth.width, h = depth.height;
  if (!road.same_size(w, h))
    throw usage_error("supervision: road mask dimension mismatch");
  ScheduleWeights sw =
      loss_weight_schedule(t.tau, t.weights.tau_mid, t.weights.eps, t.literal_aux);

  value_out = 0.0;
  cam_defined = false;
  aux_defined = false;

  if (t.hstar) {
    if (!(*t.hstar > 0.0)) throw usage_error("supervision: H* must be positive");
    // First pass counts valid road pixels so per-pixel weights are exact.
    NormalMap nm = normal_map(depth, K);
    long n_valid = 0;
    for (int y = 0; y < h; ++y)
      for (int u = 0; u < w; ++u)
        if (road.at(u, y) && nm.valid.at(u, y) && depth_valid(depth.at(u, y)))
          ++n_valid;
    if (n_valid > 0) {
      cam_defined = true;
      double wcam = t.weights.alpha * sw.lambda_cam;
      double cam_sum = 0.0;
      for (int y = 0; y < h; ++y)
        for (int u = 0; u < w; ++u) {
          if (!(road.at(u, y) && nm.valid.at(u, y) &&
                depth_valid(depth.at(u, y))))
            continue;
          Vec3 phi = pixel_ray(u, y, K) * depth.at(u, y);
          double hp = -phi.dot(nm.normal.at(u, y));
          cam_sum += std::abs(hp - *t.hstar);
          cam_pixel(u, y, wcam / n_valid, hp, nm.normal.at(u, y));
        }
      value_out += wcam * cam_sum / n_valid;
    }
  }

  if (!t.objects.empty()) {
    if (t.objects.size() != t.priors.size())
      throw usage_error("supervision: priors must align with objects");
    // Count usable objects first so the 1/K factor is exact.
    std::vector<long> counts(t.objects.size(), 0);
    std::vector<double> anchors(t.objects.size(), 0.0);
    int used = 0;
    for (size_t k = 0; k < t.objects.size(); ++k) {
      const ObjectInstance &obj = t.objects[k];
      if (!(t.priors[k] > 0.0) || obj.bbox.span_rows() <= 0) continue;
      long c = 0;
      for (int y = obj.bbox.min_v; y <= obj.bbox.max_v; ++y)
        for (int u = obj.bbox.min_u; u <= obj.bbox.max_u; ++u)
          if (obj.mask.at(u, y) && depth_valid(depth.at(u, y))) ++c;
      if (c == 0) continue;
      counts[k] = c;
      anchors[k] = t.priors[k] / obj.bbox.span_rows() * K.fy;
      ++used;
    }
    if (used > 0) {
      aux_defined = true;
      double waux = t.weights.beta * sw.lambda_aux;
      for (size_t k = 0; k < t.objects.size(); ++k) {
        if (counts[k] == 0) continue;
        const ObjectInstance &obj = t.objects[k];
        double coef = waux / (static_cast<double>(used) * counts[k]);
        double sum = 0.0;
        for (int y = obj.bbox.min_v; y <= obj.bbox.max_v; ++y)
          for (int u = obj.bbox.min_u; u <= obj.bbox.max_u; ++u) {
            if (!obj.mask.at(u, y)) continue;
            double d = depth.at(u, y);
            if (!depth_valid(d)) continue;
            sum += std::abs(d - anchors[k]);
            aux_pixel(u, y, coef, anchors[k]);
          }
        value_out += coef * sum;
      }
    }
  }
}

}  // namespace detail

// Value of alpha*lambda_cam*L_cam + beta*lambda_aux*L_aux at the given depth.
inline double supervised_scale_loss(const DepthMap &depth, const Intrinsics &K,
                                    const Mask &road,
                                    const SupervisionTerms &t) {
  double value = 0.0;
  bool cam_def = false, aux_def = false;
  detail::walk_supervision(
      depth, K, road, t, value, [](int, int, double, double, const Vec3 &) {},
      [](int, int, double, double) {}, cam_def, aux_def);
  if (!cam_def && !aux_def)
    throw numeric_error("supervised loss undefined: no usable terms");
  return value;
}

// Analytic gradient of the supervised terms with respect to per-pixel depth.
// The camera-height term needs the chain through the normal estimate: with
// m the summed cross product, n = sigma*m/|m| and P = I - n n^T,
//   dH/dd_p = -r_p.n - sigma*(P phi/|m|) . dm/dd_p
// and each neighbour enters through dm via its two cross-product pairs.
// Ties of |.| get subgradient 0.
inline Grid<double> loss_gradient(const DepthMap &depth, const Intrinsics &K,
                                  const Mask &road,
                                  const SupervisionTerms &t) {
  const int w = depth.width, h = depth.height;
  Grid<double> grad(w, h, 0.0);
  double value = 0.0;
  bool cam_def = false, aux_def = false;

  auto cam_pixel = [&](int u, int y, double coef, double hp, const Vec3 &n) {
    double s = detail::sgn0(hp - *t.hstar);
    if (s == 0.0) return;
    double cs = coef * s;
    Vec3 phi = pixel_ray(u, y, K) * depth.at(u, y);
    // Rebuild the cross-product sum to get its norm and orientation sign.
    Vec3 arm[8];
    Vec3 ray[8];
    for (int k = 0; k < 8; ++k) {
      int uu = u + detail::kNbrDu[k], vv = y + detail::kNbrDv[k];
      ray[k] = pixel_ray(uu, vv, K);
      arm[k] = ray[k] * depth.at(uu, vv);
    }
    Vec3 m{};
    for (int k = 0; k < 8; ++k)
      m += (arm[k] - phi).cross(arm[(k + 2) % 8] - phi);
    double mlen = m.norm();
    if (!(mlen > 0.0)) return;
    Vec3 n0 = m / mlen;
    double sigma = n0.dot(phi) > 0.0 ? -1.0 : 1.0;  // n = sigma * n0
    Vec3 wv = (phi - n0 * n0.dot(phi)) / mlen;      // P phi / |m|
    Vec3 rp = pixel_ray(u, y, K);

    // dH/dd_p: direct ray term plus dm/dd_p = sum_k r_p x (arm_a - arm_b)
    Vec3 dm_dp{};
    for (int k = 0; k < 8; ++k)
      dm_dp += rp.cross(arm[k] - arm[(k + 2) % 8]);
    grad.at(u, y) += cs * (-rp.dot(n) - sigma * wv.dot(dm_dp));

    // neighbour q contributes r_q x (arm_b - phi) when first in a pair and
    // (arm_a - phi) x r_q when second
    for (int k = 0; k < 8; ++k) {
      int a = k, b = (k + 2) % 8;
      Vec3 da = ray[a].cross(arm[b] - phi);
      grad.at(u + detail::kNbrDu[a], y + detail::kNbrDv[a]) +=
          cs * (-sigma * wv.dot(da));
      Vec3 db = (arm[a] - phi).cross(ray[b]);
      grad.at(u + detail::kNbrDu[b], y + detail::kNbrDv[b]) +=
          cs * (-sigma * wv.dot(db));
    }
  };
  auto aux_pixel = [&](int u, int y, double coef, double anchor) {
    grad.at(u, y) += coef * detail::sgn0(depth.at(u, y) - anchor);
  };
  detail::walk_supervision(depth, K, road, t, value, cam_pixel, aux_pixel,
                           cam_def, aux_def);
  if (!cam_def && !aux_def)
    throw numeric_error("supervised loss undefined: no usable terms");
  return grad;
}

// Gradient with respect to a global log-scale applied to the whole depth
// map: with D(s) = e^s * D, dL/ds = sum_p dL/dD_p * D_p.
inline double loss_gradient_log_scale(const DepthMap &depth,
                                      const Intrinsics &K, const Mask &road,
                                      const SupervisionTerms &t) {
  Grid<double> g = loss_gradient(depth, K, road, t);
  double s = 0.0;
  for (int y = 0; y < depth.height; ++y)
    for (int u = 0; u < depth.width; ++u) {
      double d = depth.at(u, y);
      if (depth_valid(d)) s += g.at(u, y) * d;
    }
  return s;
}

}  // namespace camh
