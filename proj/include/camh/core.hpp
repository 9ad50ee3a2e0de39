// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace camh {

// Error taxonomy maps onto CLI exit codes:
//   usage_error   -> 1 (bad arguments / configuration / API misuse)
//   data_error    -> 2 (missing or malformed input files)
//   numeric_error -> 3 (degenerate geometry, failed optimization)
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct usage_error : error {
  using error::error;
};
struct data_error : error {
  using error::error;
};
struct numeric_error : error {
  using error::error;
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3 &o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3 &o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 &operator+=(const Vec3 &o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }

  double dot(const Vec3 &o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3 &o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
  }
};

inline Vec3 operator*(double s, const Vec3 &v) { return v * s; }

// Row-major 3x3 matrix.
struct Mat3 {
  double m[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};

  static Mat3 identity() { return {{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }

  double &operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  Vec3 operator*(const Vec3 &v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3 &o) const {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0;
        for (int k = 0; k < 3; ++k) s += (*this)(i, k) * o(k, j);
        r(i, j) = s;
      }
    return r;
  }
  Mat3 transposed() const {
    return {{m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]}};
  }
  double det() const {
    return m[0] * (m[4] * m[8] - m[5] * m[7]) -
           m[1] * (m[3] * m[8] - m[5] * m[6]) +
           m[2] * (m[3] * m[7] - m[4] * m[6]);
  }
};

// Pinhole intrinsics; pixel (u, v) has its center at continuous (u, v).
struct Intrinsics {
  double fx = 0.0, fy = 0.0, cx = 0.0, cy = 0.0;

  void validate() const {
    if (!(fx > 0.0) || !(fy > 0.0) || !std::isfinite(cx) || !std::isfinite(cy))
      throw usage_error("intrinsics: focal lengths must be positive and finite");
  }
};

// Rigid transform x' = R x + t.
struct RelativePose {
  Mat3 rotation = Mat3::identity();
  Vec3 translation;

  void validate() const {
    Mat3 rtr = rotation.transposed() * rotation;
    Mat3 id = Mat3::identity();
    for (int i = 0; i < 9; ++i)
      if (std::abs(rtr.m[i] - id.m[i]) > 1e-9)
        throw usage_error("pose: rotation is not orthonormal");
    if (std::abs(rotation.det() - 1.0) > 1e-9)
      throw usage_error("pose: rotation determinant must be +1");
  }
};

template <typename T>
struct Grid {
  int width = 0;
  int height = 0;
  std::vector<T> v;

  Grid() = default;
  Grid(int w, int h, T fill = T{}) : width(w), height(h) {
    if (w < 0 || h < 0) throw usage_error("grid: negative dimensions");
    v.assign(static_cast<size_t>(w) * static_cast<size_t>(h), fill);
  }

  bool empty() const { return width == 0 || height == 0; }
  bool in_bounds(int u, int y) const {
    return u >= 0 && u < width && y >= 0 && y < height;
  }
  T &at(int u, int y) { return v[static_cast<size_t>(y) * width + u]; }
  const T &at(int u, int y) const {
    return v[static_cast<size_t>(y) * width + u];
  }
  bool same_size(int w, int h) const { return width == w && height == h; }
};

using DepthMap = Grid<double>;
using Mask = Grid<std::uint8_t>;

inline bool depth_valid(double d) { return std::isfinite(d) && d > 0.0; }

// Interleaved-channel raster with values nominally in [0, 1].
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> v;

  Image() = default;
  Image(int w, int h, int c = 1, double fill = 0.0)
      : width(w), height(h), channels(c) {
    if (w < 0 || h < 0 || c < 1) throw usage_error("image: bad dimensions");
    v.assign(static_cast<size_t>(w) * h * c, fill);
  }

  double &at(int u, int y, int c = 0) {
    return v[(static_cast<size_t>(y) * width + u) * channels + c];
  }
  double at(int u, int y, int c = 0) const {
    return v[(static_cast<size_t>(y) * width + u) * channels + c];
  }
  bool same_shape(const Image &o) const {
    return width == o.width && height == o.height && channels == o.channels;
  }
};

// Inclusive pixel bounds. Heights and widths follow the row/column span
// convention (max - min), i.e. the distance between extreme pixel centers.
struct PixelBox {
  int min_u = 0, min_v = 0, max_u = 0, max_v = 0;

  int span_rows() const { return max_v - min_v; }
  int span_cols() const { return max_u - min_u; }
};

struct ObjectInstance {
  int id = 0;
  std::string label;
  Mask mask;
  PixelBox bbox;
};

inline ObjectInstance make_instance(int id, std::string label, Mask mask) {
  PixelBox b{INT32_MAX, INT32_MAX, INT32_MIN, INT32_MIN};
  bool any = false;
  for (int y = 0; y < mask.height; ++y)
    for (int u = 0; u < mask.width; ++u)
      if (mask.at(u, y)) {
        any = true;
        b.min_u = std::min(b.min_u, u);
        b.max_u = std::max(b.max_u, u);
        b.min_v = std::min(b.min_v, y);
        b.max_v = std::max(b.max_v, y);
      }
  if (!any) throw usage_error("instance mask is empty");
  return ObjectInstance{id, std::move(label), std::move(mask), b};
}

// Median with the midpoint convention for even counts.
inline double median(std::vector<double> values) {
  if (values.empty()) throw usage_error("median of empty set");
  size_t n = values.size();
  size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  double hi = values[mid];
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lo + hi);
}

// Worker cap: hardware concurrency, optionally lowered by CAMH_THREADS.
inline int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  int n = hw == 0 ? 1 : static_cast<int>(hw);
  if (const char *env = std::getenv("CAMH_THREADS")) {
    char *end = nullptr;
    long k = std::strtol(env, &end, 10);
    if (end != env && k >= 1 && k < n) n = static_cast<int>(k);
  }
  return n;
}

// Deterministic slot-wise parallel map: fn(i) must only touch state owned
// by index i. Falls back to a plain loop when one worker is available.
template <typename Fn>
void parallel_for(int n, Fn &&fn) {
  int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  for (auto &t : pool) t.join();
}

}  // namespace camh
