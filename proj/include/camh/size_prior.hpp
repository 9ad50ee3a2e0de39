// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "camh/core.hpp"

namespace camh {

// Default object-height prior for the car class, meters.
inline constexpr double kDefaultCarHeight = 1.59;

// Heights outside (0, 10) are treated as corrupt input.
inline constexpr double kMaxPriorHeight = 10.0;

struct Dimensions {
  double height = 0.0, width = 0.0, length = 0.0;
};

// Either a single fixed height for every object or a per-instance dimension
// table (typically produced by an external size predictor) with an optional
// fixed fallback for missing ids.
struct PriorSource {
  std::map<int, Dimensions> table;
  std::optional<double> fallback;
  bool use_table = false;

  static PriorSource fixed_height(double h) {
    check_height(h);
    PriorSource p;
    p.fallback = h;
    return p;
  }
  static PriorSource dimension_table(std::map<int, Dimensions> t,
                                     std::optional<double> fb = std::nullopt) {
    for (const auto &[id, d] : t) check_height(d.height);
    if (fb) check_height(*fb);
    PriorSource p;
    p.table = std::move(t);
    p.fallback = fb;
    p.use_table = true;
    return p;
  }

  static void check_height(double h) {
    if (!std::isfinite(h) || !(h > 0.0) || !(h < kMaxPriorHeight))
      throw usage_error("prior height out of range (0, 10)");
  }
};

// Nullopt = missing prior; the object is excluded from scale estimation.
inline std::optional<double> try_prior_height(const PriorSource &src,
                                              const ObjectInstance &obj) {
  if (src.use_table) {
    auto it = src.table.find(obj.id);
    if (it != src.table.end()) return it->second.height;
    return src.fallback;
  }
  return src.fallback;
}

inline double prior_height(const PriorSource &src, const ObjectInstance &obj) {
  auto h = try_prior_height(src, obj);
  if (!h) throw data_error("no height prior for instance id " + std::to_string(obj.id));
  return *h;
}

// CSV schema: header `id,height_m,width_m,length_m`, one row per instance.
inline PriorSource load_dimension_table(const std::string &path,
                                        std::optional<double> fallback =
                                            std::nullopt) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open dimension table: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw data_error(path + ": empty dimension table");
  auto strip = [](std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s;
  };
  if (strip(line) != "id,height_m,width_m,length_m")
    throw data_error(path + ":1: expected header id,height_m,width_m,length_m");

  std::map<int, Dimensions> table;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    line = strip(line);
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell[4];
    for (int i = 0; i < 4; ++i)
      if (!std::getline(ss, cell[i], ','))
        throw data_error(path + ":" + std::to_string(lineno) +
                         ": expected 4 comma-separated fields");
    std::string extra;
    if (std::getline(ss, extra, ','))
      throw data_error(path + ":" + std::to_string(lineno) +
                       ": expected 4 comma-separated fields");
    auto parse_num = [&](const std::string &s, const char *what) {
      size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &pos);
      } catch (const std::exception &) {
        throw data_error(path + ":" + std::to_string(lineno) +
                         ": cannot parse " + what + " '" + s + "'");
      }
      if (pos != s.size())
        throw data_error(path + ":" + std::to_string(lineno) +
                         ": cannot parse " + what + " '" + s + "'");
      return v;
    };
    int id = 0;
    {
      size_t pos = 0;
      try {
        id = std::stoi(cell[0], &pos);
      } catch (const std::exception &) {
        pos = std::string::npos;
      }
      if (pos != cell[0].size())
        throw data_error(path + ":" + std::to_string(lineno) +
                         ": cannot parse id '" + cell[0] + "'");
    }
    Dimensions d;
    d.height = parse_num(cell[1], "height");
    d.width = parse_num(cell[2], "width");
    d.length = parse_num(cell[3], "length");
    if (!std::isfinite(d.height) || !(d.height > 0.0) ||
        !(d.height < kMaxPriorHeight))
      throw data_error(path + ":" + std::to_string(lineno) +
                       ": height out of range (0, 10)");
    if (!std::isfinite(d.width) || !(d.width > 0.0) ||
        !std::isfinite(d.length) || !(d.length > 0.0))
      throw data_error(path + ":" + std::to_string(lineno) +
                       ": dimensions must be positive");
    if (!table.emplace(id, d).second)
      throw data_error(path + ":" + std::to_string(lineno) +
                       ": duplicate instance id " + std::to_string(id));
  }
  return PriorSource::dimension_table(std::move(table), fallback);
}

}  // namespace camh
