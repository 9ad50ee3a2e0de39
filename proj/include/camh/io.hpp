// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "camh/core.hpp"
#include "camh/size_prior.hpp"

namespace camh {

// ---- PFM (little-endian float32, rows stored bottom to top) ----------------

namespace detail {

inline void pfm_skip_ws(std::istream &in) {
  while (std::isspace(in.peek())) in.get();
}

inline std::string pfm_token(std::istream &in) {
  pfm_skip_ws(in);
  std::string t;
  while (in.peek() != EOF && !std::isspace(in.peek()))
    t.push_back(static_cast<char>(in.get()));
  return t;
}

struct PfmHeader {
  int width = 0, height = 0, channels = 0;
};

inline PfmHeader read_pfm_header(std::istream &in, const std::string &src) {
  PfmHeader h;
  std::string magic = pfm_token(in);
  if (magic == "Pf") {
    h.channels = 1;
  } else if (magic == "PF") {
    h.channels = 3;
  } else {
    throw data_error(src + ": not a PFM file (bad magic '" + magic + "')");
  }
  try {
    h.width = std::stoi(pfm_token(in));
    h.height = std::stoi(pfm_token(in));
  } catch (const std::exception &) {
    throw data_error(src + ": bad PFM dimensions");
  }
  if (h.width <= 0 || h.height <= 0)
    throw data_error(src + ": bad PFM dimensions");
  double scale = 0.0;
  try {
    scale = std::stod(pfm_token(in));
  } catch (const std::exception &) {
    throw data_error(src + ": bad PFM scale line");
  }
  if (!(scale < 0.0))
    throw data_error(src + ": big-endian PFM is not supported");
  in.get();  // single whitespace byte separates header from data
  return h;
}

inline std::vector<float> read_pfm_payload(std::istream &in,
                                           const PfmHeader &h,
                                           const std::string &src) {
  std::vector<float> raw(static_cast<size_t>(h.width) * h.height * h.channels);
  in.read(reinterpret_cast<char *>(raw.data()),
          static_cast<std::streamsize>(raw.size() * sizeof(float)));
  if (static_cast<size_t>(in.gcount()) != raw.size() * sizeof(float))
    throw data_error(src + ": truncated PFM payload");
  return raw;
}

inline void write_pfm(std::ostream &out, const float *data, int w, int h,
                      int channels) {
  out << (channels == 1 ? "Pf" : "PF") << "\n" << w << " " << h << "\n-1.0\n";
  for (int y = h - 1; y >= 0; --y)
    out.write(reinterpret_cast<const char *>(data +
                                             static_cast<size_t>(y) * w *
                                                 channels),
              static_cast<std::streamsize>(sizeof(float) * w * channels));
}

inline std::ofstream open_out(const std::filesystem::path &p) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw data_error("cannot write " + p.string());
  return f;
}

inline std::ifstream open_in(const std::filesystem::path &p) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw data_error("cannot read " + p.string());
  return f;
}

}  // namespace detail

inline void write_pfm_depth(const std::filesystem::path &path,
                            const DepthMap &d) {
  std::vector<float> raw(d.v.size());
  for (size_t i = 0; i < d.v.size(); ++i) raw[i] = static_cast<float>(d.v[i]);
  auto f = detail::open_out(path);
  detail::write_pfm(f, raw.data(), d.width, d.height, 1);
  if (!f) throw data_error("short write to " + path.string());
}

inline DepthMap read_pfm_depth(const std::filesystem::path &path) {
  auto f = detail::open_in(path);
  auto h = detail::read_pfm_header(f, path.string());
  if (h.channels != 1)
    throw data_error(path.string() + ": expected single-channel PFM depth");
  auto raw = detail::read_pfm_payload(f, h, path.string());
  DepthMap d(h.width, h.height, 0.0);
  for (int y = 0; y < h.height; ++y) {
    const float *row = raw.data() + static_cast<size_t>(h.height - 1 - y) * h.width;
    for (int u = 0; u < h.width; ++u) d.at(u, y) = row[u];
  }
  return d;
}

inline void write_pfm_image(const std::filesystem::path &path,
                            const Image &img) {
  if (img.channels != 1 && img.channels != 3)
    throw usage_error("PFM images must have 1 or 3 channels");
  std::vector<float> raw(img.v.size());
  for (size_t i = 0; i < img.v.size(); ++i)
    raw[i] = static_cast<float>(img.v[i]);
  auto f = detail::open_out(path);
  detail::write_pfm(f, raw.data(), img.width, img.height, img.channels);
}

inline Image read_pfm_image(const std::filesystem::path &path) {
  auto f = detail::open_in(path);
  auto h = detail::read_pfm_header(f, path.string());
  auto raw = detail::read_pfm_payload(f, h, path.string());
  Image img(h.width, h.height, h.channels, 0.0);
  for (int y = 0; y < h.height; ++y) {
    const float *row = raw.data() +
                       static_cast<size_t>(h.height - 1 - y) * h.width *
                           h.channels;
    for (int u = 0; u < h.width * h.channels; ++u)
      img.v[static_cast<size_t>(y) * h.width * h.channels + u] = row[u];
  }
  return img;
}

// ---- PGM (8-bit binary, top to bottom) --------------------------------------
// Road masks store 255 for road. Instance masks store ids 1..254.

namespace detail {

inline int pgm_value(std::istream &in, const std::string &src) {
  // skip whitespace and '#' comments
  for (;;) {
    int c = in.peek();
    if (c == '#') {
      std::string junk;
      std::getline(in, junk);
    } else if (c != EOF && std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v = 0;
  bool any = false;
  while (std::isdigit(in.peek())) {
    v = v * 10 + (in.get() - '0');
    any = true;
  }
  if (!any) throw data_error(src + ": bad PGM header");
  return v;
}

}  // namespace detail

inline void write_pgm(const std::filesystem::path &path, const Mask &m) {
  auto f = detail::open_out(path);
  f << "P5\n" << m.width << " " << m.height << "\n255\n";
  f.write(reinterpret_cast<const char *>(m.v.data()),
          static_cast<std::streamsize>(m.v.size()));
  if (!f) throw data_error("short write to " + path.string());
}

inline Mask read_pgm(const std::filesystem::path &path) {
  auto f = detail::open_in(path);
  char m0 = 0, m1 = 0;
  f.get(m0);
  f.get(m1);
  if (m0 != 'P' || m1 != '5')
    throw data_error(path.string() + ": not a binary PGM (P5) file");
  int w = detail::pgm_value(f, path.string());
  int h = detail::pgm_value(f, path.string());
  int maxval = detail::pgm_value(f, path.string());
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255)
    throw data_error(path.string() + ": unsupported PGM geometry");
  f.get();  // single whitespace before payload
  Mask m(w, h, 0);
  f.read(reinterpret_cast<char *>(m.v.data()),
         static_cast<std::streamsize>(m.v.size()));
  if (static_cast<size_t>(f.gcount()) != m.v.size())
    throw data_error(path.string() + ": truncated PGM payload");
  return m;
}

// Road-mask convention: 255 = road.
inline Mask road_mask_from_pgm(const Mask &pgm) {
  Mask out(pgm.width, pgm.height, 0);
  for (size_t i = 0; i < pgm.v.size(); ++i) out.v[i] = pgm.v[i] == 255 ? 1 : 0;
  return out;
}

inline Mask road_mask_to_pgm(const Mask &road) {
  Mask out(road.width, road.height, 0);
  for (size_t i = 0; i < road.v.size(); ++i) out.v[i] = road.v[i] ? 255 : 0;
  return out;
}

// Instance-mask convention: one PGM holds every instance, ids 1..254.
inline std::vector<ObjectInstance> instances_from_pgm(
    const Mask &pgm, const std::string &label = "car") {
  std::vector<int> present;
  std::vector<bool> seen(255, false);
  for (uint8_t v : pgm.v)
    if (v >= 1 && v <= 254 && !seen[v]) {
      seen[v] = true;
      present.push_back(v);
    }
  std::sort(present.begin(), present.end());
  std::vector<ObjectInstance> out;
  for (int id : present) {
    Mask m(pgm.width, pgm.height, 0);
    for (size_t i = 0; i < pgm.v.size(); ++i)
      m.v[i] = pgm.v[i] == id ? 1 : 0;
    out.push_back(make_instance(id, label, std::move(m)));
  }
  return out;
}

inline Mask instances_to_pgm(std::span<const ObjectInstance> instances,
                             int width, int height) {
  Mask out(width, height, 0);
  for (const auto &inst : instances) {
    if (inst.id < 1 || inst.id > 254)
      throw usage_error("instance ids must be in 1..254 for PGM export");
    if (inst.mask.width != width || inst.mask.height != height)
      throw usage_error("instance mask dimensions differ from the canvas");
    for (size_t i = 0; i < out.v.size(); ++i)
      if (inst.mask.v[i]) out.v[i] = static_cast<uint8_t>(inst.id);
  }
  return out;
}

// ---- structured config text (TOML-like subset) ------------------------------
// Supported: [table] and [[array-of-table]] headers, key = value with value
// one of: number, "string", true/false, [num, num, ...]. '#' comments.

struct ConfigValue {
  enum class Kind { number, string, boolean, number_array } kind =
      Kind::number;
  double num = 0.0;
  std::string str;
  bool boolean = false;
  std::vector<double> array;
};

struct ConfigTable {
  std::map<std::string, ConfigValue> kv;
  int line = 0;  // where the table header appeared

  bool has(const std::string &k) const { return kv.count(k) != 0; }
  const ConfigValue *find(const std::string &k) const {
    auto it = kv.find(k);
    return it == kv.end() ? nullptr : &it->second;
  }
};

struct ConfigDoc {
  std::map<std::string, ConfigTable> tables;
  std::map<std::string, std::vector<ConfigTable>> table_arrays;
  std::string source = "config";

  const ConfigTable *table(const std::string &name) const {
    auto it = tables.find(name);
    return it == tables.end() ? nullptr : &it->second;
  }
  std::span<const ConfigTable> array(const std::string &name) const {
    auto it = table_arrays.find(name);
    if (it == table_arrays.end()) return {};
    return it->second;
  }
};

namespace detail {

inline std::string trim(const std::string &s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline ConfigValue parse_config_value(const std::string &raw,
                                      const std::string &src, int line) {
  ConfigValue v;
  std::string s = trim(raw);
  if (s.empty()) throw data_error(src + ":" + std::to_string(line) +
                                  ": missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"')
      throw data_error(src + ":" + std::to_string(line) +
                       ": unterminated string");
    v.kind = ConfigValue::Kind::string;
    v.str = s.substr(1, s.size() - 2);
    return v;
  }
  if (s == "true" || s == "false") {
    v.kind = ConfigValue::Kind::boolean;
    v.boolean = s == "true";
    return v;
  }
  if (s.front() == '[') {
    if (s.back() != ']')
      throw data_error(src + ":" + std::to_string(line) +
                       ": unterminated array");
    v.kind = ConfigValue::Kind::number_array;
    std::string body = s.substr(1, s.size() - 2);
    std::istringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      try {
        size_t pos = 0;
        v.array.push_back(std::stod(item, &pos));
        if (pos != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception &) {
        throw data_error(src + ":" + std::to_string(line) +
                         ": bad array element '" + item + "'");
      }
    }
    return v;
  }
  try {
    size_t pos = 0;
    v.num = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception &) {
    throw data_error(src + ":" + std::to_string(line) + ": bad value '" + s +
                     "'");
  }
  v.kind = ConfigValue::Kind::number;
  return v;
}

}  // namespace detail

inline ConfigDoc parse_config(std::istream &in,
                              const std::string &src = "config") {
  ConfigDoc doc;
  doc.source = src;
  ConfigTable *cur = &doc.tables[""];
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = std::string::npos;
    bool in_str = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') in_str = !in_str;
      if (line[i] == '#' && !in_str) {
        hash = i;
        break;
      }
    }
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      bool is_array = line.size() >= 4 && line[1] == '[';
      size_t close = line.find(is_array ? "]]" : "]");
      if (close == std::string::npos ||
          close + (is_array ? 2 : 1) != line.size())
        throw data_error(src + ":" + std::to_string(lineno) +
                         ": malformed table header");
      std::string name = detail::trim(
          line.substr(is_array ? 2 : 1, close - (is_array ? 2 : 1)));
      if (name.empty())
        throw data_error(src + ":" + std::to_string(lineno) +
                         ": empty table name");
      if (is_array) {
        doc.table_arrays[name].push_back(ConfigTable{});
        cur = &doc.table_arrays[name].back();
      } else {
        if (doc.tables.count(name))
          throw data_error(src + ":" + std::to_string(lineno) +
                           ": duplicate table [" + name + "]");
        cur = &doc.tables[name];
      }
      cur->line = lineno;
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw data_error(src + ":" + std::to_string(lineno) +
                       ": expected key = value");
    std::string key = detail::trim(line.substr(0, eq));
    if (key.empty())
      throw data_error(src + ":" + std::to_string(lineno) + ": empty key");
    if (cur->kv.count(key))
      throw data_error(src + ":" + std::to_string(lineno) +
                       ": duplicate key '" + key + "'");
    cur->kv[key] = detail::parse_config_value(line.substr(eq + 1), src, lineno);
  }
  return doc;
}

inline ConfigDoc load_config(const std::filesystem::path &path) {
  auto f = detail::open_in(path);
  return parse_config(f, path.string());
}

// typed accessors; `where` names the table for error messages
namespace detail {

inline const ConfigValue &need(const ConfigTable &t, const std::string &key,
                               const std::string &src,
                               const std::string &where) {
  const ConfigValue *v = t.find(key);
  if (!v)
    throw data_error(src + ": [" + where + "] is missing key '" + key + "'");
  return *v;
}

inline double cfg_number(const ConfigTable &t, const std::string &key,
                         const std::string &src, const std::string &where) {
  const ConfigValue &v = need(t, key, src, where);
  if (v.kind != ConfigValue::Kind::number)
    throw data_error(src + ": [" + where + "] key '" + key +
                     "' must be a number");
  return v.num;
}

inline double cfg_number_or(const ConfigTable &t, const std::string &key,
                            double fallback, const std::string &src,
                            const std::string &where) {
  const ConfigValue *v = t.find(key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::number)
    throw data_error(src + ": [" + where + "] key '" + key +
                     "' must be a number");
  return v->num;
}

inline std::string cfg_string(const ConfigTable &t, const std::string &key,
                              const std::string &src,
                              const std::string &where) {
  const ConfigValue &v = need(t, key, src, where);
  if (v.kind != ConfigValue::Kind::string)
    throw data_error(src + ": [" + where + "] key '" + key +
                     "' must be a string");
  return v.str;
}

inline std::string cfg_string_or(const ConfigTable &t, const std::string &key,
                                 const std::string &fallback,
                                 const std::string &src,
                                 const std::string &where) {
  const ConfigValue *v = t.find(key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::string)
    throw data_error(src + ": [" + where + "] key '" + key +
                     "' must be a string");
  return v->str;
}

inline bool cfg_bool_or(const ConfigTable &t, const std::string &key,
                        bool fallback, const std::string &src,
                        const std::string &where) {
  const ConfigValue *v = t.find(key);
  if (!v) return fallback;
  if (v->kind != ConfigValue::Kind::boolean)
    throw data_error(src + ": [" + where + "] key '" + key +
                     "' must be true or false");
  return v->boolean;
}

}  // namespace detail

// ---- sequence manifest -------------------------------------------------------

struct FrameEntry {
  std::string id;
  std::filesystem::path depth;
  std::filesystem::path road;
  std::filesystem::path instances;
  std::optional<std::filesystem::path> dimensions;
  std::optional<std::filesystem::path> image;
  std::optional<std::filesystem::path> source_image;
  std::optional<std::filesystem::path> gt_depth;
  std::optional<RelativePose> pose_to_source;
  std::optional<double> gt_height;
};

struct SequenceManifest {
  std::string id;
  Intrinsics K;
  std::vector<FrameEntry> frames;
};

inline SequenceManifest manifest_from_config(const ConfigDoc &doc,
                                             const std::filesystem::path &base) {
  const std::string &src = doc.source;
  const ConfigTable *seq = doc.table("sequence");
  if (!seq) throw data_error(src + ": missing [sequence] table");
  SequenceManifest m;
  m.id = detail::cfg_string(*seq, "id", src, "sequence");
  if (m.id.empty()) throw data_error(src + ": sequence id is empty");
  m.K.fx = detail::cfg_number(*seq, "fx", src, "sequence");
  m.K.fy = detail::cfg_number(*seq, "fy", src, "sequence");
  m.K.cx = detail::cfg_number(*seq, "cx", src, "sequence");
  m.K.cy = detail::cfg_number(*seq, "cy", src, "sequence");
  try {
    m.K.validate();
  } catch (const usage_error &e) {
    throw data_error(src + ": " + e.what());
  }

  auto resolve = [&](const std::string &rel) { return base / rel; };
  for (const ConfigTable &f : doc.array("frame")) {
    FrameEntry e;
    std::string where = "frame";
    e.id = detail::cfg_string(f, "id", src, where);
    e.depth = resolve(detail::cfg_string(f, "depth", src, where));
    e.road = resolve(detail::cfg_string(f, "road", src, where));
    e.instances = resolve(detail::cfg_string(f, "instances", src, where));
    if (f.has("dimensions"))
      e.dimensions = resolve(detail::cfg_string(f, "dimensions", src, where));
    if (f.has("image"))
      e.image = resolve(detail::cfg_string(f, "image", src, where));
    if (f.has("source_image"))
      e.source_image =
          resolve(detail::cfg_string(f, "source_image", src, where));
    if (f.has("gt_depth"))
      e.gt_depth = resolve(detail::cfg_string(f, "gt_depth", src, where));
    if (f.has("gt_height"))
      e.gt_height = detail::cfg_number(f, "gt_height", src, where);
    if (f.has("pose_to_source")) {
      const ConfigValue *v = f.find("pose_to_source");
      if (v->kind != ConfigValue::Kind::number_array || v->array.size() != 12)
        throw data_error(src + ": frame '" + e.id +
                         "': pose_to_source needs 12 numbers (row-major "
                         "rotation, then translation)");
      RelativePose p;
      for (int i = 0; i < 9; ++i) p.rotation.m[i] = v->array[i];
      p.translation = {v->array[9], v->array[10], v->array[11]};
      try {
        p.validate();
      } catch (const usage_error &err) {
        throw data_error(src + ": frame '" + e.id + "': " + err.what());
      }
      e.pose_to_source = p;
    }
    m.frames.push_back(std::move(e));
  }
  if (m.frames.empty()) throw data_error(src + ": manifest has no frames");
  return m;
}

inline SequenceManifest load_manifest(const std::filesystem::path &path) {
  ConfigDoc doc = load_config(path);
  return manifest_from_config(doc, path.parent_path());
}

// ---- CSV + SVG emitters ------------------------------------------------------

namespace detail {

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace detail

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path &path,
            std::span<const std::string> header)
      : f_(detail::open_out(path)), cols_(header.size()) {
    if (header.empty()) throw usage_error("CSV needs at least one column");
    for (size_t i = 0; i < header.size(); ++i)
      f_ << (i ? "," : "") << header[i];
    f_ << "\n";
  }

  void row(std::span<const std::string> cells) {
    if (cells.size() != cols_)
      throw usage_error("CSV row width differs from the header");
    for (size_t i = 0; i < cells.size(); ++i)
      f_ << (i ? "," : "") << cells[i];
    f_ << "\n";
  }

 private:
  std::ofstream f_;
  size_t cols_;
};

// Minimal standalone line plot; deterministic output for fixed inputs.
inline void write_svg_trend(const std::filesystem::path &path,
                            const std::string &title,
                            std::span<const double> xs,
                            std::span<const double> ys,
                            const std::string &y_label) {
  if (xs.size() != ys.size() || xs.empty())
    throw usage_error("trend plot needs matching non-empty series");
  const int W = 640, H = 360, ml = 60, mr = 20, mt = 40, mb = 40;
  double xmin = xs[0], xmax = xs[0], ymin = ys[0], ymax = ys[0];
  for (size_t i = 0; i < xs.size(); ++i) {
    xmin = std::min(xmin, xs[i]);
    xmax = std::max(xmax, xs[i]);
    ymin = std::min(ymin, ys[i]);
    ymax = std::max(ymax, ys[i]);
  }
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  auto px = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (W - ml - mr);
  };
  auto py = [&](double y) {
    return H - mb - (y - ymin) / (ymax - ymin) * (H - mt - mb);
  };
  auto f = detail::open_out(path);
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
    << "\" height=\"" << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  f << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  f << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" "
       "font-family=\"sans-serif\" font-size=\"16\">"
    << title << "</text>\n";
  f << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr
    << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
    << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  f << "<text x=\"" << ml << "\" y=\"" << H - mb + 24
    << "\" font-family=\"sans-serif\" font-size=\"12\">"
    << detail::csv_num(xmin) << "</text>\n";
  f << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 24
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
    << detail::csv_num(xmax) << "</text>\n";
  f << "<text x=\"" << ml - 6 << "\" y=\"" << H - mb
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
    << detail::csv_num(ymin) << "</text>\n";
  f << "<text x=\"" << ml - 6 << "\" y=\"" << mt + 4
    << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
    << detail::csv_num(ymax) << "</text>\n";
  f << "<text x=\"16\" y=\"" << H / 2
    << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
       "16 "
    << H / 2 << ")\" text-anchor=\"middle\">" << y_label << "</text>\n";
  f << "<polyline fill=\"none\" stroke=\"#1f6fb2\" stroke-width=\"2\" "
       "points=\"";
  for (size_t i = 0; i < xs.size(); ++i)
    f << (i ? " " : "") << detail::csv_num(px(xs[i])) << ","
      << detail::csv_num(py(ys[i]));
  f << "\"/>\n";
  for (size_t i = 0; i < xs.size(); ++i)
    f << "<circle cx=\"" << detail::csv_num(px(xs[i])) << "\" cy=\""
      << detail::csv_num(py(ys[i])) << "\" r=\"3\" fill=\"#1f6fb2\"/>\n";
  f << "</svg>\n";
}

}  // namespace camh
