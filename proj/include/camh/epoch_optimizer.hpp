// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "camh/core.hpp"

namespace camh {

enum class SupervisionMode { online, offline, finetune };

struct FrameRecord {
  std::string frame_id;
  std::optional<double> scaled_height;  // absent when the frame had no scale
  int inlier_count = 0;
};

struct EpochEntry {
  int tau_completed = 0;    // which epoch produced the update
  double epoch_height = 0;  // the epoch median fed into the average
  double hstar_after = 0;
};

// Per-sequence pseudo-supervision. tau_completed counts every processed
// epoch; tau_applied counts only epochs that actually updated the weighted
// moving average, which keeps its triangular weights meaningful when whole
// epochs are skipped.
struct SequenceState {
  std::string id;
  SupervisionMode mode = SupervisionMode::online;
  int unfreeze_epoch = 0;  // finetune: first epoch whose update applies again
  int tau_completed = 0;
  int tau_applied = 0;
  std::optional<double> hstar;
  std::vector<EpochEntry> history;
};

// Median of the scaled heights present this epoch; frames that produced no
// scale are left out. Nullopt = epoch skipped.
inline std::optional<double> epoch_camera_height(
    std::span<const FrameRecord> records) {
  std::vector<double> hs;
  for (const auto &r : records)
    if (r.scaled_height && *r.scaled_height > 0.0)
      hs.push_back(*r.scaled_height);
  if (hs.empty()) return std::nullopt;
  return median(std::move(hs));
}

// Weighted moving average with triangular weights: the tau-th applied update
// computes H* = (tau(tau-1)/2 * H*_prev + tau * H) / (tau(tau+1)/2), which
// equals sum(tau_i * H_i) / sum(tau_i). Offline mode only establishes the
// first value; finetune behaves offline until unfreeze_epoch, then resumes.
inline void update_supervision(SequenceState &st,
                               std::optional<double> epoch_height) {
  st.tau_completed += 1;
  if (!epoch_height || !(*epoch_height > 0.0) ||
      !std::isfinite(*epoch_height))
    return;  // epoch skipped, moving average untouched

  bool apply = false;
  switch (st.mode) {
    case SupervisionMode::online:
      apply = true;
      break;
    case SupervisionMode::offline:
      apply = !st.hstar;
      break;
    case SupervisionMode::finetune:
      apply = !st.hstar || st.tau_completed >= st.unfreeze_epoch;
      break;
  }
  if (!apply) return;

  st.tau_applied += 1;
  double tau = st.tau_applied;
  double h = *epoch_height;
  if (st.tau_applied == 1 || !st.hstar) {
    st.hstar = h;
  } else {
    double prev = *st.hstar;
    st.hstar = (tau * (tau - 1.0) / 2.0 * prev + tau * h) /
               (tau * (tau + 1.0) / 2.0);
  }
  st.history.push_back({st.tau_completed, h, *st.hstar});
}

// Supervision available while running an epoch: the value settled at the end
// of the previous one. Absent until something has been established.
inline std::optional<double> supervision_for_epoch(const SequenceState &st) {
  return st.hstar;
}

// ---- state persistence ----------------------------------------------------
// Line-oriented text format:
//   camh-state-v1
//   sequence <id>
//   mode online|offline|finetune <unfreeze>
//   tau_completed <n>
//   tau_applied <n>
//   hstar <value or ->
//   history <tau_completed> <epoch_height> <hstar_after>   (repeated)
//   end

namespace detail {
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}
}  // namespace detail

inline void save_states(std::ostream &out,
                        std::span<const SequenceState> states) {
  out << "camh-state-v1\n";
  for (const auto &st : states) {
    if (st.id.empty() || st.id.find_first_of(" \t\n") != std::string::npos)
      throw usage_error("state: sequence id must be non-empty, no whitespace");
    out << "sequence " << st.id << "\n";
    out << "mode ";
    switch (st.mode) {
      case SupervisionMode::online:
        out << "online";
        break;
      case SupervisionMode::offline:
        out << "offline";
        break;
      case SupervisionMode::finetune:
        out << "finetune " << st.unfreeze_epoch;
        break;
    }
    out << "\n";
    out << "tau_completed " << st.tau_completed << "\n";
    out << "tau_applied " << st.tau_applied << "\n";
    out << "hstar " << (st.hstar ? detail::fmt_double(*st.hstar) : "-") << "\n";
    for (const auto &e : st.history)
      out << "history " << e.tau_completed << " "
          << detail::fmt_double(e.epoch_height) << " "
          << detail::fmt_double(e.hstar_after) << "\n";
    out << "end\n";
  }
}

inline std::vector<SequenceState> load_states(std::istream &in,
                                              const std::string &src = "state") {
  auto fail = [&](int line, const std::string &msg) -> void {
    throw data_error(src + ":" + std::to_string(line) + ": " + msg);
  };
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line)) fail(1, "empty state file");
  ++lineno;
  if (line == "camh-state-v1\r") line.pop_back();
  if (line != "camh-state-v1") fail(1, "bad magic, expected camh-state-v1");

  std::vector<SequenceState> states;
  std::optional<SequenceState> cur;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "sequence") {
      if (cur) fail(lineno, "sequence without closing end");
      std::string id;
      ss >> id;
      if (id.empty()) fail(lineno, "missing sequence id");
      cur = SequenceState{};
      cur->id = id;
    } else if (!cur) {
      fail(lineno, "directive outside sequence block");
    } else if (key == "mode") {
      std::string m;
      ss >> m;
      if (m == "online") {
        cur->mode = SupervisionMode::online;
      } else if (m == "offline") {
        cur->mode = SupervisionMode::offline;
      } else if (m == "finetune") {
        cur->mode = SupervisionMode::finetune;
        if (!(ss >> cur->unfreeze_epoch))
          fail(lineno, "finetune needs an unfreeze epoch");
      } else {
        fail(lineno, "unknown mode '" + m + "'");
      }
    } else if (key == "tau_completed") {
      if (!(ss >> cur->tau_completed)) fail(lineno, "bad tau_completed");
    } else if (key == "tau_applied") {
      if (!(ss >> cur->tau_applied)) fail(lineno, "bad tau_applied");
    } else if (key == "hstar") {
      std::string v;
      ss >> v;
      if (v == "-") {
        cur->hstar.reset();
      } else {
        try {
          size_t pos = 0;
          double d = std::stod(v, &pos);
          if (pos != v.size() || !(d > 0.0)) throw std::invalid_argument(v);
          cur->hstar = d;
        } catch (const std::exception &) {
          fail(lineno, "bad hstar value '" + v + "'");
        }
      }
    } else if (key == "history") {
      EpochEntry e;
      if (!(ss >> e.tau_completed >> e.epoch_height >> e.hstar_after))
        fail(lineno, "bad history entry");
      cur->history.push_back(e);
    } else if (key == "end") {
      states.push_back(std::move(*cur));
      cur.reset();
    } else {
      fail(lineno, "unknown directive '" + key + "'");
    }
  }
  if (cur) fail(lineno, "unterminated sequence block");
  return states;
}

}  // namespace camh
