// camh: geometric scale recovery for road-scene depth
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end. Subcommands:
//   simulate   render a synthetic sequence and write a manifest
//   camheight  run the scale-recovery pipeline over epochs
//   losses     evaluate the loss breakdown for every frame
//   refine     recover a global depth scale by gradient descent
//   report     standard depth metrics against ground truth
// Exit codes: 0 ok, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "camh/camh.hpp"

namespace fs = std::filesystem;
using namespace camh;

namespace {

struct GlobalArgs {
  std::string config;
  std::string out_dir = ".";
  unsigned long long seed = 42;
  int epochs = 1;
  std::string mode = "online";
};

std::string fmt(double v) { return detail::csv_num(v); }

std::string opt_fmt(const std::optional<double> &v) {
  return v ? fmt(*v) : "";
}

// "online" | "offline" | "finetune:N"
void parse_mode(const std::string &mode, PipelineOptions &opt) {
  if (mode == "online") {
    opt.mode = SupervisionMode::online;
  } else if (mode == "offline") {
    opt.mode = SupervisionMode::offline;
  } else if (mode.rfind("finetune:", 0) == 0) {
    opt.mode = SupervisionMode::finetune;
    std::string n = mode.substr(9);
    try {
      size_t pos = 0;
      opt.unfreeze_epoch = std::stoi(n, &pos);
      if (pos != n.size() || opt.unfreeze_epoch < 1)
        throw std::invalid_argument(n);
    } catch (const std::exception &) {
      throw usage_error("bad finetune epoch '" + n + "'");
    }
  } else {
    throw usage_error("mode must be online, offline, or finetune:N");
  }
}

void apply_pipeline_config(const std::string &path, PipelineOptions &opt,
                           double &default_height) {
  if (path.empty()) return;
  ConfigDoc doc = load_config(path);
  const ConfigTable *t = doc.table("pipeline");
  if (!t) return;
  const std::string src = doc.source, where = "pipeline";
  opt.weights.alpha = detail::cfg_number_or(*t, "alpha", opt.weights.alpha,
                                            src, where);
  opt.weights.beta =
      detail::cfg_number_or(*t, "beta", opt.weights.beta, src, where);
  opt.weights.lambda_pe = detail::cfg_number_or(
      *t, "lambda_pe", opt.weights.lambda_pe, src, where);
  opt.weights.eps =
      detail::cfg_number_or(*t, "eps", opt.weights.eps, src, where);
  opt.weights.tau_mid = static_cast<int>(detail::cfg_number_or(
      *t, "tau_mid", opt.weights.tau_mid, src, where));
  opt.outlier_threshold = detail::cfg_number_or(
      *t, "outlier_threshold", opt.outlier_threshold, src, where);
  opt.automask = detail::cfg_bool_or(*t, "automask", opt.automask, src, where);
  opt.literal_aux =
      detail::cfg_bool_or(*t, "literal_aux", opt.literal_aux, src, where);
  default_height = detail::cfg_number_or(*t, "default_height", default_height,
                                         src, where);
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  int frames = 20;
  double scale = 1.0;
  double noise = -1.0;  // <0: keep config value
  bool no_views = false;
  bool no_jitter = false;
};

SceneConfig scene_from_config(const std::string &path) {
  SceneConfig cfg;
  BoxSpec b1{-3.4, 9.0, 1.7, 4.0, 1.42, 10.0, "car"};
  BoxSpec b2{-1.2, 13.0, 1.7, 4.2, 1.50, 35.0, "car"};
  BoxSpec b3{1.1, 17.0, 1.8, 4.1, 1.46, 65.0, "car"};
  BoxSpec b4{3.2, 22.0, 1.7, 3.9, 1.55, 0.0, "car"};
  cfg.boxes = {b1, b2, b3, b4};
  if (path.empty()) return cfg;

  ConfigDoc doc = load_config(path);
  const std::string src = doc.source;
  if (const ConfigTable *t = doc.table("scene")) {
    const std::string w = "scene";
    cfg.width = static_cast<int>(
        detail::cfg_number_or(*t, "width", cfg.width, src, w));
    cfg.height = static_cast<int>(
        detail::cfg_number_or(*t, "height", cfg.height, src, w));
    cfg.K.fx = detail::cfg_number_or(*t, "fx", cfg.K.fx, src, w);
    cfg.K.fy = detail::cfg_number_or(*t, "fy", cfg.K.fy, src, w);
    cfg.K.cx = detail::cfg_number_or(*t, "cx", cfg.K.cx, src, w);
    cfg.K.cy = detail::cfg_number_or(*t, "cy", cfg.K.cy, src, w);
    cfg.camera_height = detail::cfg_number_or(*t, "camera_height",
                                              cfg.camera_height, src, w);
    cfg.pitch_deg =
        detail::cfg_number_or(*t, "pitch_deg", cfg.pitch_deg, src, w);
    cfg.depth_noise =
        detail::cfg_number_or(*t, "depth_noise", cfg.depth_noise, src, w);
    cfg.max_depth =
        detail::cfg_number_or(*t, "max_depth", cfg.max_depth, src, w);
  }
  auto boxes = doc.array("box");
  if (!boxes.empty()) {
    cfg.boxes.clear();
    for (const ConfigTable &t : boxes) {
      const std::string w = "box";
      BoxSpec b;
      b.x = detail::cfg_number(t, "x", src, w);
      b.z = detail::cfg_number(t, "z", src, w);
      b.width = detail::cfg_number_or(t, "width", b.width, src, w);
      b.length = detail::cfg_number_or(t, "length", b.length, src, w);
      b.height = detail::cfg_number(t, "height", src, w);
      b.yaw_deg = detail::cfg_number_or(t, "yaw_deg", 0.0, src, w);
      b.label = detail::cfg_string_or(t, "label", "car", src, w);
      cfg.boxes.push_back(b);
    }
  }
  return cfg;
}

int run_simulate(const GlobalArgs &g, const SimulateArgs &s) {
  if (s.frames < 1) throw usage_error("simulate: --frames must be >= 1");
  if (!(s.scale > 0.0)) throw usage_error("simulate: --scale must be > 0");
  SceneConfig base = scene_from_config(g.config);
  if (s.noise >= 0.0) base.depth_noise = s.noise;
  fs::path out(g.out_dir);
  fs::create_directories(out);

  std::mt19937_64 rng(g.seed);
  std::uniform_real_distribution<double> jx(-0.6, 0.6), jz(-2.0, 2.0),
      jyaw(-15.0, 15.0), jh(0.94, 1.06), jpitch(-1.0, 1.0),
      jdz(0.25, 0.45), jdx(-0.05, 0.05);

  std::string mpath = (out / "manifest.toml").string();
  auto mf = std::ofstream(mpath);
  if (!mf) throw data_error("cannot write " + mpath);
  mf << "[sequence]\n";
  mf << "id = \"sim\"\n";
  mf << "fx = " << fmt(base.K.fx) << "\nfy = " << fmt(base.K.fy) << "\ncx = "
     << fmt(base.K.cx) << "\ncy = " << fmt(base.K.cy) << "\n";

  for (int f = 0; f < s.frames; ++f) {
    SceneConfig cfg = base;
    cfg.seed = g.seed + 1000003ULL * static_cast<unsigned long long>(f);
    if (!s.no_jitter) {
      cfg.pitch_deg += jpitch(rng);
      for (auto &b : cfg.boxes) {
        b.x += jx(rng);
        b.z = std::max(4.0, b.z + jz(rng));
        b.yaw_deg += jyaw(rng);
        b.height = std::min(b.height * jh(rng), cfg.camera_height - 0.12);
      }
    }
    RenderedScene sc = render_scene(cfg);
    char name[32];
    std::snprintf(name, sizeof name, "%04d", f);
    std::string fid(name);

    DepthMap input_depth =
        s.scale == 1.0 ? sc.depth : apply_global_scale(sc.depth, s.scale);
    write_pfm_depth(out / ("depth_" + fid + ".pfm"), input_depth);
    write_pfm_depth(out / ("gt_" + fid + ".pfm"), sc.true_depth);
    write_pgm(out / ("road_" + fid + ".pgm"), road_mask_to_pgm(sc.road));
    write_pgm(out / ("inst_" + fid + ".pgm"),
              instances_to_pgm(sc.instances, cfg.width, cfg.height));
    {
      auto df = std::ofstream(out / ("dims_" + fid + ".csv"));
      df << "id,height_m,width_m,length_m\n";
      for (size_t i = 0; i < sc.instances.size(); ++i)
        df << sc.instances[i].id << "," << fmt(sc.instance_true_height[i])
           << ",1.7,4.0\n";
    }

    mf << "\n[[frame]]\n";
    mf << "id = \"" << fid << "\"\n";
    mf << "depth = \"depth_" << fid << ".pfm\"\n";
    mf << "road = \"road_" << fid << ".pgm\"\n";
    mf << "instances = \"inst_" << fid << ".pgm\"\n";
    mf << "dimensions = \"dims_" << fid << ".csv\"\n";
    mf << "gt_depth = \"gt_" << fid << ".pfm\"\n";
    mf << "gt_height = " << fmt(cfg.camera_height) << "\n";

    if (!s.no_views) {
      RelativePose t2s;
      t2s.translation = {jdx(rng), 0.0, -jdz(rng)};
      ViewPair vp = render_view_pair(cfg, t2s);
      write_pfm_image(out / ("image_" + fid + ".pfm"), vp.target);
      write_pfm_image(out / ("source_" + fid + ".pfm"), vp.source);
      mf << "image = \"image_" << fid << ".pfm\"\n";
      mf << "source_image = \"source_" << fid << ".pfm\"\n";
      mf << "pose_to_source = [";
      for (int i = 0; i < 9; ++i) mf << fmt(t2s.rotation.m[i]) << ", ";
      mf << fmt(t2s.translation.x) << ", " << fmt(t2s.translation.y) << ", "
         << fmt(t2s.translation.z) << "]\n";
    }
  }
  mf.close();
  std::cout << "wrote " << s.frames << " frames to " << out.string() << "\n";
  return 0;
}

// ---- manifest-backed frame provider -----------------------------------------

PipelineFrame load_frame(const SequenceManifest &m, size_t i,
                         double default_height) {
  const FrameEntry &e = m.frames.at(i);
  PipelineFrame f;
  f.id = e.id;
  f.depth = read_pfm_depth(e.depth);
  f.road = road_mask_from_pgm(read_pgm(e.road));
  f.objects = instances_from_pgm(read_pgm(e.instances));
  if (e.dimensions) {
    f.priors = load_dimension_table(e.dimensions->string(), default_height);
  } else {
    f.priors = PriorSource::fixed_height(default_height);
  }
  if (e.image) f.image = read_pfm_image(*e.image);
  if (e.source_image) f.source_image = read_pfm_image(*e.source_image);
  f.pose_to_source = e.pose_to_source;
  f.gt_height = e.gt_height;
  if (f.depth.width != f.road.width || f.depth.height != f.road.height)
    throw data_error("frame '" + e.id + "': depth and road sizes differ");
  return f;
}

// ---- camheight (the pipeline) -----------------------------------------------

struct CamheightArgs {
  std::string manifest;
  std::string state;
  bool no_losses = false;
  bool no_automask = false;
  bool literal_aux = false;
  double default_height = kDefaultCarHeight;
  double threshold = kOutlierThreshold;
};

int run_camheight(const GlobalArgs &g, const CamheightArgs &a) {
  PipelineOptions opt;
  opt.epochs = g.epochs;
  parse_mode(g.mode, opt);
  opt.outlier_threshold = a.threshold;
  opt.automask = !a.no_automask;
  opt.literal_aux = a.literal_aux;
  opt.compute_losses = !a.no_losses;
  double default_height = a.default_height;
  apply_pipeline_config(g.config, opt, default_height);

  SequenceManifest m = load_manifest(a.manifest);
  SequenceState st;
  st.id = m.id;
  if (!a.state.empty() && fs::exists(a.state)) {
    auto f = std::ifstream(a.state);
    auto states = load_states(f, a.state);
    for (auto &s : states)
      if (s.id == m.id) st = std::move(s);
  }

  PipelineResult res = run_pipeline(
      [&](size_t i) { return load_frame(m, i, default_height); },
      m.frames.size(), m.K, opt, std::move(st));

  fs::path out(g.out_dir);
  fs::create_directories(out);
  {
    std::vector<std::string> hdr = {
        "epoch", "frame", "unscaled_height", "scale", "scaled_height",
        "objects", "measured", "inliers", "loss_total", "loss_rec",
        "loss_sm", "loss_cam", "loss_aux", "error"};
    CsvWriter w(out / "frames.csv", hdr);
    for (const auto &r : res.frames) {
      std::string err = r.error;
      for (auto &c : err)
        if (c == ',' || c == '\n') c = ';';
      std::vector<std::string> row = {
          std::to_string(r.epoch),
          r.id,
          opt_fmt(r.unscaled_height),
          opt_fmt(r.scale),
          opt_fmt(r.scaled_height),
          std::to_string(r.objects),
          std::to_string(r.measured),
          std::to_string(r.inliers),
          r.loss ? fmt(r.loss->total) : "",
          r.loss ? opt_fmt(r.loss->rec) : "",
          r.loss ? opt_fmt(r.loss->sm) : "",
          r.loss ? opt_fmt(r.loss->cam) : "",
          r.loss ? opt_fmt(r.loss->aux) : "",
          err};
      w.row(row);
    }
  }
  {
    std::vector<std::string> hdr = {"epoch",       "frames_ok",
                                    "epoch_height", "hstar",
                                    "lambda_cam",  "lambda_aux"};
    CsvWriter w(out / "epochs.csv", hdr);
    for (const auto &e : res.epochs) {
      std::vector<std::string> row = {
          std::to_string(e.epoch),        std::to_string(e.frames_ok),
          opt_fmt(e.epoch_height),        opt_fmt(e.hstar_after),
          fmt(e.lambda_cam),              fmt(e.lambda_aux)};
      w.row(row);
    }
  }
  {
    std::vector<double> xs, ys;
    for (const auto &e : res.epochs)
      if (e.hstar_after) {
        xs.push_back(e.epoch);
        ys.push_back(*e.hstar_after);
      }
    if (!xs.empty())
      write_svg_trend(out / "hstar_trend.svg", "pseudo camera height", xs, ys,
                      "height (m)");
  }
  {
    std::string spath =
        a.state.empty() ? (out / "state.txt").string() : a.state;
    auto f = std::ofstream(spath);
    if (!f) throw data_error("cannot write " + spath);
    std::vector<SequenceState> states = {res.state};
    save_states(f, states);
  }

  if (res.state.hstar) {
    std::cout << "sequence " << m.id << ": H* = " << fmt(*res.state.hstar)
              << " after " << res.state.tau_completed << " epochs\n";
  } else {
    std::cout << "sequence " << m.id << ": no supervision height established\n";
  }
  return 0;
}

// ---- losses -----------------------------------------------------------------

struct LossesArgs {
  std::string manifest;
  double hstar = 0.0;  // 0 = none
  int tau = 1;
  double default_height = kDefaultCarHeight;
};

int run_losses(const GlobalArgs &g, const LossesArgs &a) {
  PipelineOptions opt;
  double default_height = a.default_height;
  apply_pipeline_config(g.config, opt, default_height);
  SequenceManifest m = load_manifest(a.manifest);
  std::optional<double> hstar;
  if (a.hstar > 0.0) hstar = a.hstar;

  fs::path out(g.out_dir);
  fs::create_directories(out);
  std::vector<std::string> hdr = {"frame",    "loss_total", "loss_rec",
                                  "loss_sm",  "loss_cam",   "loss_aux",
                                  "lambda_cam", "lambda_aux", "error"};
  CsvWriter w(out / "losses.csv", hdr);
  int ok = 0;
  for (size_t i = 0; i < m.frames.size(); ++i) {
    PipelineFrame f = load_frame(m, i, default_height);
    FrameReport r = process_frame(f, m.K, opt, hstar, a.tau);
    std::string err = r.error;
    for (auto &c : err)
      if (c == ',' || c == '\n') c = ';';
    if (r.error.empty()) ++ok;
    std::vector<std::string> row = {
        r.id,
        r.loss ? fmt(r.loss->total) : "",
        r.loss ? opt_fmt(r.loss->rec) : "",
        r.loss ? opt_fmt(r.loss->sm) : "",
        r.loss ? opt_fmt(r.loss->cam) : "",
        r.loss ? opt_fmt(r.loss->aux) : "",
        r.loss ? fmt(r.loss->lambda_cam) : "",
        r.loss ? fmt(r.loss->lambda_aux) : "",
        err};
    w.row(row);
  }
  if (ok == 0) throw data_error("losses: every frame failed");
  std::cout << "wrote " << (out / "losses.csv").string() << "\n";
  return 0;
}

// ---- refine -----------------------------------------------------------------

struct RefineArgs {
  std::string manifest;
  int steps = 200;
  double lr = 0.0;
  int tau = 25;
  double hstar = 0.0;
  double default_height = kDefaultCarHeight;
};

int run_refine(const GlobalArgs &g, const RefineArgs &a) {
  SequenceManifest m = load_manifest(a.manifest);
  RefineOptions opt;
  opt.max_steps = a.steps;
  opt.lr = a.lr;
  opt.tau = a.tau;
  if (a.hstar > 0.0) opt.hstar = a.hstar;
  PipelineOptions pipeline_defaults;
  double default_height = a.default_height;
  apply_pipeline_config(g.config, pipeline_defaults, default_height);
  opt.weights = pipeline_defaults.weights;
  opt.literal_aux = pipeline_defaults.literal_aux;

  RefineResult res = scale_recovery_refine(
      [&](size_t i) { return load_frame(m, i, default_height); },
      m.frames.size(), m.K, opt);

  fs::path out(g.out_dir);
  fs::create_directories(out);
  std::vector<std::string> hdr = {"step", "log_scale", "scale", "loss",
                                  "grad"};
  CsvWriter w(out / "refine.csv", hdr);
  for (const auto &s : res.history) {
    std::vector<std::string> row = {
        std::to_string(s.step), fmt(s.log_scale), fmt(std::exp(s.log_scale)),
        fmt(s.loss), fmt(s.grad)};
    w.row(row);
  }
  std::cout << "recovered scale " << fmt(res.scale) << " (loss "
            << fmt(res.loss) << ", H* " << fmt(res.hstar) << ", "
            << (res.converged ? "converged" : "step limit") << ")\n";
  return 0;
}

// ---- report -----------------------------------------------------------------

struct ReportArgs {
  std::string manifest;
  double cap = 80.0;
};

int run_report(const GlobalArgs &g, const ReportArgs &a) {
  SequenceManifest m = load_manifest(a.manifest);
  fs::path out(g.out_dir);
  fs::create_directories(out);
  std::vector<std::string> hdr = {"frame",  "abs_rel", "sq_rel", "rmse",
                                  "rmse_log", "delta1", "delta2", "delta3",
                                  "pixels"};
  CsvWriter w(out / "metrics.csv", hdr);
  MetricsReport total;
  long frames_used = 0;
  for (const auto &e : m.frames) {
    if (!e.gt_depth) continue;
    DepthMap pred = read_pfm_depth(e.depth);
    DepthMap gt = read_pfm_depth(*e.gt_depth);
    Mask all(gt.width, gt.height, 1);
    MetricsReport r = compute_depth_metrics(pred, gt, all, a.cap);
    std::vector<std::string> row = {
        e.id,          fmt(r.abs_rel), fmt(r.sq_rel),  fmt(r.rmse),
        fmt(r.rmse_log), fmt(r.delta1), fmt(r.delta2), fmt(r.delta3),
        std::to_string(r.valid_count)};
    w.row(row);
    total.abs_rel += r.abs_rel;
    total.sq_rel += r.sq_rel;
    total.rmse += r.rmse;
    total.rmse_log += r.rmse_log;
    total.delta1 += r.delta1;
    total.delta2 += r.delta2;
    total.delta3 += r.delta3;
    ++frames_used;
  }
  if (frames_used == 0)
    throw data_error("report: no frame in the manifest has ground truth");
  double n = static_cast<double>(frames_used);
  std::cout << "frames " << frames_used << "  AbsRel "
            << fmt(total.abs_rel / n) << "  SqRel " << fmt(total.sq_rel / n)
            << "  RMSE " << fmt(total.rmse / n) << "  RMSElog "
            << fmt(total.rmse_log / n) << "  d1 " << fmt(total.delta1 / n)
            << "  d2 " << fmt(total.delta2 / n) << "  d3 "
            << fmt(total.delta3 / n) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"geometric scale recovery for road-scene depth"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config, "structured config file");
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out-dir", g.out_dir, "output directory");
  app.add_option("--epochs", g.epochs, "training epochs to run");
  app.add_option("--mode", g.mode, "online | offline | finetune:N");

  app.fallthrough();

  SimulateArgs sim;
  auto *c_sim = app.add_subcommand("simulate", "render a synthetic sequence");
  c_sim->fallthrough();
  c_sim->add_option("--frames", sim.frames, "number of frames");
  c_sim->add_option("--scale", sim.scale, "pre-scale written depth maps");
  c_sim->add_option("--noise", sim.noise, "multiplicative depth noise sigma");
  c_sim->add_flag("--no-views", sim.no_views, "skip image pairs");
  c_sim->add_flag("--no-jitter", sim.no_jitter, "identical frames");

  CamheightArgs ch;
  auto *c_ch = app.add_subcommand("camheight", "run the recovery pipeline");
  c_ch->fallthrough();
  c_ch->add_option("--manifest", ch.manifest, "sequence manifest")
      ->required();
  c_ch->add_option("--state", ch.state, "state file to resume and update");
  c_ch->add_flag("--no-losses", ch.no_losses, "skip loss evaluation");
  c_ch->add_flag("--no-automask", ch.no_automask, "disable auto-masking");
  c_ch->add_flag("--literal-aux", ch.literal_aux,
                 "use the printed sign of the auxiliary ramp");
  c_ch->add_option("--default-height", ch.default_height,
                   "fallback prior height (m)");
  c_ch->add_option("--threshold", ch.threshold, "plausibility gap threshold");

  LossesArgs lo;
  auto *c_lo = app.add_subcommand("losses", "evaluate loss terms per frame");
  c_lo->fallthrough();
  c_lo->add_option("--manifest", lo.manifest, "sequence manifest")
      ->required();
  c_lo->add_option("--hstar", lo.hstar, "supervision height (m)");
  c_lo->add_option("--tau", lo.tau, "schedule position (epoch index)");
  c_lo->add_option("--default-height", lo.default_height,
                   "fallback prior height (m)");

  RefineArgs rf;
  auto *c_rf = app.add_subcommand("refine", "recover a global depth scale");
  c_rf->fallthrough();
  c_rf->add_option("--manifest", rf.manifest, "sequence manifest")
      ->required();
  c_rf->add_option("--steps", rf.steps, "descent step limit");
  c_rf->add_option("--lr", rf.lr, "learning rate (0 = auto)");
  c_rf->add_option("--tau", rf.tau, "schedule position (epoch index)");
  c_rf->add_option("--hstar", rf.hstar, "supervision height (m)");
  c_rf->add_option("--default-height", rf.default_height,
                   "fallback prior height (m)");

  ReportArgs rp;
  auto *c_rp = app.add_subcommand("report", "depth metrics against GT");
  c_rp->fallthrough();
  c_rp->add_option("--manifest", rp.manifest, "sequence manifest")
      ->required();
  c_rp->add_option("--cap", rp.cap, "depth cap in meters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_sim->parsed()) return run_simulate(g, sim);
    if (c_ch->parsed()) return run_camheight(g, ch);
    if (c_lo->parsed()) return run_losses(g, lo);
    if (c_rf->parsed()) return run_refine(g, rf);
    if (c_rp->parsed()) return run_report(g, rp);
  } catch (const usage_error &e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const data_error &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const numeric_error &e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
