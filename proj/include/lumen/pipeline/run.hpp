#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "lumen/eval/metrics.hpp"
#include "lumen/eval/noise.hpp"
#include "lumen/io/dataset.hpp"
#include "lumen/io/heatmap.hpp"
#include "lumen/match/cc_matcher.hpp"
#include "lumen/mtl/scheduler.hpp"

namespace lumen::pipeline {

namespace fs = std::filesystem;

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

/// generate: render every sampled viewpoint of the scene and write the tree.
inline DatasetManifest generate_dataset(const GenerateConfig& cfg, const std::string& out_dir) {
  std::vector<Pose> poses = sample_viewpoints(cfg.scene, cfg.camera, cfg.rig);
  std::vector<RenderResult> frames;
  frames.reserve(poses.size());
  for (const Pose& pose : poses)
    frames.push_back(render_view(cfg.scene, cfg.camera, cfg.rig, cfg.patterns, pose));
  write_dataset(out_dir, frames, cfg.patterns, cfg.camera, cfg.rig, cfg.scene.rng_seed);
  return read_manifest(out_dir);
}

inline DatasetManifest generate_dataset(const std::string& scene_json_path,
                                        const std::string& out_dir,
                                        std::optional<std::uint64_t> seed_override = {}) {
  GenerateConfig cfg = generate_config_from_json(load_json_file(scene_json_path));
  if (seed_override) cfg.scene.rng_seed = *seed_override;
  return generate_dataset(cfg, out_dir);
}

/// patterns: one square image per layer, stripes as 8-bit {0,255}.
inline void emit_patterns(const PatternSpec& spec, const std::string& out_dir) {
  spec.validate();
  fs::create_directories(out_dir);
  for (int n = 1; n <= spec.t; ++n) {
    Image2D<std::uint8_t> img(spec.code_width, spec.code_width, 0);
    for (int col = 0; col < spec.code_width; ++col) {
      std::uint8_t v = stripe(spec, n, col) ? 255 : 0;
      for (int y = 0; y < spec.code_width; ++y) img.at(col, y) = v;
    }
    char name[32];
    std::snprintf(name, sizeof(name), "pattern_%02d.png", n);
    write_png((fs::path(out_dir) / name).string(), img);
  }
}

struct DecodeOutputs {
  CodeMap left;
  CodeMap right;
};

/// decode: binarize the stored stacks and decode projector-column code maps.
inline DecodeOutputs decode_frame(const std::string& dataset_dir, int frame_index,
                                  const std::string& out_dir) {
  DatasetManifest manifest = read_manifest(dataset_dir);
  RenderResult frame = read_frame(dataset_dir, manifest, frame_index);
  DecodeOutputs out{decode(manifest.patterns, binarize(frame.patterns_left)),
                    decode(manifest.patterns, binarize(frame.patterns_right))};
  fs::create_directories(out_dir);
  for (const auto& [name, map] : {std::pair{"code_l.png", &out.left},
                                  std::pair{"code_r.png", &out.right}}) {
    Image2D<std::uint16_t> img(map->code.width(), map->code.height(), 0);
    for (std::size_t i = 0; i < img.size(); ++i)
      img.data()[i] = static_cast<std::uint16_t>(map->code.data()[i]);
    write_png((fs::path(out_dir) / name).string(), img);
  }
  return out;
}

inline void write_disparity_outputs(const DisparityMap& disp, const std::string& out_dir,
                                    const std::string& stem) {
  fs::create_directories(out_dir);
  write_pfm((fs::path(out_dir) / (stem + ".pfm")).string(), disp);
  write_png((fs::path(out_dir) / (stem + ".png")).string(),
            render_heatmap(disp.value, disp.valid));
  // 16-bit preview, disparity scaled x256 (convenience only; the PFM is authoritative)
  Image2D<std::uint16_t> preview(disp.width(), disp.height(), 0);
  for (int y = 0; y < disp.height(); ++y)
    for (int x = 0; x < disp.width(); ++x)
      if (disp.valid.at(x, y))
        preview.at(x, y) = static_cast<std::uint16_t>(
            std::min(65535.0, std::max(0.0, disp.value.at(x, y) * 256.0)));
  write_png((fs::path(out_dir) / (stem + "_x256.png")).string(), preview);
}

/// match: cross-correlation disparity for one frame.
inline DisparityMap match_frame(const std::string& dataset_dir, int frame_index,
                                const MatchConfig& cfg, const std::string& out_dir) {
  DatasetManifest manifest = read_manifest(dataset_dir);
  RenderResult frame = read_frame(dataset_dir, manifest, frame_index);
  DisparityMap disp = compute_disparity(frame.patterns_left, frame.patterns_right, cfg);
  write_disparity_outputs(disp, out_dir, "disp_cc");
  return disp;
}

/// codematch: exact code-equality oracle disparity. Projector-shadowed pixels
/// decode to the all-zero code, so they are masked out of the oracle.
inline DisparityMap codematch_frame(const std::string& dataset_dir, int frame_index,
                                    double max_disp_fraction, const std::string& out_dir) {
  DatasetManifest manifest = read_manifest(dataset_dir);
  RenderResult frame = read_frame(dataset_dir, manifest, frame_index);
  CodeMap left = decode(manifest.patterns, binarize(frame.patterns_left));
  CodeMap right = decode(manifest.patterns, binarize(frame.patterns_right));
  int u = static_cast<int>(max_disp_fraction * left.code.width());
  DisparityMap disp = code_match_disparity(left, right, u);
  for (int y = 0; y < disp.height(); ++y)
    for (int x = 0; x < disp.width(); ++x)
      if (frame.frame.shadow.at(x, y)) disp.valid.at(x, y) = 0;
  write_disparity_outputs(disp, out_dir, "disp_code");
  return disp;
}

struct EvalReport {
  double mae = 0.0;
  double iqr = 0.0;
  std::optional<double> seg_mae;
  std::optional<double> depth_mae_mm;

  void print(std::ostream& os) const {
    os << "MAE " << fixed6(mae) << "\n";
    os << "IQR " << fixed6(iqr) << "\n";
    if (seg_mae) os << "SEG-MAE " << fixed6(*seg_mae) << "\n";
    if (depth_mae_mm) os << "DEPTH-MAE-MM " << fixed6(*depth_mae_mm) << "\n";
  }
};

inline EvalReport evaluate(const std::string& pred_pfm, const std::string& gt_pfm,
                           const std::optional<std::string>& seg_png = {},
                           std::optional<std::pair<double, double>> depth_fb = {}) {
  DisparityMap pred = read_pfm(pred_pfm);
  DisparityMap gt = read_pfm(gt_pfm);
  EvalReport rep;
  rep.mae = mae(pred, gt);
  rep.iqr = iqr_abs_error(pred, gt);
  if (seg_png) {
    Mask seg = detail::mask_from_png(*seg_png);
    rep.seg_mae = seg_mae(pred, gt, seg);
  }
  if (depth_fb) {
    auto [f, b] = *depth_fb;
    DepthMap dp = disparity_to_depth(pred, f, b);
    DepthMap dg = disparity_to_depth(gt, f, b);
    DisparityMap p2(dp.depth_mm.width(), dp.depth_mm.height());
    DisparityMap g2(dg.depth_mm.width(), dg.depth_mm.height());
    p2.value = dp.depth_mm;
    p2.valid = dp.valid;
    g2.value = dg.depth_mm;
    g2.valid = dg.valid;
    rep.depth_mae_mm = mae(p2, g2);
  }
  return rep;
}

struct UncertOutputs {
  ConfidenceMap confidence;
  DisparityMap disparity;
  CorrelationReport report;
};

/// uncert: perturb the clean stacks with seeded smooth-field noise, rerun the
/// matcher, and correlate per-pixel uncertainty with absolute disparity error
/// over valid unshadowed pixels.
inline UncertOutputs uncert_frame(const std::string& dataset_dir, int frame_index, double sigma,
                                  const std::string& out_dir, const MatchConfig& mcfg = {}) {
  DatasetManifest manifest = read_manifest(dataset_dir);
  RenderResult frame = read_frame(dataset_dir, manifest, frame_index);
  std::uint64_t base = manifest.seed + 1000003ull * static_cast<std::uint64_t>(frame_index);
  PatternStack noisy_l = inject_noise(frame.patterns_left, sigma, base);
  PatternStack noisy_r = inject_noise(frame.patterns_right, sigma, base + 1);

  UncertOutputs out{uncertainty_map(noisy_l),
                    compute_disparity(noisy_l, noisy_r, mcfg),
                    {}};

  const int w = frame.frame.width(), h = frame.frame.height();
  Image2D<float> err(w, h, 0.f);
  Mask mask(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (frame.frame.valid.at(x, y) && !frame.frame.shadow.at(x, y) &&
          out.disparity.valid.at(x, y)) {
        err.at(x, y) = std::abs(out.disparity.value.at(x, y) - frame.frame.gt_disparity.at(x, y));
        mask.at(x, y) = 1;
      }
  out.report = correlation_report(out.confidence, err, mask);

  fs::create_directories(out_dir);
  write_png((fs::path(out_dir) / "unc.png").string(),
            render_heatmap(out.confidence.uncertainty, full_mask(w, h)));
  write_png((fs::path(out_dir) / "err.png").string(), render_heatmap(err, mask));
  write_disparity_outputs(out.disparity, out_dir, "disp_noisy");

  std::ofstream csv((fs::path(out_dir) / "corr.csv").string(), std::ios::trunc);
  csv << "unc_bin,err_bin,count\n";
  for (int ub = 0; ub < out.report.bins; ++ub)
    for (int eb = 0; eb < out.report.bins; ++eb)
      if (auto c = out.report.count_at(ub, eb)) csv << ub << "," << eb << "," << c << "\n";

  std::ofstream summary((fs::path(out_dir) / "summary.txt").string(), std::ios::trunc);
  auto opt6 = [&](const std::optional<double>& v) {
    return v ? fixed6(*v) : std::string("undefined");
  };
  summary << "SAMPLES " << out.report.samples << "\n"
          << "SLOPE " << fixed6(out.report.slope) << "\n"
          << "INTERCEPT " << fixed6(out.report.intercept) << "\n"
          << "PEARSON " << opt6(out.report.pearson) << "\n"
          << "SPEARMAN " << opt6(out.report.spearman) << "\n";
  return out;
}

inline Scheduler scheduler_from_string(const std::string& s) {
  if (s.rfind("const:", 0) == 0) {
    double lambda2;
    try {
      lambda2 = std::stod(s.substr(6));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad scheduler spec: " + s);
    }
    return ConstantScheduler{lambda2};
  }
  if (s == "const") return ConstantScheduler{};
  if (s == "epr") return EpochRatioScheduler{};
  if (s == "unc") return UncertaintyScheduler{};
  throw std::invalid_argument("unknown scheduler: " + s + " (use const:X | epr | unc)");
}

inline void write_curves_csv(const TrainingCurves& curves, std::ostream& os) {
  os << "epoch,L_sl,L_disp,lambda_sl,lambda_disp,eta_sl,eta_disp,total\n";
  for (const auto& r : curves.epochs)
    os << r.epoch << "," << fixed6(r.loss_sl) << "," << fixed6(r.loss_disp) << ","
       << fixed6(r.lambda_sl) << "," << fixed6(r.lambda_disp) << "," << fixed6(r.eta_sl) << ","
       << fixed6(r.eta_disp) << "," << fixed6(r.total) << "\n";
}

inline TrainingCurves run_mtl_sim(const std::string& scheduler_spec, int epochs,
                                  std::uint64_t seed, std::ostream& csv_out) {
  Scheduler sched = scheduler_from_string(scheduler_spec);
  validate(sched);
  TrainingCurves curves = toy_two_task_train(make_toy_config(seed, sched, epochs));
  write_curves_csv(curves, csv_out);
  return curves;
}

}  // namespace lumen::pipeline
