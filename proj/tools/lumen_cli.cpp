#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lumen/pipeline/run.hpp"

namespace {

using lumen::pipeline::fixed6;

int run(int argc, char** argv) {
  CLI::App app{"structured-light stereo toolkit"};
  app.require_subcommand(1);

  // generate
  std::string gen_scene, gen_out;
  std::optional<std::uint64_t> gen_seed;
  auto* gen = app.add_subcommand("generate", "render a scene into a dataset directory");
  gen->add_option("--scene", gen_scene, "scene config json")->required();
  gen->add_option("--out", gen_out, "output dataset directory")->required();
  gen->add_option("--seed", gen_seed, "override the scene rng seed");

  // patterns
  std::string pat_kind = "gray", pat_out;
  int pat_t = 8, pat_width = 256;
  auto* pat = app.add_subcommand("patterns", "emit raw stripe pattern images");
  pat->add_option("--kind", pat_kind, "binary|gray")->check(CLI::IsMember({"binary", "gray"}));
  pat->add_option("--t", pat_t, "pattern count");
  pat->add_option("--width", pat_width, "code width (projector columns)");
  pat->add_option("--out", pat_out, "output directory")->required();

  // decode
  std::string dec_dataset, dec_out;
  int dec_frame = 0;
  auto* dec = app.add_subcommand("decode", "binarize and decode code maps for one frame");
  dec->add_option("--dataset", dec_dataset)->required();
  dec->add_option("--frame", dec_frame)->required();
  dec->add_option("--out", dec_out)->required();

  // match
  std::string match_dataset, match_out;
  int match_frame_idx = 0, match_patch = 17;
  double match_frac = 0.25;
  bool match_normalized = false, match_subpixel = false;
  auto* mat = app.add_subcommand("match", "cross-correlation disparity for one frame");
  mat->add_option("--dataset", match_dataset)->required();
  mat->add_option("--frame", match_frame_idx)->required();
  mat->add_option("--patch", match_patch, "odd patch side");
  mat->add_option("--max-disp-frac", match_frac, "search range as a fraction of width");
  mat->add_flag("--normalized", match_normalized, "normalized cross-correlation");
  mat->add_flag("--subpixel", match_subpixel, "parabolic refinement");
  mat->add_option("--out", match_out)->required();

  // codematch
  std::string cm_dataset, cm_out;
  int cm_frame = 0;
  double cm_frac = 0.25;
  auto* cm = app.add_subcommand("codematch", "exact code-match oracle disparity");
  cm->add_option("--dataset", cm_dataset)->required();
  cm->add_option("--frame", cm_frame)->required();
  cm->add_option("--max-disp-frac", cm_frac);
  cm->add_option("--out", cm_out)->required();

  // eval
  std::string ev_pred, ev_gt, ev_seg, ev_depth;
  auto* ev = app.add_subcommand("eval", "compare a predicted disparity PFM against ground truth");
  ev->add_option("--pred", ev_pred)->required();
  ev->add_option("--gt", ev_gt)->required();
  ev->add_option("--seg", ev_seg, "segmentation mask png for SEG-MAE");
  ev->add_option("--depth", ev_depth, "focal_px,baseline_m for depth MAE in mm");

  // uncert
  std::string un_dataset, un_out;
  int un_frame = 0;
  double un_sigma = 0.1;
  auto* un = app.add_subcommand("uncert", "noise-inject, rematch, and correlate uncertainty");
  un->add_option("--dataset", un_dataset)->required();
  un->add_option("--frame", un_frame)->required();
  un->add_option("--noise", un_sigma, "noise amplitude sigma")->required();
  un->add_option("--out", un_out)->required();

  // mtl-sim
  std::string mtl_sched, mtl_out;
  int mtl_epochs = 200;
  std::uint64_t mtl_seed = 1;
  auto* mtl = app.add_subcommand("mtl-sim", "toy two-task training with a loss scheduler");
  mtl->add_option("--scheduler", mtl_sched, "const:X | epr | unc")->required();
  mtl->add_option("--epochs", mtl_epochs);
  mtl->add_option("--seed", mtl_seed);
  mtl->add_option("--out", mtl_out, "csv path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  if (gen->parsed()) {
    lumen::DatasetManifest m = lumen::pipeline::generate_dataset(gen_scene, gen_out, gen_seed);
    std::cout << "FRAMES " << m.frames.size() << "\n";
    return 0;
  }
  if (pat->parsed()) {
    lumen::PatternSpec spec;
    spec.kind = lumen::pattern_kind_from_string(pat_kind);
    spec.t = pat_t;
    spec.code_width = pat_width;
    lumen::pipeline::emit_patterns(spec, pat_out);
    std::cout << "PATTERNS " << pat_t << "\n";
    return 0;
  }
  if (dec->parsed()) {
    lumen::pipeline::decode_frame(dec_dataset, dec_frame, dec_out);
    std::cout << "DECODED frame " << dec_frame << "\n";
    return 0;
  }
  if (mat->parsed()) {
    lumen::MatchConfig cfg;
    cfg.patch_side = match_patch;
    cfg.max_disp_fraction = match_frac;
    cfg.normalized = match_normalized;
    cfg.subpixel = match_subpixel;
    lumen::DisparityMap d =
        lumen::pipeline::match_frame(match_dataset, match_frame_idx, cfg, match_out);
    std::cout << "MATCHED " << lumen::count_set(d.valid) << " pixels\n";
    return 0;
  }
  if (cm->parsed()) {
    lumen::DisparityMap d = lumen::pipeline::codematch_frame(cm_dataset, cm_frame, cm_frac, cm_out);
    std::cout << "CODEMATCHED " << lumen::count_set(d.valid) << " pixels\n";
    return 0;
  }
  if (ev->parsed()) {
    std::optional<std::string> seg;
    if (!ev_seg.empty()) seg = ev_seg;
    std::optional<std::pair<double, double>> fb;
    if (!ev_depth.empty()) {
      auto comma = ev_depth.find(',');
      if (comma == std::string::npos)
        throw CLI::ValidationError("--depth expects focal_px,baseline_m");
      fb = {std::stod(ev_depth.substr(0, comma)), std::stod(ev_depth.substr(comma + 1))};
    }
    lumen::pipeline::evaluate(ev_pred, ev_gt, seg, fb).print(std::cout);
    return 0;
  }
  if (un->parsed()) {
    lumen::pipeline::UncertOutputs out =
        lumen::pipeline::uncert_frame(un_dataset, un_frame, un_sigma, un_out);
    auto opt6 = [](const std::optional<double>& v) {
      return v ? fixed6(*v) : std::string("undefined");
    };
    std::cout << "SLOPE " << fixed6(out.report.slope) << "\n"
              << "PEARSON " << opt6(out.report.pearson) << "\n"
              << "SPEARMAN " << opt6(out.report.spearman) << "\n";
    return out.report.pearson && out.report.spearman ? 0 : 1;
  }
  if (mtl->parsed()) {
    lumen::TrainingCurves curves;
    if (mtl_out.empty()) {
      curves = lumen::pipeline::run_mtl_sim(mtl_sched, mtl_epochs, mtl_seed, std::cout);
    } else {
      std::ofstream csv(mtl_out, std::ios::trunc);
      if (!csv) throw std::runtime_error("cannot open csv for writing: " + mtl_out);
      curves = lumen::pipeline::run_mtl_sim(mtl_sched, mtl_epochs, mtl_seed, csv);
      std::cout << "EPOCHS " << curves.epochs.size() << "\n";
    }
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
