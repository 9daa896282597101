#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lumen/io/pfm.hpp"
#include "lumen/io/png.hpp"
#include "lumen/io/scene_json.hpp"
#include "lumen/scene/simulate.hpp"

namespace lumen {

constexpr int kDatasetVersion = 1;

struct FrameEntry {
  std::string dir;
  std::string left, right, disp_gt, valid, seg, shadow;
  std::vector<std::string> patterns_left, patterns_right;
};

struct DatasetManifest {
  int version = kDatasetVersion;
  PatternSpec patterns;
  CameraModel camera;
  ProjectorRig rig;
  std::uint64_t seed = 0;
  std::vector<FrameEntry> frames;
};

namespace detail {

inline std::string frame_dir_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%04d", index);
  return buf;
}

inline std::string pattern_file_name(char eye, int n) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "pat_%c_%02d.png", eye, n);
  return buf;
}

inline Mask mask_from_png(const std::string& path) {
  Image2D<std::uint8_t> img = read_png_gray8(path);
  Mask m(img.width(), img.height(), 0);
  for (std::size_t i = 0; i < img.size(); ++i) m.data()[i] = img.data()[i] ? 1 : 0;
  return m;
}

inline Image2D<std::uint8_t> mask_to_png(const Mask& m) {
  Image2D<std::uint8_t> img(m.width(), m.height(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) img.data()[i] = m.data()[i] ? 255 : 0;
  return img;
}

inline Image2D<std::uint8_t> quantize8(const Image2D<float>& img) {
  Image2D<std::uint8_t> out(img.width(), img.height(), 0);
  for (std::size_t i = 0; i < img.size(); ++i)
    out.data()[i] = static_cast<std::uint8_t>(
        std::lround(std::clamp(img.data()[i], 0.f, 1.f) * 255.f));
  return out;
}

inline bool layer_is_binary(const Image2D<float>& img) {
  for (std::size_t i = 0; i < img.size(); ++i)
    if (img.data()[i] != 0.f && img.data()[i] != 1.f) return false;
  return true;
}

/// Clean {0,1} layers go to 8-bit PNG; probabilistic layers to 16-bit.
inline void write_pattern_layer(const std::string& path, const Image2D<float>& layer) {
  if (layer_is_binary(layer)) {
    write_png(path, quantize8(layer));
    return;
  }
  Image2D<std::uint16_t> img(layer.width(), layer.height(), 0);
  for (std::size_t i = 0; i < layer.size(); ++i)
    img.data()[i] = static_cast<std::uint16_t>(
        std::lround(std::clamp(layer.data()[i], 0.f, 1.f) * 65535.f));
  write_png(path, img);
}

inline Image2D<float> read_pattern_layer(const std::string& path) {
  PngData d = read_png(path);
  if (d.channels != 1)
    throw std::runtime_error("dataset: pattern layer must be grayscale: " + path);
  const float scale = d.bit_depth == 16 ? 65535.f : 255.f;
  Image2D<float> out(d.width, d.height, 0.f);
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = d.samples[i] / scale;
  return out;
}

}  // namespace detail

inline Json to_json(const FrameEntry& e) {
  return {{"dir", e.dir},       {"left", e.left},     {"right", e.right},
          {"disp_gt", e.disp_gt}, {"valid", e.valid}, {"seg", e.seg},
          {"shadow", e.shadow},   {"patterns_left", e.patterns_left},
          {"patterns_right", e.patterns_right}};
}

inline Json to_json(const DatasetManifest& m) {
  Json frames = Json::array();
  for (const auto& e : m.frames) frames.push_back(to_json(e));
  return {{"version", m.version}, {"patterns", to_json(m.patterns)},
          {"camera", to_json(m.camera)}, {"rig", to_json(m.rig)},
          {"seed", m.seed},       {"frames", frames}};
}

inline DatasetManifest manifest_from_json(const Json& j) {
  DatasetManifest m;
  m.version = j.at("version").get<int>();
  if (m.version != kDatasetVersion)
    throw std::runtime_error("dataset: unsupported manifest version " +
                             std::to_string(m.version) + " (expected " +
                             std::to_string(kDatasetVersion) + ")");
  m.patterns = patterns_from_json(j.at("patterns"));
  m.camera = camera_from_json(j.at("camera"));
  m.rig = rig_from_json(j.at("rig"));
  m.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& fj : j.at("frames")) {
    FrameEntry e;
    e.dir = fj.at("dir").get<std::string>();
    e.left = fj.at("left").get<std::string>();
    e.right = fj.at("right").get<std::string>();
    e.disp_gt = fj.at("disp_gt").get<std::string>();
    e.valid = fj.at("valid").get<std::string>();
    e.seg = fj.at("seg").get<std::string>();
    e.shadow = fj.at("shadow").get<std::string>();
    e.patterns_left = fj.at("patterns_left").get<std::vector<std::string>>();
    e.patterns_right = fj.at("patterns_right").get<std::vector<std::string>>();
    if (static_cast<int>(e.patterns_left.size()) != m.patterns.t ||
        static_cast<int>(e.patterns_right.size()) != m.patterns.t)
      throw std::runtime_error("dataset: frame " + e.dir + " pattern file count != t");
    m.frames.push_back(std::move(e));
  }
  return m;
}

inline void write_dataset(const std::string& root, const std::vector<RenderResult>& frames,
                          const PatternSpec& patterns, const CameraModel& camera,
                          const ProjectorRig& rig, std::uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(root);
  DatasetManifest manifest;
  manifest.patterns = patterns;
  manifest.camera = camera;
  manifest.rig = rig;
  manifest.seed = seed;

  for (std::size_t i = 0; i < frames.size(); ++i) {
    const RenderResult& fr = frames[i];
    FrameEntry e;
    e.dir = detail::frame_dir_name(static_cast<int>(i));
    fs::create_directories(fs::path(root) / e.dir);
    auto rel = [&](const std::string& name) { return e.dir + "/" + name; };
    auto abs = [&](const std::string& name) { return (fs::path(root) / e.dir / name).string(); };

    e.left = rel("left.png");
    e.right = rel("right.png");
    e.disp_gt = rel("disp_gt.pfm");
    e.valid = rel("valid.png");
    e.seg = rel("seg.png");
    e.shadow = rel("shadow.png");
    write_png(abs("left.png"), detail::quantize8(fr.frame.image_left));
    write_png(abs("right.png"), detail::quantize8(fr.frame.image_right));
    DisparityMap gt(fr.frame.width(), fr.frame.height());
    gt.value = fr.frame.gt_disparity;
    gt.valid = fr.frame.valid;
    write_pfm(abs("disp_gt.pfm"), gt);
    write_png(abs("valid.png"), detail::mask_to_png(fr.frame.valid));
    write_png(abs("seg.png"), detail::mask_to_png(fr.frame.seg));
    write_png(abs("shadow.png"), detail::mask_to_png(fr.frame.shadow));
    for (int n = 1; n <= patterns.t; ++n) {
      std::string fl = detail::pattern_file_name('l', n);
      std::string fright = detail::pattern_file_name('r', n);
      detail::write_pattern_layer(abs(fl), fr.patterns_left.layer(n - 1));
      detail::write_pattern_layer(abs(fright), fr.patterns_right.layer(n - 1));
      e.patterns_left.push_back(rel(fl));
      e.patterns_right.push_back(rel(fright));
    }
    manifest.frames.push_back(std::move(e));
  }

  std::ofstream mf((fs::path(root) / "manifest.json").string(), std::ios::trunc);
  if (!mf) throw std::runtime_error("dataset: cannot write manifest in " + root);
  mf << to_json(manifest).dump(2) << "\n";
}

inline DatasetManifest read_manifest(const std::string& root) {
  namespace fs = std::filesystem;
  fs::path mpath = fs::path(root) / "manifest.json";
  if (!fs::exists(mpath))
    throw std::runtime_error("dataset: manifest not found: " + mpath.string());
  return manifest_from_json(load_json_file(mpath.string()));
}

/// Load one frame (images as stored-precision floats, stacks, gt, masks).
inline RenderResult read_frame(const std::string& root, const DatasetManifest& manifest,
                               int index) {
  namespace fs = std::filesystem;
  if (index < 0 || index >= static_cast<int>(manifest.frames.size()))
    throw std::out_of_range("dataset: frame index " + std::to_string(index) + " out of range");
  const FrameEntry& e = manifest.frames[index];
  auto abs = [&](const std::string& relpath) { return (fs::path(root) / relpath).string(); };
  auto check = [&](const std::string& relpath) {
    std::string p = abs(relpath);
    if (!fs::exists(p)) throw std::runtime_error("dataset: missing file: " + p);
    return p;
  };

  Image2D<std::uint8_t> left8 = read_png_gray8(check(e.left));
  const int w = left8.width(), h = left8.height();
  RenderResult out{StereoFrame(w, h), PatternStack(w, h, manifest.patterns.t, 0.f),
                   PatternStack(w, h, manifest.patterns.t, 0.f)};
  auto to_float = [](const Image2D<std::uint8_t>& img) {
    Image2D<float> f(img.width(), img.height(), 0.f);
    for (std::size_t i = 0; i < img.size(); ++i) f.data()[i] = img.data()[i] / 255.f;
    return f;
  };
  out.frame.image_left = to_float(left8);
  out.frame.image_right = to_float(read_png_gray8(check(e.right)));
  DisparityMap gt = read_pfm(check(e.disp_gt));
  out.frame.gt_disparity = gt.value;
  out.frame.valid = detail::mask_from_png(check(e.valid));
  out.frame.seg = detail::mask_from_png(check(e.seg));
  out.frame.shadow = detail::mask_from_png(check(e.shadow));
  auto load_layer = [&](const std::string& relpath) {
    Image2D<float> layer = detail::read_pattern_layer(check(relpath));
    if (layer.width() != w || layer.height() != h)
      throw std::runtime_error("dataset: pattern layer size mismatch: " + abs(relpath));
    return layer;
  };
  for (int n = 0; n < manifest.patterns.t; ++n) {
    out.patterns_left.set_layer(n, load_layer(e.patterns_left[n]));
    out.patterns_right.set_layer(n, load_layer(e.patterns_right[n]));
  }
  return out;
}

struct Dataset {
  DatasetManifest manifest;
  std::vector<RenderResult> frames;
};

inline Dataset read_dataset(const std::string& root) {
  Dataset d;
  d.manifest = read_manifest(root);
  for (int i = 0; i < static_cast<int>(d.manifest.frames.size()); ++i)
    d.frames.push_back(read_frame(root, d.manifest, i));
  return d;
}

}  // namespace lumen
