#pragma once

#include <nlohmann/json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

#include "lumen/patterns/codec.hpp"
#include "lumen/scene/scene.hpp"

namespace lumen {

using Json = nlohmann::json;

inline Json to_json(const CameraModel& c) {
  return {{"focal_px", c.focal_px},     {"principal_x", c.principal_x},
          {"principal_y", c.principal_y}, {"width", c.width},
          {"height", c.height},         {"baseline_m", c.baseline_m}};
}

inline CameraModel camera_from_json(const Json& j) {
  CameraModel c;
  c.width = j.value("width", c.width);
  c.height = j.value("height", c.height);
  c.focal_px = j.value("focal_px", c.focal_px);
  c.principal_x = j.value("principal_x", c.width / 2.0);
  c.principal_y = j.value("principal_y", c.height / 2.0);
  c.baseline_m = j.value("baseline_m", c.baseline_m);
  c.validate();
  return c;
}

inline Json to_json(const ProjectorRig& r) {
  return {{"rotation_y_deg", r.rotation_y_deg},
          {"translation_m", {r.translation_m.x, r.translation_m.y, r.translation_m.z}},
          {"projector_columns", r.projector_columns},
          {"projector_focal_px", r.projector_focal_px}};
}

inline ProjectorRig rig_from_json(const Json& j) {
  ProjectorRig r;
  r.rotation_y_deg = j.value("rotation_y_deg", r.rotation_y_deg);
  if (j.contains("translation_m")) {
    auto t = j.at("translation_m");
    if (!t.is_array() || t.size() != 3)
      throw std::invalid_argument("rig: translation_m must be [x,y,z]");
    r.translation_m = {t[0].get<double>(), t[1].get<double>(), t[2].get<double>()};
  }
  r.projector_columns = j.value("projector_columns", r.projector_columns);
  r.projector_focal_px = j.value("projector_focal_px", r.projector_focal_px);
  return r;
}

inline Json to_json(const PatternSpec& p) {
  return {{"kind", to_string(p.kind)}, {"t", p.t}, {"code_width", p.code_width}};
}

inline PatternSpec patterns_from_json(const Json& j) {
  PatternSpec p;
  if (j.contains("kind")) p.kind = pattern_kind_from_string(j.at("kind").get<std::string>());
  p.t = j.value("t", p.t);
  p.code_width = j.value("code_width", p.code_width);
  p.validate();
  return p;
}

inline Json to_json(const Primitive& p) {
  Json j{{"kind", to_string(p.kind)},
         {"position", {p.position.x, p.position.y, p.position.z}},
         {"albedo", p.albedo}};
  if (p.kind == PrimitiveKind::Plane) j["normal"] = {p.normal.x, p.normal.y, p.normal.z};
  if (p.yaw_deg != 0.0) j["yaw_deg"] = p.yaw_deg;
  if (p.on_podium) j["on_podium"] = true;
  if (p.size.x > 0 || p.size.y > 0 || p.size.z > 0)
    j["size"] = {p.size.x, p.size.y, p.size.z};
  return j;
}

inline Primitive primitive_from_json(const Json& j) {
  Primitive p;
  p.kind = primitive_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("position")) {
    auto v = j.at("position");
    if (!v.is_array() || v.size() != 3)
      throw std::invalid_argument("primitive: position must be [x,y,z]");
    p.position = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }
  if (j.contains("size")) {
    auto v = j.at("size");
    if (v.is_number()) {
      double s = v.get<double>();
      p.size = {s, s, s};
      if (p.kind == PrimitiveKind::Sphere) p.size.y = p.size.z = 0;
    } else if (v.is_array() && v.size() == 3) {
      p.size = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    } else {
      throw std::invalid_argument("primitive: size must be a number or [x,y,z]");
    }
  }
  if (j.contains("normal")) {
    auto v = j.at("normal");
    if (!v.is_array() || v.size() != 3)
      throw std::invalid_argument("primitive: normal must be [x,y,z]");
    p.normal = {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
  }
  p.yaw_deg = j.value("yaw_deg", 0.0);
  p.albedo = j.value("albedo", p.albedo);
  p.on_podium = j.value("on_podium", false);
  return p;
}

inline Json to_json(const SceneConfig& s) {
  Json prims = Json::array();
  for (const auto& p : s.primitives) prims.push_back(to_json(p));
  return {{"room_side_m", s.room_side_m},
          {"podium_side_m", s.podium_side_m},
          {"primitives", prims},
          {"object_scale_range", {s.object_scale_range.low, s.object_scale_range.high}},
          {"view_distance_range", {s.view_distance_range.low, s.view_distance_range.high}},
          {"views_per_object", s.views_per_object},
          {"rng_seed", s.rng_seed}};
}

inline SceneConfig scene_from_json(const Json& j) {
  SceneConfig s;
  s.room_side_m = j.value("room_side_m", s.room_side_m);
  s.podium_side_m = j.value("podium_side_m", s.podium_side_m);
  auto range = [&](const char* key, Range dflt) {
    if (!j.contains(key)) return dflt;
    auto v = j.at(key);
    if (!v.is_array() || v.size() != 2)
      throw std::invalid_argument(std::string("scene: ") + key + " must be [low, high]");
    return Range{v[0].get<double>(), v[1].get<double>()};
  };
  s.object_scale_range = range("object_scale_range", s.object_scale_range);
  s.view_distance_range = range("view_distance_range", s.view_distance_range);
  s.views_per_object = j.value("views_per_object", s.views_per_object);
  s.rng_seed = j.value("rng_seed", s.rng_seed);
  if (j.contains("primitives"))
    for (const auto& p : j.at("primitives")) s.primitives.push_back(primitive_from_json(p));
  s.validate();
  return s;
}

/// Full generation config: the scene plus optional camera/rig/patterns blocks.
struct GenerateConfig {
  SceneConfig scene;
  CameraModel camera;
  ProjectorRig rig;
  PatternSpec patterns;
};

inline GenerateConfig generate_config_from_json(const Json& j) {
  GenerateConfig cfg;
  cfg.scene = scene_from_json(j);
  if (j.contains("camera")) cfg.camera = camera_from_json(j.at("camera"));
  if (j.contains("rig")) cfg.rig = rig_from_json(j.at("rig"));
  if (j.contains("patterns")) cfg.patterns = patterns_from_json(j.at("patterns"));
  cfg.rig.validate(cfg.patterns.t);
  return cfg;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open json file: " + path);
  Json j;
  try {
    f >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error("cannot parse json file " + path + ": " + e.what());
  }
  return j;
}

}  // namespace lumen
