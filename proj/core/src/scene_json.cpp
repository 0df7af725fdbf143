#include "scenecode/scene_json.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "scenecode/error.hpp"

namespace scenecode {

std::string format_fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  if (s.starts_with('-') && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

namespace {

std::string quote(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

std::string vec(const Vec3& v) {
  return "[" + format_fixed(v.x) + ", " + format_fixed(v.y) + ", " + format_fixed(v.z) + "]";
}

Vec3 read_vec(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw Error(std::string(what) + " must be a 3-element array");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[static_cast<std::size_t>(i)].is_number()) {
      throw Error(std::string(what) + " entries must be numbers");
    }
    v[i] = j[static_cast<std::size_t>(i)].get<double>();
  }
  if (!v.finite()) throw Error(std::string(what) + " must be finite");
  return v;
}

}  // namespace

std::string to_canonical_json(const Scene& scene) {
  std::string out = "{\n";
  if (scene.camera) {
    const Camera& c = *scene.camera;
    out += "  \"camera\": {\n";
    if (c.aspect != 1.0) out += "    \"aspect\": " + format_fixed(c.aspect) + ",\n";
    out += "    \"fov\": " + format_fixed(c.fov) + ",\n";
    out += "    \"position\": " + vec(c.position) + ",\n";
    out += "    \"target\": " + vec(c.target) + "\n";
    out += "  },\n";
  }
  if (scene.extent) {
    out += "  \"extent\": {\"max\": " + vec(scene.extent->max) + ", \"min\": " +
           vec(scene.extent->min) + "},\n";
  }
  if (scene.objects.empty()) {
    out += "  \"objects\": [],\n";
  } else {
    out += "  \"objects\": [\n";
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
      const SceneObject& o = scene.objects[i];
      out += "    {\"class_name\": " + quote(o.class_name) + ", \"material\": " + quote(o.material) +
             ", \"position\": " + vec(o.position) + ", \"rotation\": " + vec(o.rotation) +
             ", \"scale\": " + vec(o.scale) + "}";
      out += (i + 1 < scene.objects.size()) ? ",\n" : "\n";
    }
    out += "  ],\n";
  }
  out += "  \"scene_id\": " + quote(scene.scene_id);
  if (scene.tier) out += ",\n  \"tier\": " + std::to_string(*scene.tier);
  out += "\n}\n";
  return out;
}

namespace {

Scene read_scene(const nlohmann::json& j) {
  if (!j.is_object()) throw Error("scene JSON must be an object");
  Scene s;
  if (j.contains("scene_id")) s.scene_id = j.at("scene_id").get<std::string>();
  if (s.scene_id.empty()) throw Error("scene_id must be non-empty");
  if (!j.contains("objects") || !j.at("objects").is_array()) throw Error("scene JSON lacks objects");
  for (const auto& jo : j.at("objects")) {
    if (!jo.is_object()) throw Error("object entries must be objects");
    SceneObject o;
    if (!jo.contains("class_name") || !jo.at("class_name").is_string()) {
      throw Error("object lacks class_name");
    }
    o.class_name = normalize_class_name(jo.at("class_name").get<std::string>());
    o.position = read_vec(jo.at("position"), "position");
    if (jo.contains("rotation")) o.rotation = read_vec(jo.at("rotation"), "rotation");
    if (jo.contains("scale")) o.scale = read_vec(jo.at("scale"), "scale");
    if (jo.contains("material")) o.material = jo.at("material").get<std::string>();
    s.objects.push_back(std::move(o));
  }
  if (j.contains("camera") && !j.at("camera").is_null()) {
    const auto& jc = j.at("camera");
    Camera c;
    c.position = read_vec(jc.at("position"), "camera.position");
    c.target = read_vec(jc.at("target"), "camera.target");
    if (jc.contains("fov")) c.fov = jc.at("fov").get<double>();
    if (jc.contains("aspect")) c.aspect = jc.at("aspect").get<double>();
    validate(c);
    s.camera = c;
  }
  if (j.contains("tier") && !j.at("tier").is_null()) {
    const int t = j.at("tier").get<int>();
    if (t < 1 || t > 5) throw Error("tier must lie in 1..5");
    s.tier = t;
  }
  if (j.contains("extent") && !j.at("extent").is_null()) {
    s.extent = AABB{read_vec(j.at("extent").at("min"), "extent.min"),
                    read_vec(j.at("extent").at("max"), "extent.max")};
  }
  return s;
}

}  // namespace

Scene scene_from_json(std::string_view text) {
  try {
    return read_scene(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("invalid scene JSON: ") + e.what());
  }
}

}  // namespace scenecode
