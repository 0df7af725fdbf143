#include "scenecode/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "scenecode/codecs.hpp"
#include "scenecode/error.hpp"
#include "scenecode/geometry.hpp"
#include "scenecode/rng.hpp"
#include "scenecode/scene_json.hpp"

namespace scenecode {

void GenConfig::validate() const {
  if (tier < 1 || tier > 5) throw Error("tier must lie in 1..5");
  if (palette.empty()) throw Error("palette must not be empty");
  if (!(ground_half_extent > 0.0)) throw Error("ground_half_extent must be positive");
  if (max_screen_overlap && !(*max_screen_overlap >= 0.0 && *max_screen_overlap <= 1.0)) {
    throw Error("max_screen_overlap must lie in [0, 1]");
  }
  if (viewpoints < 1) throw Error("viewpoints must be positive");
}

double default_screen_overlap(int tier) {
  switch (tier) {
    case 1:
    case 2: return 0.10;
    case 3: return 0.15;
    case 4: return 0.35;
    case 5: return 0.50;
    default: throw Error("tier must lie in 1..5");
  }
}

double GenConfig::screen_overlap_cap() const {
  return max_screen_overlap.value_or(default_screen_overlap(tier));
}

int tier_object_count(int tier) {
  switch (tier) {
    case 1: return 3;
    case 2: return 6;
    case 3: return 10;
    case 4: return 15;
    case 5: return 20;
    default: throw Error("tier must lie in 1..5");
  }
}

namespace {

double quantize(double v, double step) { return std::round(v / step) * step; }

struct Box2 {
  double u0 = std::numeric_limits<double>::infinity();
  double v0 = std::numeric_limits<double>::infinity();
  double u1 = -std::numeric_limits<double>::infinity();
  double v1 = -std::numeric_limits<double>::infinity();

  double area() const { return std::max(0.0, u1 - u0) * std::max(0.0, v1 - v0); }
};

Box2 projected_box(const SceneObject& obj, const Camera& camera) {
  const AABB box = object_aabb(obj);
  const CameraFrame frame(camera);
  const double tan_half = std::tan(camera.fov * std::numbers::pi / 360.0);
  Box2 out;
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 c{(corner & 1) ? box.max.x : box.min.x, (corner & 2) ? box.max.y : box.min.y,
                 (corner & 4) ? box.max.z : box.min.z};
    const CameraPoint p = frame.to_camera(c);
    const double depth = std::max(p.depth, 1e-6);
    const double u = p.x / (depth * tan_half * camera.aspect);
    const double v = p.y / (depth * tan_half);
    out.u0 = std::min(out.u0, u);
    out.u1 = std::max(out.u1, u);
    out.v0 = std::min(out.v0, v);
    out.v1 = std::max(out.v1, v);
  }
  return out;
}

Camera frontal_camera(const std::vector<SceneObject>& objects) {
  Scene tmp;
  tmp.objects = objects;
  GenConfig cfg;
  cfg.viewpoints = 1;
  return camera_poses(tmp, cfg).front();
}

// Index of the later object in the first pair violating the placement rules.
std::optional<std::size_t> first_violation(const std::vector<SceneObject>& objects,
                                           const GenConfig& config) {
  const Camera cam = frontal_camera(objects);
  std::vector<Box2> boxes;
  boxes.reserve(objects.size());
  for (const auto& o : objects) boxes.push_back(projected_box(o, cam));
  for (std::size_t j = 1; j < objects.size(); ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const Vec3 d = objects[i].position - objects[j].position;
      if (std::hypot(d.x, d.z) < config.min_center_separation) return j;
      const Box2& a = boxes[i];
      const Box2& b = boxes[j];
      const Box2 inter{std::max(a.u0, b.u0), std::max(a.v0, b.v0), std::min(a.u1, b.u1),
                       std::min(a.v1, b.v1)};
      const double denom = std::min(a.area(), b.area());
      if (denom > 0.0 && inter.area() / denom > config.screen_overlap_cap()) return j;
    }
  }
  return std::nullopt;
}

SceneObject sample_object(Rng& rng, const GenConfig& config) {
  SceneObject o;
  o.class_name = std::string(to_string(kAllPrimitives[rng.index(kAllPrimitives.size())]));
  o.material = config.palette[rng.index(config.palette.size())];
  for (int k = 0; k < 3; ++k) o.scale[k] = quantize(rng.uniform(0.6, 1.4), 1e-3);
  o.rotation = {0.0, quantize(rng.uniform(0.0, 2.0 * std::numbers::pi), 1e-4), 0.0};
  const AABB local = unit_bounds(o.class_name);
  o.position.y = -local.min.y * o.scale.y;  // resting on y = 0
  return o;
}

void place(SceneObject& o, Rng& rng, const GenConfig& config) {
  const double h = config.ground_half_extent;
  o.position.x = quantize(rng.uniform(-h, h), 1e-3);
  o.position.z = quantize(rng.uniform(-h, h), 1e-3);
}

}  // namespace

double screen_overlap(const SceneObject& a, const SceneObject& b, const Camera& camera) {
  const Box2 pa = projected_box(a, camera);
  const Box2 pb = projected_box(b, camera);
  const Box2 inter{std::max(pa.u0, pb.u0), std::max(pa.v0, pb.v0), std::min(pa.u1, pb.u1),
                   std::min(pa.v1, pb.v1)};
  const double denom = std::min(pa.area(), pb.area());
  return denom > 0.0 ? inter.area() / denom : 0.0;
}

Scene generate_scene(const GenConfig& config) {
  config.validate();
  const int n = tier_object_count(config.tier);
  Rng rng(config.seed);
  std::vector<SceneObject> objects;
  int attempts = 0;
  // The frontal camera follows the centroid and extent as objects are added,
  // so every step re-checks the whole set and whichever object violates the
  // rules (usually the newcomer) is rejected.
  while (true) {
    if (static_cast<int>(objects.size()) < n) {
      SceneObject o = sample_object(rng, config);
      place(o, rng, config);
      objects.push_back(std::move(o));
    }
    const auto bad = first_violation(objects, config);
    if (!bad) {
      if (static_cast<int>(objects.size()) == n) break;
      continue;
    }
    objects.erase(objects.begin() + static_cast<std::ptrdiff_t>(*bad));
    if (++attempts >= config.max_attempts) throw Error("placement infeasible");
  }
  Scene s;
  s.scene_id = "t" + std::to_string(config.tier) + "_s" + std::to_string(config.seed);
  s.objects = std::move(objects);
  s.tier = config.tier;
  const double h = config.ground_half_extent;
  s.extent = AABB{{-h, 0.0, -h}, {h, 2.0 * h, h}};
  s.camera = camera_poses(s, config).front();
  return s;
}

std::vector<Camera> camera_poses(const Scene& scene, const GenConfig& config) {
  Vec3 target;
  if (!scene.objects.empty()) {
    for (const auto& o : scene.objects) target += o.position;
    target = target / static_cast<double>(scene.objects.size());
  }
  const double dist =
      kCameraDistanceFactor * (scene.objects.empty() ? 1.0 : scene_extent(scene));
  const double el = kFrontalElevationDeg * std::numbers::pi / 180.0;
  std::vector<Camera> out;
  for (int k = 0; k < config.viewpoints; ++k) {
    const double az = 2.0 * std::numbers::pi * k / config.viewpoints;
    Camera c;
    c.target = target;
    c.position = target + Vec3{std::sin(az) * std::cos(el), std::sin(el),
                               std::cos(az) * std::cos(el)} * dist;
    c.fov = kDefaultFov;
    out.push_back(c);
  }
  return out;
}

std::string export_render_script(const Scene& scene, const Camera& camera) {
  std::string out = serialize(SceneCodeLanguage::blender_python, scene);
  const Vec3& p = camera.position;
  const Vec3& t = camera.target;
  out += "\n# --- render setup ---\n";
  out += "import mathutils\n";
  out += "bpy.ops.object.camera_add(location=(" + format_fixed(p.x) + ", " + format_fixed(p.y) +
         ", " + format_fixed(p.z) + "))\n";
  out += "cam = bpy.context.active_object\n";
  out += "cam.data.sensor_fit = 'VERTICAL'\n";
  out += "cam.data.angle = math.radians(" + format_fixed(camera.fov) + ")\n";
  out += "direction = mathutils.Vector((" + format_fixed(t.x) + ", " + format_fixed(t.y) + ", " +
         format_fixed(t.z) + ")) - cam.location\n";
  out += "cam.rotation_euler = direction.to_track_quat('-Z', 'Y').to_euler()\n";
  out += "bpy.context.scene.camera = cam\n";
  out += "bpy.context.scene.render.resolution_x = " + std::to_string(kRenderSize) + "\n";
  out += "bpy.context.scene.render.resolution_y = " + std::to_string(kRenderSize) + "\n";
  out += "bpy.context.scene.render.resolution_percentage = 100\n";
  return out;
}

}  // namespace scenecode
