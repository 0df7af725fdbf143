#include "scenecode/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "scenecode/error.hpp"

namespace scenecode {

Mat3 rotation_matrix(const Vec3& e) {
  const double cx = std::cos(e.x), sx = std::sin(e.x);
  const double cy = std::cos(e.y), sy = std::sin(e.y);
  const double cz = std::cos(e.z), sz = std::sin(e.z);
  Mat3 rx, ry, rz;
  rx.m = {1, 0, 0, 0, cx, -sx, 0, sx, cx};
  ry.m = {cy, 0, sy, 0, 1, 0, -sy, 0, cy};
  rz.m = {cz, -sz, 0, sz, cz, 0, 0, 0, 1};
  return rx * ry * rz;
}

Vec3 euler_from_matrix(const Mat3& r) {
  const double m13 = std::clamp(r(0, 2), -1.0, 1.0);
  Vec3 e;
  e.y = std::asin(m13);
  if (std::abs(m13) < 0.9999999) {
    e.x = std::atan2(-r(1, 2), r(2, 2));
    e.z = std::atan2(-r(0, 1), r(0, 0));
  } else {
    // gimbal lock: fold all roll into x
    e.x = std::atan2(r(2, 1), r(1, 1));
    e.z = 0.0;
  }
  return e;
}

AABB unit_bounds(std::string_view class_name) {
  if (class_name == "torus") return {{-0.7, -0.2, -0.7}, {0.7, 0.2, 0.7}};
  // cube, sphere, cylinder, cone, pyramid and free-form classes share the unit box
  return {{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
}

AABB object_aabb(const SceneObject& obj) {
  const AABB local = unit_bounds(obj.class_name);
  const Mat3 rot = rotation_matrix(obj.rotation);
  AABB out{Vec3{INFINITY, INFINITY, INFINITY}, Vec3{-INFINITY, -INFINITY, -INFINITY}};
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 c{(corner & 1) ? local.max.x : local.min.x, (corner & 2) ? local.max.y : local.min.y,
                 (corner & 4) ? local.max.z : local.min.z};
    const Vec3 p = rot * hadamard(c, obj.scale) + obj.position;
    out.min = cwise_min(out.min, p);
    out.max = cwise_max(out.max, p);
  }
  return out;
}

double scene_extent(const Scene& scene) {
  if (scene.objects.empty()) throw Error("empty scene has no extent");
  Vec3 lo = scene.objects.front().position;
  Vec3 hi = lo;
  for (const auto& o : scene.objects) {
    lo = cwise_min(lo, o.position);
    hi = cwise_max(hi, o.position);
  }
  return std::max(1.0, norm(hi - lo));
}

CameraFrame::CameraFrame(const Camera& camera) : origin(camera.position) {
  forward = normalized(camera.target - camera.position);
  Vec3 r = cross(forward, Vec3{0, 1, 0});
  if (norm(r) < 1e-9) r = cross(forward, Vec3{0, 0, -1});  // looking straight up or down
  right = normalized(r);
  up = cross(right, forward);
}

CameraPoint CameraFrame::to_camera(const Vec3& p) const {
  const Vec3 d = p - origin;
  return {dot(d, right), dot(d, up), dot(d, forward)};
}

namespace {

struct Ndc {
  double x;
  double y;
  double depth;
};

Ndc to_ndc(const Camera& camera, const Vec3& point) {
  const CameraPoint c = CameraFrame(camera).to_camera(point);
  const double tan_half = std::tan(camera.fov * std::numbers::pi / 360.0);
  if (c.depth <= 0.0) return {0.0, 0.0, c.depth};
  return {c.x / (c.depth * tan_half * camera.aspect), c.y / (c.depth * tan_half), c.depth};
}

}  // namespace

bool in_frustum(const Camera& camera, const Vec3& point) {
  constexpr double kEdge = 1.0 + 1e-12;
  const Ndc n = to_ndc(camera, point);
  return n.depth > 0.0 && std::abs(n.x) <= kEdge && std::abs(n.y) <= kEdge;
}

Pixel project_to_image(const Camera& camera, const Vec3& point, int image_size) {
  const Ndc n = to_ndc(camera, point);
  if (!(n.depth > 0.0)) throw Error("unprojectable");
  const double s = static_cast<double>(image_size);
  return {(n.x + 1.0) * 0.5 * s, (1.0 - n.y) * 0.5 * s};
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::left_of: return "left-of";
    case Relation::right_of: return "right-of";
    case Relation::above: return "above";
    case Relation::below: return "below";
    case Relation::in_front_of: return "in-front-of";
    case Relation::behind: return "behind";
    case Relation::closer_than: return "closer-than";
    case Relation::farther_than: return "farther-than";
  }
  return "";
}

Relation opposite(Relation r) {
  switch (r) {
    case Relation::left_of: return Relation::right_of;
    case Relation::right_of: return Relation::left_of;
    case Relation::above: return Relation::below;
    case Relation::below: return Relation::above;
    case Relation::in_front_of: return Relation::behind;
    case Relation::behind: return Relation::in_front_of;
    case Relation::closer_than: return Relation::farther_than;
    case Relation::farther_than: return Relation::closer_than;
  }
  return r;
}

std::vector<Relation> spatial_relations(const SceneObject& a, const SceneObject& b,
                                        const Camera& camera, double margin) {
  const CameraFrame frame(camera);
  const CameraPoint ca = frame.to_camera(a.position);
  const CameraPoint cb = frame.to_camera(b.position);
  std::vector<Relation> out;
  if (ca.x < cb.x - margin) out.push_back(Relation::left_of);
  if (ca.x > cb.x + margin) out.push_back(Relation::right_of);
  // vertical relations use the scene frame, not the camera frame
  if (a.position.y > b.position.y + margin) out.push_back(Relation::above);
  if (a.position.y < b.position.y - margin) out.push_back(Relation::below);
  if (ca.depth < cb.depth - margin) {
    out.push_back(Relation::in_front_of);
    out.push_back(Relation::closer_than);
  }
  if (ca.depth > cb.depth + margin) {
    out.push_back(Relation::behind);
    out.push_back(Relation::farther_than);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> depth_order(const Scene& scene, const Camera& camera) {
  const CameraFrame frame(camera);
  std::vector<double> depth;
  depth.reserve(scene.objects.size());
  for (const auto& o : scene.objects) depth.push_back(frame.to_camera(o.position).depth);
  std::vector<std::size_t> idx(scene.objects.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t i, std::size_t j) { return depth[i] < depth[j]; });
  return idx;
}

}  // namespace scenecode
