#include "scenecode/scene.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>

#include "scenecode/error.hpp"

namespace scenecode {

std::string_view to_string(Primitive p) {
  switch (p) {
    case Primitive::cube: return "cube";
    case Primitive::sphere: return "sphere";
    case Primitive::cylinder: return "cylinder";
    case Primitive::cone: return "cone";
    case Primitive::torus: return "torus";
    case Primitive::pyramid: return "pyramid";
  }
  return "cube";
}

std::optional<Primitive> primitive_from_name(std::string_view name) {
  for (Primitive p : kAllPrimitives) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

std::string normalize_class_name(std::string_view name) {
  std::size_t b = 0;
  std::size_t e = name.size();
  while (b < e && std::isspace(static_cast<unsigned char>(name[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(name[e - 1]))) --e;
  std::string out(name.substr(b, e - b));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (out.empty()) throw Error("class name is empty");
  return out;
}

double AABB::volume() const {
  const Vec3 s = size();
  return std::max(0.0, s.x) * std::max(0.0, s.y) * std::max(0.0, s.z);
}

double iou(const AABB& a, const AABB& b) {
  const AABB inter{cwise_max(a.min, b.min), cwise_min(a.max, b.max)};
  if (inter.min.x >= inter.max.x || inter.min.y >= inter.max.y || inter.min.z >= inter.max.z) {
    return 0.0;
  }
  const double vi = inter.volume();
  const double vu = a.volume() + b.volume() - vi;
  return vu > 0.0 ? vi / vu : 0.0;
}

void validate(const Camera& camera) {
  if (!camera.position.finite() || !camera.target.finite()) {
    throw Error("camera has non-finite coordinates");
  }
  if (camera.position == camera.target) throw Error("camera position equals target");
  if (!(camera.fov > 0.0 && camera.fov < 180.0)) throw Error("camera fov must lie in (0, 180)");
  if (!(camera.aspect > 0.0)) throw Error("camera aspect must be positive");
}

bool approx_equal(const SceneObject& a, const SceneObject& b, double tol) {
  return a.class_name == b.class_name && a.material == b.material &&
         max_abs_diff(a.position, b.position) <= tol &&
         max_abs_diff(a.rotation, b.rotation) <= tol && max_abs_diff(a.scale, b.scale) <= tol;
}

bool approx_equal(const Scene& a, const Scene& b, double tol) {
  if (a.objects.size() != b.objects.size()) return false;
  for (std::size_t i = 0; i < a.objects.size(); ++i) {
    if (!approx_equal(a.objects[i], b.objects[i], tol)) return false;
  }
  return true;
}

double wrap_angle(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::fmod(radians, kTwoPi);
  if (r > std::numbers::pi) r -= kTwoPi;
  if (r < -std::numbers::pi) r += kTwoPi;
  return r;
}

}  // namespace scenecode
