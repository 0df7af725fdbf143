#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenecode/vec3.hpp"

namespace scenecode {

enum class Primitive { cube, sphere, cylinder, cone, torus, pyramid };

inline constexpr std::array<Primitive, 6> kAllPrimitives = {
    Primitive::cube, Primitive::sphere, Primitive::cylinder,
    Primitive::cone, Primitive::torus,  Primitive::pyramid};

std::string_view to_string(Primitive p);
std::optional<Primitive> primitive_from_name(std::string_view name);

// Lowercases and trims a class name. Throws on an empty result.
std::string normalize_class_name(std::string_view name);

struct AABB {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return (min + max) * 0.5; }
  Vec3 size() const { return max - min; }
  double volume() const;
  bool operator==(const AABB&) const = default;
};

double iou(const AABB& a, const AABB& b);

struct SceneObject {
  std::string class_name = "cube";  // lowercase; one of the six primitives or free-form
  Vec3 position;
  Vec3 rotation;  // intrinsic XYZ Euler, radians
  Vec3 scale{1.0, 1.0, 1.0};
  std::string material = "gray";

  std::optional<Primitive> primitive() const { return primitive_from_name(class_name); }
  bool operator==(const SceneObject&) const = default;
};

struct Camera {
  Vec3 position{0.0, 2.0, 8.0};
  Vec3 target;
  double fov = 60.0;  // vertical, degrees
  double aspect = 1.0;

  bool operator==(const Camera&) const = default;
};

// Throws scenecode::Error when position == target or fov is outside (0, 180).
void validate(const Camera& camera);

struct Scene {
  std::string scene_id = "scene";
  std::vector<SceneObject> objects;
  std::optional<Camera> camera;
  std::optional<int> tier;
  std::optional<AABB> extent;

  bool operator==(const Scene&) const = default;
};

// Componentwise comparison with a numeric tolerance; classes and materials exact.
bool approx_equal(const SceneObject& a, const SceneObject& b, double tol);
bool approx_equal(const Scene& a, const Scene& b, double tol);

// Wraps an angle into [-pi, pi].
double wrap_angle(double radians);

}  // namespace scenecode
