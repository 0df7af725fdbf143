#pragma once

#include <cstdint>
#include <vector>

#include "scenecode/scene.hpp"

namespace scenecode {

// Rotation matrix for intrinsic XYZ Euler angles (R = Rx * Ry * Rz).
Mat3 rotation_matrix(const Vec3& euler_xyz);

// Inverse of rotation_matrix. Returns angles with |y| <= pi/2.
Vec3 euler_from_matrix(const Mat3& r);

// Local bounds of the unit primitive before scale/rotation/translation.
AABB unit_bounds(std::string_view class_name);

AABB object_aabb(const SceneObject& obj);

// Diagonal of the box spanning all object centers, floored at 1.0.
double scene_extent(const Scene& scene);

struct CameraPoint {
  double x = 0.0;      // rightward
  double y = 0.0;      // upward
  double depth = 0.0;  // along the view direction
};

// Orthonormal camera basis for a look-at camera with Y-up scene frame.
struct CameraFrame {
  Vec3 origin;
  Vec3 right;
  Vec3 up;
  Vec3 forward;

  explicit CameraFrame(const Camera& camera);
  CameraPoint to_camera(const Vec3& p) const;
};

bool in_frustum(const Camera& camera, const Vec3& point);

struct Pixel {
  double u = 0.0;
  double v = 0.0;
};

// Pinhole projection onto a square image; origin top-left, v downward.
// Throws scenecode::Error("unprojectable") at or behind the camera plane.
Pixel project_to_image(const Camera& camera, const Vec3& point, int image_size = 512);

enum class Relation : std::uint8_t {
  left_of,
  right_of,
  above,
  below,
  in_front_of,
  behind,
  closer_than,
  farther_than,
};

std::string_view to_string(Relation r);
Relation opposite(Relation r);

inline constexpr double kRelationMargin = 0.15;

// Relations of `a` with respect to `b`, ordered by enum value.
std::vector<Relation> spatial_relations(const SceneObject& a, const SceneObject& b,
                                        const Camera& camera,
                                        double margin = kRelationMargin);

// Object indices by ascending camera-space depth, stable on ties.
std::vector<std::size_t> depth_order(const Scene& scene, const Camera& camera);

}  // namespace scenecode
