#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scenecode/colors.hpp"
#include "scenecode/scene.hpp"

namespace scenecode {

struct GenConfig {
  int tier = 1;
  std::uint64_t seed = 0;
  std::vector<std::string> palette = default_palette();
  double ground_half_extent = 3.0;
  double min_center_separation = 0.9;
  // Unset: default_screen_overlap(tier).
  std::optional<double> max_screen_overlap;
  int viewpoints = 4;
  int max_attempts = 10000;

  void validate() const;
  double screen_overlap_cap() const;
};

// Pairwise projected-box overlap cap per tier: {0.10, 0.10, 0.15, 0.35, 0.50}.
// A flat 0.10 cannot be met for 15-20 objects on the 6 x 6 ground from the
// 25-degree frontal view.
double default_screen_overlap(int tier);

// {1: 3, 2: 6, 3: 10, 4: 15, 5: 20}
int tier_object_count(int tier);

// Deterministic primitive scene. Throws scenecode::Error("placement infeasible")
// once max_attempts candidate placements have been rejected.
Scene generate_scene(const GenConfig& config);

inline constexpr double kFrontalElevationDeg = 25.0;
inline constexpr double kCameraDistanceFactor = 2.2;
inline constexpr double kDefaultFov = 60.0;
inline constexpr int kRenderSize = 512;

// Viewpoint 0 is frontal (azimuth 0); the rest step around the target in
// equal azimuth increments at the same elevation and distance.
std::vector<Camera> camera_poses(const Scene& scene, const GenConfig& config);

// Overlap of the projected AABBs of two objects, as a fraction of the smaller
// projected box area. Used by the placement constraint.
double screen_overlap(const SceneObject& a, const SceneObject& b, const Camera& camera);

// Blender-Python script that rebuilds the scene, places the camera and sets a
// 512x512 render resolution.
std::string export_render_script(const Scene& scene, const Camera& camera);

}  // namespace scenecode
