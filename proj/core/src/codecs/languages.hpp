#pragma once

#include <string>
#include <string_view>

#include "scenecode/codecs.hpp"

namespace scenecode::codecs {

ParseOutcome parse_threejs(std::string_view code, const ParseOptions& options);
ParseOutcome parse_unity(std::string_view code, const ParseOptions& options);
ParseOutcome parse_blender(std::string_view code, const ParseOptions& options);
ParseOutcome parse_open3d(std::string_view code, const ParseOptions& options);
ParseOutcome parse_canonical_json(std::string_view code, const ParseOptions& options);
ParseOutcome parse_scene_dsl(std::string_view code, const ParseOptions& options);

std::string serialize_threejs(const Scene& scene, const SerializeOptions& options);
std::string serialize_unity(const Scene& scene, const SerializeOptions& options);
std::string serialize_blender(const Scene& scene, const SerializeOptions& options);
std::string serialize_open3d(const Scene& scene, const SerializeOptions& options);
std::string serialize_canonical_json(const Scene& scene, const SerializeOptions& options);
std::string serialize_scene_dsl(const Scene& scene, const SerializeOptions& options);

// Class written by the closed-primitive-set serializers: the primitive itself,
// or "cube" + marker for free-form classes when box_fallback is set. Throws
// Error("class not representable") otherwise.
std::string representable_class(const std::string& class_name, const SerializeOptions& options);

// Fixed-precision number for emitted code ("%.6f", no negative zero).
std::string num(double v);

}  // namespace scenecode::codecs
