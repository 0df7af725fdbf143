#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenecode/scene.hpp"

namespace scenecode {

enum class SceneCodeLanguage {
  threejs,
  unity_csharp,
  blender_python,
  open3d_python,
  canonical_json,
  scene_dsl,
};

// Column order used by every report: most to least pre-training exposure.
inline constexpr std::array<SceneCodeLanguage, 6> kAllLanguages = {
    SceneCodeLanguage::threejs,        SceneCodeLanguage::unity_csharp,
    SceneCodeLanguage::blender_python, SceneCodeLanguage::open3d_python,
    SceneCodeLanguage::canonical_json, SceneCodeLanguage::scene_dsl};

std::string_view to_string(SceneCodeLanguage lang);

// Accepts the identifiers above plus common aliases ("three.js", "unity",
// "blender", "open3d", "json", "dsl"). Throws scenecode::Error when unknown.
SceneCodeLanguage language_from_name(std::string_view name);

// Human-readable rendering used inside prompts, e.g. "Three.js JavaScript".
std::string_view display_name(SceneCodeLanguage lang);

enum class Severity { info, warning, error };

struct SourceSpan {
  int line = 0;  // 1-based; 0 when not tied to a location
  int column = 0;
};

struct Diagnostic {
  Severity severity = Severity::info;
  std::string message;
  SourceSpan span;
};

struct ParseOutcome {
  std::optional<Scene> scene;
  std::size_t parsed_object_count = 0;
  std::vector<Diagnostic> diagnostics;

  // Zero extracted objects counts as a parse failure for metrics.
  bool parsed() const { return parsed_object_count > 0; }
};

// Contents of the largest fenced code block (first one wins ties); the input
// unchanged when it has no fence. An unclosed final fence runs to the end.
std::string strip_code_fences(std::string_view text);

struct ParseOptions {
  std::string scene_id = "predicted";
};

// Recognizes object constructions without ever executing the input.
ParseOutcome parse(SceneCodeLanguage lang, std::string_view text, const ParseOptions& options = {});

struct SerializeOptions {
  // Emit free-form classes as boxes (tagged with a class marker) in languages
  // whose primitive set is closed, instead of failing.
  bool box_fallback = false;
};

// Deterministic code in the target language using exactly the API surface the
// matching parser recognizes. Throws scenecode::Error("class not
// representable") for free-form classes unless box_fallback is set.
std::string serialize(SceneCodeLanguage lang, const Scene& scene,
                      const SerializeOptions& options = {});

struct FilterVerdict {
  bool accepted = false;
  std::string reason;  // empty when accepted

  static FilterVerdict accept() { return {true, {}}; }
  static FilterVerdict reject(std::string why) { return {false, std::move(why)}; }
};

inline constexpr int kPhase1MinMeshes = 1;
inline constexpr int kPhase1MaxMeshes = 50;
inline constexpr double kPhase1PositionLimit = 30.0;

// Syntactic filter for pseudo-ground-truth Three.js code. Reasons:
// "missing_required_token", "object_count_out_of_range", "position_out_of_range".
FilterVerdict phase1_quality_filter(std::string_view threejs_text);

// Marker comment that carries a class through languages lacking a native
// constructor for it, e.g. "scenecode:class=pyramid".
inline constexpr std::string_view kClassMarker = "scenecode:class=";

}  // namespace scenecode
