#pragma once

#include <string>
#include <string_view>

#include "scenecode/scene.hpp"

namespace scenecode {

// Canonical JSON scene text: sorted keys, 2-space indent, fixed 6-decimal
// numbers, trailing newline. Identical scenes always produce identical bytes.
std::string to_canonical_json(const Scene& scene);

// Strict reader for the canonical schema (plus optional scene_id/tier/extent).
// Throws scenecode::Error on malformed input.
Scene scene_from_json(std::string_view text);

// Fixed 6-decimal rendering used by every serializer; "-0.000000" becomes "0.000000".
std::string format_fixed(double value, int decimals = 6);

}  // namespace scenecode
