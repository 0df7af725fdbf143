#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenecode {

struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

// Ten-color generation palette: the eight hint colors plus magenta and gray.
const std::vector<std::string>& default_palette();

// The eight colors named in the reconstruction prompt's primitive hint.
const std::vector<std::string>& hint_palette();

// RGB for a known color name (palette names plus a few common extras).
std::optional<Rgb> color_rgb(std::string_view name);

// Nearest known color name in RGB space.
std::string nearest_color_name(const Rgb& rgb);

// Accepts a known name, "#rrggbb", "0xrrggbb" or "rrggbb"; unknown names are
// lowercased and passed through unchanged.
std::string normalize_color(std::string_view text);

std::string hex_string(const Rgb& rgb);  // "0xrrggbb"

}  // namespace scenecode
