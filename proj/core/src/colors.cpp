#include "scenecode/colors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

namespace scenecode {

namespace {

struct NamedColor {
  std::string_view name;
  Rgb rgb;
};

// Palette colors first so they win nearest-neighbour ties.
constexpr std::array<NamedColor, 16> kColors{{
    {"red", {1.0, 0.0, 0.0}},
    {"blue", {0.0, 0.0, 1.0}},
    {"green", {0.0, 0.5, 0.0}},
    {"yellow", {1.0, 1.0, 0.0}},
    {"purple", {0.5, 0.0, 0.5}},
    {"orange", {1.0, 0.5, 0.0}},
    {"cyan", {0.0, 1.0, 1.0}},
    {"white", {1.0, 1.0, 1.0}},
    {"magenta", {1.0, 0.0, 1.0}},
    {"gray", {0.5, 0.5, 0.5}},
    {"black", {0.0, 0.0, 0.0}},
    {"brown", {0.6, 0.3, 0.1}},
    {"pink", {1.0, 0.75, 0.8}},
    {"lime", {0.0, 1.0, 0.0}},
    {"navy", {0.0, 0.0, 0.5}},
    {"teal", {0.0, 0.5, 0.5}},
}};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<Rgb> parse_hex(std::string_view s) {
  if (s.size() != 6) return std::nullopt;
  unsigned v = 0;
  for (char c : s) {
    if (!std::isxdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 16 + static_cast<unsigned>(std::isdigit(static_cast<unsigned char>(c))
                                           ? c - '0'
                                           : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10);
  }
  return Rgb{((v >> 16) & 0xff) / 255.0, ((v >> 8) & 0xff) / 255.0, (v & 0xff) / 255.0};
}

}  // namespace

const std::vector<std::string>& default_palette() {
  static const std::vector<std::string> p{"red",    "blue", "green", "yellow",  "purple",
                                          "orange", "cyan", "white", "magenta", "gray"};
  return p;
}

const std::vector<std::string>& hint_palette() {
  static const std::vector<std::string> p{"red",    "blue",   "green", "yellow",
                                          "purple", "orange", "cyan",  "white"};
  return p;
}

std::optional<Rgb> color_rgb(std::string_view name) {
  std::string n = lower(name);
  if (n == "grey") n = "gray";
  for (const auto& c : kColors) {
    if (c.name == n) return c.rgb;
  }
  return std::nullopt;
}

std::string nearest_color_name(const Rgb& rgb) {
  double best = std::numeric_limits<double>::infinity();
  std::string_view name = "gray";
  for (const auto& c : kColors) {
    const double d = std::pow(c.rgb.r - rgb.r, 2) + std::pow(c.rgb.g - rgb.g, 2) +
                     std::pow(c.rgb.b - rgb.b, 2);
    if (d < best) {
      best = d;
      name = c.name;
    }
  }
  return std::string(name);
}

std::string normalize_color(std::string_view text) {
  std::string t = lower(text);
  if (t == "grey") return "gray";
  if (color_rgb(t)) return t;
  std::string_view hex = t;
  if (hex.starts_with("#")) hex.remove_prefix(1);
  else if (hex.starts_with("0x")) hex.remove_prefix(2);
  if (auto rgb = parse_hex(hex)) return nearest_color_name(*rgb);
  return t;
}

std::string hex_string(const Rgb& rgb) {
  auto byte = [](double v) { return static_cast<unsigned>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); };
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%02x%02x%02x", byte(rgb.r), byte(rgb.g), byte(rgb.b));
  return buf;
}

}  // namespace scenecode
