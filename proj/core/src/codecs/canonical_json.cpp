#include <cctype>

#include <json.hpp>

#include "codecs/interp.hpp"
#include "codecs/languages.hpp"
#include "scenecode/error.hpp"
#include "scenecode/scene_json.hpp"

namespace scenecode::codecs {

namespace {

using nlohmann::json;

// Span from the first '{' or '[' to its matching closer, skipping strings.
std::string_view outermost(std::string_view text) {
  const std::size_t start = text.find_first_of("{[");
  if (start == std::string_view::npos) return {};
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == '{' || c == '[') ++depth;
    if (c == '}' || c == ']') {
      if (--depth == 0) return text.substr(start, i - start + 1);
    }
  }
  return text.substr(start);
}

std::string drop_trailing_commas(std::string_view text) {
  std::string out;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out += c;
      if (c == '\\' && i + 1 < text.size()) {
        out += text[++i];
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && (text[j] == '}' || text[j] == ']')) continue;
    }
    out += c;
  }
  return out;
}

const json* field(const json& j, std::initializer_list<const char*> names) {
  for (const char* n : names) {
    if (auto it = j.find(n); it != j.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::optional<Vec3> tolerant_vec(const json& j, double uniform_ok) {
  if (j.is_array() && j.size() >= 3 && j[0].is_number() && j[1].is_number() && j[2].is_number()) {
    Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (v.finite()) return v;
    return std::nullopt;
  }
  if (j.is_object() && j.contains("x") && j.contains("y") && j.contains("z") &&
      j["x"].is_number() && j["y"].is_number() && j["z"].is_number()) {
    return Vec3{j["x"].get<double>(), j["y"].get<double>(), j["z"].get<double>()};
  }
  if (uniform_ok != 0.0 && j.is_number()) {
    const double k = j.get<double>();
    return Vec3{k, k, k};
  }
  return std::nullopt;
}

std::optional<std::string> tolerant_color(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.empty()) return std::nullopt;
    const std::string n = normalize_color(s);
    return n;
  }
  if (j.is_array() && j.size() >= 3 && j[0].is_number()) {
    Rgb c{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (c.r > 1 || c.g > 1 || c.b > 1) c = {c.r / 255, c.g / 255, c.b / 255};
    return nearest_color_name(c);
  }
  if (j.is_number_integer()) return nearest_color_name(rgb_from_int(j.get<double>()));
  if (j.is_object()) {
    if (const json* c = field(j, {"color", "colour", "name"})) return tolerant_color(*c);
  }
  return std::nullopt;
}

ParseOutcome tolerant(std::string_view code, const ParseOptions& options) {
  ParseOutcome out;
  auto diag = [&](Severity s, std::string m) { out.diagnostics.push_back({s, std::move(m), {}}); };
  const std::string_view body = outermost(code);
  if (body.empty()) return out;
  json j = json::parse(drop_trailing_commas(body), nullptr, false, true);
  if (j.is_discarded()) {
    diag(Severity::error, "not valid JSON");
    return out;
  }
  diag(Severity::info, "strict schema check failed; read with the tolerant fallback");
  const json* list = nullptr;
  if (j.is_array()) {
    list = &j;
  } else if (j.is_object()) {
    list = field(j, {"objects", "entities", "primitives", "shapes"});
    if (!list) {
      if (const json* sc = field(j, {"scene"}); sc && sc->is_object()) {
        list = field(*sc, {"objects", "entities", "primitives", "shapes"});
      }
    }
  }
  Scene scene;
  scene.scene_id = options.scene_id;
  if (!list || !list->is_array()) {
    diag(Severity::warning, "no object list found");
    out.scene = scene;
    return out;
  }
  std::size_t index = 0;
  for (const auto& jo : *list) {
    const std::string where = "objects[" + std::to_string(index++) + "]";
    if (!jo.is_object()) {
      diag(Severity::warning, where + " is not an object; skipped");
      continue;
    }
    const json* cls = field(jo, {"class_name", "class", "type", "shape", "primitive"});
    if (!cls || !cls->is_string() || cls->get<std::string>().empty()) {
      diag(Severity::warning, where + " lacks a class; skipped");
      continue;
    }
    SceneObject o;
    o.class_name = normalize_class_name(cls->get<std::string>());
    if (const json* p = field(jo, {"position", "location", "pos", "center"})) {
      if (auto v = tolerant_vec(*p, 0.0)) o.position = *v;
    } else {
      diag(Severity::warning, where + " lacks a position; using origin");
    }
    if (const json* r = field(jo, {"rotation", "rot", "rotation_euler"})) {
      if (auto v = tolerant_vec(*r, 0.0)) o.rotation = *v;
    }
    if (const json* s = field(jo, {"scale", "size", "dimensions"})) {
      if (auto v = tolerant_vec(*s, 1.0)) o.scale = *v;
    }
    if (const json* m = field(jo, {"material", "color", "colour"})) {
      if (auto c = tolerant_color(*m)) o.material = *c;
    }
    scene.objects.push_back(std::move(o));
  }
  out.scene = std::move(scene);
  return out;
}

}  // namespace

ParseOutcome parse_canonical_json(std::string_view code, const ParseOptions& options) {
  const std::string_view body = outermost(code);
  if (!body.empty()) {
    try {
      Scene s = scene_from_json(body);
      s.scene_id = options.scene_id;
      ParseOutcome out;
      out.scene = std::move(s);
      return out;
    } catch (const Error&) {
      // fall through to the tolerant reader
    }
  }
  return tolerant(code, options);
}

std::string serialize_canonical_json(const Scene& scene, const SerializeOptions&) {
  return to_canonical_json(scene);
}

}  // namespace scenecode::codecs
