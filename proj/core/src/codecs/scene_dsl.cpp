#include <cctype>
#include <cstdlib>
#include <memory>

#include "codecs/interp.hpp"
#include "codecs/languages.hpp"
#include "scenecode/error.hpp"

namespace scenecode::codecs {

namespace {

struct Node {
  bool list = false;
  std::string atom;
  std::vector<Node> items;
  int line = 1;
};

constexpr int kMaxNesting = 256;

class Reader {
 public:
  explicit Reader(std::string_view text) : s_(text) {}

  // Top-level forms; an unbalanced tail is closed implicitly.
  std::vector<Node> read_all(std::vector<Diagnostic>& diags) {
    std::vector<Node> out;
    while (true) {
      skip_space();
      if (i_ >= s_.size()) break;
      if (s_[i_] == ')') {
        diags.push_back({Severity::warning, "unbalanced ')' ignored", {line_, 0}});
        ++i_;
        continue;
      }
      out.push_back(read(0, diags));
    }
    return out;
  }

 private:
  void skip_space() {
    while (i_ < s_.size()) {
      const char c = s_[i_];
      if (c == '\n') ++line_;
      if (std::isspace(static_cast<unsigned char>(c)) || c == ',') {
        ++i_;
      } else if (c == ';' || c == '#') {
        while (i_ < s_.size() && s_[i_] != '\n') ++i_;
      } else {
        break;
      }
    }
  }

  Node read(int depth, std::vector<Diagnostic>& diags) {
    Node n;
    n.line = line_;
    if (s_[i_] == '(' || s_[i_] == '[') {
      n.list = true;
      ++i_;
      while (true) {
        skip_space();
        if (i_ >= s_.size()) {
          diags.push_back({Severity::warning, "unterminated list closed at end of input", {n.line, 0}});
          return n;
        }
        if (s_[i_] == ')' || s_[i_] == ']') {
          ++i_;
          return n;
        }
        if (depth + 1 >= kMaxNesting) {
          ++i_;
          continue;
        }
        n.items.push_back(read(depth + 1, diags));
      }
    }
    if (s_[i_] == '\'' && !quoted_string()) {
      ++i_;  // quote prefix: 'cube
      if (i_ >= s_.size()) return n;
    }
    if (s_[i_] == '"' || s_[i_] == '\'') {
      const char q = s_[i_++];
      while (i_ < s_.size() && s_[i_] != q) {
        if (s_[i_] == '\\' && i_ + 1 < s_.size()) ++i_;
        if (s_[i_] == '\n') ++line_;
        n.atom += s_[i_++];
      }
      if (i_ < s_.size()) ++i_;
      return n;
    }
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) &&
           s_[i_] != '(' && s_[i_] != ')' && s_[i_] != '[' && s_[i_] != ']' && s_[i_] != ',' &&
           s_[i_] != ';') {
      n.atom += s_[i_++];
    }
    if (n.atom.empty()) ++i_;  // stray character
    return n;
  }

  // True when the ' at i_ opens a 'string' closed before the next delimiter.
  bool quoted_string() const {
    for (std::size_t j = i_ + 1; j < s_.size(); ++j) {
      const char c = s_[j];
      if (c == '\'') return true;
      if (c == '(' || c == ')' || c == '\n') return false;
    }
    return false;
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1;
};

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::optional<double> atom_number(const Node& n) {
  if (n.list || n.atom.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(n.atom.c_str(), &end);
  if (end != n.atom.c_str() + n.atom.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// (position 1 2 3) or (position (1 2 3))
std::optional<Vec3> vec_args(const Node& field) {
  std::vector<const Node*> args;
  for (std::size_t i = 1; i < field.items.size(); ++i) args.push_back(&field.items[i]);
  if (args.size() == 1 && args[0]->list) {
    std::vector<const Node*> inner;
    for (const auto& it : args[0]->items) inner.push_back(&it);
    args = inner;
  }
  if (args.size() == 1) {
    if (auto k = atom_number(*args[0])) return Vec3{*k, *k, *k};
  }
  if (args.size() < 3) return std::nullopt;
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    auto x = atom_number(*args[static_cast<std::size_t>(i)]);
    if (!x) return std::nullopt;
    v[i] = *x;
  }
  return v;
}

std::string text_arg(const Node& field) {
  if (field.items.size() < 2) return {};
  const Node& a = field.items[1];
  if (!a.list) return a.atom;
  return a.items.empty() ? std::string() : a.items.front().atom;
}

void collect(const Node& n, Scene& scene, std::vector<Diagnostic>& diags) {
  if (!n.list) return;
  const bool is_entity = !n.items.empty() && !n.items[0].list &&
                         (lower(n.items[0].atom) == "entity" || lower(n.items[0].atom) == "object");
  if (!is_entity) {
    for (const auto& child : n.items) collect(child, scene, diags);
    return;
  }
  SceneObject o;
  bool has_class = false;
  for (std::size_t i = 1; i < n.items.size(); ++i) {
    const Node& f = n.items[i];
    if (!f.list || f.items.empty() || f.items[0].list) continue;
    const std::string key = lower(f.items[0].atom);
    if (key == "class" || key == "class_name" || key == "type" || key == "shape") {
      const std::string c = text_arg(f);
      if (!c.empty()) {
        o.class_name = normalize_class_name(c);
        has_class = true;
      }
    } else if (key == "position" || key == "location" || key == "pos") {
      if (auto v = vec_args(f)) o.position = *v;
    } else if (key == "rotation" || key == "rot") {
      if (auto v = vec_args(f)) o.rotation = *v;
    } else if (key == "scale" || key == "size") {
      if (auto v = vec_args(f)) o.scale = *v;
    } else if (key == "material" || key == "color" || key == "colour") {
      const std::string m = text_arg(f);
      if (!m.empty()) o.material = normalize_color(m);
    } else {
      diags.push_back({Severity::info, "unknown entity field '" + key + "' ignored", {f.line, 0}});
    }
  }
  if (!has_class) {
    diags.push_back({Severity::warning, "entity without class skipped", {n.line, 0}});
    return;
  }
  scene.objects.push_back(std::move(o));
}

}  // namespace

ParseOutcome parse_scene_dsl(std::string_view code, const ParseOptions& options) {
  ParseOutcome out;
  Reader reader(code);
  const std::vector<Node> forms = reader.read_all(out.diagnostics);
  Scene scene;
  scene.scene_id = options.scene_id;
  for (const auto& f : forms) collect(f, scene, out.diagnostics);
  out.scene = std::move(scene);
  return out;
}

std::string serialize_scene_dsl(const Scene& scene, const SerializeOptions&) {
  auto v = [](const Vec3& x) { return num(x.x) + " " + num(x.y) + " " + num(x.z); };
  auto atom = [](const std::string& t) {
    if (t.find_first_of(" \t\n()[];,\"'#") == std::string::npos && !t.empty()) return t;
    std::string q = "\"";
    for (char c : t) {
      if (c == '"' || c == '\\') q += '\\';
      q += c;
    }
    return q + "\"";
  };
  std::string out = "(scene\n";
  for (const auto& o : scene.objects) {
    out += "  (entity (class " + atom(o.class_name) + ") (position " + v(o.position) + ") (rotation " +
           v(o.rotation) + ") (scale " + v(o.scale) + ") (material " + atom(o.material) + "))\n";
  }
  out += ")\n";
  return out;
}

}  // namespace scenecode::codecs
