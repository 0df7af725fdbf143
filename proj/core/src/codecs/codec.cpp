#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>

#include "codecs/interp.hpp"
#include "codecs/languages.hpp"
#include "scenecode/error.hpp"
#include "scenecode/geometry.hpp"
#include "scenecode/scene_json.hpp"

namespace scenecode {

std::string_view to_string(SceneCodeLanguage lang) {
  switch (lang) {
    case SceneCodeLanguage::threejs: return "threejs";
    case SceneCodeLanguage::unity_csharp: return "unity_csharp";
    case SceneCodeLanguage::blender_python: return "blender_python";
    case SceneCodeLanguage::open3d_python: return "open3d_python";
    case SceneCodeLanguage::canonical_json: return "canonical_json";
    case SceneCodeLanguage::scene_dsl: return "scene_dsl";
  }
  return "";
}

SceneCodeLanguage language_from_name(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (SceneCodeLanguage l : kAllLanguages) {
    if (to_string(l) == n) return l;
  }
  if (n == "three.js" || n == "three" || n == "js") return SceneCodeLanguage::threejs;
  if (n == "unity" || n == "csharp" || n == "c#") return SceneCodeLanguage::unity_csharp;
  if (n == "blender" || n == "bpy") return SceneCodeLanguage::blender_python;
  if (n == "open3d" || n == "o3d") return SceneCodeLanguage::open3d_python;
  if (n == "json" || n == "canonical") return SceneCodeLanguage::canonical_json;
  if (n == "dsl" || n == "scene_language" || n == "sexpr") return SceneCodeLanguage::scene_dsl;
  throw Error("unknown scene-code language: " + std::string(name));
}

std::string_view display_name(SceneCodeLanguage lang) {
  switch (lang) {
    case SceneCodeLanguage::threejs: return "Three.js JavaScript";
    case SceneCodeLanguage::unity_csharp: return "Unity C#";
    case SceneCodeLanguage::blender_python: return "Blender Python";
    case SceneCodeLanguage::open3d_python: return "Open3D Python";
    case SceneCodeLanguage::canonical_json: return "canonical JSON";
    case SceneCodeLanguage::scene_dsl: return "Scene Language DSL";
  }
  return "";
}

ParseOutcome parse(SceneCodeLanguage lang, std::string_view text, const ParseOptions& options) {
  const std::string code = strip_code_fences(text);
  ParseOutcome out;
  switch (lang) {
    case SceneCodeLanguage::threejs: out = codecs::parse_threejs(code, options); break;
    case SceneCodeLanguage::unity_csharp: out = codecs::parse_unity(code, options); break;
    case SceneCodeLanguage::blender_python: out = codecs::parse_blender(code, options); break;
    case SceneCodeLanguage::open3d_python: out = codecs::parse_open3d(code, options); break;
    case SceneCodeLanguage::canonical_json: out = codecs::parse_canonical_json(code, options); break;
    case SceneCodeLanguage::scene_dsl: out = codecs::parse_scene_dsl(code, options); break;
  }
  out.parsed_object_count = out.scene ? out.scene->objects.size() : 0;
  if (out.parsed_object_count == 0) {
    out.diagnostics.push_back({Severity::error, "no constructions found", {}});
  }
  return out;
}

std::string serialize(SceneCodeLanguage lang, const Scene& scene, const SerializeOptions& options) {
  switch (lang) {
    case SceneCodeLanguage::threejs: return codecs::serialize_threejs(scene, options);
    case SceneCodeLanguage::unity_csharp: return codecs::serialize_unity(scene, options);
    case SceneCodeLanguage::blender_python: return codecs::serialize_blender(scene, options);
    case SceneCodeLanguage::open3d_python: return codecs::serialize_open3d(scene, options);
    case SceneCodeLanguage::canonical_json: return codecs::serialize_canonical_json(scene, options);
    case SceneCodeLanguage::scene_dsl: return codecs::serialize_scene_dsl(scene, options);
  }
  return {};
}

namespace codecs {

std::string representable_class(const std::string& class_name, const SerializeOptions& options) {
  if (primitive_from_name(class_name)) return class_name;
  if (options.box_fallback) return "cube";
  throw Error("class not representable: " + class_name);
}

std::string num(double v) { return format_fixed(v, 6); }

double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

std::optional<std::string> color_from_text(std::string_view text) {
  const std::string direct = normalize_color(text);
  if (color_rgb(direct)) return direct;
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  // "Mat_Red", "redMaterial", "cube_blue_mat": earliest color word wins
  static const std::vector<std::string> words = {
      "magenta", "purple", "orange", "yellow", "white", "black", "brown", "green",
      "gray",    "grey",   "cyan",   "blue",   "pink",  "lime",  "navy",  "teal", "red"};
  std::size_t best_pos = std::string::npos;
  std::string best;
  for (const auto& w : words) {
    const std::size_t p = lower.find(w);
    if (p != std::string::npos && (best_pos == std::string::npos || p < best_pos)) {
      best_pos = p;
      best = w == "grey" ? "gray" : w;
    }
  }
  if (best_pos != std::string::npos) return best;
  return std::nullopt;
}

Rgb rgb_from_int(double packed) {
  const auto v = static_cast<unsigned long>(std::clamp(packed, 0.0, 16777215.0));
  return {static_cast<double>((v >> 16) & 0xff) / 255.0, static_cast<double>((v >> 8) & 0xff) / 255.0,
          static_cast<double>(v & 0xff) / 255.0};
}

void ObjState::set_euler(const Vec3& e) {
  euler = e;
  rotation = rotation_matrix(e);
  composed = false;
}

void ObjState::rotate(const Mat3& m, bool world, const std::optional<Vec3>& euler_of_m) {
  const bool untouched = !composed && euler.x == 0.0 && euler.y == 0.0 && euler.z == 0.0;
  if (untouched && euler_of_m) {
    set_euler(*euler_of_m);
    return;
  }
  rotation = world ? m * rotation : rotation * m;
  composed = true;
}

bool LValue::path_is(std::initializer_list<std::string_view> p) const {
  return std::equal(path.begin(), path.end(), p.begin(), p.end());
}

Interpreter::Interpreter(const LexResult& lexed) {
  for (const auto& c : lexed.comments) {
    const auto p = c.text.find(kClassMarker);
    if (p == std::string::npos) continue;
    std::string cls;
    for (std::size_t i = p + kClassMarker.size(); i < c.text.size(); ++i) {
      const char ch = c.text[i];
      if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == ' ') {
        if (ch == ' ' && cls.empty()) continue;
        if (ch == ' ') break;
        cls += ch;
      } else {
        break;
      }
    }
    if (!cls.empty()) markers_[c.line] = cls;
  }
}

std::optional<std::string> Interpreter::marker_on_line(int line) const {
  auto it = markers_.find(line);
  if (it == markers_.end()) return std::nullopt;
  return it->second;
}

void Interpreter::note(Severity sev, std::string msg, int line, int column) {
  diags_.push_back({sev, std::move(msg), {line, column}});
}

void Interpreter::skipped(const Statement& s, std::string_view why) {
  note(Severity::info, std::string(why), s.line, s.column);
}

ObjRef Interpreter::create(std::string class_name, Vec3 dims, int line) {
  ObjState o;
  o.class_name = marker_on_line(line).value_or(std::move(class_name));
  o.dims = dims;
  o.line = line;
  objects_.push_back(std::move(o));
  return {objects_.size() - 1};
}

MaterialRef Interpreter::new_material() {
  materials_.emplace_back();
  return {materials_.size() - 1};
}

const Expr* Interpreter::arg(const Expr& call, std::size_t position, std::string_view name) {
  for (const auto& a : call.args) {
    if (!name.empty() && a.name == name) return a.value.get();
  }
  std::size_t k = 0;
  for (const auto& a : call.args) {
    if (!a.name.empty()) continue;
    if (k == position) return a.value.get();
    ++k;
  }
  return nullptr;
}

std::optional<double> Interpreter::as_number(const Value& v) {
  if (auto d = std::get_if<double>(&v)) return *d;
  return std::nullopt;
}

std::optional<Vec3> Interpreter::as_vec3(const Value& v) {
  if (auto n = std::get_if<Numbers>(&v); n && n->size() >= 3) return Vec3{(*n)[0], (*n)[1], (*n)[2]};
  return std::nullopt;
}

std::optional<double> Interpreter::number(const Expr& e) { return as_number(eval(e)); }

std::optional<Numbers> Interpreter::numbers(const Expr& e) {
  Value v = eval(e);
  if (auto n = std::get_if<Numbers>(&v)) return *n;
  return std::nullopt;
}

std::optional<Vec3> Interpreter::vec3(const Expr& e) { return as_vec3(eval(e)); }

std::optional<Vec3> Interpreter::vec3_partial(const Expr& e, const Vec3& fallback) {
  if (e.kind == Expr::Kind::list && e.args.size() >= 3) {
    Vec3 out = fallback;
    bool any = false;
    double* comp[3] = {&out.x, &out.y, &out.z};
    for (std::size_t i = 0; i < 3; ++i) {
      if (auto v = number(*e.args[i].value)) {
        *comp[i] = *v;
        any = true;
      }
    }
    if (!any) return std::nullopt;
    return out;
  }
  return vec3(e);
}

std::optional<LValue> Interpreter::lvalue(const Expr& e) {
  Value v = eval(e);
  if (std::holds_alternative<ObjRef>(v) || std::holds_alternative<MaterialRef>(v) ||
      std::holds_alternative<Opaque>(v)) {
    return LValue{std::move(v), {}};
  }
  if (!e.object) return std::nullopt;
  std::string step;
  switch (e.kind) {
    case Expr::Kind::member: step = e.text; break;
    case Expr::Kind::call: step = "()"; break;
    case Expr::Kind::index: step = "[]"; break;
    default: return std::nullopt;
  }
  auto r = lvalue(*e.object);
  if (r) r->path.push_back(std::move(step));
  return r;
}

void Interpreter::eval_args(const Expr& call) {
  for (const auto& a : call.args) {
    if (a.value) eval(*a.value);
  }
}

std::optional<Rgb> Interpreter::rgb(const Expr& e) {
  auto n = numbers(e);
  if (!n || n->size() < 3) return std::nullopt;
  Rgb c{(*n)[0], (*n)[1], (*n)[2]};
  if (c.r > 1.0 || c.g > 1.0 || c.b > 1.0) c = {c.r / 255.0, c.g / 255.0, c.b / 255.0};
  return c;
}

std::optional<ObjRef> Interpreter::object_of(const Expr& e) {
  Value v = eval(e);
  if (auto r = std::get_if<ObjRef>(&v)) return *r;
  return std::nullopt;
}

std::optional<MaterialRef> Interpreter::material_of(const Expr& e) {
  Value v = eval(e);
  if (auto r = std::get_if<MaterialRef>(&v)) return *r;
  return std::nullopt;
}

namespace {

std::optional<double> named_constant(std::string_view name) {
  if (name == "Math.PI" || name == "math.pi" || name == "np.pi" || name == "numpy.pi" ||
      name == "Mathf.PI" || name == "pi" || name == "PI" || name == "THREE.MathUtils.PI") {
    return std::numbers::pi;
  }
  if (name == "math.tau" || name == "np.tau") return 2.0 * std::numbers::pi;
  if (name == "Mathf.Deg2Rad" || name == "THREE.MathUtils.DEG2RAD") return std::numbers::pi / 180.0;
  if (name == "Mathf.Rad2Deg" || name == "THREE.MathUtils.RAD2DEG") return 180.0 / std::numbers::pi;
  if (name == "true" || name == "True") return 1.0;
  if (name == "false" || name == "False") return 0.0;
  return std::nullopt;
}

Value arithmetic(const std::string& op, const Value& a, const Value& b) {
  auto apply = [&](double x, double y) -> std::optional<double> {
    if (op == "+") return x + y;
    if (op == "-") return x - y;
    if (op == "*") return x * y;
    if (op == "/") return y != 0.0 ? std::optional<double>(x / y) : std::nullopt;
    if (op == "%") return y != 0.0 ? std::optional<double>(std::fmod(x, y)) : std::nullopt;
    if (op == "**") return std::pow(x, y);
    return std::nullopt;
  };
  const double* da = std::get_if<double>(&a);
  const double* db = std::get_if<double>(&b);
  const Numbers* na = std::get_if<Numbers>(&a);
  const Numbers* nb = std::get_if<Numbers>(&b);
  if (da && db) {
    if (auto r = apply(*da, *db)) return *r;
    return {};
  }
  if (na && db) {
    Numbers out;
    for (double x : *na) {
      auto r = apply(x, *db);
      if (!r) return {};
      out.push_back(*r);
    }
    return out;
  }
  if (da && nb && op == "*") return arithmetic(op, b, a);
  if (na && nb && na->size() == nb->size() && (op == "+" || op == "-" || op == "*")) {
    Numbers out;
    for (std::size_t i = 0; i < na->size(); ++i) out.push_back(*apply((*na)[i], (*nb)[i]));
    return out;
  }
  if (const auto* sa = std::get_if<std::string>(&a); sa && op == "+") {
    if (const auto* sb = std::get_if<std::string>(&b)) return *sa + *sb;
  }
  return {};
}

}  // namespace

Value Interpreter::eval(const Expr& e) {
  if (auto special = eval_special(e)) return *special;
  switch (e.kind) {
    case Expr::Kind::number: return e.number;
    case Expr::Kind::string: return e.text;
    case Expr::Kind::name: {
      if (auto it = env_.find(e.text); it != env_.end()) return it->second;
      if (auto c = named_constant(e.text)) return *c;
      return {};
    }
    case Expr::Kind::member: {
      const std::string d = dotted(e);
      if (!d.empty()) {
        if (auto c = named_constant(d)) return *c;
        if (auto it = env_.find(d); it != env_.end()) return it->second;
      }
      return {};
    }
    case Expr::Kind::list: {
      Numbers out;
      for (const auto& a : e.args) {
        Value v = eval(*a.value);
        if (auto d = std::get_if<double>(&v)) {
          out.push_back(*d);
        } else if (auto n = std::get_if<Numbers>(&v); n && e.args.size() == 1) {
          return *n;  // np.array([[...]]) style nesting
        } else {
          return {};
        }
      }
      return out;
    }
    case Expr::Kind::unary: {
      Value v = eval(*e.object);
      if (e.text == "-") return arithmetic("*", v, -1.0);
      if (e.text == "+") return v;
      return {};
    }
    case Expr::Kind::binary: return arithmetic(e.text, eval(*e.object), eval(*e.rhs));
    case Expr::Kind::call: {
      const std::string fn = e.object ? dotted(*e.object) : std::string();
      const Expr* a0 = arg(e, 0, "");
      if (fn == "math.radians" || fn == "np.radians" || fn == "np.deg2rad" ||
          fn == "THREE.MathUtils.degToRad" || fn == "MathUtils.degToRad" ||
          fn == "numpy.radians") {
        if (a0) return arithmetic("*", eval(*a0), std::numbers::pi / 180.0);
      }
      if (fn == "math.degrees" || fn == "np.degrees" || fn == "np.rad2deg") {
        if (a0) return arithmetic("*", eval(*a0), 180.0 / std::numbers::pi);
      }
      if (fn == "Math.sqrt" || fn == "math.sqrt" || fn == "np.sqrt" || fn == "Mathf.Sqrt") {
        if (a0) {
          if (auto v = number(*a0); v && *v >= 0.0) return std::sqrt(*v);
        }
      }
      if (fn == "np.array" || fn == "numpy.array" || fn == "np.asarray" || fn == "list" ||
          fn == "tuple" || fn == "float" || fn == "parseFloat" || fn == "Number") {
        if (a0) return eval(*a0);
      }
      eval_args(e);
      return {};
    }
    case Expr::Kind::make: eval_args(e); return {};
    case Expr::Kind::dict:
      for (const auto& a : e.args) {
        if (a.value) eval(*a.value);
      }
      return {};
    default: return {};
  }
}

ParseOutcome Interpreter::finish(const Program& program, const ParseOptions& options) {
  for (const auto& issue : program.issues) {
    note(Severity::warning, issue.message, issue.line, issue.column);
  }
  for (const auto& s : program.statements) {
    try {
      exec(s);
    } catch (const Error& err) {
      note(Severity::warning, err.what(), s.line, s.column);
    }
  }
  Scene scene;
  scene.scene_id = options.scene_id;
  for (const auto& o : objects_) {
    SceneObject out;
    try {
      out.class_name = normalize_class_name(o.class_name);
    } catch (const Error&) {
      continue;
    }
    out.position = o.position;
    out.rotation = o.composed ? euler_from_matrix(o.rotation) : o.euler;
    out.scale = hadamard(o.dims, o.scale);
    std::string color = o.color;
    if (o.material && *o.material < materials_.size()) {
      const MaterialState& m = materials_[*o.material];
      if (!m.color.empty()) {
        color = m.color;
      } else if (m.rgb) {
        color = nearest_color_name(*m.rgb);
      } else if (auto c = color_from_text(m.name)) {
        color = *c;
      }
    }
    out.material = color.empty() ? "gray" : color;
    if (!out.position.finite() || !out.rotation.finite() || !out.scale.finite()) {
      note(Severity::warning, "object with non-finite transform dropped", o.line);
      continue;
    }
    scene.objects.push_back(std::move(out));
  }
  ParseOutcome outcome;
  outcome.diagnostics = std::move(diags_);
  outcome.scene = std::move(scene);
  return outcome;
}

}  // namespace codecs
}  // namespace scenecode
