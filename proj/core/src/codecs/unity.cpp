#include <cmath>

#include "codecs/interp.hpp"
#include "codecs/languages.hpp"
#include "scenecode/error.hpp"

namespace scenecode::codecs {

namespace {

// Unity primitive meshes: Cylinder and Capsule are two units tall.
std::optional<Geometry> primitive_type(const std::string& name) {
  std::string n = name;
  if (n.starts_with("PrimitiveType.")) n.erase(0, 14);
  if (n == "Cube") return Geometry{"cube", {1, 1, 1}};
  if (n == "Sphere") return Geometry{"sphere", {1, 1, 1}};
  if (n == "Cylinder") return Geometry{"cylinder", {1, 2, 1}};
  if (n == "Capsule") return Geometry{"cylinder", {1, 2, 1}};
  return std::nullopt;
}

std::optional<std::string> unity_named_color(const std::string& name) {
  static const std::map<std::string, std::string> table = {
      {"red", "red"},         {"green", "green"},   {"blue", "blue"},   {"yellow", "yellow"},
      {"cyan", "cyan"},       {"magenta", "magenta"}, {"white", "white"}, {"black", "black"},
      {"gray", "gray"},       {"grey", "gray"}};
  std::string n = name;
  if (n.starts_with("Color.")) n.erase(0, 6);
  if (auto it = table.find(n); it != table.end()) return it->second;
  return std::nullopt;
}

class UnityInterpreter final : public Interpreter {
 public:
  using Interpreter::Interpreter;

 protected:
  std::optional<Value> eval_special(const Expr& e) override {
    switch (e.kind) {
      case Expr::Kind::make: return construct(e);
      case Expr::Kind::member: return member(e);
      case Expr::Kind::call: return call(e);
      default: return std::nullopt;
    }
  }

  void exec(const Statement& s) override {
    if (s.target) {
      assign(s);
      return;
    }
    const Expr& v = *s.value;
    if (v.kind == Expr::Kind::call && v.object && v.object->kind == Expr::Kind::member) {
      if (method(v)) return;
    }
    eval(v);
  }

 private:
  std::optional<std::string> color_value(const Value& v) {
    if (auto s = std::get_if<std::string>(&v)) return color_from_text(*s);
    if (auto n = std::get_if<Numbers>(&v); n && n->size() >= 3) {
      return nearest_color_name({(*n)[0], (*n)[1], (*n)[2]});
    }
    return std::nullopt;
  }

  std::optional<Value> construct(const Expr& e) {
    if (!e.object) return std::nullopt;
    std::string type = dotted(*e.object);
    if (type.starts_with("UnityEngine.")) type.erase(0, 12);
    if (type == "Vector3" || type == "Color" || type == "Color32") {
      Numbers out;
      for (const auto& a : e.args) {
        out.push_back(a.value ? number(*a.value).value_or(0.0) : 0.0);
      }
      if (type == "Vector3") {
        out.resize(3, 0.0);
        return Value(out);
      }
      if (type == "Color32") {
        for (double& x : out) x /= 255.0;
      }
      if (out.size() < 3) return Value();
      return Value(nearest_color_name({out[0], out[1], out[2]}));
    }
    if (type == "Material") return Value(new_material());
    if (type == "GameObject") {
      eval_args(e);
      return Value(Opaque{"GameObject"});
    }
    return std::nullopt;
  }

  std::optional<Value> member(const Expr& e) {
    const std::string d = dotted(e);
    if (d == "Vector3.one") return Value(Numbers{1, 1, 1});
    if (d == "Vector3.zero") return Value(Numbers{0, 0, 0});
    if (d == "Vector3.up") return Value(Numbers{0, 1, 0});
    if (d == "Quaternion.identity") return Value(Numbers{0, 0, 0});
    if (d.starts_with("Color.")) {
      if (auto c = unity_named_color(d)) return Value(*c);
    }
    if (!e.object) return std::nullopt;
    Value base = eval(*e.object);
    if (auto r = std::get_if<ObjRef>(&base)) {
      if (e.text == "transform" || e.text == "gameObject") return base;
      ObjState& o = objects_[r->index];
      if (e.text == "position" || e.text == "localPosition") {
        return Value(Numbers{o.position.x, o.position.y, o.position.z});
      }
      if (e.text == "localScale") return Value(Numbers{o.scale.x, o.scale.y, o.scale.z});
      if (e.text == "material" || e.text == "sharedMaterial") return Value(object_material(*r));
      return Value();
    }
    if (auto n = std::get_if<Numbers>(&base); n && n->size() >= 3) {
      if (e.text == "x") return Value((*n)[0]);
      if (e.text == "y") return Value((*n)[1]);
      if (e.text == "z") return Value((*n)[2]);
    }
    return std::nullopt;
  }

  std::optional<Value> call(const Expr& e) {
    if (!e.object) return std::nullopt;
    const std::string fn = dotted(*e.object);
    if (fn == "GameObject.CreatePrimitive" || fn == "UnityEngine.GameObject.CreatePrimitive") {
      const Expr* a0 = arg(e, 0, "type");
      const std::string type = a0 ? dotted(*a0) : std::string();
      auto g = primitive_type(type);
      if (!g && !marker_on_line(e.line)) {
        note(Severity::info, "primitive " + type + " skipped", e.line, e.column);
        return Value(Opaque{type});
      }
      if (!g) g = Geometry{"cube", {1, 1, 1}};
      return Value(create(g->class_name, g->dims, e.line));
    }
    if (fn == "Quaternion.Euler" || fn == "UnityEngine.Quaternion.Euler") {
      Numbers deg;
      if (e.args.size() >= 3) {
        for (std::size_t i = 0; i < 3; ++i) deg.push_back(number(*e.args[i].value).value_or(0.0));
      } else if (const Expr* a0 = arg(e, 0, "")) {
        deg = numbers(*a0).value_or(Numbers{});
      }
      if (deg.size() < 3) return Value();
      return Value(Numbers{deg[0], deg[1], deg[2]});
    }
    if (fn == "Shader.Find") return Value(Opaque{"Shader"});
    if (fn == "Instantiate" || fn == "Object.Instantiate" || fn == "GameObject.Instantiate") {
      const Expr* a0 = arg(e, 0, "");
      if (auto r = a0 ? object_of(*a0) : std::nullopt) {
        ObjState copy = objects_[r->index];
        copy.line = e.line;
        objects_.push_back(std::move(copy));
        return Value(ObjRef{objects_.size() - 1});
      }
      return std::nullopt;
    }
    if (e.object->kind == Expr::Kind::member && e.object->object) {
      const std::string& method_name = e.object->text;
      if (method_name == "GetComponent" || method_name == "AddComponent") {
        Value base = eval(*e.object->object);
        if (std::holds_alternative<ObjRef>(base)) return base;
      }
    }
    return std::nullopt;
  }

  MaterialRef object_material(ObjRef r) {
    ObjState& o = objects_[r.index];
    if (!o.material) {
      MaterialRef m = new_material();
      objects_[r.index].material = m.index;
      return m;
    }
    return MaterialRef{*o.material};
  }

  // Drops "transform"/"gameObject" hops and component lookups that lvalue()
  // keeps as path elements when they are not resolved to the object itself.
  static std::vector<std::string> clean(const std::vector<std::string>& path) {
    std::vector<std::string> out;
    for (const auto& p : path) {
      if (p == "transform" || p == "gameObject" || p == "()") continue;
      out.push_back(p);
    }
    return out;
  }

  void set_channel(ObjState& o, const std::string& name, const Vec3& v) {
    if (name == "position" || name == "localPosition") o.position = v;
    if (name == "localScale") o.scale = v;
    if (name == "eulerAngles" || name == "localEulerAngles" || name == "rotation" ||
        name == "localRotation") {
      o.set_euler({deg_to_rad(v.x), deg_to_rad(v.y), deg_to_rad(v.z)});
    }
  }

  static Vec3 read_channel(const ObjState& o, const std::string& name) {
    if (name == "localScale") return o.scale;
    if (name == "position" || name == "localPosition") return o.position;
    const Vec3 e = o.composed ? euler_from_matrix(o.rotation) : o.euler;
    return {rad_to_deg(e.x), rad_to_deg(e.y), rad_to_deg(e.z)};
  }

  void assign(const Statement& s) {
    const Expr& t = *s.target;
    if (s.op != "=") {
      skipped(s, "compound assignment ignored");
      return;
    }
    if (t.kind == Expr::Kind::name) {
      env_[t.text] = eval(*s.value);
      return;
    }
    auto lv = lvalue(t);
    if (!lv) {
      skipped(s);
      return;
    }
    const auto p = clean(lv->path);
    if (auto r = std::get_if<ObjRef>(&lv->base)) {
      ObjState& o = objects_[r->index];
      if (p.size() == 1 && (p[0] == "material" || p[0] == "sharedMaterial")) {
        if (auto m = material_of(*s.value)) objects_[r->index].material = m->index;
        return;
      }
      if (p.size() >= 2 && (p[0] == "material" || p[0] == "sharedMaterial") &&
          p[1] == "color") {
        if (auto c = color_value(eval(*s.value))) materials_[object_material(*r).index].color = *c;
        return;
      }
      if (p.size() == 1) {
        if (auto v = vec3(*s.value)) set_channel(o, p[0], *v);
        return;
      }
      if (p.size() == 2 && (p[1] == "x" || p[1] == "y" || p[1] == "z")) {
        Vec3 cur = read_channel(o, p[0]);
        if (auto v = number(*s.value)) {
          (p[1] == "x" ? cur.x : p[1] == "y" ? cur.y : cur.z) = *v;
          set_channel(o, p[0], cur);
        }
        return;
      }
      return;
    }
    if (auto m = std::get_if<MaterialRef>(&lv->base)) {
      if (!p.empty() && p[0] == "color") {
        if (auto c = color_value(eval(*s.value))) materials_[m->index].color = *c;
      }
      return;
    }
    if (!std::holds_alternative<Opaque>(lv->base)) skipped(s);
  }

  bool method(const Expr& c) {
    auto lv = lvalue(*c.object->object);
    if (!lv) return false;
    const std::string& fn = c.object->text;
    const auto p = clean(lv->path);
    auto r = std::get_if<ObjRef>(&lv->base);
    if (!r) return false;
    ObjState& o = objects_[r->index];
    Numbers a;
    if (c.args.size() >= 3) {
      for (std::size_t i = 0; i < 3; ++i) a.push_back(number(*c.args[i].value).value_or(0.0));
    } else if (!c.args.empty()) {
      a = numbers(*c.args[0].value).value_or(Numbers{});
    }
    if (p.empty() && fn == "Rotate" && a.size() >= 3) {
      const Vec3 e{deg_to_rad(a[0]), deg_to_rad(a[1]), deg_to_rad(a[2])};
      o.rotate(rotation_matrix(e), false, e);
      return true;
    }
    if (p.empty() && fn == "Translate" && a.size() >= 3) {
      o.position = o.position + Vec3{a[0], a[1], a[2]};
      return true;
    }
    if (p.empty() && fn == "SetPositionAndRotation" && c.args.size() >= 2) {
      if (auto v = vec3(*c.args[0].value)) o.position = *v;
      if (auto v = vec3(*c.args[1].value)) set_channel(o, "rotation", *v);
      return true;
    }
    if (p.size() == 1 && fn == "Set" && a.size() >= 3) {
      set_channel(o, p[0], {a[0], a[1], a[2]});
      return true;
    }
    if (p.size() == 1 && (p[0] == "material" || p[0] == "sharedMaterial") &&
        (fn == "SetColor") && c.args.size() >= 2) {
      if (auto col = color_value(eval(*c.args[1].value))) {
        materials_[object_material(*r).index].color = *col;
      }
      return true;
    }
    return false;
  }
};

std::string unity_base(const std::string& cls) {
  if (cls == "sphere") return "Sphere";
  if (cls == "cylinder" || cls == "cone") return "Cylinder";
  return "Cube";
}

std::string fl(double v) { return num(v) + "f"; }

std::string vec(const Vec3& v) {
  return "new Vector3(" + fl(v.x) + ", " + fl(v.y) + ", " + fl(v.z) + ")";
}

}  // namespace

ParseOutcome parse_unity(std::string_view code, const ParseOptions& options) {
  const LexResult lexed = lex(code, LexStyle::c_like);
  const Program program = parse_program(lexed, LexStyle::c_like);
  UnityInterpreter interp(lexed);
  return interp.finish(program, options);
}

std::string serialize_unity(const Scene& scene, const SerializeOptions& options) {
  std::string out;
  out += "using UnityEngine;\n\n";
  out += "public class SceneBuilder : MonoBehaviour\n{\n";
  out += "    void Start()\n    {\n";
  if (scene.camera) {
    const Camera& cam = *scene.camera;
    out += "        Camera cam = Camera.main;\n";
    out += "        cam.fieldOfView = " + fl(cam.fov) + ";\n";
    out += "        cam.transform.position = " + vec(cam.position) + ";\n";
    out += "        cam.transform.LookAt(" + vec(cam.target) + ");\n";
  }
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    representable_class(o.class_name, options);
    const std::string base = unity_base(o.class_name);
    const Vec3 dims = base == "Cylinder" ? Vec3{1, 2, 1} : Vec3{1, 1, 1};
    const std::string name = "obj" + std::to_string(i);
    const bool native = (o.class_name == "cube" && base == "Cube") ||
                        (o.class_name == "sphere" && base == "Sphere") ||
                        (o.class_name == "cylinder" && base == "Cylinder");
    out += "\n";
    out += "        GameObject " + name + " = GameObject.CreatePrimitive(PrimitiveType." + base + ");";
    if (!native) out += " // " + std::string(kClassMarker) + o.class_name;
    out += "\n";
    out += "        " + name + ".transform.position = " + vec(o.position) + ";\n";
    out += "        " + name + ".transform.eulerAngles = " +
           vec({rad_to_deg(o.rotation.x), rad_to_deg(o.rotation.y), rad_to_deg(o.rotation.z)}) +
           ";\n";
    out += "        " + name + ".transform.localScale = " +
           vec({o.scale.x / dims.x, o.scale.y / dims.y, o.scale.z / dims.z}) + ";\n";
    const Rgb c = color_rgb(o.material).value_or(Rgb{0.5, 0.5, 0.5});
    out += "        " + name + ".GetComponent<Renderer>().material.color = new Color(" + fl(c.r) +
           ", " + fl(c.g) + ", " + fl(c.b) + ");\n";
  }
  out += "    }\n}\n";
  return out;
}

}  // namespace scenecode::codecs
