#include <cmath>
#include <numbers>

#include "codecs/interp.hpp"
#include "codecs/languages.hpp"
#include "scenecode/error.hpp"

namespace scenecode::codecs {

namespace {

std::string strip_three(std::string name) {
  if (name.starts_with("THREE.")) name.erase(0, 6);
  if (auto p = name.find("BufferGeometry"); p != std::string::npos && p > 0) {
    name.replace(p, 14, "Geometry");
  }
  return name;
}

bool is_opaque_type(const std::string& t) {
  return t == "Scene" || t == "PerspectiveCamera" || t == "OrthographicCamera" ||
         t == "WebGLRenderer" || t == "Group" || t == "Object3D" || t.ends_with("Light") ||
         t == "OrbitControls" || t == "Clock" || t == "Fog" || t == "GridHelper" ||
         t == "AxesHelper" || t == "Raycaster" || t == "TextureLoader";
}

class ThreeInterpreter final : public Interpreter {
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
    if (auto d = std::get_if<double>(&v)) return nearest_color_name(rgb_from_int(*d));
    if (auto s = std::get_if<std::string>(&v)) return color_from_text(*s);
    if (auto n = std::get_if<Numbers>(&v); n && n->size() >= 3) {
      return nearest_color_name({(*n)[0], (*n)[1], (*n)[2]});
    }
    return std::nullopt;
  }

  std::optional<Value> construct(const Expr& e) {
    if (!e.object) return std::nullopt;
    const std::string type = strip_three(dotted(*e.object));
    auto n = [&](std::size_t i, std::string_view key, double def) {
      const Expr* a = arg(e, i, key);
      if (!a) return def;
      return number(*a).value_or(def);
    };
    if (type == "BoxGeometry") {
      return Value(Geometry{"cube", {n(0, "width", 1), n(1, "height", 1), n(2, "depth", 1)}});
    }
    if (type == "SphereGeometry") {
      const double d = 2.0 * n(0, "radius", 1);
      return Value(Geometry{"sphere", {d, d, d}});
    }
    if (type == "IcosahedronGeometry" || type == "DodecahedronGeometry" ||
        type == "OctahedronGeometry") {
      const double d = 2.0 * n(0, "radius", 1);
      return Value(Geometry{"sphere", {d, d, d}});
    }
    if (type == "CylinderGeometry") {
      const double r = 2.0 * std::max(n(0, "radiusTop", 1), n(1, "radiusBottom", 1));
      return Value(Geometry{"cylinder", {r, n(2, "height", 1), r}});
    }
    if (type == "CapsuleGeometry") {
      const double r = n(0, "radius", 1);
      return Value(Geometry{"cylinder", {2 * r, n(1, "length", 1) + 2 * r, 2 * r}});
    }
    if (type == "ConeGeometry") {
      const double d = 2.0 * n(0, "radius", 1);
      const double segments = n(2, "radialSegments", 32);
      return Value(Geometry{segments == 4 ? "pyramid" : "cone", {d, n(1, "height", 1), d}});
    }
    if (type == "TetrahedronGeometry") {
      const double d = 2.0 * n(0, "radius", 1) / std::sqrt(3.0);
      return Value(Geometry{"pyramid", {d, d, d}});
    }
    if (type == "TorusGeometry" || type == "TorusKnotGeometry") {
      const double radius = n(0, "radius", 1);
      const double tube = n(1, "tube", 0.4);
      const double xz = (radius + tube) / 0.7;
      return Value(Geometry{"torus", {xz, tube / 0.2, xz}});
    }
    if (type.ends_with("Geometry")) return Value(Opaque{type});
    if (type.ends_with("Material")) {
      MaterialRef m = new_material();
      if (const Expr* opts = arg(e, 0, ""); opts && opts->kind == Expr::Kind::dict) {
        for (const auto& kv : opts->args) {
          if (kv.name == "color" && kv.value) {
            if (auto c = color_value(eval(*kv.value))) materials_[m.index].color = *c;
          }
        }
      }
      return Value(m);
    }
    if (type == "Mesh") return mesh(e);
    if (type == "Vector3" || type == "Euler") {
      return Value(Numbers{n(0, "x", 0), n(1, "y", 0), n(2, "z", 0)});
    }
    if (type == "Color") {
      const Expr* a0 = arg(e, 0, "");
      if (!a0) return Value(std::string("white"));
      if (e.args.size() >= 3) {
        return Value(nearest_color_name({n(0, "", 0), n(1, "", 0), n(2, "", 0)}));
      }
      if (auto c = color_value(eval(*a0))) return Value(*c);
      return Value();
    }
    if (is_opaque_type(type)) {
      eval_args(e);
      return Value(Opaque{type});
    }
    return std::nullopt;
  }

  Value mesh(const Expr& e) {
    const Expr* g = arg(e, 0, "");
    const Expr* m = arg(e, 1, "");
    Value gv = g ? eval(*g) : Value();
    std::optional<MaterialRef> mat;
    if (m) {
      Value mv = eval(*m);
      if (auto r = std::get_if<MaterialRef>(&mv)) mat = *r;
      if (m->kind == Expr::Kind::list && !m->args.empty()) mat = material_of(*m->args[0].value);
    }
    Geometry geom{"cube", {1, 1, 1}};
    if (auto p = std::get_if<Geometry>(&gv)) {
      geom = *p;
    } else if (auto o = std::get_if<Opaque>(&gv)) {
      if (!marker_on_line(e.line)) {
        note(Severity::info, "mesh with unsupported geometry " + o->what + " skipped", e.line,
             e.column);
        return Opaque{o->what};
      }
    } else {
      note(Severity::warning, "mesh geometry not resolved; assuming a box", e.line, e.column);
    }
    ObjRef ref = create(geom.class_name, geom.dims, e.line);
    if (mat) objects_[ref.index].material = mat->index;
    return ref;
  }

  std::optional<Value> member(const Expr& e) {
    if (!e.object) return std::nullopt;
    Value base = eval(*e.object);
    if (auto r = std::get_if<ObjRef>(&base)) {
      ObjState& o = objects_[r->index];
      if (e.text == "position") return Value(Numbers{o.position.x, o.position.y, o.position.z});
      if (e.text == "scale") return Value(Numbers{o.scale.x, o.scale.y, o.scale.z});
      if (e.text == "rotation") {
        const Vec3 eu = o.composed ? euler_from_matrix(o.rotation) : o.euler;
        return Value(Numbers{eu.x, eu.y, eu.z});
      }
      if (e.text == "material") return Value(object_material(*r));
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
    if (!e.object || e.object->kind != Expr::Kind::member || !e.object->object) return std::nullopt;
    const std::string& fn = e.object->text;
    Value base = eval(*e.object->object);
    if (auto g = std::get_if<Geometry>(&base)) {
      (void)g;
      return base;  // rotateX/translate/center on the geometry keep the class and size
    }
    if (auto r = std::get_if<ObjRef>(&base); r && fn == "clone") {
      ObjState copy = objects_[r->index];
      copy.line = e.line;
      objects_.push_back(std::move(copy));
      return Value(ObjRef{objects_.size() - 1});
    }
    if (auto m = std::get_if<MaterialRef>(&base); m && fn == "clone") {
      MaterialRef c = new_material();
      materials_[c.index] = materials_[m->index];
      return Value(c);
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

  void set_color(MaterialRef m, const Value& v) {
    if (auto c = color_value(v)) materials_[m.index].color = *c;
  }

  static Vec3* channel(ObjState& o, const std::string& name) {
    if (name == "position") return &o.position;
    if (name == "scale") return &o.scale;
    return nullptr;
  }

  static double* component(Vec3& v, const std::string& axis) {
    if (axis == "x") return &v.x;
    if (axis == "y") return &v.y;
    if (axis == "z") return &v.z;
    return nullptr;
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
    if (auto r = std::get_if<ObjRef>(&lv->base)) {
      ObjState& o = objects_[r->index];
      const auto& p = lv->path;
      if (p.size() == 1 && p[0] == "material") {
        if (auto m = material_of(*s.value)) objects_[r->index].material = m->index;
        return;
      }
      if (p.size() >= 2 && p[0] == "material" && p[1] == "color") {
        set_color(object_material(*r), eval(*s.value));
        return;
      }
      if (p.size() == 1 && (p[0] == "position" || p[0] == "scale")) {
        if (auto v = vec3(*s.value)) *channel(o, p[0]) = *v;
        return;
      }
      if (p.size() == 1 && p[0] == "rotation") {
        if (auto v = vec3(*s.value)) o.set_euler(*v);
        return;
      }
      if (p.size() == 2 && (p[0] == "position" || p[0] == "scale")) {
        if (double* c = component(*channel(o, p[0]), p[1])) {
          if (auto v = number(*s.value)) *c = *v;
        }
        return;
      }
      if (p.size() == 2 && p[0] == "rotation") {
        Vec3 eu = o.composed ? euler_from_matrix(o.rotation) : o.euler;
        if (double* c = component(eu, p[1])) {
          if (auto v = number(*s.value)) {
            *c = *v;
            o.set_euler(eu);
          }
        }
        return;
      }
      return;  // castShadow, name, userData, ...
    }
    if (auto m = std::get_if<MaterialRef>(&lv->base)) {
      if (!lv->path.empty() && lv->path[0] == "color") set_color(*m, eval(*s.value));
      return;
    }
    if (!std::holds_alternative<Opaque>(lv->base)) skipped(s);
  }

  bool method(const Expr& c) {
    auto lv = lvalue(*c.object->object);
    if (!lv) return false;
    const std::string& fn = c.object->text;
    const auto& p = lv->path;
    const Expr* a0 = arg(c, 0, "");
    if (auto r = std::get_if<ObjRef>(&lv->base)) {
      ObjState& o = objects_[r->index];
      if (p.size() == 1 && (p[0] == "position" || p[0] == "scale")) {
        Vec3& v = *channel(o, p[0]);
        if (fn == "set" && c.args.size() >= 3) {
          Vec3 out = v;
          double* comp[3] = {&out.x, &out.y, &out.z};
          for (std::size_t i = 0; i < 3; ++i) {
            if (auto x = number(*c.args[i].value)) {
              *comp[i] = *x;
            } else {
              note(Severity::warning, "non-constant " + p[0] + " component ignored", c.line,
                   c.column);
            }
          }
          v = out;
          return true;
        }
        if ((fn == "copy" || fn == "fromArray") && a0) {
          if (auto x = vec3(*a0)) v = *x;
          return true;
        }
        if (fn == "setScalar" && a0) {
          if (auto x = number(*a0)) v = {*x, *x, *x};
          return true;
        }
        if (fn == "multiplyScalar" && a0) {
          if (auto x = number(*a0)) v = v * *x;
          return true;
        }
        if (fn == "add" && a0) {
          if (auto x = vec3(*a0)) v = v + *x;
          return true;
        }
        if ((fn == "setX" || fn == "setY" || fn == "setZ") && a0) {
          if (auto x = number(*a0)) {
            *component(v, std::string(1, static_cast<char>(std::tolower(fn[3])))) = *x;
          }
          return true;
        }
        return false;
      }
      if (p.size() == 1 && p[0] == "rotation") {
        if (fn == "set" && c.args.size() >= 3) {
          if (auto x = vec3_partial(*as_list(c), o.euler)) o.set_euler(*x);
          return true;
        }
        if (fn == "copy" && a0) {
          if (auto x = vec3(*a0)) o.set_euler(*x);
          return true;
        }
        return false;
      }
      if (p.empty() && (fn == "rotateX" || fn == "rotateY" || fn == "rotateZ") && a0) {
        if (auto x = number(*a0)) {
          Vec3 e;
          (fn == "rotateX" ? e.x : fn == "rotateY" ? e.y : e.z) = *x;
          o.rotate(rotation_matrix(e), false, e);
        }
        return true;
      }
      if (p.empty() && (fn == "translateX" || fn == "translateY" || fn == "translateZ") && a0) {
        if (auto x = number(*a0)) {
          Vec3 axis;
          (fn == "translateX" ? axis.x : fn == "translateY" ? axis.y : axis.z) = *x;
          o.position = o.position + o.rotation * axis;
        }
        return true;
      }
      if (p.size() == 2 && p[0] == "material" && p[1] == "color") {
        color_method(object_material(*r), fn, c);
        return true;
      }
      if (p.empty() && fn == "lookAt") return true;
      return false;
    }
    if (auto m = std::get_if<MaterialRef>(&lv->base)) {
      if (p.size() == 1 && p[0] == "color") {
        color_method(*m, fn, c);
        return true;
      }
    }
    return false;
  }

  void color_method(MaterialRef m, const std::string& fn, const Expr& c) {
    if (fn == "setRGB" && c.args.size() >= 3) {
      if (auto v = numbers(*as_list(c))) set_color(m, *v);
      return;
    }
    if (const Expr* a0 = arg(c, 0, "")) set_color(m, eval(*a0));
  }

  // The call's positional arguments viewed as a list literal.
  static ExprPtr as_list(const Expr& c) {
    auto l = std::make_shared<Expr>();
    l->kind = Expr::Kind::list;
    l->line = c.line;
    l->column = c.column;
    for (const auto& a : c.args) {
      if (a.name.empty()) l->args.push_back(a);
    }
    return l;
  }
};

}  // namespace

ParseOutcome parse_threejs(std::string_view code, const ParseOptions& options) {
  const LexResult lexed = lex(code, LexStyle::c_like);
  const Program program = parse_program(lexed, LexStyle::c_like);
  ThreeInterpreter interp(lexed);
  return interp.finish(program, options);
}

namespace {

std::string geometry_for(const std::string& cls) {
  if (cls == "sphere") return "new THREE.SphereGeometry(0.5, 32, 16)";
  if (cls == "cylinder") return "new THREE.CylinderGeometry(0.5, 0.5, 1, 32)";
  if (cls == "cone") return "new THREE.ConeGeometry(0.5, 1, 32)";
  if (cls == "pyramid") return "new THREE.ConeGeometry(0.5, 1, 4)";
  if (cls == "torus") return "new THREE.TorusGeometry(0.5, 0.2, 16, 48)";
  return "new THREE.BoxGeometry(1, 1, 1)";
}

std::string triple(const Vec3& v) { return num(v.x) + ", " + num(v.y) + ", " + num(v.z); }

}  // namespace

std::string serialize_threejs(const Scene& scene, const SerializeOptions& options) {
  const Camera cam = scene.camera.value_or(Camera{});
  std::string out;
  out += "import * as THREE from 'three';\n\n";
  out += "const scene = new THREE.Scene();\n";
  out += "scene.background = new THREE.Color(0xffffff);\n\n";
  out += "const camera = new THREE.PerspectiveCamera(" + num(cam.fov) + ", " + num(cam.aspect) +
         ", 0.1, 1000);\n";
  out += "camera.position.set(" + triple(cam.position) + ");\n";
  out += "camera.lookAt(" + triple(cam.target) + ");\n\n";
  out += "scene.add(new THREE.AmbientLight(0xffffff, 0.6));\n";
  out += "const sun = new THREE.DirectionalLight(0xffffff, 0.8);\n";
  out += "sun.position.set(5, 10, 7);\n";
  out += "scene.add(sun);\n";
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    const std::string cls = representable_class(o.class_name, options);
    const std::string name = "mesh" + std::to_string(i);
    out += "\n";
    out += "const " + name + " = new THREE.Mesh(" + geometry_for(cls) +
           ", new THREE.MeshStandardMaterial({ color: '" + o.material + "' }));";
    if (cls != o.class_name || cls == "pyramid") {
      out += " // " + std::string(kClassMarker) + o.class_name;
    }
    out += "\n";
    out += name + ".position.set(" + triple(o.position) + ");\n";
    out += name + ".rotation.set(" + triple(o.rotation) + ");\n";
    out += name + ".scale.set(" + triple(o.scale) + ");\n";
    out += "scene.add(" + name + ");\n";
  }
  out += "\nconst renderer = new THREE.WebGLRenderer({ antialias: true });\n";
  out += "renderer.setSize(512, 512);\n";
  out += "document.body.appendChild(renderer.domElement);\n";
  out += "renderer.render(scene, camera);\n";
  return out;
}

}  // namespace scenecode::codecs
