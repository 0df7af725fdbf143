#include <cmath>

#include "codecs/interp.hpp"
#include "codecs/languages.hpp"
#include "scenecode/error.hpp"

namespace scenecode::codecs {

namespace {

class BlenderInterpreter final : public Interpreter {
 public:
  using Interpreter::Interpreter;

 protected:
  std::optional<Value> eval_special(const Expr& e) override {
    switch (e.kind) {
      case Expr::Kind::member: return member(e);
      case Expr::Kind::call: return call(e);
      case Expr::Kind::index: return index(e);
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
  Value active_;

  std::optional<std::string> color_value(const Value& v) {
    if (auto s = std::get_if<std::string>(&v)) return color_from_text(*s);
    if (auto n = std::get_if<Numbers>(&v); n && n->size() >= 3) {
      return nearest_color_name({(*n)[0], (*n)[1], (*n)[2]});
    }
    return std::nullopt;
  }

  double kw(const Expr& e, std::string_view key, double def) {
    const Expr* a = arg(e, 99, key);
    if (!a) return def;
    return number(*a).value_or(def);
  }

  std::optional<Value> add_primitive(const Expr& e, const std::string& op) {
    Geometry g;
    if (op == "primitive_cube_add") {
      const double s = kw(e, "size", 2.0);
      g = {"cube", {s, s, s}};
    } else if (op == "primitive_uv_sphere_add" || op == "primitive_ico_sphere_add") {
      const double d = 2.0 * kw(e, "radius", 1.0);
      g = {"sphere", {d, d, d}};
    } else if (op == "primitive_cylinder_add") {
      const double d = 2.0 * kw(e, "radius", 1.0);
      g = {"cylinder", {d, kw(e, "depth", 2.0), d}};
    } else if (op == "primitive_cone_add") {
      const double d = 2.0 * std::max(kw(e, "radius1", 1.0), kw(e, "radius2", 0.0));
      const double vertices = kw(e, "vertices", 32);
      g = {vertices == 4 ? "pyramid" : "cone", {d, kw(e, "depth", 2.0), d}};
    } else if (op == "primitive_torus_add") {
      const double major = kw(e, "major_radius", 1.0);
      const double minor = kw(e, "minor_radius", 0.25);
      g = {"torus", {(major + minor) / 0.7, minor / 0.2, (major + minor) / 0.7}};
    } else {
      if (!marker_on_line(e.line)) {
        note(Severity::info, op + " skipped", e.line, e.column);
        active_ = Opaque{op};
        return Value(Opaque{op});
      }
      g = {"cube", {2, 2, 2}};
    }
    ObjRef r = create(g.class_name, g.dims, e.line);
    ObjState& o = objects_[r.index];
    if (const Expr* a = arg(e, 99, "location")) {
      if (auto v = vec3_partial(*a, o.position)) o.position = *v;
    }
    if (const Expr* a = arg(e, 99, "rotation")) {
      if (auto v = vec3_partial(*a, o.euler)) o.set_euler(*v);
    }
    if (const Expr* a = arg(e, 99, "scale")) {
      if (auto v = vec3_partial(*a, o.scale)) o.scale = *v;
    }
    active_ = r;
    return Value(r);
  }

  std::optional<Value> call(const Expr& e) {
    if (!e.object) return std::nullopt;
    const std::string fn = dotted(*e.object);
    if (fn.starts_with("bpy.ops.mesh.")) return add_primitive(e, fn.substr(13));
    if (fn.starts_with("bpy.ops.object.") &&
        (fn.ends_with("camera_add") || fn.ends_with("light_add") || fn.ends_with("empty_add"))) {
      active_ = Opaque{fn.substr(15)};
      return Value(Opaque{fn.substr(15)});
    }
    if (fn == "bpy.data.materials.new") {
      MaterialRef m = new_material();
      if (const Expr* a = arg(e, 0, "name")) {
        Value v = eval(*a);
        if (auto s = std::get_if<std::string>(&v)) materials_[m.index].name = *s;
      }
      return Value(m);
    }
    if (fn == "bpy.data.materials.get") return Value();
    if (fn == "mathutils.Vector" || fn == "Vector" || fn == "mathutils.Euler" || fn == "Euler") {
      if (const Expr* a = arg(e, 0, "")) return eval(*a);
      return Value();
    }
    if (e.object->kind == Expr::Kind::member && e.object->object) {
      const std::string& m = e.object->text;
      Value base = eval(*e.object->object);
      if (std::holds_alternative<MaterialRef>(base) && (m == "get" || m == "copy")) return base;
      if (auto r = std::get_if<ObjRef>(&base); r && m == "copy") {
        ObjState copy = objects_[r->index];
        copy.line = e.line;
        objects_.push_back(std::move(copy));
        return Value(ObjRef{objects_.size() - 1});
      }
    }
    return std::nullopt;
  }

  std::optional<Value> member(const Expr& e) {
    const std::string d = dotted(e);
    if (d == "bpy.context.active_object" || d == "bpy.context.object" ||
        d == "bpy.context.view_layer.objects.active") {
      return active_;
    }
    if (!e.object) return std::nullopt;
    Value base = eval(*e.object);
    if (auto r = std::get_if<ObjRef>(&base)) {
      ObjState& o = objects_[r->index];
      if (e.text == "location") return Value(Numbers{o.position.x, o.position.y, o.position.z});
      if (e.text == "scale") return Value(Numbers{o.scale.x, o.scale.y, o.scale.z});
      if (e.text == "rotation_euler") {
        const Vec3 eu = o.composed ? euler_from_matrix(o.rotation) : o.euler;
        return Value(Numbers{eu.x, eu.y, eu.z});
      }
      if (e.text == "active_material") return o.material ? Value(MaterialRef{*o.material}) : Value();
      return Value();
    }
    if (std::holds_alternative<MaterialRef>(base)) {
      // node_tree, nodes, inputs: every hop below a material stays on it
      return base;
    }
    if (auto n = std::get_if<Numbers>(&base); n && n->size() >= 3) {
      if (e.text == "x") return Value((*n)[0]);
      if (e.text == "y") return Value((*n)[1]);
      if (e.text == "z") return Value((*n)[2]);
    }
    return std::nullopt;
  }

  std::optional<Value> index(const Expr& e) {
    if (!e.object) return std::nullopt;
    if (dotted(*e.object) == "bpy.context.selected_objects") return active_;
    Value base = eval(*e.object);
    if (std::holds_alternative<MaterialRef>(base)) return base;
    if (auto n = std::get_if<Numbers>(&base); n && !e.args.empty()) {
      if (auto i = number(*e.args[0].value)) {
        const auto k = static_cast<long>(*i);
        if (k >= 0 && static_cast<std::size_t>(k) < n->size()) return Value((*n)[k]);
      }
    }
    return std::nullopt;
  }

  static double* axis(Vec3& v, const std::string& a) {
    if (a == "x" || a == "[0]") return &v.x;
    if (a == "y" || a == "[1]") return &v.y;
    if (a == "z" || a == "[2]") return &v.z;
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
    auto p = lv->path;
    // obj.location[0] = 1 arrives as [location, []]; recover the subscript
    if (p.size() == 2 && p[1] == "[]" && t.kind == Expr::Kind::index && !t.args.empty()) {
      if (auto i = number(*t.args[0].value)) p[1] = "[" + std::to_string(static_cast<int>(*i)) + "]";
    }
    if (auto r = std::get_if<ObjRef>(&lv->base)) {
      ObjState& o = objects_[r->index];
      if (p.size() == 1) {
        if (p[0] == "active_material") {
          if (auto m = material_of(*s.value)) o.material = m->index;
          return;
        }
        if (p[0] == "color") {
          if (auto c = color_value(eval(*s.value))) o.color = *c;
          return;
        }
        auto v = vec3(*s.value);
        if (!v) return;
        if (p[0] == "location") o.position = *v;
        if (p[0] == "scale") o.scale = *v;
        if (p[0] == "rotation_euler") o.set_euler(*v);
        if (p[0] == "dimensions") {
          const AABB unit = unit_bounds(o.class_name);
          const Vec3 size = unit.size();
          o.scale = {v->x / (o.dims.x * size.x), v->y / (o.dims.y * size.y),
                     v->z / (o.dims.z * size.z)};
        }
        return;
      }
      if (p.size() == 2) {
        auto x = number(*s.value);
        if (!x) return;
        Vec3 eu = o.composed ? euler_from_matrix(o.rotation) : o.euler;
        Vec3* target = p[0] == "location" ? &o.position : p[0] == "scale" ? &o.scale
                       : p[0] == "rotation_euler" ? &eu : nullptr;
        if (!target) return;
        if (double* c = axis(*target, p[1])) {
          *c = *x;
          if (target == &eu) o.set_euler(eu);
        }
        return;
      }
      return;
    }
    if (auto m = std::get_if<MaterialRef>(&lv->base)) {
      // member hops below a material resolve to the material itself, so the
      // property name comes from the target expression
      const std::string last = t.kind == Expr::Kind::member ? t.text : std::string();
      if (last == "diffuse_color" || last == "default_value" || last == "base_color" ||
          last == "color") {
        Value v = eval(*s.value);
        if (auto n = std::get_if<Numbers>(&v); n && n->size() >= 3) {
          materials_[m->index].rgb = Rgb{(*n)[0], (*n)[1], (*n)[2]};
        } else if (auto c = color_value(v)) {
          materials_[m->index].color = *c;
        }
      }
      return;
    }
    if (!std::holds_alternative<Opaque>(lv->base)) skipped(s);
  }

  bool method(const Expr& c) {
    auto lv = lvalue(*c.object->object);
    if (!lv) return false;
    const std::string& fn = c.object->text;
    auto r = std::get_if<ObjRef>(&lv->base);
    if (!r) return false;
    const auto& p = lv->path;
    const Expr* a0 = arg(c, 0, "");
    if (fn == "append" && a0 && p.size() == 2 && p[0] == "data" && p[1] == "materials") {
      if (auto m = material_of(*a0)) objects_[r->index].material = m->index;
      return true;
    }
    return false;
  }
};

std::string triple(const Vec3& v) { return "(" + num(v.x) + ", " + num(v.y) + ", " + num(v.z) + ")"; }

std::string add_call(const std::string& cls) {
  if (cls == "sphere") return "bpy.ops.mesh.primitive_uv_sphere_add(radius=0.5";
  if (cls == "cylinder") return "bpy.ops.mesh.primitive_cylinder_add(radius=0.5, depth=1.0";
  if (cls == "cone") return "bpy.ops.mesh.primitive_cone_add(radius1=0.5, depth=1.0";
  if (cls == "pyramid") {
    return "bpy.ops.mesh.primitive_cone_add(vertices=4, radius1=0.5, depth=1.0";
  }
  if (cls == "torus") {
    return "bpy.ops.mesh.primitive_torus_add(major_radius=0.5, minor_radius=0.2";
  }
  return "bpy.ops.mesh.primitive_cube_add(size=1.0";
}

}  // namespace

ParseOutcome parse_blender(std::string_view code, const ParseOptions& options) {
  const LexResult lexed = lex(code, LexStyle::python);
  const Program program = parse_program(lexed, LexStyle::python);
  BlenderInterpreter interp(lexed);
  return interp.finish(program, options);
}

std::string serialize_blender(const Scene& scene, const SerializeOptions& options) {
  std::string out;
  out += "import bpy\nimport math\n\n";
  out += "bpy.ops.object.select_all(action='SELECT')\n";
  out += "bpy.ops.object.delete()\n";
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    const std::string cls = representable_class(o.class_name, options);
    out += "\n";
    out += add_call(cls) + ", location=" + triple(o.position) + ", rotation=" +
           triple(o.rotation) + ")";
    if (cls != o.class_name || cls == "pyramid") {
      out += "  # " + std::string(kClassMarker) + o.class_name;
    }
    out += "\n";
    out += "obj = bpy.context.active_object\n";
    out += "obj.name = 'object_" + std::to_string(i) + "'\n";
    out += "obj.scale = " + triple(o.scale) + "\n";
    const Rgb c = color_rgb(o.material).value_or(Rgb{0.5, 0.5, 0.5});
    out += "mat = bpy.data.materials.new(name='" + o.material + "')\n";
    out += "mat.diffuse_color = (" + num(c.r) + ", " + num(c.g) + ", " + num(c.b) + ", 1.0)\n";
    out += "obj.data.materials.append(mat)\n";
  }
  return out;
}

}  // namespace scenecode::codecs
