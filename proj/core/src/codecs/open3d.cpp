#include <cmath>

#include "codecs/interp.hpp"
#include "codecs/languages.hpp"
#include "scenecode/error.hpp"

namespace scenecode::codecs {

namespace {

std::string factory_name(const std::string& fn) {
  for (std::string_view prefix :
       {"o3d.geometry.TriangleMesh.", "open3d.geometry.TriangleMesh.", "TriangleMesh."}) {
    if (fn.starts_with(prefix)) return fn.substr(prefix.size());
  }
  return {};
}

bool is_rotation_factory(const std::string& fn) {
  return fn.ends_with("get_rotation_matrix_from_xyz");
}

class Open3dInterpreter final : public Interpreter {
 public:
  using Interpreter::Interpreter;

 protected:
  std::optional<Value> eval_special(const Expr& e) override {
    if (e.kind == Expr::Kind::call) return call(e);
    return std::nullopt;
  }

  void exec(const Statement& s) override {
    if (s.target) {
      if (s.op != "=") {
        skipped(s, "compound assignment ignored");
        return;
      }
      if (s.target->kind == Expr::Kind::name) {
        env_[s.target->text] = eval(*s.value);
        return;
      }
      skipped(s);
      return;
    }
    eval(*s.value);
  }

 private:
  double kw(const Expr& e, std::size_t pos, std::string_view key, double def) {
    const Expr* a = arg(e, pos, key);
    if (!a) return def;
    return number(*a).value_or(def);
  }

  std::optional<Value> create_mesh(const Expr& e, const std::string& f) {
    Geometry g;
    Vec3 center;
    if (f == "create_box") {
      const Vec3 d{kw(e, 0, "width", 1), kw(e, 1, "height", 1), kw(e, 2, "depth", 1)};
      g = {"cube", d};
      center = d * 0.5;  // create_box spans [0, w] x [0, h] x [0, d]
    } else if (f == "create_sphere") {
      const double d = 2.0 * kw(e, 0, "radius", 1);
      g = {"sphere", {d, d, d}};
    } else if (f == "create_cylinder") {
      const double d = 2.0 * kw(e, 0, "radius", 1);
      g = {"cylinder", {d, kw(e, 1, "height", 2), d}};
    } else if (f == "create_cone") {
      const double d = 2.0 * kw(e, 0, "radius", 1);
      const double resolution = kw(e, 2, "resolution", 20);
      g = {resolution == 4 ? "pyramid" : "cone", {d, kw(e, 1, "height", 2), d}};
    } else if (f == "create_tetrahedron") {
      const double d = 2.0 * kw(e, 0, "radius", 1) / std::sqrt(3.0);
      g = {"pyramid", {d, d, d}};
    } else if (f == "create_torus") {
      const double major = kw(e, 0, "torus_radius", 1);
      const double minor = kw(e, 1, "tube_radius", 0.5);
      g = {"torus", {(major + minor) / 0.7, minor / 0.2, (major + minor) / 0.7}};
    } else if (f == "create_icosahedron" || f == "create_octahedron") {
      const double d = 2.0 * kw(e, 0, "radius", 1);
      g = {"sphere", {d, d, d}};
    } else {
      if (!marker_on_line(e.line)) {
        note(Severity::info, f + " skipped", e.line, e.column);
        return Value(Opaque{f});
      }
      g = {"cube", {1, 1, 1}};
    }
    ObjRef r = create(g.class_name, g.dims, e.line);
    objects_[r.index].position = center;
    return Value(r);
  }

  // Pivot for rotate/scale: explicit center argument, or the object's own
  // center when omitted or given as obj.get_center().
  Vec3 pivot(const Expr& c, std::size_t pos, const ObjState& o) {
    const Expr* a = arg(c, pos, "center");
    if (!a) return o.position;
    if (a->kind == Expr::Kind::call && a->object && a->object->kind == Expr::Kind::member &&
        a->object->text == "get_center") {
      return o.position;
    }
    return vec3(*a).value_or(o.position);
  }

  std::optional<Value> call(const Expr& e) {
    if (!e.object) return std::nullopt;
    const std::string fn = dotted(*e.object);
    if (auto f = factory_name(fn); !f.empty()) return create_mesh(e, f);
    if (is_rotation_factory(fn)) {
      const Expr* a0 = arg(e, 0, "rotation");
      if (auto v = a0 ? vec3(*a0) : std::nullopt) {
        return Value(RotationValue{rotation_matrix(*v), *v});
      }
      return Value();
    }
    if (fn == "np.diag" || fn == "numpy.diag") {
      const Expr* a0 = arg(e, 0, "");
      if (auto n = a0 ? numbers(*a0) : std::nullopt) return Value(Numbers(*n));
      return Value();
    }
    if (fn.starts_with("o3d.visualization") || fn.starts_with("open3d.visualization")) {
      return Value(Opaque{"visualization"});
    }
    if (e.object->kind != Expr::Kind::member || !e.object->object) return std::nullopt;
    const std::string& m = e.object->text;
    auto r = object_of(*e.object->object);
    if (!r) return std::nullopt;
    ObjState& o = objects_[r->index];
    const Expr* a0 = arg(e, 0, "");
    if (m == "translate") {
      const Expr* rel = arg(e, 1, "relative");
      const bool relative = !(rel && number(*rel) == 0.0);
      if (auto v = a0 ? vec3(*a0) : std::nullopt) o.position = relative ? o.position + *v : *v;
      return Value(*r);
    }
    if (m == "scale") {
      const Expr* s = arg(e, 0, "scale");
      if (auto k = s ? number(*s) : std::nullopt) {
        const Vec3 c = pivot(e, 1, o);
        o.scale = o.scale * *k;
        o.position = c + (o.position - c) * *k;
      }
      return Value(*r);
    }
    if (m == "rotate") {
      const Expr* R = arg(e, 0, "R");
      Value rv = R ? eval(*R) : Value();
      if (auto rot = std::get_if<RotationValue>(&rv)) {
        const Vec3 c = pivot(e, 1, o);
        o.position = c + rot->matrix * (o.position - c);
        o.rotate(rot->matrix, true, rot->euler);
      }
      return Value(*r);
    }
    if (m == "transform") {
      Value tv = a0 ? eval(*a0) : Value();
      if (auto n = std::get_if<Numbers>(&tv); n && n->size() >= 3) {
        const Vec3 k{(*n)[0], (*n)[1], (*n)[2]};
        o.scale = hadamard(o.scale, k);
        o.position = hadamard(o.position, k);
      } else {
        note(Severity::warning, "transform matrix not resolved", e.line, e.column);
      }
      return Value(*r);
    }
    if (m == "paint_uniform_color") {
      if (auto v = a0 ? numbers(*a0) : std::nullopt; v && v->size() >= 3) {
        o.color = nearest_color_name({(*v)[0], (*v)[1], (*v)[2]});
      }
      return Value(*r);
    }
    if (m == "compute_vertex_normals" || m == "compute_triangle_normals") return Value(*r);
    return std::nullopt;
  }
};

std::string triple(const Vec3& v) { return num(v.x) + ", " + num(v.y) + ", " + num(v.z); }

std::string factory(const std::string& cls, const Vec3& scale, bool& needs_diag) {
  needs_diag = true;
  if (cls == "sphere") return "create_sphere(radius=0.5)";
  if (cls == "cylinder") return "create_cylinder(radius=0.5, height=1.0)";
  if (cls == "cone") return "create_cone(radius=0.5, height=1.0)";
  if (cls == "pyramid") return "create_cone(radius=0.5, height=1.0, resolution=4)";
  if (cls == "torus") return "create_torus(torus_radius=0.5, tube_radius=0.2)";
  needs_diag = false;
  return "create_box(width=" + num(scale.x) + ", height=" + num(scale.y) + ", depth=" +
         num(scale.z) + ")";
}

}  // namespace

ParseOutcome parse_open3d(std::string_view code, const ParseOptions& options) {
  const LexResult lexed = lex(code, LexStyle::python);
  const Program program = parse_program(lexed, LexStyle::python);
  Open3dInterpreter interp(lexed);
  return interp.finish(program, options);
}

std::string serialize_open3d(const Scene& scene, const SerializeOptions& options) {
  std::string out;
  out += "import numpy as np\nimport open3d as o3d\n\n";
  out += "meshes = []\n";
  for (std::size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& o = scene.objects[i];
    const std::string cls = representable_class(o.class_name, options);
    const std::string name = "mesh" + std::to_string(i);
    bool diag = false;
    out += "\n";
    out += name + " = o3d.geometry.TriangleMesh." + factory(cls, o.scale, diag);
    if (cls != o.class_name || cls == "pyramid") {
      out += "  # " + std::string(kClassMarker) + o.class_name;
    }
    out += "\n";
    if (diag) {
      out += name + ".transform(np.diag([" + triple(o.scale) + ", 1.0]))\n";
    }
    out += name + ".rotate(o3d.geometry.get_rotation_matrix_from_xyz((" + triple(o.rotation) +
           ")), center=" + name + ".get_center())\n";
    out += name + ".translate((" + triple(o.position) + "), relative=False)\n";
    const Rgb c = color_rgb(o.material).value_or(Rgb{0.5, 0.5, 0.5});
    out += name + ".paint_uniform_color([" + num(c.r) + ", " + num(c.g) + ", " + num(c.b) +
           "])\n";
    out += name + ".compute_vertex_normals()\n";
    out += "meshes.append(" + name + ")\n";
  }
  out += "\no3d.visualization.draw_geometries(meshes)\n";
  return out;
}

}  // namespace scenecode::codecs
