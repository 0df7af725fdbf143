#pragma once

#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "codecs/expr.hpp"
#include "scenecode/geometry.hpp"
#include "scenecode/codecs.hpp"
#include "scenecode/colors.hpp"

namespace scenecode::codecs {

struct ObjRef {
  std::size_t index = 0;
};
struct MaterialRef {
  std::size_t index = 0;
};
struct Geometry {
  std::string class_name;
  Vec3 dims{1.0, 1.0, 1.0};  // size relative to the canonical unit primitive
};
struct RotationValue {
  Mat3 matrix;
  std::optional<Vec3> euler;  // when built from an XYZ Euler triple
};
// Anything the recognizer knows about but does not model (cameras, lights).
struct Opaque {
  std::string what;
};
using Numbers = std::vector<double>;

using Value = std::variant<std::monostate, double, std::string, Numbers, ObjRef, MaterialRef,
                           Geometry, RotationValue, Opaque>;

struct MaterialState {
  std::string name;
  std::optional<Rgb> rgb;
  std::string color;  // resolved name when given directly
};

struct ObjState {
  std::string class_name;
  Vec3 dims{1.0, 1.0, 1.0};
  Vec3 scale{1.0, 1.0, 1.0};
  Vec3 position;
  Vec3 euler;      // exact while !composed
  Mat3 rotation;   // always current
  bool composed = false;
  std::optional<std::size_t> material;
  std::string color;
  int line = 0;

  void set_euler(const Vec3& e);
  // Applies m in world space (m * R) or local space (R * m). An object that
  // has not been rotated yet keeps the exact Euler triple when one is given.
  void rotate(const Mat3& m, bool world, const std::optional<Vec3>& euler_of_m = std::nullopt);
};

// Receiver of an assignment or method call: the nearest object/material in a
// member chain plus the member names below it ("()" for calls, "[]" for
// subscripts).
struct LValue {
  Value base;
  std::vector<std::string> path;

  bool path_is(std::initializer_list<std::string_view> p) const;
};

// Shared constant folding and bookkeeping for the statement-based recognizers.
class Interpreter {
 public:
  explicit Interpreter(const LexResult& lexed);
  virtual ~Interpreter() = default;

  ParseOutcome finish(const Program& program, const ParseOptions& options);

 protected:
  virtual void exec(const Statement& s) = 0;

  // Language hook for calls and constructions; return std::nullopt to fall
  // back to the generic handling in eval().
  virtual std::optional<Value> eval_special(const Expr& e) = 0;

  Value eval(const Expr& e);
  std::optional<double> number(const Expr& e);
  std::optional<Numbers> numbers(const Expr& e);
  std::optional<Vec3> vec3(const Expr& e);
  std::optional<Rgb> rgb(const Expr& e);  // list/tuple of 3-4 components in [0,1]

  // Per-component vector: unknown components keep the value from `fallback`.
  std::optional<Vec3> vec3_partial(const Expr& e, const Vec3& fallback);
  std::optional<LValue> lvalue(const Expr& e);
  // Evaluates call arguments so inline constructions inside unknown calls
  // (e.g. scene.add(new THREE.Mesh(...))) are still recorded.
  void eval_args(const Expr& call);

  static std::optional<Vec3> as_vec3(const Value& v);
  static std::optional<double> as_number(const Value& v);

  // Positional or keyword argument lookup.
  static const Expr* arg(const Expr& call, std::size_t position, std::string_view name);

  ObjRef create(std::string class_name, Vec3 dims, int line);
  std::optional<ObjRef> object_of(const Expr& e);
  std::optional<MaterialRef> material_of(const Expr& e);
  MaterialRef new_material();

  // Class override from a "scenecode:class=" comment on the given line.
  std::optional<std::string> marker_on_line(int line) const;

  void note(Severity sev, std::string msg, int line, int column = 0);
  void skipped(const Statement& s, std::string_view why = "unrecognized statement skipped");

  std::map<std::string, Value> env_;
  std::vector<ObjState> objects_;
  std::vector<MaterialState> materials_;
  std::vector<Diagnostic> diags_;

 private:
  std::map<int, std::string> markers_;
};

// Degrees helpers used by several languages.
double deg_to_rad(double d);
double rad_to_deg(double r);

// Resolves a color-ish string ("red", "#ff0000", "Mat_Red") to a known color
// name; std::nullopt when nothing in it names a color.
std::optional<std::string> color_from_text(std::string_view text);

Rgb rgb_from_int(double packed);

}  // namespace scenecode::codecs
