#include <regex>

#include "codecs/expr.hpp"
#include "codecs/lexer.hpp"
#include "scenecode/codecs.hpp"

namespace scenecode {

namespace {

// Constant value of a position.set argument: a plain or negated numeric
// literal. Anything else is not checked.
std::optional<double> literal(const codecs::Expr& e) {
  if (e.kind == codecs::Expr::Kind::number) return e.number;
  if (e.kind == codecs::Expr::Kind::unary && e.object && (e.text == "-" || e.text == "+")) {
    if (auto v = literal(*e.object)) return e.text == "-" ? -*v : *v;
  }
  return std::nullopt;
}

}  // namespace

FilterVerdict phase1_quality_filter(std::string_view threejs_text) {
  const std::string code = strip_code_fences(threejs_text);
  for (const char* token : {"THREE.Scene", "THREE.PerspectiveCamera", "THREE.Mesh"}) {
    if (code.find(token) == std::string::npos) return FilterVerdict::reject("missing_required_token");
  }
  static const std::regex mesh_ctor(R"(new\s+THREE\.Mesh\s*\()");
  const auto meshes = std::distance(std::sregex_iterator(code.begin(), code.end(), mesh_ctor),
                                    std::sregex_iterator());
  if (meshes < kPhase1MinMeshes || meshes > kPhase1MaxMeshes) {
    return FilterVerdict::reject("object_count_out_of_range");
  }
  const codecs::LexResult lexed = codecs::lex(code, codecs::LexStyle::c_like);
  const codecs::Program program = codecs::parse_program(lexed, codecs::LexStyle::c_like);
  for (const auto& s : program.statements) {
    if (s.target || !s.value || s.value->kind != codecs::Expr::Kind::call) continue;
    const codecs::Expr& call = *s.value;
    if (!call.object || call.object->kind != codecs::Expr::Kind::member ||
        call.object->text != "set" || !call.object->object ||
        call.object->object->kind != codecs::Expr::Kind::member ||
        call.object->object->text != "position") {
      continue;
    }
    for (const auto& a : call.args) {
      if (!a.value) continue;
      if (auto v = literal(*a.value); v && (*v < -kPhase1PositionLimit || *v > kPhase1PositionLimit)) {
        return FilterVerdict::reject("position_out_of_range");
      }
    }
  }
  return FilterVerdict::accept();
}

}  // namespace scenecode
