#include <sstream>

#include "scenecode/error.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/scene_json.hpp"

namespace scenecode {

const std::string_view kReconstructionSystemPrompt =
    "You are an expert 3D scene reconstruction assistant. Given an image of a 3D scene, you must "
    "reconstruct it as executable code in the specified programming language. Output ONLY the code, "
    "no explanations.";

const std::string_view kCanonicalJsonSchema =
    R"({"scene_id": "predicted", "objects": [{"class_name": "shape", "position": [x,y,z], "rotation": [rx,ry,rz], "scale": [sx,sy,sz], "material": "color_name"}], "camera": {"position": [x,y,z], "target": [x,y,z], "fov": 60.0}})";

namespace {

constexpr std::string_view kPrimitiveHint =
    "Objects are geometric primitives: cube, sphere, cylinder, cone, torus, pyramid. Each has a "
    "color from: red, blue, green, yellow, purple, orange, cyan, white.";

constexpr std::string_view kHypersimHint =
    "This is a photorealistic indoor scene. Objects are real furniture and items in a room. Use "
    "descriptive class names for each object (e.g., chair, table, bathtub, lamp, bed).";

constexpr std::string_view kCameraHint =
    "The image is a single 512x512 render from a frontal viewpoint with a 60-degree vertical field "
    "of view.";

std::string num1(double v) {
  std::string s = format_fixed(v, 1);
  return v > 0.0 ? "+" + s : s;
}

std::string coordinate_hint(SceneDomain domain, const SceneBounds& b) {
  std::ostringstream os;
  os << "Use a Y-up right-handed coordinate system. ";
  if (domain == SceneDomain::primitive) {
    if (b.min.x == b.min.z && b.max.x == b.max.z) {
      os << "The ground plane extends from " << num1(b.min.x) << " to " << num1(b.max.x)
         << " in both X and Z. ";
    } else {
      os << "The ground plane extends from " << num1(b.min.x) << " to " << num1(b.max.x)
         << " in X and from " << num1(b.min.z) << " to " << num1(b.max.z) << " in Z. ";
    }
    os << "The ground plane is at y=0, and each object's y position equals half its height.";
  } else {
    os << "Units are meters. The scene spans X from " << num1(b.min.x) << " to " << num1(b.max.x)
       << ", Y from " << num1(b.min.y) << " to " << num1(b.max.y) << ", and Z from "
       << num1(b.min.z) << " to " << num1(b.max.z) << ". The floor is at Y=0 (approximately).";
  }
  return os.str();
}

std::string body(SceneCodeLanguage lang, std::string_view hint) {
  const std::string h(hint);
  switch (lang) {
    case SceneCodeLanguage::threejs:
      return "Reconstruct this 3D scene as Three.js JavaScript code. " + h +
             " Use the appropriate geometry (BoxGeometry, SphereGeometry, CylinderGeometry, "
             "ConeGeometry, TorusGeometry) for each object. Set exact positions, rotations, and "
             "scales. Set MeshStandardMaterial color for each object.";
    case SceneCodeLanguage::unity_csharp:
      return "Reconstruct this 3D scene as Unity C# code. " + h +
             " Use GameObject.CreatePrimitive() with the appropriate PrimitiveType (Cube, Sphere, "
             "Cylinder, Capsule) for each object. Set exact positions, rotations, and scales through "
             "its transform. Set the Renderer material color for each object.";
    case SceneCodeLanguage::blender_python:
      return "Reconstruct this 3D scene as Blender Python code. " + h +
             " Use the appropriate primitive_*_add() operator (primitive_cube_add, "
             "primitive_uv_sphere_add, primitive_cylinder_add, primitive_cone_add, "
             "primitive_torus_add) for each object. Set exact locations, rotations, and scales. "
             "Assign a material with a diffuse_color to each object.";
    case SceneCodeLanguage::open3d_python:
      return "Reconstruct this 3D scene as Open3D Python code. " + h +
             " Use the appropriate create_*() mesh factory (create_box, create_sphere, "
             "create_cylinder, create_cone, create_torus) for each object. Set exact positions, "
             "rotations, and scales with translate, rotate, and scale. Set paint_uniform_color for "
             "each object.";
    case SceneCodeLanguage::canonical_json:
      return "Reconstruct this 3D scene as a JSON object with this exact schema: " +
             std::string(kCanonicalJsonSchema) + " " + h;
    case SceneCodeLanguage::scene_dsl:
      return "Reconstruct this 3D scene in the Scene Language DSL. " + h +
             " Write one (entity ...) form per object: (entity (class name) (position x y z) "
             "(rotation rx ry rz) (scale sx sy sz) (material color)). Set exact positions, "
             "rotations, and scales.";
  }
  throw Error("unknown language");
}

}  // namespace

ReconstructionPrompt build_reconstruction_prompt(SceneCodeLanguage lang, SceneDomain domain,
                                                 const SceneBounds& bounds) {
  const std::string_view hint = domain == SceneDomain::primitive ? kPrimitiveHint : kHypersimHint;
  ReconstructionPrompt p;
  p.system_text = std::string(kReconstructionSystemPrompt);
  p.user_text = body(lang, hint) + " " + coordinate_hint(domain, bounds) + " " + std::string(kCameraHint);
  return p;
}

std::string code_cot_language_text(SceneCodeLanguage lang) {
  if (lang == SceneCodeLanguage::canonical_json) {
    return "canonical JSON with the schema " + std::string(kCanonicalJsonSchema);
  }
  return std::string(display_name(lang));
}

std::string to_string(const InferenceMode& mode) {
  switch (mode.kind) {
    case ModeKind::direct: return "direct";
    case ModeKind::nl_cot: return "nl_cot";
    case ModeKind::code_cot:
      if (!mode.language) throw Error("code_cot mode needs a language");
      return "code_cot:" + std::string(to_string(*mode.language));
  }
  return "direct";
}

InferenceMode mode_from_name(std::string_view name) {
  if (name == "direct") return InferenceMode::direct();
  if (name == "nl_cot") return InferenceMode::nl_cot();
  constexpr std::string_view prefix = "code_cot:";
  if (name.substr(0, prefix.size()) == prefix) {
    return InferenceMode::code_cot(language_from_name(name.substr(prefix.size())));
  }
  throw Error("unknown inference mode: " + std::string(name));
}

std::string build_prompt(const InferenceMode& mode, std::string_view question) {
  const std::string q(question);
  switch (mode.kind) {
    case ModeKind::direct: return q + "\nAnswer concisely.";
    case ModeKind::nl_cot:
      return q +
             "\n\nThink step-by-step about the objects in the scene, their classes, colours, and "
             "approximate 3-D positions. Then give a concise final answer.";
    case ModeKind::code_cot:
      if (!mode.language) throw Error("code_cot mode needs a language");
      return "First, write a complete " + code_cot_language_text(*mode.language) +
             " reconstruction of the 3-D scene you see. Include each object's class, colour, and "
             "position. Then, using your reconstruction, answer the following question.\n\nQuestion: " +
             q + "\nFinish with a line starting with 'Final answer:' followed by the concise answer.";
  }
  return q;
}

}  // namespace scenecode
