#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "scenecode/codecs.hpp"
#include "scenecode/error.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/rng.hpp"
#include "scenecode/scene.hpp"
#include "scenecode/vec3.hpp"

namespace scenecode::testing {

inline std::filesystem::path fixture_dir() { return SCENECODE_FIXTURE_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("scenecode_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

// --- assignment oracle ---

// Minimum over every injection of the smaller side into the larger one.
inline double brute_force_assignment(const std::vector<double>& cost, std::size_t rows, std::size_t cols) {
  const bool transpose = rows > cols;
  const std::size_t small = transpose ? cols : rows;
  const std::size_t large = transpose ? rows : cols;
  auto at = [&](std::size_t s, std::size_t l) { return transpose ? cost[l * cols + s] : cost[s * cols + l]; };
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t s = 0; s < small; ++s) c += at(s, perm[s]);
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Cost of an assignment in row order, matching the summation order of the oracle.
inline double assignment_cost(const std::vector<double>& cost, std::size_t rows, std::size_t cols,
                              const std::vector<int>& assignment) {
  const bool transpose = rows > cols;
  double c = 0.0;
  if (!transpose) {
    for (std::size_t r = 0; r < rows; ++r) c += cost[r * cols + static_cast<std::size_t>(assignment[r])];
    return c;
  }
  std::vector<int> row_of(cols, -1);
  for (std::size_t r = 0; r < rows; ++r) {
    if (assignment[r] >= 0) row_of[static_cast<std::size_t>(assignment[r])] = static_cast<int>(r);
  }
  for (std::size_t k = 0; k < cols; ++k) c += cost[static_cast<std::size_t>(row_of[k]) * cols + k];
  return c;
}

// --- QA generator oracle ---

struct OracleFrame {
  Vec3 origin, right, up, forward;
  explicit OracleFrame(const Camera& c) : origin(c.position) {
    const Vec3 d = c.target - c.position;
    const double n = std::sqrt(d.x * d.x + d.y * d.y + d.z * d.z);
    forward = {d.x / n, d.y / n, d.z / n};
    const double h = std::sqrt(forward.x * forward.x + forward.z * forward.z);
    right = {-forward.z / h, 0.0, forward.x / h};
    up = {right.y * forward.z - right.z * forward.y, right.z * forward.x - right.x * forward.z,
          right.x * forward.y - right.y * forward.x};
  }
  double x(const Vec3& p) const {
    const Vec3 d = p - origin;
    return d.x * right.x + d.y * right.y + d.z * right.z;
  }
  double depth(const Vec3& p) const {
    const Vec3 d = p - origin;
    return d.x * forward.x + d.y * forward.y + d.z * forward.z;
  }
};

inline double oracle_volume(const SceneObject& o) {
  const double unit = o.class_name == "torus" ? 1.4 * 0.4 * 1.4 : 1.0;
  return unit * o.scale.x * o.scale.y * o.scale.z;
}

inline std::string fixed3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  std::string s(buf);
  if (s == "-0.000") s = "0.000";
  return s;
}

// Recomputes the ground-truth answer of a generated question from the scene
// alone. Returns "<ambiguous>" when the question should not have been posed.
inline std::string oracle_answer(const Scene& s, const Camera& cam, const QAItem& q) {
  constexpr double m = 0.15;
  const auto& obj = s.objects;
  auto name = [&](std::size_t i) { return obj[i].material + " " + obj[i].class_name; };
  auto count_if = [&](auto pred) { return std::to_string(std::count_if(obj.begin(), obj.end(), pred)); };
  const std::string& k = q.query.kind;
  if (k == "count_all") return std::to_string(obj.size());
  if (k == "count_color") return count_if([&](const SceneObject& o) { return o.material == q.query.color; });
  if (k == "count_class") return count_if([&](const SceneObject& o) { return o.class_name == q.query.class_name; });
  if (k == "exists") {
    const bool any = std::any_of(obj.begin(), obj.end(), [&](const SceneObject& o) {
      return o.material == q.query.color && o.class_name == q.query.class_name;
    });
    return any ? "yes" : "no";
  }
  const OracleFrame f(cam);
  const std::size_t a = q.query.a.value_or(0);
  if (k == "locate") {
    const Vec3 p = obj[a].position;
    return "(" + fixed3(p.x) + ", " + fixed3(p.y) + ", " + fixed3(p.z) + ")";
  }
  const std::size_t b = q.query.b.value_or(0);
  const Vec3 pa = obj[a].position;
  const Vec3 pb = obj[b].position;
  if (k == "relation") {
    if (q.query.axis == "horizontal") {
      if (f.x(pa) < f.x(pb) - m) return "left of";
      if (f.x(pa) > f.x(pb) + m) return "right of";
    } else if (q.query.axis == "vertical") {
      if (pa.y > pb.y + m) return "above";
      if (pa.y < pb.y - m) return "below";
    } else {
      if (f.depth(pa) < f.depth(pb) - m) return "in front of";
      if (f.depth(pa) > f.depth(pb) + m) return "behind";
    }
    return "<ambiguous>";
  }
  if (k == "larger") {
    const double va = oracle_volume(obj[a]);
    const double vb = oracle_volume(obj[b]);
    if (std::max(va, vb) < (1.0 + m) * std::min(va, vb)) return "<ambiguous>";
    return name(va > vb ? a : b);
  }
  if (k == "closer") {
    const double da = f.depth(pa);
    const double db = f.depth(pb);
    if (std::abs(da - db) <= m) return "<ambiguous>";
    return name(da < db ? a : b);
  }
  return "<unknown kind " + k + ">";
}

// --- QA evaluator fixtures ---

inline QAItem counting_item(long gt) {
  QAItem q;
  q.question_id = "c";
  q.category = QACategory::counting;
  q.count = gt;
  q.gt_answer = std::to_string(gt);
  return q;
}

inline QAItem existence_item(bool gt) {
  QAItem q;
  q.question_id = "e";
  q.category = QACategory::existence;
  q.exists = gt;
  q.gt_answer = gt ? "yes" : "no";
  return q;
}

inline QAItem phrase_item(QACategory c, std::vector<std::string> accepted) {
  QAItem q;
  q.question_id = "p";
  q.category = c;
  q.gt_answer = accepted.front();
  q.accepted = std::move(accepted);
  return q;
}

inline QAItem localization_item(Vec3 p) {
  QAItem q;
  q.question_id = "l";
  q.category = QACategory::localization;
  q.location = p;
  q.tolerance = kLocalizationTolerance;
  q.gt_answer = "(" + fixed3(p.x) + ", " + fixed3(p.y) + ", " + fixed3(p.z) + ")";
  return q;
}

struct EvalCase {
  std::string name;
  QAItem item;
  std::string response;
  InferenceMode mode;
  bool correct;
  std::string rule;  // expected rule name
};

inline std::vector<EvalCase> qa_eval_cases() {
  using C = QACategory;
  const auto D = InferenceMode::direct();
  const auto N = InferenceMode::nl_cot();
  const auto CC = InferenceMode::code_cot(SceneCodeLanguage::threejs);
  const std::vector<std::string> left{"left of", "to the left"};
  const std::vector<std::string> right{"right of", "to the right"};
  const std::vector<std::string> above{"above", "higher"};
  const std::vector<std::string> below{"below", "lower", "beneath"};
  const std::vector<std::string> front{"in front of", "closer"};
  const std::vector<std::string> behind{"behind", "farther", "further"};
  const Vec3 loc{1.0, 0.5, -2.0};
  return {
      // counting: integer after an explicit marker, else the last integer
      {"count_marker_after_words", counting_item(4), "I count three, then one more. Final answer: 4", N, true, "marker_integer"},
      {"count_last_integer", counting_item(5), "There are 2 cubes and 3 spheres, so 5", D, true, "last_integer"},
      {"count_bare", counting_item(3), "3", D, true, "last_integer"},
      {"count_final_answer", counting_item(3), "Final answer: 3", D, true, "marker_integer"},
      {"count_the_answer_is", counting_item(3), "The answer is 3.", D, true, "marker_integer"},
      {"count_total_colon", counting_item(7), "Total: 7 objects", D, true, "marker_integer"},
      {"count_markdown_marker", counting_item(4), "**Final Answer:** 4", N, true, "marker_integer"},
      {"count_marker_beats_later_integer", counting_item(4), "Final answer: 4\nEarlier I miscounted 5.", N, true, "marker_integer"},
      {"count_words_only", counting_item(2), "There are two objects.", D, false, "no_extraction"},
      {"count_wrong_marker", counting_item(3), "I see 3 cubes and 1 sphere. Final answer: 5", N, false, "marker_integer"},
      {"count_total_without_colon", counting_item(10), "Counting carefully, the total is 10", D, true, "last_integer"},
      {"count_skips_glued_digits", counting_item(3), "Objects: cube1, cube2, sphere3. So 3.", D, true, "last_integer"},
      {"count_last_of_many", counting_item(6), "1 red, 2 blue and 3 green: 6", D, true, "last_integer"},
      // existence: yes/no after a marker, else the last yes/no token
      {"exists_leading_yes", existence_item(true), "Yes, there is a red cube.", D, true, "last_yes_no"},
      {"exists_bare_no", existence_item(false), "No.", D, true, "last_yes_no"},
      {"exists_final_answer", existence_item(false), "Final answer: no", D, true, "marker_yes_no"},
      {"exists_marker_after_hesitation", existence_item(true), "Let me check... no wait, yes. Final answer: Yes", N, true, "marker_yes_no"},
      {"exists_the_answer_is_wrong", existence_item(false), "The answer is yes", D, false, "marker_yes_no"},
      {"exists_no_token", existence_item(true), "I don't see it clearly", D, false, "no_extraction"},
      {"exists_answer_marker", existence_item(false), "Looking closely: no, there is none. Answer: no", N, true, "marker_yes_no"},
      {"exists_last_token_wins", existence_item(true), "yes\nno", D, false, "last_yes_no"},
      // relationship: accepted phrase inside the committed segment
      {"rel_final_answer", phrase_item(C::relationship, left), "Final answer: left of", D, true, "committed_segment"},
      {"rel_sentence", phrase_item(C::relationship, left), "The red cube is to the left of the blue sphere.", D, true, "committed_segment"},
      {"rel_scratchpad_only", phrase_item(C::relationship, left), "At first it seems left of it.\nChecking depth.\nFinal answer: right of", N, false, "committed_segment"},
      {"rel_trailing_lines", phrase_item(C::relationship, left), "It could be left of it at first glance.\nLet me check the depth.\nLooking again.\nIt is right of it.", N, false, "committed_segment"},
      {"rel_heading", phrase_item(C::relationship, left), "Reasoning about x.\n**Final Answer**\nTo the left", N, true, "committed_segment"},
      {"rel_hyphenated", phrase_item(C::relationship, left), "Final answer: Left-of", D, true, "committed_segment"},
      {"rel_answer_colon", phrase_item(C::relationship, above), "Answer: above", D, true, "committed_segment"},
      {"rel_alternate_phrase", phrase_item(C::relationship, below), "It sits lower than the cube.", D, true, "committed_segment"},
      {"rel_in_front", phrase_item(C::relationship, front), "Final answer: in front of", D, true, "committed_segment"},
      {"rel_behind_wrong", phrase_item(C::relationship, behind), "Final answer: in front of", D, false, "committed_segment"},
      {"rel_right", phrase_item(C::relationship, right), "It is to the right.", D, true, "committed_segment"},
      // comparison: the winner's name inside the committed segment
      {"cmp_final_answer", phrase_item(C::comparison, {"red cube"}), "Final answer: the red cube", D, true, "committed_segment"},
      {"cmp_other_object", phrase_item(C::comparison, {"red cube"}), "The blue sphere is larger.", D, false, "committed_segment"},
      {"cmp_case", phrase_item(C::comparison, {"red cube"}), "**Final answer:** Red Cube", N, true, "committed_segment"},
      {"cmp_scratchpad", phrase_item(C::comparison, {"red cube"}), "The red cube looks big.\nHmm.\nComparing volumes.\nFinal answer: the blue sphere", N, false, "committed_segment"},
      {"cmp_empty", phrase_item(C::comparison, {"red cube"}), "", D, false, "no_extraction"},
      // localization: first three numbers within tolerance
      {"loc_exact", localization_item(loc), "(1.0, 0.5, -2.0)", D, true, "first_three_numbers"},
      {"loc_labelled", localization_item(loc), "x=1.05, y=0.45, z=-1.95", D, true, "first_three_numbers"},
      {"loc_offset_0_2", localization_item(loc), "(1.2, 0.5, -2.0)", D, false, "first_three_numbers"},
      {"loc_two_numbers", localization_item(loc), "(1, 0.5)", D, false, "no_extraction"},
      {"loc_final_answer", localization_item(loc), "Final answer: (1.000, 0.500, -2.000)", D, true, "first_three_numbers"},
      {"loc_at_tolerance", localization_item(loc), "About (1.1, 0.5, -2.0)", D, true, "first_three_numbers"},
      {"loc_leading_count", localization_item(loc), "I see 3 objects. The cube is at (1.0, 0.5, -2.0).", N, false, "first_three_numbers"},
      // Code-CoT: judge only the text after the final-answer marker
      {"cc_localization_after_code", localization_item(loc),
       "```js\nmesh.position.set(4, 0.5, 1);\n```\nFinal answer: (1.0, 0.5, -2.0)", CC, true, "first_three_numbers"},
      {"direct_localization_same_text", localization_item(loc),
       "```js\nmesh.position.set(4, 0.5, 1);\n```\nFinal answer: (1.0, 0.5, -2.0)", D, false, "first_three_numbers"},
      {"cc_existence", existence_item(true), "```python\n# no sphere is needed\n```\nFinal answer: yes", CC, true, "last_yes_no"},
      {"cc_relationship_code_mentions_left", phrase_item(C::relationship, left),
       "```js\n// cube is left of sphere?\nconst a = 1;\n```\nFinal answer: right of", CC, false, "committed_segment"},
      {"cc_no_marker_last_lines", phrase_item(C::relationship, left),
       "```js\nconst s = new THREE.Scene();\n```\nThe cube is to the left.", CC, true, "committed_segment"},
      {"cc_counting_markdown", counting_item(4), "```js\nfor (let i = 0; i < 9; i++) {}\n```\n**Final Answer:** 4", CC, true, "last_integer"},
      {"cc_counting_code_numbers", counting_item(2), "```js\nmesh.position.set(1, 2, 3);\n```\nFinal answer: 2", CC, true, "last_integer"},
  };
}

// --- Phase-1 filter corpus ---

inline std::string threejs_program(int meshes, const std::string& position = "0, 0.5, 0",
                                   bool scene = true, bool camera = true) {
  std::string s;
  if (scene) s += "const scene = new THREE.Scene();\n";
  if (camera) s += "const camera = new THREE.PerspectiveCamera(60, 1, 0.1, 100);\n";
  for (int i = 0; i < meshes; ++i) {
    const std::string m = "m" + std::to_string(i);
    s += "const " + m + " = new THREE.Mesh(new THREE.BoxGeometry(1, 1, 1), new THREE.MeshStandardMaterial({ color: 'red' }));\n";
    s += m + ".position.set(" + position + ");\n";
    s += "scene.add(" + m + ");\n";
  }
  return s;
}

struct FilterCase {
  std::string name;
  std::string code;
  bool accepted;
  std::string reason;
};

inline std::vector<FilterCase> phase1_cases() {
  return {
      {"minimal_valid", threejs_program(1), true, ""},
      {"missing_scene", threejs_program(1, "0, 0.5, 0", false), false, "missing_required_token"},
      {"missing_camera", threejs_program(1, "0, 0.5, 0", true, false), false, "missing_required_token"},
      {"missing_mesh_token", "const scene = new THREE.Scene();\nconst camera = new THREE.PerspectiveCamera(60, 1, 0.1, 100);\n", false,
       "missing_required_token"},
      {"zero_meshes", threejs_program(0) + "// THREE.Mesh is imported but never built\n", false, "object_count_out_of_range"},
      {"fifty_meshes", threejs_program(50), true, ""},
      {"fifty_one_meshes", threejs_program(51), false, "object_count_out_of_range"},
      {"position_30_5", threejs_program(1, "30.5, 0.5, 0"), false, "position_out_of_range"},
      {"position_minus_30_5", threejs_program(1, "0, 0.5, -30.5"), false, "position_out_of_range"},
      {"position_exactly_30", threejs_program(1, "30, 0.5, -30"), true, ""},
      {"fenced_valid", "Here is the scene:\n```javascript\n" + threejs_program(2, "1, 0.5, -1") + "```\n", true, ""},
      {"empty_output", "", false, "missing_required_token"},
  };
}

// --- paper tables ---

struct LanguageScores {
  std::string model;
  std::map<SceneCodeLanguage, double> scores;
  double delta;
};

inline std::vector<LanguageScores> table1_rows() {
  auto row = [](std::string m, double a, double b, double c, double d, double e, double f, double delta) {
    using L = SceneCodeLanguage;
    return LanguageScores{std::move(m),
                          {{L::threejs, a}, {L::unity_csharp, b}, {L::blender_python, c},
                           {L::open3d_python, d}, {L::canonical_json, e}, {L::scene_dsl, f}},
                          delta};
  };
  return {
      row("Claude Opus 4.7", .792, .679, .739, .702, .734, .615, .177),
      row("Claude Sonnet 4.6", .693, .681, .726, .713, .733, .526, .207),
      row("GPT-5", .646, .473, .630, .596, .677, .628, .205),
      row("GPT-4o", .730, .672, .675, .705, .719, .658, .071),
      row("Gemini-2.5-Pro", .732, .481, .594, .689, .729, .594, .250),
      row("Gemini-2.5-Flash", .672, .586, .657, .678, .772, .474, .298),
      row("Gemini-3-Flash", .684, .543, .652, .723, .793, .680, .249),
      row("Gemini-3-Pro", .834, .680, .716, .712, .812, .575, .259),
      row("Qwen3-VL-8B", .640, .651, .514, .617, .676, .629, .162),
      row("Qwen2.5-VL-32B", .686, .656, .471, .707, .603, .509, .236),
      row("Qwen2.5-VL-7B", .599, .376, .320, .599, .566, .315, .284),
      row("Qwen2.5-VL-3B", .546, .618, .667, .357, .550, .321, .346),
      row("LLaVA-OV-7B", .640, .668, .648, .596, .421, .652, .248),
      row("InternVL3-8B", .541, .563, .649, .576, .591, .641, .108),
  };
}

struct Table10 {
  std::vector<std::string> models{"Claude Opus 4.7", "Gemini-3-Pro",   "GPT-4o",        "Claude Sonnet 4.6",
                                  "Gemini-3-Flash",  "Gemini-2.5-Pro", "Gemini-2.5-Flash", "Qwen3-VL-8B",
                                  "Qwen2.5-VL-7B"};
  std::vector<double> f1{.937, .904, .888, .867, .807, .761, .726, .726, .439};
  std::vector<double> relationship{38.2, 37.9, 37.3, 37.9, 37.3, 38.2, 37.6, 35.7, 37.9};
  std::vector<double> overall{48.8, 47.2, 43.0, 43.1, 47.4, 45.5, 48.1, 39.1, 45.4};
};

}  // namespace scenecode::testing

namespace sct = scenecode::testing;
