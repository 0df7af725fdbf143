#include <algorithm>
#include <json.hpp>
#include <set>
#include <sstream>

#include "scenecode/colors.hpp"
#include "scenecode/error.hpp"
#include "scenecode/geometry.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/rng.hpp"
#include "scenecode/scene_json.hpp"

namespace scenecode {

using nlohmann::json;

std::string_view to_string(QACategory c) {
  switch (c) {
    case QACategory::localization: return "localization";
    case QACategory::relationship: return "relationship";
    case QACategory::counting: return "counting";
    case QACategory::existence: return "existence";
    case QACategory::comparison: return "comparison";
  }
  return "counting";
}

QACategory category_from_name(std::string_view name) {
  for (QACategory c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  throw Error("unknown QA category: " + std::string(name));
}

std::string describe(const SceneObject& obj) { return obj.material + " " + obj.class_name; }

namespace {

constexpr int kSampleAttempts = 200;

double scaled_volume(const SceneObject& o) {
  return unit_bounds(o.class_name).volume() * o.scale.x * o.scale.y * o.scale.z;
}

struct Builder {
  const Scene& scene;
  const Camera& camera;
  Rng rng;
  std::vector<std::string> names;
  std::map<std::string, int> name_count;
  QAGeneration out;

  Builder(const Scene& s, const Camera& c, std::uint64_t seed) : scene(s), camera(c), rng(seed) {
    for (const auto& o : scene.objects) {
      names.push_back(describe(o));
      ++name_count[names.back()];
    }
  }

  bool unique(std::size_t i) const { return name_count.at(names[i]) == 1; }

  // Two objects can be told apart by substring matching of their names.
  bool distinguishable(std::size_t a, std::size_t b) const {
    return unique(a) && unique(b) && names[a].find(names[b]) == std::string::npos &&
           names[b].find(names[a]) == std::string::npos;
  }

  QAItem item(QACategory c, std::string question) {
    QAItem q;
    q.scene_id = scene.scene_id;
    q.question_id = scene.scene_id + "_q" + std::to_string(out.items.size());
    q.category = c;
    q.question = std::move(question);
    return q;
  }

  void push(QAItem q) { out.items.push_back(std::move(q)); }

  void count_all() {
    QAItem q = item(QACategory::counting, "How many objects are in the scene?");
    q.count = static_cast<long>(scene.objects.size());
    q.gt_answer = std::to_string(*q.count);
    q.query.kind = "count_all";
    push(std::move(q));
  }

  bool asked(const std::string& kind, const std::string& value) const {
    return std::any_of(out.items.begin(), out.items.end(), [&](const QAItem& q) {
      return q.query.kind == kind && (q.query.color == value || q.query.class_name == value);
    });
  }

  // Counting by color or class of an object present in the scene. Targets
  // already asked about are avoided while an unused one remains.
  void count_attribute(bool substituted) {
    std::vector<std::pair<std::string, std::string>> options;  // (kind, value)
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& o : scene.objects) {
      for (auto opt : {std::pair<std::string, std::string>{"count_color", o.material},
                       std::pair<std::string, std::string>{"count_class", o.class_name}}) {
        if (seen.insert(opt).second) options.push_back(opt);
      }
    }
    std::vector<std::pair<std::string, std::string>> fresh;
    for (const auto& opt : options) {
      if (!asked(opt.first, opt.second)) fresh.push_back(opt);
    }
    const auto& pool = fresh.empty() ? options : fresh;
    const auto [kind, value] = pool[rng.index(pool.size())];

    long n = 0;
    QAItem q = item(QACategory::counting, "");
    q.query.kind = kind;
    if (kind == "count_color") {
      q.question = "How many objects in the scene are " + value + "?";
      q.query.color = value;
      for (const auto& o : scene.objects) n += o.material == value ? 1 : 0;
    } else {
      q.question = "How many objects in the scene are of class " + value + "?";
      q.query.class_name = value;
      for (const auto& o : scene.objects) n += o.class_name == value ? 1 : 0;
    }
    q.count = n;
    q.gt_answer = std::to_string(n);
    q.substituted = substituted;
    push(std::move(q));
  }

  void existence(const std::string& color, const std::string& cls, bool present) {
    const char* article = std::string_view("aeiou").find(color.empty() ? 'x' : color.front()) ==
                                  std::string_view::npos
                              ? "a "
                              : "an ";
    QAItem q = item(QACategory::existence, "Is there " + std::string(article) + color + " " + cls + " in the scene?");
    q.exists = present;
    q.gt_answer = present ? "yes" : "no";
    q.query.kind = "exists";
    q.query.color = color;
    q.query.class_name = cls;
    push(std::move(q));
  }

  void existence_pair() {
    const SceneObject& o = scene.objects[rng.index(scene.objects.size())];
    existence(o.material, o.class_name, true);

    std::vector<std::string> colors = default_palette();
    std::vector<std::string> classes;
    for (Primitive p : kAllPrimitives) classes.emplace_back(to_string(p));
    std::set<std::pair<std::string, std::string>> present;
    for (const auto& s : scene.objects) {
      present.insert({s.material, s.class_name});
      if (std::find(colors.begin(), colors.end(), s.material) == colors.end()) colors.push_back(s.material);
      if (std::find(classes.begin(), classes.end(), s.class_name) == classes.end()) {
        classes.push_back(s.class_name);
      }
    }
    std::vector<std::pair<std::string, std::string>> absent;
    for (const auto& c : colors) {
      for (const auto& k : classes) {
        if (!present.count({c, k})) absent.emplace_back(c, k);
      }
    }
    if (absent.empty()) {
      out.diagnostics.push_back(scene.scene_id + ": no absent color/class pair; existence question asks about a present pair");
      const SceneObject& p = scene.objects[rng.index(scene.objects.size())];
      existence(p.material, p.class_name, true);
      out.items.back().substituted = true;
      return;
    }
    const auto& [c, k] = absent[rng.index(absent.size())];
    existence(c, k, false);
  }

  bool relationship() {
    const std::size_t n = scene.objects.size();
    if (n < 2) return false;
    for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
      const std::size_t a = rng.index(n);
      std::size_t b = rng.index(n - 1);
      if (b >= a) ++b;
      if (!distinguishable(a, b)) continue;
      const auto rels = spatial_relations(scene.objects[a], scene.objects[b], camera);
      auto has = [&](Relation r) { return std::find(rels.begin(), rels.end(), r) != rels.end(); };
      std::vector<std::string> axes;
      if (has(Relation::left_of) || has(Relation::right_of)) axes.emplace_back("horizontal");
      if (has(Relation::above) || has(Relation::below)) axes.emplace_back("vertical");
      if (has(Relation::in_front_of) || has(Relation::behind)) axes.emplace_back("depth");
      if (axes.empty()) continue;
      const std::string axis = axes[rng.index(axes.size())];
      const bool repeat = std::any_of(out.items.begin(), out.items.end(), [&](const QAItem& q) {
        return q.query.kind == "relation" && q.query.axis == axis &&
               ((q.query.a == a && q.query.b == b) || (q.query.a == b && q.query.b == a));
      });
      if (repeat) continue;

      const std::string& A = names[a];
      const std::string& B = names[b];
      QAItem q = item(QACategory::relationship, "");
      if (axis == "horizontal") {
        q.question = "From the camera's viewpoint, is the " + A + " to the left of or to the right of the " + B + "?";
        q.accepted = has(Relation::left_of) ? std::vector<std::string>{"left of", "to the left"}
                                            : std::vector<std::string>{"right of", "to the right"};
      } else if (axis == "vertical") {
        q.question = "Is the center of the " + A + " above or below the center of the " + B + "?";
        q.accepted = has(Relation::above) ? std::vector<std::string>{"above", "higher"}
                                          : std::vector<std::string>{"below", "lower", "beneath"};
      } else {
        q.question = "As seen from the camera, is the " + A + " in front of or behind the " + B + "?";
        q.accepted = has(Relation::in_front_of)
                         ? std::vector<std::string>{"in front of", "closer"}
                         : std::vector<std::string>{"behind", "farther", "further"};
      }
      q.gt_answer = q.accepted.front();
      q.query.kind = "relation";
      q.query.a = a;
      q.query.b = b;
      q.query.axis = axis;
      push(std::move(q));
      return true;
    }
    return false;
  }

  bool comparison(const std::string& kind) {
    const std::size_t n = scene.objects.size();
    if (n < 2) return false;
    const CameraFrame frame(camera);
    for (int attempt = 0; attempt < kSampleAttempts; ++attempt) {
      const std::size_t a = rng.index(n);
      std::size_t b = rng.index(n - 1);
      if (b >= a) ++b;
      if (!distinguishable(a, b)) continue;
      const SceneObject& A = scene.objects[a];
      const SceneObject& B = scene.objects[b];
      std::size_t winner;
      QAItem q = item(QACategory::comparison, "");
      if (kind == "larger") {
        const double va = scaled_volume(A);
        const double vb = scaled_volume(B);
        if (std::max(va, vb) < (1.0 + kRelationMargin) * std::min(va, vb)) continue;
        winner = va > vb ? a : b;
        q.question = "Which object is larger, the " + names[a] + " or the " + names[b] + "?";
      } else {
        const double da = frame.to_camera(A.position).depth;
        const double db = frame.to_camera(B.position).depth;
        if (std::abs(da - db) <= kRelationMargin) continue;
        winner = da < db ? a : b;
        q.question = "Which object is closer to the camera, the " + names[a] + " or the " + names[b] + "?";
      }
      q.gt_answer = names[winner];
      q.accepted = {names[winner]};
      q.query.kind = kind;
      q.query.a = a;
      q.query.b = b;
      push(std::move(q));
      return true;
    }
    return false;
  }

  bool localization() {
    std::vector<std::size_t> candidates;
    for (std::size_t i = 0; i < scene.objects.size(); ++i) {
      if (unique(i)) candidates.push_back(i);
    }
    if (candidates.empty()) return false;
    const std::size_t i = candidates[rng.index(candidates.size())];
    const Vec3 p = scene.objects[i].position;
    QAItem q = item(QACategory::localization,
                    "What are the (x, y, z) coordinates of the center of the " + names[i] + "?");
    q.location = p;
    q.tolerance = kLocalizationTolerance;
    q.gt_answer = "(" + format_fixed(p.x, 3) + ", " + format_fixed(p.y, 3) + ", " + format_fixed(p.z, 3) + ")";
    q.query.kind = "locate";
    q.query.a = i;
    push(std::move(q));
    return true;
  }

  void substitute(const char* what) {
    out.diagnostics.push_back(scene.scene_id + ": no unambiguous " + std::string(what) +
                              " question; substituted a counting question");
    count_attribute(true);
  }
};

}  // namespace

QAGeneration generate_qa(const Scene& scene, const Camera& camera, std::uint64_t seed) {
  if (scene.objects.empty()) throw Error("QA generation needs at least 1 object");
  validate(camera);
  Builder b(scene, camera, seed);

  b.count_all();
  b.count_attribute(false);
  b.existence_pair();
  for (int i = 0; i < 2; ++i) {
    if (!b.relationship()) b.substitute("relationship");
  }
  const std::string first = b.rng.index(2) == 0 ? "larger" : "closer";
  if (!b.comparison(first) && !b.comparison(first == "larger" ? "closer" : "larger")) {
    b.substitute("comparison");
  }
  if (!b.localization()) b.substitute("localization");
  return std::move(b.out);
}

// --- persistence ---

namespace {

json query_json(const QAQuery& q) {
  json j = {{"kind", q.kind}};
  if (!q.color.empty()) j["color"] = q.color;
  if (!q.class_name.empty()) j["class_name"] = q.class_name;
  if (q.a) j["a"] = *q.a;
  if (q.b) j["b"] = *q.b;
  if (!q.axis.empty()) j["axis"] = q.axis;
  return j;
}

QAQuery query_from(const json& j) {
  QAQuery q;
  q.kind = j.at("kind").get<std::string>();
  q.color = j.value("color", "");
  q.class_name = j.value("class_name", "");
  if (j.contains("a")) q.a = j.at("a").get<std::size_t>();
  if (j.contains("b")) q.b = j.at("b").get<std::size_t>();
  q.axis = j.value("axis", "");
  return q;
}

template <class F>
void for_each_line(std::string_view text, F&& f) {
  std::istringstream in{std::string(text)};
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      f(json::parse(line));
    } catch (const json::exception& e) {
      throw Error("malformed record on line " + std::to_string(n) + ": " + e.what());
    }
  }
}

}  // namespace

std::string qa_items_to_jsonl(const std::vector<QAItem>& items) {
  std::string out;
  for (const auto& q : items) {
    json j = {{"scene_id", q.scene_id},
              {"question_id", q.question_id},
              {"category", std::string(to_string(q.category))},
              {"question", q.question},
              {"gt_answer", q.gt_answer},
              {"tolerance", q.tolerance ? json(*q.tolerance) : json(nullptr)},
              {"query", query_json(q.query)},
              {"substituted", q.substituted}};
    if (!q.accepted.empty()) j["accepted"] = q.accepted;
    if (q.location) j["location"] = {q.location->x, q.location->y, q.location->z};
    out += j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
  }
  return out;
}

std::vector<QAItem> qa_items_from_jsonl(std::string_view text) {
  std::vector<QAItem> items;
  for_each_line(text, [&](const json& j) {
    QAItem q;
    q.scene_id = j.at("scene_id").get<std::string>();
    q.question_id = j.at("question_id").get<std::string>();
    q.category = category_from_name(j.at("category").get<std::string>());
    q.question = j.at("question").get<std::string>();
    q.gt_answer = j.at("gt_answer").get<std::string>();
    if (j.contains("tolerance") && !j.at("tolerance").is_null()) q.tolerance = j.at("tolerance").get<double>();
    if (j.contains("accepted")) q.accepted = j.at("accepted").get<std::vector<std::string>>();
    if (j.contains("location")) {
      const auto& l = j.at("location");
      q.location = Vec3{l.at(0).get<double>(), l.at(1).get<double>(), l.at(2).get<double>()};
    }
    if (j.contains("query")) q.query = query_from(j.at("query"));
    q.substituted = j.value("substituted", false);
    if (q.category == QACategory::counting) q.count = std::stol(q.gt_answer);
    if (q.category == QACategory::existence) q.exists = q.gt_answer == "yes";
    if ((q.category == QACategory::relationship || q.category == QACategory::comparison) &&
        q.accepted.empty()) {
      q.accepted = {q.gt_answer};
    }
    items.push_back(std::move(q));
  });
  return items;
}

std::string judgments_to_jsonl(const std::vector<QAJudgment>& judgments) {
  std::string out;
  for (const auto& jd : judgments) {
    const json j = {{"question_id", jd.question_id},
                    {"category", std::string(to_string(jd.category))},
                    {"correct", jd.correct},
                    {"extracted", jd.extracted},
                    {"rule", jd.rule}};
    out += j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
  }
  return out;
}

std::vector<QAJudgment> judgments_from_jsonl(std::string_view text) {
  std::vector<QAJudgment> out;
  for_each_line(text, [&](const json& j) {
    QAJudgment jd;
    jd.question_id = j.at("question_id").get<std::string>();
    jd.category = category_from_name(j.at("category").get<std::string>());
    jd.correct = j.at("correct").get<bool>();
    jd.extracted = j.at("extracted").get<std::string>();
    jd.rule = j.at("rule").get<std::string>();
    out.push_back(std::move(jd));
  });
  return out;
}

}  // namespace scenecode
