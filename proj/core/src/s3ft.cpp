#include "scenecode/s3ft.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <array>
#include <set>
#include <sstream>

#include "scenecode/error.hpp"
#include "scenecode/geometry.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/rng.hpp"
#include "scenecode/scene_json.hpp"
#include "scenecode/scenegen.hpp"
#include "scenecode/version.hpp"

namespace scenecode {

using nlohmann::json;

const std::vector<std::string_view>& structured_task_tags() {
  static const std::vector<std::string_view> tags = {
      kTaskCount,     kTaskClasses,    kTaskPositions,  kTaskBBox3D,  kTaskBBox2D,
      kTaskRelations, kTaskDepthOrder, kTaskSceneGraph, kTaskCodegen};
  return tags;
}

std::string_view to_string(DatasetMode mode) {
  return mode == DatasetMode::single_view ? "single_view" : "cross_viewpoint";
}

namespace {

constexpr std::string_view kPromptCount = "How many objects are in this image? Answer with a single integer.";
constexpr std::string_view kPromptClasses =
    "List the class of every object in this image as a JSON array of class names, sorted alphabetically.";
constexpr std::string_view kPromptPositions =
    "Give the 3D scene-coordinate position of every object in this image as JSON.";
constexpr std::string_view kPromptBBox3D =
    "Give the axis-aligned 3D bounding box of every object in this image as JSON.";
constexpr std::string_view kPromptBBox2D =
    "Give the 2D pixel bounding box [u_min, v_min, u_max, v_max] of every object in this 512x512 image as JSON.";
constexpr std::string_view kPromptRelations =
    "List the spatial relations between every pair of objects in this image as JSON.";
constexpr std::string_view kPromptDepth =
    "Order the objects in this image from nearest to farthest from the camera as JSON.";
constexpr std::string_view kPromptSceneGraph =
    "Write the scene graph of this image (objects and their spatial relations) as JSON.";
constexpr std::string_view kPromptDescription =
    "Describe this scene, naming the color, class and approximate position of every object.";
constexpr std::array<std::string_view, 2> kParaphrases = {
    "Write Three.js code that recreates the scene in this image, with one mesh per object and its "
    "position, rotation, scale and color.",
    "Using Three.js, rebuild this 3D scene as code: add a correctly placed, scaled and colored "
    "primitive mesh for every object you see.",
};

double r3(double v) {
  const double r = std::round(v * 1000.0) / 1000.0;
  return r == 0.0 ? 0.0 : r;
}

json vec(const Vec3& v) { return json::array({r3(v.x), r3(v.y), r3(v.z)}); }

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

json object_json(const SceneObject& o, std::size_t id) {
  return {{"id", id}, {"class", o.class_name}, {"material", o.material}};
}

json relations_json(const Scene& s, const Camera& camera) {
  json out = json::array();
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    for (std::size_t j = i + 1; j < s.objects.size(); ++j) {
      for (Relation r : spatial_relations(s.objects[i], s.objects[j], camera)) {
        if (r == Relation::closer_than || r == Relation::farther_than) continue;
        out.push_back({{"subject", i}, {"object", j}, {"relation", std::string(to_string(r))}});
      }
    }
  }
  return out;
}

// Bounds of the projected AABB corners in front of the camera, clamped to
// the image; objects entirely behind the camera are omitted.
json bbox2d_json(const Scene& s, const Camera& camera) {
  const CameraFrame frame(camera);
  json out = json::array();
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const AABB box = object_aabb(s.objects[i]);
    double u0 = INFINITY, v0 = INFINITY, u1 = -INFINITY, v1 = -INFINITY;
    for (int c = 0; c < 8; ++c) {
      const Vec3 p{(c & 1) ? box.max.x : box.min.x, (c & 2) ? box.max.y : box.min.y,
                   (c & 4) ? box.max.z : box.min.z};
      if (!(frame.to_camera(p).depth > 1e-9)) continue;
      const Pixel px = project_to_image(camera, p, kRenderSize);
      u0 = std::min(u0, px.u);
      v0 = std::min(v0, px.v);
      u1 = std::max(u1, px.u);
      v1 = std::max(v1, px.v);
    }
    if (!std::isfinite(u0)) continue;
    const double lim = static_cast<double>(kRenderSize);
    auto clamp = [&](double x) { return r3(std::clamp(x, 0.0, lim)); };
    json o = object_json(s.objects[i], i);
    o["bbox"] = {clamp(u0), clamp(v0), clamp(u1), clamp(v1)};
    out.push_back(std::move(o));
  }
  return out;
}

TrainingRecord record(const PseudoGT& p, std::string_view tag, std::string_view prompt,
                      std::string target, bool invariant, std::string suffix = {}) {
  TrainingRecord r;
  r.record_id = p.scene_id + "/" + std::string(tag) + suffix;
  r.scene_id = p.scene_id;
  r.viewpoint = p.viewpoint;
  r.image_ref = p.image_ref;
  r.task_tag = std::string(tag);
  r.prompt = std::string(prompt);
  r.target = std::move(target);
  r.view_invariant = invariant;
  return r;
}

std::string coarse(double v) { return format_fixed(std::round(v * 10.0) / 10.0 == 0.0 ? 0.0 : std::round(v * 10.0) / 10.0, 1); }

std::string description(const Scene& s) {
  std::ostringstream os;
  const std::size_t n = s.objects.size();
  os << "The scene contains " << n << (n == 1 ? " object" : " objects") << ":";
  for (std::size_t i = 0; i < n; ++i) {
    const SceneObject& o = s.objects[i];
    os << (i == 0 ? " " : (i + 1 == n ? ", and " : ", ")) << "a " << describe(o) << " near ("
       << coarse(o.position.x) << ", " << coarse(o.position.y) << ", " << coarse(o.position.z) << ")";
  }
  os << ".";
  return os.str();
}

std::vector<TrainingRecord> view_dependent_structured(const PseudoGT& p, const Camera& camera) {
  const Scene& s = p.parsed;
  std::vector<TrainingRecord> out;
  json boxes = json::array();
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    const AABB b = object_aabb(s.objects[i]);
    json o = object_json(s.objects[i], i);
    o["min"] = vec(b.min);
    o["max"] = vec(b.max);
    boxes.push_back(std::move(o));
  }
  out.push_back(record(p, kTaskBBox3D, kPromptBBox3D, dump(boxes), false));
  out.push_back(record(p, kTaskBBox2D, kPromptBBox2D, dump(bbox2d_json(s, camera)), false));
  out.push_back(record(p, kTaskRelations, kPromptRelations, dump(relations_json(s, camera)), false));
  json order = json::array();
  for (std::size_t i : depth_order(s, camera)) order.push_back(i);
  out.push_back(record(p, kTaskDepthOrder, kPromptDepth, dump(order), false));
  json graph;
  graph["objects"] = json::array();
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    json o = object_json(s.objects[i], i);
    o["position"] = vec(s.objects[i].position);
    graph["objects"].push_back(std::move(o));
  }
  graph["relations"] = relations_json(s, camera);
  out.push_back(record(p, kTaskSceneGraph, kPromptSceneGraph, dump(graph), false));
  return out;
}

bool qa_view_invariant(const QAItem& q) {
  const std::string& k = q.query.kind;
  if (k == "relation") return q.query.axis == "vertical";
  return k != "closer";
}

std::uint64_t scene_seed(std::uint64_t seed, const std::string& scene_id) { return fnv1a64(scene_id, seed ^ 0x9e3779b97f4a7c15ULL); }

// Answer of a camera-dependent QA item under another camera, or nothing when
// the answer is ambiguous from there.
std::optional<std::string> reanswer(const QAItem& q, const Scene& s, const Camera& camera) {
  if (!q.query.a || !q.query.b || *q.query.a >= s.objects.size() || *q.query.b >= s.objects.size()) {
    return std::nullopt;
  }
  const SceneObject& a = s.objects[*q.query.a];
  const SceneObject& b = s.objects[*q.query.b];
  if (q.query.kind == "closer") {
    const CameraFrame f(camera);
    const double da = f.to_camera(a.position).depth;
    const double db = f.to_camera(b.position).depth;
    if (std::abs(da - db) <= kRelationMargin) return std::nullopt;
    return describe(da < db ? a : b);
  }
  const auto rels = spatial_relations(a, b, camera);
  auto has = [&](Relation r) { return std::find(rels.begin(), rels.end(), r) != rels.end(); };
  if (q.query.axis == "horizontal") {
    if (has(Relation::left_of)) return std::string("left of");
    if (has(Relation::right_of)) return std::string("right of");
  } else if (q.query.axis == "depth") {
    if (has(Relation::in_front_of)) return std::string("in front of");
    if (has(Relation::behind)) return std::string("behind");
  }
  return std::nullopt;
}

}  // namespace

std::vector<TrainingRecord> derive_structured_tasks(const PseudoGT& p, const Camera& camera) {
  validate(camera);
  const Scene& s = p.parsed;
  std::vector<TrainingRecord> out;
  out.push_back(record(p, kTaskCount, kPromptCount, std::to_string(s.objects.size()), true));

  std::vector<std::string> classes;
  for (const auto& o : s.objects) classes.push_back(o.class_name);
  std::sort(classes.begin(), classes.end());
  out.push_back(record(p, kTaskClasses, kPromptClasses, dump(json(classes)), true));

  json positions = json::array();
  for (std::size_t i = 0; i < s.objects.size(); ++i) {
    json o = object_json(s.objects[i], i);
    o["position"] = vec(s.objects[i].position);
    positions.push_back(std::move(o));
  }
  out.push_back(record(p, kTaskPositions, kPromptPositions, dump(positions), true));

  for (auto& r : view_dependent_structured(p, camera)) out.push_back(std::move(r));

  const ReconstructionPrompt prompt =
      build_reconstruction_prompt(SceneCodeLanguage::threejs, SceneDomain::primitive);
  out.push_back(record(p, kTaskCodegen, prompt.user_text, p.code, false));
  return out;
}

std::vector<TrainingRecord> generate_nl_signals(const PseudoGT& p, const Camera& camera,
                                                std::uint64_t seed,
                                                std::vector<std::string>* diagnostics) {
  const QAGeneration qa = generate_qa(p.parsed, camera, seed);
  if (diagnostics) diagnostics->insert(diagnostics->end(), qa.diagnostics.begin(), qa.diagnostics.end());
  std::vector<TrainingRecord> out;
  for (std::size_t i = 0; i < qa.items.size(); ++i) {
    const QAItem& q = qa.items[i];
    out.push_back(record(p, kTaskQA, q.question, q.gt_answer, qa_view_invariant(q), "/" + std::to_string(i)));
  }
  out.push_back(record(p, kTaskDescription, kPromptDescription, description(p.parsed), true));
  for (std::size_t i = 0; i < kParaphrases.size(); ++i) {
    out.push_back(record(p, kTaskParaphrase, kParaphrases[i], p.code, false, "/" + std::to_string(i)));
  }
  return out;
}

DatasetSplit build_dataset(const std::vector<PseudoGT>& pseudo_gts, DatasetMode mode,
                           const ViewpointTable& viewpoints, std::uint64_t seed) {
  if (pseudo_gts.size() < 10) throw Error("dataset needs at least 10 pseudo-ground-truth scenes");
  std::vector<const PseudoGT*> ordered;
  for (const auto& p : pseudo_gts) ordered.push_back(&p);
  std::stable_sort(ordered.begin(), ordered.end(), [](const PseudoGT* a, const PseudoGT* b) {
    return a->scene_id != b->scene_id ? a->scene_id < b->scene_id : a->viewpoint < b->viewpoint;
  });

  DatasetSplit split;
  split.seed = seed;
  std::vector<TrainingRecord> records;
  for (const PseudoGT* p : ordered) {
    const auto views = viewpoints.find(p->scene_id);
    if (views == viewpoints.end()) throw Error("viewpoint table has no entry for scene " + p->scene_id);
    const auto own = std::find_if(views->second.begin(), views->second.end(),
                                  [&](const Viewpoint& v) { return v.index == p->viewpoint; });
    if (own == views->second.end()) {
      throw Error("viewpoint table lacks viewpoint " + std::to_string(p->viewpoint) + " of scene " + p->scene_id);
    }

    const QAGeneration qa = generate_qa(p->parsed, own->camera, scene_seed(seed, p->scene_id));
    std::vector<TrainingRecord> base = derive_structured_tasks(*p, own->camera);
    for (auto& r : generate_nl_signals(*p, own->camera, scene_seed(seed, p->scene_id), &split.diagnostics)) {
      base.push_back(std::move(r));
    }
    records.insert(records.end(), base.begin(), base.end());
    if (mode == DatasetMode::single_view) continue;

    for (const Viewpoint& v : views->second) {
      if (v.index == p->viewpoint) continue;
      PseudoGT other = *p;
      other.viewpoint = v.index;
      other.image_ref = v.image_ref;
      const std::string suffix = "@v" + std::to_string(v.index);
      for (const auto& r : base) {
        if (!r.view_invariant) continue;
        TrainingRecord copy = r;
        copy.viewpoint = v.index;
        copy.image_ref = v.image_ref;
        records.push_back(std::move(copy));
      }
      for (auto& r : view_dependent_structured(other, v.camera)) {
        r.record_id += suffix;
        records.push_back(std::move(r));
      }
      for (std::size_t i = 0; i < qa.items.size(); ++i) {
        const QAItem& q = qa.items[i];
        if (qa_view_invariant(q)) continue;
        const auto answer = reanswer(q, p->parsed, v.camera);
        if (!answer) continue;
        TrainingRecord r = record(other, kTaskQA, q.question, *answer, false, "/" + std::to_string(i) + suffix);
        records.push_back(std::move(r));
      }
    }
  }

  std::vector<std::string> scenes;
  for (const PseudoGT* p : ordered) {
    if (scenes.empty() || scenes.back() != p->scene_id) scenes.push_back(p->scene_id);
  }
  Rng rng(seed);
  rng.shuffle(scenes);
  const auto n_val = static_cast<std::size_t>(std::llround(kValidationFraction * static_cast<double>(scenes.size())));
  std::set<std::string> val(scenes.begin(), scenes.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, n_val)));
  for (auto& r : records) (val.count(r.scene_id) ? split.val : split.train).push_back(std::move(r));
  return split;
}

CurationResult phase1_curate(const std::vector<RawOutput>& raw_outputs) {
  CurationResult result;
  for (const auto& raw : raw_outputs) {
    ++result.report.total;
    const FilterVerdict verdict = phase1_quality_filter(raw.code);
    if (!verdict.accepted) {
      ++result.report.rejections[verdict.reason];
      continue;
    }
    ParseOptions opts;
    opts.scene_id = raw.scene_id;
    ParseOutcome parsed = parse(SceneCodeLanguage::threejs, raw.code, opts);
    if (!parsed.parsed()) {
      ++result.report.rejections["parse_failed"];
      continue;
    }
    ++result.report.accepted;
    result.accepted.push_back({raw.scene_id, raw.image_ref, raw.code, std::move(*parsed.scene), raw.viewpoint});
  }
  return result;
}

std::string records_to_jsonl(const std::vector<TrainingRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    const json j = {{"record_id", r.record_id}, {"scene_id", r.scene_id},   {"viewpoint", r.viewpoint},
                    {"image_ref", r.image_ref}, {"task_tag", r.task_tag},   {"prompt", r.prompt},
                    {"target", r.target},       {"view_invariant", r.view_invariant}};
    out += dump(j) + "\n";
  }
  return out;
}

std::vector<TrainingRecord> records_from_jsonl(std::string_view text) {
  std::vector<TrainingRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      TrainingRecord r;
      r.record_id = j.at("record_id").get<std::string>();
      r.scene_id = j.at("scene_id").get<std::string>();
      r.viewpoint = j.at("viewpoint").get<int>();
      r.image_ref = j.at("image_ref").get<std::string>();
      r.task_tag = j.at("task_tag").get<std::string>();
      r.prompt = j.at("prompt").get<std::string>();
      r.target = j.at("target").get<std::string>();
      r.view_invariant = j.at("view_invariant").get<bool>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(std::string("malformed training record: ") + e.what());
    }
  }
  return out;
}

std::string dataset_manifest(const DatasetSplit& split, DatasetMode mode, const CurationReport* report) {
  json j;
  j["mode"] = std::string(to_string(mode));
  j["seed"] = split.seed;
  j["toolkit_version"] = std::string(toolkit_version());
  auto counts = [](const std::vector<TrainingRecord>& rs) {
    json c = json::object();
    for (const auto& r : rs) c[r.task_tag] = c.value(r.task_tag, 0) + 1;
    return c;
  };
  j["train"] = {{"records", split.train.size()}, {"by_task", counts(split.train)}};
  j["val"] = {{"records", split.val.size()}, {"by_task", counts(split.val)}};
  std::set<std::string> train_scenes, val_scenes;
  for (const auto& r : split.train) train_scenes.insert(r.scene_id);
  for (const auto& r : split.val) val_scenes.insert(r.scene_id);
  j["train"]["scenes"] = train_scenes.size();
  j["val"]["scenes"] = val_scenes.size();
  if (report) {
    j["curation"] = {{"total", report->total},
                     {"accepted", report->accepted},
                     {"pass_rate", report->pass_rate()},
                     {"rejections", report->rejections}};
  }
  return j.dump(2) + "\n";
}

}  // namespace scenecode
