#include "scenecode/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "scenecode/error.hpp"
#include "scenecode/geometry.hpp"

namespace scenecode {

namespace detail {
extern const std::string_view kBuiltinSynonyms;
}

std::string normalize_synonym_key(std::string_view name) {
  std::string out;
  bool space = false;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c) || ch == '_' || ch == '-') {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

SynonymTable SynonymTable::parse(std::string_view text) {
  SynonymTable table;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<std::string> names;
    std::istringstream fields(line);
    std::string name;
    while (std::getline(fields, name, ',')) {
      std::string key = normalize_synonym_key(name);
      if (!key.empty()) names.push_back(std::move(key));
    }
    if (!names.empty()) table.add_group(names);
  }
  return table;
}

SynonymTable SynonymTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read synonym table: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string_view SynonymTable::builtin_text() { return detail::kBuiltinSynonyms; }

const SynonymTable& SynonymTable::builtin() {
  static const SynonymTable table = parse(detail::kBuiltinSynonyms);
  return table;
}

void SynonymTable::add_group(const std::vector<std::string>& names) {
  const std::size_t id = group_count_++;
  for (const auto& n : names) groups_of_[normalize_synonym_key(n)].insert(id);
}

bool SynonymTable::equivalent(std::string_view a, std::string_view b) const {
  const std::string ka = normalize_synonym_key(a);
  const std::string kb = normalize_synonym_key(b);
  if (ka == kb) return true;
  const auto ia = groups_of_.find(ka);
  const auto ib = groups_of_.find(kb);
  if (ia == groups_of_.end() || ib == groups_of_.end()) return false;
  for (std::size_t g : ia->second) {
    if (ib->second.count(g)) return true;
  }
  return false;
}

bool class_match(std::string_view pred_name, std::string_view gt_name, const SynonymTable& table) {
  return table.equivalent(pred_name, gt_name);
}

double fidelity_from_distance(double d) { return std::max(0.0, 1.0 - std::min(d, 1.0)); }

ComponentScores component_scores(const Scene& pred, const Scene& gt, const ScoreConfig& config) {
  if (gt.objects.empty()) throw Error("no ground truth");
  ComponentScores s;
  if (pred.objects.empty()) return s;

  std::vector<Vec3> pp, gp;
  for (const auto& o : pred.objects) pp.push_back(o.position);
  for (const auto& o : gt.objects) gp.push_back(o.position);
  const MatchResult match = hungarian_match(pp, gp);
  const double extent = scene_extent(gt);

  std::size_t tp = 0;
  std::size_t class_hits = 0;
  double sq_dist = 0.0;
  double scale_err = 0.0;
  for (const auto& pair : match.pairs) {
    const SceneObject& p = pred.objects[pair.pred];
    const SceneObject& g = gt.objects[pair.gt];
    const bool same_class = class_match(p.class_name, g.class_name, config.synonyms);
    if (same_class) ++class_hits;

    bool accepted = false;
    if (const auto* d = std::get_if<DistanceAcceptance>(&config.acceptance)) {
      accepted = pair.distance <= d->threshold * extent;
    } else {
      const auto& iou_mode = std::get<IouAcceptance>(config.acceptance);
      accepted = iou(object_aabb(p), object_aabb(g)) >= iou_mode.threshold;
    }
    if (accepted && (!config.require_class_for_tp || same_class)) ++tp;

    sq_dist += pair.distance * pair.distance;
    const Vec3 ds = p.scale - g.scale;
    scale_err += std::sqrt(dot(ds, ds) / 3.0);
  }

  const double n_pairs = static_cast<double>(match.pairs.size());
  s.matched_count = match.pairs.size();
  s.true_positives = tp;
  s.precision = static_cast<double>(tp) / static_cast<double>(pred.objects.size());
  s.recall = static_cast<double>(tp) / static_cast<double>(gt.objects.size());
  s.f1 = tp == 0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
  if (s.matched_count > 0) {
    s.class_accuracy = static_cast<double>(class_hits) / n_pairs;
    s.d_pos = std::sqrt(sq_dist / n_pairs) / extent;
    s.d_scale = scale_err / n_pairs;
    s.position_fidelity = fidelity_from_distance(s.d_pos);
    s.scale_fidelity = fidelity_from_distance(s.d_scale);
  }
  return s;
}

double reconstruct_score(double parse_rate, double f1, double class_accuracy,
                         double position_fidelity, double scale_fidelity) {
  for (double v : {parse_rate, f1, class_accuracy, position_fidelity, scale_fidelity}) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("score component outside [0, 1]");
  }
  return (parse_rate + f1 + class_accuracy + position_fidelity + scale_fidelity) / 5.0;
}

namespace {

Interval ci_or_point(const std::vector<double>& values, std::uint64_t seed) {
  if (values.empty()) return {};
  if (values.size() < 2) return {values.front(), values.front()};
  return bootstrap_ci(values, kBootstrapResamples, kBootstrapLevel, seed);
}

}  // namespace

CellAggregate aggregate_cell(const std::vector<SceneScore>& per_scene, std::uint64_t bootstrap_seed) {
  CellAggregate a;
  a.n_scenes = per_scene.size();
  if (per_scene.empty()) return a;

  std::vector<double> parse, f1_all, f1_parsed, cls, pos, scl;
  for (const auto& s : per_scene) {
    if (s.errored) ++a.n_errored;
    const bool parsed = s.parsed();
    parse.push_back(parsed ? 1.0 : 0.0);
    const double f1 = parsed && s.scores ? s.scores->f1 : 0.0;
    f1_all.push_back(f1);
    if (parsed) {
      ++a.n_parsed;
      f1_parsed.push_back(f1);
    }
    if (s.matched()) {
      ++a.n_matched;
      cls.push_back(s.scores->class_accuracy);
      pos.push_back(s.scores->position_fidelity);
      scl.push_back(s.scores->scale_fidelity);
    }
  }

  a.parse_rate = mean(parse);
  a.f1 = mean(f1_all);
  a.f1_parsed_only = mean(f1_parsed);
  a.class_accuracy = mean(cls);
  a.position_fidelity = mean(pos);
  a.scale_fidelity = mean(scl);
  a.reconstruct_score =
      reconstruct_score(a.parse_rate, a.f1, a.class_accuracy, a.position_fidelity, a.scale_fidelity);

  a.ci_parse_rate = ci_or_point(parse, bootstrap_seed);
  a.ci_f1 = ci_or_point(f1_all, bootstrap_seed + 1);
  a.ci_class_accuracy = ci_or_point(cls, bootstrap_seed + 2);
  a.ci_position_fidelity = ci_or_point(pos, bootstrap_seed + 3);
  a.ci_scale_fidelity = ci_or_point(scl, bootstrap_seed + 4);
  return a;
}

Scene fov_filter(const Scene& gt, const Camera& camera) {
  Scene out = gt;
  out.objects.clear();
  for (const auto& o : gt.objects) {
    if (in_frustum(camera, o.position)) out.objects.push_back(o);
  }
  return out;
}

}  // namespace scenecode
