#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "scenecode/hungarian.hpp"
#include "scenecode/scene.hpp"
#include "scenecode/stats.hpp"

namespace scenecode {

// Groups of interchangeable class names. Lookup is case-insensitive and treats
// '_' and '-' like spaces.
class SynonymTable {
 public:
  SynonymTable() = default;

  // One group per line, names separated by commas; '#' starts a comment.
  static SynonymTable parse(std::string_view text);
  static SynonymTable load(const std::string& path);
  // The table shipped as data/synonyms.txt.
  static const SynonymTable& builtin();
  static std::string_view builtin_text();

  void add_group(const std::vector<std::string>& names);
  bool equivalent(std::string_view a, std::string_view b) const;
  std::size_t group_count() const { return group_count_; }

 private:
  std::map<std::string, std::set<std::size_t>> groups_of_;
  std::size_t group_count_ = 0;
};

std::string normalize_synonym_key(std::string_view name);

bool class_match(std::string_view pred_name, std::string_view gt_name,
                 const SynonymTable& table = SynonymTable::builtin());

struct DistanceAcceptance {
  double threshold = 1.0;  // in units of scene_extent(gt)
};

struct IouAcceptance {
  double threshold = 0.5;
};

struct ScoreConfig {
  std::variant<DistanceAcceptance, IouAcceptance> acceptance = DistanceAcceptance{};
  SynonymTable synonyms = SynonymTable::builtin();
  bool require_class_for_tp = false;
};

struct ComponentScores {
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double class_accuracy = 0.0;
  double position_fidelity = 0.0;
  double scale_fidelity = 0.0;
  double d_pos = 0.0;    // unclipped
  double d_scale = 0.0;  // unclipped
  std::size_t matched_count = 0;
  std::size_t true_positives = 0;
};

// max(0, 1 - min(d, 1))
double fidelity_from_distance(double d);

// Throws scenecode::Error("no ground truth") when gt is empty.
ComponentScores component_scores(const Scene& pred, const Scene& gt,
                                 const ScoreConfig& config = {});

// Mean of the five components; each must lie in [0, 1].
double reconstruct_score(double parse_rate, double f1, double class_accuracy,
                         double position_fidelity, double scale_fidelity);

struct SceneScore {
  std::string scene_id;
  std::size_t parsed_object_count = 0;
  bool errored = false;  // client failure; counted as a parse failure
  std::optional<ComponentScores> scores;

  bool parsed() const { return !errored && parsed_object_count > 0; }
  bool matched() const { return parsed() && scores && scores->matched_count > 0; }
};

struct CellAggregate {
  std::size_t n_scenes = 0;
  std::size_t n_parsed = 0;
  std::size_t n_matched = 0;  // scenes with >= 1 Hungarian pair
  std::size_t n_errored = 0;

  double parse_rate = 0.0;
  double f1 = 0.0;  // over all scenes, failures contribute 0
  double class_accuracy = 0.0;
  double position_fidelity = 0.0;
  double scale_fidelity = 0.0;
  double reconstruct_score = 0.0;

  // Alternative convention: F1 over parsed scenes only.
  double f1_parsed_only = 0.0;

  Interval ci_parse_rate;
  Interval ci_f1;
  Interval ci_class_accuracy;
  Interval ci_position_fidelity;
  Interval ci_scale_fidelity;
};

// Scenes are folded in the given order; callers sort by scene_id first.
CellAggregate aggregate_cell(const std::vector<SceneScore>& per_scene,
                             std::uint64_t bootstrap_seed = 0);

// Copy of gt keeping only objects whose center lies inside the camera frustum.
Scene fov_filter(const Scene& gt, const Camera& camera);

}  // namespace scenecode
