#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scenecode/codecs.hpp"
#include "scenecode/scene.hpp"

namespace scenecode {

struct PseudoGT {
  std::string scene_id;
  std::string image_ref;
  std::string code;  // accepted Three.js text
  Scene parsed;
  int viewpoint = 0;
};

// Task tags, in emission order.
inline constexpr std::string_view kTaskCount = "count";
inline constexpr std::string_view kTaskClasses = "classes";
inline constexpr std::string_view kTaskPositions = "positions_3d";
inline constexpr std::string_view kTaskBBox3D = "bbox_3d";
inline constexpr std::string_view kTaskBBox2D = "bbox_2d";
inline constexpr std::string_view kTaskRelations = "relations";
inline constexpr std::string_view kTaskDepthOrder = "depth_order";
inline constexpr std::string_view kTaskSceneGraph = "scene_graph";
inline constexpr std::string_view kTaskCodegen = "codegen";
inline constexpr std::string_view kTaskQA = "qa";
inline constexpr std::string_view kTaskDescription = "description";
inline constexpr std::string_view kTaskParaphrase = "codegen_paraphrase";

const std::vector<std::string_view>& structured_task_tags();

struct TrainingRecord {
  std::string record_id;  // shared by replicas; (record_id, viewpoint) is unique
  std::string scene_id;
  int viewpoint = 0;
  std::string image_ref;
  std::string task_tag;
  std::string prompt;
  std::string target;
  bool view_invariant = false;

  bool operator==(const TrainingRecord&) const = default;
};

// The nine structured tasks, all computed from the parsed pseudo-GT scene.
std::vector<TrainingRecord> derive_structured_tasks(const PseudoGT& p, const Camera& camera);

// 8 QA records, 1 description and 2 code-generation paraphrases.
std::vector<TrainingRecord> generate_nl_signals(const PseudoGT& p, const Camera& camera,
                                                std::uint64_t seed,
                                                std::vector<std::string>* diagnostics = nullptr);

struct Viewpoint {
  int index = 0;
  std::string image_ref;
  Camera camera;
};

// scene_id -> rendered viewpoints of that scene
using ViewpointTable = std::map<std::string, std::vector<Viewpoint>>;

enum class DatasetMode { single_view, cross_viewpoint };

std::string_view to_string(DatasetMode mode);

inline constexpr std::uint64_t kDefaultSplitSeed = 42;
inline constexpr double kValidationFraction = 0.10;

struct DatasetSplit {
  std::vector<TrainingRecord> train;
  std::vector<TrainingRecord> val;
  std::uint64_t seed = kDefaultSplitSeed;
  std::vector<std::string> diagnostics;

  std::size_t size() const { return train.size() + val.size(); }
};

// single_view: 20 records per pseudo-GT. cross_viewpoint additionally copies
// every view-invariant record onto each other viewpoint and re-derives the
// view-dependent structured and QA targets with that viewpoint's camera.
// Scenes are split 90/10 by scene_id.
DatasetSplit build_dataset(const std::vector<PseudoGT>& pseudo_gts, DatasetMode mode,
                           const ViewpointTable& viewpoints, std::uint64_t seed = kDefaultSplitSeed);

struct RawOutput {
  std::string scene_id;
  std::string image_ref;
  std::string code;
  int viewpoint = 0;
};

struct CurationReport {
  std::size_t total = 0;
  std::size_t accepted = 0;
  std::map<std::string, std::size_t> rejections;  // reason -> count

  double pass_rate() const { return total == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(total); }
};

struct CurationResult {
  std::vector<PseudoGT> accepted;
  CurationReport report;
};

// Quality filter, then parse; "parse_failed" when no object is recovered.
CurationResult phase1_curate(const std::vector<RawOutput>& raw_outputs);

std::string records_to_jsonl(const std::vector<TrainingRecord>& records);
std::vector<TrainingRecord> records_from_jsonl(std::string_view text);

// Counts per split and task tag, pass rate, seed and toolkit version.
std::string dataset_manifest(const DatasetSplit& split, DatasetMode mode,
                             const CurationReport* report = nullptr);

}  // namespace scenecode
