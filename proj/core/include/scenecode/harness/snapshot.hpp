#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scenecode/metrics.hpp"
#include "scenecode/qa.hpp"

namespace scenecode::harness {

enum class SceneStatus { parsed, empty, errored };

std::string_view to_string(SceneStatus s);

struct ReconstructRow {
  std::string scene_id;
  SceneStatus status = SceneStatus::empty;
  std::size_t parsed_object_count = 0;
  std::size_t gt_object_count = 0;
  std::optional<ComponentScores> scores;
  std::string error;
};

struct QARow {
  std::string question_id;
  std::string scene_id;
  bool errored = false;
  QAJudgment judgment;
  std::string error;
};

struct CellSnapshot {
  std::string model_id;
  std::string task;      // "reconstruct" | "qa"
  std::string language;  // reconstruction language, or the Code-CoT language
  std::string mode;      // "direct", "nl_cot", "best_cc", "worst_cc"
  std::optional<CellAggregate> aggregate;  // reconstruct
  std::optional<QAAccuracy> qa;            // qa
  std::vector<ReconstructRow> reconstruct_rows;
  std::vector<QARow> qa_rows;
  std::size_t n_items = 0;
  std::size_t n_errored = 0;
  int retries = 0;
  bool valid = true;
  std::string toolkit_version;
  std::string timestamp;

  // Key used in the wide table: "<model>|<task>|<language>|<mode>".
  std::string key() const;
};

std::string snapshot_to_json(const CellSnapshot& s);
CellSnapshot snapshot_from_json(const std::string& text);

// The wide table: one row per cell with components, score, CIs and counts.
std::string aggregate_table_json(const std::vector<CellSnapshot>& snapshots);

// Writes <dir>/aggregate.json and <dir>/cells/<key>.json. Returns written paths.
std::vector<std::filesystem::path> write_snapshots(const std::filesystem::path& dir,
                                                   const std::vector<CellSnapshot>& snapshots);
std::vector<CellSnapshot> read_snapshots(const std::filesystem::path& dir);

}  // namespace scenecode::harness
