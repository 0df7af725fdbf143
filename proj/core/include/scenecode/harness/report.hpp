#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenecode/codecs.hpp"
#include "scenecode/harness/snapshot.hpp"
#include "scenecode/stats.hpp"

namespace scenecode::harness {

struct LanguageRow {
  std::string model_id;
  std::map<SceneCodeLanguage, double> scores;
  std::optional<SceneCodeLanguage> best;
  std::optional<SceneCodeLanguage> worst;
  double delta = 0.0;  // max - min
};

// Best/worst marks (ties by canonical language order) and the max-min gap.
LanguageRow language_row(std::string model_id, const std::map<SceneCodeLanguage, double>& scores);

struct QAModeRow {
  std::string model_id;
  std::map<std::string, double> accuracy;  // mode -> overall accuracy
  std::optional<double> delta_best_direct;  // best_cc - direct, percentage points
};

struct CorrelationBlock {
  std::vector<std::string> models;
  std::vector<double> reconstruct_f1;   // mean over languages
  std::vector<double> qa_relationship;  // direct-mode relationship accuracy
  std::vector<double> qa_overall;
  std::optional<Correlation> vs_relationship;
  std::optional<Correlation> vs_overall;
};

struct Report {
  std::vector<LanguageRow> reconstruct;  // direct-mode cells
  std::vector<QAModeRow> qa;
  std::optional<CorrelationBlock> correlation;
};

Report build_report(const std::vector<CellSnapshot>& snapshots);

std::string render_text(const Report& report);
std::string render_json(const Report& report);

}  // namespace scenecode::harness
