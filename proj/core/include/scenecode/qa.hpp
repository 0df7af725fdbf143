#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scenecode/codecs.hpp"
#include "scenecode/scene.hpp"

namespace scenecode {

enum class QACategory { localization, relationship, counting, existence, comparison };

inline constexpr std::array<QACategory, 5> kAllCategories = {
    QACategory::localization, QACategory::relationship, QACategory::counting,
    QACategory::existence, QACategory::comparison};

std::string_view to_string(QACategory c);
QACategory category_from_name(std::string_view name);

inline constexpr double kLocalizationTolerance = 0.1;
inline constexpr int kQuestionsPerScene = 8;
inline constexpr std::string_view kQATemplatesVersion = "qa-templates-v1";

// Structured parameters of a question, enough for an independent oracle to
// recompute the answer from the scene graph.
struct QAQuery {
  // count_all | count_color | count_class | exists | relation | larger | closer | locate
  std::string kind;
  std::string color;
  std::string class_name;
  std::optional<std::size_t> a;
  std::optional<std::size_t> b;
  std::string axis;  // relation only: horizontal | vertical | depth

  bool operator==(const QAQuery&) const = default;
};

struct QAItem {
  std::string scene_id;
  std::string question_id;
  QACategory category = QACategory::counting;
  std::string question;
  std::string gt_answer;              // canonical answer text
  std::vector<std::string> accepted;  // relationship/comparison phrases, canonical first
  std::optional<long> count;          // counting
  std::optional<bool> exists;         // existence
  std::optional<Vec3> location;       // localization
  std::optional<double> tolerance;    // localization only
  QAQuery query;
  bool substituted = false;  // stands in for a question that could not be posed unambiguously

  bool operator==(const QAItem&) const = default;
};

struct QAGeneration {
  std::vector<QAItem> items;
  std::vector<std::string> diagnostics;
};

// "red cube"; the phrase every template uses to name an object.
std::string describe(const SceneObject& obj);

// Fixed mix of 2 counting, 2 existence, 2 relationship, 1 comparison and
// 1 localization question. Questions that cannot be posed unambiguously (or at
// all, in a single-object scene) become extra counting questions flagged in
// the diagnostics. Needs >= 1 object. Deterministic in seed.
QAGeneration generate_qa(const Scene& scene, const Camera& camera, std::uint64_t seed);

// --- inference modes and prompts ---

enum class ModeKind { direct, nl_cot, code_cot };

struct InferenceMode {
  ModeKind kind = ModeKind::direct;
  std::optional<SceneCodeLanguage> language;  // set iff kind == code_cot

  static InferenceMode direct() { return {ModeKind::direct, std::nullopt}; }
  static InferenceMode nl_cot() { return {ModeKind::nl_cot, std::nullopt}; }
  static InferenceMode code_cot(SceneCodeLanguage lang) { return {ModeKind::code_cot, lang}; }

  bool operator==(const InferenceMode&) const = default;
};

// "direct", "nl_cot", "code_cot:threejs"
std::string to_string(const InferenceMode& mode);
InferenceMode mode_from_name(std::string_view name);

std::string build_prompt(const InferenceMode& mode, std::string_view question);

// Rendering of a language inside the Code-CoT prompt.
std::string code_cot_language_text(SceneCodeLanguage lang);

enum class SceneDomain { primitive, hypersim };

struct SceneBounds {
  Vec3 min{-3.0, 0.0, -3.0};
  Vec3 max{3.0, 3.0, 3.0};
};

struct ReconstructionPrompt {
  std::string system_text;
  std::string user_text;
};

extern const std::string_view kReconstructionSystemPrompt;
extern const std::string_view kCanonicalJsonSchema;

ReconstructionPrompt build_reconstruction_prompt(SceneCodeLanguage lang, SceneDomain domain,
                                                 const SceneBounds& bounds = {});

// --- answer evaluation ---

// Text after the last "Final answer:" marker (markdown emphasis tolerated);
// without a marker, the last two non-empty lines.
std::string extract_final_answer(std::string_view response);

struct QAJudgment {
  std::string question_id;
  QACategory category = QACategory::counting;
  bool correct = false;
  std::string extracted;
  std::string rule;

  bool operator==(const QAJudgment&) const = default;
};

QAJudgment evaluate_qa_answer(const QAItem& item, std::string_view response);

// Applies the Code-CoT pre-extraction before judging when mode is code_cot.
QAJudgment judge_response(const QAItem& item, const InferenceMode& mode,
                          std::string_view response);

struct QAAccuracy {
  std::size_t total = 0;
  std::size_t correct = 0;
  double overall = 0.0;
  std::map<QACategory, std::pair<std::size_t, std::size_t>> per_category;  // (correct, total)

  double category_accuracy(QACategory c) const;
};

QAAccuracy qa_cell_accuracy(const std::vector<QAJudgment>& judgments);

// --- persistence (one JSON object per line) ---

std::string qa_items_to_jsonl(const std::vector<QAItem>& items);
std::vector<QAItem> qa_items_from_jsonl(std::string_view text);
std::string judgments_to_jsonl(const std::vector<QAJudgment>& judgments);
std::vector<QAJudgment> judgments_from_jsonl(std::string_view text);

}  // namespace scenecode
