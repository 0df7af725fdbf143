#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scenecode/codecs.hpp"
#include "scenecode/harness/client.hpp"
#include "scenecode/harness/snapshot.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/scene.hpp"

namespace scenecode::harness {

struct DecodingConfig {
  double temperature = 0.0;
  int max_tokens_code = 2048;    // reconstruction and Code-CoT
  int max_tokens_nl_cot = 1024;
  int max_tokens_direct = 256;
};

// QA modes as configured; best_cc / worst_cc resolve per model.
enum class QAModeSpec { direct, nl_cot, best_cc, worst_cc };

std::string_view to_string(QAModeSpec m);
QAModeSpec qa_mode_from_name(std::string_view name);

struct RunConfig {
  std::string model_id;
  std::vector<SceneCodeLanguage> languages{kAllLanguages.begin(), kAllLanguages.end()};
  // Reconstruction prompting: direct and/or nl_cot.
  std::vector<ModeKind> reconstruct_modes{ModeKind::direct};
  std::vector<QAModeSpec> qa_modes{QAModeSpec::direct, QAModeSpec::nl_cot, QAModeSpec::best_cc,
                                   QAModeSpec::worst_cc};
  std::optional<std::pair<SceneCodeLanguage, SceneCodeLanguage>> best_worst;  // for *_cc modes
  std::filesystem::path scene_split;  // directory of <scene_id>.json files
  std::size_t n_scenes = 100;
  SceneDomain domain = SceneDomain::primitive;
  DecodingConfig decoding;
  std::uint64_t seed = 0;
  int concurrency = 4;
  double max_failure_fraction = 0.20;
  std::string timestamp;                     // written into snapshots
  std::optional<std::filesystem::path> raw_dir;  // persist raw responses here
};

struct SplitScene {
  Scene scene;
  std::string image_ref;
};

// Scenes sorted by scene_id; image refs follow <split>/images/<scene_id>.png.
std::vector<SplitScene> load_split(const std::filesystem::path& dir, std::size_t n_scenes);

int max_new_tokens(const DecodingConfig& d, ModeKind mode);

// Reconstruction prompt for a mode; nl_cot adds a reasoning prefix instruction.
ReconstructionPrompt reconstruction_prompt_for(SceneCodeLanguage lang, ModeKind mode,
                                               SceneDomain domain, const Scene& gt);

// Channel name under which responses are stored, e.g. "threejs", "threejs.nl_cot",
// "direct", "code_cot-canonical_json".
std::string reconstruct_channel(SceneCodeLanguage lang, ModeKind mode);
std::string qa_channel(const InferenceMode& mode);

std::vector<CellSnapshot> run_reconstruct_eval(const RunConfig& config, ModelClient& client);

std::vector<CellSnapshot> run_qa_eval(const RunConfig& config, const std::vector<QAItem>& qa_set,
                                      ModelClient& client);

// QA set for the split: generate_qa per scene with the scene's camera and a
// seed derived from (config seed, scene_id).
std::vector<QAItem> build_qa_set(const std::vector<SplitScene>& scenes, std::uint64_t seed);

// argmax / argmin of Reconstruct Score over the subset; ties resolved by the
// canonical language order.
std::pair<SceneCodeLanguage, SceneCodeLanguage> select_best_worst_language(
    const std::vector<CellSnapshot>& snapshots, const std::string& model_id,
    const std::vector<SceneCodeLanguage>& subset, ModeKind mode = ModeKind::direct);

std::pair<SceneCodeLanguage, SceneCodeLanguage> select_best_worst_language(
    const std::map<SceneCodeLanguage, double>& scores, const std::vector<SceneCodeLanguage>& subset);

// {Three.js, Canonical JSON, Blender Python, Scene Language DSL}
const std::vector<SceneCodeLanguage>& code_cot_language_subset();

}  // namespace scenecode::harness
