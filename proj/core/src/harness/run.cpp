#include "scenecode/harness/run.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "scenecode/error.hpp"
#include "scenecode/metrics.hpp"
#include "scenecode/rng.hpp"
#include "scenecode/scene_json.hpp"
#include "scenecode/scenegen.hpp"
#include "scenecode/version.hpp"

namespace scenecode::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::string_view kNlCotReconstructionPrefix =
    "Before writing any code, describe the objects you see step by step: their classes, colours, "
    "sizes and approximate 3-D positions. Then output the complete code in a single code block.";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_raw(const RunConfig& config, const std::string& channel, const std::string& item,
               const std::string& text) {
  if (!config.raw_dir) return;
  const fs::path dir = *config.raw_dir / path_component(config.model_id) / path_component(channel);
  fs::create_directories(dir);
  std::ofstream out(dir / (path_component(item) + ".txt"), std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write raw response under " + dir.string());
  out << text;
}

struct Outcome {
  bool done = false;
  bool failed = false;
  std::string text;
  std::string error;
  int retries = 0;
};

// Sends requests[i] with up to `concurrency` workers. Client failures are
// recorded per item; once they exceed the allowed fraction the remaining
// items are left undone. Anything other than a ClientError is rethrown.
std::vector<Outcome> dispatch(const std::vector<ChatRequest>& requests, ModelClient& client,
                              int concurrency, double max_failure_fraction, bool& aborted) {
  const std::size_t n = requests.size();
  std::vector<Outcome> out(n);
  const auto limit = static_cast<std::size_t>(max_failure_fraction * static_cast<double>(n));
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  std::atomic<bool> stop{false};
  std::exception_ptr fatal;
  std::mutex fatal_mutex;

  auto worker = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      Outcome& o = out[i];
      try {
        ChatResponse r = client.send(requests[i]);
        o.text = std::move(r.text);
        o.retries = r.retries;
      } catch (const ClientError& e) {
        o.failed = true;
        o.error = e.what();
        if (failures.fetch_add(1) + 1 > limit) stop.store(true);
      } catch (...) {
        std::lock_guard lock(fatal_mutex);
        if (!fatal) fatal = std::current_exception();
        stop.store(true);
        return;
      }
      o.done = true;
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, concurrency));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (fatal) std::rethrow_exception(fatal);
  aborted = failures.load() > limit;
  return out;
}

fs::path image_ref_for(const fs::path& split, const std::string& scene_id) {
  return split / "images" / (scene_id + ".png");
}

std::size_t language_rank(SceneCodeLanguage lang) {
  const auto it = std::find(kAllLanguages.begin(), kAllLanguages.end(), lang);
  return static_cast<std::size_t>(it - kAllLanguages.begin());
}

}  // namespace

std::string_view to_string(QAModeSpec m) {
  switch (m) {
    case QAModeSpec::direct: return "direct";
    case QAModeSpec::nl_cot: return "nl_cot";
    case QAModeSpec::best_cc: return "best_cc";
    case QAModeSpec::worst_cc: return "worst_cc";
  }
  return "direct";
}

QAModeSpec qa_mode_from_name(std::string_view name) {
  for (auto m : {QAModeSpec::direct, QAModeSpec::nl_cot, QAModeSpec::best_cc, QAModeSpec::worst_cc}) {
    if (to_string(m) == name) return m;
  }
  throw Error("unknown QA mode: " + std::string(name));
}

std::vector<SplitScene> load_split(const fs::path& dir, std::size_t n_scenes) {
  if (!fs::is_directory(dir)) throw Error("scene split not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::vector<SplitScene> scenes;
  for (const auto& f : files) {
    Scene s = scene_from_json(read_file(f));
    if (s.scene_id.empty() || s.scene_id == "scene") s.scene_id = f.stem().string();
    std::string ref = image_ref_for(dir, s.scene_id).string();
    scenes.push_back({std::move(s), std::move(ref)});
  }
  std::sort(scenes.begin(), scenes.end(),
            [](const SplitScene& a, const SplitScene& b) { return a.scene.scene_id < b.scene.scene_id; });
  if (n_scenes > scenes.size()) {
    throw Error("n_scenes " + std::to_string(n_scenes) + " exceeds split size " +
                std::to_string(scenes.size()));
  }
  scenes.resize(n_scenes);
  return scenes;
}

int max_new_tokens(const DecodingConfig& d, ModeKind mode) {
  switch (mode) {
    case ModeKind::direct: return d.max_tokens_direct;
    case ModeKind::nl_cot: return d.max_tokens_nl_cot;
    case ModeKind::code_cot: return d.max_tokens_code;
  }
  return d.max_tokens_code;
}

ReconstructionPrompt reconstruction_prompt_for(SceneCodeLanguage lang, ModeKind mode, SceneDomain domain,
                                               const Scene& gt) {
  SceneBounds bounds;
  if (domain == SceneDomain::hypersim && gt.extent) bounds = {gt.extent->min, gt.extent->max};
  ReconstructionPrompt p = build_reconstruction_prompt(lang, domain, bounds);
  if (mode == ModeKind::nl_cot) p.user_text += "\n\n" + std::string(kNlCotReconstructionPrefix);
  if (mode == ModeKind::code_cot) throw Error("code_cot is a QA mode");
  return p;
}

std::string reconstruct_channel(SceneCodeLanguage lang, ModeKind mode) {
  std::string c(to_string(lang));
  if (mode == ModeKind::nl_cot) c += ".nl_cot";
  return c;
}

std::string qa_channel(const InferenceMode& mode) {
  if (mode.kind == ModeKind::code_cot) return "code_cot-" + std::string(to_string(*mode.language));
  return to_string(mode);
}

std::vector<CellSnapshot> run_reconstruct_eval(const RunConfig& config, ModelClient& client) {
  if (config.decoding.max_tokens_code <= 0) throw Error("decoding limits must be positive");
  const auto scenes = load_split(config.scene_split, config.n_scenes);
  std::vector<CellSnapshot> cells;
  for (ModeKind mode : config.reconstruct_modes) {
    for (SceneCodeLanguage lang : config.languages) {
      const std::string channel = reconstruct_channel(lang, mode);
      std::vector<ChatRequest> requests;
      for (const auto& s : scenes) {
        const auto prompt = reconstruction_prompt_for(lang, mode, config.domain, s.scene);
        requests.push_back({config.model_id, s.scene.scene_id, channel, s.image_ref, prompt.system_text,
                            prompt.user_text, config.decoding.max_tokens_code, config.decoding.temperature});
      }
      bool aborted = false;
      const auto outcomes =
          dispatch(requests, client, config.concurrency, config.max_failure_fraction, aborted);

      CellSnapshot cell;
      cell.model_id = config.model_id;
      cell.task = "reconstruct";
      cell.language = std::string(to_string(lang));
      cell.mode = to_string(InferenceMode{mode, std::nullopt});
      cell.toolkit_version = std::string(toolkit_version());
      cell.timestamp = config.timestamp;
      cell.n_items = scenes.size();
      cell.valid = !aborted;

      std::vector<SceneScore> per_scene;
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        const Scene& raw_gt = scenes[i].scene;
        const Outcome& o = outcomes[i];
        ReconstructRow row;
        row.scene_id = raw_gt.scene_id;
        SceneScore score;
        score.scene_id = raw_gt.scene_id;
        cell.retries += o.retries;
        if (!o.done || o.failed) {
          row.status = SceneStatus::errored;
          row.error = o.done ? o.error : "not attempted: run aborted";
          row.gt_object_count = raw_gt.objects.size();
          score.errored = true;
          ++cell.n_errored;
        } else {
          write_raw(config, channel, raw_gt.scene_id, o.text);
          const Scene gt = config.domain == SceneDomain::hypersim && raw_gt.camera
                               ? fov_filter(raw_gt, *raw_gt.camera)
                               : raw_gt;
          row.gt_object_count = gt.objects.size();
          ParseOutcome parsed = parse(lang, o.text, {.scene_id = raw_gt.scene_id});
          row.parsed_object_count = parsed.scene ? parsed.parsed_object_count : 0;
          score.parsed_object_count = row.parsed_object_count;
          if (row.parsed_object_count > 0) {
            row.status = SceneStatus::parsed;
            if (gt.objects.empty()) {
              row.error = "no ground-truth object in view";
            } else {
              row.scores = component_scores(*parsed.scene, gt);
              score.scores = row.scores;
            }
          } else {
            row.status = SceneStatus::empty;
            for (const auto& d : parsed.diagnostics) {
              if (d.severity == Severity::error) {
                row.error = d.message;
                break;
              }
            }
          }
        }
        cell.reconstruct_rows.push_back(std::move(row));
        per_scene.push_back(std::move(score));
      }
      cell.aggregate = aggregate_cell(per_scene, config.seed);
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<QAItem> build_qa_set(const std::vector<SplitScene>& scenes, std::uint64_t seed) {
  std::vector<QAItem> items;
  for (const auto& s : scenes) {
    const Camera camera = s.scene.camera ? *s.scene.camera : camera_poses(s.scene, GenConfig{}).front();
    auto gen = generate_qa(s.scene, camera, fnv1a64(s.scene.scene_id, seed ^ 0xcbf29ce484222325ULL));
    for (auto& item : gen.items) items.push_back(std::move(item));
  }
  return items;
}

std::vector<CellSnapshot> run_qa_eval(const RunConfig& config, const std::vector<QAItem>& qa_set,
                                      ModelClient& client) {
  std::vector<CellSnapshot> cells;
  for (QAModeSpec spec : config.qa_modes) {
    InferenceMode mode = InferenceMode::direct();
    switch (spec) {
      case QAModeSpec::direct: break;
      case QAModeSpec::nl_cot: mode = InferenceMode::nl_cot(); break;
      case QAModeSpec::best_cc:
      case QAModeSpec::worst_cc:
        if (!config.best_worst) throw Error("code-CoT QA modes need a best/worst language selection");
        mode = InferenceMode::code_cot(spec == QAModeSpec::best_cc ? config.best_worst->first
                                                                   : config.best_worst->second);
        break;
    }
    const std::string channel = qa_channel(mode);
    const int tokens = max_new_tokens(config.decoding, mode.kind);
    if (tokens <= 0) throw Error("decoding limits must be positive");
    std::vector<ChatRequest> requests;
    for (const auto& q : qa_set) {
      requests.push_back({config.model_id, q.question_id, channel,
                          image_ref_for(config.scene_split, q.scene_id).string(), "",
                          build_prompt(mode, q.question), tokens, config.decoding.temperature});
    }
    bool aborted = false;
    const auto outcomes = dispatch(requests, client, config.concurrency, config.max_failure_fraction, aborted);

    CellSnapshot cell;
    cell.model_id = config.model_id;
    cell.task = "qa";
    cell.language = mode.language ? std::string(to_string(*mode.language)) : "";
    cell.mode = std::string(to_string(spec));
    cell.toolkit_version = std::string(toolkit_version());
    cell.timestamp = config.timestamp;
    cell.n_items = qa_set.size();
    cell.valid = !aborted;

    std::vector<QAJudgment> judgments;
    for (std::size_t i = 0; i < qa_set.size(); ++i) {
      const QAItem& q = qa_set[i];
      const Outcome& o = outcomes[i];
      cell.retries += o.retries;
      QARow row;
      row.question_id = q.question_id;
      row.scene_id = q.scene_id;
      if (!o.done || o.failed) {
        row.errored = true;
        row.error = o.done ? o.error : "not attempted: run aborted";
        row.judgment = {q.question_id, q.category, false, "", "errored"};
        ++cell.n_errored;
      } else {
        write_raw(config, channel, q.question_id, o.text);
        row.judgment = judge_response(q, mode, o.text);
      }
      judgments.push_back(row.judgment);
      cell.qa_rows.push_back(std::move(row));
    }
    cell.qa = qa_cell_accuracy(judgments);
    cells.push_back(std::move(cell));
  }
  return cells;
}

const std::vector<SceneCodeLanguage>& code_cot_language_subset() {
  static const std::vector<SceneCodeLanguage> subset{SceneCodeLanguage::threejs, SceneCodeLanguage::canonical_json,
                                                     SceneCodeLanguage::blender_python,
                                                     SceneCodeLanguage::scene_dsl};
  return subset;
}

std::pair<SceneCodeLanguage, SceneCodeLanguage> select_best_worst_language(
    const std::map<SceneCodeLanguage, double>& scores, const std::vector<SceneCodeLanguage>& subset) {
  if (subset.empty()) throw Error("empty language subset");
  std::vector<SceneCodeLanguage> ordered = subset;
  std::sort(ordered.begin(), ordered.end(),
            [](auto a, auto b) { return language_rank(a) < language_rank(b); });
  std::optional<std::pair<SceneCodeLanguage, double>> best, worst;
  for (auto lang : ordered) {
    const auto it = scores.find(lang);
    if (it == scores.end()) throw Error("missing cell for language " + std::string(to_string(lang)));
    if (!best || it->second > best->second) best = {lang, it->second};
    if (!worst || it->second < worst->second) worst = {lang, it->second};
  }
  return {best->first, worst->first};
}

std::pair<SceneCodeLanguage, SceneCodeLanguage> select_best_worst_language(
    const std::vector<CellSnapshot>& snapshots, const std::string& model_id,
    const std::vector<SceneCodeLanguage>& subset, ModeKind mode) {
  const std::string mode_name = to_string(InferenceMode{mode, std::nullopt});
  std::map<SceneCodeLanguage, double> scores;
  for (const auto& s : snapshots) {
    if (s.model_id != model_id || s.task != "reconstruct" || s.mode != mode_name || !s.aggregate) continue;
    scores[language_from_name(s.language)] = s.aggregate->reconstruct_score;
  }
  return select_best_worst_language(scores, subset);
}

}  // namespace scenecode::harness
