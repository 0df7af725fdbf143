#include "synth.hpp"

#include "scenecode/codecs.hpp"
#include "scenecode/error.hpp"
#include "scenecode/rng.hpp"
#include "scenecode/scene_json.hpp"

namespace scenecode::tools {

using harness::ChatRequest;
using harness::ReplayStore;

namespace {

constexpr std::string_view kGarbled = "I am not able to produce code for this image.\nThe scene looks abstract.";

char kind_at(const SynthSpec& spec, std::size_t i) {
  if (spec.pattern.empty()) throw Error("empty synth pattern");
  return spec.pattern[i % spec.pattern.size()];
}

Scene corrupt(const Scene& gt, std::uint64_t seed) {
  Scene s = gt;
  Rng rng(fnv1a64(gt.scene_id, seed));
  if (s.objects.size() > 1) s.objects.pop_back();
  for (auto& o : s.objects) {
    o.position.x += rng.uniform(-0.3, 0.3);
    o.position.z += rng.uniform(-0.3, 0.3);
    o.scale = o.scale * rng.uniform(0.8, 1.25);
  }
  if (!s.objects.empty()) {
    auto& first = s.objects.front();
    first.class_name = first.class_name == "sphere" ? "cube" : "sphere";
  }
  return s;
}

std::string wrong_answer(const QAItem& q) {
  switch (q.category) {
    case QACategory::counting: return std::to_string(q.count.value_or(0) + 1);
    case QACategory::existence: return q.exists.value_or(false) ? "no" : "yes";
    case QACategory::localization: {
      const Vec3 p = q.location.value_or(Vec3{}) + Vec3{0.2, 0.0, 0.0};
      return "(" + format_fixed(p.x, 3) + ", " + format_fixed(p.y, 3) + ", " + format_fixed(p.z, 3) + ")";
    }
    default: return "I cannot tell.";
  }
}

void store_kind(ReplayStore& store, const ChatRequest& req, char kind, const std::string& oracle,
                const std::string& corrupted, const std::string& wrong) {
  switch (kind) {
    case 'o': store.record(req.key(), oracle); return;
    case 'w': store.record(req.key(), "Let me look at the scene step by step.\n\nFinal answer: " + oracle); return;
    case 'c':
      if (corrupted.empty()) throw Error("pattern letter 'c' applies to reconstruction only");
      store.record(req.key(), corrupted);
      return;
    case 'x':
      if (wrong.empty()) throw Error("pattern letter 'x' applies to QA only");
      store.record(req.key(), wrong);
      return;
    case 'e': store.record(req.key(), ""); return;
    case 'g': store.record(req.key(), kGarbled); return;
    case 'f': store.record_failure(req.key(), "synthetic client failure"); return;
    default: throw Error(std::string("unknown synth pattern letter: ") + kind);
  }
}

}  // namespace

std::size_t synth_reconstruction(ReplayStore& store, const harness::RunConfig& config, const SynthSpec& spec) {
  const auto scenes = harness::load_split(config.scene_split, config.n_scenes);
  std::size_t n = 0;
  for (ModeKind mode : config.reconstruct_modes) {
    for (SceneCodeLanguage lang : config.languages) {
      const std::string channel = harness::reconstruct_channel(lang, mode);
      for (std::size_t i = 0; i < scenes.size(); ++i) {
        const Scene& gt = scenes[i].scene;
        const auto prompt = harness::reconstruction_prompt_for(lang, mode, config.domain, gt);
        const ChatRequest req{config.model_id, gt.scene_id, channel, scenes[i].image_ref,
                              prompt.system_text, prompt.user_text, config.decoding.max_tokens_code,
                              config.decoding.temperature};
        const char kind = kind_at(spec, i);
        std::string code = "```\n" + serialize(lang, gt, {.box_fallback = true}) + "```\n";
        std::string bad = kind == 'c' ? "```\n" + serialize(lang, corrupt(gt, spec.seed), {.box_fallback = true}) + "```\n"
                                      : std::string("-");
        if (kind == 'w') {
          store.record(req.key(), "The image shows " + std::to_string(gt.objects.size()) +
                                      " objects on a ground plane.\n\n" + code);
        } else {
          store_kind(store, req, kind, code, bad, {});
        }
        ++n;
      }
    }
  }
  return n;
}

std::size_t synth_qa(ReplayStore& store, const harness::RunConfig& config, const std::vector<QAItem>& qa_set,
                     const SynthSpec& spec) {
  std::size_t n = 0;
  for (harness::QAModeSpec m : config.qa_modes) {
    InferenceMode mode = InferenceMode::direct();
    if (m == harness::QAModeSpec::nl_cot) mode = InferenceMode::nl_cot();
    if (m == harness::QAModeSpec::best_cc || m == harness::QAModeSpec::worst_cc) {
      if (!config.best_worst) throw Error("code-CoT QA modes need a best/worst language selection");
      mode = InferenceMode::code_cot(m == harness::QAModeSpec::best_cc ? config.best_worst->first
                                                                       : config.best_worst->second);
    }
    const std::string channel = harness::qa_channel(mode);
    for (std::size_t i = 0; i < qa_set.size(); ++i) {
      const QAItem& q = qa_set[i];
      const ChatRequest req{config.model_id, q.question_id, channel, "", "", build_prompt(mode, q.question),
                            harness::max_new_tokens(config.decoding, mode.kind), config.decoding.temperature};
      store_kind(store, req, kind_at(spec, i), q.gt_answer, {}, wrong_answer(q));
      ++n;
    }
  }
  return n;
}

}  // namespace scenecode::tools
