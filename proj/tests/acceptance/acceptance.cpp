// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>

#include "scenecode/codecs.hpp"
#include "scenecode/geometry.hpp"
#include "scenecode/harness/replay_store.hpp"
#include "scenecode/harness/report.hpp"
#include "scenecode/harness/run.hpp"
#include "scenecode/harness/snapshot.hpp"
#include "scenecode/hungarian.hpp"
#include "scenecode/metrics.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/s3ft.hpp"
#include "scenecode/scene_json.hpp"
#include "scenecode/scenegen.hpp"
#include "scenecode/stats.hpp"
#include "test_support.hpp"

using namespace scenecode;
namespace fs = std::filesystem;
namespace t = scenecode::testing;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail = what;
    ok = ok && cond;
  }
};

int failures = 0;

void criterion(const char* name, double budget_s, const std::function<Check()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = body();
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (budget_s > 0 && secs >= budget_s) {
    c.require(false, "over the " + std::to_string(static_cast<int>(budget_s)) + " s budget");
  }
  if (!c.ok) ++failures;
  std::printf("%s  %-34s %7.2fs  %s\n", c.ok ? "PASS" : "FAIL", name, secs, c.detail.c_str());
  std::fflush(stdout);
}

Scene tier_scene(int tier, std::uint64_t seed) {
  GenConfig g;
  g.tier = tier;
  g.seed = seed;
  return generate_scene(g);
}

Camera front(const Scene& s) {
  GenConfig g;
  g.tier = s.tier.value_or(1);
  return camera_poses(s, g).front();
}

Check round_trip() {
  Check c;
  std::size_t cells = 0;
  for (SceneCodeLanguage lang : kAllLanguages) {
    std::vector<SceneScore> rows;
    for (int tier = 1; tier <= 5; ++tier) {
      for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const Scene s = tier_scene(tier, seed);
        ParseOptions opts;
        opts.scene_id = s.scene_id;
        const ParseOutcome back = parse(lang, serialize(lang, s), opts);
        c.require(back.parsed(), std::string(to_string(lang)) + " failed to parse " + s.scene_id);
        if (!back.parsed()) continue;
        c.require(back.scene->objects.size() == s.objects.size() &&
                      std::equal(s.objects.begin(), s.objects.end(), back.scene->objects.begin(),
                                 [](const SceneObject& a, const SceneObject& b) { return approx_equal(a, b, 1e-6); }),
                  std::string(to_string(lang)) + " differs on " + s.scene_id);
        rows.push_back({s.scene_id, back.scene->objects.size(), false, component_scores(*back.scene, s)});
      }
    }
    const CellAggregate a = aggregate_cell(rows);
    c.require(rows.size() == 200 && a.reconstruct_score == 1.0,
              std::string(to_string(lang)) + " score " + format_fixed(a.reconstruct_score, 12));
    ++cells;
  }
  if (c.ok) c.detail = "200 scenes x " + std::to_string(cells) + " languages, every score 1.0";
  return c;
}

Check hungarian() {
  Check c;
  Rng rng(2024);
  for (int i = 0; i < 500; ++i) {
    const std::size_t rows = 1 + rng.index(7), cols = 1 + rng.index(7);
    std::vector<double> cost(rows * cols);
    const bool integer = i % 2 == 0;
    for (auto& v : cost) v = integer ? static_cast<double>(rng.index(5)) : rng.uniform(0, 10);
    const auto a = solve_assignment(cost, rows, cols);
    c.require(t::assignment_cost(cost, rows, cols, a) == t::brute_force_assignment(cost, rows, cols),
              "instance " + std::to_string(i) + " is not optimal");
  }
  if (c.ok) c.detail = "500 instances up to 7x7 optimal";
  return c;
}

Check formulas() {
  Check c;
  const double d[] = {0.0, 0.3, 1.0, 2.5}, f[] = {1.0, 0.7, 0.0, 0.0};
  for (int i = 0; i < 4; ++i) c.require(std::abs(fidelity_from_distance(d[i]) - f[i]) <= 1e-12, "fidelity clip");
  // scale analogue: an object scaled by 1.3 on one axis only
  Scene gt, pred;
  SceneObject a;
  gt.objects = {a};
  a.scale = {1.3, 1.0, 1.0};
  pred.objects = {a};
  const double d_scale = std::sqrt(0.09 / 3.0);
  const ComponentScores s = component_scores(pred, gt);
  c.require(std::abs(s.scale_fidelity - (1.0 - d_scale)) <= 1e-12, "scale fidelity");
  pred.objects[0].scale = {4.0, 4.0, 4.0};
  c.require(component_scores(pred, gt).scale_fidelity == 0.0, "scale clip");
  c.require(std::abs(reconstruct_score(0.8, 0.6, 0.5, 0.7, 0.9) - 0.70) <= 1e-12, "mean of five");
  if (c.ok) c.detail = "clipping, scale analogue, mean of five";
  return c;
}

Check qa_evaluator() {
  Check c;
  const auto cases = t::qa_eval_cases();
  std::set<std::string> rules;
  bool code_cot = false;
  for (const auto& e : cases) {
    const QAJudgment j = judge_response(e.item, e.mode, e.response);
    c.require(j.correct == e.correct && j.rule == e.rule, "fixture " + e.name);
    rules.insert(e.rule);
    code_cot = code_cot || e.mode.kind == ModeKind::code_cot;
  }
  c.require(cases.size() >= 40, "fewer than 40 fixtures");
  for (const char* r : {"marker_integer", "last_integer", "marker_yes_no", "last_yes_no", "committed_segment",
                        "first_three_numbers"}) {
    c.require(rules.count(r) == 1, std::string("no fixture for rule ") + r);
  }
  c.require(code_cot, "no Code-CoT fixture");

  std::size_t symmetric = 0;
  for (std::uint64_t seed = 0; symmetric < 100; ++seed) {
    const Scene s = tier_scene(static_cast<int>(seed % 5) + 1, seed);
    for (const auto& q : generate_qa(s, front(s), seed).items) {
      for (const auto& mode : {InferenceMode::direct(), InferenceMode::nl_cot()}) {
        const QAJudgment bare = judge_response(q, mode, q.gt_answer);
        const QAJudgment wrapped = judge_response(q, mode, "Let me think.\nFinal answer: " + q.gt_answer);
        c.require(bare.correct && wrapped.correct, "asymmetric judgment on " + q.question);
      }
      ++symmetric;
    }
  }
  if (c.ok) c.detail = std::to_string(cases.size()) + " fixtures, " + std::to_string(symmetric) + " symmetric items";
  return c;
}

Check qa_generator() {
  Check c;
  std::size_t items = 0;
  for (int tier = 1; tier <= 5; ++tier) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Scene s = tier_scene(tier, seed);
      const Camera cam = front(s);
      for (const auto& q : generate_qa(s, cam, seed + 100).items) {
        const std::string want = t::oracle_answer(s, cam, q);
        const bool phrase = q.category == QACategory::relationship || q.category == QACategory::comparison;
        const bool ok = phrase ? std::find(q.accepted.begin(), q.accepted.end(), want) != q.accepted.end()
                               : q.gt_answer == want;
        c.require(ok, s.scene_id + ": " + q.question + " gt " + q.gt_answer + " oracle " + want);
        ++items;
      }
    }
  }
  if (c.ok) c.detail = "100 scenes, " + std::to_string(items) + " answers, 0 mismatches";
  return c;
}

Check phase1() {
  Check c;
  const auto cases = t::phase1_cases();
  for (const auto& fc : cases) {
    const FilterVerdict v = phase1_quality_filter(fc.code);
    c.require(v.accepted == fc.accepted && v.reason == fc.reason, fc.name + " -> " + v.reason);
  }
  c.require(cases.size() == 12, "corpus size");
  if (c.ok) c.detail = "12 verdicts exact";
  return c;
}

Check s3ft() {
  Check c;
  std::vector<PseudoGT> gts;
  ViewpointTable views;
  for (int tier = 1; tier <= 5; ++tier) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      GenConfig g;
      g.tier = tier;
      g.seed = seed;
      const Scene s = generate_scene(g);
      PseudoGT p{s.scene_id, s.scene_id + "/v0.png", serialize(SceneCodeLanguage::threejs, s), {}, 0};
      p.parsed = *parse(SceneCodeLanguage::threejs, p.code).scene;
      gts.push_back(std::move(p));
      const auto cams = camera_poses(s, g);
      for (std::size_t v = 0; v < cams.size(); ++v) {
        views[s.scene_id].push_back({static_cast<int>(v), s.scene_id + "/v" + std::to_string(v) + ".png", cams[v]});
      }
    }
  }
  const DatasetSplit single = build_dataset(gts, DatasetMode::single_view, views, 42);
  c.require(single.size() == 2000, "single_view emitted " + std::to_string(single.size()));
  const DatasetSplit cross = build_dataset(gts, DatasetMode::cross_viewpoint, views, 42);
  const double growth = static_cast<double>(cross.size()) / static_cast<double>(single.size());
  c.require(growth >= 3.0 && growth <= 4.0, "growth " + format_fixed(growth, 3));
  for (const auto* d : {&single, &cross}) {
    std::set<std::string> train;
    for (const auto& r : d->train) train.insert(r.scene_id);
    for (const auto& r : d->val) c.require(train.count(r.scene_id) == 0, "scene in both splits: " + r.scene_id);
  }
  const DatasetSplit again = build_dataset(gts, DatasetMode::cross_viewpoint, views, 42);
  c.require(records_to_jsonl(again.train) == records_to_jsonl(cross.train) &&
                records_to_jsonl(again.val) == records_to_jsonl(cross.val) &&
                dataset_manifest(again, DatasetMode::cross_viewpoint) == dataset_manifest(cross, DatasetMode::cross_viewpoint),
            "rebuild differs");
  if (c.ok) c.detail = "2000 records, growth " + format_fixed(growth, 3) + "x, disjoint, reproducible";
  return c;
}

Check paper_fixtures() {
  Check c;
  for (const auto& row : t::table1_rows()) {
    const auto r = harness::language_row(row.model, row.scores);
    c.require(std::abs(r.delta - row.delta) <= 0.001 + 1e-9, row.model + " delta " + format_fixed(r.delta, 4));
  }
  const t::Table10 tab;
  const Correlation rel = correlations(tab.f1, tab.relationship, TiePolicy::ordinal);
  c.require(std::abs(rel.pearson_r - 0.12) <= 0.02, "pearson " + format_fixed(rel.pearson_r, 3));
  c.require(std::abs(rel.spearman_rho - 0.10) <= 0.02, "spearman " + format_fixed(rel.spearman_rho, 3));
  std::map<SceneCodeLanguage, double> qwen3;
  for (const auto& row : t::table1_rows()) {
    if (row.model == "Qwen3-VL-8B") qwen3 = row.scores;
  }
  const auto bw = harness::select_best_worst_language(qwen3, harness::code_cot_language_subset());
  c.require(bw == std::pair{SceneCodeLanguage::canonical_json, SceneCodeLanguage::blender_python},
            "Qwen3-VL-8B selection");
  if (c.ok) {
    c.detail = "14 deltas, r " + format_fixed(rel.pearson_r, 3) + ", rho " + format_fixed(rel.spearman_rho, 3) +
               ", selection (canonical_json, blender_python)";
  }
  return c;
}

Check bootstrap() {
  Check c;
  const std::vector<double> flat(50, 0.3);
  const Interval constant = bootstrap_ci(flat);
  c.require(constant.low == constant.high && constant.low == mean(flat), "constant input did not collapse");
  std::vector<double> v(100, 0.0);
  std::fill(v.begin(), v.begin() + 50, 1.0);
  c.require(bootstrap_ci(v, 1000, 0.95, 5) == bootstrap_ci(v, 1000, 0.95, 5), "seed determinism");
  const Interval i = bootstrap_ci(v);
  const double se = (i.high - i.low) / (2.0 * 1.959963984540054);
  c.require(std::abs(se - 0.05) <= 0.005, "implied SE " + format_fixed(se, 4));
  if (c.ok) c.detail = "implied SE " + format_fixed(se, 4) + " vs analytic 0.0500";
  return c;
}

Check replay() {
  Check c;
  const fs::path fixtures = t::fixture_dir() / "replay";
  const fs::path work = t::scratch_dir("acceptance_replay");
  harness::RunConfig cfg;
  cfg.model_id = "fixture-vlm";
  cfg.scene_split = fixtures / "split";
  cfg.n_scenes = 10;
  cfg.timestamp = "2026-01-01T00:00:00Z";
  harness::ReplayClient client(std::make_shared<harness::ReplayStore>(fixtures / "store"));
  auto cells = harness::run_reconstruct_eval(cfg, client);
  harness::write_snapshots(work, cells);
  cfg.best_worst = harness::select_best_worst_language(harness::read_snapshots(work), cfg.model_id,
                                                        harness::code_cot_language_subset());
  const auto qa_set = qa_items_from_jsonl(t::slurp(cfg.scene_split / "qa.jsonl"));
  for (auto& s : harness::run_qa_eval(cfg, qa_set, client)) cells.push_back(std::move(s));
  std::sort(cells.begin(), cells.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  harness::write_snapshots(work, cells);

  std::size_t compared = 0;
  for (const auto& e : fs::recursive_directory_iterator(fixtures / "golden")) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), fixtures / "golden");
    c.require(fs::exists(work / rel) && t::slurp(work / rel) == t::slurp(e.path()), "differs: " + rel.string());
    ++compared;
  }
  std::size_t produced = 0;
  for (const auto& e : fs::recursive_directory_iterator(work)) produced += e.is_regular_file() ? 1 : 0;
  c.require(produced == compared && compared > 0, "file count " + std::to_string(produced) + " vs " + std::to_string(compared));
  if (c.ok) c.detail = std::to_string(compared) + " snapshot files bytewise identical";
  return c;
}

Check frustum() {
  Check c;
  Camera cam;
  cam.position = {0, 0, 0};
  cam.target = {0, 0, -1};
  const Pixel center = project_to_image(cam, {0, 0, -7});
  c.require(std::abs(center.u - 256) < 1e-9 && std::abs(center.v - 256) < 1e-9, "on-axis point off centre");
  const double half = std::tan(30.0 * std::acos(-1.0) / 180.0) * 10.0;
  c.require(in_frustum(cam, {half - 1e-6, 0, -10}) && !in_frustum(cam, {half + 1e-6, 0, -10}), "horizontal half-fov");
  c.require(in_frustum(cam, {0, -half + 1e-6, -10}) && !in_frustum(cam, {0, -half - 1e-6, -10}), "vertical half-fov");
  c.require(std::abs(project_to_image(cam, {half, 0, -10}).u - 512) < 1e-6, "edge projects to image border");

  Rng rng(17);
  Scene many;
  for (int i = 0; i < 40; ++i) {
    SceneObject o;
    o.position = {rng.uniform(-6, 6), rng.uniform(0, 3), rng.uniform(-6, 6)};
    many.objects.push_back(o);
  }
  Camera base;
  for (int i = 0; i < 100; ++i) {
    Camera k = base;
    k.position = k.position + Vec3{rng.uniform(-2, 2), rng.uniform(-1, 1), rng.uniform(-2, 2)};
    k.fov = rng.uniform(20, 80);
    Camera wide = k;
    wide.fov = std::min(179.0, k.fov + rng.uniform(1, 40));
    const Scene narrow_kept = fov_filter(many, k);
    const Scene wide_kept = fov_filter(many, wide);
    bool subset = true;
    for (const auto& o : narrow_kept.objects) {
      subset = subset && std::find(wide_kept.objects.begin(), wide_kept.objects.end(), o) != wide_kept.objects.end();
    }
    c.require(subset, "perturbation " + std::to_string(i) + " not monotone");
  }
  if (c.ok) c.detail = "centre, half-fov boundaries, 100 perturbations monotone";
  return c;
}

}  // namespace

int main() {
  criterion("round-trip identity", 30, round_trip);
  criterion("hungarian oracle", 10, hungarian);
  criterion("fidelity and score formulas", 0, formulas);
  criterion("qa evaluator conformance", 0, qa_evaluator);
  criterion("qa generator soundness", 0, qa_generator);
  criterion("phase-1 filter", 0, phase1);
  criterion("fine-tuning dataset arithmetic", 0, s3ft);
  criterion("published table arithmetic", 0, paper_fixtures);
  criterion("bootstrap", 0, bootstrap);
  criterion("end-to-end replay", 20, replay);
  criterion("frustum and projection", 0, frustum);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
