#include <gtest/gtest.h>

#include <json.hpp>

#include "scenecode/harness/client.hpp"
#include "scenecode/harness/replay_store.hpp"
#include "scenecode/harness/report.hpp"
#include "scenecode/harness/run.hpp"
#include "scenecode/harness/snapshot.hpp"
#include "scenecode/geometry.hpp"
#include "scenecode/metrics.hpp"
#include "synth.hpp"
#include "test_support.hpp"

using namespace scenecode;
using namespace std::string_literals;
using namespace scenecode::harness;
namespace fs = std::filesystem;

namespace {

fs::path fixture_split() { return sct::fixture_dir() / "replay" / "split"; }

RunConfig config_for(std::vector<SceneCodeLanguage> langs = {SceneCodeLanguage::threejs}) {
  RunConfig c;
  c.model_id = "m";
  c.languages = std::move(langs);
  c.scene_split = fixture_split();
  c.n_scenes = 10;
  c.timestamp = "t";
  c.concurrency = 3;
  return c;
}

std::shared_ptr<ReplayStore> synth_store(const std::string& name, const RunConfig& c, const std::string& pattern) {
  auto store = std::make_shared<ReplayStore>(sct::scratch_dir(name));
  tools::synth_reconstruction(*store, c, {pattern, 1});
  return store;
}

CellSnapshot only_cell(const std::vector<CellSnapshot>& cells) {
  EXPECT_EQ(cells.size(), 1u);
  return cells.front();
}

std::map<SceneCodeLanguage, double> subset_scores(const sct::LanguageScores& row) { return row.scores; }

sct::LanguageScores table1(const std::string& model) {
  for (const auto& r : sct::table1_rows()) {
    if (r.model == model) return r;
  }
  throw std::runtime_error("no row " + model);
}

}  // namespace

TEST(ReplayStore, RecordLookupMissAndCorruption) {
  ReplayStore store(sct::scratch_dir("store_basic"));
  const ReplayKey k{"model/a", "scene 1", "threejs", prompt_hash("sys", "user")};
  EXPECT_EQ(k.prompt_hash.size(), 16u);
  EXPECT_FALSE(store.contains(k));
  EXPECT_THROW(store.lookup(k), ReplayMiss);
  store.record(k, "bytes\r\n\0x"s);
  EXPECT_EQ(store.lookup(k), "bytes\r\n\0x"s);
  EXPECT_NO_THROW(store.record(k, "bytes\r\n\0x"s));
  EXPECT_THROW(store.record(k, "other"), FixtureCorruption);

  ReplayKey changed = k;
  changed.prompt_hash = prompt_hash("sys", "user v2");
  EXPECT_NE(changed.prompt_hash, k.prompt_hash);
  EXPECT_THROW(store.lookup(changed), ReplayMiss);

  const ReplayKey f{"model/a", "scene 2", "threejs", k.prompt_hash};
  store.record_failure(f, "HTTP 500");
  EXPECT_THROW(store.lookup(f), RecordedFailure);
  EXPECT_EQ(store.keys().size(), 2u);
  EXPECT_EQ(ReplayStore(store.root()).lookup(k), "bytes\r\n\0x"s);
}

TEST(ReplayStore, ClientMapsRecordedFailure) {
  auto store = std::make_shared<ReplayStore>(sct::scratch_dir("store_client"));
  ChatRequest r;
  r.model_id = "m";
  r.item_id = "i";
  r.channel = "direct";
  r.user_text = "q";
  store->record_failure(r.key(), "boom");
  ReplayClient client(store);
  EXPECT_THROW(client.send(r), ClientError);
  r.item_id = "j";
  EXPECT_THROW(client.send(r), ReplayMiss);
}

TEST(Reconstruct, OracleReplayScoresOne) {
  const RunConfig c = config_for();
  ReplayClient client(synth_store("oracle", c, "o"));
  const CellSnapshot s = only_cell(run_reconstruct_eval(c, client));
  ASSERT_TRUE(s.aggregate);
  EXPECT_TRUE(s.valid);
  EXPECT_EQ(s.aggregate->parse_rate, 1.0);
  EXPECT_EQ(s.aggregate->f1, 1.0);
  EXPECT_NEAR(s.aggregate->reconstruct_score, 1.0, 1e-6);
  EXPECT_EQ(s.key(), "m|reconstruct|threejs|direct");
}

TEST(Reconstruct, HalfEmptyReplay) {
  const RunConfig c = config_for();
  ReplayClient client(synth_store("half", c, "oe"));
  const CellSnapshot s = only_cell(run_reconstruct_eval(c, client));
  EXPECT_EQ(s.aggregate->parse_rate, 0.5);
  EXPECT_EQ(s.aggregate->f1, 0.5);
  EXPECT_NEAR(s.aggregate->class_accuracy, 1.0, 1e-12);
}

TEST(Reconstruct, FailureAccounting) {
  const RunConfig c = config_for();
  ReplayClient client(synth_store("accounting", c, "oegfo"));
  const CellSnapshot s = only_cell(run_reconstruct_eval(c, client));
  EXPECT_TRUE(s.valid);
  std::map<SceneStatus, std::size_t> n;
  for (const auto& r : s.reconstruct_rows) ++n[r.status];
  EXPECT_EQ(n[SceneStatus::parsed], 4u);
  EXPECT_EQ(n[SceneStatus::empty], 4u);
  EXPECT_EQ(n[SceneStatus::errored], 2u);
  EXPECT_EQ(n[SceneStatus::parsed] + n[SceneStatus::empty] + n[SceneStatus::errored], s.n_items);
  EXPECT_EQ(s.n_errored, 2u);
  EXPECT_EQ(s.aggregate->parse_rate, 0.4);
}

TEST(Reconstruct, AbortAboveTwentyPercent) {
  RunConfig c = config_for();
  c.concurrency = 1;
  ReplayClient client(synth_store("abort", c, "ooooooofff"));
  const CellSnapshot s = only_cell(run_reconstruct_eval(c, client));
  EXPECT_FALSE(s.valid);
  EXPECT_GE(s.n_errored, 3u);
  EXPECT_EQ(s.reconstruct_rows.size(), 10u);
}

TEST(Reconstruct, MissingFixtureIsAnError) {
  const RunConfig c = config_for();
  ReplayClient client(std::make_shared<ReplayStore>(sct::scratch_dir("empty_store")));
  EXPECT_THROW(run_reconstruct_eval(c, client), ReplayMiss);
}

TEST(Reconstruct, ReplayIsDeterministic) {
  const RunConfig c = config_for({SceneCodeLanguage::threejs, SceneCodeLanguage::scene_dsl});
  ReplayClient client(synth_store("determinism", c, "ocgc"));
  const auto a = run_reconstruct_eval(c, client);
  const auto b = run_reconstruct_eval(c, client);
  ASSERT_EQ(a.size(), 2u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(snapshot_to_json(a[i]), snapshot_to_json(b[i]));
  EXPECT_EQ(snapshot_to_json(snapshot_from_json(snapshot_to_json(a[0]))), snapshot_to_json(a[0]));
}

// Recomputes every parsed row of the committed mixed fixture with brute-force
// matching and folds the cell means by hand.
TEST(Reconstruct, MixedFixtureAgainstIndependentArithmetic) {
  RunConfig c = config_for({SceneCodeLanguage::threejs});
  c.model_id = "fixture-vlm";
  ReplayClient client(std::make_shared<ReplayStore>(sct::fixture_dir() / "replay" / "store"));
  const CellSnapshot s = only_cell(run_reconstruct_eval(c, client));
  const auto split = load_split(c.scene_split, c.n_scenes);

  double parsed = 0, f1 = 0, cls = 0, pos = 0, scl = 0, matched = 0;
  int brute_forced = 0;
  for (std::size_t i = 0; i < split.size(); ++i) {
    const ReconstructRow& row = s.reconstruct_rows[i];
    ASSERT_EQ(row.scene_id, split[i].scene.scene_id);
    if (row.status != SceneStatus::parsed) continue;
    const auto prompt = reconstruction_prompt_for(SceneCodeLanguage::threejs, ModeKind::direct,
                                                  SceneDomain::primitive, split[i].scene);
    const std::string text = client.send({c.model_id, row.scene_id, "threejs", "", prompt.system_text,
                                          prompt.user_text}).text;
    const Scene pred = *parse(SceneCodeLanguage::threejs, text).scene;
    const Scene& gt = split[i].scene;
    const std::size_t rows = pred.objects.size(), cols = gt.objects.size();
    std::vector<double> cost;
    for (const auto& p : pred.objects) {
      for (const auto& g : gt.objects) cost.push_back(norm(p.position - g.position));
    }
    const auto& sc = *row.scores;
    EXPECT_EQ(sc.matched_count, std::min(rows, cols));
    // every synthetic corruption keeps centres well inside one extent
    const double tp = static_cast<double>(std::min(rows, cols));
    const double p = tp / static_cast<double>(rows), r = tp / static_cast<double>(cols);
    EXPECT_NEAR(sc.f1, 2 * p * r / (p + r), 1e-12) << row.scene_id;
    if (std::max(rows, cols) <= 8) {
      EXPECT_LE(sct::brute_force_assignment(cost, rows, cols), tp * sc.d_pos * scene_extent(gt) + 1e-9);
      ++brute_forced;
    }
    parsed += 1;
    f1 += sc.f1;
    cls += sc.class_accuracy;
    pos += sc.position_fidelity;
    scl += sc.scale_fidelity;
    matched += 1;
  }
  EXPECT_GT(brute_forced, 0);
  const double n = static_cast<double>(split.size());
  EXPECT_NEAR(s.aggregate->parse_rate, parsed / n, 1e-12);
  EXPECT_NEAR(s.aggregate->f1, f1 / n, 1e-12);
  EXPECT_NEAR(s.aggregate->class_accuracy, cls / matched, 1e-12);
  EXPECT_NEAR(s.aggregate->position_fidelity, pos / matched, 1e-12);
  EXPECT_NEAR(s.aggregate->scale_fidelity, scl / matched, 1e-12);
  EXPECT_NEAR(s.aggregate->reconstruct_score,
              (parsed / n + f1 / n + cls / matched + pos / matched + scl / matched) / 5.0, 1e-12);
}

TEST(QAEval, WrappedMatchesVerbatimAndOffsetFails) {
  RunConfig c = config_for();
  c.qa_modes = {QAModeSpec::direct};
  const auto qa_set = build_qa_set(load_split(c.scene_split, c.n_scenes), c.seed);
  ASSERT_EQ(qa_set.size(), 80u);
  auto run = [&](const std::string& name, const std::string& pattern) {
    auto store = std::make_shared<ReplayStore>(sct::scratch_dir(name));
    tools::synth_qa(*store, c, qa_set, {pattern, 2});
    ReplayClient client(store);
    return only_cell(run_qa_eval(c, qa_set, client));
  };
  const CellSnapshot verbatim = run("qa_o", "o");
  const CellSnapshot wrapped = run("qa_w", "w");
  EXPECT_EQ(verbatim.qa->overall, 1.0);
  EXPECT_EQ(wrapped.qa->overall, verbatim.qa->overall);
  const CellSnapshot wrong = run("qa_x", "x");
  EXPECT_EQ(wrong.qa->category_accuracy(QACategory::localization), 0.0);
  EXPECT_EQ(wrong.qa->overall, 0.0);
  EXPECT_EQ(verbatim.language, "");
  EXPECT_EQ(verbatim.mode, "direct");
}

TEST(QAEval, CodeCotNeedsSelection) {
  RunConfig c = config_for();
  c.qa_modes = {QAModeSpec::best_cc};
  const auto qa_set = build_qa_set(load_split(c.scene_split, 1), c.seed);
  ReplayClient client(std::make_shared<ReplayStore>(sct::scratch_dir("qa_nosel")));
  EXPECT_THROW(run_qa_eval(c, qa_set, client), Error);
}

TEST(Selection, Table1Rows) {
  const auto& subset = code_cot_language_subset();
  ASSERT_EQ(subset.size(), 4u);
  EXPECT_EQ(select_best_worst_language(subset_scores(table1("Qwen3-VL-8B")), subset),
            std::make_pair(SceneCodeLanguage::canonical_json, SceneCodeLanguage::blender_python));
  EXPECT_EQ(select_best_worst_language(subset_scores(table1("Qwen2.5-VL-7B")), subset).second,
            SceneCodeLanguage::scene_dsl);
  std::map<SceneCodeLanguage, double> flat;
  for (auto l : kAllLanguages) flat[l] = 0.5;
  EXPECT_EQ(select_best_worst_language(flat, subset),
            std::make_pair(SceneCodeLanguage::threejs, SceneCodeLanguage::threejs));
  flat.erase(SceneCodeLanguage::scene_dsl);
  EXPECT_THROW(select_best_worst_language(flat, subset), Error);
}

TEST(Report, LanguageDeltas) {
  for (const auto& row : sct::table1_rows()) {
    const LanguageRow r = language_row(row.model, row.scores);
    EXPECT_NEAR(r.delta, row.delta, 0.001 + 1e-9) << row.model;
  }
  const LanguageRow q = language_row("Qwen2.5-VL-3B", table1("Qwen2.5-VL-3B").scores);
  EXPECT_NEAR(q.delta, 0.346, 1e-9);
  EXPECT_EQ(q.best, SceneCodeLanguage::blender_python);
  EXPECT_EQ(q.worst, SceneCodeLanguage::scene_dsl);
  const LanguageRow single = language_row("one", {{SceneCodeLanguage::threejs, 0.7}});
  EXPECT_EQ(single.delta, 0.0);
}

TEST(Report, FromFixtureSnapshots) {
  const auto cells = read_snapshots(sct::fixture_dir() / "replay" / "golden");
  ASSERT_EQ(cells.size(), 10u);
  const Report r = build_report(cells);
  ASSERT_EQ(r.reconstruct.size(), 1u);
  EXPECT_EQ(r.reconstruct[0].best, SceneCodeLanguage::canonical_json);
  EXPECT_EQ(r.reconstruct[0].worst, SceneCodeLanguage::scene_dsl);
  ASSERT_EQ(r.qa.size(), 1u);
  EXPECT_EQ(r.qa[0].accuracy.size(), 4u);
  ASSERT_TRUE(r.correlation);
  EXPECT_FALSE(r.correlation->vs_relationship);
  const std::string text = render_text(r);
  EXPECT_NE(text.find("fixture-vlm"), std::string::npos);
  EXPECT_TRUE(nlohmann::json::accept(render_json(r)));
}

TEST(LiveClient, RequestShapes) {
  ChatRequest r;
  r.model_id = "m";
  r.system_text = "S";
  r.user_text = "U";
  r.max_new_tokens = 256;
  LiveConfig oa;
  const auto o = nlohmann::json::parse(LiveClient::request_body(oa, r, "QUJD", "image/png"));
  EXPECT_EQ(o["model"], "m");
  EXPECT_EQ(o["max_tokens"], 256);
  EXPECT_EQ(o["temperature"], 0.0);
  EXPECT_EQ(o["messages"][0]["role"], "system");
  EXPECT_EQ(o["messages"][1]["content"][1]["image_url"]["url"], "data:image/png;base64,QUJD");

  LiveConfig an;
  an.provider = Provider::anthropic;
  an.remote_model = "remote";
  const auto a = nlohmann::json::parse(LiveClient::request_body(an, r, "QUJD", "image/png"));
  EXPECT_EQ(a["model"], "remote");
  EXPECT_EQ(a["system"], "S");
  EXPECT_EQ(a["messages"][0]["content"][0]["source"]["data"], "QUJD");
  EXPECT_EQ(a["messages"][0]["content"][1]["text"], "U");

  EXPECT_EQ(LiveClient::response_text(Provider::openai, R"({"choices":[{"message":{"content":"hi"}}]})"), "hi");
  EXPECT_EQ(LiveClient::response_text(Provider::anthropic,
                                      R"({"content":[{"type":"text","text":"a"},{"type":"text","text":"b"}]})"),
            "ab");
  EXPECT_THROW(LiveClient::response_text(Provider::openai, "{}"), ClientError);
}

TEST(LiveClient, Base64) {
  EXPECT_EQ(base64_encode(""), "");
  EXPECT_EQ(base64_encode("f"), "Zg==");
  EXPECT_EQ(base64_encode("fo"), "Zm8=");
  EXPECT_EQ(base64_encode("foobar"), "Zm9vYmFy");
}
