#include <gtest/gtest.h>

#include <set>

#include "scenecode/error.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/scenegen.hpp"
#include "test_support.hpp"

using namespace scenecode;

namespace {

SceneObject obj(std::string cls, std::string color, Vec3 p, Vec3 s = {1, 1, 1}) {
  SceneObject o;
  o.class_name = std::move(cls);
  o.material = std::move(color);
  o.position = p;
  o.scale = s;
  return o;
}

Camera front_camera() {
  Camera c;
  c.position = {0, 2, 8};
  c.target = {0, 0, 0};
  return c;
}

Scene three_objects() {
  Scene s;
  s.scene_id = "three";
  s.objects = {obj("cube", "blue", {-2, 0.5, 0}), obj("cone", "green", {0, 0.5, -2}, {2, 2, 2}),
               obj("cylinder", "blue", {2, 0.5, 1.5})};
  return s;
}

}  // namespace

TEST(QAGeneration, FixedMixOfEight) {
  const QAGeneration g = generate_qa(three_objects(), front_camera(), 1);
  ASSERT_EQ(g.items.size(), static_cast<std::size_t>(kQuestionsPerScene));
  std::map<QACategory, int> n;
  for (const auto& q : g.items) ++n[q.category];
  EXPECT_EQ(n[QACategory::counting], 2);
  EXPECT_EQ(n[QACategory::existence], 2);
  EXPECT_EQ(n[QACategory::relationship], 2);
  EXPECT_EQ(n[QACategory::comparison], 1);
  EXPECT_EQ(n[QACategory::localization], 1);
  EXPECT_EQ(g.items.front().question, "How many objects are in the scene?");
  EXPECT_EQ(g.items.front().gt_answer, "3");
  EXPECT_EQ(*g.items.front().count, 3);
}

TEST(QAGeneration, ExistenceAnswersBothWays) {
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    for (const auto& q : generate_qa(three_objects(), front_camera(), seed).items) {
      if (q.category != QACategory::existence) continue;
      seen.insert(q.gt_answer);
      EXPECT_EQ(q.gt_answer, sct::oracle_answer(three_objects(), front_camera(), q)) << q.question;
      if (q.query.color == "red" && q.query.class_name == "sphere") {
        EXPECT_EQ(q.gt_answer, "no");
      }
    }
  }
  EXPECT_EQ(seen, (std::set<std::string>{"no", "yes"}));
}

TEST(QAGeneration, DescribeNamesColorThenClass) {
  EXPECT_EQ(describe(obj("cube", "red", {})), "red cube");
}

TEST(QAGeneration, SingleObjectSceneSubstitutes) {
  Scene s;
  s.objects = {obj("sphere", "red", {0, 0.5, 0})};
  const QAGeneration g = generate_qa(s, front_camera(), 3);
  ASSERT_EQ(g.items.size(), 8u);
  EXPECT_FALSE(g.diagnostics.empty());
  for (const auto& q : g.items) {
    if (q.category == QACategory::relationship || q.category == QACategory::comparison) ADD_FAILURE();
  }
  EXPECT_THROW(generate_qa(Scene{}, front_camera(), 0), Error);
}

TEST(QAGeneration, Deterministic) {
  EXPECT_EQ(generate_qa(three_objects(), front_camera(), 9).items,
            generate_qa(three_objects(), front_camera(), 9).items);
}

TEST(QAGeneration, OracleAgreesAcrossGeneratedScenes) {
  int checked = 0;
  for (int tier = 1; tier <= 5; ++tier) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      GenConfig g;
      g.tier = tier;
      g.seed = seed;
      const Scene s = generate_scene(g);
      const Camera cam = camera_poses(s, g).front();
      const QAGeneration qa = generate_qa(s, cam, seed * 31 + 7);
      ASSERT_EQ(qa.items.size(), 8u);
      std::set<std::string> ids;
      for (const auto& q : qa.items) {
        EXPECT_TRUE(ids.insert(q.question_id).second);
        EXPECT_EQ(q.scene_id, s.scene_id);
        const std::string want = sct::oracle_answer(s, cam, q);
        if (q.category == QACategory::relationship || q.category == QACategory::comparison) {
          EXPECT_NE(std::find(q.accepted.begin(), q.accepted.end(), want), q.accepted.end())
              << s.scene_id << " " << q.question << " oracle " << want;
          EXPECT_EQ(q.gt_answer, q.accepted.front());
        } else {
          EXPECT_EQ(q.gt_answer, want) << s.scene_id << " " << q.question;
        }
        ++checked;
      }
    }
  }
  EXPECT_EQ(checked, 5 * 20 * 8);
}

TEST(Prompts, InferenceModes) {
  EXPECT_EQ(build_prompt(InferenceMode::direct(), "Q"), "Q\nAnswer concisely.");
  EXPECT_EQ(build_prompt(InferenceMode::nl_cot(), "Q"),
            "Q\n\nThink step-by-step about the objects in the scene, their classes, colours, and "
            "approximate 3-D positions. Then give a concise final answer.");
  const std::string cc = build_prompt(InferenceMode::code_cot(SceneCodeLanguage::threejs), "Q");
  EXPECT_EQ(cc.rfind("First, write a complete Three.js JavaScript reconstruction", 0), 0u);
  EXPECT_NE(cc.find("\n\nQuestion: Q\n"), std::string::npos);
  EXPECT_NE(cc.find("'Final answer:'"), std::string::npos);
  const std::string json = build_prompt(InferenceMode::code_cot(SceneCodeLanguage::canonical_json), "Q");
  EXPECT_NE(json.find(kCanonicalJsonSchema), std::string::npos);
}

TEST(Prompts, ModeNames) {
  for (const auto* name : {"direct", "nl_cot", "code_cot:threejs", "code_cot:scene_dsl"}) {
    EXPECT_EQ(to_string(mode_from_name(name)), name);
  }
  EXPECT_THROW(mode_from_name("code_cot:cobol"), Error);
  EXPECT_THROW(mode_from_name("cot"), Error);
}

TEST(Prompts, Reconstruction) {
  const auto p = build_reconstruction_prompt(SceneCodeLanguage::threejs, SceneDomain::primitive);
  EXPECT_EQ(p.system_text, kReconstructionSystemPrompt);
  EXPECT_NE(p.user_text.find("BoxGeometry, SphereGeometry, CylinderGeometry, ConeGeometry, TorusGeometry"),
            std::string::npos);
  EXPECT_NE(p.user_text.find("from -3.0 to +3.0 in both X and Z"), std::string::npos);
  EXPECT_NE(p.user_text.find("y=0"), std::string::npos);

  const auto j = build_reconstruction_prompt(SceneCodeLanguage::canonical_json, SceneDomain::primitive);
  EXPECT_NE(j.user_text.find(kCanonicalJsonSchema), std::string::npos);

  SceneBounds b{{-4.3, 0, -1}, {2, 2.5, 3}};
  const auto h = build_reconstruction_prompt(SceneCodeLanguage::blender_python, SceneDomain::hypersim, b);
  EXPECT_NE(h.user_text.find("photorealistic indoor scene"), std::string::npos);
  EXPECT_NE(h.user_text.find("X from -4.3 to +2.0"), std::string::npos);
  EXPECT_NE(h.user_text.find("Z from -1.0 to +3.0"), std::string::npos);
  EXPECT_EQ(h.user_text.find("cube, sphere"), std::string::npos);
}

TEST(QAPersistence, JsonlRoundTrip) {
  std::vector<QAItem> all;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    GenConfig g;
    g.tier = 4;
    g.seed = seed;
    const Scene s = generate_scene(g);
    const auto items = generate_qa(s, camera_poses(s, g).front(), seed).items;
    all.insert(all.end(), items.begin(), items.end());
  }
  const std::string text = qa_items_to_jsonl(all);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), static_cast<long>(all.size()));
  EXPECT_EQ(qa_items_from_jsonl(text), all);
  EXPECT_EQ(qa_items_to_jsonl(qa_items_from_jsonl(text)), text);
  EXPECT_THROW(qa_items_from_jsonl("{not json}\n"), Error);
}
