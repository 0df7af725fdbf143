#include <gtest/gtest.h>

#include <cmath>

#include "scenecode/error.hpp"
#include "scenecode/metrics.hpp"
#include "scenecode/scenegen.hpp"

using namespace scenecode;

namespace {

SceneObject obj(std::string cls, Vec3 p, Vec3 s = {1, 1, 1}) {
  SceneObject o;
  o.class_name = std::move(cls);
  o.position = p;
  o.scale = s;
  return o;
}

Scene scene_of(std::vector<SceneObject> objs) {
  Scene s;
  s.objects = std::move(objs);
  return s;
}

Scene three_far_apart() {
  return scene_of({obj("cube", {0, 0, 0}), obj("sphere", {4, 0, 0}), obj("cone", {0, 0, 4})});
}

}  // namespace

TEST(Fidelity, ClippedLinear) {
  EXPECT_EQ(fidelity_from_distance(0.0), 1.0);
  EXPECT_NEAR(fidelity_from_distance(0.3), 0.7, 1e-12);
  EXPECT_EQ(fidelity_from_distance(1.0), 0.0);
  EXPECT_EQ(fidelity_from_distance(2.5), 0.0);
}

TEST(ReconstructScore, MeanOfComponents) {
  EXPECT_NEAR(reconstruct_score(0.8, 0.6, 0.5, 0.7, 0.9), 0.70, 1e-12);
  EXPECT_THROW(reconstruct_score(1.2, 0.6, 0.5, 0.7, 0.9), Error);
  EXPECT_THROW(reconstruct_score(0.8, -0.1, 0.5, 0.7, 0.9), Error);
  EXPECT_THROW(reconstruct_score(0.8, 0.6, NAN, 0.7, 0.9), Error);
}

TEST(Synonyms, BuiltinGroups) {
  EXPECT_TRUE(class_match("box", "cube"));
  EXPECT_TRUE(class_match("Cube", "cube"));
  EXPECT_TRUE(class_match("bedside_table", "Nightstand"));
  EXPECT_FALSE(class_match("cone", "cylinder"));
  EXPECT_FALSE(class_match("sofa", "lamp"));
  const SynonymTable t = SynonymTable::parse("a, b  # comment\n\n c ,D\n");
  EXPECT_EQ(t.group_count(), 2u);
  EXPECT_TRUE(t.equivalent("A", "b"));
  EXPECT_TRUE(t.equivalent("d", "c"));
  EXPECT_FALSE(t.equivalent("a", "c"));
}

TEST(ComponentScores, Perfect) {
  const Scene gt = three_far_apart();
  const ComponentScores s = component_scores(gt, gt);
  EXPECT_EQ(s.f1, 1.0);
  EXPECT_EQ(s.class_accuracy, 1.0);
  EXPECT_EQ(s.position_fidelity, 1.0);
  EXPECT_EQ(s.scale_fidelity, 1.0);
  EXPECT_EQ(s.matched_count, 3u);
}

TEST(ComponentScores, OneOfThreeRejectedGivesTwoThirds) {
  const Scene gt = three_far_apart();
  // extent = |(4, 0, 4)| = 5.657; the third prediction lands 8 away
  const Scene pred = scene_of({obj("box", {0, 0, 0}), obj("cube", {4, 0, 0}), obj("cone", {0, 0, 12})});
  const ComponentScores s = component_scores(pred, gt);
  EXPECT_EQ(s.true_positives, 2u);
  EXPECT_NEAR(s.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.class_accuracy, 2.0 / 3.0, 1e-12);
  const double extent = std::sqrt(32.0);
  EXPECT_NEAR(s.d_pos, std::sqrt(64.0 / 3.0) / extent, 1e-12);
  EXPECT_NEAR(s.position_fidelity, 1.0 - std::sqrt(64.0 / 3.0) / extent, 1e-12);
}

TEST(ComponentScores, MissingPredictionAndScaleError) {
  const Scene gt = three_far_apart();
  const Scene pred = scene_of({obj("cube", {0, 0, 0}, {1.3, 1, 1}), obj("sphere", {4, 0, 0}, {1, 1.6, 1})});
  const ComponentScores s = component_scores(pred, gt);
  EXPECT_EQ(s.precision, 1.0);
  EXPECT_NEAR(s.recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(s.f1, 0.8, 1e-12);
  const double d_scale = (std::sqrt(0.09 / 3.0) + std::sqrt(0.36 / 3.0)) / 2.0;
  EXPECT_NEAR(s.d_scale, d_scale, 1e-12);
  EXPECT_NEAR(s.scale_fidelity, 1.0 - d_scale, 1e-12);
}

TEST(ComponentScores, EmptyPredictionAndEmptyGt) {
  const ComponentScores s = component_scores(Scene{}, three_far_apart());
  EXPECT_EQ(s.f1, 0.0);
  EXPECT_EQ(s.matched_count, 0u);
  EXPECT_THROW(component_scores(three_far_apart(), Scene{}), Error);
}

TEST(ComponentScores, IouAcceptance) {
  const Scene gt = scene_of({obj("cube", {0, 0, 0})});
  ScoreConfig cfg;
  cfg.acceptance = IouAcceptance{0.5};
  // overlap 0.7 x 1 x 1 over union 1.3
  EXPECT_EQ(component_scores(scene_of({obj("cube", {0.3, 0, 0})}), gt, cfg).true_positives, 1u);
  // 0.4 / 1.6 = 0.25
  EXPECT_EQ(component_scores(scene_of({obj("cube", {0.6, 0, 0})}), gt, cfg).true_positives, 0u);
}

TEST(ComponentScores, ClassRequirementIsOptional) {
  const Scene gt = scene_of({obj("cube", {0, 0, 0})});
  const Scene pred = scene_of({obj("sphere", {0, 0, 0})});
  EXPECT_EQ(component_scores(pred, gt).f1, 1.0);
  ScoreConfig cfg;
  cfg.require_class_for_tp = true;
  EXPECT_EQ(component_scores(pred, gt, cfg).f1, 0.0);
}

TEST(Aggregate, AllPerfect) {
  const Scene gt = three_far_apart();
  std::vector<SceneScore> rows;
  for (int i = 0; i < 10; ++i) rows.push_back({"s" + std::to_string(i), 3, false, component_scores(gt, gt)});
  const CellAggregate a = aggregate_cell(rows);
  EXPECT_EQ(a.parse_rate, 1.0);
  EXPECT_EQ(a.f1, 1.0);
  EXPECT_EQ(a.reconstruct_score, 1.0);
  EXPECT_EQ(a.ci_f1, (Interval{1.0, 1.0}));
}

TEST(Aggregate, HalfUnparsed) {
  const Scene gt = three_far_apart();
  std::vector<SceneScore> rows;
  for (int i = 0; i < 10; ++i) {
    if (i % 2 == 0) rows.push_back({"s" + std::to_string(i), 3, false, component_scores(gt, gt)});
    else rows.push_back({"s" + std::to_string(i), 0, i == 1, std::nullopt});
  }
  const CellAggregate a = aggregate_cell(rows);
  EXPECT_EQ(a.n_scenes, 10u);
  EXPECT_EQ(a.n_parsed, 5u);
  EXPECT_EQ(a.n_errored, 1u);
  EXPECT_EQ(a.parse_rate, 0.5);
  EXPECT_EQ(a.f1, 0.5);
  EXPECT_EQ(a.f1_parsed_only, 1.0);
  EXPECT_EQ(a.class_accuracy, 1.0);
  EXPECT_NEAR(a.reconstruct_score, 0.8, 1e-12);
  EXPECT_LT(a.ci_parse_rate.low, 0.5);
  EXPECT_GT(a.ci_parse_rate.high, 0.5);
}

TEST(FovFilter, DropsObjectsBehindCamera) {
  Scene gt = scene_of({obj("cube", {0, 0, 0}), obj("cube", {0, 0, 20}), obj("cube", {50, 0, 0})});
  Camera cam;
  cam.position = {0, 0, 8};
  cam.target = {0, 0, 0};
  const Scene kept = fov_filter(gt, cam);
  ASSERT_EQ(kept.objects.size(), 1u);
  EXPECT_EQ(kept.objects[0].position, (Vec3{0, 0, 0}));

  GenConfig g;
  g.tier = 3;
  g.seed = 5;
  const Scene s = generate_scene(g);
  EXPECT_EQ(fov_filter(s, camera_poses(s, g).front()).objects.size(), s.objects.size());
}
