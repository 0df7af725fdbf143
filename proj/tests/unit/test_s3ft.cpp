#include <gtest/gtest.h>

#include <json.hpp>
#include <set>

#include "scenecode/codecs.hpp"
#include "scenecode/error.hpp"
#include "scenecode/s3ft.hpp"
#include "scenecode/scenegen.hpp"
#include "test_support.hpp"

using namespace scenecode;

namespace {

PseudoGT pseudo_gt(const Scene& s) {
  PseudoGT p;
  p.scene_id = s.scene_id;
  p.image_ref = s.scene_id + "/v0.png";
  p.code = serialize(SceneCodeLanguage::threejs, s);
  ParseOptions opts;
  opts.scene_id = s.scene_id;
  p.parsed = *parse(SceneCodeLanguage::threejs, p.code, opts).scene;
  return p;
}

struct Corpus {
  std::vector<PseudoGT> gts;
  ViewpointTable views;
};

Corpus corpus(int per_tier) {
  Corpus c;
  for (int tier = 1; tier <= 5; ++tier) {
    for (int i = 0; i < per_tier; ++i) {
      GenConfig g;
      g.tier = tier;
      g.seed = static_cast<std::uint64_t>(i);
      const Scene s = generate_scene(g);
      c.gts.push_back(pseudo_gt(s));
      const auto cams = camera_poses(s, g);
      for (std::size_t v = 0; v < cams.size(); ++v) {
        c.views[s.scene_id].push_back({static_cast<int>(v), s.scene_id + "/v" + std::to_string(v) + ".png", cams[v]});
      }
    }
  }
  return c;
}

Camera front_camera() {
  Camera c;
  c.position = {0, 2, 8};
  c.target = {0, 0, 0};
  return c;
}

}  // namespace

TEST(StructuredTasks, SingleCube) {
  Scene s;
  s.scene_id = "one";
  SceneObject o;
  o.position = {1.23456, 0.5, -2.0004};
  o.material = "red";
  s.objects = {o};
  const auto rs = derive_structured_tasks(pseudo_gt(s), front_camera());
  ASSERT_EQ(rs.size(), 9u);
  for (std::size_t i = 0; i < rs.size(); ++i) EXPECT_EQ(rs[i].task_tag, structured_task_tags()[i]);
  EXPECT_EQ(rs[0].target, "1");
  EXPECT_EQ(rs[1].target, R"(["cube"])");
  EXPECT_EQ(rs[2].target, R"([{"class":"cube","id":0,"material":"red","position":[1.235,0.5,-2.0]}])");
  EXPECT_EQ(rs[3].target,
            R"([{"class":"cube","id":0,"material":"red","max":[1.735,1.0,-1.5],"min":[0.735,0.0,-2.5]}])");
  EXPECT_EQ(rs[5].target, "[]");
  EXPECT_EQ(rs[6].target, "[0]");
  EXPECT_TRUE(rs[0].view_invariant);
  EXPECT_FALSE(rs[4].view_invariant);
}

TEST(StructuredTasks, DepthOrderMatchesOracle) {
  for (int tier = 2; tier <= 5; ++tier) {
    GenConfig g;
    g.tier = tier;
    g.seed = 11;
    const Scene s = generate_scene(g);
    for (const Camera& cam : camera_poses(s, g)) {
      const PseudoGT p = pseudo_gt(s);
      const auto rs = derive_structured_tasks(p, cam);
      const sct::OracleFrame f(cam);
      std::vector<std::size_t> idx(p.parsed.objects.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return f.depth(p.parsed.objects[a].position) < f.depth(p.parsed.objects[b].position);
      });
      EXPECT_EQ(rs[6].target, nlohmann::json(idx).dump());
    }
  }
}

TEST(NlSignals, ElevenRecords) {
  GenConfig g;
  g.tier = 3;
  const Scene s = generate_scene(g);
  const auto rs = generate_nl_signals(pseudo_gt(s), camera_poses(s, g).front(), 1);
  ASSERT_EQ(rs.size(), 11u);
  std::map<std::string, int> n;
  std::set<std::string> ids;
  for (const auto& r : rs) {
    ++n[r.task_tag];
    EXPECT_TRUE(ids.insert(r.record_id).second);
  }
  EXPECT_EQ(n[std::string(kTaskQA)], 8);
  EXPECT_EQ(n[std::string(kTaskDescription)], 1);
  EXPECT_EQ(n[std::string(kTaskParaphrase)], 2);
  EXPECT_EQ(rs[8].target.rfind("The scene contains " + std::to_string(s.objects.size()) + " objects: a ", 0), 0u);
}

TEST(Dataset, SingleViewHasTwentyPerScene) {
  const Corpus c = corpus(20);
  const DatasetSplit d = build_dataset(c.gts, DatasetMode::single_view, c.views);
  EXPECT_EQ(d.size(), 2000u);
  std::set<std::string> train, val;
  for (const auto& r : d.train) train.insert(r.scene_id);
  for (const auto& r : d.val) val.insert(r.scene_id);
  EXPECT_EQ(val.size(), 10u);
  EXPECT_EQ(train.size(), 90u);
  for (const auto& s : val) EXPECT_EQ(train.count(s), 0u);
  EXPECT_EQ(d.val.size(), 200u);
}

TEST(Dataset, CrossViewpointGrowth) {
  const Corpus c = corpus(4);
  const DatasetSplit single = build_dataset(c.gts, DatasetMode::single_view, c.views);
  const DatasetSplit cross = build_dataset(c.gts, DatasetMode::cross_viewpoint, c.views);
  const double growth = static_cast<double>(cross.size()) / static_cast<double>(single.size());
  EXPECT_GE(growth, 3.0);
  EXPECT_LE(growth, 4.0);
  std::set<std::pair<std::string, int>> keys;
  for (const auto* part : {&cross.train, &cross.val}) {
    for (const auto& r : *part) {
      EXPECT_TRUE(keys.insert({r.record_id, r.viewpoint}).second) << r.record_id;
      EXPECT_EQ(r.image_ref, r.scene_id + "/v" + std::to_string(r.viewpoint) + ".png");
    }
  }
}

TEST(Dataset, RebuildIsBytewiseIdentical) {
  const Corpus c = corpus(2);
  const auto a = build_dataset(c.gts, DatasetMode::cross_viewpoint, c.views);
  const auto b = build_dataset(c.gts, DatasetMode::cross_viewpoint, c.views);
  EXPECT_EQ(records_to_jsonl(a.train), records_to_jsonl(b.train));
  EXPECT_EQ(records_to_jsonl(a.val), records_to_jsonl(b.val));
  EXPECT_EQ(dataset_manifest(a, DatasetMode::cross_viewpoint), dataset_manifest(b, DatasetMode::cross_viewpoint));
  EXPECT_NE(records_to_jsonl(build_dataset(c.gts, DatasetMode::cross_viewpoint, c.views, 7).val),
            records_to_jsonl(a.val));
  EXPECT_EQ(records_from_jsonl(records_to_jsonl(a.train)), a.train);
}

TEST(Dataset, Preconditions) {
  const Corpus c = corpus(2);
  EXPECT_THROW(build_dataset({c.gts.begin(), c.gts.begin() + 9}, DatasetMode::single_view, c.views), Error);
  ViewpointTable missing = c.views;
  missing.erase(c.gts.front().scene_id);
  EXPECT_THROW(build_dataset(c.gts, DatasetMode::single_view, missing), Error);
}

TEST(Curation, FilterCorpusPassRate) {
  std::vector<RawOutput> raw;
  std::size_t expected_accept = 0;
  std::map<std::string, std::size_t> expected_reasons;
  for (const auto& fc : sct::phase1_cases()) {
    raw.push_back({fc.name, fc.name + ".png", fc.code, 0});
    if (fc.accepted) ++expected_accept;
    else ++expected_reasons[fc.reason];
  }
  const CurationResult r = phase1_curate(raw);
  EXPECT_EQ(r.report.total, raw.size());
  EXPECT_EQ(r.report.accepted, expected_accept);
  EXPECT_EQ(r.report.rejections, expected_reasons);
  EXPECT_DOUBLE_EQ(r.report.pass_rate(), static_cast<double>(expected_accept) / static_cast<double>(raw.size()));
  for (const auto& p : r.accepted) EXPECT_NE(p.scene_id, "fifty_one_meshes");
  const auto fifty = std::find_if(r.accepted.begin(), r.accepted.end(),
                                  [](const PseudoGT& p) { return p.scene_id == "fifty_meshes"; });
  ASSERT_NE(fifty, r.accepted.end());
  EXPECT_EQ(fifty->parsed.objects.size(), 50u);

  const auto manifest = nlohmann::json::parse(
      dataset_manifest(build_dataset(corpus(2).gts, DatasetMode::single_view, corpus(2).views),
                       DatasetMode::single_view, &r.report));
  EXPECT_EQ(manifest["curation"]["accepted"], expected_accept);
  EXPECT_EQ(manifest["train"]["records"].get<std::size_t>() + manifest["val"]["records"].get<std::size_t>(), 200u);
}
