#include "scenecode/harness/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "scenecode/error.hpp"
#include "scenecode/harness/replay_store.hpp"

namespace scenecode::harness {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(SceneStatus s) {
  switch (s) {
    case SceneStatus::parsed: return "parsed";
    case SceneStatus::empty: return "empty";
    case SceneStatus::errored: return "errored";
  }
  return "empty";
}

namespace {

SceneStatus status_from(const std::string& s) {
  if (s == "parsed") return SceneStatus::parsed;
  if (s == "errored") return SceneStatus::errored;
  return SceneStatus::empty;
}

json interval(const Interval& i) { return json::array({i.low, i.high}); }
Interval interval_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json aggregate_json(const CellAggregate& a) {
  return {{"n_scenes", a.n_scenes},
          {"n_parsed", a.n_parsed},
          {"n_matched", a.n_matched},
          {"n_errored", a.n_errored},
          {"parse_rate", a.parse_rate},
          {"f1", a.f1},
          {"f1_parsed_only", a.f1_parsed_only},
          {"class_accuracy", a.class_accuracy},
          {"position_fidelity", a.position_fidelity},
          {"scale_fidelity", a.scale_fidelity},
          {"reconstruct_score", a.reconstruct_score},
          {"ci_parse_rate", interval(a.ci_parse_rate)},
          {"ci_f1", interval(a.ci_f1)},
          {"ci_class_accuracy", interval(a.ci_class_accuracy)},
          {"ci_position_fidelity", interval(a.ci_position_fidelity)},
          {"ci_scale_fidelity", interval(a.ci_scale_fidelity)}};
}

CellAggregate aggregate_from(const json& j) {
  CellAggregate a;
  a.n_scenes = j.at("n_scenes").get<std::size_t>();
  a.n_parsed = j.at("n_parsed").get<std::size_t>();
  a.n_matched = j.at("n_matched").get<std::size_t>();
  a.n_errored = j.at("n_errored").get<std::size_t>();
  a.parse_rate = j.at("parse_rate").get<double>();
  a.f1 = j.at("f1").get<double>();
  a.f1_parsed_only = j.at("f1_parsed_only").get<double>();
  a.class_accuracy = j.at("class_accuracy").get<double>();
  a.position_fidelity = j.at("position_fidelity").get<double>();
  a.scale_fidelity = j.at("scale_fidelity").get<double>();
  a.reconstruct_score = j.at("reconstruct_score").get<double>();
  a.ci_parse_rate = interval_from(j.at("ci_parse_rate"));
  a.ci_f1 = interval_from(j.at("ci_f1"));
  a.ci_class_accuracy = interval_from(j.at("ci_class_accuracy"));
  a.ci_position_fidelity = interval_from(j.at("ci_position_fidelity"));
  a.ci_scale_fidelity = interval_from(j.at("ci_scale_fidelity"));
  return a;
}

json qa_json(const QAAccuracy& q) {
  json per = json::object();
  for (const auto& [cat, ct] : q.per_category) {
    per[std::string(to_string(cat))] = {{"correct", ct.first}, {"total", ct.second},
                                        {"accuracy", q.category_accuracy(cat)}};
  }
  return {{"total", q.total}, {"correct", q.correct}, {"overall", q.overall}, {"per_category", per}};
}

QAAccuracy qa_from(const json& j) {
  QAAccuracy q;
  q.total = j.at("total").get<std::size_t>();
  q.correct = j.at("correct").get<std::size_t>();
  q.overall = j.at("overall").get<double>();
  for (const auto& [name, v] : j.at("per_category").items()) {
    q.per_category[category_from_name(name)] = {v.at("correct").get<std::size_t>(), v.at("total").get<std::size_t>()};
  }
  return q;
}

json scores_json(const ComponentScores& s) {
  return {{"f1", s.f1},
          {"precision", s.precision},
          {"recall", s.recall},
          {"class_accuracy", s.class_accuracy},
          {"position_fidelity", s.position_fidelity},
          {"scale_fidelity", s.scale_fidelity},
          {"d_pos", s.d_pos},
          {"d_scale", s.d_scale},
          {"matched_count", s.matched_count},
          {"true_positives", s.true_positives}};
}

ComponentScores scores_from(const json& j) {
  ComponentScores s;
  s.f1 = j.at("f1").get<double>();
  s.precision = j.at("precision").get<double>();
  s.recall = j.at("recall").get<double>();
  s.class_accuracy = j.at("class_accuracy").get<double>();
  s.position_fidelity = j.at("position_fidelity").get<double>();
  s.scale_fidelity = j.at("scale_fidelity").get<double>();
  s.d_pos = j.at("d_pos").get<double>();
  s.d_scale = j.at("d_scale").get<double>();
  s.matched_count = j.at("matched_count").get<std::size_t>();
  s.true_positives = j.at("true_positives").get<std::size_t>();
  return s;
}

json header_json(const CellSnapshot& s) {
  json j = {{"model_id", s.model_id}, {"task", s.task},         {"language", s.language},
            {"mode", s.mode},         {"n_items", s.n_items},   {"n_errored", s.n_errored},
            {"retries", s.retries},   {"valid", s.valid},       {"toolkit_version", s.toolkit_version},
            {"timestamp", s.timestamp}};
  if (s.aggregate) j["aggregate"] = aggregate_json(*s.aggregate);
  if (s.qa) j["qa"] = qa_json(*s.qa);
  return j;
}

std::string dump(const json& j) { return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n"; }

}  // namespace

std::string CellSnapshot::key() const { return model_id + "|" + task + "|" + language + "|" + mode; }

std::string snapshot_to_json(const CellSnapshot& s) {
  json j = header_json(s);
  json rows = json::array();
  for (const auto& r : s.reconstruct_rows) {
    json row = {{"scene_id", r.scene_id},
                {"status", std::string(to_string(r.status))},
                {"parsed_object_count", r.parsed_object_count},
                {"gt_object_count", r.gt_object_count}};
    if (r.scores) row["scores"] = scores_json(*r.scores);
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  for (const auto& r : s.qa_rows) {
    json row = {{"question_id", r.question_id},
                {"scene_id", r.scene_id},
                {"category", std::string(to_string(r.judgment.category))},
                {"errored", r.errored},
                {"correct", r.judgment.correct},
                {"extracted", r.judgment.extracted},
                {"rule", r.judgment.rule}};
    if (!r.error.empty()) row["error"] = r.error;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return dump(j);
}

CellSnapshot snapshot_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    CellSnapshot s;
    s.model_id = j.at("model_id").get<std::string>();
    s.task = j.at("task").get<std::string>();
    s.language = j.at("language").get<std::string>();
    s.mode = j.at("mode").get<std::string>();
    s.n_items = j.at("n_items").get<std::size_t>();
    s.n_errored = j.at("n_errored").get<std::size_t>();
    s.retries = j.at("retries").get<int>();
    s.valid = j.at("valid").get<bool>();
    s.toolkit_version = j.at("toolkit_version").get<std::string>();
    s.timestamp = j.at("timestamp").get<std::string>();
    if (j.contains("aggregate")) s.aggregate = aggregate_from(j.at("aggregate"));
    if (j.contains("qa")) s.qa = qa_from(j.at("qa"));
    for (const auto& row : j.value("rows", json::array())) {
      if (s.task == "qa") {
        QARow r;
        r.question_id = row.at("question_id").get<std::string>();
        r.scene_id = row.at("scene_id").get<std::string>();
        r.errored = row.at("errored").get<bool>();
        r.judgment = {r.question_id, category_from_name(row.at("category").get<std::string>()),
                      row.at("correct").get<bool>(), row.at("extracted").get<std::string>(),
                      row.at("rule").get<std::string>()};
        r.error = row.value("error", "");
        s.qa_rows.push_back(std::move(r));
      } else {
        ReconstructRow r;
        r.scene_id = row.at("scene_id").get<std::string>();
        r.status = status_from(row.at("status").get<std::string>());
        r.parsed_object_count = row.at("parsed_object_count").get<std::size_t>();
        r.gt_object_count = row.at("gt_object_count").get<std::size_t>();
        if (row.contains("scores")) r.scores = scores_from(row.at("scores"));
        r.error = row.value("error", "");
        s.reconstruct_rows.push_back(std::move(r));
      }
    }
    return s;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed snapshot: ") + e.what());
  }
}

std::string aggregate_table_json(const std::vector<CellSnapshot>& snapshots) {
  json cells = json::object();
  for (const auto& s : snapshots) cells[s.key()] = header_json(s);
  return dump({{"cells", cells}});
}

std::vector<fs::path> write_snapshots(const fs::path& dir, const std::vector<CellSnapshot>& snapshots) {
  std::vector<fs::path> written;
  fs::create_directories(dir / "cells");
  auto write = [&](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
    written.push_back(p);
  };
  write(dir / "aggregate.json", aggregate_table_json(snapshots));
  for (const auto& s : snapshots) {
    std::string name = s.model_id + "__" + s.task + "__" + s.language + "__" + s.mode;
    write(dir / "cells" / (path_component(name) + ".json"), snapshot_to_json(s));
  }
  return written;
}

std::vector<CellSnapshot> read_snapshots(const fs::path& dir) {
  std::vector<fs::path> files;
  const fs::path cells = dir / "cells";
  if (!fs::is_directory(cells)) throw Error("no snapshot cells under " + dir.string());
  for (const auto& f : fs::directory_iterator(cells)) {
    if (f.path().extension() == ".json") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<CellSnapshot> out;
  for (const auto& f : files) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    out.push_back(snapshot_from_json(ss.str()));
  }
  return out;
}

}  // namespace scenecode::harness
