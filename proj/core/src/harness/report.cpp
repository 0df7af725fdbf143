#include "scenecode/harness/report.hpp"

#include <algorithm>
#include <cstdio>
#include <json.hpp>

#include "scenecode/error.hpp"

namespace scenecode::harness {

using nlohmann::json;

namespace {

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

const std::vector<std::string> kQAModeOrder{"direct", "nl_cot", "best_cc", "worst_cc"};

std::vector<std::string> models_in_order(const std::vector<CellSnapshot>& snapshots) {
  std::vector<std::string> models;
  for (const auto& s : snapshots) {
    if (std::find(models.begin(), models.end(), s.model_id) == models.end()) models.push_back(s.model_id);
  }
  return models;
}

json correlation_json(const std::optional<Correlation>& c) {
  if (!c) return nullptr;
  return {{"pearson_r", c->pearson_r}, {"spearman_rho", c->spearman_rho}};
}

}  // namespace

LanguageRow language_row(std::string model_id, const std::map<SceneCodeLanguage, double>& scores) {
  LanguageRow row;
  row.model_id = std::move(model_id);
  row.scores = scores;
  for (auto lang : kAllLanguages) {
    const auto it = scores.find(lang);
    if (it == scores.end()) continue;
    if (!row.best || it->second > scores.at(*row.best)) row.best = lang;
    if (!row.worst || it->second < scores.at(*row.worst)) row.worst = lang;
  }
  if (row.best) row.delta = scores.at(*row.best) - scores.at(*row.worst);
  return row;
}

Report build_report(const std::vector<CellSnapshot>& snapshots) {
  if (snapshots.empty()) throw Error("report needs at least one snapshot");
  Report report;
  CorrelationBlock block;
  for (const auto& model : models_in_order(snapshots)) {
    std::map<SceneCodeLanguage, double> scores;
    double f1_sum = 0.0;
    std::map<std::string, double> qa;
    const CellSnapshot* direct_qa = nullptr;
    for (const auto& s : snapshots) {
      if (s.model_id != model) continue;
      if (s.task == "reconstruct" && s.mode == "direct" && s.aggregate) {
        scores[language_from_name(s.language)] = s.aggregate->reconstruct_score;
        f1_sum += s.aggregate->f1;
      } else if (s.task == "qa" && s.qa) {
        qa[s.mode] = s.qa->overall;
        if (s.mode == "direct") direct_qa = &s;
      }
    }
    if (!scores.empty()) report.reconstruct.push_back(language_row(model, scores));
    if (!qa.empty()) {
      QAModeRow row{model, qa, std::nullopt};
      if (qa.count("best_cc") && qa.count("direct")) row.delta_best_direct = 100.0 * (qa["best_cc"] - qa["direct"]);
      report.qa.push_back(std::move(row));
    }
    if (!scores.empty() && direct_qa) {
      block.models.push_back(model);
      block.reconstruct_f1.push_back(f1_sum / static_cast<double>(scores.size()));
      block.qa_relationship.push_back(direct_qa->qa->category_accuracy(QACategory::relationship));
      block.qa_overall.push_back(direct_qa->qa->overall);
    }
  }
  if (!block.models.empty()) {
    if (block.models.size() >= 3) {
      try {
        block.vs_relationship = correlations(block.reconstruct_f1, block.qa_relationship);
      } catch (const Error&) {
      }
      try {
        block.vs_overall = correlations(block.reconstruct_f1, block.qa_overall);
      } catch (const Error&) {
      }
    }
    report.correlation = std::move(block);
  }
  return report;
}

std::string render_text(const Report& report) {
  std::string out;
  if (!report.reconstruct.empty()) {
    std::vector<SceneCodeLanguage> langs;
    for (auto lang : kAllLanguages) {
      for (const auto& row : report.reconstruct) {
        if (row.scores.count(lang)) {
          langs.push_back(lang);
          break;
        }
      }
    }
    std::size_t w = 5;
    for (const auto& row : report.reconstruct) w = std::max(w, row.model_id.size());
    out += "Reconstruct Score (+ best, - worst)\n";
    out += pad("model", w + 2);
    for (auto lang : langs) out += pad(std::string(to_string(lang)), 17);
    out += "delta\n";
    for (const auto& row : report.reconstruct) {
      out += pad(row.model_id, w + 2);
      for (auto lang : langs) {
        const auto it = row.scores.find(lang);
        std::string cell = it == row.scores.end() ? "n/a" : fixed(it->second, 3);
        if (row.best == lang) cell += "+";
        if (row.worst == lang && row.best != lang) cell += "-";
        out += pad(cell, 17);
      }
      out += fixed(row.delta, 3) + "\n";
    }
  }
  if (!report.qa.empty()) {
    if (!out.empty()) out += "\n";
    std::size_t w = 5;
    for (const auto& row : report.qa) w = std::max(w, row.model_id.size());
    out += "QA accuracy\n";
    out += pad("model", w + 2);
    for (const auto& m : kQAModeOrder) out += pad(m, 10);
    out += "best-direct (pp)\n";
    for (const auto& row : report.qa) {
      out += pad(row.model_id, w + 2);
      for (const auto& m : kQAModeOrder) {
        const auto it = row.accuracy.find(m);
        out += pad(it == row.accuracy.end() ? "n/a" : fixed(it->second, 3), 10);
      }
      out += row.delta_best_direct ? (*row.delta_best_direct >= 0 ? "+" : "") + fixed(*row.delta_best_direct, 1)
                                   : std::string("n/a");
      out += "\n";
    }
  }
  if (report.correlation) {
    const auto& c = *report.correlation;
    out += "\nReconstruct F1 vs QA accuracy (" + std::to_string(c.models.size()) +
           (c.models.size() == 1 ? " model)\n" : " models)\n");
    auto line = [&](const char* name, const std::optional<Correlation>& v) {
      out += std::string("  ") + name + ": ";
      out += v ? "pearson r = " + fixed(v->pearson_r, 3) + ", spearman rho = " + fixed(v->spearman_rho, 3)
               : std::string("n/a");
      out += "\n";
    };
    line("relationship", c.vs_relationship);
    line("overall", c.vs_overall);
  }
  return out;
}

std::string render_json(const Report& report) {
  json j;
  json rec = json::array();
  for (const auto& row : report.reconstruct) {
    json scores = json::object();
    for (const auto& [lang, v] : row.scores) scores[std::string(to_string(lang))] = v;
    rec.push_back({{"model_id", row.model_id},
                   {"scores", scores},
                   {"best", row.best ? json(std::string(to_string(*row.best))) : json(nullptr)},
                   {"worst", row.worst ? json(std::string(to_string(*row.worst))) : json(nullptr)},
                   {"delta", row.delta}});
  }
  j["reconstruct"] = rec;
  json qa = json::array();
  for (const auto& row : report.qa) {
    qa.push_back({{"model_id", row.model_id},
                  {"accuracy", row.accuracy},
                  {"delta_best_direct_pp", row.delta_best_direct ? json(*row.delta_best_direct) : json(nullptr)}});
  }
  j["qa"] = qa;
  if (report.correlation) {
    const auto& c = *report.correlation;
    j["correlation"] = {{"models", c.models},
                        {"reconstruct_f1", c.reconstruct_f1},
                        {"qa_relationship", c.qa_relationship},
                        {"qa_overall", c.qa_overall},
                        {"vs_relationship", correlation_json(c.vs_relationship)},
                        {"vs_overall", correlation_json(c.vs_overall)}};
  } else {
    j["correlation"] = nullptr;
  }
  return j.dump(2) + "\n";
}

}  // namespace scenecode::harness
