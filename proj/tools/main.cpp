#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "scenecode/codecs.hpp"
#include "scenecode/error.hpp"
#include "scenecode/harness/client.hpp"
#include "scenecode/harness/replay_store.hpp"
#include "scenecode/harness/report.hpp"
#include "scenecode/harness/run.hpp"
#include "scenecode/harness/snapshot.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/s3ft.hpp"
#include "scenecode/scene_json.hpp"
#include "scenecode/scenegen.hpp"
#include "scenecode/version.hpp"
#include "synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scenecode;
using namespace scenecode::harness;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

std::string_view extension(SceneCodeLanguage lang) {
  switch (lang) {
    case SceneCodeLanguage::threejs: return ".js";
    case SceneCodeLanguage::unity_csharp: return ".cs";
    case SceneCodeLanguage::blender_python: return ".blender.py";
    case SceneCodeLanguage::open3d_python: return ".open3d.py";
    case SceneCodeLanguage::canonical_json: return ".json";
    case SceneCodeLanguage::scene_dsl: return ".scene";
  }
  return ".txt";
}

json camera_json(const Camera& c) {
  return {{"position", {c.position.x, c.position.y, c.position.z}},
          {"target", {c.target.x, c.target.y, c.target.z}},
          {"fov", c.fov},
          {"aspect", c.aspect}};
}

Camera camera_from(const json& j) {
  Camera c;
  const auto& p = j.at("position");
  const auto& t = j.at("target");
  c.position = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
  c.target = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
  c.fov = j.value("fov", 60.0);
  c.aspect = j.value("aspect", 1.0);
  return c;
}

std::size_t split_size(const fs::path& dir) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.is_regular_file() && e.path().extension() == ".json";
  return n;
}

fs::path viewpoints_path(const fs::path& split) { return split / "meta" / "viewpoints.json"; }

ViewpointTable read_viewpoints(const fs::path& split) {
  const json j = json::parse(read_file(viewpoints_path(split)));
  ViewpointTable table;
  for (const auto& [scene_id, views] : j.items()) {
    for (const auto& v : views) {
      fs::path ref = v.at("image_ref").get<std::string>();
      if (ref.is_relative()) ref = split / ref;
      table[scene_id].push_back({v.at("index").get<int>(), ref.string(), camera_from(v.at("camera"))});
    }
  }
  return table;
}

std::vector<SceneCodeLanguage> parse_languages(const std::vector<std::string>& names) {
  if (names.empty()) return {kAllLanguages.begin(), kAllLanguages.end()};
  std::vector<SceneCodeLanguage> out;
  for (const auto& n : names) out.push_back(language_from_name(n));
  return out;
}

// Client options shared by the eval commands.
struct ClientOptions {
  std::string replay;
  std::string live;  // provider name
  std::string endpoint;
  std::string api_key_env;
  std::string remote_model;
  std::string record;
  int max_retries = 2;

  void add(CLI::App* cmd) {
    auto* r = cmd->add_option("--replay", replay, "Replay store directory");
    auto* l = cmd->add_option("--live", live, "Live provider")->check(CLI::IsMember({"openai", "anthropic"}));
    r->excludes(l);
    cmd->add_option("--endpoint", endpoint, "scheme://host[:port] of the live endpoint");
    cmd->add_option("--api-key-env", api_key_env, "Environment variable holding the API key");
    cmd->add_option("--remote-model", remote_model, "Provider model name (default: --model)");
    cmd->add_option("--record", record, "Tee live responses into this replay store");
    cmd->add_option("--max-retries", max_retries, "Live retries per request")->check(CLI::NonNegativeNumber);
  }

  std::shared_ptr<ModelClient> make() const {
    if (!replay.empty()) return std::make_shared<ReplayClient>(std::make_shared<ReplayStore>(replay));
    if (live.empty()) throw Error("one of --replay or --live is required");
    LiveConfig cfg;
    cfg.provider = live == "anthropic" ? Provider::anthropic : Provider::openai;
    if (cfg.provider == Provider::anthropic) {
      cfg.endpoint = "https://api.anthropic.com";
      cfg.api_key_env = "ANTHROPIC_API_KEY";
    }
    if (!endpoint.empty()) cfg.endpoint = endpoint;
    if (!api_key_env.empty()) cfg.api_key_env = api_key_env;
    cfg.remote_model = remote_model;
    cfg.max_retries = max_retries;
    std::shared_ptr<ModelClient> client = std::make_shared<LiveClient>(cfg);
    if (!record.empty()) client = std::make_shared<TeeClient>(client, std::make_shared<ReplayStore>(record));
    return client;
  }
};

// Run options shared by eval commands and replay synth.
struct RunOptions {
  std::string model;
  std::string split;
  std::size_t n_scenes = 0;
  std::vector<std::string> languages;
  std::string domain = "primitive";
  std::uint64_t seed = 0;
  int concurrency = 4;
  std::string timestamp;
  std::string raw_dir;

  void add(CLI::App* cmd) {
    cmd->add_option("--model", model, "Model id")->required();
    cmd->add_option("--split", split, "Scene split directory")->required()->check(CLI::ExistingDirectory);
    cmd->add_option("--n-scenes", n_scenes, "Scenes to evaluate (default: whole split)");
    cmd->add_option("--languages", languages, "Scene-code languages (default: all six)")->delimiter(',');
    cmd->add_option("--domain", domain, "Scene domain")->check(CLI::IsMember({"primitive", "hypersim"}));
    cmd->add_option("--seed", seed, "Bootstrap / QA seed");
    cmd->add_option("--concurrency", concurrency, "Parallel requests per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--timestamp", timestamp, "Timestamp written into snapshots");
    cmd->add_option("--raw-dir", raw_dir, "Persist raw responses under this directory");
  }

  RunConfig config() const {
    RunConfig c;
    c.model_id = model;
    c.scene_split = split;
    c.languages = parse_languages(languages);
    c.domain = domain == "hypersim" ? SceneDomain::hypersim : SceneDomain::primitive;
    c.seed = seed;
    c.concurrency = concurrency;
    c.timestamp = timestamp;
    if (!raw_dir.empty()) c.raw_dir = fs::path(raw_dir);
    c.n_scenes = n_scenes == 0 ? split_size(split) : n_scenes;
    return c;
  }
};

void print_cells(const std::vector<CellSnapshot>& cells) {
  for (const auto& c : cells) {
    std::string line = c.key() + ": ";
    if (c.aggregate) {
      line += "score " + format_fixed(c.aggregate->reconstruct_score, 4) + ", parse rate " +
              format_fixed(c.aggregate->parse_rate, 3) + ", f1 " + format_fixed(c.aggregate->f1, 4);
    }
    if (c.qa) line += "accuracy " + format_fixed(c.qa->overall, 4);
    line += ", errored " + std::to_string(c.n_errored) + "/" + std::to_string(c.n_items);
    if (!c.valid) line += " [INVALID: aborted]";
    std::cout << line << "\n";
  }
}

std::vector<CellSnapshot> merge_into(const fs::path& dir, std::vector<CellSnapshot> fresh) {
  std::vector<CellSnapshot> all;
  if (fs::is_directory(dir / "cells")) all = read_snapshots(dir);
  for (auto& f : fresh) {
    std::erase_if(all, [&](const CellSnapshot& s) { return s.key() == f.key(); });
    all.push_back(std::move(f));
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  return all;
}

void save(const fs::path& out, std::vector<CellSnapshot> cells) {
  print_cells(cells);
  const auto all = merge_into(out, std::move(cells));
  write_snapshots(out, all);
  spdlog::info("wrote {} cells to {}", all.size(), out.string());
}

std::optional<std::pair<SceneCodeLanguage, SceneCodeLanguage>> resolve_best_worst(
    const std::string& best, const std::string& worst, const std::string& from, const std::string& model) {
  if (!best.empty() || !worst.empty()) {
    if (best.empty() || worst.empty()) throw Error("--best and --worst go together");
    return std::pair{language_from_name(best), language_from_name(worst)};
  }
  if (!from.empty()) return select_best_worst_language(read_snapshots(from), model, code_cot_language_subset());
  return std::nullopt;
}

std::vector<QAModeSpec> parse_qa_modes(const std::vector<std::string>& names) {
  std::vector<QAModeSpec> out;
  for (const auto& n : names) out.push_back(qa_mode_from_name(n));
  return out;
}

std::vector<ModeKind> parse_reconstruct_modes(const std::vector<std::string>& names) {
  std::vector<ModeKind> out;
  for (const auto& n : names) {
    const InferenceMode m = mode_from_name(n);
    if (m.kind == ModeKind::code_cot) throw Error("reconstruction modes are direct and nl_cot");
    out.push_back(m.kind);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Scene-code toolkit: generation, codecs, scoring, spatial QA and training-data building"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate primitive scenes, cameras and a QA set");
  std::string gen_out;
  std::vector<int> gen_tiers{1, 2, 3, 4, 5};
  int gen_per_tier = 20;
  std::uint64_t gen_seed0 = 0;
  int gen_views = 4;
  std::uint64_t gen_qa_seed = 0;
  gen->add_option("--out", gen_out, "Output split directory")->required();
  gen->add_option("--tiers", gen_tiers, "Tiers to generate")->delimiter(',')->check(CLI::Range(1, 5));
  gen->add_option("--per-tier", gen_per_tier, "Scenes per tier")->check(CLI::PositiveNumber);
  gen->add_option("--seed-start", gen_seed0, "First seed; seeds run consecutively within a tier");
  gen->add_option("--viewpoints", gen_views, "Camera viewpoints per scene")->check(CLI::PositiveNumber);
  gen->add_option("--qa-seed", gen_qa_seed, "Seed for QA generation");

  // export
  auto* exp = app.add_subcommand("export", "Write per-language serializations and render scripts");
  std::string exp_split, exp_scene, exp_out;
  std::vector<std::string> exp_langs;
  exp->add_option("--split", exp_split, "Split directory")->check(CLI::ExistingDirectory);
  exp->add_option("--scene", exp_scene, "Single scene JSON file")->check(CLI::ExistingFile);
  exp->add_option("--out", exp_out, "Output directory")->required();
  exp->add_option("--languages", exp_langs, "Languages (default: all)")->delimiter(',');

  // eval-reconstruct
  auto* er = app.add_subcommand("eval-reconstruct", "Score reconstructions for every (language, mode) cell");
  RunOptions er_run;
  ClientOptions er_client;
  std::string er_out;
  std::vector<std::string> er_modes{"direct"};
  er_run.add(er);
  er_client.add(er);
  er->add_option("--modes", er_modes, "Prompting modes: direct, nl_cot")->delimiter(',');
  er->add_option("--out", er_out, "Snapshot directory")->required();

  // eval-qa
  auto* eq = app.add_subcommand("eval-qa", "Judge spatial QA answers per inference mode");
  RunOptions eq_run;
  ClientOptions eq_client;
  std::string eq_out, eq_qa, eq_best, eq_worst, eq_from;
  std::vector<std::string> eq_modes{"direct", "nl_cot", "best_cc", "worst_cc"};
  eq_run.add(eq);
  eq_client.add(eq);
  eq->add_option("--qa", eq_qa, "QA set (JSONL); default: <split>/qa.jsonl");
  eq->add_option("--modes", eq_modes, "direct, nl_cot, best_cc, worst_cc")->delimiter(',');
  eq->add_option("--best", eq_best, "Code-CoT best language");
  eq->add_option("--worst", eq_worst, "Code-CoT worst language");
  eq->add_option("--select-from", eq_from, "Pick best/worst from reconstruction snapshots here");
  eq->add_option("--out", eq_out, "Snapshot directory")->required();

  // build-s3ft
  auto* bs = app.add_subcommand("build-s3ft", "Curate raw Three.js outputs and build the training dataset");
  std::string bs_split, bs_raw, bs_model, bs_out, bs_mode = "single_view";
  std::uint64_t bs_seed = kDefaultSplitSeed;
  bs->add_option("--split", bs_split, "Split directory with meta/viewpoints.json")->required()->check(CLI::ExistingDirectory);
  bs->add_option("--raw", bs_raw, "Raw output root (<raw>/<model>/threejs/<scene>.txt)")->required()->check(CLI::ExistingDirectory);
  bs->add_option("--model", bs_model, "Model id whose outputs are curated")->required();
  bs->add_option("--mode", bs_mode, "Dataset mode")->check(CLI::IsMember({"single_view", "cross_viewpoint"}));
  bs->add_option("--seed", bs_seed, "Split seed");
  bs->add_option("--out", bs_out, "Output directory")->required();

  // select-langs
  auto* sl = app.add_subcommand("select-langs", "Best and worst language over the Code-CoT subset");
  std::string sl_snap, sl_model;
  std::vector<std::string> sl_subset;
  sl->add_option("--snapshots", sl_snap, "Snapshot directory")->required()->check(CLI::ExistingDirectory);
  sl->add_option("--model", sl_model, "Model id")->required();
  sl->add_option("--subset", sl_subset, "Language subset (default: threejs,canonical_json,blender_python,scene_dsl)")
      ->delimiter(',');

  // report
  auto* rp = app.add_subcommand("report", "Render language, QA-mode and correlation tables");
  std::vector<std::string> rp_snaps;
  bool rp_json = false;
  rp->add_option("--snapshots", rp_snaps, "Snapshot directories")->required()->check(CLI::ExistingDirectory);
  rp->add_flag("--json", rp_json, "Machine-readable output");

  // replay
  auto* rl = app.add_subcommand("replay", "Manage replay fixture stores");
  rl->require_subcommand(1);
  auto* rl_list = rl->add_subcommand("list", "List recorded keys");
  std::string rl_store;
  rl_list->add_option("--store", rl_store, "Replay store")->required()->check(CLI::ExistingDirectory);
  auto* rl_synth = rl->add_subcommand("synth", "Write synthetic responses for a split");
  RunOptions rs_run;
  std::string rs_store, rs_task = "reconstruct", rs_pattern = "o", rs_qa, rs_best, rs_worst;
  std::vector<std::string> rs_modes;
  rs_run.add(rl_synth);
  rl_synth->add_option("--store", rs_store, "Replay store")->required();
  rl_synth->add_option("--task", rs_task, "reconstruct or qa")->check(CLI::IsMember({"reconstruct", "qa"}));
  rl_synth->add_option("--pattern", rs_pattern, "Per-item kinds o,w,c,x,e,g,f (repeats)");
  rl_synth->add_option("--modes", rs_modes, "Modes to synthesize")->delimiter(',');
  rl_synth->add_option("--qa", rs_qa, "QA set (JSONL); default: <split>/qa.jsonl");
  rl_synth->add_option("--best", rs_best, "Code-CoT best language");
  rl_synth->add_option("--worst", rs_worst, "Code-CoT worst language");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

  try {
    if (*gen) {
      const fs::path out = gen_out;
      json views = json::object();
      std::vector<SplitScene> scenes;
      for (int tier : gen_tiers) {
        for (int k = 0; k < gen_per_tier; ++k) {
          GenConfig cfg;
          cfg.tier = tier;
          cfg.seed = gen_seed0 + static_cast<std::uint64_t>(k);
          cfg.viewpoints = gen_views;
          Scene s = generate_scene(cfg);
          write_file(out / (s.scene_id + ".json"), to_canonical_json(s));
          json list = json::array();
          const auto cams = camera_poses(s, cfg);
          for (std::size_t v = 0; v < cams.size(); ++v) {
            const std::string ref =
                v == 0 ? "images/" + s.scene_id + ".png" : "images/" + s.scene_id + "_v" + std::to_string(v) + ".png";
            list.push_back({{"index", v}, {"image_ref", ref}, {"camera", camera_json(cams[v])}});
          }
          views[s.scene_id] = list;
          scenes.push_back({std::move(s), ""});
        }
      }
      write_file(viewpoints_path(out), views.dump(2) + "\n");
      const auto qa = build_qa_set(scenes, gen_qa_seed);
      write_file(out / "qa.jsonl", qa_items_to_jsonl(qa));
      json manifest = {{"toolkit_version", toolkit_version()},
                       {"qa_templates", kQATemplatesVersion},
                       {"scenes", scenes.size()},
                       {"questions", qa.size()},
                       {"viewpoints", gen_views},
                       {"seed_start", gen_seed0},
                       {"qa_seed", gen_qa_seed}};
      write_file(out / "meta" / "manifest.json", manifest.dump(2) + "\n");
      spdlog::info("generated {} scenes and {} questions in {}", scenes.size(), qa.size(), out.string());
    } else if (*exp) {
      if (exp_split.empty() == exp_scene.empty()) throw Error("give exactly one of --split or --scene");
      std::vector<Scene> scenes;
      if (!exp_scene.empty()) {
        scenes.push_back(scene_from_json(read_file(exp_scene)));
      } else {
        for (auto& s : load_split(exp_split, split_size(exp_split))) scenes.push_back(std::move(s.scene));
      }
      const auto langs = parse_languages(exp_langs);
      for (const auto& s : scenes) {
        const fs::path dir = fs::path(exp_out) / s.scene_id;
        for (auto lang : langs) {
          write_file(dir / ("scene" + std::string(extension(lang))), serialize(lang, s, {.box_fallback = true}));
        }
        const Camera cam = s.camera ? *s.camera : camera_poses(s, GenConfig{}).front();
        write_file(dir / "render.py", export_render_script(s, cam));
      }
      spdlog::info("exported {} scenes to {}", scenes.size(), exp_out);
    } else if (*er) {
      RunConfig cfg = er_run.config();
      cfg.reconstruct_modes = parse_reconstruct_modes(er_modes);
      auto client = er_client.make();
      save(er_out, run_reconstruct_eval(cfg, *client));
    } else if (*eq) {
      RunConfig cfg = eq_run.config();
      cfg.qa_modes = parse_qa_modes(eq_modes);
      cfg.best_worst = resolve_best_worst(eq_best, eq_worst, eq_from, cfg.model_id);
      const fs::path qa_path = eq_qa.empty() ? fs::path(cfg.scene_split) / "qa.jsonl" : fs::path(eq_qa);
      auto qa = qa_items_from_jsonl(read_file(qa_path));
      const auto scenes = load_split(cfg.scene_split, cfg.n_scenes);
      std::erase_if(qa, [&](const QAItem& q) {
        return std::none_of(scenes.begin(), scenes.end(), [&](const auto& s) { return s.scene.scene_id == q.scene_id; });
      });
      auto client = eq_client.make();
      save(eq_out, run_qa_eval(cfg, qa, *client));
    } else if (*bs) {
      const ViewpointTable table = read_viewpoints(bs_split);
      std::vector<RawOutput> raw;
      const fs::path dir = fs::path(bs_raw) / path_component(bs_model) / "threejs";
      for (const auto& [scene_id, views] : table) {
        const fs::path f = dir / (path_component(scene_id) + ".txt");
        if (!fs::exists(f)) continue;
        raw.push_back({scene_id, views.front().image_ref, read_file(f), views.front().index});
      }
      const auto curated = phase1_curate(raw);
      const DatasetMode mode = bs_mode == "cross_viewpoint" ? DatasetMode::cross_viewpoint : DatasetMode::single_view;
      const auto split = build_dataset(curated.accepted, mode, table, bs_seed);
      const fs::path out = bs_out;
      write_file(out / ("train." + std::string(to_string(mode)) + ".jsonl"), records_to_jsonl(split.train));
      write_file(out / ("val." + std::string(to_string(mode)) + ".jsonl"), records_to_jsonl(split.val));
      write_file(out / ("manifest." + std::string(to_string(mode)) + ".json"),
                 dataset_manifest(split, mode, &curated.report));
      for (const auto& d : split.diagnostics) spdlog::debug("{}", d);
      spdlog::info("{} raw outputs, {} accepted ({:.1f}%), {} records ({} train / {} val)", raw.size(),
                   curated.report.accepted, 100.0 * curated.report.pass_rate(), split.size(), split.train.size(),
                   split.val.size());
    } else if (*sl) {
      const auto subset = sl_subset.empty() ? code_cot_language_subset() : parse_languages(sl_subset);
      const auto [best, worst] = select_best_worst_language(read_snapshots(sl_snap), sl_model, subset);
      std::cout << "best " << to_string(best) << "\nworst " << to_string(worst) << "\n";
    } else if (*rp) {
      std::vector<CellSnapshot> all;
      for (const auto& d : rp_snaps) {
        for (auto& s : read_snapshots(d)) all.push_back(std::move(s));
      }
      const Report report = build_report(all);
      std::cout << (rp_json ? render_json(report) : render_text(report));
    } else if (*rl_list) {
      for (const auto& k : ReplayStore(rl_store).keys()) {
        std::cout << k.model_id << "\t" << k.channel << "\t" << k.item_id << "\t" << k.prompt_hash << "\n";
      }
    } else if (*rl_synth) {
      RunConfig cfg = rs_run.config();
      ReplayStore store(rs_store);
      const tools::SynthSpec spec{rs_pattern, cfg.seed};
      std::size_t n = 0;
      if (rs_task == "reconstruct") {
        if (!rs_modes.empty()) cfg.reconstruct_modes = parse_reconstruct_modes(rs_modes);
        n = tools::synth_reconstruction(store, cfg, spec);
      } else {
        if (!rs_modes.empty()) cfg.qa_modes = parse_qa_modes(rs_modes);
        cfg.best_worst = resolve_best_worst(rs_best, rs_worst, "", cfg.model_id);
        const fs::path qa_path = rs_qa.empty() ? fs::path(cfg.scene_split) / "qa.jsonl" : fs::path(rs_qa);
        auto qa = qa_items_from_jsonl(read_file(qa_path));
        const auto scenes = load_split(cfg.scene_split, cfg.n_scenes);
        std::erase_if(qa, [&](const QAItem& q) {
          return std::none_of(scenes.begin(), scenes.end(),
                              [&](const auto& s) { return s.scene.scene_id == q.scene_id; });
        });
        n = tools::synth_qa(store, cfg, qa, spec);
      }
      spdlog::info("recorded {} responses in {}", n, rs_store);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
