#include "scenecode/harness/replay_store.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <tuple>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "scenecode/rng.hpp"

namespace scenecode::harness {

namespace fs = std::filesystem;

namespace {

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomically(const fs::path& p, std::string_view bytes) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, p);
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  return s;
}

}  // namespace

std::string prompt_hash(std::string_view system_text, std::string_view user_text) {
  std::uint64_t h = fnv1a64(system_text);
  h = fnv1a64("\x1f", h);
  h = fnv1a64(user_text, h);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string path_component(std::string_view text) {
  std::string out;
  for (char c : text) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    out.push_back(ok ? c : '_');
  }
  if (out.empty()) out = "_";
  if (out.front() == '.') out.front() = '_';
  return out;
}

ReplayStore::ReplayStore(fs::path root) : root_(std::move(root)) {}

fs::path ReplayStore::dir(const ReplayKey& key) const {
  return root_ / path_component(key.model_id) / path_component(key.channel);
}

fs::path ReplayStore::response_path(const ReplayKey& key) const {
  return dir(key) / (path_component(key.item_id) + ".txt");
}

void ReplayStore::record(const ReplayKey& key, std::string_view response) {
  std::lock_guard lock(mutex_);
  const fs::path d = dir(key);
  const std::string item = path_component(key.item_id);
  fs::create_directories(d);
  const auto old_hash = read_file(d / (item + ".prompt-hash"));
  const auto old = read_file(d / (item + ".txt"));
  if (old && old_hash && trim(*old_hash) == key.prompt_hash) {
    if (*old == response) return;
    throw FixtureCorruption("fixture corruption: " + (d / (item + ".txt")).string() +
                            " already holds a different response");
  }
  if ((old || fs::exists(d / (item + ".error"))) && old_hash && trim(*old_hash) != key.prompt_hash) {
    throw FixtureCorruption("fixture corruption: " + (d / item).string() +
                            " holds a response for a different prompt");
  }
  fs::remove(d / (item + ".error"));
  write_atomically(d / (item + ".txt"), response);
  write_atomically(d / (item + ".prompt-hash"), key.prompt_hash + "\n");
}

void ReplayStore::record_failure(const ReplayKey& key, std::string_view message) {
  std::lock_guard lock(mutex_);
  const fs::path d = dir(key);
  const std::string item = path_component(key.item_id);
  fs::create_directories(d);
  if (fs::exists(d / (item + ".txt"))) {
    throw FixtureCorruption("fixture corruption: " + (d / item).string() + " already holds a response");
  }
  write_atomically(d / (item + ".error"), std::string(message) + "\n");
  write_atomically(d / (item + ".prompt-hash"), key.prompt_hash + "\n");
}

std::string ReplayStore::lookup(const ReplayKey& key) const {
  const fs::path d = dir(key);
  const std::string item = path_component(key.item_id);
  const auto hash = read_file(d / (item + ".prompt-hash"));
  if (!hash) {
    throw ReplayMiss("replay miss: no fixture for model '" + key.model_id + "', channel '" +
                     key.channel + "', item '" + key.item_id + "'");
  }
  if (trim(*hash) != key.prompt_hash) {
    throw ReplayMiss("replay miss: prompt changed for " + (d / item).string() + " (stored " +
                     trim(*hash) + ", requested " + key.prompt_hash + ")");
  }
  if (const auto err = read_file(d / (item + ".error"))) {
    throw RecordedFailure("recorded client failure: " + trim(*err));
  }
  const auto text = read_file(d / (item + ".txt"));
  if (!text) throw ReplayMiss("replay miss: response file missing for " + (d / item).string());
  return *text;
}

bool ReplayStore::contains(const ReplayKey& key) const {
  try {
    lookup(key);
    return true;
  } catch (const RecordedFailure&) {
    return true;
  } catch (const ReplayMiss&) {
    return false;
  }
}

std::vector<ReplayKey> ReplayStore::keys() const {
  std::vector<ReplayKey> out;
  if (!fs::exists(root_)) return out;
  for (const auto& model : fs::directory_iterator(root_)) {
    if (!model.is_directory()) continue;
    for (const auto& channel : fs::directory_iterator(model.path())) {
      if (!channel.is_directory()) continue;
      for (const auto& f : fs::directory_iterator(channel.path())) {
        if (f.path().extension() != ".prompt-hash") continue;
        ReplayKey k;
        k.model_id = model.path().filename().string();
        k.channel = channel.path().filename().string();
        k.item_id = f.path().stem().string();
        k.prompt_hash = trim(read_file(f.path()).value_or(""));
        out.push_back(std::move(k));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ReplayKey& a, const ReplayKey& b) {
    return std::tie(a.model_id, a.channel, a.item_id) < std::tie(b.model_id, b.channel, b.item_id);
  });
  return out;
}

}  // namespace scenecode::harness
