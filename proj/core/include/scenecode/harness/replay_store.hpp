#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "scenecode/error.hpp"

namespace scenecode::harness {

// Identifies one raw model response. `channel` is a language for
// reconstruction and an inference mode for QA; `item_id` is a scene id or a
// question id.
struct ReplayKey {
  std::string model_id;
  std::string item_id;
  std::string channel;
  std::string prompt_hash;  // 16 lowercase hex digits

  bool operator==(const ReplayKey&) const = default;
};

std::string prompt_hash(std::string_view system_text, std::string_view user_text);

class ReplayMiss : public Error {
 public:
  using Error::Error;
};

class FixtureCorruption : public Error {
 public:
  using Error::Error;
};

// Thrown on lookup of a response recorded as a client failure.
class RecordedFailure : public Error {
 public:
  using Error::Error;
};

// Files under <root>/<model>/<channel>/:
//   <item>.txt          raw response bytes
//   <item>.prompt-hash  hash of the prompt that produced it
//   <item>.error        present instead of .txt for a recorded client failure
class ReplayStore {
 public:
  explicit ReplayStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }

  // Re-recording identical bytes is a no-op; different bytes throw
  // FixtureCorruption("fixture corruption").
  void record(const ReplayKey& key, std::string_view response);
  void record_failure(const ReplayKey& key, std::string_view message);

  // Throws ReplayMiss for unknown keys or a prompt-hash mismatch and
  // RecordedFailure for recorded failures. Never returns a fallback.
  std::string lookup(const ReplayKey& key) const;
  bool contains(const ReplayKey& key) const;

  std::vector<ReplayKey> keys() const;

  std::filesystem::path response_path(const ReplayKey& key) const;

 private:
  std::filesystem::path dir(const ReplayKey& key) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

// Path-safe rendering of a model id, channel or item id.
std::string path_component(std::string_view text);

}  // namespace scenecode::harness
