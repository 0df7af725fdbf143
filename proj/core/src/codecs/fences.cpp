#include <string>
#include <vector>

#include "scenecode/codecs.hpp"

namespace scenecode {

namespace {

bool is_fence(std::string_view line) {
  const auto b = line.find_first_not_of(" \t");
  return b != std::string_view::npos && line.substr(b).starts_with("```");
}

}  // namespace

std::string strip_code_fences(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    const std::size_t end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(start, end - start);
    if (line.ends_with('\r')) line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }

  bool found = false;
  std::string best;
  std::size_t best_len = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!is_fence(lines[i])) continue;
    std::size_t j = i + 1;
    std::string body;
    std::size_t len = 0;
    for (; j < lines.size() && !is_fence(lines[j]); ++j) {
      if (j > i + 1) body += '\n';
      body += lines[j];
      len += lines[j].size() + 1;
    }
    if (!found || len > best_len) {
      best = std::move(body);
      best_len = len;
      found = true;
    }
    i = j;  // skip past the closing fence
  }
  return found ? best : std::string(text);
}

}  // namespace scenecode
