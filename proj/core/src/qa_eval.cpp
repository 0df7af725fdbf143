#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>

#include "scenecode/error.hpp"
#include "scenecode/qa.hpp"
#include "scenecode/scene_json.hpp"

namespace scenecode {

namespace {

bool is_mark(char c) { return c == '*' || c == '_' || c == '`'; }
bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\r'; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Lowercase, tabs/CR to spaces, runs of spaces collapsed; newlines kept.
std::string normalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char ch : text) {
    char c = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (is_blank(c)) c = ' ';
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out.push_back(c);
  }
  return out;
}

std::string trim_marks(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (is_blank(s[b]) || s[b] == '\n' || is_mark(s[b]))) ++b;
  while (e > b && (is_blank(s[e - 1]) || s[e - 1] == '\n' || is_mark(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string_view> nonempty_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!trim_marks(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::string last_lines(std::string_view text, std::size_t n) {
  const auto lines = nonempty_lines(text);
  std::string out;
  for (std::size_t i = lines.size() > n ? lines.size() - n : 0; i < lines.size(); ++i) {
    if (!out.empty()) out += "\n";
    out += trim_marks(lines[i]);
  }
  return out;
}

struct MarkerHit {
  std::size_t start = 0;
  std::size_t value = 0;  // first character after the marker
};

// Occurrences of `marker` (already normalized) starting on a word boundary,
// followed by optional emphasis and a colon when required.
std::vector<MarkerHit> find_markers(const std::string& text, std::string_view marker, bool colon_required) {
  std::vector<MarkerHit> hits;
  for (std::size_t pos = text.find(marker); pos != std::string::npos; pos = text.find(marker, pos + 1)) {
    if (pos > 0 && is_word(text[pos - 1])) continue;
    std::size_t i = pos + marker.size();
    if (i < text.size() && is_word(text[i])) continue;
    while (i < text.size() && (is_blank(text[i]) || is_mark(text[i]))) ++i;
    if (i < text.size() && text[i] == ':') {
      ++i;
    } else if (colon_required) {
      continue;
    }
    while (i < text.size() && (is_blank(text[i]) || is_mark(text[i]))) ++i;
    hits.push_back({pos, i});
  }
  return hits;
}

// Rest of the marker's line; when that is empty, the next non-empty line.
std::string value_after(const std::string& text, std::size_t value) {
  std::size_t end = text.find('\n', value);
  std::string v = trim_marks(std::string_view(text).substr(value, end == std::string::npos ? std::string::npos : end - value));
  while (v.empty() && end != std::string::npos) {
    const std::size_t next = end + 1;
    end = text.find('\n', next);
    v = trim_marks(std::string_view(text).substr(next, end == std::string::npos ? std::string::npos : end - next));
  }
  return v;
}

// A line made only of a "final answer" heading, e.g. "## Final Answer".
std::optional<std::size_t> last_heading_marker(const std::string& text) {
  std::optional<std::size_t> found;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string line;
    for (std::size_t i = start; i < end; ++i) {
      if (text[i] != '#' && !is_mark(text[i]) && text[i] != '>') line.push_back(text[i]);
    }
    line = trim_marks(line);
    if (line == "final answer") found = end;
    start = end + 1;
  }
  return found;
}

struct Number {
  double value = 0.0;
  bool integral = false;
  std::size_t start = 0;
  std::string text;
};

std::vector<Number> numbers(std::string_view s, bool signed_values) {
  std::vector<Number> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const bool digit = std::isdigit(static_cast<unsigned char>(s[i])) != 0;
    const bool dot_digit = s[i] == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1]));
    if (!digit && !dot_digit) {
      ++i;
      continue;
    }
    if (i > 0 && std::isalpha(static_cast<unsigned char>(s[i - 1])) && !signed_values) {
      // digits glued to a word (e.g. "t1", "3d") are not counts
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
      continue;
    }
    std::size_t b = i;
    if (signed_values && b > 0 && (s[b - 1] == '-' || s[b - 1] == '+')) --b;
    std::size_t e = i;
    bool integral = true;
    while (e < s.size() && std::isdigit(static_cast<unsigned char>(s[e]))) ++e;
    if (e + 1 < s.size() && s[e] == '.' && std::isdigit(static_cast<unsigned char>(s[e + 1]))) {
      integral = false;
      ++e;
      while (e < s.size() && std::isdigit(static_cast<unsigned char>(s[e]))) ++e;
    } else if (e < s.size() && s[e] == '.' && digit && signed_values) {
      ++e;  // "1." as a float
    }
    if (signed_values && e + 1 < s.size() && (s[e] == 'e' || s[e] == 'E')) {
      std::size_t k = e + 1;
      if (k < s.size() && (s[k] == '-' || s[k] == '+')) ++k;
      if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
        while (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) ++k;
        e = k;
        integral = false;
      }
    }
    Number n;
    n.text = std::string(s.substr(b, e - b));
    n.value = std::strtod(n.text.c_str(), nullptr);
    n.integral = integral;
    n.start = b;
    out.push_back(std::move(n));
    i = e;
  }
  return out;
}

std::optional<std::string> yes_no_at(const std::string& s, std::size_t pos) {
  for (std::string_view w : {"yes", "no"}) {
    if (s.compare(pos, w.size(), w) == 0 && (pos + w.size() >= s.size() || !is_word(s[pos + w.size()])) &&
        (pos == 0 || !is_word(s[pos - 1]))) {
      return std::string(w);
    }
  }
  return std::nullopt;
}

QAJudgment verdict(const QAItem& item, bool correct, std::string extracted, std::string rule) {
  return {item.question_id, item.category, correct, std::move(extracted), std::move(rule)};
}

QAJudgment judge_counting(const QAItem& item, const std::string& text) {
  const long gt = item.count.value_or(std::atol(item.gt_answer.c_str()));
  std::optional<MarkerHit> best;
  for (std::string_view m : {"final answer", "the answer is", "total"}) {
    for (const auto& h : find_markers(text, m, m != "the answer is")) {
      const auto nums = numbers(std::string_view(text).substr(h.value), false);
      if (nums.empty() || nums.front().start != 0 || !nums.front().integral) continue;
      if (!best || h.start > best->start) best = h;
    }
  }
  if (best) {
    const Number n = numbers(std::string_view(text).substr(best->value), false).front();
    return verdict(item, static_cast<long>(n.value) == gt, n.text, "marker_integer");
  }
  const auto nums = numbers(text, false);
  for (auto it = nums.rbegin(); it != nums.rend(); ++it) {
    if (it->integral) return verdict(item, static_cast<long>(it->value) == gt, it->text, "last_integer");
  }
  return verdict(item, false, "", "no_extraction");
}

QAJudgment judge_existence(const QAItem& item, const std::string& text) {
  const std::string gt = item.exists ? (*item.exists ? "yes" : "no") : item.gt_answer;
  std::optional<std::pair<std::size_t, std::string>> best;
  for (std::string_view m : {"final answer", "the answer is", "answer"}) {
    for (const auto& h : find_markers(text, m, false)) {
      if (auto yn = yes_no_at(text, h.value); yn && (!best || h.start > best->first)) best = {{h.start, *yn}};
    }
  }
  if (best) return verdict(item, best->second == gt, best->second, "marker_yes_no");
  for (std::size_t pos = text.size(); pos-- > 0;) {
    if (auto yn = yes_no_at(text, pos)) return verdict(item, *yn == gt, *yn, "last_yes_no");
  }
  return verdict(item, false, "", "no_extraction");
}

std::string committed_segment(const std::string& text) {
  std::optional<MarkerHit> best;
  for (std::string_view m : {"final answer", "answer"}) {
    for (const auto& h : find_markers(text, m, true)) {
      if (!best || h.start > best->start) best = h;
    }
  }
  if (best) return value_after(text, best->value);
  if (auto heading = last_heading_marker(text)) return value_after(text, *heading);
  return last_lines(text, 2);
}

std::string phrase_key(std::string_view s) {
  std::string out;
  for (char c : normalize(s)) {
    if (is_mark(c)) continue;
    if (c == '-' || c == '\n') c = ' ';
    if (c == ' ' && !out.empty() && out.back() == ' ') continue;
    out.push_back(c);
  }
  return out;
}

QAJudgment judge_phrase(const QAItem& item, const std::string& text) {
  const std::string segment = committed_segment(text);
  if (segment.empty()) return verdict(item, false, "", "no_extraction");
  const std::string key = phrase_key(segment);
  std::vector<std::string> phrases = item.accepted;
  if (phrases.empty()) phrases.push_back(item.gt_answer);
  const bool hit = std::any_of(phrases.begin(), phrases.end(), [&](const std::string& p) {
    const std::string k = phrase_key(p);
    return !k.empty() && key.find(k) != std::string::npos;
  });
  return verdict(item, hit, segment, "committed_segment");
}

QAJudgment judge_localization(const QAItem& item, const std::string& text) {
  const auto nums = numbers(text, true);
  if (nums.size() < 3 || !item.location) return verdict(item, false, "", "no_extraction");
  const Vec3 got{nums[0].value, nums[1].value, nums[2].value};
  const double tol = item.tolerance.value_or(kLocalizationTolerance);
  const bool ok = got.finite() && max_abs_diff(got, *item.location) <= tol + 1e-12;
  return verdict(item, ok, "(" + nums[0].text + ", " + nums[1].text + ", " + nums[2].text + ")",
                 "first_three_numbers");
}

}  // namespace

std::string extract_final_answer(std::string_view response) {
  const std::string text = normalize(response);
  const auto hits = find_markers(text, "final answer", true);
  const auto heading = last_heading_marker(text);
  std::optional<std::size_t> value;
  std::size_t where = 0;
  if (!hits.empty()) {
    value = hits.back().value;
    where = hits.back().start;
  }
  if (heading && (!value || *heading > where)) value = *heading;
  if (value) {
    // Map back onto the original text so the answer keeps its casing.
    const std::string original = [&] {
      std::string out;
      for (char ch : response) {
        char c = is_blank(ch) ? ' ' : ch;
        if (c == ' ' && !out.empty() && out.back() == ' ') continue;
        out.push_back(c);
      }
      return out;
    }();
    return value_after(original, *value);
  }
  return last_lines(response, 2);
}

QAJudgment evaluate_qa_answer(const QAItem& item, std::string_view response) {
  const std::string text = normalize(response);
  switch (item.category) {
    case QACategory::counting: return judge_counting(item, text);
    case QACategory::existence: return judge_existence(item, text);
    case QACategory::relationship:
    case QACategory::comparison: return judge_phrase(item, text);
    case QACategory::localization: return judge_localization(item, text);
  }
  return verdict(item, false, "", "no_extraction");
}

QAJudgment judge_response(const QAItem& item, const InferenceMode& mode, std::string_view response) {
  if (mode.kind == ModeKind::code_cot) return evaluate_qa_answer(item, extract_final_answer(response));
  return evaluate_qa_answer(item, response);
}

double QAAccuracy::category_accuracy(QACategory c) const {
  const auto it = per_category.find(c);
  if (it == per_category.end() || it->second.second == 0) return 0.0;
  return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
}

QAAccuracy qa_cell_accuracy(const std::vector<QAJudgment>& judgments) {
  if (judgments.empty()) throw Error("no judgments");
  QAAccuracy acc;
  for (const auto& j : judgments) {
    ++acc.total;
    auto& [ok, n] = acc.per_category[j.category];
    ++n;
    if (j.correct) {
      ++acc.correct;
      ++ok;
    }
  }
  acc.overall = static_cast<double>(acc.correct) / static_cast<double>(acc.total);
  return acc;
}

}  // namespace scenecode
