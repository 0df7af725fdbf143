#include <gtest/gtest.h>

#include "scenecode/error.hpp"
#include "scenecode/qa.hpp"
#include "test_support.hpp"

using namespace scenecode;

class QAEvalCase : public ::testing::TestWithParam<sct::EvalCase> {};

TEST_P(QAEvalCase, Judges) {
  const auto& c = GetParam();
  const QAJudgment j = judge_response(c.item, c.mode, c.response);
  EXPECT_EQ(j.correct, c.correct) << "extracted: " << j.extracted;
  EXPECT_EQ(j.rule, c.rule);
  EXPECT_EQ(j.category, c.item.category);
  EXPECT_EQ(j.question_id, c.item.question_id);
}

INSTANTIATE_TEST_SUITE_P(Corpus, QAEvalCase, ::testing::ValuesIn(sct::qa_eval_cases()),
                         [](const auto& info) { return info.param.name; });

TEST(ExtractFinalAnswer, MarkerOrLastTwoLines) {
  EXPECT_EQ(extract_final_answer("code\nFinal answer: 4"), "4");
  EXPECT_EQ(extract_final_answer("Final answer: 3\nmore\nFinal answer: 5"), "5");
  EXPECT_EQ(extract_final_answer("**Final Answer:** yes"), "yes");
  EXPECT_EQ(extract_final_answer("a\n\nb\n\nc\n"), "b\nc");
  EXPECT_EQ(extract_final_answer("only"), "only");
  EXPECT_EQ(extract_final_answer(""), "");
}

TEST(QAAccuracy, CellArithmetic) {
  std::vector<QAJudgment> js;
  for (int i = 0; i < 800; ++i) {
    QAJudgment j;
    j.question_id = std::to_string(i);
    j.category = kAllCategories[static_cast<std::size_t>(i) % kAllCategories.size()];
    j.correct = i % 2 == 0;
    js.push_back(j);
  }
  const QAAccuracy a = qa_cell_accuracy(js);
  EXPECT_EQ(a.total, 800u);
  EXPECT_EQ(a.correct, 400u);
  EXPECT_EQ(a.overall, 0.5);
  std::size_t correct = 0, total = 0;
  for (const auto& [cat, ct] : a.per_category) {
    correct += ct.first;
    total += ct.second;
    EXPECT_EQ(ct.second, 160u);
  }
  EXPECT_EQ(correct, a.correct);
  EXPECT_EQ(total, a.total);
  // alternating correctness over 5 categories: odd-indexed categories see odd i
  EXPECT_EQ(a.category_accuracy(QACategory::localization), 0.5);
  EXPECT_THROW(qa_cell_accuracy({}), Error);
}

TEST(QAAccuracy, JudgmentsRoundTrip) {
  std::vector<QAJudgment> js;
  for (const auto& c : sct::qa_eval_cases()) js.push_back(judge_response(c.item, c.mode, c.response));
  const std::string text = judgments_to_jsonl(js);
  EXPECT_EQ(judgments_from_jsonl(text), js);
}
