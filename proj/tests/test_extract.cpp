#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "rifl/extract.hpp"
#include "rifl/prompting.hpp"

using namespace rifl;

TEST(Extract, SingleMatchAtTail) {
  const auto r = extract_label("The feeling described is clearly negative. sadness");
  ASSERT_TRUE(r.found());
  EXPECT_EQ(r.label, EmotionLabel::kSadness);
}

TEST(Extract, LastMatchWins) {
  // Reasoning argues for joy; the appended prediction is fear.
  const std::string text =
      "The text describes a feeling of detachment and being controlled, like a \"strange little doll.\" "
      "This sense of alienation and lack of agency points toward joy. fear";
  const auto r = extract_label(text);
  ASSERT_TRUE(r.found());
  EXPECT_EQ(r.label, EmotionLabel::kFear);
  EXPECT_EQ(r.matched_span, std::make_pair(text.size() - 4, text.size()));
}

TEST(Extract, NearMissesDoNotMatch) {
  EXPECT_FALSE(extract_label("I was joyful about it").found());
  EXPECT_FALSE(extract_label("enjoy lovely fearful").found());
  EXPECT_FALSE(extract_label("").found());
  EXPECT_FALSE(extract_label("   .,;  ").found());
  EXPECT_FALSE(extract_label("joy\xc3\xa9").found());
}

TEST(Extract, PunctuationAndDigitsSeparate) {
  EXPECT_EQ(extract_label("(anger)").label, EmotionLabel::kAnger);
  EXPECT_EQ(extract_label("label:love.").label, EmotionLabel::kLove);
  EXPECT_EQ(extract_label("3surprise3").label, EmotionLabel::kSurprise);
  EXPECT_EQ(extract_label("sadness\njoy\n").label, EmotionLabel::kJoy);
}

TEST(Extract, CaseInsensitive) {
  EXPECT_EQ(extract_label("JOY").label, EmotionLabel::kJoy);
  EXPECT_EQ(extract_label("It is Fear").label, EmotionLabel::kFear);
  std::mt19937_64 rng(4);
  for (int i = 0; i < 2000; ++i) {
    const auto s = oracle::decoy_reasoning(rng);
    auto upper = s;
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return c >= 'a' && c <= 'z' ? char(c - 32) : char(c); });
    const auto a = extract_label(s);
    const auto b = extract_label(upper);
    ASSERT_EQ(a.label, b.label) << s;
    ASSERT_EQ(a.matched_span, b.matched_span) << s;
  }
}

TEST(Extract, SpanIsRightmostCompleteRun) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto s = oracle::decoy_reasoning(rng);
    const auto r = extract_label(s);
    if (!r.found()) continue;
    const auto [b, e] = *r.matched_span;
    ASSERT_LE(e, s.size());
    auto word = s.substr(b, e - b);
    std::transform(word.begin(), word.end(), word.begin(), [](unsigned char c) { return char(std::tolower(c)); });
    ASSERT_EQ(word, to_string(*r.label));
    // Nothing after the span extracts to a label.
    ASSERT_FALSE(extract_label(std::string_view(s).substr(e)).found()) << s;
    auto is_alpha = [](unsigned char c) { return std::isalpha(c) || c >= 0x80; };
    if (b > 0) {
      ASSERT_FALSE(is_alpha(s[b - 1]));
    }
    if (e < s.size()) {
      ASSERT_FALSE(is_alpha(s[e]));
    }
  }
}
