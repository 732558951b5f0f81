#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "rifl/corpus.hpp"
#include "rifl/labels.hpp"

namespace rifl {

struct ChatRecord {
  std::string system;
  std::string user;
  std::string assistant;  // training target; empty at inference

  friend bool operator==(const ChatRecord&, const ChatRecord&) = default;
};

enum class TargetVariant {
  kReasoningAnswer,  // reasoning, one space, label
  kAnswer,           // label only
};

/// Pieces of the one template shared by stage-1 training and augmentation.
inline constexpr std::string_view kQuestionPrefix = "Question: ";
inline constexpr std::string_view kAnswerInfix = " Answer: ";
inline constexpr std::string_view kReasoningSuffix = " Reasoning: ";

inline constexpr std::string_view kDownstreamSystem = "Find the emotion in the text.";

/// System message for the zero-shot baseline profile.
inline constexpr std::string_view kZeroShotSystem =
    "Find the emotion in the text. Answer with exactly one word from this list: "
    "sadness, joy, love, anger, fear, surprise.";

/// "Question: <q> Answer: <a> Reasoning: ". Throws DataError on empty input.
std::string stage1_prompt(std::string_view question, std::string_view answer);

std::string augmentation_prompt(const TextExample& example);

ChatRecord downstream_messages(std::string_view text);
ChatRecord zeroshot_messages(std::string_view text);

/// Replaces each run of CR/LF (with adjacent blanks) by one space and trims
/// the ends.
std::string normalize_reasoning(std::string_view reasoning);

/// RA: normalize_reasoning(reasoning) + " " + label; A: label. RA throws
/// DataError when the reasoning is absent or blank.
std::string build_target(TargetVariant variant, const std::optional<std::string>& reasoning,
                         EmotionLabel label);

std::string to_jsonl(const ChatRecord& record);
ChatRecord chat_record_from_json(std::string_view line);

}  // namespace rifl
