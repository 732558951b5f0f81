#include "rifl/prompting.hpp"

#include <json.hpp>

namespace rifl {

std::string stage1_prompt(std::string_view question, std::string_view answer) {
  if (question.empty()) throw DataError("stage-1 prompt needs a non-empty question");
  if (answer.empty()) throw DataError("stage-1 prompt needs a non-empty answer");
  std::string out;
  out.reserve(kQuestionPrefix.size() + question.size() + kAnswerInfix.size() + answer.size() +
              kReasoningSuffix.size());
  out.append(kQuestionPrefix).append(question);
  out.append(kAnswerInfix).append(answer);
  out.append(kReasoningSuffix);
  return out;
}

std::string augmentation_prompt(const TextExample& example) {
  return stage1_prompt(example.text, to_string(example.label));
}

ChatRecord downstream_messages(std::string_view text) {
  if (text.empty()) throw DataError("downstream message needs non-empty text");
  return ChatRecord{std::string(kDownstreamSystem), std::string(text), {}};
}

ChatRecord zeroshot_messages(std::string_view text) {
  if (text.empty()) throw DataError("zero-shot message needs non-empty text");
  return ChatRecord{std::string(kZeroShotSystem), std::string(text), {}};
}

std::string normalize_reasoning(std::string_view reasoning) {
  auto is_break = [](char c) { return c == '\n' || c == '\r'; };
  auto is_blank = [](char c) { return c == ' ' || c == '\t'; };
  std::string out;
  out.reserve(reasoning.size());
  std::size_t i = 0;
  while (i < reasoning.size()) {
    if (!is_break(reasoning[i])) {
      out.push_back(reasoning[i++]);
      continue;
    }
    while (!out.empty() && is_blank(out.back())) out.pop_back();
    while (i < reasoning.size() && (is_break(reasoning[i]) || is_blank(reasoning[i]))) ++i;
    out.push_back(' ');
  }
  return trim(out);
}

std::string build_target(TargetVariant variant, const std::optional<std::string>& reasoning,
                         EmotionLabel label) {
  if (variant == TargetVariant::kAnswer) return std::string(to_string(label));
  if (!reasoning) throw DataError("reasoning target requires a reasoning");
  auto body = normalize_reasoning(*reasoning);
  if (body.empty()) throw DataError("reasoning target requires a non-empty reasoning");
  body.push_back(' ');
  body.append(to_string(label));
  return body;
}

std::string to_jsonl(const ChatRecord& record) {
  nlohmann::ordered_json j;
  j["system"] = record.system;
  j["user"] = record.user;
  j["assistant"] = record.assistant;
  return j.dump();
}

ChatRecord chat_record_from_json(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error&) {
    throw DataError("malformed chat record");
  }
  if (!j.is_object()) throw DataError("chat record is not an object");
  ChatRecord r;
  try {
    r.system = j.at("system").get<std::string>();
    r.user = j.at("user").get<std::string>();
    r.assistant = j.value("assistant", std::string{});
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad chat record: ") + e.what());
  }
  return r;
}

}  // namespace rifl
