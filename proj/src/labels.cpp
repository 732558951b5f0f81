#include "rifl/labels.hpp"

namespace rifl {

namespace {
constexpr std::array<std::string_view, kNumEmotions> kWords = {
    "sadness", "joy", "love", "anger", "fear", "surprise",
};
}  // namespace

std::string_view to_string(EmotionLabel label) {
  return kWords[static_cast<std::size_t>(label)];
}

std::optional<EmotionLabel> label_from_string(std::string_view word) {
  for (std::size_t i = 0; i < kWords.size(); ++i) {
    if (kWords[i] == word) return static_cast<EmotionLabel>(i);
  }
  return std::nullopt;
}

std::optional<EmotionLabel> label_from_code(long long code) {
  if (code < 0 || code >= static_cast<long long>(kNumEmotions)) return std::nullopt;
  return static_cast<EmotionLabel>(code);
}

std::size_t report_index(EmotionLabel label) {
  for (std::size_t i = 0; i < kReportOrder.size(); ++i) {
    if (kReportOrder[i] == label) return i;
  }
  return kReportOrder.size();
}

}  // namespace rifl
