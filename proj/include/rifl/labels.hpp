#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace rifl {

/// The six emotion classes of the target dataset. Enumerator values are the
/// dataset's published integer codes.
enum class EmotionLabel : int {
  kSadness = 0,
  kJoy = 1,
  kLove = 2,
  kAnger = 3,
  kFear = 4,
  kSurprise = 5,
};

inline constexpr std::size_t kNumEmotions = 6;

/// Integer-code order (sadness=0 ... surprise=5).
inline constexpr std::array<EmotionLabel, kNumEmotions> kCodeOrder = {
    EmotionLabel::kSadness, EmotionLabel::kJoy,  EmotionLabel::kLove,
    EmotionLabel::kAnger,   EmotionLabel::kFear, EmotionLabel::kSurprise,
};

/// Descending test-set support order, used by every rendered table.
inline constexpr std::array<EmotionLabel, kNumEmotions> kReportOrder = {
    EmotionLabel::kJoy,  EmotionLabel::kSadness, EmotionLabel::kAnger,
    EmotionLabel::kFear, EmotionLabel::kLove,    EmotionLabel::kSurprise,
};

std::string_view to_string(EmotionLabel label);

/// Exact match against the lowercase canonical words.
std::optional<EmotionLabel> label_from_string(std::string_view word);

std::optional<EmotionLabel> label_from_code(long long code);

/// Position of `label` in kReportOrder.
std::size_t report_index(EmotionLabel label);

}  // namespace rifl
