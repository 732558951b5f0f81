#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <utility>

#include "rifl/labels.hpp"

namespace rifl {

struct ExtractionResult {
  enum class Status { kFound, kNotFound };

  std::optional<EmotionLabel> label;
  /// Byte offsets [first, second) of the matched word in the input.
  std::optional<std::pair<std::size_t, std::size_t>> matched_span;
  Status status = Status::kNotFound;

  bool found() const { return status == Status::kFound; }
};

/// Returns the last maximal alphabetic run that equals one of the six label
/// words, compared case-insensitively. Non-ASCII bytes count as letters, so
/// "joyé" is one run and does not match.
ExtractionResult extract_label(std::string_view text);

}  // namespace rifl
