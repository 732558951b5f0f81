#include "rifl/extract.hpp"

#include <string>

namespace rifl {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

}  // namespace

ExtractionResult extract_label(std::string_view text) {
  // Scan runs right to left and stop at the first hit.
  std::size_t end = text.size();
  std::string word;
  while (end > 0) {
    while (end > 0 && !is_word_byte(static_cast<unsigned char>(text[end - 1]))) --end;
    std::size_t begin = end;
    while (begin > 0 && is_word_byte(static_cast<unsigned char>(text[begin - 1]))) --begin;
    if (begin == end) break;
    const std::size_t len = end - begin;
    if (len >= 3 && len <= 8) {
      word.assign(text.substr(begin, len));
      for (auto& c : word) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      if (auto label = label_from_string(word)) {
        return {label, std::make_pair(begin, end), ExtractionResult::Status::kFound};
      }
    }
    end = begin;
  }
  return {};
}

}  // namespace rifl
