#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "rifl/error.hpp"
#include "rifl/labels.hpp"

namespace rifl {

struct TextExample {
  std::uint64_t id = 0;
  std::string text;
  EmotionLabel label = EmotionLabel::kSadness;

  friend bool operator==(const TextExample&, const TextExample&) = default;
};

struct ReasoningTriple {
  std::string question;
  std::string answer;
  std::string reasoning;

  friend bool operator==(const ReasoningTriple&, const ReasoningTriple&) = default;
};

/// Field names used when reading example records. The id field is optional
/// per record; missing ids are assigned from the record's position.
struct ExampleFormat {
  std::string text_field = "text";
  std::string label_field = "label";
  std::string id_field = "id";
};

std::vector<TextExample> ingest_examples(std::istream& in, const ExampleFormat& format = {});
std::size_t emit_examples(const std::vector<TextExample>& examples, std::ostream& out);

std::vector<ReasoningTriple> ingest_triples(std::istream& in);
std::size_t emit_triples(const std::vector<ReasoningTriple>& triples, std::ostream& out);

std::vector<TextExample> read_examples_file(const std::string& path, const ExampleFormat& format = {});
std::vector<ReasoningTriple> read_triples_file(const std::string& path);

/// Strips leading/trailing ASCII whitespace; interior bytes are untouched.
std::string trim(std::string_view s);

// Shuffling
//
// Splits use a Fisher-Yates shuffle driven by std::mt19937_64 (whose output
// sequence is fixed by the standard) and rejection sampling for bounded
// draws. std::shuffle and std::uniform_int_distribution are avoided because
// their outputs are implementation-defined.

/// Uniform integer in [0, bound) from `gen`. `bound` must be positive.
std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound);

/// Deterministic permutation of 0..n-1 for `seed`.
std::vector<std::size_t> portable_permutation(std::size_t n, std::uint64_t seed);

template <typename T>
struct TrainValidation {
  std::vector<T> train;
  std::vector<T> validation;
};

inline constexpr std::size_t kMinSplitSize = 5;

/// Shuffles under `seed`, sends the first floor(0.8 n) items to train and the
/// rest to validation. Requires n >= 5.
template <typename T>
TrainValidation<T> split_80_20(const std::vector<T>& items, std::uint64_t seed) {
  if (items.size() < kMinSplitSize) {
    throw DataError("split needs at least " + std::to_string(kMinSplitSize) + " items, got " +
                    std::to_string(items.size()));
  }
  const auto order = portable_permutation(items.size(), seed);
  const std::size_t n_train = items.size() * 4 / 5;
  TrainValidation<T> out;
  out.train.reserve(n_train);
  out.validation.reserve(items.size() - n_train);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? out.train : out.validation).push_back(items[order[i]]);
  }
  return out;
}

struct DatasetSplit {
  std::vector<TextExample> train;
  std::vector<TextExample> validation;
  std::vector<TextExample> test;
};

/// Throws DataError when two parts share an id.
void check_disjoint(const DatasetSplit& split);

struct ClassDistribution {
  std::array<std::size_t, kNumEmotions> counts{};  // indexed by integer code
  std::size_t total = 0;

  std::size_t count(EmotionLabel label) const { return counts[static_cast<std::size_t>(label)]; }
  /// Unrounded 100 * count / total.
  double percentage(EmotionLabel label) const;
  /// 1000 * count / total rounded half-up in exact integer arithmetic.
  long long percentage_tenths(EmotionLabel label) const;
};

ClassDistribution class_distribution(const std::vector<TextExample>& examples);

}  // namespace rifl
