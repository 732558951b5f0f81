// Test-only reference computations. Nothing here calls into the metric or
// extraction code it is used to check.
#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rifl/metrics.hpp"

namespace rifl::oracle {

/// A random confusion matrix with 1..6 true classes, an optional invalid
/// column and cells in [0, max_cell]. Never all-zero.
inline ConfusionMatrix random_matrix(std::mt19937_64& rng, std::uint64_t max_cell = 1000) {
  std::uniform_int_distribution<int> k_dist(1, 6);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution sparse(0.2);
  const int k = k_dist(rng);
  std::vector<std::string> classes;
  for (int i = 0; i < k; ++i) classes.push_back("c" + std::to_string(i));
  ConfusionMatrix m(classes, coin(rng));
  std::uniform_int_distribution<std::uint64_t> cell(0, max_cell);
  for (std::size_t r = 0; r < m.num_classes(); ++r) {
    for (std::size_t c = 0; c < m.num_columns(); ++c) {
      if (!sparse(rng)) m.add(r, c, cell(rng));
    }
  }
  if (m.total() == 0) m.add(0, 0, 1);
  return m;
}

struct OracleClass {
  double precision = 0, recall = 0, f1 = 0;
  std::uint64_t support = 0;
};

struct OracleResult {
  std::vector<OracleClass> per_class;
  double accuracy = 0, macro = 0, weighted = 0, micro_f1 = 0, weighted_recall = 0;
};

/// Expands the matrix into individual (gold, predicted) pairs, with -1 for
/// invalid, and counts TP / FP / FN by walking them one at a time.
inline OracleResult brute_force(const ConfusionMatrix& m) {
  const int k = static_cast<int>(m.num_classes());
  std::vector<std::pair<int, int>> pairs;
  for (int r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < m.num_columns(); ++c) {
      const int predicted = static_cast<int>(c) < k ? static_cast<int>(c) : -1;
      for (std::uint64_t n = 0; n < m.at(r, c); ++n) pairs.emplace_back(r, predicted);
    }
  }
  OracleResult out;
  out.per_class.resize(k);
  std::uint64_t correct = 0, micro_tp = 0, micro_fp = 0, micro_fn = 0;
  for (int cls = 0; cls < k; ++cls) {
    std::uint64_t tp = 0, fp = 0, fn = 0;
    for (const auto& [g, p] : pairs) {
      if (g == cls && p == cls) ++tp;
      if (g != cls && p == cls) ++fp;
      if (g == cls && p != cls) ++fn;
    }
    auto& oc = out.per_class[cls];
    oc.support = tp + fn;
    oc.precision = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    oc.recall = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    oc.f1 = oc.precision + oc.recall == 0 ? 0.0 : 2 * oc.precision * oc.recall / (oc.precision + oc.recall);
    micro_tp += tp;
    micro_fp += fp;
    micro_fn += fn;
  }
  std::uint64_t invalid = 0;
  for (const auto& [g, p] : pairs) {
    if (g == p) ++correct;
    if (p == -1) ++invalid;
  }
  micro_fp += invalid;  // an invalid prediction is a wrong prediction
  const double n = static_cast<double>(pairs.size());
  out.accuracy = double(correct) / n;
  double macro = 0, weighted = 0, wrecall = 0;
  for (const auto& oc : out.per_class) {
    macro += oc.f1;
    weighted += double(oc.support) * oc.f1;
    wrecall += double(oc.support) * oc.recall;
  }
  out.macro = macro / k;
  out.weighted = weighted / n;
  out.weighted_recall = wrecall / n;
  const double mp = double(micro_tp) / double(micro_tp + micro_fp);
  const double mr = double(micro_tp) / double(micro_tp + micro_fn);
  out.micro_f1 = mp + mr == 0 ? 0.0 : 2 * mp * mr / (mp + mr);
  return out;
}

/// Reasoning text salted with emotion words, near misses and punctuation.
inline std::string decoy_reasoning(std::mt19937_64& rng) {
  static const std::vector<std::string> kFiller = {
      "the",  "text",  "describes", "a",   "feeling", "of",     "being", "controlled",
      "this", "sense", "points",    "toward", "user",  "expresses", "clearly", "context",
  };
  static const std::vector<std::string> kDecoys = {
      "joy",     "sadness", "love",      "anger",  "fear",     "surprise", "Joy",      "FEAR",
      "Sadness", "LOVE",    "joyful",    "enjoy",  "lovely",   "fearful",  "angered",  "surprised",
      "joys",    "loves",   "sadnesses", "fears",  "overjoy",  "joy2",     "x-joy-y",  "\"anger\"",
      "(love)",  "fear.",   "sadness,",  "joy's",  "surprise!", "joyé",    "lovélove",
  };
  static const std::vector<std::string> kSeparators = {" ", "  ", "\n", ", ", ". ", " - ", "\t", "\r\n", "; "};
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_int_distribution<std::size_t> filler(0, kFiller.size() - 1);
  std::uniform_int_distribution<std::size_t> decoy(0, kDecoys.size() - 1);
  std::uniform_int_distribution<std::size_t> sep(0, kSeparators.size() - 1);
  std::bernoulli_distribution pick_decoy(0.3);
  std::string out = "The text";
  const int n = len(rng);
  for (int i = 0; i < n; ++i) {
    out += kSeparators[sep(rng)];
    out += pick_decoy(rng) ? kDecoys[decoy(rng)] : kFiller[filler(rng)];
  }
  std::bernoulli_distribution trailing(0.3);
  if (trailing(rng)) out += kSeparators[sep(rng)];
  return out;
}

/// Flattens the emitted YAML into "key" / "parent.child" -> value, and picks
/// up "# key: value" comment entries (without any trailing parenthetical).
inline std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line, parent;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      auto body = line.substr(2);
      auto colon = body.find(": ");
      if (colon == std::string::npos) continue;
      auto value = body.substr(colon + 2);
      if (auto paren = value.find(" ("); paren != std::string::npos) value.resize(paren);
      out["#" + body.substr(0, colon)] = value;
      continue;
    }
    if (line.rfind("  - ", 0) == 0 || line.rfind("    ", 0) == 0) continue;  // datasets list
    const bool nested = line.rfind("  ", 0) == 0;
    auto stripped = nested ? line.substr(2) : line;
    auto colon = stripped.find(':');
    auto key = stripped.substr(0, colon);
    auto value = colon + 1 < stripped.size() ? stripped.substr(colon + 2) : std::string{};
    if (!nested) {
      parent = key;
      if (!value.empty()) out[key] = value;
    } else {
      out[parent + "." + key] = value;
    }
  }
  return out;
}

}  // namespace rifl::oracle
