#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rifl/labels.hpp"

namespace rifl {

inline constexpr std::string_view kInvalidColumn = "invalid";

/// Gold-by-predicted count table. Rows are the true classes; columns are the
/// same classes followed, optionally, by a predicted-only "invalid" column
/// for generations that carried no recognizable label.
class ConfusionMatrix {
 public:
  ConfusionMatrix(std::vector<std::string> classes, bool invalid_column);

  /// The six emotions in report order, with an invalid column.
  static ConfusionMatrix emotions();

  std::size_t num_classes() const { return classes_.size(); }
  std::size_t num_columns() const { return classes_.size() + (invalid_column_ ? 1 : 0); }
  bool has_invalid_column() const { return invalid_column_; }
  const std::vector<std::string>& classes() const { return classes_; }
  std::vector<std::string> column_labels() const;

  std::uint64_t at(std::size_t gold, std::size_t predicted) const;
  void add(std::size_t gold, std::size_t predicted, std::uint64_t n = 1);
  /// Count in the invalid column for `gold` (0 without such a column).
  std::uint64_t invalid(std::size_t gold) const;

  std::uint64_t row_sum(std::size_t gold) const;
  /// Column sum over real-class column `predicted`.
  std::uint64_t column_sum(std::size_t predicted) const;
  std::uint64_t trace() const;
  std::uint64_t total() const;

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  std::vector<std::string> classes_;
  bool invalid_column_;
  std::vector<std::uint64_t> cells_;  // row-major, num_classes x num_columns
};

using LabeledPair = std::pair<EmotionLabel, std::optional<EmotionLabel>>;

/// Counts (gold, predicted) pairs into ConfusionMatrix::emotions(). An absent
/// prediction lands in the invalid column. Throws DataError on empty input.
ConfusionMatrix confusion_from_pairs(std::span<const LabeledPair> pairs);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t support = 0;
  /// Set when any of the three ratios had an empty denominator.
  bool degenerate = false;
};

/// Diagonal over total. Throws DataError when the matrix is empty.
double accuracy(const ConfusionMatrix& m);

/// One entry per true class, in matrix order. Empty denominators give 0.
/// The invalid column counts toward recall misses only.
std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& m);

double macro_f1(std::span<const ClassMetrics> per_class);
double weighted_f1(std::span<const ClassMetrics> per_class);

/// Micro-averaged F1. An invalid prediction is both a miss for its gold class
/// and a wrong prediction, so this equals accuracy.
double micro_f1(const ConfusionMatrix& m);

struct SignificanceResult {
  double z = 0.0;
  double p_two_sided = 1.0;
  std::string method = "pooled two-proportion z-test";
};

/// Two-sided p = 2 (1 - Phi(|z|)) = erfc(|z| / sqrt 2). std::erfc (glibc,
/// correctly rounded to within a few ulp) keeps the absolute error far below
/// 1e-12. Throws DataError for non-finite z.
double normal_tail(double z);

/// Pooled-variance z-test for p1 = s1/n1 versus p2 = s2/n2.
SignificanceResult two_proportion_ztest(std::uint64_t successes1, std::uint64_t n1,
                                        std::uint64_t successes2, std::uint64_t n2);

struct EvalReport {
  std::string name;
  double accuracy = 0.0;
  std::vector<ClassMetrics> per_class;  // aligned with matrix.classes()
  double macro_f1 = 0.0;
  double weighted_f1 = 0.0;
  ConfusionMatrix matrix = ConfusionMatrix::emotions();

  std::uint64_t correct() const { return matrix.trace(); }
  std::uint64_t total() const { return matrix.total(); }
};

EvalReport evaluate(const ConfusionMatrix& m, std::string name = {});

std::string report_to_json(const EvalReport& report);
/// Rebuilds the report from the stored matrix; derived numbers are recomputed.
EvalReport report_from_json(std::string_view text);

// Prediction files: one {"id", "gold", "generated"} object per line.

struct PredictionRecord {
  std::uint64_t id = 0;
  EmotionLabel gold = EmotionLabel::kSadness;
  std::string generated;

  friend bool operator==(const PredictionRecord&, const PredictionRecord&) = default;
};

std::vector<PredictionRecord> read_predictions(std::istream& in);
void write_prediction(const PredictionRecord& record, std::ostream& out);

/// Extracts a label from every generation and scores the result.
EvalReport evaluate_predictions(std::span<const PredictionRecord> predictions, std::string name = {});

// Matrix CSV: header "gold\predicted,<col>...", then one row per true class.
void write_confusion_csv(const ConfusionMatrix& m, std::ostream& out);
ConfusionMatrix read_confusion_csv(std::istream& in);

}  // namespace rifl
