#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "rifl/metrics.hpp"

namespace rifl {

// Render-time rounding. All stored values stay unrounded; these helpers work
// from exact integer ratios where one exists so that ties round half away
// from zero instead of falling on whichever side the double landed.

/// 100 * num / den to one decimal, e.g. (1168, 2000) -> "58.4".
std::string format_percent(std::uint64_t num, std::uint64_t den);

/// 100 * (a_num/a_den - b_num/b_den) to one decimal with an explicit sign,
/// e.g. "+8.7", "-1.2", "+0.0".
std::string format_point_difference(std::uint64_t a_num, std::uint64_t a_den, std::uint64_t b_num,
                                    std::uint64_t b_den);

/// Fixed four decimals.
std::string format_f1(double value);

struct ComparisonReport {
  std::vector<EvalReport> runs;
  std::string proposed;  // run names
  std::string baseline;
  double improvement_pp = 0.0;
  SignificanceResult significance;

  const EvalReport& run(std::string_view name) const;
};

/// Computes the accuracy difference and the z-test between the designated
/// runs. Throws ConfigError for fewer than two runs or an unknown role name.
ComparisonReport make_comparison(std::vector<EvalReport> runs, std::string proposed, std::string baseline);

/// Markdown: accuracy table with improvement row, z-test line, per-emotion
/// accuracy table and macro/weighted F1 table. Returns bytes written.
std::size_t render_comparison(const ComparisonReport& report, std::ostream& out);

enum class MatrixStyle { kAscii, kCsv };

std::size_t render_confusion(const ConfusionMatrix& matrix, MatrixStyle style, std::ostream& out);

/// Markdown summary of one run.
std::size_t render_eval_report(const EvalReport& report, std::ostream& out);

}  // namespace rifl
