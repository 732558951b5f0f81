#include "rifl/report.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "rifl/error.hpp"

namespace rifl {

namespace {

using wide = __int128;

// Rounds num/den (den > 0) to the nearest integer, ties away from zero.
wide round_div(wide num, wide den) {
  const bool neg = num < 0;
  const wide a = neg ? -num : num;
  const wide q = (2 * a + den) / (2 * den);
  return neg ? -q : q;
}

std::string tenths_to_string(wide tenths, bool force_sign) {
  const bool neg = tenths < 0;
  const auto mag = static_cast<unsigned long long>(neg ? -tenths : tenths);
  std::string s;
  if (neg) {
    s = "-";
  } else if (force_sign) {
    s = "+";
  }
  s += std::to_string(mag / 10) + "." + std::to_string(mag % 10);
  return s;
}

std::string capitalize(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::size_t write_all(std::ostream& out, const std::string& text) {
  out << text;
  if (!out) throw IoError("write failure");
  return text.size();
}

std::string format_z(double z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", z);
  return buf;
}

std::string format_p(double p) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", p);
  return buf;
}

std::string significance_band(double p) {
  if (p < 0.001) return "p < .001";
  if (p < 0.01) return "p < .01";
  if (p < 0.05) return "p < .05";
  return "not significant at .05";
}

}  // namespace

std::string format_percent(std::uint64_t num, std::uint64_t den) {
  if (den == 0) return "n/a";
  return tenths_to_string(round_div(wide(num) * 1000, wide(den)), false);
}

std::string format_point_difference(std::uint64_t a_num, std::uint64_t a_den, std::uint64_t b_num,
                                    std::uint64_t b_den) {
  if (a_den == 0 || b_den == 0) return "n/a";
  const wide num = (wide(a_num) * wide(b_den) - wide(b_num) * wide(a_den)) * 1000;
  return tenths_to_string(round_div(num, wide(a_den) * wide(b_den)), true);
}

std::string format_f1(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", value);
  return buf;
}

const EvalReport& ComparisonReport::run(std::string_view name) const {
  for (const auto& r : runs) {
    if (r.name == name) return r;
  }
  throw ConfigError("no run named '" + std::string(name) + "'");
}

ComparisonReport make_comparison(std::vector<EvalReport> runs, std::string proposed, std::string baseline) {
  if (runs.size() < 2) throw ConfigError("a comparison needs at least two runs");
  if (proposed.empty() || baseline.empty()) throw ConfigError("both the proposed and the baseline run must be named");
  ComparisonReport c;
  c.runs = std::move(runs);
  c.proposed = std::move(proposed);
  c.baseline = std::move(baseline);
  const auto& p = c.run(c.proposed);
  const auto& b = c.run(c.baseline);
  c.improvement_pp = 100.0 * (p.accuracy - b.accuracy);
  c.significance = two_proportion_ztest(p.correct(), p.total(), b.correct(), b.total());
  return c;
}

std::size_t render_comparison(const ComparisonReport& report, std::ostream& out) {
  const auto& p = report.run(report.proposed);
  const auto& b = report.run(report.baseline);
  std::ostringstream md;

  md << "# Model comparison\n\n";
  md << "## Accuracy\n\n";
  md << "| Model | Accuracy (%) |\n|---|---:|\n";
  for (const auto& r : report.runs) {
    md << "| " << r.name << " | " << format_percent(r.correct(), r.total()) << " |\n";
  }
  md << "| Improvement (" << report.proposed << " vs. " << report.baseline << ") | "
     << format_point_difference(p.correct(), p.total(), b.correct(), b.total()) << " |\n\n";

  const auto& sig = report.significance;
  md << "Two-proportion z-test (pooled, two-sided), " << report.proposed << " vs. " << report.baseline
     << ": z = " << format_z(sig.z) << ", p = " << format_p(sig.p_two_sided) << " ("
     << significance_band(sig.p_two_sided) << ")\n\n";

  md << "## Per-emotion accuracy (%)\n\n| Emotion |";
  for (const auto& r : report.runs) md << ' ' << r.name << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < report.runs.size(); ++i) md << "---:|";
  md << '\n';
  const auto& classes = report.runs.front().matrix.classes();
  for (std::size_t c = 0; c < classes.size(); ++c) {
    md << "| " << capitalize(classes[c]) << " |";
    for (const auto& r : report.runs) {
      if (r.matrix.classes() != classes) throw DataError("runs use different class sets");
      md << ' ' << format_percent(r.matrix.at(c, c), r.matrix.row_sum(c)) << " |";
    }
    md << '\n';
  }

  md << "\n## Macro and weighted average F1\n\n| Metric |";
  for (const auto& r : report.runs) md << ' ' << r.name << " |";
  md << "\n|---|";
  for (std::size_t i = 0; i < report.runs.size(); ++i) md << "---:|";
  md << "\n| Macro Avg F1 |";
  for (const auto& r : report.runs) md << ' ' << format_f1(r.macro_f1) << " |";
  md << "\n| Weighted Avg F1 |";
  for (const auto& r : report.runs) md << ' ' << format_f1(r.weighted_f1) << " |";
  md << '\n';
  return write_all(out, md.str());
}

std::size_t render_confusion(const ConfusionMatrix& matrix, MatrixStyle style, std::ostream& out) {
  std::ostringstream s;
  if (style == MatrixStyle::kCsv) {
    write_confusion_csv(matrix, s);
    return write_all(out, s.str());
  }
  const std::string corner = "gold\\pred";
  std::size_t label_width = corner.size();
  for (const auto& c : matrix.classes()) label_width = std::max(label_width, c.size());
  const auto cols = matrix.column_labels();
  std::vector<std::size_t> widths(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    widths[c] = cols[c].size();
    for (std::size_t r = 0; r < matrix.num_classes(); ++r) {
      widths[c] = std::max(widths[c], std::to_string(matrix.at(r, c)).size());
    }
  }
  auto pad_left = [](const std::string& v, std::size_t w) { return std::string(w - v.size(), ' ') + v; };
  auto pad_right = [](const std::string& v, std::size_t w) { return v + std::string(w - v.size(), ' '); };

  s << pad_right(corner, label_width);
  for (std::size_t c = 0; c < cols.size(); ++c) s << "  " << pad_left(cols[c], widths[c]);
  s << '\n' << std::string(label_width, '-');
  for (std::size_t c = 0; c < cols.size(); ++c) s << "  " << std::string(widths[c], '-');
  s << '\n';
  for (std::size_t r = 0; r < matrix.num_classes(); ++r) {
    s << pad_right(matrix.classes()[r], label_width);
    for (std::size_t c = 0; c < cols.size(); ++c) s << "  " << pad_left(std::to_string(matrix.at(r, c)), widths[c]);
    s << '\n';
  }
  return write_all(out, s.str());
}

std::size_t render_eval_report(const EvalReport& report, std::ostream& out) {
  const auto& m = report.matrix;
  std::ostringstream md;
  md << "# Evaluation: " << (report.name.empty() ? "unnamed run" : report.name) << "\n\n";
  md << "Accuracy (%): " << format_percent(report.correct(), report.total()) << " (" << report.correct() << "/"
     << report.total() << ")\n";
  std::uint64_t invalid = 0;
  for (std::size_t r = 0; r < m.num_classes(); ++r) invalid += m.invalid(r);
  md << "Invalid generations: " << invalid << "\n\n";
  md << "| Emotion | Precision | Recall | F1 | Support |\n|---|---:|---:|---:|---:|\n";
  bool any_degenerate = false;
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    const auto& cm = report.per_class.at(c);
    any_degenerate = any_degenerate || cm.degenerate;
    md << "| " << capitalize(m.classes()[c]) << (cm.degenerate ? "*" : "") << " | " << format_f1(cm.precision)
       << " | " << format_f1(cm.recall) << " | " << format_f1(cm.f1) << " | " << cm.support << " |\n";
  }
  md << "| Macro Avg | | | " << format_f1(report.macro_f1) << " | " << report.total() << " |\n";
  md << "| Weighted Avg | | | " << format_f1(report.weighted_f1) << " | " << report.total() << " |\n";
  if (any_degenerate) md << "\n\\* an empty denominator was scored as 0\n";
  md << "\n## Confusion matrix (rows gold, columns predicted)\n\n```\n";
  render_confusion(m, MatrixStyle::kAscii, md);
  md << "```\n";
  return write_all(out, md.str());
}

}  // namespace rifl
