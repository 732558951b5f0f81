#include "rifl/metrics.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "rifl/error.hpp"
#include "rifl/extract.hpp"

namespace rifl {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> classes, bool invalid_column)
    : classes_(std::move(classes)), invalid_column_(invalid_column) {
  if (classes_.empty()) throw DataError("confusion matrix needs at least one class");
  cells_.assign(num_classes() * num_columns(), 0);
}

ConfusionMatrix ConfusionMatrix::emotions() {
  std::vector<std::string> names;
  for (auto label : kReportOrder) names.emplace_back(to_string(label));
  return ConfusionMatrix(std::move(names), true);
}

std::vector<std::string> ConfusionMatrix::column_labels() const {
  auto cols = classes_;
  if (invalid_column_) cols.emplace_back(kInvalidColumn);
  return cols;
}

std::uint64_t ConfusionMatrix::at(std::size_t gold, std::size_t predicted) const {
  return cells_.at(gold * num_columns() + predicted);
}

void ConfusionMatrix::add(std::size_t gold, std::size_t predicted, std::uint64_t n) {
  if (gold >= num_classes() || predicted >= num_columns()) {
    throw DataError("confusion matrix index out of range");
  }
  cells_[gold * num_columns() + predicted] += n;
}

std::uint64_t ConfusionMatrix::invalid(std::size_t gold) const {
  return invalid_column_ ? at(gold, num_classes()) : 0;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::uint64_t s = 0;
  for (std::size_t c = 0; c < num_columns(); ++c) s += at(gold, c);
  return s;
}

std::uint64_t ConfusionMatrix::column_sum(std::size_t predicted) const {
  std::uint64_t s = 0;
  for (std::size_t r = 0; r < num_classes(); ++r) s += at(r, predicted);
  return s;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t s = 0;
  for (std::size_t i = 0; i < num_classes(); ++i) s += at(i, i);
  return s;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t s = 0;
  for (auto v : cells_) s += v;
  return s;
}

ConfusionMatrix confusion_from_pairs(std::span<const LabeledPair> pairs) {
  if (pairs.empty()) throw DataError("confusion matrix from an empty pair list");
  auto m = ConfusionMatrix::emotions();
  for (const auto& [gold, predicted] : pairs) {
    const auto col = predicted ? report_index(*predicted) : m.num_classes();
    m.add(report_index(gold), col);
  }
  return m;
}

double accuracy(const ConfusionMatrix& m) {
  const auto total = m.total();
  if (total == 0) throw DataError("accuracy of an empty confusion matrix");
  return static_cast<double>(m.trace()) / static_cast<double>(total);
}

std::vector<ClassMetrics> per_class_metrics(const ConfusionMatrix& m) {
  if (m.total() == 0) throw DataError("metrics of an empty confusion matrix");
  std::vector<ClassMetrics> out(m.num_classes());
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    auto& cm = out[c];
    const auto tp = static_cast<double>(m.at(c, c));
    const auto predicted = m.column_sum(c);
    cm.support = m.row_sum(c);
    if (predicted > 0) {
      cm.precision = tp / static_cast<double>(predicted);
    } else {
      cm.degenerate = true;
    }
    if (cm.support > 0) {
      cm.recall = tp / static_cast<double>(cm.support);
    } else {
      cm.degenerate = true;
    }
    if (cm.precision + cm.recall > 0.0) {
      cm.f1 = 2.0 * cm.precision * cm.recall / (cm.precision + cm.recall);
    } else {
      cm.degenerate = true;
    }
  }
  return out;
}

double macro_f1(std::span<const ClassMetrics> per_class) {
  if (per_class.empty()) return 0.0;
  double s = 0.0;
  for (const auto& c : per_class) s += c.f1;
  return s / static_cast<double>(per_class.size());
}

double weighted_f1(std::span<const ClassMetrics> per_class) {
  std::uint64_t support = 0;
  for (const auto& c : per_class) support += c.support;
  if (support == 0) return 0.0;
  double s = 0.0;
  for (const auto& c : per_class) s += static_cast<double>(c.support) * c.f1;
  return s / static_cast<double>(support);
}

double micro_f1(const ConfusionMatrix& m) {
  // Every example is one prediction: sum FP over real columns plus invalid
  // equals sum FN, so micro P and R share the denominator of the total.
  std::uint64_t tp = 0, fp = 0, fn = 0;
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    tp += m.at(c, c);
    fp += m.column_sum(c) - m.at(c, c);
    fn += m.row_sum(c) - m.at(c, c);
  }
  fp += [&] {
    std::uint64_t s = 0;
    for (std::size_t r = 0; r < m.num_classes(); ++r) s += m.invalid(r);
    return s;
  }();
  const double denom = 2.0 * static_cast<double>(tp) + static_cast<double>(fp + fn);
  return denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / denom;
}

double normal_tail(double z) {
  if (!std::isfinite(z)) throw DataError("normal tail of a non-finite value");
  return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

SignificanceResult two_proportion_ztest(std::uint64_t successes1, std::uint64_t n1,
                                        std::uint64_t successes2, std::uint64_t n2) {
  if (n1 == 0 || n2 == 0) throw DataError("z-test needs non-empty samples");
  if (successes1 > n1 || successes2 > n2) throw DataError("z-test successes exceed sample size");
  const std::uint64_t pooled_successes = successes1 + successes2;
  const std::uint64_t pooled_n = n1 + n2;
  if (pooled_successes == 0 || pooled_successes == pooled_n) {
    throw DataError("z-test pooled proportion is degenerate (0 or 1)");
  }
  const double p1 = static_cast<double>(successes1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(successes2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(pooled_successes) / static_cast<double>(pooled_n);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
  SignificanceResult r;
  r.z = (p1 - p2) / se;
  r.p_two_sided = normal_tail(r.z);
  return r;
}

EvalReport evaluate(const ConfusionMatrix& m, std::string name) {
  EvalReport r;
  r.name = std::move(name);
  r.matrix = m;
  r.accuracy = accuracy(m);
  r.per_class = per_class_metrics(m);
  r.macro_f1 = macro_f1(r.per_class);
  r.weighted_f1 = weighted_f1(r.per_class);
  return r;
}

std::string report_to_json(const EvalReport& report) {
  const auto& m = report.matrix;
  ordered_json j;
  j["name"] = report.name;
  j["total"] = m.total();
  j["correct"] = m.trace();
  j["accuracy"] = report.accuracy;
  j["macro_f1"] = report.macro_f1;
  j["weighted_f1"] = report.weighted_f1;
  ordered_json per_class = ordered_json::object();
  for (std::size_t c = 0; c < m.num_classes(); ++c) {
    const auto& cm = report.per_class.at(c);
    per_class[m.classes()[c]] = {{"precision", cm.precision},
                                 {"recall", cm.recall},
                                 {"f1", cm.f1},
                                 {"support", cm.support},
                                 {"degenerate", cm.degenerate}};
  }
  j["per_class"] = std::move(per_class);
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < m.num_classes(); ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < m.num_columns(); ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  j["matrix"] = {{"classes", m.classes()}, {"invalid_column", m.has_invalid_column()}, {"counts", rows}};
  return j.dump(2) + "\n";
}

EvalReport report_from_json(std::string_view text) {
  try {
    const auto j = json::parse(text);
    const auto& jm = j.at("matrix");
    ConfusionMatrix m(jm.at("classes").get<std::vector<std::string>>(), jm.at("invalid_column").get<bool>());
    const auto& rows = jm.at("counts");
    if (rows.size() != m.num_classes()) throw DataError("report matrix has the wrong number of rows");
    for (std::size_t r = 0; r < m.num_classes(); ++r) {
      if (rows[r].size() != m.num_columns()) throw DataError("report matrix has the wrong number of columns");
      for (std::size_t c = 0; c < m.num_columns(); ++c) m.add(r, c, rows[r][c].get<std::uint64_t>());
    }
    return evaluate(m, j.value("name", std::string{}));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
}

std::vector<PredictionRecord> read_predictions(std::istream& in) {
  std::vector<PredictionRecord> out;
  std::unordered_set<std::uint64_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      PredictionRecord p;
      p.id = j.at("id").get<std::uint64_t>();
      const auto gold = j.at("gold").get<std::string>();
      auto label = label_from_string(gold);
      if (!label) throw DataError("unknown gold label '" + gold + "'", line_no);
      p.gold = *label;
      p.generated = j.at("generated").get<std::string>();
      if (!seen.insert(p.id).second) throw DataError("duplicate id " + std::to_string(p.id), line_no);
      out.push_back(std::move(p));
    } catch (const json::exception&) {
      throw DataError("malformed prediction record", line_no);
    }
  }
  return out;
}

void write_prediction(const PredictionRecord& record, std::ostream& out) {
  ordered_json j;
  j["id"] = record.id;
  j["gold"] = to_string(record.gold);
  j["generated"] = record.generated;
  out << j.dump() << '\n';
  if (!out) throw IoError("write failure");
}

EvalReport evaluate_predictions(std::span<const PredictionRecord> predictions, std::string name) {
  std::vector<LabeledPair> pairs;
  pairs.reserve(predictions.size());
  for (const auto& p : predictions) pairs.emplace_back(p.gold, extract_label(p.generated).label);
  return evaluate(confusion_from_pairs(pairs), std::move(name));
}

void write_confusion_csv(const ConfusionMatrix& m, std::ostream& out) {
  out << "gold\\predicted";
  for (const auto& col : m.column_labels()) out << ',' << col;
  out << '\n';
  for (std::size_t r = 0; r < m.num_classes(); ++r) {
    out << m.classes()[r];
    for (std::size_t c = 0; c < m.num_columns(); ++c) out << ',' << m.at(r, c);
    out << '\n';
  }
  if (!out) throw IoError("write failure");
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

ConfusionMatrix read_confusion_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty confusion CSV");
  auto header = split_csv_line(line);
  if (header.size() < 2) throw DataError("confusion CSV header too short", 1);
  header.erase(header.begin());
  const bool invalid = header.back() == kInvalidColumn;
  std::vector<std::string> classes(header.begin(), header.end() - (invalid ? 1 : 0));
  ConfusionMatrix m(classes, invalid);
  std::size_t line_no = 1;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (row >= m.num_classes()) throw DataError("too many rows in confusion CSV", line_no);
    if (cells.size() != m.num_columns() + 1) throw DataError("wrong cell count in confusion CSV", line_no);
    if (cells[0] != classes[row]) throw DataError("row label '" + cells[0] + "' out of order", line_no);
    for (std::size_t c = 0; c < m.num_columns(); ++c) {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(cells[c + 1], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[c + 1].size() || cells[c + 1][0] == '-') {
        throw DataError("bad count '" + cells[c + 1] + "' in confusion CSV", line_no);
      }
      m.add(row, c, v);
    }
    ++row;
  }
  if (row != m.num_classes()) throw DataError("missing rows in confusion CSV");
  return m;
}

}  // namespace rifl
