#include "rifl/corpus.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

namespace rifl {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool blank(std::string_view s) {
  for (char c : s) {
    if (!is_space(c)) return false;
  }
  return true;
}

// Calls fn(json_object, line_number) for every non-blank line.
template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError("malformed record", line_no);
    }
    if (!record.is_object()) throw DataError("record is not an object", line_no);
    fn(record, line_no);
  }
  if (in.bad()) throw IoError("read failure");
}

std::string required_string(const json& record, const std::string& field, std::size_t line_no) {
  auto it = record.find(field);
  if (it == record.end()) throw DataError("missing field '" + field + "'", line_no);
  if (!it->is_string()) throw DataError("field '" + field + "' is not a string", line_no);
  return it->get<std::string>();
}

EmotionLabel parse_label(const json& value, std::size_t line_no) {
  if (value.is_string()) {
    const auto& word = value.get_ref<const std::string&>();
    if (auto label = label_from_string(word)) return *label;
    throw DataError("unknown label '" + word + "'", line_no);
  }
  if (value.is_number_integer()) {
    const auto code = value.get<long long>();
    if (auto label = label_from_code(code)) return *label;
    throw DataError("unknown label code " + std::to_string(code), line_no);
  }
  throw DataError("label must be a string or an integer", line_no);
}

void check_sink(const std::ostream& out) {
  if (!out) throw IoError("write failure");
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && is_space(s[begin])) ++begin;
  while (end > begin && is_space(s[end - 1])) --end;
  return std::string(s.substr(begin, end - begin));
}

std::vector<TextExample> ingest_examples(std::istream& in, const ExampleFormat& format) {
  std::vector<TextExample> out;
  std::unordered_set<std::uint64_t> seen;
  for_each_record(in, [&](const json& record, std::size_t line_no) {
    TextExample ex;
    ex.text = trim(required_string(record, format.text_field, line_no));
    if (ex.text.empty()) throw DataError("empty text", line_no);
    auto label_it = record.find(format.label_field);
    if (label_it == record.end()) throw DataError("missing field '" + format.label_field + "'", line_no);
    ex.label = parse_label(*label_it, line_no);
    auto id_it = record.find(format.id_field);
    if (id_it != record.end() && !id_it->is_null()) {
      if (!id_it->is_number_unsigned() && !(id_it->is_number_integer() && id_it->get<long long>() >= 0)) {
        throw DataError("id must be a non-negative integer", line_no);
      }
      ex.id = id_it->get<std::uint64_t>();
    } else {
      ex.id = out.size();
    }
    if (!seen.insert(ex.id).second) throw DataError("duplicate id " + std::to_string(ex.id), line_no);
    out.push_back(std::move(ex));
  });
  return out;
}

std::size_t emit_examples(const std::vector<TextExample>& examples, std::ostream& out) {
  for (const auto& ex : examples) {
    ordered_json record;
    record["text"] = ex.text;
    record["label"] = to_string(ex.label);
    out << record.dump() << '\n';
    check_sink(out);
  }
  return examples.size();
}

std::vector<ReasoningTriple> ingest_triples(std::istream& in) {
  std::vector<ReasoningTriple> out;
  for_each_record(in, [&](const json& record, std::size_t line_no) {
    ReasoningTriple t;
    t.question = required_string(record, "question", line_no);
    t.answer = required_string(record, "answer", line_no);
    t.reasoning = required_string(record, "reasoning", line_no);
    if (blank(t.question)) throw DataError("empty question", line_no);
    if (blank(t.answer)) throw DataError("empty answer", line_no);
    if (blank(t.reasoning)) throw DataError("empty reasoning", line_no);
    out.push_back(std::move(t));
  });
  return out;
}

std::size_t emit_triples(const std::vector<ReasoningTriple>& triples, std::ostream& out) {
  for (const auto& t : triples) {
    ordered_json record;
    record["question"] = t.question;
    record["answer"] = t.answer;
    record["reasoning"] = t.reasoning;
    out << record.dump() << '\n';
    check_sink(out);
  }
  return triples.size();
}

std::vector<TextExample> read_examples_file(const std::string& path, const ExampleFormat& format) {
  auto in = open_input(path);
  return ingest_examples(in, format);
}

std::vector<ReasoningTriple> read_triples_file(const std::string& path) {
  auto in = open_input(path);
  return ingest_triples(in);
}

std::uint64_t bounded_draw(std::mt19937_64& gen, std::uint64_t bound) {
  // Reject the top partial bucket so every residue is equally likely.
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t limit = kMax - (kMax % bound + 1) % bound;
  std::uint64_t r;
  do {
    r = gen();
  } while (r > limit);
  return r % bound;
}

std::vector<std::size_t> portable_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 gen(seed);
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(bounded_draw(gen, i));
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

void check_disjoint(const DatasetSplit& split) {
  std::unordered_set<std::uint64_t> seen;
  for (const auto* part : {&split.train, &split.validation, &split.test}) {
    for (const auto& ex : *part) {
      if (!seen.insert(ex.id).second) {
        throw DataError("id " + std::to_string(ex.id) + " appears in more than one split");
      }
    }
  }
}

double ClassDistribution::percentage(EmotionLabel label) const {
  if (total == 0) return 0.0;
  return 100.0 * static_cast<double>(count(label)) / static_cast<double>(total);
}

long long ClassDistribution::percentage_tenths(EmotionLabel label) const {
  if (total == 0) return 0;
  const auto num = static_cast<long long>(2000 * count(label) + total);
  return num / static_cast<long long>(2 * total);
}

ClassDistribution class_distribution(const std::vector<TextExample>& examples) {
  if (examples.empty()) throw DataError("class distribution of an empty dataset");
  ClassDistribution dist;
  for (const auto& ex : examples) ++dist.counts[static_cast<std::size_t>(ex.label)];
  dist.total = examples.size();
  return dist;
}

}  // namespace rifl
