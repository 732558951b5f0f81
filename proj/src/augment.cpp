#include "rifl/augment.hpp"

#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

namespace rifl {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

AugmentedPair make_augmented_pair(const TextExample& example, const std::string& reasoning) {
  AugmentedPair p;
  p.example_id = example.id;
  p.reasoning = normalize_reasoning(reasoning);
  p.record_ra = downstream_messages(example.text);
  p.record_a = p.record_ra;
  p.record_ra.assistant = build_target(TargetVariant::kReasoningAnswer, p.reasoning, example.label);
  p.record_a.assistant = build_target(TargetVariant::kAnswer, std::nullopt, example.label);
  return p;
}

namespace {

struct Outcome {
  bool done = false;
  std::optional<std::string> reasoning;  // set on success
  std::string error;
};

std::uint64_t fingerprint(std::span<const TextExample> examples, const DecodingOptions& decoding) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](std::string_view bytes) {
    for (unsigned char c : bytes) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xff;
    h *= 0x100000001b3ULL;
  };
  for (const auto& ex : examples) {
    mix(std::to_string(ex.id));
    mix(augmentation_prompt(ex));
  }
  mix(std::to_string(decoding.max_new_tokens));
  mix(json(decoding.temperature).dump());
  return h;
}

class Journal {
 public:
  Journal(const std::string& path, std::uint64_t print, std::size_t n_examples) : path_(path) {
    if (std::filesystem::exists(path_)) {
      load(print);
      out_.open(path_, std::ios::app | std::ios::binary);
    } else {
      out_.open(path_, std::ios::trunc | std::ios::binary);
      ordered_json header;
      header["journal"] = "augment";
      header["fingerprint"] = print;
      header["examples"] = n_examples;
      out_ << header.dump() << '\n';
      out_.flush();
    }
    if (!out_) throw IoError("cannot write journal " + path_);
  }

  const std::map<std::uint64_t, Outcome>& recorded() const { return recorded_; }

  void append(std::uint64_t id, const Outcome& o) {
    ordered_json j;
    j["id"] = id;
    if (o.reasoning) {
      j["status"] = "ok";
      j["reasoning"] = *o.reasoning;
    } else {
      j["status"] = "failed";
      j["error"] = o.error;
    }
    out_ << j.dump() << '\n';
  }

  void flush() {
    out_.flush();
    if (!out_) throw IoError("journal write failure");
  }

 private:
  void load(std::uint64_t print) {
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    if (!std::getline(in, line)) return;
    json header = json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("journal", "") != "augment" ||
        header.value("fingerprint", std::uint64_t{0}) != print) {
      throw ConfigError("journal " + path_ + " was written for different input; remove it to start over");
    }
    while (std::getline(in, line)) {
      json j = json::parse(line, nullptr, false);
      // A torn final line from an interrupted run is skipped.
      if (j.is_discarded() || !j.is_object() || !j.contains("id")) continue;
      Outcome o;
      o.done = true;
      if (j.value("status", "") == "ok") {
        o.reasoning = j.value("reasoning", "");
      } else {
        o.error = j.value("error", "failed");
      }
      recorded_[j.at("id").get<std::uint64_t>()] = std::move(o);
    }
  }

  std::string path_;
  std::ofstream out_;
  std::map<std::uint64_t, Outcome> recorded_;
};

}  // namespace

AugmentResult augment_dataset(std::span<const TextExample> examples, Generator& generator,
                              const AugmentOptions& options) {
  AugmentResult result;
  if (examples.empty()) return result;

  std::vector<Outcome> outcomes(examples.size());
  std::optional<Journal> journal;
  if (options.journal_path) {
    journal.emplace(*options.journal_path, fingerprint(examples, options.decoding), examples.size());
    for (std::size_t i = 0; i < examples.size(); ++i) {
      if (auto it = journal->recorded().find(examples[i].id); it != journal->recorded().end()) {
        outcomes[i] = it->second;
      }
    }
  }

  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (!outcomes[i].done) pending.push_back(i);
  }

  const std::size_t chunk = std::max<std::size_t>(options.checkpoint_every, 1);
  std::size_t completed = examples.size() - pending.size();
  for (std::size_t start = 0; start < pending.size(); start += chunk) {
    const std::size_t stop = std::min(pending.size(), start + chunk);
    std::vector<GenRequest> requests;
    requests.reserve(stop - start);
    for (std::size_t k = start; k < stop; ++k) {
      requests.push_back(GenRequest::completion(augmentation_prompt(examples[pending[k]]), options.decoding));
    }
    const auto responses = generate_batch(generator, requests, options.max_in_flight);
    result.requests_issued += requests.size();

    std::size_t successes = 0;
    std::string last_error;
    for (std::size_t k = start; k < stop; ++k) {
      const auto& resp = responses[k - start];
      auto& o = outcomes[pending[k]];
      o.done = true;
      if (!resp.ok()) {
        o.error = resp.error.empty() ? "generation failed" : resp.error;
      } else if (normalize_reasoning(resp.text).empty()) {
        o.error = "empty reasoning";
      } else {
        o.reasoning = resp.text;
        ++successes;
      }
      if (!o.reasoning) last_error = o.error;
    }
    if (start == 0 && successes == 0) {
      throw AugmentAborted("every request in the first batch failed (last error: " + last_error + ")");
    }
    if (journal) {
      for (std::size_t k = start; k < stop; ++k) journal->append(examples[pending[k]].id, outcomes[pending[k]]);
      journal->flush();
    }
    completed += stop - start;
    if (options.on_progress) options.on_progress(completed, examples.size());
  }

  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& o = outcomes[i];
    if (!o.reasoning) {
      result.failures.push_back({examples[i].id, o.error});
      continue;
    }
    auto pair = make_augmented_pair(examples[i], *o.reasoning);
    result.ids.push_back(pair.example_id);
    result.ra_records.push_back(std::move(pair.record_ra));
    result.a_records.push_back(std::move(pair.record_a));
  }
  return result;
}

AlignmentReport verify_alignment(std::span<const ChatRecord> ra_records, std::span<const ChatRecord> a_records) {
  AlignmentReport report;
  const std::size_t n = std::min(ra_records.size(), a_records.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ra = ra_records[i];
    const auto& a = a_records[i];
    std::string why;
    if (ra.user != a.user) {
      why = "user fields differ";
    } else if (ra.system != a.system) {
      why = "system fields differ";
    } else if (a.assistant.empty() || !ra.assistant.ends_with(" " + a.assistant)) {
      why = "reasoning target does not end with the label target";
    }
    if (!why.empty()) {
      report.ok = false;
      report.first_mismatch = i;
      report.message = "record " + std::to_string(i) + ": " + why;
      return report;
    }
  }
  if (ra_records.size() != a_records.size()) {
    report.ok = false;
    report.first_mismatch = n;
    report.message = "length mismatch: " + std::to_string(ra_records.size()) + " vs " +
                     std::to_string(a_records.size());
  }
  return report;
}

}  // namespace rifl
