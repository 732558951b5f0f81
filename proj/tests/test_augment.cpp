#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "oracles.hpp"
#include "rifl/augment.hpp"
#include "rifl/extract.hpp"

using namespace rifl;
namespace fs = std::filesystem;

namespace {

std::vector<TextExample> make_examples(std::size_t n, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::vector<TextExample> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({i, "example text number " + std::to_string(i),
                   label_from_code(static_cast<int>(rng() % 6)).value()});
  }
  return out;
}

// Wraps the stub, counting calls and failing a chosen set of prompts.
class ScriptedGenerator : public Generator {
 public:
  std::function<std::optional<GenResponse>(const GenRequest&)> override_fn;
  std::atomic<std::size_t> calls{0};

  GenResponse generate(const GenRequest& r) override {
    ++calls;
    if (override_fn) {
      if (auto o = override_fn(r)) return *o;
    }
    return stub_generate(r, 0);
  }
};

GenResponse failed(const std::string& why) {
  GenResponse r;
  r.finish_reason = FinishReason::kError;
  r.error = why;
  return r;
}

bool mentions(const GenRequest& r, std::string_view needle) { return r.prompt.find(needle) != std::string::npos; }

fs::path temp_path(const std::string& name) {
  auto p = fs::temp_directory_path() / ("rifl_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove(p);
  return p;
}

}  // namespace

TEST(Augment, EmptyInput) {
  StubGenerator gen(0);
  const auto r = augment_dataset({}, gen);
  EXPECT_TRUE(r.ra_records.empty());
  EXPECT_TRUE(r.a_records.empty());
  EXPECT_EQ(r.requests_issued, 0u);
}

TEST(Augment, StubExample) {
  std::vector<TextExample> ex = {{0, "i feel great", EmotionLabel::kJoy}};
  StubGenerator gen(0);
  const auto r = augment_dataset(ex, gen);
  ASSERT_EQ(r.ra_records.size(), 1u);
  EXPECT_EQ(r.ra_records[0].system, "Find the emotion in the text.");
  EXPECT_EQ(r.ra_records[0].user, "i feel great");
  EXPECT_EQ(r.ra_records[0].assistant, "Because the text indicates joy, the label is joy. joy");
  EXPECT_EQ(r.a_records[0].assistant, "joy");
  EXPECT_EQ(r.a_records[0].user, "i feel great");
}

TEST(Augment, NormalizesMultilineReasoning) {
  std::vector<TextExample> ex = {{0, "t", EmotionLabel::kFear}};
  ScriptedGenerator gen;
  gen.override_fn = [](const GenRequest&) { return GenResponse{"line one\n\nline two  \r\n", {}, {}, {}, {}}; };
  const auto r = augment_dataset(ex, gen);
  EXPECT_EQ(r.ra_records.at(0).assistant, "line one line two fear");
}

TEST(Augment, FailuresDroppedFromBothOutputs) {
  auto ex = make_examples(50);
  ScriptedGenerator gen;
  gen.override_fn = [](const GenRequest& r) -> std::optional<GenResponse> {
    if (mentions(r, "number 7 ")) return failed("HTTP 503");
    if (mentions(r, "number 19 ")) return GenResponse{" \n ", {}, {}, {}, {}};
    return std::nullopt;
  };
  const auto r = augment_dataset(ex, gen);
  EXPECT_EQ(r.ra_records.size(), 48u);
  EXPECT_EQ(r.a_records.size(), 48u);
  ASSERT_EQ(r.failures.size(), 2u);
  EXPECT_EQ(r.failures[0], (AugmentFailure{7, "HTTP 503"}));
  EXPECT_EQ(r.failures[1], (AugmentFailure{19, "empty reasoning"}));
  EXPECT_TRUE(verify_alignment(r.ra_records, r.a_records).ok);
  std::size_t j = 0;
  for (const auto& e : ex) {
    if (e.id == 7 || e.id == 19) continue;
    EXPECT_EQ(r.ids[j], e.id);
    EXPECT_EQ(r.a_records[j].user, e.text);
    ++j;
  }
}

TEST(Augment, AbortsWhenFirstBatchFails) {
  auto ex = make_examples(30);
  ScriptedGenerator gen;
  gen.override_fn = [](const GenRequest&) { return failed("transport error: refused"); };
  AugmentOptions opt;
  opt.checkpoint_every = 10;
  EXPECT_THROW(augment_dataset(ex, gen, opt), AugmentAborted);
  EXPECT_EQ(gen.calls.load(), 10u);
}

TEST(Augment, LaterBatchFailureIsNotFatal) {
  auto ex = make_examples(30);
  ScriptedGenerator gen;
  std::atomic<int> n{0};
  gen.override_fn = [&](const GenRequest& r) -> std::optional<GenResponse> {
    ++n;
    for (int i = 10; i < 20; ++i) {
      if (mentions(r, "number " + std::to_string(i) + " ")) return failed("down");
    }
    return std::nullopt;
  };
  AugmentOptions opt;
  opt.checkpoint_every = 10;
  opt.max_in_flight = 1;
  const auto r = augment_dataset(ex, gen, opt);
  EXPECT_EQ(r.ra_records.size(), 20u);
  EXPECT_EQ(r.failures.size(), 10u);
}

TEST(Augment, ResumesFromJournal) {
  auto ex = make_examples(25);
  const auto journal = temp_path("journal.jsonl");
  AugmentOptions opt;
  opt.checkpoint_every = 10;
  opt.journal_path = journal.string();

  // First run dies during the third chunk.
  {
    ScriptedGenerator gen;
    gen.override_fn = [](const GenRequest& r) -> std::optional<GenResponse> {
      if (mentions(r, "number 22 ")) throw AuthenticationError("key revoked");
      return std::nullopt;
    };
    EXPECT_THROW(augment_dataset(ex, gen, opt), AuthenticationError);
  }
  // Simulate a torn trailing line.
  { std::ofstream(journal, std::ios::app) << R"({"id": 2)"; }

  ScriptedGenerator gen;
  const auto resumed = augment_dataset(ex, gen, opt);
  EXPECT_EQ(gen.calls.load(), 5u);
  EXPECT_EQ(resumed.requests_issued, 5u);

  StubGenerator fresh_gen(0);
  const auto fresh = augment_dataset(ex, fresh_gen);
  EXPECT_EQ(resumed.ra_records.size(), fresh.ra_records.size());
  for (std::size_t i = 0; i < fresh.ra_records.size(); ++i) {
    EXPECT_EQ(to_jsonl(resumed.ra_records[i]), to_jsonl(fresh.ra_records[i]));
    EXPECT_EQ(to_jsonl(resumed.a_records[i]), to_jsonl(fresh.a_records[i]));
  }
  fs::remove(journal);
}

TEST(Augment, JournalForOtherInputIsRejected) {
  const auto journal = temp_path("journal2.jsonl");
  AugmentOptions opt;
  opt.journal_path = journal.string();
  StubGenerator gen(0);
  augment_dataset(make_examples(5, 1), gen, opt);
  EXPECT_THROW(augment_dataset(make_examples(5, 2), gen, opt), ConfigError);
  fs::remove(journal);
}

TEST(Augment, ProgressCallback) {
  auto ex = make_examples(23);
  StubGenerator gen(0);
  AugmentOptions opt;
  opt.checkpoint_every = 10;
  std::vector<std::size_t> seen;
  opt.on_progress = [&](std::size_t done, std::size_t total) {
    EXPECT_EQ(total, 23u);
    seen.push_back(done);
  };
  augment_dataset(ex, gen, opt);
  EXPECT_EQ(seen, (std::vector<std::size_t>{10, 20, 23}));
}

TEST(Augment, FullTrainingSetSize) {
  auto ex = make_examples(16000);
  StubGenerator gen(0);
  AugmentOptions opt;
  opt.max_in_flight = 16;
  const auto r = augment_dataset(ex, gen, opt);
  EXPECT_EQ(r.ra_records.size(), 16000u);
  EXPECT_EQ(r.a_records.size(), 16000u);
  EXPECT_TRUE(verify_alignment(r.ra_records, r.a_records).ok);
}

TEST(Augment, LabelRecoveredFromReasoningTarget) {
  std::mt19937_64 rng(11);
  auto ex = make_examples(500, 3);
  ScriptedGenerator gen;
  std::mutex mu;
  gen.override_fn = [&](const GenRequest&) -> std::optional<GenResponse> {
    std::lock_guard lock(mu);
    return GenResponse{oracle::decoy_reasoning(rng), {}, {}, {}, {}};
  };
  const auto r = augment_dataset(ex, gen);
  ASSERT_EQ(r.ra_records.size(), 500u);
  for (std::size_t i = 0; i < 500; ++i) {
    const auto got = extract_label(r.ra_records[i].assistant);
    ASSERT_TRUE(got.label.has_value());
    EXPECT_EQ(*got.label, ex[i].label);
  }
}

TEST(Alignment, DetectsMismatches) {
  std::vector<TextExample> ex = {{0, "a", EmotionLabel::kJoy}, {1, "b", EmotionLabel::kLove}};
  StubGenerator gen(0);
  auto r = augment_dataset(ex, gen);
  EXPECT_TRUE(verify_alignment(r.ra_records, r.a_records).ok);

  auto a = r.a_records;
  a[1].user = "c";
  auto rep = verify_alignment(r.ra_records, a);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.first_mismatch, 1u);

  a = r.a_records;
  a[0].assistant = "love";
  EXPECT_EQ(verify_alignment(r.ra_records, a).first_mismatch, 0u);

  a = r.a_records;
  a.pop_back();
  rep = verify_alignment(r.ra_records, a);
  EXPECT_FALSE(rep.ok);
  EXPECT_EQ(rep.first_mismatch, 1u);
  EXPECT_NE(rep.message.find("length mismatch"), std::string::npos);
}
