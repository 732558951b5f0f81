#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "oracles.hpp"
#include "reference_tables.hpp"
#include "rifl/trainconfig.hpp"

using namespace rifl;
using rifl::oracle::parse_config_text;

namespace {

const auto& kTable = reference::kTrainerSettings;

std::map<std::string, std::string> parsed(ProfileName p) {
  auto out = parse_config_text(render_config(make_profile(p), "data/train.jsonl"));
  out.erase("#profile");
  return out;
}

}  // namespace

TEST(TrainConfig, ProfileNames) {
  EXPECT_EQ(profile_from_string("reasoning-gen"), ProfileName::kReasoningGen);
  EXPECT_EQ(profile_from_string("reasoning_gen"), ProfileName::kReasoningGen);
  EXPECT_EQ(profile_from_string("downstream"), ProfileName::kDownstream);
  EXPECT_FALSE(profile_from_string("fast").has_value());
}

TEST(TrainConfig, ReasoningGenValues) {
  const auto got = parsed(ProfileName::kReasoningGen);
  for (const auto& row : kTable) {
    ASSERT_TRUE(got.count(row.key)) << row.key;
    EXPECT_EQ(got.at(row.key), row.reasoning_gen) << row.key;
  }
}

TEST(TrainConfig, DownstreamValues) {
  const auto got = parsed(ProfileName::kDownstream);
  for (const auto& row : kTable) {
    ASSERT_TRUE(got.count(row.key)) << row.key;
    EXPECT_EQ(got.at(row.key), row.downstream) << row.key;
  }
}

TEST(TrainConfig, ProfilesDifferOnlyWhereTheTableDoes) {
  const auto a = parsed(ProfileName::kReasoningGen);
  const auto b = parsed(ProfileName::kDownstream);
  std::set<std::string> differ;
  for (const auto& [k, v] : a) {
    if (!b.count(k) || b.at(k) != v) differ.insert(k);
  }
  for (const auto& [k, v] : b) {
    if (!a.count(k)) differ.insert(k);
  }
  EXPECT_EQ(differ, (std::set<std::string>{"warmup_steps", "micro_batch_size", "#effective_batch_size",
                                           "sequence_len"}));
}

TEST(TrainConfig, EffectiveBatchIsProduct) {
  for (auto p : {ProfileName::kReasoningGen, ProfileName::kDownstream}) {
    const auto got = parsed(p);
    EXPECT_EQ(std::stoi(got.at("#effective_batch_size")),
              std::stoi(got.at("gradient_accumulation_steps")) * std::stoi(got.at("micro_batch_size")));
  }
}

TEST(TrainConfig, KeysAreUniqueAndRowsCovered) {
  std::set<std::string> rows;
  for (auto p : {ProfileName::kReasoningGen, ProfileName::kDownstream}) {
    const auto profile = make_profile(p);
    std::set<std::string> keys;
    for (const auto& e : profile.settings) {
      EXPECT_TRUE(keys.insert(e.key).second) << e.key;
      EXPECT_FALSE(e.table_row.empty());
      rows.insert(e.table_row);
    }
    EXPECT_EQ(profile.settings.size(), kTable.size());
  }
  EXPECT_EQ(rows.size(), 23u);
}

TEST(TrainConfig, DatasetBlockAndDeterminism) {
  const auto profile = make_profile(ProfileName::kDownstream);
  const auto text = render_config(profile, "out/my \"set\".jsonl");
  EXPECT_EQ(text, render_config(profile, "out/my \"set\".jsonl"));
  EXPECT_EQ(text.rfind("# profile: downstream\n", 0), 0u);
  EXPECT_NE(text.find("datasets:\n  - path: \"out/my \\\"set\\\".jsonl\"\n    ds_type: json\n"), std::string::npos);
  EXPECT_NE(text.find("gradient_checkpointing_kwargs:\n  use_reentrant: false\n"), std::string::npos);
  EXPECT_NE(text.find("special_tokens:\n  pad_token: <|end_of_text|>\n"), std::string::npos);
  std::ostringstream out;
  EXPECT_EQ(emit_config(profile, "out/my \"set\".jsonl", out), text.size());
  EXPECT_EQ(out.str(), text);
  EXPECT_EQ(profile.find("learning_rate")->value, "2e-5");
  EXPECT_EQ(profile.find("nope"), nullptr);
}
