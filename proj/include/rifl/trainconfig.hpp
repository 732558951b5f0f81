#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rifl {

enum class ProfileName { kReasoningGen, kDownstream };

std::string_view to_string(ProfileName name);
/// Accepts "reasoning-gen", "reasoning_gen" and "downstream".
std::optional<ProfileName> profile_from_string(std::string_view name);

struct ConfigEntry {
  enum class Kind {
    kKey,      // trainer key; a dotted key is emitted as a nested mapping
    kComment,  // informational, written as "# key: value"
  };

  std::string key;
  std::string value;
  Kind kind = Kind::kKey;
  /// Row of the hyperparameter table this entry reproduces.
  std::string table_row;
};

struct TrainProfile {
  ProfileName name = ProfileName::kReasoningGen;
  std::vector<ConfigEntry> settings;

  const ConfigEntry* find(std::string_view key) const;
};

/// Hyperparameters of the reasoning-generator run and of the downstream
/// classifier runs.
TrainProfile make_profile(ProfileName name);

/// Writes a YAML config: header comments, table entries in table order, and a
/// `datasets` block pointing at `dataset_path`. Returns bytes written.
std::size_t emit_config(const TrainProfile& profile, std::string_view dataset_path, std::ostream& out);

std::string render_config(const TrainProfile& profile, std::string_view dataset_path);

}  // namespace rifl
