#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rifl/genbackend.hpp"

namespace rifl {

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::optional<std::uint64_t> seed;
  /// Backend snapshot; the API key is recorded only as present/absent.
  std::optional<BackendConfig> backend;
  bool stub = false;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string tool_version = RIFL_VERSION;
  /// ISO-8601 UTC. Taken from SOURCE_DATE_EPOCH when set, so stub runs can
  /// be byte-reproducible.
  std::string timestamp = current_timestamp();

  static std::string current_timestamp();
  std::string to_json() const;
};

/// Writes `path` through "<path>.partial"; commit() renames it into place.
/// Destruction without commit() removes the partial file.
class PartialFile {
 public:
  explicit PartialFile(std::string path);
  ~PartialFile();
  PartialFile(const PartialFile&) = delete;
  PartialFile& operator=(const PartialFile&) = delete;

  std::ofstream& stream() { return out_; }
  const std::string& path() const { return path_; }
  void commit();

 private:
  std::string path_;
  std::string partial_;
  std::ofstream out_;
  bool committed_ = false;
};

void write_text_file(const std::string& path, const std::string& text);

}  // namespace rifl
