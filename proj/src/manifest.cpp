#include "rifl/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>

#include <json.hpp>

namespace rifl {

std::string RunManifest::current_timestamp() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string RunManifest::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["seed"] = seed ? nlohmann::ordered_json(*seed) : nlohmann::ordered_json();
  j["stub"] = stub;
  if (backend) {
    j["backend"] = {{"base_url", backend->base_url},
                    {"model", backend->model_name},
                    {"api_key", backend->api_key ? "<redacted>" : ""},
                    {"max_in_flight", backend->max_in_flight},
                    {"max_retries", backend->max_retries},
                    {"request_timeout_ms", backend->request_timeout.count()}};
  } else {
    j["backend"] = nullptr;
  }
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [k, v] : parameters) params[k] = v;
  j["parameters"] = std::move(params);
  j["tool_version"] = tool_version;
  j["timestamp"] = timestamp;
  return j.dump(2) + "\n";
}

PartialFile::PartialFile(std::string path) : path_(std::move(path)), partial_(path_ + ".partial") {
  out_.open(partial_, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot open " + partial_ + " for writing");
}

PartialFile::~PartialFile() {
  if (!committed_) {
    out_.close();
    std::error_code ec;
    std::filesystem::remove(partial_, ec);
  }
}

void PartialFile::commit() {
  out_.flush();
  if (!out_) throw IoError("write failure on " + partial_);
  out_.close();
  std::filesystem::rename(partial_, path_);
  committed_ = true;
}

void write_text_file(const std::string& path, const std::string& text) {
  PartialFile f(path);
  f.stream() << text;
  f.commit();
}

}  // namespace rifl
