#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rifl/error.hpp"
#include "rifl/prompting.hpp"

namespace rifl {

enum class GenMode { kCompletion, kChat };
enum class FinishReason { kStop, kLength, kError };

std::string_view to_string(FinishReason reason);

inline constexpr std::string_view kEndOfText = "<|end_of_text|>";

/// Decoding settings shared by a batch of requests. Defaults are greedy with
/// a 256-token budget, stopping at end-of-text.
struct DecodingOptions {
  int max_new_tokens = 256;
  double temperature = 0.0;
  std::vector<std::string> stop = {std::string(kEndOfText)};
  std::optional<std::uint64_t> seed;
};

struct GenRequest {
  GenMode mode = GenMode::kCompletion;
  std::string prompt;  // completion mode
  ChatRecord chat;     // chat mode; assistant is ignored
  int max_new_tokens = 256;
  double temperature = 0.0;
  std::vector<std::string> stop;
  std::optional<std::uint64_t> seed;

  static GenRequest completion(std::string prompt, const DecodingOptions& decoding = {});
  static GenRequest chat_request(ChatRecord chat, const DecodingOptions& decoding = {});
};

/// Throws InvalidRequest unless max_new_tokens >= 1 and temperature >= 0.
void validate(const GenRequest& request);

struct GenResponse {
  std::string text;
  FinishReason finish_reason = FinishReason::kStop;
  std::optional<std::int64_t> prompt_tokens;
  std::optional<std::int64_t> completion_tokens;
  std::string error;  // set when finish_reason is kError

  bool ok() const { return finish_reason != FinishReason::kError; }
};

class InvalidRequest : public Error {
 public:
  using Error::Error;
};

/// The endpoint rejected our credentials (HTTP 401/403). Never retried.
class AuthenticationError : public Error {
 public:
  using Error::Error;
};

struct BackendConfig {
  std::string base_url;
  std::optional<std::string> api_key;
  std::string model_name;
  std::chrono::milliseconds request_timeout{120000};
  /// Retries after the first attempt; 2 gives three attempts in total.
  int max_retries = 2;
  std::chrono::milliseconds initial_backoff{500};
  std::size_t max_in_flight = 8;

  /// Reads GEN_BASE_URL, GEN_API_KEY and GEN_MODEL. The key is only ever
  /// taken from the environment.
  static BackendConfig from_env();
};

/// Anything that turns a request into text. Implementations must be safe to
/// call from several threads at once.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual GenResponse generate(const GenRequest& request) = 0;
};

// --- deterministic stub ------------------------------------------------------

/// Pure function of the request and `stub_seed`.
///  - completion prompts in the stage-1 template produce
///    "Because the text indicates <a>, the label is <a>." for answer <a>;
///  - everything else produces one label word picked by hashing the user
///    text (or prompt) together with the seed.
GenResponse stub_generate(const GenRequest& request, std::uint64_t stub_seed);

class StubGenerator final : public Generator {
 public:
  explicit StubGenerator(std::uint64_t seed) : seed_(seed) {}
  GenResponse generate(const GenRequest& request) override;

 private:
  std::uint64_t seed_;
};

// --- HTTP -------------------------------------------------------------------

struct HttpReply {
  int status = 0;  // 0 means the request never produced an HTTP response
  std::string body;
  std::string transport_error;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpReply post(const std::string& path, const std::string& body, const Headers& headers) = 0;
};

/// cpp-httplib backed transport for `config.base_url`.
std::unique_ptr<Transport> make_http_transport(const BackendConfig& config);

/// Blocks callers once `limit` holders are inside.
class InFlightLimiter {
 public:
  explicit InFlightLimiter(std::size_t limit);
  void acquire();
  void release();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::size_t limit_;
  std::size_t active_ = 0;
};

std::string endpoint_path(GenMode mode);
std::string request_body(const BackendConfig& config, const GenRequest& request);

/// Parses an OpenAI-style completions / chat completions body. Throws
/// DataError when the body does not have the expected shape.
GenResponse parse_response_body(GenMode mode, std::string_view body);

/// Removes one trailing occurrence of any stop string.
std::string strip_stop_suffix(std::string text, std::span<const std::string> stops);

bool is_retryable_status(int status);

class HttpGenerator final : public Generator {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  /// Passing no transport builds the cpp-httplib one.
  explicit HttpGenerator(BackendConfig config, std::unique_ptr<Transport> transport = nullptr,
                         Sleeper sleeper = {});

  /// Retries transport errors, 429 and 5xx with exponential backoff; after
  /// the last attempt returns a kError response. Throws AuthenticationError on
  /// 401/403 and InvalidRequest before dispatching a bad request.
  GenResponse generate(const GenRequest& request) override;

  const BackendConfig& config() const { return config_; }

 private:
  BackendConfig config_;
  std::unique_ptr<Transport> transport_;
  Sleeper sleeper_;
  InFlightLimiter limiter_;
};

/// Runs every request with at most `max_in_flight` concurrent calls and
/// returns responses in input order. If any call throws, remaining work is
/// abandoned and the first exception is rethrown.
std::vector<GenResponse> generate_batch(Generator& generator, std::span<const GenRequest> requests,
                                        std::size_t max_in_flight);

}  // namespace rifl
