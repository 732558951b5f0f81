#include "rifl/genbackend.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include <json.hpp>

#include "rifl/labels.hpp"

namespace rifl {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(FinishReason reason) {
  switch (reason) {
    case FinishReason::kStop:
      return "stop";
    case FinishReason::kLength:
      return "length";
    case FinishReason::kError:
      return "error";
  }
  return "error";
}

GenRequest GenRequest::completion(std::string prompt, const DecodingOptions& decoding) {
  GenRequest r;
  r.mode = GenMode::kCompletion;
  r.prompt = std::move(prompt);
  r.max_new_tokens = decoding.max_new_tokens;
  r.temperature = decoding.temperature;
  r.stop = decoding.stop;
  r.seed = decoding.seed;
  return r;
}

GenRequest GenRequest::chat_request(ChatRecord chat, const DecodingOptions& decoding) {
  GenRequest r = completion({}, decoding);
  r.mode = GenMode::kChat;
  r.chat = std::move(chat);
  r.chat.assistant.clear();
  return r;
}

void validate(const GenRequest& request) {
  if (request.max_new_tokens < 1) throw InvalidRequest("max_new_tokens must be at least 1");
  if (!(request.temperature >= 0.0) || !std::isfinite(request.temperature)) {
    throw InvalidRequest("temperature must be a finite non-negative number");
  }
}

BackendConfig BackendConfig::from_env() {
  BackendConfig c;
  if (const char* v = std::getenv("GEN_BASE_URL"); v && *v) c.base_url = v;
  if (const char* v = std::getenv("GEN_API_KEY"); v && *v) c.api_key = std::string(v);
  if (const char* v = std::getenv("GEN_MODEL"); v && *v) c.model_name = v;
  return c;
}

// --- stub -------------------------------------------------------------------

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string hashed_label_word(std::string_view text, std::uint64_t seed) {
  const auto h = splitmix64(fnv1a(text) ^ splitmix64(seed));
  return std::string(to_string(kCodeOrder[h % kNumEmotions]));
}

// Answer span of a stage-1 prompt, or nullopt when the prompt is not one.
std::optional<std::string_view> stage1_answer(std::string_view prompt) {
  if (!prompt.starts_with(kQuestionPrefix) || !prompt.ends_with(kReasoningSuffix)) return std::nullopt;
  const auto body = prompt.substr(0, prompt.size() - kReasoningSuffix.size());
  const auto pos = body.rfind(kAnswerInfix);
  if (pos == std::string_view::npos || pos < kQuestionPrefix.size()) return std::nullopt;
  auto answer = body.substr(pos + kAnswerInfix.size());
  if (answer.empty()) return std::nullopt;
  return answer;
}

}  // namespace

GenResponse stub_generate(const GenRequest& request, std::uint64_t stub_seed) {
  GenResponse r;
  r.finish_reason = FinishReason::kStop;
  if (request.mode == GenMode::kCompletion) {
    if (auto answer = stage1_answer(request.prompt)) {
      r.text = "Because the text indicates ";
      r.text.append(*answer).append(", the label is ").append(*answer).append(".");
    } else {
      r.text = hashed_label_word(request.prompt, stub_seed);
    }
  } else {
    r.text = hashed_label_word(request.chat.user, stub_seed);
  }
  return r;
}

GenResponse StubGenerator::generate(const GenRequest& request) {
  validate(request);
  return stub_generate(request, seed_);
}

// --- HTTP -------------------------------------------------------------------

InFlightLimiter::InFlightLimiter(std::size_t limit) : limit_(limit == 0 ? 1 : limit) {}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return active_ < limit_; });
  ++active_;
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --active_;
  }
  cv_.notify_one();
}

std::string endpoint_path(GenMode mode) {
  return mode == GenMode::kChat ? "/v1/chat/completions" : "/v1/completions";
}

std::string request_body(const BackendConfig& config, const GenRequest& request) {
  ordered_json j;
  j["model"] = config.model_name;
  if (request.mode == GenMode::kChat) {
    ordered_json messages = ordered_json::array();
    if (!request.chat.system.empty()) {
      messages.push_back({{"role", "system"}, {"content", request.chat.system}});
    }
    messages.push_back({{"role", "user"}, {"content", request.chat.user}});
    j["messages"] = std::move(messages);
  } else {
    j["prompt"] = request.prompt;
  }
  j["max_tokens"] = request.max_new_tokens;
  j["temperature"] = request.temperature;
  if (!request.stop.empty()) j["stop"] = request.stop;
  if (request.seed) j["seed"] = *request.seed;
  return j.dump();
}

GenResponse parse_response_body(GenMode mode, std::string_view body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("response is not JSON: ") + e.what());
  }
  try {
    const auto& choice = j.at("choices").at(0);
    GenResponse r;
    if (mode == GenMode::kChat) {
      const auto& content = choice.at("message").at("content");
      r.text = content.is_null() ? std::string{} : content.get<std::string>();
    } else {
      r.text = choice.at("text").get<std::string>();
    }
    const auto reason = choice.value("finish_reason", json()).is_string()
                            ? choice.at("finish_reason").get<std::string>()
                            : std::string("stop");
    r.finish_reason = reason == "length" ? FinishReason::kLength : FinishReason::kStop;
    if (auto usage = j.find("usage"); usage != j.end() && usage->is_object()) {
      if (auto p = usage->find("prompt_tokens"); p != usage->end() && p->is_number_integer()) {
        r.prompt_tokens = p->get<std::int64_t>();
      }
      if (auto c = usage->find("completion_tokens"); c != usage->end() && c->is_number_integer()) {
        r.completion_tokens = c->get<std::int64_t>();
      }
    }
    return r;
  } catch (const json::exception& e) {
    throw DataError(std::string("unexpected response shape: ") + e.what());
  }
}

std::string strip_stop_suffix(std::string text, std::span<const std::string> stops) {
  for (const auto& stop : stops) {
    if (!stop.empty() && text.ends_with(stop)) {
      text.resize(text.size() - stop.size());
      break;
    }
  }
  return text;
}

bool is_retryable_status(int status) { return status == 0 || status == 429 || status >= 500; }

HttpGenerator::HttpGenerator(BackendConfig config, std::unique_ptr<Transport> transport, Sleeper sleeper)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      sleeper_(std::move(sleeper)),
      limiter_(config_.max_in_flight) {
  if (config_.max_in_flight < 1) throw ConfigError("max_in_flight must be at least 1");
  if (!transport_) {
    if (config_.base_url.empty()) throw ConfigError("backend base URL is not set (GEN_BASE_URL or --base-url)");
    transport_ = make_http_transport(config_);
  }
  if (!sleeper_) sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

GenResponse HttpGenerator::generate(const GenRequest& request) {
  validate(request);
  const auto path = endpoint_path(request.mode);
  const auto body = request_body(config_, request);
  Headers headers = {{"Content-Type", "application/json"}};
  if (config_.api_key) headers.emplace_back("Authorization", "Bearer " + *config_.api_key);

  const int attempts = 1 + std::max(0, config_.max_retries);
  auto backoff = config_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    limiter_.acquire();
    HttpReply reply;
    try {
      reply = transport_->post(path, body, headers);
    } catch (...) {
      limiter_.release();
      throw;
    }
    limiter_.release();

    if (reply.status == 401 || reply.status == 403) {
      throw AuthenticationError("backend rejected credentials (HTTP " + std::to_string(reply.status) + ")");
    }
    if (reply.status >= 200 && reply.status < 300) {
      try {
        auto r = parse_response_body(request.mode, reply.body);
        r.text = strip_stop_suffix(std::move(r.text), request.stop);
        return r;
      } catch (const DataError& e) {
        GenResponse r;
        r.finish_reason = FinishReason::kError;
        r.error = std::string("malformed response body: ") + e.what();
        return r;
      }
    }
    last_error = reply.status == 0 ? "transport error: " + reply.transport_error
                                   : "HTTP " + std::to_string(reply.status);
    if (!is_retryable_status(reply.status)) break;
    if (attempt < attempts) {
      sleeper_(backoff);
      backoff *= 2;
    }
  }
  GenResponse r;
  r.finish_reason = FinishReason::kError;
  r.error = last_error;
  return r;
}

std::vector<GenResponse> generate_batch(Generator& generator, std::span<const GenRequest> requests,
                                        std::size_t max_in_flight) {
  std::vector<GenResponse> out(requests.size());
  if (requests.empty()) return out;
  const std::size_t workers = std::min<std::size_t>(std::max<std::size_t>(max_in_flight, 1), requests.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto work = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= requests.size()) return;
      try {
        out[i] = generator.generate(requests[i]);
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        failed = true;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace rifl
