#pragma once

#include <atomic>
#include <charconv>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "contracheck/digest.hpp"
#include "contracheck/errors.hpp"

namespace contracheck {

enum class BackendKind { HttpOpenAiCompat, ScriptedReplay };

inline const char* to_string(BackendKind k) {
  return k == BackendKind::HttpOpenAiCompat ? "http" : "replay";
}

/// Configuration for a model backend. Temperature defaults to 0.
struct BackendConfig {
  BackendKind kind = BackendKind::ScriptedReplay;
  std::string model_name = "replay";
  double temperature = 0.0;
  std::string endpoint_url;                     // http backend, e.g. https://api.openai.com
  std::string api_key_env = "OPENAI_API_KEY";   // name of the env var holding the key
  double timeout_s = 60.0;
  int max_parse_retries = 2;
  int max_transport_retries = 2;
  int max_inflight = 4;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path fixture_path;           // replay backend
};

namespace detail {

inline std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "0";
  return std::string(buf, ptr);
}

inline void atomic_write(const std::filesystem::path& path, std::string_view bytes) {
  static std::atomic<std::uint64_t> counter{0};
  const auto tag = std::to_string(counter.fetch_add(1)) + "-" +
                   std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()) & 0xFFFF);
  auto tmp = path;
  tmp += ".tmp-" + tag;
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// Filesystem response cache: one raw-bytes file per key plus a small JSON
/// sidecar. Writes go through a temp file and a rename.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  std::optional<std::string> load(const std::string& key) const {
    std::ifstream in(dir_ / (key + ".txt"), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  void store(const std::string& key, std::string_view response, const std::string& model,
             double temperature) const {
    detail::atomic_write(dir_ / (key + ".txt"), response);
    const nlohmann::json sidecar = {{"model", model},
                                    {"temperature", temperature},
                                    {"timestamp", static_cast<long long>(std::time(nullptr))}};
    detail::atomic_write(dir_ / (key + ".json"), sidecar.dump());
  }

 private:
  std::filesystem::path dir_;
};

/// Loads a replay fixture: a flat JSON map from prompt digest to response.
inline std::map<std::string, std::string> load_replay_fixture(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("replay fixture: cannot read " + path.string());
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw SchemaError("replay fixture: not a JSON object: " + path.string());
  std::map<std::string, std::string> out;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_string())
      throw SchemaError("replay fixture: value for " + key + " is not a string");
    out[key] = value.get<std::string>();
  }
  return out;
}

/// A model backend with optional response caching. Thread-safe; the HTTP
/// variant bounds concurrent requests to `max_inflight` and retries transport
/// failures. The replay variant serves canned responses by prompt digest and
/// raises ReplayMissError on unknown prompts.
class LlmBackend {
 public:
  explicit LlmBackend(BackendConfig config) : config_(std::move(config)) {
    init();
    if (config_.kind == BackendKind::ScriptedReplay && !config_.fixture_path.empty()) {
      replay_ = load_replay_fixture(config_.fixture_path);
    }
  }

  LlmBackend(BackendConfig config, std::map<std::string, std::string> replay_map)
      : config_(std::move(config)), replay_(std::move(replay_map)) {
    init();
  }

  const BackendConfig& config() const { return config_; }

  /// Digest identifying (kind, model, temperature); stamped into traces.
  const std::string& config_digest() const { return config_digest_; }

  /// Number of true backend invocations (cache hits excluded).
  std::uint64_t backend_calls() const { return backend_calls_.load(); }

  static std::string replay_key(std::string_view prompt) { return sha256_hex(prompt); }

  std::string cache_key(std::string_view prompt) const {
    std::string material = config_.model_name;
    material += '\x1f';
    material += detail::format_double(config_.temperature);
    material += '\x1f';
    material += prompt;
    return sha256_hex(material);
  }

  /// Returns the raw completion for `prompt`. Cache reads are skipped when
  /// `bypass_cache_read` is set (parse-retry path); fresh responses are always
  /// written back when a cache is configured.
  std::string invoke(const std::string& prompt, bool bypass_cache_read = false) {
    const std::string key = cache_key(prompt);
    if (cache_ && !bypass_cache_read) {
      if (auto hit = cache_->load(key)) return *hit;
    }
    std::string response = config_.kind == BackendKind::ScriptedReplay ? invoke_replay(prompt)
                                                                       : invoke_http(prompt);
    backend_calls_.fetch_add(1);
    if (cache_) cache_->store(key, response, config_.model_name, config_.temperature);
    return response;
  }

 private:
  void init() {
    if (config_.cache_dir) cache_.emplace(*config_.cache_dir);
    std::string material = std::string(to_string(config_.kind));
    material += '\x1f';
    material += config_.model_name;
    material += '\x1f';
    material += detail::format_double(config_.temperature);
    config_digest_ = sha256_hex(material);
  }

  std::string invoke_replay(const std::string& prompt) const {
    const std::string key = replay_key(prompt);
    const auto it = replay_.find(key);
    if (it == replay_.end())
      throw ReplayMissError("replay fixture has no entry for prompt digest " + key);
    return it->second;
  }

  struct InflightSlot {
    explicit InflightSlot(LlmBackend& b) : backend(b) {
      std::unique_lock lock(backend.inflight_mutex_);
      backend.inflight_cv_.wait(lock, [&] { return backend.inflight_ < backend.config_.max_inflight; });
      ++backend.inflight_;
    }
    ~InflightSlot() {
      {
        std::lock_guard lock(backend.inflight_mutex_);
        --backend.inflight_;
      }
      backend.inflight_cv_.notify_one();
    }
    LlmBackend& backend;
  };

  std::string invoke_http(const std::string& prompt) {
    const char* key = nullptr;
    if (!config_.api_key_env.empty()) key = std::getenv(config_.api_key_env.c_str());
    if (key == nullptr || *key == '\0')
      throw AuthError("api key environment variable " + config_.api_key_env + " is not set");

    for (int attempt = 0;; ++attempt) {
      try {
        InflightSlot slot(*this);
        return post_chat_completion(prompt, key);
      } catch (const TransportError&) {
        if (attempt >= config_.max_transport_retries) throw;
        std::this_thread::sleep_for(std::chrono::milliseconds(100 * (attempt + 1)));
      }
    }
  }

  std::string post_chat_completion(const std::string& prompt, const char* api_key) {
    const auto [base, path] = split_endpoint(config_.endpoint_url);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base.rfind("https://", 0) == 0)
      throw TransportError("https endpoint requires a build with OpenSSL support");
#endif
    httplib::Client client(base);
    const auto timeout_s = static_cast<time_t>(config_.timeout_s);
    const auto timeout_us =
        static_cast<time_t>((config_.timeout_s - static_cast<double>(timeout_s)) * 1e6);
    client.set_connection_timeout(timeout_s, timeout_us);
    client.set_read_timeout(timeout_s, timeout_us);
    client.set_write_timeout(timeout_s, timeout_us);

    const nlohmann::json body = {
        {"model", config_.model_name},
        {"temperature", config_.temperature},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
    httplib::Headers headers = {{"Authorization", std::string("Bearer ") + api_key}};
    const auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      throw TransportError("http request failed: " + httplib::to_string(res.error()));
    }
    if (res->status == 401 || res->status == 403) {
      throw AuthError("backend rejected credentials (status " + std::to_string(res->status) + ")");
    }
    if (res->status != 200) {
      throw TransportError("backend returned status " + std::to_string(res->status));
    }
    const auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded() || !j.contains("choices") || !j["choices"].is_array() ||
        j["choices"].empty() || !j["choices"][0].contains("message") ||
        !j["choices"][0]["message"].contains("content") ||
        !j["choices"][0]["message"]["content"].is_string()) {
      throw TransportError("malformed chat-completion envelope");
    }
    return j["choices"][0]["message"]["content"].get<std::string>();
  }

  // "https://host:1234/custom/path" -> {"https://host:1234", "/custom/path"};
  // a bare origin gets the default chat-completions path.
  static std::pair<std::string, std::string> split_endpoint(const std::string& url) {
    if (url.empty()) throw TransportError("http backend: endpoint_url is empty");
    const auto scheme_end = url.find("://");
    const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_begin = url.find('/', host_begin);
    if (path_begin == std::string::npos || path_begin + 1 == url.size()) {
      const auto base = path_begin == std::string::npos ? url : url.substr(0, path_begin);
      return {base, "/v1/chat/completions"};
    }
    return {url.substr(0, path_begin), url.substr(path_begin)};
  }

  BackendConfig config_;
  std::map<std::string, std::string> replay_;
  std::optional<ResponseCache> cache_;
  std::string config_digest_;
  std::atomic<std::uint64_t> backend_calls_{0};
  std::mutex inflight_mutex_;
  std::condition_variable inflight_cv_;
  int inflight_ = 0;
};

}  // namespace contracheck
