#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace aegis {

enum class ChatRole { system, user, assistant };

std::string to_string(ChatRole role);
ChatRole chat_role_from_string(const std::string& text);

struct ChatMessage {
    ChatRole role = ChatRole::user;
    std::string content;

    bool operator==(const ChatMessage&) const = default;
};

/// One chat completion call. The tag labels the orchestration step
/// ("fusa_manager.stage", "revisor.vv_engineer.r1", ...) so scripted
/// backends and transcripts can address each call without depending on
/// prompt wording.
struct CompletionRequest {
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 4096;
    std::string tag;
};

struct TranscriptEntry {
    CompletionRequest request;
    std::string response;
    std::int64_t latency_ms = 0;
    std::string backend_id;
};

/// Append-only record of every completed call in a run. Serialized as
/// line-delimited JSON so a recorded live session can be replayed offline.
class Transcript {
public:
    void append(TranscriptEntry entry);
    const std::vector<TranscriptEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    std::string to_jsonl() const;
    static Transcript from_jsonl(const std::string& text);
    void save(const std::string& path) const;
    static Transcript load(const std::string& path);

private:
    std::vector<TranscriptEntry> entries_;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string id() const = 0;
    /// Returns the assistant text. Implementations must be safe for
    /// concurrent callers.
    virtual std::string complete_raw(const CompletionRequest& request) = 0;
};

/// Validates the request, invokes the backend, and appends the exchange to
/// the transcript. Run code calls this instead of the backend directly.
std::string complete(ChatBackend& backend, const CompletionRequest& request,
                     Transcript& transcript);

/// Deterministic backend: per tag, an ordered list of canned responses
/// consumed one per call. A pure function of (script, tag, per-tag call
/// count). Missing tag or exhausted list raises ScriptExhaustedError.
class ScriptedBackend : public ChatBackend {
public:
    explicit ScriptedBackend(std::string id = "scripted");

    void add_response(const std::string& tag, std::string response);

    /// Loads a line-delimited JSON script of {"tag": ..., "response": ...}.
    /// Pointer-returning because the instance owns a mutex.
    static std::unique_ptr<ScriptedBackend> from_script_file(const std::string& path);
    static std::unique_ptr<ScriptedBackend> from_jsonl(const std::string& text,
                                                       const std::string& id = "scripted");

    std::string id() const override { return id_; }
    std::string complete_raw(const CompletionRequest& request) override;

    /// Tags of every call served so far, in order.
    std::vector<std::string> call_ledger() const;

private:
    std::string id_;
    std::map<std::string, std::vector<std::string>> responses_;
    std::map<std::string, std::size_t> cursor_;
    std::vector<std::string> ledger_;
    mutable std::mutex mutex_;
};

/// Strictly ordered replay of a recorded transcript. Request i must carry
/// the tag recorded at position i; any mismatch raises
/// ReplayDivergenceError naming both tags.
class ReplayBackend : public ChatBackend {
public:
    explicit ReplayBackend(const Transcript& transcript);

    std::string id() const override { return "replay"; }
    std::string complete_raw(const CompletionRequest& request) override;

private:
    std::vector<std::pair<std::string, std::string>> recorded_;  // (tag, response)
    std::size_t position_ = 0;
    std::mutex mutex_;
};

struct HttpBackendConfig {
    std::string base_url;                           // e.g. "http://localhost:8080"
    std::string path = "/v1/chat/completions";
    std::string model;
    std::string api_key;                            // Bearer credential
    int max_attempts = 3;                           // transport errors only
    int backoff_initial_ms = 1000;                  // doubles per retry
    int timeout_seconds = 60;
};

/// Chat-completions-style HTTP backend. Reads AEGIS_BASE_URL / AEGIS_API_KEY
/// from the environment when the config leaves them empty. Transport errors
/// are retried with exponential backoff; HTTP errors and malformed payloads
/// are not.
class HttpBackend : public ChatBackend {
public:
    explicit HttpBackend(HttpBackendConfig config);

    std::string id() const override;
    std::string complete_raw(const CompletionRequest& request) override;

    const HttpBackendConfig& config() const { return config_; }

private:
    HttpBackendConfig config_;
};

}  // namespace aegis
