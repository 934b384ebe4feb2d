#include "aegis/gateway.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "aegis/errors.hpp"
#include "aegis/util.hpp"

namespace aegis {

namespace {

using nlohmann::json;

void validate_request(const CompletionRequest& request) {
    if (request.tag.empty()) throw ConfigError("completion request has an empty tag");
    if (request.temperature < 0.0 || request.temperature > 2.0) {
        throw ConfigError("temperature out of range [0,2]: " +
                          std::to_string(request.temperature));
    }
    if (request.max_tokens <= 0) throw ConfigError("max_tokens must be positive");
    for (std::size_t i = 0; i < request.messages.size(); ++i) {
        const auto& msg = request.messages[i];
        if (msg.role == ChatRole::system && i != 0) {
            throw ConfigError("system message must come first (tag " + request.tag + ")");
        }
        if (msg.role != ChatRole::assistant && msg.content.empty()) {
            throw ConfigError("empty " + to_string(msg.role) + " message (tag " + request.tag +
                              ")");
        }
    }
}

json request_to_json(const CompletionRequest& request) {
    json messages = json::array();
    for (const auto& msg : request.messages) {
        messages.push_back(json{{"role", to_string(msg.role)}, {"content", msg.content}});
    }
    return json{{"messages", messages},
                {"temperature", request.temperature},
                {"max_tokens", request.max_tokens},
                {"tag", request.tag}};
}

CompletionRequest request_from_json(const json& j) {
    CompletionRequest request;
    for (const auto& msg : j.at("messages")) {
        request.messages.push_back(ChatMessage{
            chat_role_from_string(msg.at("role").get<std::string>()),
            msg.at("content").get<std::string>()});
    }
    request.temperature = j.at("temperature").get<double>();
    request.max_tokens = j.at("max_tokens").get<int>();
    request.tag = j.at("tag").get<std::string>();
    return request;
}

}  // namespace

std::string to_string(ChatRole role) {
    switch (role) {
        case ChatRole::system: return "system";
        case ChatRole::user: return "user";
        case ChatRole::assistant: return "assistant";
    }
    return "user";
}

ChatRole chat_role_from_string(const std::string& text) {
    if (text == "system") return ChatRole::system;
    if (text == "user") return ChatRole::user;
    if (text == "assistant") return ChatRole::assistant;
    throw IoError("unknown chat role: " + text);
}

void Transcript::append(TranscriptEntry entry) { entries_.push_back(std::move(entry)); }

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto& entry : entries_) {
        json j{{"request", request_to_json(entry.request)},
               {"response", entry.response},
               {"latency_ms", entry.latency_ms},
               {"backend_id", entry.backend_id}};
        out += j.dump() + "\n";
    }
    return out;
}

Transcript Transcript::from_jsonl(const std::string& text) {
    Transcript transcript;
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(text)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError("transcript line " + std::to_string(line_no) + ": " + e.what());
        }
        TranscriptEntry entry;
        entry.request = request_from_json(j.at("request"));
        entry.response = j.at("response").get<std::string>();
        entry.latency_ms = j.value("latency_ms", std::int64_t{0});
        entry.backend_id = j.value("backend_id", std::string{});
        transcript.append(std::move(entry));
    }
    return transcript;
}

void Transcript::save(const std::string& path) const {
    util::write_file_atomic(path, to_jsonl());
}

Transcript Transcript::load(const std::string& path) {
    return from_jsonl(util::read_file(path));
}

std::string complete(ChatBackend& backend, const CompletionRequest& request,
                     Transcript& transcript) {
    validate_request(request);
    const auto start = std::chrono::steady_clock::now();
    std::string response = backend.complete_raw(request);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    TranscriptEntry entry;
    entry.request = request;
    entry.response = response;
    entry.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count();
    entry.backend_id = backend.id();
    transcript.append(std::move(entry));
    return response;
}

ScriptedBackend::ScriptedBackend(std::string id) : id_(std::move(id)) {}

void ScriptedBackend::add_response(const std::string& tag, std::string response) {
    std::lock_guard lock(mutex_);
    responses_[tag].push_back(std::move(response));
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_jsonl(const std::string& text,
                                                             const std::string& id) {
    auto backend = std::make_unique<ScriptedBackend>(id);
    std::size_t line_no = 0;
    for (const auto& line : util::split_lines(text)) {
        ++line_no;
        if (util::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw IoError("script line " + std::to_string(line_no) + ": " + e.what());
        }
        backend->add_response(j.at("tag").get<std::string>(),
                              j.at("response").get<std::string>());
    }
    return backend;
}

std::unique_ptr<ScriptedBackend> ScriptedBackend::from_script_file(const std::string& path) {
    return from_jsonl(util::read_file(path), "scripted:" + path);
}

std::string ScriptedBackend::complete_raw(const CompletionRequest& request) {
    std::lock_guard lock(mutex_);
    ledger_.push_back(request.tag);
    const auto it = responses_.find(request.tag);
    if (it == responses_.end()) {
        throw ScriptExhaustedError("no scripted response for tag: " + request.tag);
    }
    std::size_t& cursor = cursor_[request.tag];
    if (cursor >= it->second.size()) {
        throw ScriptExhaustedError("scripted responses exhausted for tag: " + request.tag +
                                   " (served " + std::to_string(cursor) + ")");
    }
    return it->second[cursor++];
}

std::vector<std::string> ScriptedBackend::call_ledger() const {
    std::lock_guard lock(mutex_);
    return ledger_;
}

ReplayBackend::ReplayBackend(const Transcript& transcript) {
    recorded_.reserve(transcript.size());
    for (const auto& entry : transcript.entries()) {
        recorded_.emplace_back(entry.request.tag, entry.response);
    }
}

std::string ReplayBackend::complete_raw(const CompletionRequest& request) {
    std::lock_guard lock(mutex_);
    if (position_ >= recorded_.size()) {
        throw ScriptExhaustedError("replay transcript exhausted at request tag: " + request.tag);
    }
    const auto& [expected_tag, response] = recorded_[position_];
    if (expected_tag != request.tag) {
        throw ReplayDivergenceError("replay divergence at position " + std::to_string(position_) +
                                        ": recorded tag '" + expected_tag + "', requested tag '" +
                                        request.tag + "'",
                                    expected_tag, request.tag);
    }
    ++position_;
    return response;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) {
        if (const char* env = std::getenv("AEGIS_BASE_URL")) config_.base_url = env;
    }
    if (config_.api_key.empty()) {
        if (const char* env = std::getenv("AEGIS_API_KEY")) config_.api_key = env;
    }
    if (config_.base_url.empty()) {
        throw ConfigError("http backend needs a base URL (config or AEGIS_BASE_URL)");
    }
}

std::string HttpBackend::id() const { return "http:" + config_.model; }

std::string HttpBackend::complete_raw(const CompletionRequest& request) {
    json messages = json::array();
    for (const auto& msg : request.messages) {
        messages.push_back(json{{"role", to_string(msg.role)}, {"content", msg.content}});
    }
    const json body{{"model", config_.model},
                    {"messages", messages},
                    {"temperature", request.temperature},
                    {"max_tokens", request.max_tokens}};
    const std::string payload = body.dump();

    int backoff_ms = config_.backoff_initial_ms;
    for (int attempt = 1;; ++attempt) {
        httplib::Client client(config_.base_url);
        client.set_connection_timeout(config_.timeout_seconds, 0);
        client.set_read_timeout(config_.timeout_seconds, 0);
        httplib::Headers headers;
        if (!config_.api_key.empty()) {
            headers.emplace("Authorization", "Bearer " + config_.api_key);
        }
        auto result = client.Post(config_.path, headers, payload, "application/json");
        if (!result) {
            // Transport error: retryable up to max_attempts.
            if (attempt >= config_.max_attempts) {
                throw BackendError("transport error after " + std::to_string(attempt) +
                                       " attempts (tag " + request.tag +
                                       "): " + httplib::to_string(result.error()),
                                   0, attempt);
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
            continue;
        }
        if (result->status < 200 || result->status >= 300) {
            throw BackendError("backend returned status " + std::to_string(result->status) +
                                   " (tag " + request.tag + ")",
                               result->status, attempt);
        }
        try {
            const json reply = json::parse(result->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw BackendError("malformed completion payload (tag " + request.tag +
                                   "): " + e.what(),
                               result->status, attempt);
        }
    }
}

}  // namespace aegis
