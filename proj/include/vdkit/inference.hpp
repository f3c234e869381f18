#pragma once

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "vdkit/common.hpp"
#include "vdkit/metrics.hpp"
#include "vdkit/parallel.hpp"
#include "vdkit/prompt.hpp"

namespace vdkit {

// Chat-completion endpoint plus the decoding settings the runner pins by
// default: temperature 0, top-p 0.9, at most 10 new tokens.
struct EndpointConfig {
    std::string url;  // http://host:port/path
    std::string model = "default";
    double temperature = 0.0;
    double top_p = 0.9;
    int max_new_tokens = 10;
    std::string auth_env = "VDKIT_API_TOKEN";
    int max_retries = 3;
    int backoff_ms = 250;
    unsigned workers = 4;
    int timeout_s = 120;
    std::string log_path;  // raw request/reply JSONL; empty disables

    static EndpointConfig from_json(const nlohmann::json& j) {
        EndpointConfig c;
        c.url = j.value("url", c.url);
        c.model = j.value("model", c.model);
        c.temperature = j.value("temperature", c.temperature);
        c.top_p = j.value("top_p", c.top_p);
        c.max_new_tokens = j.value("max_new_tokens", c.max_new_tokens);
        c.auth_env = j.value("auth_env", c.auth_env);
        c.max_retries = j.value("max_retries", c.max_retries);
        c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
        c.workers = j.value("workers", c.workers);
        c.timeout_s = j.value("timeout_s", c.timeout_s);
        c.log_path = j.value("log_path", c.log_path);
        return c;
    }
};

struct InferenceResult {
    std::string record_id;
    Verdict verdict = Verdict::Abstain;
    std::string raw_reply;
    int http_status = 0;
    int attempts = 0;

    nlohmann::json to_json() const {
        return {{"record_id", record_id},
                {"verdict", to_string(verdict)},
                {"raw_reply", raw_reply},
                {"http_status", http_status},
                {"attempts", attempts}};
    }
};

// First standalone, case-insensitive "yes"/"no" decides; anything else
// abstains. "cannot" does not contain a standalone "no".
inline Verdict parse_verdict(std::string_view reply) {
    size_t i = 0;
    const size_t n = reply.size();
    auto alpha = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; };
    while (i < n) {
        while (i < n && !alpha(reply[i])) ++i;
        size_t j = i;
        while (j < n && alpha(reply[j])) ++j;
        const size_t len = j - i;
        if (len == 3 || len == 2) {
            char w[3] = {0, 0, 0};
            for (size_t k = 0; k < len; ++k) {
                w[k] = static_cast<char>(std::tolower(static_cast<unsigned char>(reply[i + k])));
            }
            if (len == 3 && w[0] == 'y' && w[1] == 'e' && w[2] == 's') {
                return Verdict::Vulnerable;
            }
            if (len == 2 && w[0] == 'n' && w[1] == 'o') return Verdict::NonVulnerable;
        }
        i = j;
    }
    return Verdict::Abstain;
}

namespace detail {

struct ParsedUrl {
    std::string scheme_host;  // scheme://host:port for httplib::Client
    std::string path;
};

inline ParsedUrl parse_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw EndpointError("endpoint url needs a scheme: " + url);
    }
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/v1/chat/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

inline std::string extract_reply_text(const nlohmann::json& body) {
    if (body.contains("choices") && body.at("choices").is_array() &&
        !body.at("choices").empty()) {
        const auto& choice = body.at("choices").front();
        if (choice.contains("message") && choice.at("message").contains("content")) {
            const auto& content = choice.at("message").at("content");
            if (content.is_string()) return content.get<std::string>();
        }
        if (choice.contains("text") && choice.at("text").is_string()) {
            return choice.at("text").get<std::string>();
        }
    }
    if (body.contains("content") && body.at("content").is_string()) {
        return body.at("content").get<std::string>();
    }
    return body.dump();
}

inline bool transient_status(int status) {
    return status == 429 || status == 500 || status == 502 || status == 503 || status == 504;
}

}  // namespace detail

// One request per bundle, bounded in-flight concurrency, exponential backoff
// on transient failures, raw replies persisted when a log path is set.
// 401/403 aborts immediately (AuthError); exhausted retries abort the run
// (EndpointError); partial results are in the log, the run can be replayed.
inline std::vector<InferenceResult> run_inference(const std::vector<PromptBundle>& bundles,
                                                  const EndpointConfig& config) {
    const detail::ParsedUrl url = detail::parse_url(config.url);
    const char* token = config.auth_env.empty() ? nullptr : std::getenv(config.auth_env.c_str());

    std::mutex log_mutex;
    std::ofstream log;
    if (!config.log_path.empty()) {
        log.open(config.log_path, std::ios::app);
        if (!log) throw FatalIo("cannot open inference log: " + config.log_path);
    }

    auto one = [&](const PromptBundle& bundle) -> InferenceResult {
        nlohmann::json request = {{"model", config.model},
                                  {"messages", bundle.messages()},
                                  {"temperature", config.temperature},
                                  {"top_p", config.top_p},
                                  {"max_tokens", config.max_new_tokens}};
        const std::string body = request.dump();

        InferenceResult result;
        result.record_id = bundle.record_id;
        std::string last_error;
        for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
            result.attempts = attempt + 1;
            if (attempt > 0) {
                std::this_thread::sleep_for(
                    std::chrono::milliseconds(config.backoff_ms << (attempt - 1)));
            }
            httplib::Client client(url.scheme_host);
            client.set_connection_timeout(config.timeout_s, 0);
            client.set_read_timeout(config.timeout_s, 0);
            httplib::Headers headers;
            if (token && *token) {
                headers.emplace("Authorization", std::string("Bearer ") + token);
            }
            auto res = client.Post(url.path, headers, body, "application/json");
            if (!res) {
                last_error = "connection failed: " + httplib::to_string(res.error());
                continue;
            }
            result.http_status = res->status;
            if (res->status == 401 || res->status == 403) {
                throw AuthError("endpoint rejected credentials (HTTP " +
                                std::to_string(res->status) + ")");
            }
            if (detail::transient_status(res->status)) {
                last_error = "HTTP " + std::to_string(res->status);
                continue;
            }
            if (res->status != 200) {
                throw EndpointError("endpoint returned HTTP " + std::to_string(res->status) +
                                    " for record " + bundle.record_id);
            }
            try {
                const nlohmann::json reply = nlohmann::json::parse(res->body);
                result.raw_reply = detail::extract_reply_text(reply);
            } catch (const nlohmann::json::exception&) {
                result.raw_reply = res->body;
            }
            result.verdict = parse_verdict(result.raw_reply);
            if (log.is_open()) {
                nlohmann::json entry = result.to_json();
                entry["request"] = request;
                std::lock_guard<std::mutex> guard(log_mutex);
                log << entry.dump() << "\n";
                log.flush();
            }
            return result;
        }
        throw EndpointError("record " + bundle.record_id + " failed after " +
                            std::to_string(config.max_retries + 1) + " attempts: " + last_error);
    };

    return parallel_map<InferenceResult>(bundles, one, config.workers);
}

}  // namespace vdkit
