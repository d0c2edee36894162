#include "scg/llm_gateway.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "scg/persist.hpp"

namespace scg {

using nlohmann::json;

std::string ChatRequest::prompt_text() const {
    if (messages.size() == 1) return messages.front().content;
    std::string out;
    for (const ChatMessage& m : messages) {
        out += "=== ";
        out += m.role;
        out += " ===\n";
        out += m.content;
        out += "\n";
    }
    return out;
}

std::string_view to_string(FinishState state) {
    switch (state) {
        case FinishState::Complete: return "complete";
        case FinishState::Truncated: return "truncated";
        case FinishState::Refused: return "refused";
    }
    return "unknown";
}

std::optional<FinishState> finish_state_from_string(std::string_view name) {
    if (name == "complete") return FinishState::Complete;
    if (name == "truncated") return FinishState::Truncated;
    if (name == "refused") return FinishState::Refused;
    return std::nullopt;
}

std::string_view to_string(CassetteMode mode) {
    switch (mode) {
        case CassetteMode::StrictSequence: return "strict_sequence";
        case CassetteMode::DigestLookup: return "digest_lookup";
    }
    return "strict_sequence";
}

std::optional<CassetteMode> cassette_mode_from_string(std::string_view name) {
    if (name == "strict_sequence") return CassetteMode::StrictSequence;
    if (name == "digest_lookup") return CassetteMode::DigestLookup;
    return std::nullopt;
}

std::string request_digest(StageTag stage, const std::string& prompt_text) {
    std::string material(to_string(stage));
    material += '\x1f';
    material += prompt_text;

    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int md_len = 0;
    if (EVP_Digest(material.data(), material.size(), md, &md_len,
                   EVP_sha256(), nullptr) != 1) {
        throw GatewayError("SHA-256 digest failed");
    }
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(md_len * 2);
    for (unsigned int i = 0; i < md_len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Cassette
// ---------------------------------------------------------------------------

Cassette Cassette::load(const std::filesystem::path& path, CassetteMode mode) {
    std::string content = read_file(path);
    Cassette cassette(mode);

    std::istringstream in(content);
    std::string line;
    int record = 0;
    std::vector<std::string> seen_digests;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++record;
        std::string where =
            path.string() + ": record " + std::to_string(record);
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        CassetteEntry entry;
        try {
            entry.seq = obj.at("seq").get<int>();
            std::string stage_name = obj.at("stage").get<std::string>();
            auto stage = stage_from_string(stage_name);
            if (!stage) {
                throw ParseError(where + ": unknown stage \"" + stage_name +
                                 "\"");
            }
            entry.stage = *stage;
            entry.prompt_digest = obj.at("prompt_digest").get<std::string>();
            entry.prompt_text = obj.at("prompt_text").get<std::string>();
            entry.response_text = obj.at("response_text").get<std::string>();
            std::string finish = obj.at("finish_state").get<std::string>();
            auto state = finish_state_from_string(finish);
            if (!state) {
                throw ParseError(where + ": unknown finish_state \"" + finish +
                                 "\"");
            }
            entry.finish_state = *state;
        } catch (const ParseError&) {
            throw;
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        if (mode == CassetteMode::DigestLookup) {
            for (const std::string& d : seen_digests) {
                if (d == entry.prompt_digest) {
                    throw ParseError(where +
                                     ": duplicate digest in digest_lookup "
                                     "mode: " +
                                     entry.prompt_digest);
                }
            }
            seen_digests.push_back(entry.prompt_digest);
        }
        cassette.entries_.push_back(std::move(entry));
    }
    cassette.consumed_flags_.assign(cassette.entries_.size(), false);
    return cassette;
}

void Cassette::save(const std::filesystem::path& path) const {
    std::string out;
    for (const CassetteEntry& e : entries_) {
        json obj{{"seq", e.seq},
                 {"stage", std::string(to_string(e.stage))},
                 {"prompt_digest", e.prompt_digest},
                 {"prompt_text", e.prompt_text},
                 {"response_text", e.response_text},
                 {"finish_state", std::string(to_string(e.finish_state))}};
        out += obj.dump();
        out += "\n";
    }
    atomic_write_file(path, out);
}

const CassetteEntry& Cassette::next(const std::string& digest) {
    if (mode_ == CassetteMode::StrictSequence) {
        if (cursor_ >= entries_.size()) {
            throw GatewayError("cassette exhausted after " +
                               std::to_string(entries_.size()) +
                               " exchanges");
        }
        const CassetteEntry& entry = entries_[cursor_];
        if (entry.prompt_digest != digest) {
            throw GatewayError(
                "cassette digest mismatch at entry " +
                std::to_string(cursor_ + 1) + ": recorded stage " +
                std::string(to_string(entry.stage)) + ", digest " +
                entry.prompt_digest.substr(0, 12) + "..., requested " +
                digest.substr(0, 12) + "...");
        }
        ++cursor_;
        return entry;
    }
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (!consumed_flags_[i] && entries_[i].prompt_digest == digest) {
            consumed_flags_[i] = true;
            ++cursor_;
            return entries_[i];
        }
    }
    throw GatewayError("no unconsumed cassette entry for digest " +
                       digest.substr(0, 12) + "...");
}

bool Cassette::exhausted() const { return cursor_ >= entries_.size(); }

void Cassette::append(CassetteEntry entry) {
    if (consumed_flags_.size() == entries_.size()) {
        consumed_flags_.push_back(false);
    }
    entries_.push_back(std::move(entry));
}

// ---------------------------------------------------------------------------
// HttpBackend
// ---------------------------------------------------------------------------

HttpBackend::HttpBackend(HttpBackendOptions options)
    : options_(std::move(options)),
      next_dispatch_(std::chrono::steady_clock::now()) {
    const char* key = std::getenv("SCG_API_KEY");
    if (key == nullptr || *key == '\0') {
        throw GatewayError(
            "live backend requires the SCG_API_KEY environment variable");
    }
    api_key_ = key;

    const std::string& url = options_.base_url;
    if (url.empty()) throw GatewayError("live backend requires a base URL");
    auto scheme_end = url.find("://");
    std::size_t host_start =
        scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = url.find('/', host_start);
    if (path_start == std::string::npos) {
        host_ = url;
    } else {
        host_ = url.substr(0, path_start);
        path_prefix_ = url.substr(path_start);
    }
    while (!path_prefix_.empty() && path_prefix_.back() == '/') {
        path_prefix_.pop_back();
    }
}

void HttpBackend::throttle() {
    if (options_.requests_per_minute <= 0) return;
    auto interval = std::chrono::duration<double>(
        60.0 / options_.requests_per_minute);
    std::chrono::steady_clock::time_point wait_until;
    {
        std::lock_guard lock(dispatch_mu_);
        auto now = std::chrono::steady_clock::now();
        if (next_dispatch_ < now) next_dispatch_ = now;
        wait_until = next_dispatch_;
        next_dispatch_ +=
            std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                interval);
    }
    std::this_thread::sleep_until(wait_until);
}

ChatResponse HttpBackend::complete(const ChatRequest& request) {
    throttle();

    json messages = json::array();
    for (const ChatMessage& m : request.messages) {
        messages.push_back({{"role", m.role}, {"content", m.content}});
    }
    json body{{"model", request.model_id},
              {"messages", messages},
              {"temperature", request.sampling.temperature},
              {"max_tokens", request.sampling.max_output_tokens}};

    httplib::Client client(host_);
    client.set_connection_timeout(std::chrono::duration<double>(30.0));
    client.set_read_timeout(std::chrono::duration<double>(options_.timeout_s));
    client.set_bearer_token_auth(api_key_);

    auto res = client.Post(path_prefix_ + "/chat/completions", body.dump(),
                           "application/json");
    if (!res) {
        throw GatewayError("chat completion request failed: " +
                           httplib::to_string(res.error()));
    }
    if (res->status < 200 || res->status >= 300) {
        throw GatewayError("chat completion HTTP " +
                           std::to_string(res->status) + ": " +
                           res->body.substr(0, 512));
    }

    json doc;
    try {
        doc = json::parse(res->body);
    } catch (const json::exception& e) {
        throw GatewayError(std::string("malformed completion payload: ") +
                           e.what());
    }
    try {
        const json& choice = doc.at("choices").at(0);
        ChatResponse response;
        response.text = choice.at("message").at("content").get<std::string>();
        std::string reason =
            choice.value("finish_reason", std::string("stop"));
        if (reason == "length") {
            response.finish_state = FinishState::Truncated;
        } else if (reason == "content_filter" || reason == "refusal") {
            response.finish_state = FinishState::Refused;
        } else {
            response.finish_state = FinishState::Complete;
        }
        if (doc.contains("usage")) {
            response.prompt_tokens =
                doc["usage"].value("prompt_tokens", 0);
            response.completion_tokens =
                doc["usage"].value("completion_tokens", 0);
        }
        return response;
    } catch (const json::exception& e) {
        throw GatewayError(std::string("unexpected completion shape: ") +
                           e.what());
    }
}

// ---------------------------------------------------------------------------
// Replay / Record
// ---------------------------------------------------------------------------

ReplayBackend::ReplayBackend(Cassette cassette)
    : cassette_(std::move(cassette)) {}

ChatResponse ReplayBackend::complete(const ChatRequest& request) {
    std::lock_guard lock(mu_);
    std::string digest = request_digest(request.stage, request.prompt_text());
    const CassetteEntry& entry = cassette_.next(digest);
    if (entry.stage != request.stage) {
        throw GatewayError("cassette stage mismatch: recorded " +
                           std::string(to_string(entry.stage)) +
                           ", requested " +
                           std::string(to_string(request.stage)));
    }
    ChatResponse response;
    response.text = entry.response_text;
    response.finish_state = entry.finish_state;
    return response;
}

RecordBackend::RecordBackend(std::shared_ptr<Backend> inner)
    : inner_(std::move(inner)) {}

ChatResponse RecordBackend::complete(const ChatRequest& request) {
    ChatResponse response = inner_->complete(request);
    std::string prompt = request.prompt_text();
    CassetteEntry entry;
    entry.stage = request.stage;
    entry.prompt_digest = request_digest(request.stage, prompt);
    entry.prompt_text = std::move(prompt);
    entry.response_text = response.text;
    entry.finish_state = response.finish_state;
    {
        std::lock_guard lock(mu_);
        entry.seq = next_seq_++;
        cassette_.append(std::move(entry));
    }
    return response;
}

void RecordBackend::save(const std::filesystem::path& path) const {
    std::lock_guard lock(mu_);
    cassette_.save(path);
}

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

LlmGateway::LlmGateway(std::shared_ptr<Backend> backend,
                       GatewayOptions options)
    : backend_(std::move(backend)), options_(options) {
    if (!backend_) throw GatewayError("gateway requires a backend");
}

ChatResponse LlmGateway::complete(const ChatRequest& request) {
    return complete_validated(request, [](const ChatResponse&) {});
}

ChatResponse LlmGateway::complete_validated(
    const ChatRequest& request,
    const std::function<void(const ChatResponse&)>& validate) {
    if (request.messages.empty() ||
        request.messages.back().content.empty()) {
        throw GatewayError("refusing to send an empty prompt");
    }
    int attempts = options_.max_retries + 1;
    std::string last_failure;
    bool last_was_format = false;
    for (int attempt = 1; attempt <= attempts; ++attempt) {
        ChatResponse response = backend_->complete(request);
        if (response.finish_state != FinishState::Complete) {
            last_failure = "finish_state=" +
                           std::string(to_string(response.finish_state));
            last_was_format = false;
            continue;
        }
        try {
            validate(response);
        } catch (const ParseError& e) {
            last_failure = e.what();
            last_was_format = true;
            continue;
        }
        return response;
    }
    std::string message = std::string(to_string(request.stage)) +
                          ": no usable response after " +
                          std::to_string(attempts) +
                          " attempts; last failure: " + last_failure;
    if (last_was_format) throw ResponseFormatError(message);
    throw GatewayError(message);
}

}  // namespace scg
