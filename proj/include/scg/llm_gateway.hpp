#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scg/errors.hpp"
#include "scg/types.hpp"

namespace scg {

/// The response parsed fine as transport but not as the expected artifact
/// (no code block, no firm yes/no) even after the retry budget.
class ResponseFormatError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

struct SamplingParams {
    double temperature = 0.7;
    int max_output_tokens = 4096;
};

struct ChatMessage {
    std::string role;  ///< "user" or "assistant"
    std::string content;
};

struct ChatRequest {
    StageTag stage = StageTag::GenCode;
    /// Full conversation; the last entry is the new user turn. Single-turn
    /// requests hold exactly one message.
    std::vector<ChatMessage> messages;
    SamplingParams sampling;
    std::string model_id;

    /// The text covered by cassette digests: the bare content for
    /// single-turn requests, a role-marked concatenation otherwise.
    std::string prompt_text() const;
};

enum class FinishState { Complete, Truncated, Refused };

std::string_view to_string(FinishState state);
std::optional<FinishState> finish_state_from_string(std::string_view name);

struct ChatResponse {
    std::string text;
    FinishState finish_state = FinishState::Complete;
    int prompt_tokens = 0;
    int completion_tokens = 0;
};

/// SHA-256 over stage tag + unit separator + prompt text, hex encoded.
/// Sampling parameters are deliberately excluded so prompt-preserving
/// refactors keep recorded cassettes valid.
std::string request_digest(StageTag stage, const std::string& prompt_text);

// ---------------------------------------------------------------------------
// Cassettes
// ---------------------------------------------------------------------------

enum class CassetteMode { StrictSequence, DigestLookup };

std::string_view to_string(CassetteMode mode);
std::optional<CassetteMode> cassette_mode_from_string(std::string_view name);

struct CassetteEntry {
    int seq = 0;
    StageTag stage = StageTag::GenCode;
    std::string prompt_digest;
    std::string prompt_text;
    std::string response_text;
    FinishState finish_state = FinishState::Complete;
};

/// An ordered recording of exchanges, stored as one JSON object per line.
/// StrictSequence replay consumes entries in recording order (retries were
/// recorded too, so they replay naturally). DigestLookup serves each entry
/// at most once by digest and rejects files with duplicate digests.
class Cassette {
public:
    Cassette() = default;
    explicit Cassette(CassetteMode mode) : mode_(mode) {}

    static Cassette load(const std::filesystem::path& path,
                         CassetteMode mode = CassetteMode::StrictSequence);
    void save(const std::filesystem::path& path) const;

    /// Replay: the recorded entry matching `digest`. Throws GatewayError on
    /// digest mismatch (strict) or when no unconsumed entry matches (lookup)
    /// or when the cassette is exhausted.
    const CassetteEntry& next(const std::string& digest);

    void append(CassetteEntry entry);

    std::size_t size() const { return entries_.size(); }
    std::size_t consumed() const { return cursor_; }
    bool exhausted() const;
    CassetteMode mode() const { return mode_; }
    const std::vector<CassetteEntry>& entries() const { return entries_; }

private:
    CassetteMode mode_ = CassetteMode::StrictSequence;
    std::vector<CassetteEntry> entries_;
    std::size_t cursor_ = 0;            // strict_sequence position
    std::vector<bool> consumed_flags_;  // digest_lookup bookkeeping
};

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

class Backend {
public:
    virtual ~Backend() = default;
    virtual ChatResponse complete(const ChatRequest& request) = 0;
};

struct HttpBackendOptions {
    std::string base_url;  ///< e.g. "https://api.openai.com/v1"
    double requests_per_minute = 0.0;  ///< 0 = unthrottled
    double timeout_s = 120.0;
};

/// OpenAI-style chat-completions client. The bearer credential comes from
/// the SCG_API_KEY environment variable only; construction fails without it.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(HttpBackendOptions options);
    ChatResponse complete(const ChatRequest& request) override;

private:
    void throttle();

    HttpBackendOptions options_;
    std::string api_key_;
    std::string host_;  ///< scheme://host[:port]
    std::string path_prefix_;
    std::mutex dispatch_mu_;
    std::chrono::steady_clock::time_point next_dispatch_;
};

/// Serves recorded responses; never performs I/O after construction.
class ReplayBackend : public Backend {
public:
    explicit ReplayBackend(Cassette cassette);
    ChatResponse complete(const ChatRequest& request) override;

    const Cassette& cassette() const { return cassette_; }

private:
    std::mutex mu_;
    Cassette cassette_;
};

/// Forwards to an inner backend and accumulates a cassette of the traffic.
class RecordBackend : public Backend {
public:
    explicit RecordBackend(std::shared_ptr<Backend> inner);
    ChatResponse complete(const ChatRequest& request) override;

    /// Atomically writes the accumulated cassette.
    void save(const std::filesystem::path& path) const;
    const Cassette& cassette() const { return cassette_; }

private:
    std::shared_ptr<Backend> inner_;
    mutable std::mutex mu_;
    Cassette cassette_;
    int next_seq_ = 1;
};

/// Test/backdoor backend driven by a callable.
class CallbackBackend : public Backend {
public:
    using Handler = std::function<ChatResponse(const ChatRequest&)>;
    explicit CallbackBackend(Handler handler) : handler_(std::move(handler)) {}
    ChatResponse complete(const ChatRequest& request) override {
        return handler_(request);
    }

private:
    Handler handler_;
};

// ---------------------------------------------------------------------------
// Gateway
// ---------------------------------------------------------------------------

struct GatewayOptions {
    /// Extra attempts after the first for refused, truncated, or
    /// unparseable responses.
    int max_retries = 2;
};

/// Retry and validation layer over a backend. Thread-safe to the extent the
/// backend is; replay and record backends serialize internally.
class LlmGateway {
public:
    explicit LlmGateway(std::shared_ptr<Backend> backend,
                        GatewayOptions options = {});

    /// A response with finish_state == complete, retrying otherwise.
    ChatResponse complete(const ChatRequest& request);

    /// Additionally runs `validate` (which throws ParseError to reject);
    /// rejected responses consume retries. Exhausting the budget on
    /// validation failures raises ResponseFormatError; on transport-level
    /// refusals/truncation it raises GatewayError.
    ChatResponse complete_validated(
        const ChatRequest& request,
        const std::function<void(const ChatResponse&)>& validate);

    Backend& backend() { return *backend_; }

private:
    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
};

}  // namespace scg
