#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace scg {

/// One recorded workflow event. The payload carries kind-specific fields;
/// nothing time-dependent is stored, so identical runs serialize
/// byte-identically.
struct TranscriptEvent {
    int seq = 0;
    std::string kind;
    nlohmann::json payload;

    bool operator==(const TranscriptEvent&) const = default;
};

/// Ordered record of every LLM exchange, sandbox outcome, and decision in
/// one workflow run. Event kinds:
///   run_header, llm_exchange, sandbox_run, decision, predicted_cwes,
///   guidelines_retrieved, code_updated, tests_updated, enforce_func_end,
///   warning, final
class WorkflowTranscript {
public:
    int add(std::string kind, nlohmann::json payload);

    const std::vector<TranscriptEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

    /// Number of events of one kind.
    int count(std::string_view kind) const;
    /// Events of one kind, in order.
    std::vector<TranscriptEvent> of_kind(std::string_view kind) const;
    /// Last event of a kind, or nullptr.
    const TranscriptEvent* last_of_kind(std::string_view kind) const;

    /// One JSON object per line, in event order.
    std::string to_jsonl() const;
    static WorkflowTranscript from_jsonl(const std::string& text);

    void save(const std::filesystem::path& path) const;
    static WorkflowTranscript load(const std::filesystem::path& path);

    bool operator==(const WorkflowTranscript&) const = default;

private:
    std::vector<TranscriptEvent> events_;
};

}  // namespace scg
