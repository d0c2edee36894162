#include "scg/transcript.hpp"

#include <sstream>

#include "scg/errors.hpp"
#include "scg/persist.hpp"

namespace scg {

using nlohmann::json;

int WorkflowTranscript::add(std::string kind, json payload) {
    TranscriptEvent event;
    event.seq = static_cast<int>(events_.size()) + 1;
    event.kind = std::move(kind);
    event.payload = std::move(payload);
    events_.push_back(std::move(event));
    return events_.back().seq;
}

int WorkflowTranscript::count(std::string_view kind) const {
    int n = 0;
    for (const TranscriptEvent& e : events_) {
        if (e.kind == kind) ++n;
    }
    return n;
}

std::vector<TranscriptEvent> WorkflowTranscript::of_kind(
    std::string_view kind) const {
    std::vector<TranscriptEvent> out;
    for (const TranscriptEvent& e : events_) {
        if (e.kind == kind) out.push_back(e);
    }
    return out;
}

const TranscriptEvent* WorkflowTranscript::last_of_kind(
    std::string_view kind) const {
    for (auto it = events_.rbegin(); it != events_.rend(); ++it) {
        if (it->kind == kind) return &*it;
    }
    return nullptr;
}

std::string WorkflowTranscript::to_jsonl() const {
    std::string out;
    for (const TranscriptEvent& e : events_) {
        json obj = e.payload;
        obj["seq"] = e.seq;
        obj["kind"] = e.kind;
        out += obj.dump();
        out += "\n";
    }
    return out;
}

WorkflowTranscript WorkflowTranscript::from_jsonl(const std::string& text) {
    WorkflowTranscript transcript;
    std::istringstream in(text);
    std::string line;
    int record = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++record;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("transcript record " + std::to_string(record) +
                             ": " + e.what());
        }
        TranscriptEvent event;
        if (!obj.contains("seq") || !obj.contains("kind")) {
            throw ParseError("transcript record " + std::to_string(record) +
                             ": missing seq or kind");
        }
        event.seq = obj["seq"].get<int>();
        event.kind = obj["kind"].get<std::string>();
        obj.erase("seq");
        obj.erase("kind");
        event.payload = std::move(obj);
        transcript.events_.push_back(std::move(event));
    }
    return transcript;
}

void WorkflowTranscript::save(const std::filesystem::path& path) const {
    atomic_write_file(path, to_jsonl());
}

WorkflowTranscript WorkflowTranscript::load(
    const std::filesystem::path& path) {
    return from_jsonl(read_file(path));
}

}  // namespace scg
