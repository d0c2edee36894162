#include <doctest.h>

#include <filesystem>
#include <string>

#include "scg/errors.hpp"
#include "scg/transcript.hpp"

using namespace scg;
namespace fs = std::filesystem;

TEST_CASE("events are numbered in insertion order") {
    WorkflowTranscript t;
    CHECK(t.add("run_header", {{"task_id", "demo"}}) == 1);
    CHECK(t.add("llm_exchange", {{"stage", "gen_code"}}) == 2);
    CHECK(t.add("llm_exchange", {{"stage", "gen_tests"}}) == 3);
    CHECK(t.size() == 3);

    CHECK(t.count("llm_exchange") == 2);
    CHECK(t.count("sandbox_run") == 0);

    auto exchanges = t.of_kind("llm_exchange");
    REQUIRE(exchanges.size() == 2);
    CHECK(exchanges[0].payload["stage"] == "gen_code");
    CHECK(exchanges[1].payload["stage"] == "gen_tests");

    const TranscriptEvent* last = t.last_of_kind("llm_exchange");
    REQUIRE(last != nullptr);
    CHECK(last->seq == 3);
    CHECK(t.last_of_kind("final") == nullptr);
}

TEST_CASE("jsonl serialization round-trips exactly") {
    WorkflowTranscript t;
    t.add("run_header", {{"task_id", "demo"}, {"config", {{"max_att", 3}}}});
    t.add("sandbox_run", {{"attempt", 1},
                          {"status", "failed"},
                          {"diagnostics", "FAIL: line\nwith \"quotes\""}});
    t.add("final", {{"verified", false}});

    const std::string text = t.to_jsonl();
    CHECK(text.back() == '\n');
    WorkflowTranscript back = WorkflowTranscript::from_jsonl(text);
    CHECK(back == t);
    CHECK(back.to_jsonl() == text);

    SUBCASE("an empty transcript serializes to an empty string") {
        CHECK(WorkflowTranscript{}.to_jsonl() == "");
        CHECK(WorkflowTranscript::from_jsonl("").size() == 0);
    }
    SUBCASE("save and load go through files") {
        fs::path path = fs::temp_directory_path() / "scg-transcript.jsonl";
        t.save(path);
        CHECK(WorkflowTranscript::load(path) == t);
    }
}

TEST_CASE("malformed transcript lines are rejected") {
    CHECK_THROWS_AS(WorkflowTranscript::from_jsonl("not json\n"), ParseError);
    CHECK_THROWS_AS(WorkflowTranscript::from_jsonl("{\"seq\": 1}\n"),
                    ParseError);
    CHECK_THROWS_AS(WorkflowTranscript::load("/nonexistent/t.jsonl"),
                    ParseError);
}
