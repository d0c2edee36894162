#include <doctest.h>

#include <filesystem>
#include <string>

#include <json.hpp>

#include "scg/errors.hpp"
#include "scg/persist.hpp"
#include "scg/run_config.hpp"

using namespace scg;
using nlohmann::json;
namespace fs = std::filesystem;

TEST_CASE("defaults are a valid replay setup once a cassette is named") {
    RunConfig config;
    CHECK(config.backend == BackendKind::Replay);
    CHECK(config.samples_per_task == 5);
    CHECK(config.ks == std::vector<int>{1, 5});
    CHECK(config.workflow.guidance_mode == GuidanceMode::Guidelines);

    // Replay needs a cassette and guideline guidance needs a database.
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.cassette_path = "cassettes";
    CHECK_THROWS_AS(config.validate(), ConfigError);
    config.guidelines_path = "guidelines.json";
    CHECK_NOTHROW(config.validate());
}

TEST_CASE("json overrides apply by key") {
    RunConfig config;
    apply_config_json(config, json{{"model_id", "gpt-4o"},
                                   {"backend", "record"},
                                   {"cassette_path", "c.jsonl"},
                                   {"cassette_mode", "digest_lookup"},
                                   {"samples_per_task", 9},
                                   {"ks", {1, 3, 9}},
                                   {"parallelism", 4},
                                   {"keep_workspaces", true},
                                   {"timeout_s", 30}});
    CHECK(config.model_id == "gpt-4o");
    CHECK(config.backend == BackendKind::Record);
    CHECK(config.cassette_path == fs::path("c.jsonl"));
    CHECK(config.cassette_mode == CassetteMode::DigestLookup);
    CHECK(config.samples_per_task == 9);
    CHECK(config.ks == std::vector<int>{1, 3, 9});
    CHECK(config.parallelism == 4);
    CHECK(config.keep_workspaces);
    CHECK(config.timeout_s == 30);
    // The workflow always runs the configured model.
    CHECK(config.workflow.model_id == "gpt-4o");
}

TEST_CASE("a preset expands before workflow keys from the same document") {
    RunConfig config;
    apply_config_json(config, json{{"preset", "A0"},
                                   {"workflow", {{"max_att", 5}}}});
    CHECK(config.preset == "A0");
    CHECK(config.workflow.guidance_mode == GuidanceMode::None);
    CHECK_FALSE(config.workflow.revise_code);
    CHECK(config.workflow.max_att == 5);

    SUBCASE("a later layer can re-expand and override again") {
        apply_config_json(config, json{{"preset", "A6"}});
        CHECK(config.workflow.oracle_unit_tests);
        CHECK(config.workflow.max_att == 3);  // preset resets workflow knobs
    }
    SUBCASE("the security reminder survives preset expansion") {
        apply_config_json(config,
                          json{{"workflow", {{"security_reminder", true}}}});
        apply_config_json(config, json{{"preset", "A4"}});
        CHECK(config.workflow.security_reminder);
    }
    SUBCASE("unknown presets are rejected") {
        CHECK_THROWS_WITH_AS(apply_config_json(config, json{{"preset", "A9"}}),
                             doctest::Contains("unknown preset"), ConfigError);
    }
}

TEST_CASE("unknown keys are rejected at every level") {
    RunConfig config;
    CHECK_THROWS_WITH_AS(apply_config_json(config, json{{"modle_id", "x"}}),
                         doctest::Contains("unknown config key"), ConfigError);
    CHECK_THROWS_WITH_AS(
        apply_config_json(config, json{{"workflow", {{"maxatt", 2}}}}),
        doctest::Contains("unknown workflow config key"), ConfigError);
    CHECK_THROWS_WITH_AS(
        apply_config_json(config, json{{"sandbox", {{"shell", "sh"}}}}),
        doctest::Contains("unknown sandbox config key"), ConfigError);
    CHECK_THROWS_AS(apply_config_json(config, json::array()), ConfigError);
    CHECK_THROWS_WITH_AS(
        apply_config_json(config, json{{"backend", "papertape"}}),
        doctest::Contains("backend must be"), ConfigError);
    CHECK_THROWS_WITH_AS(
        apply_config_json(config, json{{"samples_per_task", "five"}}),
        doctest::Contains("wrong type"), ConfigError);
}

TEST_CASE("sandbox overrides reach the sandbox config") {
    RunConfig config;
    apply_config_json(config,
                      json{{"sandbox",
                            {{"compile_cmd", "gcc -O1 {src} -o {out}"},
                             {"test_timeout_s", 7.5},
                             {"output_cap_bytes", 1024}}}});
    CHECK(config.sandbox.compile_cmd == "gcc -O1 {src} -o {out}");
    CHECK(config.sandbox.test_timeout_s == 7.5);
    CHECK(config.sandbox.output_cap_bytes == 1024);
    CHECK(config.sandbox.test_cmd == "python3 {test}");  // untouched
}

TEST_CASE("config files load over the defaults") {
    fs::path path = fs::temp_directory_path() / "scg-run-config.json";
    atomic_write_file(path, R"({
        "preset": "A4",
        "backend": "replay",
        "cassette_path": "tests/fixtures/cassettes/A4",
        "benchmark_path": "tests/fixtures/benchmark",
        "guidelines_path": "data/guidelines.json",
        "samples_per_task": 1,
        "ks": [1]
    })");
    RunConfig config = load_run_config(path);
    CHECK(config.preset == "A4");
    CHECK(config.backend == BackendKind::Replay);
    CHECK(config.samples_per_task == 1);
    CHECK_NOTHROW(config.validate());

    SUBCASE("malformed json is a config error naming the file") {
        atomic_write_file(path, "{not json");
        CHECK_THROWS_WITH_AS(load_run_config(path),
                             doctest::Contains("scg-run-config.json"),
                             ConfigError);
    }
}

TEST_CASE("validation catches bad numeric settings") {
    RunConfig config;
    config.cassette_path = "c";
    config.guidelines_path = "g.json";
    CHECK_NOTHROW(config.validate());

    SUBCASE("k above n") {
        config.ks = {1, 6};
        CHECK_THROWS_WITH_AS(config.validate(),
                             doctest::Contains("exceeds samples_per_task"),
                             ConfigError);
    }
    SUBCASE("non-positive values") {
        config.samples_per_task = 0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
        config.samples_per_task = 5;
        config.ks = {};
        CHECK_THROWS_AS(config.validate(), ConfigError);
        config.ks = {0};
        CHECK_THROWS_AS(config.validate(), ConfigError);
        config.ks = {1};
        config.parallelism = 0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
        config.parallelism = 1;
        config.timeout_s = 0;
        CHECK_THROWS_AS(config.validate(), ConfigError);
    }
    SUBCASE("live mode needs no cassette") {
        config.backend = BackendKind::Live;
        config.cassette_path.reset();
        CHECK_NOTHROW(config.validate());
    }
    SUBCASE("non-guideline guidance needs no database") {
        config.guidelines_path.clear();
        CHECK_THROWS_AS(config.validate(), ConfigError);
        apply_config_json(config, json{{"preset", "A1"}});
        CHECK_NOTHROW(config.validate());
    }
}

TEST_CASE("to_json echoes the effective configuration") {
    RunConfig config;
    config.cassette_path = "c.jsonl";
    apply_config_json(config, json{{"preset", "A4"}, {"model_id", "m"}});
    json j = config.to_json();
    CHECK(j["preset"] == "A4");
    CHECK(j["model_id"] == "m");
    CHECK(j["workflow"]["model_id"] == "m");
    CHECK(j["workflow"]["guidance_mode"] == "guidelines");
    CHECK(j["backend"] == "replay");
    CHECK(j["cassette_path"] == "c.jsonl");
    CHECK(j["sandbox"]["test_cmd"] == "python3 {test}");
}

TEST_CASE("backend kind names round-trip") {
    for (BackendKind kind :
         {BackendKind::Live, BackendKind::Record, BackendKind::Replay}) {
        CHECK(backend_kind_from_string(to_string(kind)) == kind);
    }
    CHECK_FALSE(backend_kind_from_string("cassette").has_value());
}
