#include "scg/run_config.hpp"

#include <algorithm>

#include "scg/errors.hpp"
#include "scg/persist.hpp"

namespace scg {

std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Live: return "live";
        case BackendKind::Record: return "record";
        case BackendKind::Replay: return "replay";
    }
    return "replay";
}

std::optional<BackendKind> backend_kind_from_string(std::string_view name) {
    if (name == "live") return BackendKind::Live;
    if (name == "record") return BackendKind::Record;
    if (name == "replay") return BackendKind::Replay;
    return std::nullopt;
}

namespace {

template <typename T>
T get_as(const nlohmann::json& value, const std::string& key) {
    try {
        return value.get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + key + "' has the wrong type");
    }
}

void apply_workflow_json(WorkflowConfig& wf, const nlohmann::json& obj) {
    if (!obj.is_object()) {
        throw ConfigError("config key 'workflow' must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (key == "guidance_mode") {
            auto mode = guidance_mode_from_string(
                get_as<std::string>(value, "workflow.guidance_mode"));
            if (!mode) {
                throw ConfigError(
                    "workflow.guidance_mode must be one of none, "
                    "cwe_description, guidelines");
            }
            wf.guidance_mode = *mode;
        } else if (key == "revise_code") {
            wf.revise_code = get_as<bool>(value, "workflow.revise_code");
        } else if (key == "revise_tests") {
            wf.revise_tests = get_as<bool>(value, "workflow.revise_tests");
        } else if (key == "oracle_cwes") {
            wf.oracle_cwes = get_as<bool>(value, "workflow.oracle_cwes");
        } else if (key == "oracle_unit_tests") {
            wf.oracle_unit_tests =
                get_as<bool>(value, "workflow.oracle_unit_tests");
        } else if (key == "max_att") {
            wf.max_att = get_as<int>(value, "workflow.max_att");
        } else if (key == "security_reminder") {
            wf.security_reminder =
                get_as<bool>(value, "workflow.security_reminder");
        } else if (key == "generation_temperature") {
            wf.generation_temperature =
                get_as<double>(value, "workflow.generation_temperature");
        } else if (key == "decision_temperature") {
            wf.decision_temperature =
                get_as<double>(value, "workflow.decision_temperature");
        } else if (key == "max_output_tokens") {
            wf.max_output_tokens =
                get_as<int>(value, "workflow.max_output_tokens");
        } else {
            throw ConfigError("unknown workflow config key '" + key + "'");
        }
    }
}

void apply_sandbox_json(SandboxConfig& sandbox, const nlohmann::json& obj) {
    if (!obj.is_object()) {
        throw ConfigError("config key 'sandbox' must be an object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (key == "compile_cmd") {
            sandbox.compile_cmd =
                get_as<std::string>(value, "sandbox.compile_cmd");
        } else if (key == "test_cmd") {
            sandbox.test_cmd = get_as<std::string>(value, "sandbox.test_cmd");
        } else if (key == "compile_timeout_s") {
            sandbox.compile_timeout_s =
                get_as<double>(value, "sandbox.compile_timeout_s");
        } else if (key == "test_timeout_s") {
            sandbox.test_timeout_s =
                get_as<double>(value, "sandbox.test_timeout_s");
        } else if (key == "output_cap_bytes") {
            sandbox.output_cap_bytes =
                get_as<std::size_t>(value, "sandbox.output_cap_bytes");
        } else {
            throw ConfigError("unknown sandbox config key '" + key + "'");
        }
    }
}

}  // namespace

void apply_config_json(RunConfig& config, const nlohmann::json& overrides) {
    if (!overrides.is_object()) {
        throw ConfigError("config must be a JSON object");
    }
    // Preset first, so workflow keys in the same document refine it.
    if (overrides.contains("preset")) {
        const std::string name =
            get_as<std::string>(overrides.at("preset"), "preset");
        auto preset = workflow_preset(name);
        if (!preset) {
            throw ConfigError("unknown preset '" + name +
                              "'; expected A0 through A6");
        }
        WorkflowConfig expanded = *preset;
        expanded.model_id = config.workflow.model_id;
        expanded.security_reminder = config.workflow.security_reminder;
        config.workflow = expanded;
        config.preset = name;
    }
    for (const auto& [key, value] : overrides.items()) {
        if (key == "preset") {
            continue;
        } else if (key == "model_id") {
            config.model_id = get_as<std::string>(value, key);
        } else if (key == "backend") {
            auto kind =
                backend_kind_from_string(get_as<std::string>(value, key));
            if (!kind) {
                throw ConfigError(
                    "backend must be one of live, record, replay");
            }
            config.backend = *kind;
        } else if (key == "cassette_path") {
            config.cassette_path = std::filesystem::path(
                get_as<std::string>(value, key));
        } else if (key == "cassette_mode") {
            auto mode =
                cassette_mode_from_string(get_as<std::string>(value, key));
            if (!mode) {
                throw ConfigError(
                    "cassette_mode must be strict_sequence or digest_lookup");
            }
            config.cassette_mode = *mode;
        } else if (key == "benchmark_path") {
            config.benchmark_path =
                std::filesystem::path(get_as<std::string>(value, key));
        } else if (key == "samples_per_task") {
            config.samples_per_task = get_as<int>(value, key);
        } else if (key == "ks") {
            config.ks = get_as<std::vector<int>>(value, key);
        } else if (key == "workflow") {
            apply_workflow_json(config.workflow, value);
        } else if (key == "sandbox") {
            apply_sandbox_json(config.sandbox, value);
        } else if (key == "guidelines_path") {
            config.guidelines_path =
                std::filesystem::path(get_as<std::string>(value, key));
        } else if (key == "run_dir") {
            config.run_dir =
                std::filesystem::path(get_as<std::string>(value, key));
        } else if (key == "parallelism") {
            config.parallelism = get_as<int>(value, key);
        } else if (key == "keep_workspaces") {
            config.keep_workspaces = get_as<bool>(value, key);
        } else if (key == "base_url") {
            config.base_url = get_as<std::string>(value, key);
        } else if (key == "requests_per_minute") {
            config.requests_per_minute = get_as<int>(value, key);
        } else if (key == "timeout_s") {
            config.timeout_s = get_as<int>(value, key);
        } else {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    config.workflow.model_id = config.model_id;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError(path.string() + ": " + err.what());
    }
    RunConfig config;
    apply_config_json(config, doc);
    return config;
}

void RunConfig::validate() const {
    workflow.validate();
    if (backend != BackendKind::Live && !cassette_path) {
        throw ConfigError(std::string(to_string(backend)) +
                          " backend requires cassette_path");
    }
    if (samples_per_task < 1) {
        throw ConfigError("samples_per_task must be at least 1");
    }
    if (ks.empty()) {
        throw ConfigError("at least one k value is required");
    }
    for (int k : ks) {
        if (k < 1) {
            throw ConfigError("k values must be positive");
        }
        if (k > samples_per_task) {
            throw ConfigError("k=" + std::to_string(k) +
                              " exceeds samples_per_task=" +
                              std::to_string(samples_per_task));
        }
    }
    if (workflow.guidance_mode == GuidanceMode::Guidelines &&
        guidelines_path.empty()) {
        throw ConfigError(
            "guideline guidance requires guidelines_path");
    }
    if (parallelism < 1) {
        throw ConfigError("parallelism must be at least 1");
    }
    if (requests_per_minute < 0) {
        throw ConfigError("requests_per_minute must be non-negative");
    }
    if (timeout_s < 1) {
        throw ConfigError("timeout_s must be positive");
    }
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j{
        {"model_id", model_id},
        {"backend", std::string(to_string(backend))},
        {"cassette_mode", std::string(to_string(cassette_mode))},
        {"benchmark_path", benchmark_path.string()},
        {"samples_per_task", samples_per_task},
        {"ks", ks},
        {"workflow", workflow.to_json()},
        {"sandbox",
         {{"compile_cmd", sandbox.compile_cmd},
          {"test_cmd", sandbox.test_cmd},
          {"compile_timeout_s", sandbox.compile_timeout_s},
          {"test_timeout_s", sandbox.test_timeout_s},
          {"output_cap_bytes", sandbox.output_cap_bytes}}},
        {"guidelines_path", guidelines_path.string()},
        {"run_dir", run_dir.string()},
        {"parallelism", parallelism},
        {"keep_workspaces", keep_workspaces},
        {"base_url", base_url},
        {"requests_per_minute", requests_per_minute},
        {"timeout_s", timeout_s},
    };
    if (cassette_path) j["cassette_path"] = cassette_path->string();
    if (preset) j["preset"] = *preset;
    return j;
}

}  // namespace scg
