#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scg/llm_gateway.hpp"
#include "scg/sandbox_runner.hpp"
#include "scg/workflow_engine.hpp"

namespace scg {

enum class BackendKind { Live, Record, Replay };

std::string_view to_string(BackendKind kind);
std::optional<BackendKind> backend_kind_from_string(std::string_view name);

/// Run settings assembled as defaults < config file < command-line flags.
/// The "preset" key expands into the workflow block before explicit
/// workflow keys from the same layer are applied, so a file (or the CLI)
/// can start from a preset and override individual fields.
struct RunConfig {
    std::string model_id = "offline";
    BackendKind backend = BackendKind::Replay;
    std::optional<std::filesystem::path> cassette_path;
    CassetteMode cassette_mode = CassetteMode::StrictSequence;
    std::filesystem::path benchmark_path;
    int samples_per_task = 5;
    std::vector<int> ks = {1, 5};
    std::optional<std::string> preset;
    WorkflowConfig workflow;
    SandboxConfig sandbox;
    std::filesystem::path guidelines_path;
    std::filesystem::path run_dir = "runs";
    int parallelism = 1;
    bool keep_workspaces = false;
    std::string base_url = "https://api.openai.com/v1";
    int requests_per_minute = 0;
    int timeout_s = 120;

    /// Throws ConfigError on violations: record/replay without a cassette
    /// path, n < max(ks), missing guideline file for guideline guidance,
    /// and inconsistent workflow settings.
    void validate() const;

    nlohmann::json to_json() const;
};

/// Applies the keys present in `overrides` on top of `config`. Unknown
/// keys raise ConfigError. "preset" is expanded before "workflow".
void apply_config_json(RunConfig& config, const nlohmann::json& overrides);

/// Reads a JSON config file and applies it over built-in defaults.
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace scg
