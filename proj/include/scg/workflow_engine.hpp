#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "scg/guideline_store.hpp"
#include "scg/llm_gateway.hpp"
#include "scg/sandbox_runner.hpp"
#include "scg/transcript.hpp"
#include "scg/types.hpp"

namespace scg {

enum class GuidanceMode { None, CweDescription, Guidelines };

std::string_view to_string(GuidanceMode mode);
std::optional<GuidanceMode> guidance_mode_from_string(std::string_view name);

struct WorkflowConfig {
    GuidanceMode guidance_mode = GuidanceMode::Guidelines;
    bool revise_code = true;
    bool revise_tests = true;
    bool oracle_cwes = false;
    bool oracle_unit_tests = false;
    int max_att = 3;
    bool security_reminder = false;
    std::string model_id = "offline";
    double generation_temperature = 0.7;
    double decision_temperature = 0.0;
    int max_output_tokens = 4096;

    /// Throws ConfigError on inconsistent settings (revise_tests without
    /// revise_code, max_att < 1).
    void validate() const;

    nlohmann::json to_json() const;
};

/// Named ablation presets:
///   A0  guidance none,            no revision
///   A1  CWE descriptions,         no revision
///   A2  guidelines,               no revision
///   A3  guidelines, revise code only
///   A4  guidelines, revise code and tests
///   A5  A4 + ground-truth CWEs
///   A6  A5 + ground-truth unit tests
std::optional<WorkflowConfig> workflow_preset(std::string_view name);
const std::vector<std::string>& workflow_preset_names();

struct EngineOptions {
    SandboxConfig sandbox;
    std::filesystem::path workspace_parent;
    bool keep_workspaces = false;
};

struct EnforceFuncResult {
    CodeSample code;
    TestSuite tests;
    bool verified = false;  ///< final executed run passed
    int attempts = 0;       ///< sandbox test executions consumed
};

struct WorkflowResult {
    CodeSample final_code;
    std::optional<TestSuite> final_tests;
    bool verified = false;
    std::vector<CweId> predicted_cwes;
    WorkflowTranscript transcript;
};

/// Drives one task through the full workflow: draft code, draft tests,
/// enforce functionality, retrieve guidance by predicted CWE, and revise
/// per guideline while re-enforcing functionality. One engine instance
/// serves one sequential run; distinct instances may run in parallel.
class WorkflowEngine {
public:
    /// `guidelines` is required for guidance_mode == Guidelines and may be
    /// null otherwise.
    WorkflowEngine(LlmGateway& gateway, const WorkflowConfig& config,
                   const GuidelineSet* guidelines, EngineOptions options);

    WorkflowResult run(const CodingTask& task);

    // The individual stages, usable directly; each logs its transcript
    // events on the engine.
    CodeSample gen_code(const CodingTask& task);
    TestSuite gen_tests(const CodingTask& task);
    std::vector<CweId> predict_cwe(const CodingTask& task,
                                   const CodeSample& code);
    bool check_relevance(const CodingTask& task, const CodeSample& code,
                         const Guideline& guideline);
    CodeSample guided_modify(const CodingTask& task, const CodeSample& code,
                             const Guideline& guideline);
    EnforceFuncResult enforce_func(const CodingTask& task, CodeSample code,
                                   TestSuite tests, int max_att);

    const WorkflowTranscript& transcript() const { return transcript_; }

private:
    ChatResponse exchange(StageTag stage, const std::string& prompt,
                          bool thread_on_code_context,
                          const std::function<void(const ChatResponse&)>&
                              validate);
    CodeSample revise_code(const CodingTask& task, const CodeSample& code,
                           const TestSuite& tests, const std::string& error);
    bool cwe_vulnerable(const CodingTask& task, const CodeSample& code,
                        CweId cwe);
    CodeSample cwe_modify(const CodingTask& task, const CodeSample& code,
                          CweId cwe);
    TestRunOutcome run_attempt(const CodingTask& task, const CodeSample& code,
                               const TestSuite& tests, int attempt);
    std::string sanitized(std::string text,
                          const std::filesystem::path& root) const;

    LlmGateway& gateway_;
    WorkflowConfig config_;
    const GuidelineSet* guidelines_;
    EngineOptions options_;

    WorkflowTranscript transcript_;
    std::vector<ChatMessage> code_context_;
    int revision_counter_ = 0;
    int test_generation_counter_ = 0;
    int workspace_counter_ = 0;
};

/// Docstring-plus-signature block bound to {task_description} in every
/// stage except benchmark-direct generation (which binds the raw docstring
/// and the signature separately).
std::string task_context(const CodingTask& task);

}  // namespace scg
