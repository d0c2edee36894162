#include "scg/workflow_engine.hpp"

#include <algorithm>
#include <utility>

#include "scg/cwe_catalog.hpp"
#include "scg/errors.hpp"
#include "scg/prompt_kit.hpp"

namespace scg {

namespace fs = std::filesystem;

std::string_view to_string(GuidanceMode mode) {
    switch (mode) {
        case GuidanceMode::None: return "none";
        case GuidanceMode::CweDescription: return "cwe_description";
        case GuidanceMode::Guidelines: return "guidelines";
    }
    return "none";
}

std::optional<GuidanceMode> guidance_mode_from_string(std::string_view name) {
    if (name == "none") return GuidanceMode::None;
    if (name == "cwe_description") return GuidanceMode::CweDescription;
    if (name == "guidelines") return GuidanceMode::Guidelines;
    return std::nullopt;
}

void WorkflowConfig::validate() const {
    if (max_att < 1) {
        throw ConfigError("max_att must be at least 1");
    }
    if (revise_tests && !revise_code) {
        throw ConfigError("revise_tests requires revise_code");
    }
    if (oracle_unit_tests && !revise_code) {
        throw ConfigError("oracle_unit_tests requires revise_code");
    }
    if (generation_temperature < 0.0 || decision_temperature < 0.0) {
        throw ConfigError("temperatures must be non-negative");
    }
    if (max_output_tokens < 1) {
        throw ConfigError("max_output_tokens must be positive");
    }
}

nlohmann::json WorkflowConfig::to_json() const {
    return nlohmann::json{
        {"guidance_mode", std::string(to_string(guidance_mode))},
        {"revise_code", revise_code},
        {"revise_tests", revise_tests},
        {"oracle_cwes", oracle_cwes},
        {"oracle_unit_tests", oracle_unit_tests},
        {"max_att", max_att},
        {"security_reminder", security_reminder},
        {"model_id", model_id},
        {"generation_temperature", generation_temperature},
        {"decision_temperature", decision_temperature},
        {"max_output_tokens", max_output_tokens},
    };
}

std::optional<WorkflowConfig> workflow_preset(std::string_view name) {
    WorkflowConfig cfg;
    if (name == "A0") {
        cfg.guidance_mode = GuidanceMode::None;
        cfg.revise_code = false;
        cfg.revise_tests = false;
    } else if (name == "A1") {
        cfg.guidance_mode = GuidanceMode::CweDescription;
        cfg.revise_code = false;
        cfg.revise_tests = false;
    } else if (name == "A2") {
        cfg.guidance_mode = GuidanceMode::Guidelines;
        cfg.revise_code = false;
        cfg.revise_tests = false;
    } else if (name == "A3") {
        cfg.guidance_mode = GuidanceMode::Guidelines;
        cfg.revise_code = true;
        cfg.revise_tests = false;
    } else if (name == "A4") {
        cfg.guidance_mode = GuidanceMode::Guidelines;
        cfg.revise_code = true;
        cfg.revise_tests = true;
    } else if (name == "A5") {
        cfg.guidance_mode = GuidanceMode::Guidelines;
        cfg.revise_code = true;
        cfg.revise_tests = true;
        cfg.oracle_cwes = true;
    } else if (name == "A6") {
        cfg.guidance_mode = GuidanceMode::Guidelines;
        cfg.revise_code = true;
        cfg.revise_tests = true;
        cfg.oracle_cwes = true;
        cfg.oracle_unit_tests = true;
    } else {
        return std::nullopt;
    }
    return cfg;
}

const std::vector<std::string>& workflow_preset_names() {
    static const std::vector<std::string> names = {"A0", "A1", "A2", "A3",
                                                   "A4", "A5", "A6"};
    return names;
}

std::string task_context(const CodingTask& task) {
    if (task.signature.empty()) {
        return task.description;
    }
    return "/**\n" + task.description + "\n*/\n\n" + task.signature;
}

WorkflowEngine::WorkflowEngine(LlmGateway& gateway,
                               const WorkflowConfig& config,
                               const GuidelineSet* guidelines,
                               EngineOptions options)
    : gateway_(gateway),
      config_(config),
      guidelines_(guidelines),
      options_(std::move(options)) {
    config_.validate();
    if (config_.guidance_mode == GuidanceMode::Guidelines &&
        guidelines_ == nullptr) {
        throw ConfigError("guideline guidance requires a guideline set");
    }
    if (options_.workspace_parent.empty()) {
        throw ConfigError("workspace parent directory is required");
    }
}

ChatResponse WorkflowEngine::exchange(
    StageTag stage, const std::string& prompt, bool thread_on_code_context,
    const std::function<void(const ChatResponse&)>& validate) {
    ChatRequest request;
    request.stage = stage;
    if (thread_on_code_context) {
        request.messages = code_context_;
    }
    request.messages.push_back({"user", prompt});
    request.sampling.temperature = is_decision_stage(stage)
                                       ? config_.decision_temperature
                                       : config_.generation_temperature;
    request.sampling.max_output_tokens = config_.max_output_tokens;
    request.model_id = config_.model_id;

    static const std::function<void(const ChatResponse&)> kNoValidation =
        [](const ChatResponse&) {};
    ChatResponse response =
        gateway_.complete_validated(request, validate ? validate
                                                      : kNoValidation);
    transcript_.add("llm_exchange",
                    {{"stage", std::string(to_string(stage))},
                     {"prompt_digest",
                      request_digest(stage, request.prompt_text())},
                     {"finish_state",
                      std::string(to_string(response.finish_state))},
                     {"response", response.text}});
    return response;
}

CodeSample WorkflowEngine::gen_code(const CodingTask& task) {
    PromptBindings bindings;
    bindings["task_description"] = task.description;
    if (!task.signature.empty()) {
        bindings["signature"] = task.signature;
    }
    std::string prompt = render_prompt(StageTag::GenCode, bindings,
                                       config_.security_reminder);
    ChatResponse response =
        exchange(StageTag::GenCode, prompt, false, [](const ChatResponse& r) {
            extract_code_block(r.text);
        });
    CodeSample code;
    code.source = extract_code_block(response.text);
    code.origin = StageTag::GenCode;
    code.revision_index = 0;
    code_context_ = {{"user", prompt}, {"assistant", response.text}};
    transcript_.add("code_updated",
                    {{"origin", std::string(to_string(code.origin))},
                     {"revision_index", code.revision_index},
                     {"code", code.source}});
    return code;
}

TestSuite WorkflowEngine::gen_tests(const CodingTask& task) {
    PromptBindings bindings;
    bindings["task_description"] = task_context(task);
    bindings["task_file_name"] = std::string(Workspace{}.task_file_name);
    bindings["executable_file_name"] =
        std::string(Workspace{}.executable_file_name);
    bindings["test_file_name"] = std::string(Workspace{}.test_file_name);
    bindings["entrypoint"] = task.entrypoint;
    std::string prompt = render_prompt(StageTag::GenTests, bindings);
    ChatResponse response =
        exchange(StageTag::GenTests, prompt, false, [](const ChatResponse& r) {
            extract_code_block(r.text);
        });
    TestSuite tests;
    tests.script = extract_code_block(response.text);
    tests.origin = TestOrigin::LlmGenerated;
    tests.generation_index = ++test_generation_counter_;
    transcript_.add("tests_updated",
                    {{"origin", "llm_generated"},
                     {"generation_index", tests.generation_index},
                     {"script", tests.script}});
    return tests;
}

std::vector<CweId> WorkflowEngine::predict_cwe(const CodingTask& task,
                                               const CodeSample& code) {
    std::vector<CweId> cwes;
    if (config_.oracle_cwes) {
        if (task.ground_truth_cwe) {
            cwes.push_back(*task.ground_truth_cwe);
        } else {
            transcript_.add("warning",
                            {{"message", "oracle CWE requested but task '" +
                                             task.id +
                                             "' has no ground-truth CWE"}});
        }
        nlohmann::json listed = nlohmann::json::array();
        for (const CweId& c : cwes) listed.push_back(c.str());
        transcript_.add("predicted_cwes",
                        {{"oracle", true}, {"cwes", listed}});
        return cwes;
    }

    PromptBindings bindings;
    bindings["task_description"] = task_context(task);
    bindings["code"] = code.source;
    std::string prompt = render_prompt(StageTag::PredictCwe, bindings);
    ChatResponse response =
        exchange(StageTag::PredictCwe, prompt, false, nullptr);
    cwes = extract_cwe_list(response.text);
    nlohmann::json listed = nlohmann::json::array();
    for (const CweId& c : cwes) listed.push_back(c.str());
    transcript_.add("predicted_cwes", {{"oracle", false}, {"cwes", listed}});
    return cwes;
}

bool WorkflowEngine::check_relevance(const CodingTask& task,
                                     const CodeSample& code,
                                     const Guideline& guideline) {
    PromptBindings bindings;
    bindings["task_description"] = task_context(task);
    bindings["code"] = code.source;
    bindings["guideline"] = guideline.text;
    std::string prompt = render_prompt(StageTag::CheckRelevance, bindings);
    bool relevant = false;
    try {
        ChatResponse response = exchange(
            StageTag::CheckRelevance, prompt, false,
            [](const ChatResponse& r) { extract_yes_no(r.text); });
        relevant = extract_yes_no(response.text) == YesNo::Yes;
    } catch (const ResponseFormatError& err) {
        transcript_.add("warning",
                        {{"message",
                          "relevance check for guideline '" + guideline.id +
                              "' was undecidable; treating as not relevant"},
                         {"detail", err.what()}});
        relevant = false;
    }
    transcript_.add("decision", {{"decision", "relevance"},
                                 {"subject", guideline.id},
                                 {"verdict", relevant ? "yes" : "no"}});
    return relevant;
}

CodeSample WorkflowEngine::guided_modify(const CodingTask& task,
                                         const CodeSample& code,
                                         const Guideline& guideline) {
    PromptBindings bindings;
    bindings["task_description"] = task_context(task);
    bindings["code"] = code.source;
    bindings["guideline"] = guideline.text;
    std::string prompt = render_prompt(StageTag::GuidedModify, bindings);
    try {
        ChatResponse response = exchange(
            StageTag::GuidedModify, prompt, false,
            [](const ChatResponse& r) { extract_code_block(r.text); });
        CodeSample revised;
        revised.source = extract_code_block(response.text);
        revised.origin = StageTag::GuidedModify;
        revised.revision_index = ++revision_counter_;
        code_context_ = {{"user", prompt}, {"assistant", response.text}};
        transcript_.add("code_updated",
                        {{"origin", std::string(to_string(revised.origin))},
                         {"revision_index", revised.revision_index},
                         {"subject", guideline.id},
                         {"code", revised.source}});
        return revised;
    } catch (const ResponseFormatError& err) {
        transcript_.add("warning",
                        {{"message", "guided modification for guideline '" +
                                         guideline.id +
                                         "' returned no code block; keeping "
                                         "previous code"},
                         {"detail", err.what()}});
        return code;
    }
}

bool WorkflowEngine::cwe_vulnerable(const CodingTask& task,
                                    const CodeSample& code, CweId cwe) {
    PromptBindings bindings;
    bindings["task_description"] = task_context(task);
    bindings["code"] = code.source;
    bindings["cwe_with_description"] = cwe_with_description(cwe);
    std::string prompt = render_prompt(StageTag::CweDescCheck, bindings);
    bool vulnerable = false;
    try {
        ChatResponse response = exchange(
            StageTag::CweDescCheck, prompt, false,
            [](const ChatResponse& r) { extract_yes_no(r.text); });
        vulnerable = extract_yes_no(response.text) == YesNo::Yes;
    } catch (const ResponseFormatError& err) {
        transcript_.add("warning",
                        {{"message", "vulnerability check for " + cwe.str() +
                                         " was undecidable; treating as not "
                                         "vulnerable"},
                         {"detail", err.what()}});
        vulnerable = false;
    }
    transcript_.add("decision", {{"decision", "cwe_vulnerable"},
                                 {"subject", cwe.str()},
                                 {"verdict", vulnerable ? "yes" : "no"}});
    return vulnerable;
}

CodeSample WorkflowEngine::cwe_modify(const CodingTask& task,
                                      const CodeSample& code, CweId cwe) {
    PromptBindings bindings;
    bindings["task_description"] = task_context(task);
    bindings["code"] = code.source;
    bindings["cwe_with_description"] = cwe_with_description(cwe);
    std::string prompt = render_prompt(StageTag::CweDescModify, bindings);
    try {
        ChatResponse response = exchange(
            StageTag::CweDescModify, prompt, false,
            [](const ChatResponse& r) { extract_code_block(r.text); });
        CodeSample revised;
        revised.source = extract_code_block(response.text);
        revised.origin = StageTag::CweDescModify;
        revised.revision_index = ++revision_counter_;
        code_context_ = {{"user", prompt}, {"assistant", response.text}};
        transcript_.add("code_updated",
                        {{"origin", std::string(to_string(revised.origin))},
                         {"revision_index", revised.revision_index},
                         {"subject", cwe.str()},
                         {"code", revised.source}});
        return revised;
    } catch (const ResponseFormatError& err) {
        transcript_.add("warning",
                        {{"message", "modification for " + cwe.str() +
                                         " returned no code block; keeping "
                                         "previous code"},
                         {"detail", err.what()}});
        return code;
    }
}

CodeSample WorkflowEngine::revise_code(const CodingTask& task,
                                       const CodeSample& code,
                                       const TestSuite& tests,
                                       const std::string& error) {
    (void)task;
    PromptBindings bindings;
    bindings["unit_tests"] = tests.script;
    bindings["error"] = error;
    std::string prompt = render_prompt(StageTag::ReviseCode, bindings);
    try {
        ChatResponse response = exchange(
            StageTag::ReviseCode, prompt, true,
            [](const ChatResponse& r) { extract_code_block(r.text); });
        CodeSample revised;
        revised.source = extract_code_block(response.text);
        revised.origin = StageTag::ReviseCode;
        revised.revision_index = ++revision_counter_;
        code_context_.push_back({"user", prompt});
        code_context_.push_back({"assistant", response.text});
        transcript_.add("code_updated",
                        {{"origin", std::string(to_string(revised.origin))},
                         {"revision_index", revised.revision_index},
                         {"code", revised.source}});
        return revised;
    } catch (const ResponseFormatError& err) {
        transcript_.add("warning",
                        {{"message", "code revision returned no code block; "
                                     "keeping previous code"},
                         {"detail", err.what()}});
        return code;
    }
}

std::string WorkflowEngine::sanitized(std::string text,
                                      const fs::path& root) const {
    const std::string needle = root.string();
    if (needle.empty()) return text;
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), "<workspace>");
        pos += std::string("<workspace>").size();
    }
    return text;
}

TestRunOutcome WorkflowEngine::run_attempt(const CodingTask& task,
                                           const CodeSample& code,
                                           const TestSuite& tests,
                                           int attempt) {
    Workspace ws = materialize_workspace(task, code, tests,
                                         options_.workspace_parent);
    TestRunOutcome outcome;
    try {
        outcome = execute_suite(ws, options_.sandbox);
    } catch (...) {
        if (!options_.keep_workspaces) {
            std::error_code ec;
            fs::remove_all(ws.root, ec);
        }
        throw;
    }
    outcome.diagnostics = sanitized(std::move(outcome.diagnostics), ws.root);
    transcript_.add("sandbox_run",
                    {{"attempt", attempt},
                     {"status", std::string(to_string(outcome.status))},
                     {"diagnostics", outcome.diagnostics}});
    if (!options_.keep_workspaces) {
        std::error_code ec;
        fs::remove_all(ws.root, ec);
    }
    return outcome;
}

EnforceFuncResult WorkflowEngine::enforce_func(const CodingTask& task,
                                               CodeSample code,
                                               TestSuite tests, int max_att) {
    if (max_att < 1) {
        throw ConfigError("max_att must be at least 1");
    }
    EnforceFuncResult result;
    int att = 0;
    while (att < max_att) {
        ++att;
        TestRunOutcome outcome = run_attempt(task, code, tests, att);
        if (outcome.status == RunStatus::Passed) {
            result.verified = true;
            break;
        }
        if (att == max_att) {
            break;
        }
        const std::string error = outcome.diagnostics;
        PromptBindings bindings;
        bindings["task_description"] = task_context(task);
        bindings["unit_tests"] = tests.script;
        bindings["error"] = error;
        std::string prompt = render_prompt(StageTag::Arbitration, bindings);
        bool tests_necessary = true;
        try {
            ChatResponse response = exchange(
                StageTag::Arbitration, prompt, false,
                [](const ChatResponse& r) { extract_yes_no(r.text); });
            tests_necessary = extract_yes_no(response.text) == YesNo::Yes;
        } catch (const ResponseFormatError& err) {
            transcript_.add("warning",
                            {{"message",
                              "arbitration was undecidable; revising the code"},
                             {"detail", err.what()}});
            tests_necessary = true;
        }
        const bool blame_code = tests_necessary || !config_.revise_tests;
        transcript_.add("decision",
                        {{"decision", "arbitration"},
                         {"attempt", att},
                         {"verdict", tests_necessary ? "code" : "unit test"},
                         {"action", blame_code ? "revise_code" : "gen_tests"}});
        if (blame_code) {
            code = revise_code(task, code, tests, error);
        } else {
            tests = gen_tests(task);
        }
    }
    result.code = std::move(code);
    result.tests = std::move(tests);
    result.attempts = att;
    transcript_.add("enforce_func_end", {{"verified", result.verified},
                                         {"attempts", att}});
    return result;
}

WorkflowResult WorkflowEngine::run(const CodingTask& task) {
    transcript_ = WorkflowTranscript{};
    code_context_.clear();
    revision_counter_ = 0;
    test_generation_counter_ = 0;

    transcript_.add("run_header",
                    {{"task_id", task.id}, {"config", config_.to_json()}});

    WorkflowResult result;
    result.final_code = gen_code(task);

    std::optional<TestSuite> tests;
    bool verified = false;
    if (config_.revise_code) {
        if (config_.oracle_unit_tests) {
            if (task.reference_func_tests.empty()) {
                throw ConfigError("task '" + task.id +
                                  "' has no reference functional tests for "
                                  "oracle_unit_tests");
            }
            TestSuite oracle;
            oracle.script = task.reference_func_tests;
            oracle.origin = TestOrigin::Reference;
            oracle.generation_index = 0;
            tests = oracle;
            transcript_.add("tests_updated",
                            {{"origin", "reference"},
                             {"generation_index", 0},
                             {"script", oracle.script}});
        } else {
            tests = gen_tests(task);
        }
        EnforceFuncResult enforced = enforce_func(task, result.final_code,
                                                  *tests, config_.max_att);
        result.final_code = std::move(enforced.code);
        tests = std::move(enforced.tests);
        verified = enforced.verified;
    }

    if (config_.guidance_mode == GuidanceMode::Guidelines) {
        result.predicted_cwes = predict_cwe(task, result.final_code);
        std::vector<Guideline> retrieved =
            lookup_guidelines(result.predicted_cwes, *guidelines_);
        nlohmann::json ids = nlohmann::json::array();
        for (const Guideline& g : retrieved) ids.push_back(g.id);
        transcript_.add("guidelines_retrieved",
                        {{"count", retrieved.size()}, {"ids", ids}});
        for (const Guideline& g : retrieved) {
            if (check_relevance(task, result.final_code, g)) {
                result.final_code =
                    guided_modify(task, result.final_code, g);
                if (config_.revise_code) {
                    EnforceFuncResult enforced = enforce_func(
                        task, result.final_code, *tests, config_.max_att);
                    result.final_code = std::move(enforced.code);
                    tests = std::move(enforced.tests);
                    verified = enforced.verified;
                }
            }
        }
    } else if (config_.guidance_mode == GuidanceMode::CweDescription) {
        result.predicted_cwes = predict_cwe(task, result.final_code);
        for (const CweId& cwe : result.predicted_cwes) {
            if (cwe_vulnerable(task, result.final_code, cwe)) {
                result.final_code = cwe_modify(task, result.final_code, cwe);
                if (config_.revise_code) {
                    EnforceFuncResult enforced = enforce_func(
                        task, result.final_code, *tests, config_.max_att);
                    result.final_code = std::move(enforced.code);
                    tests = std::move(enforced.tests);
                    verified = enforced.verified;
                }
            }
        }
    }

    result.final_tests = tests;
    result.verified = verified;
    transcript_.add("final",
                    {{"code", result.final_code.source},
                     {"revision_index", result.final_code.revision_index},
                     {"verified", verified},
                     {"enforcement", config_.revise_code}});
    result.transcript = transcript_;
    return result;
}

}  // namespace scg
