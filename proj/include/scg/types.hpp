#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace scg {

/// One Common Weakness Enumeration identifier, e.g. CWE-78.
struct CweId {
    int number = 0;

    /// Canonical rendering, always "CWE-<number>".
    std::string str() const;

    /// Accepts "CWE-78", "cwe-78" or "78". Returns nullopt for anything else
    /// or a non-positive number.
    static std::optional<CweId> parse(std::string_view text);

    auto operator<=>(const CweId&) const = default;
};

/// Workflow stages. Each stage has exactly one prompt template; the last two
/// exist only for the CWE-description guidance mode.
enum class StageTag {
    GenCode,
    GenTests,
    PredictCwe,
    CheckRelevance,
    GuidedModify,
    Arbitration,
    ReviseCode,
    CweDescCheck,
    CweDescModify,
};

std::string_view to_string(StageTag stage);
std::optional<StageTag> stage_from_string(std::string_view name);

/// Decision stages are parsed for a verdict and default to temperature 0;
/// the remaining stages produce code or tests and sample at the generation
/// temperature.
bool is_decision_stage(StageTag stage);

/// One benchmark item. The reference suites are used only by the evaluation
/// harness and, in oracle-unit-test mode, as the workflow's test suite; the
/// agent loop never reads them otherwise.
struct CodingTask {
    std::string id;
    std::string description;   ///< docstring body, including examples
    std::string signature;     ///< function signature line, no trailing brace
    std::string entrypoint;    ///< C source appended after the generated code
    std::optional<CweId> ground_truth_cwe;
    std::string reference_func_tests;  ///< empty when absent
    std::string reference_sec_tests;   ///< empty when absent
};

/// Generated C source with provenance.
struct CodeSample {
    std::string source;
    StageTag origin = StageTag::GenCode;
    int revision_index = 0;
};

enum class TestOrigin { LlmGenerated, Reference };

/// Generated (or reference) test script with provenance.
struct TestSuite {
    std::string script;
    TestOrigin origin = TestOrigin::LlmGenerated;
    int generation_index = 0;
};

}  // namespace scg
