#include "scg/types.hpp"

#include <array>
#include <charconv>

namespace scg {

std::string CweId::str() const {
    return "CWE-" + std::to_string(number);
}

std::optional<CweId> CweId::parse(std::string_view text) {
    if (text.size() >= 4) {
        const auto head = text.substr(0, 4);
        if (head == "CWE-" || head == "cwe-" || head == "Cwe-") {
            text.remove_prefix(4);
        }
    }
    int value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value, 10);
    if (ec != std::errc{} || ptr != end || value <= 0) {
        return std::nullopt;
    }
    return CweId{value};
}

namespace {

struct StageName {
    StageTag tag;
    std::string_view name;
};

constexpr std::array<StageName, 9> kStageNames{{
    {StageTag::GenCode, "gen_code"},
    {StageTag::GenTests, "gen_tests"},
    {StageTag::PredictCwe, "predict_cwe"},
    {StageTag::CheckRelevance, "check_relevance"},
    {StageTag::GuidedModify, "guided_modify"},
    {StageTag::Arbitration, "arbitration"},
    {StageTag::ReviseCode, "revise_code"},
    {StageTag::CweDescCheck, "cwe_desc_check"},
    {StageTag::CweDescModify, "cwe_desc_modify"},
}};

}  // namespace

std::string_view to_string(StageTag stage) {
    for (const auto& entry : kStageNames) {
        if (entry.tag == stage) {
            return entry.name;
        }
    }
    return "unknown";
}

std::optional<StageTag> stage_from_string(std::string_view name) {
    for (const auto& entry : kStageNames) {
        if (entry.name == name) {
            return entry.tag;
        }
    }
    return std::nullopt;
}

bool is_decision_stage(StageTag stage) {
    switch (stage) {
        case StageTag::PredictCwe:
        case StageTag::CheckRelevance:
        case StageTag::Arbitration:
        case StageTag::CweDescCheck:
            return true;
        default:
            return false;
    }
}

}  // namespace scg
