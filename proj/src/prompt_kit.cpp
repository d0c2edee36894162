#include "scg/prompt_kit.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "scg/errors.hpp"

namespace scg {

namespace detail {
extern const std::string_view kTemplate_gen_code;
extern const std::string_view kTemplate_gen_tests;
extern const std::string_view kTemplate_predict_cwe;
extern const std::string_view kTemplate_check_relevance;
extern const std::string_view kTemplate_guided_modify;
extern const std::string_view kTemplate_arbitration;
extern const std::string_view kTemplate_revise_code;
extern const std::string_view kTemplate_cwe_desc_check;
extern const std::string_view kTemplate_cwe_desc_modify;
extern const std::string_view kTemplate_benchmark_gen;
}  // namespace detail

namespace {

constexpr std::string_view kReminderSentence =
    " Your code should be secure and should NOT contain any vulnerabilities.";

bool is_name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

std::string substitute(std::string_view tpl, const PromptBindings& bindings) {
    std::string out;
    out.reserve(tpl.size());
    size_t i = 0;
    while (i < tpl.size()) {
        char c = tpl[i];
        if (c != '{') {
            out.push_back(c);
            ++i;
            continue;
        }
        size_t j = i + 1;
        while (j < tpl.size() && is_name_char(tpl[j])) ++j;
        if (j == i + 1 || j >= tpl.size() || tpl[j] != '}') {
            // A lone brace (e.g. the open brace ending the benchmark
            // prompt) is literal text.
            out.push_back(c);
            ++i;
            continue;
        }
        std::string name(tpl.substr(i + 1, j - i - 1));
        auto it = bindings.find(name);
        if (it == bindings.end()) {
            throw ConfigError("prompt rendering: no binding for placeholder {" +
                              name + "}");
        }
        out += it->second;
        i = j + 1;
    }
    return out;
}

std::string_view rstrip(std::string_view s) {
    while (!s.empty() &&
           std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

}  // namespace

std::string_view raw_template(StageTag stage) {
    switch (stage) {
        case StageTag::GenCode: return detail::kTemplate_gen_code;
        case StageTag::GenTests: return detail::kTemplate_gen_tests;
        case StageTag::PredictCwe: return detail::kTemplate_predict_cwe;
        case StageTag::CheckRelevance: return detail::kTemplate_check_relevance;
        case StageTag::GuidedModify: return detail::kTemplate_guided_modify;
        case StageTag::Arbitration: return detail::kTemplate_arbitration;
        case StageTag::ReviseCode: return detail::kTemplate_revise_code;
        case StageTag::CweDescCheck: return detail::kTemplate_cwe_desc_check;
        case StageTag::CweDescModify: return detail::kTemplate_cwe_desc_modify;
    }
    throw ConfigError("unknown stage tag");
}

std::string_view benchmark_template() { return detail::kTemplate_benchmark_gen; }

std::string render_prompt(StageTag stage, const PromptBindings& bindings,
                          bool security_reminder) {
    if (stage == StageTag::GenCode && bindings.contains("signature")) {
        PromptBindings merged = bindings;
        merged["security_reminder"] =
            security_reminder ? std::string(kReminderSentence) : std::string();
        return substitute(detail::kTemplate_benchmark_gen, merged);
    }
    return substitute(raw_template(stage), bindings);
}

std::string extract_code_block(const std::string& response_text) {
    // Fences are recognized only at the start of a line.
    std::vector<size_t> fences;
    size_t pos = 0;
    const std::string& t = response_text;
    while ((pos = t.find("```", pos)) != std::string::npos) {
        if (pos == 0 || t[pos - 1] == '\n') fences.push_back(pos);
        pos += 3;
    }
    if (fences.size() < 2) {
        throw ParseError("response contains no fenced code block");
    }
    if (fences.size() % 2 != 0) fences.pop_back();
    size_t open = fences[fences.size() - 2];
    size_t close = fences[fences.size() - 1];

    // Skip the opening fence line (language tag included).
    size_t body_start = t.find('\n', open);
    if (body_start == std::string::npos || body_start > close) {
        throw ParseError("response contains no fenced code block");
    }
    ++body_start;
    std::string body = t.substr(body_start, close - body_start);

    // Trim leading/trailing blank lines; inner whitespace is untouched.
    size_t first = 0;
    while (true) {
        size_t eol = body.find('\n', first);
        if (eol == std::string::npos) break;
        std::string_view line(body.data() + first, eol - first);
        if (!rstrip(line).empty()) break;
        first = eol + 1;
    }
    size_t last = body.size();
    while (last > first) {
        size_t bol = body.rfind('\n', last - 1);
        size_t line_start = (bol == std::string::npos) ? 0 : bol + 1;
        std::string_view line(body.data() + line_start, last - line_start);
        if (!rstrip(line).empty()) break;
        if (bol == std::string::npos) {
            last = line_start;
            break;
        }
        last = bol;
    }
    if (last < first) last = first;
    std::string result = body.substr(first, last - first);
    while (!result.empty() && result.back() == '\n') result.pop_back();
    return result;
}

YesNo extract_yes_no(const std::string& response_text) {
    // Locate the final non-empty line.
    std::string_view text(response_text);
    while (!text.empty()) {
        size_t bol = text.rfind('\n');
        std::string_view line =
            (bol == std::string::npos) ? text : text.substr(bol + 1);
        if (!rstrip(line).empty()) {
            text = line;
            break;
        }
        text = (bol == std::string::npos) ? std::string_view()
                                          : text.substr(0, bol);
    }
    if (text.empty()) throw ParseError("empty response, expected yes or no");

    bool saw_yes = false;
    bool saw_no = false;
    size_t i = 0;
    while (i < text.size()) {
        if (!std::isalpha(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j < text.size() &&
               std::isalpha(static_cast<unsigned char>(text[j]))) {
            ++j;
        }
        std::string word(text.substr(i, j - i));
        std::transform(word.begin(), word.end(), word.begin(), [](char c) {
            return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        });
        if (word == "yes") saw_yes = true;
        if (word == "no") saw_no = true;
        i = j;
    }
    if (saw_yes == saw_no) {
        throw ParseError("undecidable verdict on final line: \"" +
                         std::string(text) + "\"");
    }
    return saw_yes ? YesNo::Yes : YesNo::No;
}

std::vector<CweId> extract_cwe_list(const std::string& response_text) {
    std::vector<CweId> found;
    std::set<int> seen;
    const std::string& t = response_text;
    auto lc = [](char c) {
        return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    };
    for (size_t i = 0; i + 4 < t.size(); ++i) {
        if (lc(t[i]) != 'c' || lc(t[i + 1]) != 'w' || lc(t[i + 2]) != 'e' ||
            t[i + 3] != '-') {
            continue;
        }
        // Reject matches embedded in a longer identifier, e.g. "XCWE-1".
        if (i > 0 && is_name_char(t[i - 1])) continue;
        size_t end = i + 4;
        while (end < t.size() &&
               std::isdigit(static_cast<unsigned char>(t[end]))) {
            ++end;
        }
        if (end == i + 4) continue;
        auto id = CweId::parse(t.substr(i, end - i));
        if (id && seen.insert(id->number).second) found.push_back(*id);
    }
    return found;
}

}  // namespace scg
