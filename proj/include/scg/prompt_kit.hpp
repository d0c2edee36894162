#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "scg/types.hpp"

namespace scg {

/// Placeholder name -> value. Recognized names: task_description, code,
/// guideline, unit_tests, error, task_file_name, executable_file_name,
/// test_file_name, entrypoint, cwe_with_description, signature.
using PromptBindings = std::map<std::string, std::string>;

enum class YesNo { Yes, No };

/// Substitutes every {placeholder} in the stage's template. Values are
/// inserted verbatim and never re-scanned, so code containing braces is safe.
///
/// When the bindings carry a "signature" entry, gen_code renders the
/// benchmark-direct format instead of the free-form template, and
/// `security_reminder` controls whether the reminder sentence appears.
/// All other stages ignore `security_reminder`.
///
/// Throws ConfigError naming the placeholder if a required binding is absent.
std::string render_prompt(StageTag stage, const PromptBindings& bindings,
                          bool security_reminder = false);

/// Returns the contents of the last ``` fenced block, language tag stripped
/// and surrounding blank lines trimmed. Throws ParseError when the response
/// has no complete fenced block.
std::string extract_code_block(const std::string& response_text);

/// Scans the final non-empty line, case-insensitively, for a standalone
/// "yes" or "no" token. Throws ParseError when the line holds neither or
/// both (the gateway treats that as a retryable response).
YesNo extract_yes_no(const std::string& response_text);

/// All distinct CWE-<digits> tokens in order of first appearance. Bare "78"
/// or names without numbers do not count. Never throws; an empty list is a
/// valid answer.
std::vector<CweId> extract_cwe_list(const std::string& response_text);

/// The unrendered template for a stage, exactly as packaged.
std::string_view raw_template(StageTag stage);

/// The unrendered benchmark-direct generation template.
std::string_view benchmark_template();

}  // namespace scg
