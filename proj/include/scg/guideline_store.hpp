#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scg/types.hpp"

namespace scg {

/// One secure coding rule, tagged with the CWE ids it mitigates.
struct Guideline {
    std::string id;
    std::vector<CweId> cwe_ids;  ///< non-empty, file order preserved
    std::string text;
    std::string scope;  ///< optional language tag, e.g. "c"; empty when absent

    bool covers(CweId cwe) const;
};

/// Immutable after construction; safe for concurrent reads.
class GuidelineSet {
public:
    GuidelineSet() = default;

    /// Validates the records and builds the CWE index.
    /// Throws ParseError on duplicate ids, empty text, or empty cwe lists.
    static GuidelineSet from_records(std::vector<Guideline> records);

    const std::vector<Guideline>& guidelines() const { return guidelines_; }
    std::size_t size() const { return guidelines_.size(); }
    bool empty() const { return guidelines_.empty(); }

    /// File-ordered positions of the guidelines tagged with `cwe`;
    /// empty for unknown CWEs.
    std::vector<std::size_t> positions_for(CweId cwe) const;

private:
    std::vector<Guideline> guidelines_;
    std::map<int, std::vector<std::size_t>> index_;
};

/// Reads a guideline database: a JSON array of
/// {"id": str, "cwes": [int...], "text": str, "scope"?: str}.
/// A file holding only whitespace loads as an empty set.
/// Throws ParseError naming the offending record on malformed input.
GuidelineSet load_guidelines(const std::filesystem::path& source);

/// Union of the set's entries for the given CWEs, deduplicated by id.
/// Order: position of the first matching CWE in `cwes`, then file order.
/// Unknown CWEs contribute nothing.
std::vector<Guideline> lookup_guidelines(const std::vector<CweId>& cwes,
                                         const GuidelineSet& set);

}  // namespace scg
