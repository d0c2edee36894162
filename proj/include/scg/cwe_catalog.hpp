#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "scg/types.hpp"

namespace scg {

struct CweInfo {
    int number;
    std::string_view name;
    std::string_view description;
};

/// Catalog entry for a CWE, or nullopt when the number is not in the
/// built-in catalog (the catalog covers the CWEs used by the shipped
/// guideline database and the C slice of common weakness lists).
std::optional<CweInfo> find_cwe(CweId id);

/// "CWE-78 (OS Command Injection): The product constructs ..." for known
/// entries; falls back to the bare "CWE-<n>" when unknown.
std::string cwe_with_description(CweId id);

}  // namespace scg
