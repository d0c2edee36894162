#include "scg/guideline_store.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "scg/errors.hpp"

namespace scg {

using nlohmann::json;

bool Guideline::covers(CweId cwe) const {
    return std::find(cwe_ids.begin(), cwe_ids.end(), cwe) != cwe_ids.end();
}

GuidelineSet GuidelineSet::from_records(std::vector<Guideline> records) {
    GuidelineSet set;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const Guideline& g = records[i];
        std::string where = "guideline record " + std::to_string(i + 1);
        if (g.id.empty()) throw ParseError(where + ": empty id");
        if (!ids.insert(g.id).second) {
            throw ParseError(where + ": duplicate id \"" + g.id + "\"");
        }
        if (g.text.empty()) {
            throw ParseError(where + " (" + g.id + "): empty text");
        }
        if (g.cwe_ids.empty()) {
            throw ParseError(where + " (" + g.id + "): empty cwe list");
        }
    }
    set.guidelines_ = std::move(records);
    for (std::size_t i = 0; i < set.guidelines_.size(); ++i) {
        for (const CweId& cwe : set.guidelines_[i].cwe_ids) {
            auto& positions = set.index_[cwe.number];
            if (positions.empty() || positions.back() != i) {
                positions.push_back(i);
            }
        }
    }
    return set;
}

std::vector<std::size_t> GuidelineSet::positions_for(CweId cwe) const {
    auto it = index_.find(cwe.number);
    if (it == index_.end()) return {};
    return it->second;
}

GuidelineSet load_guidelines(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open guideline file: " + source.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    if (content.find_first_not_of(" \t\r\n") == std::string::npos) {
        return GuidelineSet();
    }

    json doc;
    try {
        doc = json::parse(content);
    } catch (const json::exception& e) {
        throw ParseError(source.string() + ": " + e.what());
    }
    if (!doc.is_array()) {
        throw ParseError(source.string() + ": expected a JSON array");
    }

    std::vector<Guideline> records;
    records.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i) {
        const json& rec = doc[i];
        std::string where =
            source.string() + ": record " + std::to_string(i + 1);
        if (!rec.is_object()) throw ParseError(where + ": not an object");
        Guideline g;
        try {
            g.id = rec.at("id").get<std::string>();
            g.text = rec.at("text").get<std::string>();
            for (const json& c : rec.at("cwes")) {
                int number = c.get<int>();
                if (number <= 0) {
                    throw ParseError(where + ": non-positive CWE number");
                }
                g.cwe_ids.push_back(CweId{number});
            }
            if (rec.contains("scope")) {
                g.scope = rec.at("scope").get<std::string>();
            }
        } catch (const ParseError&) {
            throw;
        } catch (const json::exception& e) {
            throw ParseError(where + ": " + e.what());
        }
        records.push_back(std::move(g));
    }

    try {
        return GuidelineSet::from_records(std::move(records));
    } catch (const ParseError& e) {
        throw ParseError(source.string() + ": " + e.what());
    }
}

std::vector<Guideline> lookup_guidelines(const std::vector<CweId>& cwes,
                                         const GuidelineSet& set) {
    std::vector<Guideline> result;
    std::set<std::size_t> taken;
    for (const CweId& cwe : cwes) {
        for (std::size_t pos : set.positions_for(cwe)) {
            if (taken.insert(pos).second) {
                result.push_back(set.guidelines()[pos]);
            }
        }
    }
    return result;
}

}  // namespace scg
