#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "scg/cwe_catalog.hpp"
#include "scg/errors.hpp"
#include "scg/eval_harness.hpp"
#include "scg/guideline_store.hpp"
#include "scg/prompt_kit.hpp"
#include "scg/types.hpp"

namespace py = pybind11;

namespace {

scg::StageTag stage_from_name(const std::string& name) {
    auto stage = scg::stage_from_string(name);
    if (!stage) {
        throw scg::ConfigError("unknown stage '" + name + "'");
    }
    return *stage;
}

std::vector<std::string> cwe_strings(const std::vector<scg::CweId>& cwes) {
    std::vector<std::string> out;
    out.reserve(cwes.size());
    for (const scg::CweId& cwe : cwes) out.push_back(cwe.str());
    return out;
}

std::vector<scg::CweId> parse_cwes(const std::vector<std::string>& names) {
    std::vector<scg::CweId> out;
    out.reserve(names.size());
    for (const std::string& name : names) {
        auto cwe = scg::CweId::parse(name);
        if (!cwe) {
            throw scg::ParseError("invalid CWE identifier '" + name + "'");
        }
        out.push_back(*cwe);
    }
    return out;
}

py::dict guideline_to_dict(const scg::Guideline& g) {
    py::dict d;
    d["id"] = g.id;
    d["cwes"] = cwe_strings(g.cwe_ids);
    d["text"] = g.text;
    d["scope"] = g.scope;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Secure code generation workflow primitives";

    py::register_exception<scg::ConfigError>(m, "ConfigError",
                                             PyExc_ValueError);
    py::register_exception<scg::ParseError>(m, "ParseError",
                                            PyExc_ValueError);

    m.def("pass_at_k", &scg::pass_at_k, py::arg("n"), py::arg("c"),
          py::arg("k"),
          "Unbiased estimator 1 - C(n-c, k)/C(n, k) of the probability that "
          "at least one of k drawn samples passes.");

    m.def("extract_code_block", &scg::extract_code_block, py::arg("text"),
          "Last complete triple-backtick code block in the text.");

    m.def(
        "extract_yes_no",
        [](const std::string& text) {
            return scg::extract_yes_no(text) == scg::YesNo::Yes ? "yes" : "no";
        },
        py::arg("text"),
        "Firm verdict from the final line of a decision response.");

    m.def(
        "extract_cwe_list",
        [](const std::string& text) {
            return cwe_strings(scg::extract_cwe_list(text));
        },
        py::arg("text"),
        "CWE identifiers mentioned in the text, deduplicated in order of "
        "first appearance.");

    m.def(
        "render_prompt",
        [](const std::string& stage,
           const std::map<std::string, std::string>& bindings,
           bool security_reminder) {
            return scg::render_prompt(stage_from_name(stage), bindings,
                                      security_reminder);
        },
        py::arg("stage"), py::arg("bindings"),
        py::arg("security_reminder") = false,
        "Render the prompt template for a workflow stage.");

    m.def(
        "cwe_with_description",
        [](const std::string& cwe) {
            auto parsed = scg::CweId::parse(cwe);
            if (!parsed) {
                throw scg::ParseError("invalid CWE identifier '" + cwe + "'");
            }
            return scg::cwe_with_description(*parsed);
        },
        py::arg("cwe"), "Catalog name and description line for a CWE.");

    py::class_<scg::GuidelineSet>(m, "GuidelineSet")
        .def_static(
            "load",
            [](const std::string& path) { return scg::load_guidelines(path); },
            py::arg("path"))
        .def("__len__", &scg::GuidelineSet::size)
        .def("records",
             [](const scg::GuidelineSet& set) {
                 py::list out;
                 for (const scg::Guideline& g : set.guidelines()) {
                     out.append(guideline_to_dict(g));
                 }
                 return out;
             })
        .def(
            "lookup",
            [](const scg::GuidelineSet& set,
               const std::vector<std::string>& cwes) {
                py::list out;
                for (const scg::Guideline& g :
                     scg::lookup_guidelines(parse_cwes(cwes), set)) {
                    out.append(guideline_to_dict(g));
                }
                return out;
            },
            py::arg("cwes"),
            "Guidelines covering any of the given CWEs, deduplicated, in "
            "database order per queried CWE.");

#ifdef SCGAGENT_VERSION
    m.attr("__version__") = SCGAGENT_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
