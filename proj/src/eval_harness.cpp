#include "scg/eval_harness.hpp"

#include <algorithm>
#include <cstdint>
#include <iomanip>
#include <set>
#include <sstream>

#include "scg/errors.hpp"
#include "scg/persist.hpp"

namespace scg {

namespace fs = std::filesystem;

namespace {

// C(n, k) for n <= 62 fits in uint64 (C(62, 31) < 2^63). Intermediate
// products are widened to 128 bits.
std::uint64_t binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (int i = 1; i <= k; ++i) {
        r = r * static_cast<unsigned __int128>(n - k + i) /
            static_cast<unsigned __int128>(i);
    }
    return static_cast<std::uint64_t>(r);
}

std::string strip_one_newline(std::string s) {
    if (!s.empty() && s.back() == '\n') s.pop_back();
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

std::string format_rate(double v) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3) << v;
    return out.str();
}

nlohmann::json rate_map_to_json(const std::map<int, double>& m) {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [k, v] : m) obj[std::to_string(k)] = v;
    return obj;
}

std::map<int, double> rate_map_from_json(const nlohmann::json& obj,
                                         const char* field) {
    if (!obj.is_object()) {
        throw ParseError(std::string("report field '") + field +
                         "' must be an object");
    }
    std::map<int, double> m;
    for (const auto& [key, value] : obj.items()) {
        m[std::stoi(key)] = value.get<double>();
    }
    return m;
}

}  // namespace

double pass_at_k(int n, int c, int k) {
    if (n < 1) {
        throw ConfigError("pass_at_k: n must be at least 1");
    }
    if (c < 0 || c > n) {
        throw ConfigError("pass_at_k: c must satisfy 0 <= c <= n");
    }
    if (k < 1 || k > n) {
        throw ConfigError("pass_at_k: k must satisfy 1 <= k <= n");
    }
    if (c == 0) return 0.0;
    if (n - c < k) return 1.0;
    if (n <= 62) {
        const std::uint64_t total = binomial(n, k);
        const std::uint64_t miss = binomial(n - c, k);
        return static_cast<double>(total - miss) /
               static_cast<double>(total);
    }
    // Stable product form for large n: 1 - prod (n-c-i)/(n-i).
    double miss = 1.0;
    for (int i = 0; i < k; ++i) {
        miss *= static_cast<double>(n - c - i) / static_cast<double>(n - i);
    }
    return 1.0 - miss;
}

std::vector<CodingTask> load_benchmark(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(manifest_path.string() + ": " + err.what());
    }
    if (!manifest.is_object() || !manifest.contains("tasks") ||
        !manifest["tasks"].is_array()) {
        throw ParseError(manifest_path.string() +
                         ": expected an object with a 'tasks' array");
    }

    std::vector<CodingTask> tasks;
    std::set<std::string> seen;
    for (const auto& entry : manifest["tasks"]) {
        if (!entry.is_string()) {
            throw ParseError(manifest_path.string() +
                             ": task ids must be strings");
        }
        const std::string id = entry.get<std::string>();
        if (!seen.insert(id).second) {
            throw ParseError("benchmark has duplicate task id '" + id + "'");
        }
        const fs::path task_dir = dir / id;
        auto require = [&](const char* name) {
            const fs::path p = task_dir / name;
            if (!fs::exists(p)) {
                throw ParseError("task '" + id + "' is missing " + name);
            }
            return read_file(p);
        };
        CodingTask task;
        task.id = id;
        task.description = strip_one_newline(require("description.txt"));
        task.signature = strip_one_newline(require("signature.txt"));
        task.entrypoint = require("entrypoint.c");
        const std::string cwe_text = strip_one_newline(require("cwe.txt"));
        auto cwe = CweId::parse(cwe_text);
        if (!cwe) {
            throw ParseError("task '" + id + "' has an invalid cwe.txt: '" +
                             cwe_text + "'");
        }
        task.ground_truth_cwe = *cwe;
        task.reference_func_tests = require("func_tests.py");
        task.reference_sec_tests = require("sec_tests.py");
        if (task.description.empty() || task.signature.empty() ||
            task.entrypoint.empty()) {
            throw ParseError("task '" + id +
                             "' has an empty description, signature, or "
                             "entrypoint");
        }
        tasks.push_back(std::move(task));
    }
    return tasks;
}

namespace {

bool run_reference_suite(const CodingTask& task, const CodeSample& code,
                         const std::string& script, TestOrigin origin,
                         const SandboxConfig& sandbox,
                         const fs::path& workspace_parent,
                         bool keep_workspaces) {
    TestSuite suite;
    suite.script = script;
    suite.origin = origin;
    suite.generation_index = 0;
    Workspace ws =
        materialize_workspace(task, code, suite, workspace_parent);
    bool passed = false;
    try {
        TestRunOutcome outcome = execute_suite(ws, sandbox);
        passed = outcome.status == RunStatus::Passed;
    } catch (...) {
        if (!keep_workspaces) {
            std::error_code ec;
            fs::remove_all(ws.root, ec);
        }
        throw;
    }
    if (!keep_workspaces) {
        std::error_code ec;
        fs::remove_all(ws.root, ec);
    }
    return passed;
}

}  // namespace

SampleVerdict evaluate_sample(const CodingTask& task, const CodeSample& code,
                              int sample_idx, const SandboxConfig& sandbox,
                              const fs::path& workspace_parent,
                              bool keep_workspaces) {
    if (task.reference_func_tests.empty() ||
        task.reference_sec_tests.empty()) {
        throw ConfigError("task '" + task.id +
                          "' lacks reference suites for evaluation");
    }
    SampleVerdict verdict;
    verdict.task_id = task.id;
    verdict.sample_idx = sample_idx;
    if (code.source.empty()) {
        return verdict;
    }
    verdict.functional =
        run_reference_suite(task, code, task.reference_func_tests,
                            TestOrigin::Reference, sandbox, workspace_parent,
                            keep_workspaces);
    verdict.secure =
        run_reference_suite(task, code, task.reference_sec_tests,
                            TestOrigin::Reference, sandbox, workspace_parent,
                            keep_workspaces);
    verdict.func_sec = verdict.functional && verdict.secure;
    return verdict;
}

MetricsReport compute_report(const std::vector<SampleVerdict>& verdicts,
                             const std::vector<PredictionRecord>& predictions,
                             std::vector<int> ks) {
    if (verdicts.empty()) {
        throw ConfigError("compute_report: no verdicts given");
    }
    if (ks.empty()) {
        throw ConfigError("compute_report: no k values given");
    }
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

    struct Tally {
        int n = 0;
        int functional = 0;
        int func_sec = 0;
    };
    std::vector<std::string> order;
    std::map<std::string, Tally> tallies;
    for (const SampleVerdict& v : verdicts) {
        if (v.func_sec != (v.functional && v.secure)) {
            throw ConfigError("verdict for task '" + v.task_id +
                              "' violates func_sec = functional AND secure");
        }
        auto [it, inserted] = tallies.try_emplace(v.task_id);
        if (inserted) order.push_back(v.task_id);
        it->second.n += 1;
        it->second.functional += v.functional ? 1 : 0;
        it->second.func_sec += v.func_sec ? 1 : 0;
    }
    const int n = tallies.begin()->second.n;
    for (const auto& [id, tally] : tallies) {
        if (tally.n != n) {
            throw ConfigError("task '" + id + "' has " +
                              std::to_string(tally.n) + " samples; expected " +
                              std::to_string(n));
        }
    }
    for (int k : ks) {
        if (k < 1 || k > n) {
            throw ConfigError("compute_report: k=" + std::to_string(k) +
                              " is out of range for n=" + std::to_string(n));
        }
    }

    MetricsReport report;
    report.n = n;
    report.ks = ks;
    for (const std::string& id : order) {
        const Tally& tally = tallies.at(id);
        TaskMetrics tm;
        tm.task_id = id;
        tm.n = n;
        for (int k : ks) {
            const double func = pass_at_k(n, tally.functional, k);
            const double func_sec = pass_at_k(n, tally.func_sec, k);
            tm.func_at_k[k] = func;
            tm.func_sec_at_k[k] = func_sec;
            if (func > 0.0) {
                tm.ratio[k] = func_sec / func;
            }
        }
        report.tasks.push_back(std::move(tm));
    }
    for (int k : ks) {
        double func_sum = 0.0;
        double func_sec_sum = 0.0;
        for (const TaskMetrics& tm : report.tasks) {
            func_sum += tm.func_at_k.at(k);
            func_sec_sum += tm.func_sec_at_k.at(k);
        }
        const double func = func_sum / static_cast<double>(report.tasks.size());
        const double func_sec =
            func_sec_sum / static_cast<double>(report.tasks.size());
        report.aggregate_func_at_k[k] = func;
        report.aggregate_func_sec_at_k[k] = func_sec;
        if (func > 0.0) {
            report.aggregate_ratio[k] = func_sec / func;
        }
    }

    if (!predictions.empty()) {
        double length_sum = 0.0;
        int with_truth = 0;
        int hits = 0;
        for (const PredictionRecord& p : predictions) {
            length_sum += static_cast<double>(p.predicted.size());
            if (p.ground_truth) {
                with_truth += 1;
                if (std::find(p.predicted.begin(), p.predicted.end(),
                              *p.ground_truth) != p.predicted.end()) {
                    hits += 1;
                }
            }
        }
        report.mean_predicted_cwes =
            length_sum / static_cast<double>(predictions.size());
        if (with_truth > 0) {
            report.cwe_recall =
                static_cast<double>(hits) / static_cast<double>(with_truth);
        }
    }
    return report;
}

nlohmann::json MetricsReport::to_json() const {
    nlohmann::json tasks_json = nlohmann::json::array();
    for (const TaskMetrics& tm : tasks) {
        tasks_json.push_back({{"task_id", tm.task_id},
                              {"n", tm.n},
                              {"func_at_k", rate_map_to_json(tm.func_at_k)},
                              {"func_sec_at_k",
                               rate_map_to_json(tm.func_sec_at_k)},
                              {"ratio", rate_map_to_json(tm.ratio)}});
    }
    nlohmann::json j{
        {"n", n},
        {"ks", ks},
        {"tasks", tasks_json},
        {"aggregate",
         {{"func_at_k", rate_map_to_json(aggregate_func_at_k)},
          {"func_sec_at_k", rate_map_to_json(aggregate_func_sec_at_k)},
          {"ratio", rate_map_to_json(aggregate_ratio)}}},
    };
    if (cwe_recall) j["cwe_recall"] = *cwe_recall;
    if (mean_predicted_cwes) j["mean_predicted_cwes"] = *mean_predicted_cwes;
    return j;
}

MetricsReport MetricsReport::from_json(const nlohmann::json& j) {
    try {
        MetricsReport report;
        report.n = j.at("n").get<int>();
        report.ks = j.at("ks").get<std::vector<int>>();
        for (const auto& tj : j.at("tasks")) {
            TaskMetrics tm;
            tm.task_id = tj.at("task_id").get<std::string>();
            tm.n = tj.at("n").get<int>();
            tm.func_at_k = rate_map_from_json(tj.at("func_at_k"), "func_at_k");
            tm.func_sec_at_k =
                rate_map_from_json(tj.at("func_sec_at_k"), "func_sec_at_k");
            tm.ratio = rate_map_from_json(tj.at("ratio"), "ratio");
            report.tasks.push_back(std::move(tm));
        }
        const auto& agg = j.at("aggregate");
        report.aggregate_func_at_k =
            rate_map_from_json(agg.at("func_at_k"), "aggregate.func_at_k");
        report.aggregate_func_sec_at_k = rate_map_from_json(
            agg.at("func_sec_at_k"), "aggregate.func_sec_at_k");
        report.aggregate_ratio =
            rate_map_from_json(agg.at("ratio"), "aggregate.ratio");
        if (j.contains("cwe_recall")) {
            report.cwe_recall = j.at("cwe_recall").get<double>();
        }
        if (j.contains("mean_predicted_cwes")) {
            report.mean_predicted_cwes =
                j.at("mean_predicted_cwes").get<double>();
        }
        return report;
    } catch (const nlohmann::json::exception& err) {
        throw ParseError(std::string("invalid metrics report: ") + err.what());
    }
}

std::string MetricsReport::to_table() const {
    std::size_t name_width = std::string("aggregate").size();
    for (const TaskMetrics& tm : tasks) {
        name_width = std::max(name_width, tm.task_id.size());
    }

    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(name_width) + 2) << "task"
        << std::right << std::setw(4) << "n";
    for (int k : ks) {
        out << std::setw(12) << ("Func@" + std::to_string(k))
            << std::setw(12) << ("FuncSec@" + std::to_string(k))
            << std::setw(12) << ("FS/F@" + std::to_string(k));
    }
    out << "\n";

    auto emit_row = [&](const std::string& name, int row_n,
                        const std::map<int, double>& func,
                        const std::map<int, double>& func_sec,
                        const std::map<int, double>& ratio) {
        out << std::left << std::setw(static_cast<int>(name_width) + 2)
            << name << std::right << std::setw(4) << row_n;
        for (int k : ks) {
            out << std::setw(12) << format_rate(func.at(k)) << std::setw(12)
                << format_rate(func_sec.at(k));
            auto it = ratio.find(k);
            out << std::setw(12)
                << (it == ratio.end() ? std::string("-")
                                      : format_rate(it->second));
        }
        out << "\n";
    };

    for (const TaskMetrics& tm : tasks) {
        emit_row(tm.task_id, tm.n, tm.func_at_k, tm.func_sec_at_k, tm.ratio);
    }
    emit_row("aggregate", n, aggregate_func_at_k, aggregate_func_sec_at_k,
             aggregate_ratio);
    if (cwe_recall) {
        out << "cwe_recall " << format_rate(*cwe_recall) << "\n";
    }
    if (mean_predicted_cwes) {
        out << "mean_predicted_cwes " << format_rate(*mean_predicted_cwes)
            << "\n";
    }
    return out.str();
}

}  // namespace scg
