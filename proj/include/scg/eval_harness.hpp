#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scg/sandbox_runner.hpp"
#include "scg/types.hpp"

namespace scg {

/// Unbiased estimator 1 - C(n-c, k)/C(n, k): the probability that at least
/// one of k samples drawn without replacement from n generated samples
/// (of which c pass) is a passing sample. Throws ConfigError unless
/// 0 <= c <= n and 1 <= k <= n.
double pass_at_k(int n, int c, int k);

struct SampleVerdict {
    std::string task_id;
    int sample_idx = 0;
    bool functional = false;
    bool secure = false;
    bool func_sec = false;  ///< must equal functional && secure

    bool operator==(const SampleVerdict&) const = default;
};

struct PredictionRecord {
    std::string task_id;
    int sample_idx = 0;
    std::vector<CweId> predicted;
    std::optional<CweId> ground_truth;
};

struct TaskMetrics {
    std::string task_id;
    int n = 0;
    std::map<int, double> func_at_k;
    std::map<int, double> func_sec_at_k;
    std::map<int, double> ratio;  ///< key absent when func_at_k == 0

    bool operator==(const TaskMetrics&) const = default;
};

struct MetricsReport {
    int n = 0;
    std::vector<int> ks;
    std::vector<TaskMetrics> tasks;
    std::map<int, double> aggregate_func_at_k;
    std::map<int, double> aggregate_func_sec_at_k;
    std::map<int, double> aggregate_ratio;
    std::optional<double> cwe_recall;
    std::optional<double> mean_predicted_cwes;

    bool operator==(const MetricsReport&) const = default;

    nlohmann::json to_json() const;
    static MetricsReport from_json(const nlohmann::json& j);
    /// Aligned-column text table: one row per task plus an aggregate row,
    /// with Func@k / Func-Sec@k / ratio columns for each k.
    std::string to_table() const;
};

/// Loads a benchmark directory. Layout:
///   <dir>/manifest.json                  {"tasks": ["task_a", ...]}
///   <dir>/<task>/description.txt         docstring body
///   <dir>/<task>/signature.txt           C function signature
///   <dir>/<task>/entrypoint.c            main() appended to the sample
///   <dir>/<task>/cwe.txt                 ground-truth tag, e.g. CWE-78
///   <dir>/<task>/func_tests.py           reference functionality suite
///   <dir>/<task>/sec_tests.py            reference security suite
/// Throws ParseError naming the task on missing files or duplicate ids.
std::vector<CodingTask> load_benchmark(const std::filesystem::path& dir);

/// Runs the reference functionality and security suites against `code`.
/// Both booleans are recorded even when the first suite fails. Throws
/// ConfigError when the task lacks reference suites and SandboxError on
/// infrastructure failure.
SampleVerdict evaluate_sample(const CodingTask& task, const CodeSample& code,
                              int sample_idx, const SandboxConfig& sandbox,
                              const std::filesystem::path& workspace_parent,
                              bool keep_workspaces = false);

/// Computes per-task and aggregate Func@k / Func-Sec@k (unweighted means
/// over tasks), CWE-prediction recall, and mean predicted-list length.
/// Throws ConfigError on unequal per-task sample counts, empty input, or
/// k > n.
MetricsReport compute_report(const std::vector<SampleVerdict>& verdicts,
                             const std::vector<PredictionRecord>& predictions,
                             std::vector<int> ks);

}  // namespace scg
