#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scg/errors.hpp"
#include "scg/eval_harness.hpp"
#include "scg/guideline_store.hpp"
#include "scg/llm_gateway.hpp"
#include "scg/persist.hpp"
#include "scg/run_config.hpp"
#include "scg/sandbox_runner.hpp"
#include "scg/subprocess.hpp"
#include "scg/transcript.hpp"
#include "scg/types.hpp"
#include "scg/workflow_engine.hpp"

namespace fs = std::filesystem;

namespace {

using namespace scg;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfrastructure = 2;

struct CommonFlags {
    std::string config_path;
    std::string preset;
    std::string backend;
    std::string cassette;
    std::string cassette_mode;
    std::string model;
    std::string run_dir;
    std::string base_url;
    std::string benchmark;
    std::string guidelines;
    int n = 0;
    int max_att = 0;
    int parallel = 0;
    int rpm = 0;
    int timeout = 0;
    std::vector<int> ks;

    CLI::Option* config_o = nullptr;
    CLI::Option* preset_o = nullptr;
    CLI::Option* backend_o = nullptr;
    CLI::Option* cassette_o = nullptr;
    CLI::Option* cassette_mode_o = nullptr;
    CLI::Option* model_o = nullptr;
    CLI::Option* run_dir_o = nullptr;
    CLI::Option* base_url_o = nullptr;
    CLI::Option* benchmark_o = nullptr;
    CLI::Option* guidelines_o = nullptr;
    CLI::Option* n_o = nullptr;
    CLI::Option* k_o = nullptr;
    CLI::Option* max_att_o = nullptr;
    CLI::Option* parallel_o = nullptr;
    CLI::Option* rpm_o = nullptr;
    CLI::Option* timeout_o = nullptr;
    CLI::Option* reminder_o = nullptr;
    CLI::Option* keep_ws_o = nullptr;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    f.config_o = cmd->add_option("--config", f.config_path,
                                 "JSON config file; flags override it");
    f.preset_o =
        cmd->add_option("--preset", f.preset, "Workflow preset A0..A6");
    f.backend_o =
        cmd->add_option("--backend", f.backend, "live, record, or replay");
    f.cassette_o = cmd->add_option(
        "--cassette", f.cassette,
        "Cassette directory (one <task>/<sample>.jsonl per sample)");
    f.cassette_mode_o = cmd->add_option("--cassette-mode", f.cassette_mode,
                                        "strict_sequence or digest_lookup");
    f.model_o = cmd->add_option("--model", f.model, "Model identifier");
    f.n_o = cmd->add_option("--n", f.n, "Samples per task");
    f.k_o = cmd->add_option("--k", f.ks, "k values for pass@k (repeatable)");
    f.run_dir_o = cmd->add_option("--run-dir", f.run_dir,
                                  "Directory for transcripts and reports");
    f.base_url_o = cmd->add_option("--base-url", f.base_url,
                                   "Chat-completions endpoint base URL");
    f.benchmark_o =
        cmd->add_option("--benchmark", f.benchmark, "Benchmark directory");
    f.guidelines_o = cmd->add_option("--guidelines", f.guidelines,
                                     "Guideline database file");
    f.max_att_o =
        cmd->add_option("--max-att", f.max_att,
                        "Attempt budget per enforce-functionality loop");
    f.parallel_o =
        cmd->add_option("--parallel", f.parallel, "Concurrent samples");
    f.rpm_o = cmd->add_option("--rpm", f.rpm,
                              "Requests-per-minute cap for the live backend");
    f.timeout_o =
        cmd->add_option("--timeout", f.timeout, "HTTP timeout in seconds");
    f.reminder_o = cmd->add_flag(
        "--security-reminder",
        "Append the security reminder sentence to the generation prompt");
    f.keep_ws_o = cmd->add_flag("--keep-workspaces",
                                "Retain sandbox workspaces for inspection");
}

RunConfig build_config(const CommonFlags& f) {
    RunConfig cfg;
    if (f.config_o->count() > 0) {
        cfg = load_run_config(f.config_path);
    }
    nlohmann::json overrides = nlohmann::json::object();
    if (f.preset_o->count() > 0) overrides["preset"] = f.preset;
    if (f.backend_o->count() > 0) overrides["backend"] = f.backend;
    if (f.cassette_o->count() > 0) overrides["cassette_path"] = f.cassette;
    if (f.cassette_mode_o->count() > 0)
        overrides["cassette_mode"] = f.cassette_mode;
    if (f.model_o->count() > 0) overrides["model_id"] = f.model;
    if (f.n_o->count() > 0) overrides["samples_per_task"] = f.n;
    if (f.k_o->count() > 0) overrides["ks"] = f.ks;
    if (f.run_dir_o->count() > 0) overrides["run_dir"] = f.run_dir;
    if (f.base_url_o->count() > 0) overrides["base_url"] = f.base_url;
    if (f.benchmark_o->count() > 0) overrides["benchmark_path"] = f.benchmark;
    if (f.guidelines_o->count() > 0)
        overrides["guidelines_path"] = f.guidelines;
    if (f.parallel_o->count() > 0) overrides["parallelism"] = f.parallel;
    if (f.rpm_o->count() > 0) overrides["requests_per_minute"] = f.rpm;
    if (f.timeout_o->count() > 0) overrides["timeout_s"] = f.timeout;
    if (f.keep_ws_o->count() > 0) overrides["keep_workspaces"] = true;
    nlohmann::json workflow = nlohmann::json::object();
    if (f.max_att_o->count() > 0) workflow["max_att"] = f.max_att;
    if (f.reminder_o->count() > 0) workflow["security_reminder"] = true;
    if (!workflow.empty()) overrides["workflow"] = workflow;
    if (!overrides.empty()) {
        apply_config_json(cfg, overrides);
    }
    return cfg;
}

fs::path sample_dir(const RunConfig& cfg, const std::string& task_id,
                    int sample_idx) {
    return cfg.run_dir / task_id / std::to_string(sample_idx);
}

fs::path cassette_file(const RunConfig& cfg, const std::string& task_id,
                       int sample_idx) {
    return *cfg.cassette_path / task_id /
           (std::to_string(sample_idx) + ".jsonl");
}

std::optional<PredictionRecord> prediction_from_transcript(
    const WorkflowTranscript& transcript, const CodingTask& task,
    int sample_idx) {
    const TranscriptEvent* event = transcript.last_of_kind("predicted_cwes");
    if (event == nullptr) return std::nullopt;
    PredictionRecord record;
    record.task_id = task.id;
    record.sample_idx = sample_idx;
    record.ground_truth = task.ground_truth_cwe;
    for (const auto& item : event->payload.value("cwes",
                                                 nlohmann::json::array())) {
        auto cwe = CweId::parse(item.get<std::string>());
        if (cwe) record.predicted.push_back(*cwe);
    }
    return record;
}

struct SampleRecord {
    SampleVerdict verdict;
    std::optional<PredictionRecord> prediction;
    bool workflow_ok = true;
    std::string error;
};

/// Runs one workflow sample end to end: backend setup, workflow run,
/// artifact persistence, and reference-suite evaluation. Workflow-level
/// failures (bad cassette, refused responses) are recorded as
/// non-functional samples; sandbox infrastructure failures propagate.
SampleRecord run_one_sample(const RunConfig& cfg,
                            const GuidelineSet* guidelines,
                            const CodingTask& task, int sample_idx,
                            const std::shared_ptr<Backend>& live_backend) {
    const fs::path out_dir = sample_dir(cfg, task.id, sample_idx);
    fs::create_directories(out_dir);
    const fs::path workspace_parent = out_dir / "ws";

    SampleRecord record;
    record.verdict.task_id = task.id;
    record.verdict.sample_idx = sample_idx;

    std::shared_ptr<Backend> backend;
    std::shared_ptr<RecordBackend> recorder;
    try {
        switch (cfg.backend) {
            case BackendKind::Replay:
                backend = std::make_shared<ReplayBackend>(Cassette::load(
                    cassette_file(cfg, task.id, sample_idx),
                    cfg.cassette_mode));
                break;
            case BackendKind::Record:
                recorder = std::make_shared<RecordBackend>(live_backend);
                backend = recorder;
                break;
            case BackendKind::Live:
                backend = live_backend;
                break;
        }
    } catch (const Error& err) {
        record.workflow_ok = false;
        record.error = err.what();
        atomic_write_file(out_dir / "error.txt",
                          std::string(err.what()) + "\n");
        return record;
    }

    LlmGateway gateway(backend);
    EngineOptions engine_options;
    engine_options.sandbox = cfg.sandbox;
    engine_options.workspace_parent = workspace_parent;
    engine_options.keep_workspaces = cfg.keep_workspaces;
    WorkflowEngine engine(gateway, cfg.workflow, guidelines, engine_options);

    std::optional<WorkflowResult> result;
    try {
        result = engine.run(task);
    } catch (const SandboxError&) {
        throw;
    } catch (const Error& err) {
        record.workflow_ok = false;
        record.error = err.what();
        engine.transcript().save(out_dir / "transcript.jsonl");
        atomic_write_file(out_dir / "error.txt",
                          std::string(err.what()) + "\n");
    }

    if (recorder) {
        recorder->save(cassette_file(cfg, task.id, sample_idx));
    }
    if (result) {
        result->transcript.save(out_dir / "transcript.jsonl");
        atomic_write_file(out_dir / "final_code.c",
                          result->final_code.source);
        if (result->final_tests) {
            atomic_write_file(out_dir / "final_tests.py",
                              result->final_tests->script);
        }
        record.prediction = prediction_from_transcript(result->transcript,
                                                       task, sample_idx);
        record.verdict =
            evaluate_sample(task, result->final_code, sample_idx, cfg.sandbox,
                            workspace_parent, cfg.keep_workspaces);
    }
    if (!cfg.keep_workspaces) {
        std::error_code ec;
        fs::remove_all(workspace_parent, ec);
    }
    return record;
}

void for_each_parallel(std::size_t count, int workers,
                       const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex error_mu;
    std::exception_ptr first_error;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        while (!failed.load()) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
            }
        }
    };
    std::vector<std::thread> pool;
    const int thread_count =
        static_cast<int>(std::min<std::size_t>(count, workers));
    pool.reserve(static_cast<std::size_t>(thread_count));
    for (int i = 0; i < thread_count; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct RunOutputs {
    std::vector<SampleVerdict> verdicts;
    std::vector<PredictionRecord> predictions;
    int failures = 0;
};

RunOutputs run_samples(const RunConfig& cfg, const GuidelineSet* guidelines,
                       const std::vector<CodingTask>& tasks) {
    std::shared_ptr<Backend> live_backend;
    if (cfg.backend != BackendKind::Replay) {
        HttpBackendOptions http;
        http.base_url = cfg.base_url;
        http.requests_per_minute = cfg.requests_per_minute;
        http.timeout_s = cfg.timeout_s;
        live_backend = std::make_shared<HttpBackend>(http);
    }

    const std::size_t job_count =
        tasks.size() * static_cast<std::size_t>(cfg.samples_per_task);
    std::vector<SampleRecord> records(job_count);
    for_each_parallel(job_count, cfg.parallelism, [&](std::size_t job) {
        const std::size_t task_idx =
            job / static_cast<std::size_t>(cfg.samples_per_task);
        const int sample_idx =
            static_cast<int>(job % static_cast<std::size_t>(cfg.samples_per_task));
        records[job] = run_one_sample(cfg, guidelines, tasks[task_idx],
                                      sample_idx, live_backend);
    });

    RunOutputs out;
    for (const SampleRecord& record : records) {
        if (!record.workflow_ok) {
            out.failures += 1;
            std::cerr << "warning: " << record.verdict.task_id << " sample "
                      << record.verdict.sample_idx
                      << " failed: " << record.error << "\n";
        }
        out.verdicts.push_back(record.verdict);
        if (record.prediction) out.predictions.push_back(*record.prediction);
    }
    return out;
}

const GuidelineSet* load_guidelines_if_needed(const RunConfig& cfg,
                                              GuidelineSet& storage) {
    if (cfg.workflow.guidance_mode != GuidanceMode::Guidelines) {
        return nullptr;
    }
    storage = load_guidelines(cfg.guidelines_path);
    return &storage;
}

void echo_config(const RunConfig& cfg) {
    fs::create_directories(cfg.run_dir);
    atomic_write_file(cfg.run_dir / "config.json",
                      cfg.to_json().dump(2) + "\n");
}

std::string yes_no(bool v) { return v ? "yes" : "no"; }

int cmd_run_task(const CommonFlags& flags, const std::string& task_id) {
    RunConfig cfg = build_config(flags);
    cfg.validate();
    if (cfg.benchmark_path.empty()) {
        throw ConfigError("run-task requires benchmark_path (--benchmark)");
    }
    set_process_slots(cfg.parallelism);

    std::vector<CodingTask> tasks = load_benchmark(cfg.benchmark_path);
    auto it = std::find_if(tasks.begin(), tasks.end(),
                           [&](const CodingTask& t) { return t.id == task_id; });
    if (it == tasks.end()) {
        throw ConfigError("unknown task id '" + task_id + "'");
    }
    echo_config(cfg);

    GuidelineSet guideline_storage;
    const GuidelineSet* guidelines =
        load_guidelines_if_needed(cfg, guideline_storage);

    std::vector<CodingTask> selected{*it};
    RunOutputs out = run_samples(cfg, guidelines, selected);
    for (const SampleVerdict& v : out.verdicts) {
        std::cout << "task " << v.task_id << " sample " << v.sample_idx
                  << ": functional=" << yes_no(v.functional)
                  << " secure=" << yes_no(v.secure)
                  << " func_sec=" << yes_no(v.func_sec) << "\n";
    }
    std::cout << "artifacts: " << (cfg.run_dir / task_id).string() << "\n";
    return out.failures == 0 ? kExitOk : kExitInfrastructure;
}

int cmd_bench(const CommonFlags& flags) {
    RunConfig cfg = build_config(flags);
    cfg.validate();
    if (cfg.benchmark_path.empty()) {
        throw ConfigError("bench requires benchmark_path (--benchmark)");
    }
    set_process_slots(cfg.parallelism);

    std::vector<CodingTask> tasks = load_benchmark(cfg.benchmark_path);
    if (tasks.empty()) {
        throw ConfigError("benchmark at " + cfg.benchmark_path.string() +
                          " lists no tasks");
    }
    echo_config(cfg);

    GuidelineSet guideline_storage;
    const GuidelineSet* guidelines =
        load_guidelines_if_needed(cfg, guideline_storage);

    RunOutputs out = run_samples(cfg, guidelines, tasks);
    MetricsReport report =
        compute_report(out.verdicts, out.predictions, cfg.ks);
    atomic_write_file(cfg.run_dir / "report.json",
                      report.to_json().dump(2) + "\n");
    atomic_write_file(cfg.run_dir / "report.txt", report.to_table());
    std::cout << report.to_table();
    std::cout << "report: " << (cfg.run_dir / "report.json").string() << "\n";
    return kExitOk;
}

int cmd_replay_verify(const std::string& run_dir_arg) {
    const fs::path run_dir(run_dir_arg);
    nlohmann::json config_doc;
    try {
        config_doc = nlohmann::json::parse(read_file(run_dir / "config.json"));
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError((run_dir / "config.json").string() + ": " +
                          err.what());
    }
    RunConfig cfg;
    apply_config_json(cfg, config_doc);
    if (cfg.benchmark_path.empty()) {
        throw ConfigError("stored config has no benchmark_path");
    }
    set_process_slots(cfg.parallelism);

    MetricsReport stored;
    try {
        stored = MetricsReport::from_json(
            nlohmann::json::parse(read_file(run_dir / "report.json")));
    } catch (const nlohmann::json::exception& err) {
        throw ConfigError((run_dir / "report.json").string() + ": " +
                          err.what());
    }

    std::vector<CodingTask> tasks = load_benchmark(cfg.benchmark_path);
    std::vector<SampleVerdict> verdicts;
    std::vector<PredictionRecord> predictions;
    const fs::path workspace_parent = run_dir / "verify-ws";
    for (const CodingTask& task : tasks) {
        if (!fs::exists(run_dir / task.id)) continue;
        for (int idx = 0; idx < cfg.samples_per_task; ++idx) {
            const fs::path dir = sample_dir(cfg, task.id, idx);
            const fs::path code_path =
                run_dir / task.id / std::to_string(idx) / "final_code.c";
            (void)dir;
            if (!fs::exists(code_path)) {
                SampleVerdict missing;
                missing.task_id = task.id;
                missing.sample_idx = idx;
                verdicts.push_back(missing);
                continue;
            }
            CodeSample code;
            code.source = read_file(code_path);
            verdicts.push_back(evaluate_sample(task, code, idx, cfg.sandbox,
                                               workspace_parent, false));
            const fs::path transcript_path =
                run_dir / task.id / std::to_string(idx) / "transcript.jsonl";
            if (fs::exists(transcript_path)) {
                WorkflowTranscript transcript =
                    WorkflowTranscript::load(transcript_path);
                auto prediction =
                    prediction_from_transcript(transcript, task, idx);
                if (prediction) predictions.push_back(*prediction);
            }
        }
    }
    {
        std::error_code ec;
        fs::remove_all(workspace_parent, ec);
    }
    if (verdicts.empty()) {
        throw ConfigError("run directory " + run_dir.string() +
                          " contains no persisted samples");
    }
    MetricsReport recomputed = compute_report(verdicts, predictions, cfg.ks);
    if (recomputed == stored) {
        std::cout << "replay-verify: OK (" << verdicts.size()
                  << " samples re-evaluated; report matches)\n";
        return kExitOk;
    }
    std::cerr << "replay-verify: MISMATCH\nstored:\n"
              << stored.to_table() << "recomputed:\n"
              << recomputed.to_table();
    return kExitInfrastructure;
}

int cmd_guidelines_lint(const std::string& path) {
    GuidelineSet set = load_guidelines(path);
    std::set<int> cwes;
    for (const Guideline& g : set.guidelines()) {
        for (const CweId& cwe : g.cwe_ids) cwes.insert(cwe.number);
    }
    std::cout << path << ": " << set.size() << " guidelines covering "
              << cwes.size() << " CWEs\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Secure code generation workflow: draft, test, arbitrate, "
                 "retrieve guidelines, revise, evaluate"};
    app.require_subcommand(1);

    CommonFlags run_task_flags;
    std::string run_task_id;
    CLI::App* run_task =
        app.add_subcommand("run-task", "Run the workflow for one task");
    run_task->add_option("task_id", run_task_id, "Benchmark task id")
        ->required();
    add_common_flags(run_task, run_task_flags);

    CommonFlags bench_flags;
    CLI::App* bench = app.add_subcommand(
        "bench", "Run the workflow over a benchmark and report metrics");
    add_common_flags(bench, bench_flags);

    std::string verify_run_dir;
    CLI::App* verify = app.add_subcommand(
        "replay-verify",
        "Re-evaluate persisted final code and check the stored report");
    verify->add_option("run_dir", verify_run_dir, "Completed run directory")
        ->required();

    std::string lint_path;
    CLI::App* lint = app.add_subcommand("guidelines-lint",
                                        "Validate a guideline database file");
    lint->add_option("path", lint_path, "Guideline JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (app.got_subcommand(run_task)) {
            return cmd_run_task(run_task_flags, run_task_id);
        }
        if (app.got_subcommand(bench)) {
            return cmd_bench(bench_flags);
        }
        if (app.got_subcommand(verify)) {
            return cmd_replay_verify(verify_run_dir);
        }
        if (app.got_subcommand(lint)) {
            return cmd_guidelines_lint(lint_path);
        }
        return kExitUsage;
    } catch (const ConfigError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    } catch (const Error& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitInfrastructure;
    } catch (const std::exception& err) {
        std::cerr << "internal error: " << err.what() << "\n";
        return kExitInfrastructure;
    }
}
