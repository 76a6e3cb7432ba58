#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rectree/learn.hpp"
#include "rectree/rectify.hpp"

namespace rectree {

enum class Method : std::uint8_t { Rectify, Retrain };

std::string method_name(Method m);

struct StepStat {
    double relative_accuracy = 0.0;
    int node_count = 0;
    int depth = 0;
    double elapsed_ms = 0.0;
};

struct RunTrace {
    std::vector<StepStat> steps;  // [0] describes the initial tree
    std::vector<StepRecord> records;
    std::optional<int> corrections_to_empty;  // f, when the diff emptied
    double cumulative_s = 0.0;
};

struct ProtocolOptions {
    Method method = Method::Rectify;
    GbtOptions gbt;
    std::optional<int> dt_max_depth;  // absent = default configuration
    int runs = 10;
    double train_fraction = 0.7;
    double subsample_fraction = 0.7;
    RetrainOptions retrain;
    DistillOptions distill;
};

struct ProtocolResult {
    Method method = Method::Rectify;
    std::optional<int> dt_max_depth;
    std::vector<RunTrace> runs;
    BoostedTree booster;
    DomainTheory theory;
    Dataset train_set;
    Dataset test_set;
    std::vector<DecisionTree> final_trees;
    double mean_compile_s = 0.0;
};

// The measurement protocol: seeded 70/30 split, booster learned on the
// training side, several initial trees from 70% subsamples, one correction
// run per tree over the test stream with the relative accuracy recomputed
// after every correction.
ProtocolResult run_protocol(const RawTable& data, std::uint64_t split_seed,
                            const ProtocolOptions& opts);

struct LatencyReport {
    double compile_time_s = 0.0;
    std::vector<std::optional<double>> dt_seconds;  // per instance; nullopt = timeout
    std::vector<std::optional<double>> bt_seconds;
    int dt_timeouts = 0;
    int bt_timeouts = 0;
    double mean_dt_s = 0.0;  // over completed queries only
    double mean_bt_s = 0.0;
    double alpha = 0.0;                // mean_bt / mean_dt
    std::optional<long long> beta;     // ceil(t_C / (t_P - t_I)) when t_P > t_I
};

// Times sufficient-reason queries on the distilled tree against the exact
// enumeration-based engine on the booster. Timeouts are data, not errors.
LatencyReport run_sr_latency(const BoostedTree& bt, const DecisionTree& distilled,
                             std::span<const Instance> instances, const DomainTheory& th,
                             std::chrono::milliseconds per_query_budget, double compile_time_s);

// Seeded synthetic credit-style workload: ten primitive attributes with few
// distinct values apiece, a noisy nonlinear label.
RawTable synthetic_workload(int rows, std::uint64_t seed);

struct ReportBundle {
    std::string dataset_name;
    std::vector<ProtocolResult> protocols;
    std::vector<LatencyReport> latencies;
};

// summary.csv, times.csv, latency.csv, curves.csv, trace.jsonl, summary.json
void emit_report(const ReportBundle& bundle, const std::filesystem::path& dir);

double median(std::vector<double> values);

}  // namespace rectree
