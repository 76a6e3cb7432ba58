#include "rectree/bench.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "rectree/model_io.hpp"

namespace rectree {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double>(b - a).count();
}

std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    return idx;
}

Dataset take_rows(const Dataset& source, std::span<const std::size_t> which) {
    Dataset out;
    out.conditions = source.conditions;
    out.provenance = source.provenance;
    out.rows.reserve(which.size());
    for (std::size_t i : which) out.rows.push_back(source.rows[i]);
    return out;
}

StepStat initial_stat(const DecisionTree& tree, const BoostedTree& bt,
                      std::span<const Instance> test) {
    return {relative_accuracy(tree, bt, test), tree.node_count(), tree.depth(), 0.0};
}

RunTrace rectify_run(const DecisionTree& start, const BoostedTree& bt,
                     std::span<const Instance> test, const DomainTheory& th,
                     const DistillOptions& opts, DecisionTree& final_tree) {
    RunTrace trace;
    trace.steps.push_back(initial_stat(start, bt, test));
    DistillResult result = distill_stream(start, bt, test, th, opts);
    for (const StepRecord& r : result.steps) {
        trace.steps.push_back({r.relative_accuracy, r.node_count, r.depth, r.elapsed_ms});
        trace.cumulative_s += r.elapsed_ms / 1000.0;
    }
    trace.records = result.steps;
    if (misclassified(result.tree, bt, test).empty()) {
        trace.corrections_to_empty = result.corrections;
    }
    final_tree = std::move(result.tree);
    return trace;
}

RunTrace retrain_run(const Dataset& train, const DecisionTree& start, const BoostedTree& bt,
                     std::span<const Instance> test, const DomainTheory& th,
                     const ProtocolOptions& opts, std::uint64_t run_seed,
                     DecisionTree& final_tree) {
    RunTrace trace;
    trace.steps.push_back(initial_stat(start, bt, test));
    Dataset current_train = train;
    DecisionTree current = start;
    std::unordered_map<Instance, Term, InstanceHash> memo;
    int step = 0;
    for (const Instance& x : test) {
        if (classify(current, x) == classify(bt, x)) continue;
        const auto t0 = Clock::now();
        auto found = memo.find(x);
        if (found == memo.end()) {
            found = memo.emplace(x, tree_specific_reason(bt, x, th, opts.distill.explain)).first;
        }
        ClassificationRule rule(found->second, classify(bt, x), th);
        RetrainOptions step_opts = opts.retrain;
        step_opts.max_depth = opts.dt_max_depth;
        step_opts.seed = run_seed * 1000003ull + static_cast<std::uint64_t>(step);
        RetrainOutcome outcome = retrain_correct(current_train, current, bt, x, rule, step_opts, th);
        current_train = std::move(outcome.train);
        current = std::move(outcome.tree);
        ++step;

        StepRecord record;
        record.step = step;
        record.instance = x;
        record.rule_premises = rule.premises();
        record.rule_conclusion = rule.conclusion();
        record.relative_accuracy = relative_accuracy(current, bt, test);
        record.node_count = current.node_count();
        record.depth = current.depth();
        record.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        trace.steps.push_back({record.relative_accuracy, record.node_count, record.depth,
                               record.elapsed_ms});
        trace.cumulative_s += record.elapsed_ms / 1000.0;
        trace.records.push_back(std::move(record));
    }
    final_tree = std::move(current);
    return trace;
}

}  // namespace

std::string method_name(Method m) { return m == Method::Rectify ? "rectify" : "retrain"; }

ProtocolResult run_protocol(const RawTable& data, std::uint64_t split_seed,
                            const ProtocolOptions& opts) {
    if (opts.runs < 1) {
        throw PreconditionError("the protocol needs at least one run");
    }
    const std::vector<std::size_t> order = shuffled_indices(data.size(), split_seed);
    const auto train_count = static_cast<std::size_t>(
        std::llround(opts.train_fraction * static_cast<double>(data.size())));
    if (train_count == 0 || train_count == data.size()) {
        throw DataError("the 70/30 split left one side empty; the dataset is too small");
    }
    RawTable train_raw, test_raw;
    train_raw.attributes = test_raw.attributes = data.attributes;
    for (std::size_t i = 0; i < data.size(); ++i) {
        RawTable& side = i < train_count ? train_raw : test_raw;
        side.rows.push_back(data.rows[order[i]]);
        side.labels.push_back(data.labels[order[i]]);
    }

    // booster first; everything downstream lives in its condition space
    auto candidates = std::make_shared<const ConditionSet>(propose_conditions(train_raw));
    Dataset train_wide = binarize_table(train_raw, candidates, "train");
    BoostedTree wide_booster = gbt_learn(train_wide, opts.gbt);
    auto cs = std::make_shared<const ConditionSet>(build_condition_set(wide_booster));

    ProtocolResult result;
    result.method = opts.method;
    result.dt_max_depth = opts.dt_max_depth;
    result.booster = rebind(wide_booster, cs);
    result.theory = derive_theory(*cs);
    result.train_set = binarize_table(train_raw, cs, "train");
    result.test_set = binarize_table(test_raw, cs, "test");
    const std::vector<Instance> test_instances = result.test_set.instances();

    for (int run = 0; run < opts.runs; ++run) {
        const std::uint64_t run_seed = split_seed * 7919ull + static_cast<std::uint64_t>(run) + 1;
        std::vector<std::size_t> pick = shuffled_indices(result.train_set.rows.size(), run_seed);
        const auto keep = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(opts.subsample_fraction *
                                                     static_cast<double>(pick.size()))));
        pick.resize(keep);
        Dataset subsample = take_rows(result.train_set, pick);
        DecisionTree initial = cart_learn(subsample, CartOptions{opts.dt_max_depth});

        DecisionTree final_tree = initial;
        RunTrace trace =
            opts.method == Method::Rectify
                ? rectify_run(initial, result.booster, test_instances, result.theory, opts.distill,
                              final_tree)
                : retrain_run(subsample, initial, result.booster, test_instances, result.theory,
                              opts, run_seed, final_tree);
        result.runs.push_back(std::move(trace));
        result.final_trees.push_back(std::move(final_tree));
    }

    double total = 0.0;
    for (const RunTrace& t : result.runs) total += t.cumulative_s;
    result.mean_compile_s = total / static_cast<double>(result.runs.size());
    return result;
}

LatencyReport run_sr_latency(const BoostedTree& bt, const DecisionTree& distilled,
                             std::span<const Instance> instances, const DomainTheory& th,
                             std::chrono::milliseconds per_query_budget, double compile_time_s) {
    LatencyReport report;
    report.compile_time_s = compile_time_s;
    if (instances.empty()) return report;

    // warm caches once per engine, untimed
    (void)sufficient_reason(distilled, instances.front(), th);
    (void)exact_sufficient_reason(bt, instances.front(), th, per_query_budget);

    for (const Instance& x : instances) {
        const auto t0 = Clock::now();
        (void)sufficient_reason(distilled, x, th);
        const double dt_s = seconds_between(t0, Clock::now());
        if (dt_s * 1000.0 <= static_cast<double>(per_query_budget.count())) {
            report.dt_seconds.push_back(dt_s);
        } else {
            report.dt_seconds.push_back(std::nullopt);
            ++report.dt_timeouts;
        }

        const auto t1 = Clock::now();
        const auto reason = exact_sufficient_reason(bt, x, th, per_query_budget);
        const double bt_s = seconds_between(t1, Clock::now());
        if (reason.has_value()) {
            report.bt_seconds.push_back(bt_s);
        } else {
            report.bt_seconds.push_back(std::nullopt);
            ++report.bt_timeouts;
        }
    }

    auto mean_of = [](const std::vector<std::optional<double>>& xs) {
        double sum = 0.0;
        int count = 0;
        for (const auto& v : xs) {
            if (v.has_value()) {
                sum += *v;
                ++count;
            }
        }
        return count > 0 ? sum / count : 0.0;
    };
    report.mean_dt_s = mean_of(report.dt_seconds);
    report.mean_bt_s = mean_of(report.bt_seconds);
    if (report.mean_dt_s > 0.0) {
        report.alpha = report.mean_bt_s / report.mean_dt_s;
    }
    if (report.mean_bt_s > report.mean_dt_s) {
        report.beta = static_cast<long long>(
            std::ceil(compile_time_s / (report.mean_bt_s - report.mean_dt_s)));
    }
    return report;
}

RawTable synthetic_workload(int rows, std::uint64_t seed) {
    RawTable table;
    // eight ternary attributes (two thresholds each) and two binary ones
    // (one threshold each): eighteen candidate conditions
    for (int a = 0; a < 10; ++a) {
        table.attributes.push_back("a" + std::to_string(a));
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> ternary(0, 2);
    std::uniform_int_distribution<int> binary(0, 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < rows; ++i) {
        std::vector<RawValue> row;
        std::vector<int> v(10);
        for (int a = 0; a < 8; ++a) v[static_cast<std::size_t>(a)] = ternary(rng);
        for (int a = 8; a < 10; ++a) v[static_cast<std::size_t>(a)] = binary(rng);
        for (int a = 0; a < 10; ++a) row.emplace_back(static_cast<double>(v[static_cast<std::size_t>(a)]));

        bool label = (v[0] > 1 && v[1] > 0) || (v[2] > 1 && v[3] == 0) ||
                     (v[8] == 1 && v[4] > 1) || (v[5] > 0 && v[6] > 1 && v[9] == 0) || v[7] > 1;
        if (unit(rng) < 0.05) label = !label;  // label noise
        table.rows.push_back(std::move(row));
        table.labels.push_back(label);
    }
    return table;
}

namespace {

std::string fmt(double v, const char* spec = "%.6g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

const StepStat& stat_at(const RunTrace& trace, std::size_t step) {
    return trace.steps[std::min(step, trace.steps.size() - 1)];
}

struct MedianRow {
    double i_p;
    double nodes;
    double depth;
};

MedianRow median_at(const ProtocolResult& p, std::optional<std::size_t> step) {
    std::vector<double> i_p, nodes, depth;
    for (const RunTrace& t : p.runs) {
        const StepStat& s = step.has_value() ? stat_at(t, *step) : t.steps.back();
        i_p.push_back(s.relative_accuracy);
        nodes.push_back(s.node_count);
        depth.push_back(s.depth);
    }
    return {median(i_p), median(nodes), median(depth)};
}

std::string config_name(const ProtocolResult& p) {
    return p.dt_max_depth.has_value() ? "optimized" : "default";
}

nlohmann::json signed_literals(const Term& t) {
    nlohmann::json out = nlohmann::json::array();
    for (const Literal& lit : t) {
        out.push_back((lit.id + 1) * (lit.positive ? 1 : -1));
    }
    return out;
}

}  // namespace

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    std::sort(values.begin(), values.end());
    const std::size_t mid = values.size() / 2;
    if (values.size() % 2 == 1) return values[mid];
    return (values[mid - 1] + values[mid]) / 2.0;
}

void emit_report(const ReportBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    {
        std::ostringstream out;
        out << "dataset,config,method,step,i_p,n_nodes,depth,f\n";
        for (const ProtocolResult& p : bundle.protocols) {
            const char* steps[] = {"0", "1", "2", "final"};
            for (int k = 0; k < 4; ++k) {
                const bool final_row = k == 3;
                MedianRow row = median_at(p, final_row ? std::nullopt
                                                       : std::optional<std::size_t>(static_cast<std::size_t>(k)));
                out << bundle.dataset_name << "," << config_name(p) << "," << method_name(p.method)
                    << "," << steps[k] << "," << fmt(row.i_p * 100.0, "%.2f") << ","
                    << fmt(row.nodes) << "," << fmt(row.depth) << ",";
                if (final_row && p.method == Method::Rectify) {
                    std::vector<double> f;
                    for (const RunTrace& t : p.runs) {
                        if (t.corrections_to_empty.has_value()) f.push_back(*t.corrections_to_empty);
                    }
                    if (!f.empty()) out << fmt(median(f));
                }
                out << "\n";
            }
        }
        atomic_write_file(dir / "summary.csv", out.str());
    }

    {
        // cumulative mean correction times, one row per dataset
        double cells[2][2] = {{-1.0, -1.0}, {-1.0, -1.0}};  // [config][method]
        for (const ProtocolResult& p : bundle.protocols) {
            double total = 0.0;
            for (const RunTrace& t : p.runs) total += t.cumulative_s;
            const int config = p.dt_max_depth.has_value() ? 1 : 0;
            const int method = p.method == Method::Rectify ? 0 : 1;
            cells[config][method] = total / static_cast<double>(p.runs.size());
        }
        std::ostringstream out;
        out << "dataset,d_rec,d_ret,o_rec,o_ret\n" << bundle.dataset_name;
        for (double v : {cells[0][0], cells[0][1], cells[1][0], cells[1][1]}) {
            out << ",";
            if (v >= 0.0) out << fmt(v, "%.6f");
        }
        out << "\n";
        atomic_write_file(dir / "times.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "dataset,t_c,to_i,t_i,to_p,t_p,alpha,beta\n";
        for (const LatencyReport& r : bundle.latencies) {
            out << bundle.dataset_name << "," << fmt(r.compile_time_s, "%.6f") << ","
                << r.dt_timeouts << "," << fmt(r.mean_dt_s, "%.6f") << "," << r.bt_timeouts << ","
                << fmt(r.mean_bt_s, "%.6f") << "," << fmt(r.alpha, "%.3f") << ",";
            if (r.beta.has_value()) out << *r.beta;
            out << "\n";
        }
        atomic_write_file(dir / "latency.csv", out.str());
    }

    {
        std::ostringstream out;
        out << "dataset,engine,time_s,unresolved\n";
        auto curve = [&](const char* engine, const std::vector<std::optional<double>>& samples) {
            std::vector<double> done;
            for (const auto& v : samples) {
                if (v.has_value()) done.push_back(*v);
            }
            std::sort(done.begin(), done.end());
            std::size_t unresolved = samples.size();
            out << bundle.dataset_name << "," << engine << ",0," << unresolved << "\n";
            for (double t : done) {
                --unresolved;
                out << bundle.dataset_name << "," << engine << "," << fmt(t, "%.6f") << ","
                    << unresolved << "\n";
            }
        };
        for (const LatencyReport& r : bundle.latencies) {
            curve("decision-tree", r.dt_seconds);
            curve("boosted-tree", r.bt_seconds);
        }
        atomic_write_file(dir / "curves.csv", out.str());
    }

    {
        std::ostringstream out;
        for (const ProtocolResult& p : bundle.protocols) {
            for (std::size_t run = 0; run < p.runs.size(); ++run) {
                for (const StepRecord& r : p.runs[run].records) {
                    nlohmann::json line{{"dataset", bundle.dataset_name},
                                        {"config", config_name(p)},
                                        {"method", method_name(p.method)},
                                        {"run", run},
                                        {"step", r.step},
                                        {"instance", r.instance.bits()},
                                        {"premises", signed_literals(r.rule_premises)},
                                        {"conclusion", r.rule_conclusion ? 1 : 0},
                                        {"i_p", r.relative_accuracy},
                                        {"n_nodes", r.node_count},
                                        {"depth", r.depth},
                                        {"elapsed_ms", r.elapsed_ms}};
                    out << line.dump() << "\n";
                }
            }
        }
        atomic_write_file(dir / "trace.jsonl", out.str());
    }

    {
        nlohmann::json doc{{"dataset", bundle.dataset_name}};
        doc["protocols"] = nlohmann::json::array();
        for (const ProtocolResult& p : bundle.protocols) {
            nlohmann::json entry{{"method", method_name(p.method)}, {"config", config_name(p)}};
            entry["runs"] = nlohmann::json::array();
            for (const RunTrace& t : p.runs) {
                nlohmann::json steps = nlohmann::json::array();
                for (const StepStat& s : t.steps) {
                    steps.push_back({{"i_p", s.relative_accuracy},
                                     {"n_nodes", s.node_count},
                                     {"depth", s.depth}});
                }
                nlohmann::json run{{"steps", std::move(steps)},
                                   {"cumulative_s", t.cumulative_s}};
                if (t.corrections_to_empty.has_value()) run["f"] = *t.corrections_to_empty;
                entry["runs"].push_back(std::move(run));
            }
            doc["protocols"].push_back(std::move(entry));
        }
        doc["latencies"] = nlohmann::json::array();
        for (const LatencyReport& r : bundle.latencies) {
            nlohmann::json entry{{"t_c", r.compile_time_s},   {"to_i", r.dt_timeouts},
                                 {"t_i", r.mean_dt_s},        {"to_p", r.bt_timeouts},
                                 {"t_p", r.mean_bt_s},        {"alpha", r.alpha}};
            if (r.beta.has_value()) entry["beta"] = *r.beta;
            doc["latencies"].push_back(std::move(entry));
        }
        save_json_file(dir / "summary.json", doc);
    }
}

}  // namespace rectree
