#include "rectree/cli.hpp"

#include <chrono>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rectree/bench.hpp"
#include "rectree/model_io.hpp"
#include "rectree/oracle.hpp"

namespace rectree {

namespace {

using nlohmann::json;

void write_manifest(const std::filesystem::path& anchor, const std::string& subcommand,
                    json values) {
    json doc{{"subcommand", subcommand}, {"resolved", std::move(values)}};
    std::filesystem::path path = anchor;
    path.replace_extension();
    path += ".run.json";
    save_json_file(path, doc);
}

DeletionOrder parse_deletion_order(const std::string& name) {
    if (name == "desc") return DeletionOrder::DescendingId;
    if (name == "asc") return DeletionOrder::AscendingId;
    if (name == "shuffle") return DeletionOrder::SeededShuffle;
    throw DataError("unknown deletion order '" + name + "'");
}

std::shared_ptr<const ConditionSet> conditions_of(const AnyModel& model) {
    return std::visit([](const auto& m) { return m.conditions(); }, model);
}

void require_same_space(const ConditionSet& a, const ConditionSet& b) {
    if (!(a == b)) {
        throw DataError("the two models use different condition sets");
    }
}

std::vector<Instance> binarized_instances(const RawTable& table, const ConditionSet& cs) {
    std::vector<Instance> out;
    out.reserve(table.size());
    for (std::size_t i = 0; i < table.size(); ++i) {
        out.push_back(binarize(table.row(i), cs));
    }
    return out;
}

json signed_literals(const Term& t) {
    json out = json::array();
    for (const Literal& lit : t) out.push_back((lit.id + 1) * (lit.positive ? 1 : -1));
    return out;
}

// ---------------------------------------------------------------- train ---

struct TrainArgs {
    std::string kind;
    std::string data;
    std::string out;
    std::string conditions_from;
    std::string conditions_out;
    std::optional<int> max_depth;
    GbtOptions gbt;
    std::uint64_t seed = 42;
};

int cmd_train(const TrainArgs& args) {
    const RawTable table = load_csv(args.data);
    std::shared_ptr<const ConditionSet> cs;
    if (!args.conditions_from.empty()) {
        cs = conditions_of(load_model_file(args.conditions_from));
    } else {
        cs = std::make_shared<const ConditionSet>(propose_conditions(table));
    }
    Dataset data = binarize_table(table, cs, args.data);

    json manifest{{"kind", args.kind},
                  {"data", args.data},
                  {"out", args.out},
                  {"seed", args.seed}};
    if (!args.conditions_from.empty()) manifest["conditions"] = args.conditions_from;

    if (args.kind == "dt") {
        if (args.max_depth.has_value()) manifest["max_depth"] = *args.max_depth;
        DecisionTree dt = cart_learn(data, CartOptions{args.max_depth});
        save_json_file(args.out, to_json(dt));
    } else {
        manifest["rounds"] = args.gbt.rounds;
        manifest["depth"] = args.gbt.depth;
        manifest["learning_rate"] = args.gbt.learning_rate;
        BoostedTree wide = gbt_learn(data, args.gbt);
        // keep only the conditions the booster actually uses, unless the
        // space was pinned by another model
        BoostedTree bt = wide;
        if (args.conditions_from.empty()) {
            auto used = std::make_shared<const ConditionSet>(build_condition_set(wide));
            bt = rebind(wide, used);
        }
        save_json_file(args.out, to_json(bt));
        if (!args.conditions_out.empty()) {
            save_json_file(args.conditions_out, conditions_to_json(*bt.conditions()));
        }
    }
    write_manifest(args.out, "train", std::move(manifest));
    return 0;
}

// -------------------------------------------------------------- distill ---

struct DistillArgs {
    std::string bt_path;
    std::string dt_path;
    std::string data;
    std::string out;
    std::string trace_out;
    std::string order = "dataset";
    std::uint64_t seed = 42;
    std::optional<int> max_steps;
    bool no_simplify = false;
    std::string explain_order = "desc";
    std::uint64_t explain_seed = 0;
};

void write_trace(const std::filesystem::path& path, std::span<const StepRecord> steps) {
    std::ostringstream out;
    for (const StepRecord& r : steps) {
        json line{{"step", r.step},
                  {"instance", r.instance.bits()},
                  {"premises", signed_literals(r.rule_premises)},
                  {"conclusion", r.rule_conclusion ? 1 : 0},
                  {"i_p", r.relative_accuracy},
                  {"n_nodes", r.node_count},
                  {"depth", r.depth},
                  {"elapsed_ms", r.elapsed_ms}};
        out << line.dump() << "\n";
    }
    atomic_write_file(path, out.str());
}

int cmd_distill(const DistillArgs& args) {
    const BoostedTree bt = load_boosted_tree_file(args.bt_path);
    const DecisionTree dt = load_decision_tree_file(args.dt_path);
    require_same_space(*bt.conditions(), *dt.conditions());
    const DomainTheory th = derive_theory(*bt.conditions());

    const RawTable table = load_csv(args.data);
    std::vector<Instance> stream = binarized_instances(table, *bt.conditions());
    if (args.order == "shuffle") {
        std::mt19937_64 rng(args.seed);
        std::shuffle(stream.begin(), stream.end(), rng);
    } else if (args.order != "dataset") {
        throw DataError("unknown stream order '" + args.order + "'");
    }

    DistillOptions opts;
    opts.explain.order = parse_deletion_order(args.explain_order);
    opts.explain.seed = args.explain_seed;
    opts.simplify = !args.no_simplify;
    opts.max_steps = args.max_steps;

    DistillResult result = distill_stream(dt, bt, stream, th, opts);
    save_json_file(args.out, to_json(result.tree));
    if (!args.trace_out.empty()) write_trace(args.trace_out, result.steps);

    json manifest{{"bt", args.bt_path},   {"dt", args.dt_path},
                  {"data", args.data},    {"out", args.out},
                  {"order", args.order},  {"seed", args.seed},
                  {"simplify", opts.simplify}, {"explain_order", args.explain_order},
                  {"explain_seed", args.explain_seed}, {"corrections", result.corrections}};
    if (args.max_steps.has_value()) manifest["max_steps"] = *args.max_steps;
    if (!args.trace_out.empty()) manifest["trace_out"] = args.trace_out;
    write_manifest(args.out, "distill", std::move(manifest));

    std::cout << "corrections: " << result.corrections << "\n"
              << "final nodes: " << result.tree.node_count() << ", depth: " << result.tree.depth()
              << "\n";
    return 0;
}

// ------------------------------------------------------- retrain-correct ---

struct RetrainArgs {
    std::string bt_path;
    std::string dt_path;
    std::string train;
    std::string data;
    std::string out;
    std::string trace_out;
    double ratio = 0.01;
    int bound = 100;
    std::uint64_t seed = 42;
    std::string size_rule = "cap";
    std::optional<int> max_depth;
    std::string explain_order = "desc";
};

int cmd_retrain(const RetrainArgs& args) {
    const BoostedTree bt = load_boosted_tree_file(args.bt_path);
    const DomainTheory th = derive_theory(*bt.conditions());
    const RawTable train_raw = load_csv(args.train);
    Dataset train = binarize_table(train_raw, bt.conditions(), args.train);

    DecisionTree current = args.dt_path.empty()
                               ? cart_learn(train, CartOptions{args.max_depth})
                               : load_decision_tree_file(args.dt_path);
    if (!args.dt_path.empty()) require_same_space(*bt.conditions(), *current.conditions());

    const RawTable table = load_csv(args.data);
    const std::vector<Instance> stream = binarized_instances(table, *bt.conditions());

    RetrainOptions opts;
    opts.ratio = args.ratio;
    opts.bound = args.bound;
    opts.max_depth = args.max_depth;
    if (args.size_rule == "cap") {
        opts.size_rule = SampleSizeRule::CapAtBound;
    } else if (args.size_rule == "max") {
        opts.size_rule = SampleSizeRule::LiteralMax;
    } else {
        throw DataError("unknown size rule '" + args.size_rule + "'");
    }
    ExplainOptions explain{parse_deletion_order(args.explain_order), 0};

    std::vector<StepRecord> records;
    int step = 0;
    for (const Instance& x : stream) {
        if (classify(current, x) == classify(bt, x)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        ClassificationRule rule(tree_specific_reason(bt, x, th, explain), classify(bt, x), th);
        RetrainOptions step_opts = opts;
        step_opts.seed = args.seed * 1000003ull + static_cast<std::uint64_t>(step);
        RetrainOutcome outcome = retrain_correct(train, current, bt, x, rule, step_opts, th);
        train = std::move(outcome.train);
        current = std::move(outcome.tree);
        ++step;

        StepRecord r;
        r.step = step;
        r.instance = x;
        r.rule_premises = rule.premises();
        r.rule_conclusion = rule.conclusion();
        r.relative_accuracy = relative_accuracy(current, bt, stream);
        r.node_count = current.node_count();
        r.depth = current.depth();
        r.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                           .count();
        records.push_back(std::move(r));
    }

    save_json_file(args.out, to_json(current));
    if (!args.trace_out.empty()) write_trace(args.trace_out, records);

    json manifest{{"bt", args.bt_path}, {"train", args.train},     {"data", args.data},
                  {"out", args.out},    {"ratio", args.ratio},     {"bound", args.bound},
                  {"seed", args.seed},  {"size_rule", args.size_rule}, {"steps", step}};
    if (!args.dt_path.empty()) manifest["dt"] = args.dt_path;
    if (args.max_depth.has_value()) manifest["max_depth"] = *args.max_depth;
    write_manifest(args.out, "retrain-correct", std::move(manifest));

    std::cout << "retraining steps: " << step << "\n"
              << "final relative accuracy: " << relative_accuracy(current, bt, stream) << "\n";
    return 0;
}

// -------------------------------------------------------------- explain ---

struct ExplainArgs {
    std::string model;
    std::string data;
    std::optional<int> index;
    std::string row;
    std::string engine = "auto";
    std::string order = "desc";
    std::uint64_t seed = 0;
    int timeout_ms = 180000;
    std::string out;
};

RawRow parse_inline_row(const std::string& text) {
    RawRow row;
    std::istringstream in(text);
    std::string pair;
    while (std::getline(in, pair, ',')) {
        const auto eq = pair.find('=');
        if (eq == std::string::npos) {
            throw DataError("bad --row entry '" + pair + "', expected attribute=value");
        }
        const std::string key = pair.substr(0, eq);
        const std::string value = pair.substr(eq + 1);
        try {
            std::size_t used = 0;
            const double d = std::stod(value, &used);
            if (used == value.size()) {
                row[key] = d;
                continue;
            }
        } catch (...) {
        }
        row[key] = value;
    }
    return row;
}

int cmd_explain(const ExplainArgs& args) {
    const AnyModel model = load_model_file(args.model);
    const auto cs = conditions_of(model);
    const DomainTheory th = derive_theory(*cs);

    Instance x;
    if (!args.row.empty()) {
        x = binarize(parse_inline_row(args.row), *cs);
    } else if (!args.data.empty() && args.index.has_value()) {
        const RawTable table = load_csv(args.data);
        if (*args.index < 0 || static_cast<std::size_t>(*args.index) >= table.size()) {
            throw DataError("--index " + std::to_string(*args.index) + " out of range (" +
                            std::to_string(table.size()) + " rows)");
        }
        x = binarize(table.row(static_cast<std::size_t>(*args.index)), *cs);
    } else {
        throw DataError("explain needs either --row or --data with --index");
    }

    ExplainOptions opts{parse_deletion_order(args.order), args.seed};
    const auto t0 = std::chrono::steady_clock::now();
    Term reason;
    bool cls = false;
    std::string engine;
    bool timed_out = false;
    if (std::holds_alternative<DecisionTree>(model)) {
        const auto& dt = std::get<DecisionTree>(model);
        cls = classify(dt, x);
        reason = sufficient_reason(dt, x, th, opts);
        engine = "sufficient-reason";
    } else {
        const auto& bt = std::get<BoostedTree>(model);
        cls = classify(bt, x);
        if (args.engine == "exact") {
            auto exact = exact_sufficient_reason(bt, x, th,
                                                 std::chrono::milliseconds(args.timeout_ms), opts);
            engine = "exact-sufficient-reason";
            if (exact.has_value()) {
                reason = *exact;
            } else {
                timed_out = true;
            }
        } else {
            reason = tree_specific_reason(bt, x, th, opts);
            engine = "tree-specific";
        }
    }
    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    json doc{{"instance", x.bits()},
             {"class", cls ? 1 : 0},
             {"engine", engine},
             {"elapsed_ms", elapsed_ms}};
    if (timed_out) {
        doc["timed_out"] = true;
    } else {
        doc["reason"] = signed_literals(reason);
    }
    if (args.out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        save_json_file(args.out, doc);
        json manifest{{"model", args.model}, {"engine", args.engine}, {"order", args.order},
                      {"seed", args.seed},   {"out", args.out}};
        write_manifest(args.out, "explain", std::move(manifest));
    }
    return 0;
}

// ---------------------------------------------------------------- bench ---

struct BenchArgs {
    std::string dataset;
    std::string name;
    int synthetic_rows = 400;
    std::uint64_t synthetic_seed = 7;
    std::string method = "both";
    std::string configs = "default";
    int max_depth = 4;
    std::vector<std::uint64_t> seeds{42};
    int runs = 10;
    int timeout_ms = 10000;
    int latency_instances = 100;
    bool no_latency = false;
    GbtOptions gbt;
    double ratio = 0.01;
    int bound = 100;
    std::string report_dir;
};

int cmd_bench(const BenchArgs& args) {
    RawTable table;
    std::string name = args.name;
    if (args.dataset.empty()) {
        table = synthetic_workload(args.synthetic_rows, args.synthetic_seed);
        if (name.empty()) name = "synthetic";
    } else {
        table = load_csv(args.dataset);
        if (name.empty()) name = std::filesystem::path(args.dataset).stem().string();
    }
    const std::uint64_t split_seed = args.seeds.empty() ? 42 : args.seeds.front();

    std::vector<Method> methods;
    if (args.method == "rectify" || args.method == "both") methods.push_back(Method::Rectify);
    if (args.method == "retrain" || args.method == "both") methods.push_back(Method::Retrain);
    if (methods.empty()) throw DataError("unknown method '" + args.method + "'");

    std::vector<std::optional<int>> depth_configs;
    if (args.configs == "default" || args.configs == "both") depth_configs.push_back(std::nullopt);
    if (args.configs == "optimized" || args.configs == "both") depth_configs.push_back(args.max_depth);
    if (depth_configs.empty()) throw DataError("unknown configs choice '" + args.configs + "'");

    ReportBundle bundle;
    bundle.dataset_name = name;
    const ProtocolResult* latency_source = nullptr;
    for (const auto& depth : depth_configs) {
        for (Method method : methods) {
            ProtocolOptions opts;
            opts.method = method;
            opts.gbt = args.gbt;
            opts.dt_max_depth = depth;
            opts.runs = args.runs;
            opts.retrain.ratio = args.ratio;
            opts.retrain.bound = args.bound;
            bundle.protocols.push_back(run_protocol(table, split_seed, opts));
            const ProtocolResult& added = bundle.protocols.back();
            if (method == Method::Rectify && !latency_source) {
                latency_source = &added;
            }
        }
    }

    if (!args.no_latency && latency_source) {
        const ProtocolResult& p = *latency_source;
        std::vector<Instance> pool = p.train_set.instances();
        for (const auto& x : p.test_set.instances()) pool.push_back(x);
        std::mt19937_64 rng(split_seed ^ 0x9e3779b97f4a7c15ull);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        std::vector<Instance> queries;
        queries.reserve(static_cast<std::size_t>(args.latency_instances));
        for (int i = 0; i < args.latency_instances; ++i) queries.push_back(pool[pick(rng)]);
        bundle.latencies.push_back(run_sr_latency(p.booster, p.final_trees.front(), queries,
                                                  p.theory,
                                                  std::chrono::milliseconds(args.timeout_ms),
                                                  p.mean_compile_s));
    }

    emit_report(bundle, args.report_dir);

    json manifest{{"dataset", args.dataset.empty() ? "synthetic" : args.dataset},
                  {"name", name},
                  {"method", args.method},
                  {"configs", args.configs},
                  {"max_depth", args.max_depth},
                  {"seeds", args.seeds},
                  {"runs", args.runs},
                  {"timeout_ms", args.timeout_ms},
                  {"latency_instances", args.latency_instances},
                  {"rounds", args.gbt.rounds},
                  {"depth", args.gbt.depth},
                  {"learning_rate", args.gbt.learning_rate},
                  {"ratio", args.ratio},
                  {"bound", args.bound}};
    if (args.dataset.empty()) {
        manifest["synthetic_rows"] = args.synthetic_rows;
        manifest["synthetic_seed"] = args.synthetic_seed;
    }
    save_json_file(std::filesystem::path(args.report_dir) / "run_config.json",
                   json{{"subcommand", "bench"}, {"resolved", std::move(manifest)}});
    std::cout << "reports written to " << args.report_dir << "\n";
    return 0;
}

// ----------------------------------------------------------------- diff ---

struct DiffArgs {
    std::string a;
    std::string b;
    bool exhaustive = false;
    int samples = 10000;
    std::uint64_t seed = 42;
    std::string out;
};

int cmd_diff(const DiffArgs& args) {
    const AnyModel model_a = load_model_file(args.a);
    const AnyModel model_b = load_model_file(args.b);
    const auto cs = conditions_of(model_a);
    require_same_space(*cs, *conditions_of(model_b));
    const DomainTheory th = derive_theory(*cs);
    const Classifier ca = std::visit([](const auto& m) { return as_classifier(m); }, model_a);
    const Classifier cb = std::visit([](const auto& m) { return as_classifier(m); }, model_b);

    json doc{{"a", args.a}, {"b", args.b}, {"conditions", cs->size()}};
    if (args.exhaustive && cs->size() <= kEnumerationLimit) {
        FeasibleSpace space = enumerate_instances(cs->size(), th);
        std::vector<Instance> diff = exact_diff(ca, cb, space);
        doc["mode"] = "exhaustive";
        doc["feasible_instances"] = space.instances.size();
        doc["differing"] = diff.size();
        json witnesses = json::array();
        for (std::size_t i = 0; i < diff.size() && i < 20; ++i) witnesses.push_back(diff[i].bits());
        doc["witnesses"] = std::move(witnesses);
    } else {
        // seeded rejection sampling over the feasible space
        std::mt19937_64 rng(args.seed);
        std::bernoulli_distribution coin(0.5);
        int differing = 0, kept = 0;
        json witnesses = json::array();
        long attempts = 0;
        const long max_attempts = 64L * args.samples + 1024;
        while (kept < args.samples && ++attempts < max_attempts) {
            std::vector<std::uint8_t> bits(static_cast<std::size_t>(cs->size()));
            for (auto& b : bits) b = coin(rng) ? 1 : 0;
            Instance x(std::move(bits));
            if (!satisfies(x, th)) continue;
            ++kept;
            if (ca(x) != cb(x)) {
                ++differing;
                if (witnesses.size() < 20) witnesses.push_back(x.bits());
            }
        }
        doc["mode"] = "sampled";
        doc["samples"] = kept;
        doc["differing"] = differing;
        doc["witnesses"] = std::move(witnesses);
    }

    if (args.out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        save_json_file(args.out, doc);
        json manifest{{"a", args.a},           {"b", args.b},     {"exhaustive", args.exhaustive},
                      {"samples", args.samples}, {"seed", args.seed}, {"out", args.out}};
        write_manifest(args.out, "diff", std::move(manifest));
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"rectification-based distillation of boosted trees into decision trees"};
    app.require_subcommand(1);
    app.set_config("--config");

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "learn a decision tree or boosted tree from CSV");
    train->add_option("--kind", train_args.kind, "dt or bt")
        ->required()
        ->check(CLI::IsMember({"dt", "bt"}));
    train->add_option("--data", train_args.data, "training CSV (last column 'label')")->required();
    train->add_option("--out", train_args.out, "model JSON output")->required();
    train->add_option("--conditions", train_args.conditions_from,
                      "model JSON whose condition set defines the feature space");
    train->add_option("--conditions-out", train_args.conditions_out,
                      "also write the condition set as JSON");
    int train_depth = -1;
    train->add_option("--max-depth", train_depth, "depth cap (dt; default: unbounded)");
    train->add_option("--rounds", train_args.gbt.rounds, "boosting rounds (bt)");
    train->add_option("--depth", train_args.gbt.depth, "regression tree depth (bt)");
    train->add_option("--learning-rate", train_args.gbt.learning_rate, "shrinkage (bt)");
    train->add_option("--seed", train_args.seed, "random seed");

    DistillArgs distill_args;
    auto* distill = app.add_subcommand("distill", "correct a decision tree towards a boosted tree");
    distill->add_option("--bt", distill_args.bt_path, "boosted tree JSON")->required();
    distill->add_option("--dt", distill_args.dt_path, "decision tree JSON")->required();
    distill->add_option("--data", distill_args.data, "stream CSV")->required();
    distill->add_option("--out", distill_args.out, "final model JSON")->required();
    distill->add_option("--trace-out", distill_args.trace_out, "JSONL step records");
    distill->add_option("--order", distill_args.order, "stream order: dataset or shuffle")
        ->check(CLI::IsMember({"dataset", "shuffle"}));
    distill->add_option("--seed", distill_args.seed, "shuffle seed");
    int distill_max_steps = -1;
    distill->add_option("--max-steps", distill_max_steps, "stop after this many corrections");
    distill->add_flag("--no-simplify", distill_args.no_simplify, "skip simplification after steps");
    distill->add_option("--explain-order", distill_args.explain_order,
                        "literal deletion order: desc, asc or shuffle")
        ->check(CLI::IsMember({"desc", "asc", "shuffle"}));
    distill->add_option("--explain-seed", distill_args.explain_seed, "deletion shuffle seed");

    RetrainArgs retrain_args;
    auto* retrain = app.add_subcommand("retrain-correct",
                                       "correct a decision tree by retraining on updated data");
    retrain->add_option("--bt", retrain_args.bt_path, "boosted tree JSON")->required();
    retrain->add_option("--dt", retrain_args.dt_path, "initial decision tree JSON (optional)");
    retrain->add_option("--train", retrain_args.train, "training CSV")->required();
    retrain->add_option("--data", retrain_args.data, "stream CSV")->required();
    retrain->add_option("--out", retrain_args.out, "final model JSON")->required();
    retrain->add_option("--trace-out", retrain_args.trace_out, "JSONL step records");
    retrain->add_option("--ratio", retrain_args.ratio, "sample ratio r");
    retrain->add_option("--bound", retrain_args.bound, "sample bound b");
    retrain->add_option("--seed", retrain_args.seed, "sampling seed");
    retrain->add_option("--size-rule", retrain_args.size_rule, "cap or max")
        ->check(CLI::IsMember({"cap", "max"}));
    int retrain_depth = -1;
    retrain->add_option("--max-depth", retrain_depth, "depth cap for retrained trees");
    retrain->add_option("--explain-order", retrain_args.explain_order,
                        "literal deletion order: desc, asc or shuffle")
        ->check(CLI::IsMember({"desc", "asc", "shuffle"}));

    ExplainArgs explain_args;
    auto* explain = app.add_subcommand("explain", "abductive explanation for one instance");
    explain->add_option("--model", explain_args.model, "model JSON")->required();
    explain->add_option("--data", explain_args.data, "CSV to pick the instance from");
    int explain_index = -1;
    explain->add_option("--index", explain_index, "row index into --data");
    explain->add_option("--row", explain_args.row, "inline instance, e.g. S=25,R=1,PP=1");
    explain->add_option("--engine", explain_args.engine, "auto or exact (boosted trees)")
        ->check(CLI::IsMember({"auto", "exact"}));
    explain->add_option("--order", explain_args.order, "literal deletion order")
        ->check(CLI::IsMember({"desc", "asc", "shuffle"}));
    explain->add_option("--seed", explain_args.seed, "deletion shuffle seed");
    explain->add_option("--timeout-ms", explain_args.timeout_ms, "budget for the exact engine");
    explain->add_option("--out", explain_args.out, "write the result JSON here instead of stdout");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "measurement protocol and reports");
    bench->add_option("--dataset", bench_args.dataset, "CSV dataset (default: synthetic)");
    bench->add_option("--name", bench_args.name, "dataset name used in reports");
    bench->add_option("--synthetic-rows", bench_args.synthetic_rows, "rows when synthesizing");
    bench->add_option("--synthetic-seed", bench_args.synthetic_seed, "seed when synthesizing");
    bench->add_option("--method", bench_args.method, "rectify, retrain or both")
        ->check(CLI::IsMember({"rectify", "retrain", "both"}));
    bench->add_option("--configs", bench_args.configs, "default, optimized or both")
        ->check(CLI::IsMember({"default", "optimized", "both"}));
    bench->add_option("--max-depth", bench_args.max_depth, "depth of the optimized configuration");
    bench->add_option("--seeds", bench_args.seeds, "seeds; the first drives the 70/30 split");
    bench->add_option("--runs", bench_args.runs, "number of subsampled initial trees");
    bench->add_option("--timeout-ms", bench_args.timeout_ms, "per-query explanation budget");
    bench->add_option("--latency-instances", bench_args.latency_instances,
                      "instances for the latency comparison");
    bench->add_flag("--no-latency", bench_args.no_latency, "skip the latency stage");
    bench->add_option("--rounds", bench_args.gbt.rounds, "boosting rounds");
    bench->add_option("--depth", bench_args.gbt.depth, "regression tree depth");
    bench->add_option("--learning-rate", bench_args.gbt.learning_rate, "shrinkage");
    bench->add_option("--ratio", bench_args.ratio, "retraining sample ratio r");
    bench->add_option("--bound", bench_args.bound, "retraining sample bound b");
    bench->add_option("--report-dir", bench_args.report_dir, "output directory")->required();

    DiffArgs diff_args;
    auto* diff = app.add_subcommand("diff", "compare two models over the feasible space");
    diff->add_option("--a", diff_args.a, "first model JSON")->required();
    diff->add_option("--b", diff_args.b, "second model JSON")->required();
    diff->add_flag("--exhaustive", diff_args.exhaustive, "enumerate when the space allows it");
    diff->add_option("--samples", diff_args.samples, "sampled comparison size");
    diff->add_option("--seed", diff_args.seed, "sampling seed");
    diff->add_option("--out", diff_args.out, "write the result JSON here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (*train) {
            if (train_depth >= 0) train_args.max_depth = train_depth;
            return cmd_train(train_args);
        }
        if (*distill) {
            if (distill_max_steps >= 0) distill_args.max_steps = distill_max_steps;
            return cmd_distill(distill_args);
        }
        if (*retrain) {
            if (retrain_depth >= 0) retrain_args.max_depth = retrain_depth;
            return cmd_retrain(retrain_args);
        }
        if (*explain) {
            if (explain_index >= 0) explain_args.index = explain_index;
            return cmd_explain(explain_args);
        }
        if (*bench) return cmd_bench(bench_args);
        if (*diff) return cmd_diff(diff_args);
        std::cerr << "no subcommand selected\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> with_program{"rectree"};
    with_program.insert(with_program.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(with_program.size());
    for (const std::string& a : with_program) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace rectree
