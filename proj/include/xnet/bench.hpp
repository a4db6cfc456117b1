#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "xnet/dataset.hpp"
#include "xnet/error.hpp"
#include "xnet/eval.hpp"
#include "xnet/mlp.hpp"
#include "xnet/report.hpp"
#include "xnet/trainer.hpp"

namespace xnet {

struct BenchmarkTask {
    std::string name;
    int input_dim = 1;
    std::vector<std::pair<double, double>> train_range; // per dimension
    std::vector<std::pair<double, double>> test_range;  // superset per dimension
    int train_points = 100;
    int test_points = 500;
    std::function<double(const std::vector<double>&)> ground_truth;
};

// The twelve benchmark curves. Domain-restricted tasks (log, sqrt, power)
// train on [0,2]-style ranges; everything else uses [-2,2] train and [-5,5]
// test per dimension.
inline std::vector<BenchmarkTask> nguyen_suite()
{
    auto rng1 = std::vector<std::pair<double, double>>{{-2.0, 2.0}};
    auto rng1_test = std::vector<std::pair<double, double>>{{-5.0, 5.0}};
    auto rng2 = std::vector<std::pair<double, double>>{{-2.0, 2.0}, {-2.0, 2.0}};
    auto rng2_test = std::vector<std::pair<double, double>>{{-5.0, 5.0}, {-5.0, 5.0}};
    auto pos1 = std::vector<std::pair<double, double>>{{0.0, 2.0}};
    auto pos1_test = std::vector<std::pair<double, double>>{{0.0, 5.0}};

    std::vector<BenchmarkTask> tasks;
    auto add = [&](std::string name, int dim, auto fn,
                   std::vector<std::pair<double, double>> tr,
                   std::vector<std::pair<double, double>> te) {
        BenchmarkTask t;
        t.name = std::move(name);
        t.input_dim = dim;
        t.train_range = std::move(tr);
        t.test_range = std::move(te);
        t.ground_truth = fn;
        tasks.push_back(std::move(t));
    };

    add("nguyen-1", 1,
        [](const std::vector<double>& v) {
            double x = v[0];
            return x * x * x + x * x + x;
        },
        rng1, rng1_test);
    add("nguyen-2", 1,
        [](const std::vector<double>& v) {
            double x = v[0];
            return x * x * x * x + x * x * x + x * x + x;
        },
        rng1, rng1_test);
    add("nguyen-3", 1,
        [](const std::vector<double>& v) {
            double x = v[0];
            return std::pow(x, 5) + std::pow(x, 4) + x * x * x + x * x + x;
        },
        rng1, rng1_test);
    add("nguyen-4", 1,
        [](const std::vector<double>& v) {
            double x = v[0];
            return std::pow(x, 6) + std::pow(x, 5) + std::pow(x, 4) + x * x * x + x * x + x;
        },
        rng1, rng1_test);
    add("nguyen-5", 1,
        [](const std::vector<double>& v) {
            double x = v[0];
            return std::sin(x * x) * std::cos(x) - 1.0;
        },
        rng1, rng1_test);
    add("nguyen-6", 1,
        [](const std::vector<double>& v) {
            double x = v[0];
            return std::sin(x) + std::sin(x + x * x);
        },
        rng1, rng1_test);
    add("nguyen-7", 1,
        [](const std::vector<double>& v) {
            double x = v[0];
            return std::log(x + 1.0) + std::log(x * x + 1.0);
        },
        pos1, pos1_test);
    add("nguyen-8", 1, [](const std::vector<double>& v) { return std::sqrt(v[0]); }, pos1,
        pos1_test);
    add("nguyen-9", 2,
        [](const std::vector<double>& v) { return std::sin(v[0]) + std::sin(v[1] * v[1]); },
        rng2, rng2_test);
    add("nguyen-10", 2,
        [](const std::vector<double>& v) { return 2.0 * std::sin(v[0]) * std::cos(v[1]); }, rng2,
        rng2_test);
    add("nguyen-11", 2, [](const std::vector<double>& v) { return std::pow(v[0], v[1]); },
        {{0.1, 2.0}, {0.0, 2.0}}, {{0.1, 5.0}, {0.0, 5.0}});
    add("nguyen-12", 2,
        [](const std::vector<double>& v) {
            double a = v[0], b = v[1];
            return std::pow(a, 4) - a * a * a + 0.5 * b * b - b;
        },
        rng2, rng2_test);
    return tasks;
}

inline const BenchmarkTask& find_task(const std::vector<BenchmarkTask>& suite,
                                      const std::string& name)
{
    for (const auto& t : suite)
        if (t.name == name)
            return t;
    throw InvalidInput("unknown benchmark task '" + name + "'");
}

enum class SampleKind { Train, Test };

namespace detail {

inline bool inside_box(const std::vector<double>& x,
                       const std::vector<std::pair<double, double>>& box)
{
    for (std::size_t j = 0; j < box.size(); ++j)
        if (x[j] < box[j].first || x[j] > box[j].second)
            return false;
    return true;
}

inline std::vector<double> uniform_point(const std::vector<std::pair<double, double>>& box,
                                         std::mt19937_64& rng)
{
    std::vector<double> x(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) {
        std::uniform_real_distribution<double> u(box[j].first, box[j].second);
        x[j] = u(rng);
    }
    return x;
}

} // namespace detail

// Train: uniform points in the train box. Test: stratified halves — the
// first half uniform inside the train box, the second uniform over the test
// box but strictly outside the train box (at least one coordinate out).
inline Dataset sample_task(const BenchmarkTask& task, SampleKind which, std::mt19937_64& rng)
{
    Dataset ds;
    ds.provenance = task.name;
    ds.target_name = "y";
    for (int j = 0; j < task.input_dim; ++j)
        ds.feature_names.push_back("x" + std::to_string(j + 1));

    auto push = [&](std::vector<double> x) {
        ds.y.push_back(task.ground_truth(x));
        ds.x.push_back(std::move(x));
    };

    if (which == SampleKind::Train) {
        for (int i = 0; i < task.train_points; ++i)
            push(detail::uniform_point(task.train_range, rng));
        return ds;
    }
    int in_n = task.test_points / 2;
    int out_n = task.test_points - in_n;
    for (int i = 0; i < in_n; ++i)
        push(detail::uniform_point(task.train_range, rng));
    int produced = 0;
    while (produced < out_n) {
        auto x = detail::uniform_point(task.test_range, rng);
        if (detail::inside_box(x, task.train_range))
            continue;
        push(std::move(x));
        ++produced;
    }
    return ds;
}

// In-range / out-of-range fit quality of a trained model on fresh samples.
// Out-of-range points lie strictly outside the train box.
inline std::pair<double, double> evaluate_extrapolation(const RunReport& report,
                                                        const BenchmarkTask& task,
                                                        unsigned long long seed = 9001,
                                                        const NumericLimits& lim = {})
{
    std::mt19937_64 rng(seed);
    Dataset test = sample_task(task, SampleKind::Test, rng);
    std::vector<double> y_in, yhat_in, y_out, yhat_out;
    for (std::size_t i = 0; i < test.n(); ++i) {
        double pred = predict(report.best_tree, test.x[i], lim);
        if (detail::inside_box(test.x[i], task.train_range)) {
            y_in.push_back(test.y[i]);
            yhat_in.push_back(pred);
        } else {
            y_out.push_back(test.y[i]);
            yhat_out.push_back(pred);
        }
    }
    return {r_squared(y_in, yhat_in), r_squared(y_out, yhat_out)};
}

struct BenchConfig {
    TrainConfig train;
    int seeds = 10;
    unsigned long long base_seed = 0;
    int train_points = 100;
    int test_points = 500;
    std::string output_dir = ".";
    std::vector<std::string> only_tasks; // empty = whole suite
    MlpSpec mlp_proto;                   // layer_sizes filled per task/width
    std::vector<int> mlp_hidden = default_hidden_sweep();
};

// One CSV/JSON row of a table run.
struct BenchRow {
    std::string task;
    std::string method;
    unsigned long long seed = 0;
    double r2_in = 0.0;
    double r2_out = 0.0;
    int nodes = 0;
    int params = 0;
    int epochs = 0;
    double seconds = 0.0;
    std::string error; // empty on success
};

namespace detail {

inline unsigned long long mix_seed(unsigned long long base, unsigned long long task,
                                   unsigned long long seed, unsigned long long stream)
{
    // splitmix64 over a packed key; stable across platforms.
    unsigned long long z = base + 0x9e3779b97f4a7c15ULL * (task * 1315423911ULL + seed * 2654435761ULL + stream + 1ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline ordered_json row_json(const BenchRow& r)
{
    ordered_json j;
    j["task"] = r.task;
    j["method"] = r.method;
    j["seed"] = r.seed;
    j["r2_in"] = r.r2_in;
    j["r2_out"] = r.r2_out;
    j["nodes"] = r.nodes;
    j["params"] = r.params;
    j["epochs"] = r.epochs;
    if (!r.error.empty())
        j["error"] = r.error;
    return j;
}

inline void append_stats(ordered_json& block, const std::vector<BenchRow>& rows)
{
    auto stat = [&](auto get) {
        double mean = 0.0;
        int n = 0;
        for (const auto& r : rows)
            if (r.error.empty()) {
                mean += get(r);
                ++n;
            }
        if (n == 0)
            return std::make_pair(0.0, 0.0);
        mean /= n;
        double var = 0.0;
        for (const auto& r : rows)
            if (r.error.empty()) {
                double d = get(r) - mean;
                var += d * d;
            }
        return std::make_pair(mean, std::sqrt(var / n));
    };
    auto [m_in, s_in] = stat([](const BenchRow& r) { return r.r2_in; });
    auto [m_out, s_out] = stat([](const BenchRow& r) { return r.r2_out; });
    auto [m_nodes, s_nodes] = stat([](const BenchRow& r) { return double(r.nodes); });
    auto [m_params, s_params] = stat([](const BenchRow& r) { return double(r.params); });
    block["mean"] = {{"r2_in", m_in}, {"r2_out", m_out}, {"nodes", m_nodes}, {"params", m_params}};
    block["std"] = {{"r2_in", s_in}, {"r2_out", s_out}, {"nodes", s_nodes}, {"params", s_params}};
}

// No timing column: emitted files must be byte-identical across runs with
// the same inputs.
inline void write_csv(const std::string& path, const std::vector<BenchRow>& rows)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io::FileNotFound("cannot open '" + path + "' for writing");
    out << "task,method,seed,r2_in,r2_out,nodes,params,epochs\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        return std::string(buf);
    };
    for (const auto& r : rows) {
        out << r.task << ',' << r.method << ',' << r.seed << ',' << num(r.r2_in) << ','
            << num(r.r2_out) << ',' << r.nodes << ',' << r.params << ',' << r.epochs << '\n';
    }
}

inline std::vector<BenchmarkTask> pick_tasks(const BenchConfig& cfg)
{
    auto suite = nguyen_suite();
    for (auto& t : suite) {
        t.train_points = cfg.train_points;
        t.test_points = cfg.test_points;
    }
    if (cfg.only_tasks.empty())
        return suite;
    std::vector<BenchmarkTask> out;
    for (const auto& name : cfg.only_tasks)
        out.push_back(find_task(suite, name));
    return out;
}

inline ordered_json assemble_doc(const BenchConfig& cfg, const std::string& table,
                                 const std::vector<std::string>& methods,
                                 const std::vector<BenchmarkTask>& tasks,
                                 const std::vector<BenchRow>& rows)
{
    ordered_json doc;
    doc["table"] = table;
    doc["seeds"] = cfg.seeds;
    doc["config"] = train_config_json(cfg.train);
    doc["config"]["train_points"] = cfg.train_points;
    doc["config"]["test_points"] = cfg.test_points;
    ordered_json jt = ordered_json::array();
    for (const auto& task : tasks) {
        ordered_json tj;
        tj["task"] = task.name;
        for (const auto& m : methods) {
            std::vector<BenchRow> cell;
            for (const auto& r : rows)
                if (r.task == task.name && r.method == m)
                    cell.push_back(r);
            ordered_json mj;
            ordered_json rj = ordered_json::array();
            for (const auto& r : cell)
                rj.push_back(row_json(r));
            mj["rows"] = rj;
            append_stats(mj, cell);
            tj[m] = mj;
        }
        jt.push_back(tj);
    }
    doc["tasks"] = jt;
    return doc;
}

inline void write_outputs(const BenchConfig& cfg, const std::string& table,
                          const ordered_json& doc, const std::vector<BenchRow>& rows)
{
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream j(cfg.output_dir + "/" + table + ".json", std::ios::binary);
    if (!j)
        throw io::FileNotFound("cannot write into '" + cfg.output_dir + "'");
    j << doc.dump(2) << '\n';
    write_csv(cfg.output_dir + "/" + table + ".csv", rows);
}

} // namespace detail

// Extrapolation table: standard and parameter-free runs per task and seed,
// scored in and out of the training range. Writes table1.json/table1.csv.
inline ordered_json run_table1(const BenchConfig& cfg)
{
    auto tasks = detail::pick_tasks(cfg);
    std::vector<BenchRow> rows;
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        const auto& task = tasks[ti];
        for (int s = 0; s < cfg.seeds; ++s) {
            for (const char* method : {"xnet", "xnet-noparam"}) {
                BenchRow row;
                row.task = task.name;
                row.method = method;
                row.seed = static_cast<unsigned long long>(s);
                try {
                    std::mt19937_64 sample_rng(
                        detail::mix_seed(cfg.base_seed, ti, static_cast<unsigned long long>(s), 0));
                    Dataset train_ds = sample_task(task, SampleKind::Train, sample_rng);
                    TrainConfig tc = cfg.train;
                    tc.no_parameter_mode = std::string(method) == "xnet-noparam";
                    tc.seed = detail::mix_seed(cfg.base_seed, ti, static_cast<unsigned long long>(s), 1);
                    RunReport rep = train(train_ds, tc);
                    auto [r2_in, r2_out] = evaluate_extrapolation(
                        rep, task,
                        detail::mix_seed(cfg.base_seed, ti, static_cast<unsigned long long>(s), 2),
                        cfg.train.limits);
                    row.r2_in = r2_in;
                    row.r2_out = r2_out;
                    row.nodes = rep.operator_nodes;
                    row.params = rep.parameters;
                    row.epochs = rep.epochs_used;
                    row.seconds = rep.wall_time_seconds;
                } catch (const std::exception& e) {
                    row.error = e.what();
                }
                rows.push_back(std::move(row));
            }
        }
    }
    auto doc = detail::assemble_doc(cfg, "table1", {"xnet", "xnet-noparam"}, tasks, rows);
    detail::write_outputs(cfg, "table1", doc, rows);
    return doc;
}

// Complexity table: recovered-structure size versus the smallest baseline
// network reaching the same fit target. Writes table2.json/table2.csv.
inline ordered_json run_table2(const BenchConfig& cfg)
{
    auto tasks = detail::pick_tasks(cfg);
    std::vector<BenchRow> rows;
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        const auto& task = tasks[ti];
        for (int s = 0; s < cfg.seeds; ++s) {
            std::mt19937_64 sample_rng(
                detail::mix_seed(cfg.base_seed, ti, static_cast<unsigned long long>(s), 0));
            Dataset train_ds = sample_task(task, SampleKind::Train, sample_rng);

            BenchRow xrow;
            xrow.task = task.name;
            xrow.method = "xnet";
            xrow.seed = static_cast<unsigned long long>(s);
            try {
                TrainConfig tc = cfg.train;
                tc.seed = detail::mix_seed(cfg.base_seed, ti, static_cast<unsigned long long>(s), 1);
                RunReport rep = train(train_ds, tc);
                xrow.r2_in = rep.r2_train;
                xrow.nodes = rep.operator_nodes;
                xrow.params = rep.parameters;
                xrow.epochs = rep.epochs_used;
                xrow.seconds = rep.wall_time_seconds;
            } catch (const std::exception& e) {
                xrow.error = e.what();
            }
            rows.push_back(std::move(xrow));

            BenchRow mrow;
            mrow.task = task.name;
            mrow.method = "mlp";
            mrow.seed = static_cast<unsigned long long>(s);
            try {
                auto t0 = std::chrono::steady_clock::now();
                MlpSpec proto = cfg.mlp_proto;
                proto.seed = detail::mix_seed(cfg.base_seed, ti, static_cast<unsigned long long>(s), 3);
                MlpSweepResult sw = mlp_sweep(train_ds, cfg.mlp_hidden, proto);
                const MlpResult& chosen = sw.found ? sw.result : sw.attempts.back();
                mrow.r2_in = chosen.r2_train;
                mrow.nodes = chosen.hidden_nodes;
                mrow.params = chosen.param_count;
                mrow.epochs = chosen.epochs_used;
                mrow.seconds =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (!sw.found)
                    mrow.error = "no swept width reached the fit target";
            } catch (const std::exception& e) {
                mrow.error = e.what();
            }
            rows.push_back(std::move(mrow));
        }
    }
    auto doc = detail::assemble_doc(cfg, "table2", {"xnet", "mlp"}, tasks, rows);
    detail::write_outputs(cfg, "table2", doc, rows);
    return doc;
}

} // namespace xnet
