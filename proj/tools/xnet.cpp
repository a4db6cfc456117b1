// Command-line front end: benchmark training, table sweeps, CSV fitting,
// classification, model evaluation and formula export.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "xnet/xnet.hpp"

namespace fs = std::filesystem;
using namespace xnet;

namespace {

struct CommonArgs {
    std::string config_file;
    std::vector<std::string> overrides;
    std::string output_dir = ".";
    std::string seed_text;
};

void attach_common(CLI::App* cmd, CommonArgs& c)
{
    cmd->add_option("--config", c.config_file, "key=value config file, applied first");
    cmd->add_option("--set", c.overrides, "extra key=value override (repeatable)")
        ->type_size(1)
        ->take_all();
    cmd->add_option("--output-dir", c.output_dir, "directory for reports and models");
    cmd->add_option("--seed", c.seed_text, "run seed (default: XNET_SEED env, then 0)");
}

// Precedence: --seed flag > config file / --set > XNET_SEED > 0.
Settings build_settings(const CommonArgs& c)
{
    Settings s;
    bool seed_configured = false;
    if (!c.config_file.empty()) {
        for (const auto& [k, v] : read_config_file(c.config_file)) {
            apply_setting(s, k, v);
            if (k == "seed")
                seed_configured = true;
        }
    }
    for (const std::string& kv : c.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + kv + "'");
        std::string key = kv.substr(0, eq);
        apply_setting(s, key, kv.substr(eq + 1));
        if (key == "seed")
            seed_configured = true;
    }
    if (!c.seed_text.empty())
        apply_setting(s, "seed", c.seed_text);
    else if (!seed_configured)
        if (const char* env = std::getenv("XNET_SEED"))
            apply_setting(s, "seed", env);
    return s;
}

void write_json(const std::string& dir, const std::string& name, const ordered_json& doc)
{
    fs::create_directories(dir);
    std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io::FileNotFound("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

void print_run_line(const std::string& label, const RunReport& rep)
{
    std::printf("%s seed=%llu r2_train=%.6f", label.c_str(), rep.seed, rep.r2_train);
    if (rep.r2_test)
        std::printf(" r2_test=%.6f", *rep.r2_test);
    std::printf(" nodes=%d params=%d epochs=%d time=%.2fs formula=%s\n", rep.operator_nodes,
                rep.parameters, rep.epochs_used, rep.wall_time_seconds, rep.formula.c_str());
}

int run_train(const CommonArgs& common, const std::string& task_name, bool no_params)
{
    Settings s = build_settings(common);
    if (no_params)
        s.train.no_parameter_mode = true;

    auto suite = nguyen_suite();
    std::size_t index = 0;
    while (index < suite.size() && suite[index].name != task_name)
        ++index;
    BenchmarkTask task = find_task(suite, task_name);
    task.train_points = s.train_points;
    task.test_points = s.test_points;

    std::mt19937_64 sample_rng(xnet::detail::mix_seed(s.train.seed, index, 0, 0));
    Dataset train_ds = sample_task(task, SampleKind::Train, sample_rng);
    RunReport rep = train(train_ds, s.train);
    auto [r2_in, r2_out] =
        evaluate_extrapolation(rep, task, xnet::detail::mix_seed(s.train.seed, index, 0, 2),
                               s.train.limits);

    ordered_json doc = run_report_json(rep, s.train);
    doc["task"] = task.name;
    doc["train_points"] = task.train_points;
    doc["test_points"] = task.test_points;
    doc["r2_in_range"] = r2_in;
    doc["r2_out_of_range"] = r2_out;
    write_json(common.output_dir,
               "train_" + task.name + "_seed" + std::to_string(s.train.seed) + ".json", doc);

    std::printf("%s seed=%llu r2_train=%.6f r2_in=%.6f r2_out=%.6f nodes=%d params=%d epochs=%d "
                "time=%.2fs formula=%s\n",
                task.name.c_str(), rep.seed, rep.r2_train, r2_in, r2_out, rep.operator_nodes,
                rep.parameters, rep.epochs_used, rep.wall_time_seconds, rep.formula.c_str());
    return 0;
}

void print_table_summary(const ordered_json& doc, const std::vector<std::string>& methods)
{
    for (const auto& tj : doc["tasks"]) {
        for (const auto& m : methods) {
            const auto& mean = tj[m]["mean"];
            const auto& sd = tj[m]["std"];
            std::printf("%-10s %-12s r2_in=%.3f sd=%.3f r2_out=%.3f sd=%.3f nodes=%.1f "
                        "params=%.1f\n",
                        tj["task"].get<std::string>().c_str(), m.c_str(),
                        mean["r2_in"].get<double>(), sd["r2_in"].get<double>(),
                        mean["r2_out"].get<double>(), sd["r2_out"].get<double>(),
                        mean["nodes"].get<double>(), mean["params"].get<double>());
        }
    }
}

int run_bench(const CommonArgs& common, const std::vector<std::string>& tasks, int table)
{
    Settings s = build_settings(common);
    BenchConfig bc = s.bench(common.output_dir);
    bc.only_tasks = tasks;
    if (table == 1) {
        ordered_json doc = run_table1(bc);
        print_table_summary(doc, {"xnet", "xnet-noparam"});
        std::printf("wrote %s/table1.json and table1.csv\n", common.output_dir.c_str());
    } else {
        ordered_json doc = run_table2(bc);
        print_table_summary(doc, {"xnet", "mlp"});
        std::printf("wrote %s/table2.json and table2.csv\n", common.output_dir.c_str());
    }
    return 0;
}

struct FitCsvArgs {
    std::string file;
    std::string target;
    std::vector<std::string> features;
    double split_fraction = -1.0;  // unset -> settings default
    std::string split_mode;        // unset -> settings default
    std::string standardize;       // unset -> settings default
    bool no_params = false;
};

int run_fit_csv(const CommonArgs& common, const FitCsvArgs& a)
{
    Settings s = build_settings(common);
    if (a.no_params)
        s.train.no_parameter_mode = true;
    if (a.split_fraction > 0.0)
        s.split_fraction = a.split_fraction;
    if (!a.split_mode.empty())
        apply_setting(s, "split_mode", a.split_mode);
    if (!a.standardize.empty())
        apply_setting(s, "standardize", a.standardize);

    Dataset ds = load_csv(a.file, a.target, a.features);
    SplitMode mode =
        s.split_mode == "chronological" ? SplitMode::Chronological : SplitMode::Random;
    auto [train_ds, test_ds] = split(ds, s.split_fraction, mode, s.train.seed);

    StandardizeTransform xform;
    if (s.standardize_features)
        xform = standardize(train_ds, test_ds);

    RunReport rep = train(train_ds, s.train);
    std::string r2_test_error;
    try {
        rep.r2_test = r_squared(test_ds.y, predict_all(rep.best_tree, test_ds.x, s.train.limits));
    } catch (const UndefinedDenominator& e) {
        r2_test_error = e.what();
    }

    // Models are exported in raw feature units regardless of training scale.
    ExprTree raw_tree = rep.best_tree.clone();
    if (s.standardize_features)
        unstandardize_tree(raw_tree, xform);

    std::string stem = fs::path(a.file).stem().string();
    std::string base = "fit_" + stem + "_seed" + std::to_string(s.train.seed);
    fs::create_directories(common.output_dir);
    save_model(raw_tree, common.output_dir + "/" + base + ".xnet");

    ordered_json doc = run_report_json(rep, s.train);
    doc["dataset"] = {{"path", ds.provenance},
                      {"target", ds.target_name},
                      {"features", ds.feature_names},
                      {"rows_train", train_ds.n()},
                      {"rows_test", test_ds.n()},
                      {"rows_dropped", ds.rows_dropped},
                      {"split", s.split_fraction},
                      {"split_mode", s.split_mode},
                      {"standardize", s.standardize_features}};
    if (!r2_test_error.empty())
        doc["r2_test_error"] = r2_test_error;
    doc["formula_raw_units"] = to_formula(raw_tree);
    doc["formula_raw_units_full_precision"] = to_formula(raw_tree, kFullPrecision);
    doc["model_raw_units"] = encode_model(raw_tree);
    write_json(common.output_dir, base + ".json", doc);

    rep.formula = to_formula(raw_tree);
    print_run_line("fit-csv " + stem, rep);
    return 0;
}

int run_classify(const CommonArgs& common, const std::string& file, const std::string& target,
                 int classes, double fraction)
{
    Settings s = build_settings(common);
    Dataset ds = load_csv(file, target);
    int k = classes;
    if (k == 0) {
        double top = 0.0;
        for (double v : ds.y)
            top = std::max(top, v);
        k = static_cast<int>(std::llround(top)) + 1;
    }
    double frac = fraction > 0.0 ? fraction : s.split_fraction;
    ClassifierReport rep = train_classifier(ds, k, s.train, frac);

    std::string stem = fs::path(file).stem().string();
    ordered_json doc = classifier_report_json(rep, s.train);
    doc["dataset"] = {{"path", ds.provenance},
                      {"target", ds.target_name},
                      {"rows", ds.n()},
                      {"rows_dropped", ds.rows_dropped},
                      {"split", frac}};
    write_json(common.output_dir,
               "classify_" + stem + "_seed" + std::to_string(s.train.seed) + ".json", doc);

    std::printf("classify %s accuracy=%.4f classes=%d nodes=%d params=%d time=%.2fs\n",
                stem.c_str(), rep.accuracy, rep.n_classes, rep.operator_nodes_total,
                rep.parameters_total, rep.wall_time_seconds);
    return 0;
}

int run_eval(const std::string& model_path, const std::string& data_path,
             const std::string& target, const std::vector<std::string>& features)
{
    ExprTree tree = load_model(model_path);
    Dataset ds = load_csv(data_path, target, features);
    if (static_cast<int>(ds.d()) < tree.input_dim)
        throw InvalidInput("model expects " + std::to_string(tree.input_dim) +
                           " features, data has " + std::to_string(ds.d()));
    double r2 = r_squared(ds.y, predict_all(tree, ds.x));
    std::printf("r2=%.6f n=%zu model=%s\n", r2, ds.n(), model_path.c_str());
    return 0;
}

int run_export(const std::string& model_path, int precision)
{
    ExprTree tree = load_model(model_path);
    std::printf("%s\n", to_formula(tree, precision).c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Symbolic regression via expression networks with learned activations"};
    app.require_subcommand(1);

    CommonArgs common;

    auto* train_cmd = app.add_subcommand("train", "fit one benchmark task");
    std::string task_name;
    bool train_no_params = false;
    train_cmd->add_option("--task", task_name, "benchmark task, e.g. nguyen-1")->required();
    train_cmd->add_flag("--no-params", train_no_params, "freeze every (w, b) at (1, 0)");
    attach_common(train_cmd, common);

    auto* t1_cmd = app.add_subcommand("bench-table1", "extrapolation sweep over the suite");
    auto* t2_cmd = app.add_subcommand("bench-table2", "complexity sweep versus an mlp baseline");
    std::vector<std::string> bench_tasks;
    for (auto* cmd : {t1_cmd, t2_cmd}) {
        cmd->add_option("--tasks", bench_tasks, "comma-separated subset of the suite")
            ->delimiter(',');
        attach_common(cmd, common);
    }

    auto* fit_cmd = app.add_subcommand("fit-csv", "fit a regression CSV");
    FitCsvArgs fit;
    fit_cmd->add_option("file", fit.file, "input CSV with a header row")->required();
    fit_cmd->add_option("--target", fit.target, "target column name or 0-based index")
        ->required();
    fit_cmd->add_option("--features", fit.features, "comma-separated feature subset")
        ->delimiter(',');
    fit_cmd->add_option("--split", fit.split_fraction, "train fraction in (0, 1)");
    fit_cmd->add_option("--split-mode", fit.split_mode, "random|chronological");
    fit_cmd->add_option("--standardize", fit.standardize, "on|off feature standardization");
    fit_cmd->add_flag("--no-params", fit.no_params, "freeze every (w, b) at (1, 0)");
    attach_common(fit_cmd, common);

    auto* cls_cmd = app.add_subcommand("classify", "one-tree-per-class classification");
    std::string cls_file, cls_target;
    int cls_classes = 0;
    double cls_split = -1.0;
    cls_cmd->add_option("file", cls_file, "input CSV with integer labels")->required();
    cls_cmd->add_option("--target", cls_target, "label column")->required();
    cls_cmd->add_option("--classes", cls_classes, "class count (default: max label + 1)");
    cls_cmd->add_option("--split", cls_split, "train fraction (default from config)");
    attach_common(cls_cmd, common);

    auto* eval_cmd = app.add_subcommand("eval", "score a saved model on a CSV");
    std::string eval_model, eval_data, eval_target = "y";
    std::vector<std::string> eval_features;
    eval_cmd->add_option("--model", eval_model, "saved .xnet model")->required();
    eval_cmd->add_option("--data", eval_data, "CSV to score")->required();
    eval_cmd->add_option("--target", eval_target, "target column (default y)");
    eval_cmd->add_option("--features", eval_features, "comma-separated feature subset")
        ->delimiter(',');

    auto* export_cmd = app.add_subcommand("export", "print a saved model as a formula");
    std::string export_model;
    int export_precision = 2;
    export_cmd->add_option("--model", export_model, "saved .xnet model")->required();
    export_cmd->add_option("--precision", export_precision,
                           "constant digits; -1 for full precision");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e); // --help and friends
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (train_cmd->parsed())
            return run_train(common, task_name, train_no_params);
        if (t1_cmd->parsed())
            return run_bench(common, bench_tasks, 1);
        if (t2_cmd->parsed())
            return run_bench(common, bench_tasks, 2);
        if (fit_cmd->parsed())
            return run_fit_csv(common, fit);
        if (cls_cmd->parsed())
            return run_classify(common, cls_file, cls_target, cls_classes, cls_split);
        if (eval_cmd->parsed())
            return run_eval(eval_model, eval_data, eval_target, eval_features);
        if (export_cmd->parsed())
            return run_export(export_model, export_precision);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
