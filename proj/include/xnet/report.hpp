#pragma once

#include <string>

#include "json.hpp"

#include "xnet/model_io.hpp"
#include "xnet/trainer.hpp"

namespace xnet {

using ordered_json = nlohmann::ordered_json;

// Every tunable surfaced in one echo block so emitted reports are
// self-describing.
inline ordered_json train_config_json(const TrainConfig& cfg)
{
    ordered_json j;
    j["max_epochs"] = cfg.max_epochs;
    j["target_r2"] = cfg.target_r2;
    j["restarts"] = cfg.restarts;
    j["no_parameter_mode"] = cfg.no_parameter_mode;
    j["micro_iterations"] = cfg.micro_iterations;
    j["ite"] = cfg.selection.ite;
    j["accept_threshold"] = cfg.selection.accept_threshold;
    j["stagnation_limit"] = cfg.selection.stagnation_limit;
    j["max_depth"] = cfg.selection.max_depth;
    j["a"] = cfg.step.a;
    j["alpha_fixed"] = cfg.step.alpha_fixed;
    j["ada_enabled"] = cfg.step.ada_enabled;
    j["v_max"] = cfg.limits.v_max;
    j["g_max"] = cfg.limits.g_max;
    j["g_min"] = cfg.limits.g_min;
    j["div_eps"] = cfg.limits.div_eps;
    j["domain_eps"] = cfg.limits.domain_eps;
    j["seed"] = cfg.seed;
    return j;
}

inline ordered_json run_report_json(const RunReport& rep, const TrainConfig& cfg)
{
    ordered_json j;
    j["r2_train"] = rep.r2_train;
    if (rep.r2_test)
        j["r2_test"] = *rep.r2_test;
    else
        j["r2_test"] = nullptr;
    j["mse_train"] = rep.mse_train;
    j["operator_nodes"] = rep.operator_nodes;
    j["parameters"] = rep.parameters;
    j["epochs_used"] = rep.epochs_used;
    j["formula"] = rep.formula;
    j["formula_full_precision"] = to_formula(rep.best_tree, kFullPrecision);
    j["model"] = encode_model(rep.best_tree);
    j["seed"] = rep.seed;
    j["restarts_used"] = rep.restarts_used;
    j["no_parameter_mode"] = rep.no_parameter_mode;
    // Wall time stays out of emitted reports: identical inputs must produce
    // byte-identical JSON. Timings go to the console summary instead.
    j["config"] = train_config_json(cfg);
    return j;
}

inline ordered_json classifier_report_json(const ClassifierReport& rep, const TrainConfig& cfg)
{
    ordered_json j;
    j["accuracy"] = rep.accuracy;
    j["n_classes"] = rep.n_classes;
    j["operator_nodes_total"] = rep.operator_nodes_total;
    j["parameters_total"] = rep.parameters_total;
    ordered_json classes = ordered_json::array();
    for (const auto& r : rep.per_class) {
        ordered_json c;
        c["r2_train"] = r.r2_train;
        c["formula"] = r.formula;
        c["operator_nodes"] = r.operator_nodes;
        c["parameters"] = r.parameters;
        c["epochs_used"] = r.epochs_used;
        c["model"] = encode_model(r.best_tree);
        classes.push_back(c);
    }
    j["classes"] = classes;
    j["config"] = train_config_json(cfg);
    return j;
}

} // namespace xnet
