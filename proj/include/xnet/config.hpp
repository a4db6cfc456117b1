#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "xnet/bench.hpp"
#include "xnet/error.hpp"
#include "xnet/trainer.hpp"

namespace xnet {

// Everything tunable from the command line or a key=value config file.
struct Settings {
    TrainConfig train;
    int train_points = 100;
    int test_points = 500;
    int seeds = 10;
    double split_fraction = 0.75;
    std::string split_mode = "random";
    bool standardize_features = true;
    double mlp_learning_rate = 0.005;
    int mlp_epochs = 10000;

    BenchConfig bench(const std::string& output_dir) const
    {
        BenchConfig b;
        b.train = train;
        b.seeds = seeds;
        b.base_seed = train.seed;
        b.train_points = train_points;
        b.test_points = test_points;
        b.output_dir = output_dir;
        b.mlp_proto.learning_rate = mlp_learning_rate;
        b.mlp_proto.epochs = mlp_epochs;
        return b;
    }
};

namespace detail {

inline bool parse_bool(const std::string& v, const std::string& key)
{
    if (v == "1" || v == "true" || v == "on" || v == "yes")
        return true;
    if (v == "0" || v == "false" || v == "off" || v == "no")
        return false;
    throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a flag");
}

inline double parse_real(const std::string& v, const std::string& key)
{
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size())
            throw ConfigError("");
        return d;
    } catch (...) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as a number");
    }
}

inline long long parse_int(const std::string& v, const std::string& key)
{
    try {
        std::size_t used = 0;
        long long d = std::stoll(v, &used);
        if (used != v.size())
            throw ConfigError("");
        return d;
    } catch (...) {
        throw ConfigError("key '" + key + "': cannot parse '" + v + "' as an integer");
    }
}

} // namespace detail

// Apply one key=value override. Unknown keys are hard errors so typos never
// pass silently.
inline void apply_setting(Settings& s, const std::string& key, const std::string& value)
{
    using detail::parse_bool;
    using detail::parse_int;
    using detail::parse_real;
    if (key == "max_epochs")
        s.train.max_epochs = static_cast<int>(parse_int(value, key));
    else if (key == "target_r2")
        s.train.target_r2 = parse_real(value, key);
    else if (key == "restarts")
        s.train.restarts = static_cast<int>(parse_int(value, key));
    else if (key == "micro_iterations")
        s.train.micro_iterations = static_cast<int>(parse_int(value, key));
    else if (key == "no_parameter_mode")
        s.train.no_parameter_mode = parse_bool(value, key);
    else if (key == "ite")
        s.train.selection.ite = static_cast<int>(parse_int(value, key));
    else if (key == "accept_threshold")
        s.train.selection.accept_threshold = parse_real(value, key);
    else if (key == "stagnation_limit")
        s.train.selection.stagnation_limit = static_cast<int>(parse_int(value, key));
    else if (key == "max_depth")
        s.train.selection.max_depth = static_cast<int>(parse_int(value, key));
    else if (key == "a")
        s.train.step.a = parse_real(value, key);
    else if (key == "alpha_fixed")
        s.train.step.alpha_fixed = parse_real(value, key);
    else if (key == "ada_enabled")
        s.train.step.ada_enabled = parse_bool(value, key);
    else if (key == "v_max")
        s.train.limits.v_max = parse_real(value, key);
    else if (key == "g_max")
        s.train.limits.g_max = parse_real(value, key);
    else if (key == "g_min")
        s.train.limits.g_min = parse_real(value, key);
    else if (key == "div_eps")
        s.train.limits.div_eps = parse_real(value, key);
    else if (key == "domain_eps")
        s.train.limits.domain_eps = parse_real(value, key);
    else if (key == "seed")
        s.train.seed = static_cast<unsigned long long>(parse_int(value, key));
    else if (key == "train_points")
        s.train_points = static_cast<int>(parse_int(value, key));
    else if (key == "test_points")
        s.test_points = static_cast<int>(parse_int(value, key));
    else if (key == "seeds")
        s.seeds = static_cast<int>(parse_int(value, key));
    else if (key == "split")
        s.split_fraction = parse_real(value, key);
    else if (key == "split_mode") {
        if (value != "random" && value != "chronological")
            throw ConfigError("key 'split_mode': expected random|chronological");
        s.split_mode = value;
    } else if (key == "standardize")
        s.standardize_features = parse_bool(value, key);
    else if (key == "mlp_learning_rate")
        s.mlp_learning_rate = parse_real(value, key);
    else if (key == "mlp_epochs")
        s.mlp_epochs = static_cast<int>(parse_int(value, key));
    else
        throw ConfigError("unknown config key '" + key + "'");
}

// key=value lines; blank lines and #-comments ignored.
inline std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw io::FileNotFound("cannot open config '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int line_no = 0;
    auto trim = [](std::string t) {
        std::size_t b = t.find_first_not_of(" \t\r");
        std::size_t e = t.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : t.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
        out.emplace_back(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return out;
}

inline void load_config(Settings& s, const std::string& path)
{
    for (const auto& [k, v] : read_config_file(path))
        apply_setting(s, k, v);
}

// Full echo of every documented key, embedded in emitted reports.
inline ordered_json settings_json(const Settings& s)
{
    ordered_json j = train_config_json(s.train);
    j["train_points"] = s.train_points;
    j["test_points"] = s.test_points;
    j["seeds"] = s.seeds;
    j["split"] = s.split_fraction;
    j["split_mode"] = s.split_mode;
    j["standardize"] = s.standardize_features;
    j["mlp_learning_rate"] = s.mlp_learning_rate;
    j["mlp_epochs"] = s.mlp_epochs;
    return j;
}

} // namespace xnet
