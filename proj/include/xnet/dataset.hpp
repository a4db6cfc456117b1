#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "xnet/error.hpp"
#include "xnet/node_kind.hpp"
#include "xnet/tree.hpp"

namespace xnet {

// A regression table: N samples of D features plus the target column.
struct Dataset {
    std::vector<std::vector<double>> x; // N rows of D features
    std::vector<double> y;
    std::vector<std::string> feature_names;
    std::string target_name;
    std::string provenance;
    int rows_dropped = 0; // non-numeric / non-finite rows removed at load

    std::size_t n() const { return y.size(); }
    std::size_t d() const { return x.empty() ? feature_names.size() : x.front().size(); }

    void validate() const
    {
        if (y.empty() || x.size() != y.size())
            throw InvalidInput("dataset is empty or ragged");
        for (const auto& row : x)
            if (row.size() != x.front().size())
                throw InvalidInput("dataset rows have inconsistent widths");
    }
};

enum class SplitMode { Random, Chronological };

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    for (auto& s : out) {
        std::size_t b = s.find_first_not_of(" \t");
        std::size_t e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }
    return out;
}

inline bool parse_double(const std::string& s, double& out)
{
    if (s.empty())
        return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size())
        return false;
    return std::isfinite(out);
}

} // namespace detail

// Load a header-carrying CSV. The target is named or given as a 0-based
// column index; feature_columns, when non-empty, selects and orders the
// feature subset. Rows with unparseable or non-finite cells are dropped and
// counted.
inline Dataset load_csv(const std::string& path, const std::string& target_column,
                        const std::vector<std::string>& feature_columns = {})
{
    std::ifstream in(path);
    if (!in)
        throw io::FileNotFound("cannot open '" + path + "'");
    std::string header;
    if (!std::getline(in, header))
        throw io::NoUsableRows("'" + path + "' is empty");
    auto cols = detail::split_csv_line(header);

    auto find_col = [&](const std::string& name) -> int {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == name)
                return static_cast<int>(i);
        // Allow a numeric index as the column reference.
        bool digits = !name.empty() && name.find_first_not_of("0123456789") == std::string::npos;
        if (digits) {
            int idx = std::stoi(name);
            if (idx >= 0 && idx < static_cast<int>(cols.size()))
                return idx;
        }
        throw io::MissingColumn("column '" + name + "' not in '" + path + "'");
    };

    int target_idx = find_col(target_column);
    std::vector<int> feature_idx;
    if (feature_columns.empty()) {
        for (std::size_t i = 0; i < cols.size(); ++i)
            if (static_cast<int>(i) != target_idx)
                feature_idx.push_back(static_cast<int>(i));
    } else {
        for (const auto& name : feature_columns)
            feature_idx.push_back(find_col(name));
    }
    if (feature_idx.empty())
        throw io::MissingColumn("no feature columns left in '" + path + "'");

    Dataset ds;
    ds.provenance = path;
    ds.target_name = cols[static_cast<std::size_t>(target_idx)];
    for (int i : feature_idx)
        ds.feature_names.push_back(cols[static_cast<std::size_t>(i)]);

    std::string line;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        auto cells = detail::split_csv_line(line);
        bool ok = cells.size() == cols.size();
        std::vector<double> row;
        double yv = 0.0;
        if (ok)
            ok = detail::parse_double(cells[static_cast<std::size_t>(target_idx)], yv);
        if (ok) {
            for (int i : feature_idx) {
                double v;
                if (!detail::parse_double(cells[static_cast<std::size_t>(i)], v)) {
                    ok = false;
                    break;
                }
                row.push_back(v);
            }
        }
        if (!ok) {
            ++ds.rows_dropped;
            continue;
        }
        ds.x.push_back(std::move(row));
        ds.y.push_back(yv);
    }
    if (ds.y.empty())
        throw io::NoUsableRows("'" + path + "' has no usable data rows");
    return ds;
}

namespace detail {

inline Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& idx)
{
    Dataset out;
    out.feature_names = ds.feature_names;
    out.target_name = ds.target_name;
    out.provenance = ds.provenance;
    for (std::size_t i : idx) {
        out.x.push_back(ds.x[i]);
        out.y.push_back(ds.y[i]);
    }
    return out;
}

} // namespace detail

// fraction is the train share. Random mode shuffles with the seed;
// chronological mode cuts the ordered rows at round(fraction*N).
inline std::pair<Dataset, Dataset> split(const Dataset& ds, double fraction, SplitMode mode,
                                         unsigned long long seed = 0)
{
    ds.validate();
    if (!(fraction > 0.0 && fraction < 1.0))
        throw InvalidInput("split fraction must be in (0, 1)");
    std::size_t n = ds.n();
    auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n)
        throw InvalidInput("split produces an empty side");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (mode == SplitMode::Random) {
        std::mt19937_64 rng(seed);
        std::shuffle(order.begin(), order.end(), rng);
    }
    std::vector<std::size_t> tr(order.begin(), order.begin() + static_cast<long>(n_train));
    std::vector<std::size_t> te(order.begin() + static_cast<long>(n_train), order.end());
    return {detail::take_rows(ds, tr), detail::take_rows(ds, te)};
}

// Per-feature affine record of a standardization, kept so models trained in
// standardized units can be rewritten back to raw units.
struct StandardizeTransform {
    std::vector<double> mean;
    std::vector<double> stddev;        // 1.0 where skipped
    std::vector<bool> skipped;         // zero-variance features pass through

    std::vector<double> apply(const std::vector<double>& raw) const
    {
        std::vector<double> out(raw.size());
        for (std::size_t j = 0; j < raw.size(); ++j)
            out[j] = (raw[j] - mean[j]) / stddev[j];
        return out;
    }
    std::vector<double> invert(const std::vector<double>& std_row) const
    {
        std::vector<double> out(std_row.size());
        for (std::size_t j = 0; j < std_row.size(); ++j)
            out[j] = std_row[j] * stddev[j] + mean[j];
        return out;
    }
};

// Features shifted/scaled by TRAIN statistics only; the target stays raw.
inline StandardizeTransform standardize(Dataset& train, Dataset& test)
{
    train.validate();
    std::size_t d = train.d();
    StandardizeTransform t;
    t.mean.assign(d, 0.0);
    t.stddev.assign(d, 1.0);
    t.skipped.assign(d, false);
    double n = static_cast<double>(train.n());
    for (std::size_t j = 0; j < d; ++j) {
        double s = 0.0;
        for (const auto& row : train.x)
            s += row[j];
        t.mean[j] = s / n;
        double v = 0.0;
        for (const auto& row : train.x) {
            double dv = row[j] - t.mean[j];
            v += dv * dv;
        }
        double sd = std::sqrt(v / n);
        if (sd == 0.0) {
            t.skipped[j] = true;
            t.mean[j] = 0.0;
            t.stddev[j] = 1.0;
        } else {
            t.stddev[j] = sd;
        }
    }
    for (auto& row : train.x)
        row = t.apply(row);
    for (auto& row : test.x)
        row = t.apply(row);
    return t;
}

// Rewrite every variable leaf so the tree evaluated on raw features equals
// the standardized-unit tree on standardized features: for leaf j,
// w' = w/sd_j and b' = b - w*mean_j/sd_j.
inline void unstandardize_tree(ExprTree& tree, const StandardizeTransform& t)
{
    for (Node* n : preorder_nodes(tree)) {
        if (n->kind.op != Op::Var)
            continue;
        auto j = static_cast<std::size_t>(n->kind.var);
        if (j >= t.stddev.size())
            throw ContractViolation("unstandardize_tree: transform narrower than tree inputs");
        double w = n->w;
        n->w = w / t.stddev[j];
        n->b = n->b - w * t.mean[j] / t.stddev[j];
    }
    tree.cache_valid = false;
}

} // namespace xnet
