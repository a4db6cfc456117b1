#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "xnet/error.hpp"
#include "xnet/node_kind.hpp"
#include "xnet/tree.hpp"

namespace xnet {

namespace detail {

// Shortest decimal form that round-trips the exact double.
inline std::string double_to_text(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline double text_to_double(const std::string& s)
{
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw MalformedEncoding("bad numeric field '" + s + "'");
    return v;
}

} // namespace detail

// Canonical text form: one node per line in preorder, `KIND w b`.
inline std::string encode_model(const ExprTree& tree)
{
    std::string out;
    for (const SerialNode& s : serialize_preorder(tree)) {
        out += kind_name(s.kind);
        out += ' ';
        out += detail::double_to_text(s.w);
        out += ' ';
        out += detail::double_to_text(s.b);
        out += '\n';
    }
    return out;
}

// Inverse of encode_model. input_dim is inferred as the largest variable
// ordinal present (at least 1); blank lines are ignored.
inline ExprTree decode_model(const std::string& text)
{
    std::vector<SerialNode> seq;
    int max_var = -1;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string kind_tok, w_tok, b_tok, extra;
        if (!(ls >> kind_tok))
            continue;
        if (!(ls >> w_tok >> b_tok))
            throw MalformedEncoding("line " + std::to_string(line_no) +
                                    ": expected `KIND w b`");
        if (ls >> extra)
            throw MalformedEncoding("line " + std::to_string(line_no) + ": trailing field '" +
                                    extra + "'");
        SerialNode s;
        try {
            s.kind = kind_from_name(kind_tok);
            s.w = detail::text_to_double(w_tok);
            s.b = detail::text_to_double(b_tok);
        } catch (const MalformedEncoding& e) {
            throw MalformedEncoding("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (s.kind.op == Op::Var && s.kind.var > max_var)
            max_var = s.kind.var;
        seq.push_back(s);
    }
    return deserialize_preorder(seq, max_var >= 0 ? max_var + 1 : 1);
}

inline void save_model(const ExprTree& tree, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw io::FileNotFound("cannot open '" + path + "' for writing");
    out << encode_model(tree);
    if (!out)
        throw Error("write to '" + path + "' failed");
}

inline ExprTree load_model(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw io::FileNotFound("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return decode_model(buf.str());
}

} // namespace xnet
