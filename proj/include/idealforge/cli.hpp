#pragma once

#include "idealforge/adversary.hpp"
#include "idealforge/canonical.hpp"
#include "idealforge/error.hpp"
#include "idealforge/ideal_core.hpp"
#include "idealforge/natset.hpp"
#include "idealforge/reduction_search.hpp"
#include "idealforge/report.hpp"
#include "idealforge/sparse_fs.hpp"
#include "idealforge/transcript.hpp"

#include <CLI11.hpp>

#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace idealforge {

inline constexpr const char * kToolVersion = "1.0.0";

// ---- literals ----------------------------------------------------------------

namespace detail {

class LiteralReader {
public:
    LiteralReader(std::string_view text, std::size_t base) : text_(text), base_(base) {}

    bool done()
    {
        skip_separators();
        return pos_ >= text_.size();
    }
    /// Absolute offset of the cursor.
    std::size_t pos() const noexcept { return base_ + pos_; }
    bool peek(std::string_view s) const { return pos_ <= text_.size() && text_.substr(pos_, s.size()) == s; }
    void expect(std::string_view s)
    {
        if (!peek(s))
            throw ParseError(base_ + pos_, "expected '" + std::string(s) + "'");
        pos_ += s.size();
    }

    Nat number()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (start == pos_)
            throw ParseError(base_ + start, pos_ < text_.size() ? "unexpected '" + std::string(1, text_[pos_]) + "'"
                                                        : "unexpected end of input");
        Nat v = 0;
        const auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc{})
            throw ParseError(base_ + start, "number out of range");
        return v;
    }

    void skip_separators()
    {
        while (pos_ < text_.size() && (text_[pos_] == ',' || std::isspace(static_cast<unsigned char>(text_[pos_]))))
            ++pos_;
    }

private:
    std::string_view text_;
    std::size_t base_ = 0;
    std::size_t pos_ = 0;
};

inline std::string_view strip_braces(std::string_view s, std::size_t & offset)
{
    offset = 0;
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
        ++offset;
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    if (s.size() >= 2 && s.front() == '{' && s.back() == '}') {
        ++offset;
        return s.substr(1, s.size() - 2);
    }
    return s;
}

} // namespace detail

/// Comma/whitespace separated naturals, ranges "a..b" (inclusive) and pow2(n).
inline NatSet parse_set_literal(std::string_view text)
{
    std::size_t offset = 0;
    const auto inner = detail::strip_braces(text, offset);
    detail::LiteralReader in(inner, offset);
    std::vector<Nat> out;
    while (!in.done()) {
        if (in.peek("pow2(")) {
            in.expect("pow2(");
            const std::size_t at = in.pos();
            const Nat n = in.number();
            if (n > 64)
                throw ParseError(at, "pow2 exponent above 64");
            in.expect(")");
            for (Nat i = 0; i < n; ++i)
                out.push_back(Nat{1} << i);
            continue;
        }
        const std::size_t at = in.pos();
        const Nat a = in.number();
        if (!in.peek("..")) {
            out.push_back(a);
            continue;
        }
        in.expect("..");
        const Nat b = in.number();
        if (b < a)
            throw ParseError(at, "empty range");
        if (b - a > (Nat{1} << 24))
            throw ParseError(at, "range too long");
        for (Nat x = a;; ++x) {
            out.push_back(x);
            if (x == b)
                break;
        }
    }
    return NatSet(std::move(out));
}

/// Ordered list of naturals (duplicates kept): "2,0,1".
inline std::vector<Nat> parse_list_literal(std::string_view text)
{
    std::size_t offset = 0;
    const auto inner = detail::strip_braces(text, offset);
    detail::LiteralReader in(inner, offset);
    std::vector<Nat> out;
    while (!in.done())
        out.push_back(in.number());
    return out;
}

/// "0-1, 1-2" over a ground size.
inline EdgeSet parse_edge_literal(std::string_view text, std::size_t ground)
{
    std::size_t offset = 0;
    const auto inner = detail::strip_braces(text, offset);
    detail::LiteralReader in(inner, offset);
    std::vector<Edge> out;
    while (!in.done()) {
        const std::size_t at = in.pos();
        const Nat a = in.number();
        in.expect("-");
        const Nat b = in.number();
        if (a == b)
            throw ParseError(at, "degenerate pair");
        out.push_back(Edge::of(a, b));
    }
    return EdgeSet(ground, std::move(out));
}

/// "0:1, 0:2" as (row, column) points.
inline GridSet parse_grid_literal(std::string_view text)
{
    std::size_t offset = 0;
    const auto inner = detail::strip_braces(text, offset);
    detail::LiteralReader in(inner, offset);
    std::vector<GridPoint> out;
    while (!in.done()) {
        const Nat r = in.number();
        in.expect(":");
        out.push_back({r, in.number()});
    }
    return GridSet(std::move(out));
}

// ---- colorings ---------------------------------------------------------------

using AnyColoring = std::variant<NatColoring, PairColoring>;

enum class ColoringKind { Auto, Nat, Pair };

namespace detail {

inline std::optional<Nat> const_value(std::string_view name)
{
    if (name.substr(0, 6) != "const:")
        return std::nullopt;
    const auto digits = name.substr(6);
    Nat v = 0;
    const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
    if (ec != std::errc{} || p != digits.data() + digits.size() || digits.empty())
        throw ParseError(6, "const:<natural> expected");
    return v;
}

inline std::optional<AnyColoring> builtin_coloring(std::string_view name, std::optional<Nat> window, std::uint64_t seed,
                                                   ColoringKind kind)
{
    static const std::set<std::string_view> nat_names{"identity", "square", "min-alpha", "max-alpha", "minmax-alpha"};
    static const std::set<std::string_view> pair_names{"min", "max", "pairing"};
    const bool is_const = name.substr(0, 6) == "const:";
    const bool is_random = name == "random" || name.substr(0, 7) == "random:";
    if (!nat_names.count(name) && !pair_names.count(name) && !is_const && !is_random)
        return std::nullopt;
    if (!window)
        throw Error(ErrorCode::InvalidArgument, "builtin '" + std::string(name) + "' needs a window");
    const Nat w = *window;
    if (nat_names.count(name) && kind == ColoringKind::Pair)
        throw Error(ErrorCode::CarrierMismatch, "'" + std::string(name) + "' colors naturals, not pairs");
    if (pair_names.count(name) && kind == ColoringKind::Nat)
        throw Error(ErrorCode::CarrierMismatch, "'" + std::string(name) + "' colors pairs, not naturals");
    if (name == "identity")
        return NatColoring::identity(w);
    if (name == "square")
        return NatColoring::square(w);
    if (name == "min-alpha")
        return NatColoring::min_alpha(w);
    if (name == "max-alpha")
        return NatColoring::max_alpha(w);
    if (name == "minmax-alpha")
        return NatColoring::minmax_alpha(w);
    if (name == "min")
        return PairColoring::min(w);
    if (name == "max")
        return PairColoring::max(w);
    if (name == "pairing")
        return PairColoring::pairing(w);
    if (is_const) {
        const Nat v = *const_value(name);
        if (kind == ColoringKind::Nat)
            return NatColoring::constant(w, v);
        return PairColoring::constant(w, v);
    }
    // random[:bound], values uniform below bound
    Nat bound = Nat{1} << 16;
    if (name.size() > 7) {
        const auto digits = name.substr(7);
        const auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), bound);
        if (ec != std::errc{} || p != digits.data() + digits.size() || bound == 0)
            throw ParseError(7, "random:<positive bound> expected");
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<Nat> dist(0, bound - 1);
    const std::string label = "random:" + std::to_string(bound) + "@" + std::to_string(seed);
    if (kind == ColoringKind::Nat) {
        if (w > (Nat{1} << 24))
            throw Error(ErrorCode::TooLarge, "random tables are capped at 2^24 entries");
        std::vector<Nat> t(w);
        for (auto & v : t)
            v = dist(rng);
        return NatColoring::from_table(std::move(t), label);
    }
    return PairColoring::tabulate(w, [&](Nat, Nat) { return dist(rng); }, label);
}

struct TableLine {
    std::vector<Nat> values;
    std::size_t offset = 0;
};

inline std::vector<TableLine> read_table(std::istream & in)
{
    std::vector<TableLine> lines;
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        const std::size_t start = offset;
        offset += line.size() + 1;
        if (auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        LiteralReader r(line, start);
        TableLine t{{}, start};
        while (!r.done()) {
            t.values.push_back(r.number());
        }
        if (!t.values.empty())
            lines.push_back(std::move(t));
    }
    return lines;
}

inline std::string list_missing(const std::vector<std::string> & missing)
{
    std::string out;
    for (std::size_t i = 0; i < missing.size() && i < 10; ++i)
        out += (i ? ", " : "") + missing[i];
    if (missing.size() > 10)
        out += ", ... (" + std::to_string(missing.size()) + " total)";
    return out;
}

} // namespace detail

/// Parses a coloring table: lines "x value" or "i j value", '#' comments.
/// Every point of the window must be present.
inline AnyColoring parse_coloring_table(std::istream & in, std::optional<Nat> window, std::string name = "table")
{
    const auto lines = detail::read_table(in);
    if (lines.empty())
        throw ParseError(0, "empty coloring table");
    const std::size_t width = lines.front().values.size();
    if (width != 2 && width != 3)
        throw ParseError(lines.front().offset, "rows must be 'x value' or 'i j value'");
    for (const auto & l : lines)
        if (l.values.size() != width)
            throw ParseError(l.offset, "row has " + std::to_string(l.values.size()) + " fields, expected " +
                                           std::to_string(width));
    if (width == 2) {
        Nat w = 0;
        for (const auto & l : lines)
            w = std::max(w, l.values[0] + 1);
        if (window) {
            for (const auto & l : lines)
                if (l.values[0] >= *window)
                    throw ParseError(l.offset, "point " + std::to_string(l.values[0]) + " outside window");
            w = *window;
        }
        if (w > (Nat{1} << 24))
            throw Error(ErrorCode::TooLarge, "nat tables are capped at 2^24 entries");
        std::vector<std::optional<Nat>> t(w);
        for (const auto & l : lines) {
            auto & slot = t[l.values[0]];
            if (slot && *slot != l.values[1])
                throw ParseError(l.offset, "conflicting value for " + std::to_string(l.values[0]));
            slot = l.values[1];
        }
        std::vector<std::string> missing;
        std::vector<Nat> table(w);
        for (Nat x = 0; x < w; ++x) {
            if (!t[x])
                missing.push_back(std::to_string(x));
            else
                table[x] = *t[x];
        }
        if (!missing.empty())
            throw Error(ErrorCode::Incomplete, "missing points: " + detail::list_missing(missing));
        return NatColoring::from_table(std::move(table), std::move(name));
    }
    Nat ground = 0;
    for (const auto & l : lines) {
        if (l.values[0] == l.values[1])
            throw ParseError(l.offset, "degenerate pair");
        ground = std::max({ground, l.values[0] + 1, l.values[1] + 1});
    }
    if (window) {
        if (ground > *window)
            throw ParseError(0, "pair endpoint outside window " + std::to_string(*window));
        ground = *window;
    }
    if (ground > 8192)
        throw Error(ErrorCode::TooLarge, "pair tables are capped at 8192 vertices");
    std::vector<std::optional<Nat>> t(PairColoring::pair_count(ground));
    for (const auto & l : lines) {
        const Edge e = Edge::of(l.values[0], l.values[1]);
        auto & slot = t[PairColoring::index(e.lo, e.hi)];
        if (slot && *slot != l.values[2])
            throw ParseError(l.offset, "conflicting value for pair " + std::to_string(e.lo) + " " + std::to_string(e.hi));
        slot = l.values[2];
    }
    std::vector<std::string> missing;
    std::vector<Nat> table(t.size());
    for (Nat j = 1; j < ground; ++j)
        for (Nat i = 0; i < j; ++i) {
            const auto & slot = t[PairColoring::index(i, j)];
            if (!slot)
                missing.push_back(std::to_string(i) + " " + std::to_string(j));
            else
                table[PairColoring::index(i, j)] = *slot;
        }
    if (!missing.empty())
        throw Error(ErrorCode::Incomplete, "missing pairs: " + detail::list_missing(missing));
    return PairColoring(ground, std::move(table), std::move(name));
}

/// A builtin name ("identity", "const:v", "min", "max", "pairing",
/// "min-alpha", "max-alpha", "minmax-alpha", "square", "random[:bound]") or
/// a path to a table file.
inline AnyColoring load_coloring(const std::string & source, std::optional<Nat> window = std::nullopt,
                                 std::uint64_t seed = 0, ColoringKind kind = ColoringKind::Auto)
{
    if (auto b = detail::builtin_coloring(source, window, seed, kind))
        return *b;
    std::ifstream in(source);
    if (!in)
        throw Error(ErrorCode::InvalidArgument, "'" + source + "' is neither a builtin coloring nor a readable file");
    auto c = parse_coloring_table(in, window, source);
    if (kind == ColoringKind::Nat && !std::holds_alternative<NatColoring>(c))
        throw Error(ErrorCode::CarrierMismatch, source + " colors pairs, naturals expected");
    if (kind == ColoringKind::Pair && !std::holds_alternative<PairColoring>(c))
        throw Error(ErrorCode::CarrierMismatch, source + " colors naturals, pairs expected");
    return c;
}

inline NatColoring load_nat_coloring(const std::string & source, std::optional<Nat> window, std::uint64_t seed = 0)
{
    return std::get<NatColoring>(load_coloring(source, window, seed, ColoringKind::Nat));
}

inline PairColoring load_pair_coloring(const std::string & source, std::optional<Nat> window, std::uint64_t seed = 0)
{
    return std::get<PairColoring>(load_coloring(source, window, seed, ColoringKind::Pair));
}

// ---- bundles -----------------------------------------------------------------

struct LoadedBundle {
    RnhBundle bundle;
    GammaColoring f;
};

inline LoadedBundle bundle_from_json(const Json & j)
{
    try {
        const int which = j.at("case").get<int>();
        auto sets = [](const Json & arr) {
            std::vector<NatSet> out;
            for (const auto & s : arr)
                out.push_back(natset_from_json(s));
            return out;
        };
        const auto x_base = SparseBasis::make(natset_from_json(j.at("X")));
        std::map<Nat, GammaPoint> table;
        for (const auto & row : j.at("f")) {
            const auto v = row.get<std::vector<Nat>>();
            if (v.size() != 3)
                throw Error(ErrorCode::MalformedBundle, "f rows are [y, z0, z1]");
            if (!table.emplace(v[0], GammaPoint{v[1], v[2]}).second)
                throw Error(ErrorCode::MalformedBundle, "f lists " + std::to_string(v[0]) + " twice");
        }
        GammaColoring f(x_base, std::move(table));
        if (which == 1) {
            RnhCase1Bundle b;
            b.k = j.at("k").get<Nat>();
            b.d = natset_from_json(j.at("D"));
            b.x = j.at("x").get<std::vector<Nat>>();
            b.d_seq = sets(j.at("Dseq"));
            return {b, std::move(f)};
        }
        if (which == 2) {
            RnhCase2Bundle b;
            b.x = j.at("x").get<std::vector<Nat>>();
            b.d_seq = sets(j.at("Dseq"));
            b.n = j.at("n").get<std::vector<Nat>>();
            b.j = j.at("j").get<std::vector<int>>();
            b.k = j.at("kseq").get<std::vector<long long>>();
            b.f_sets = sets(j.at("F"));
            return {b, std::move(f)};
        }
        throw Error(ErrorCode::MalformedBundle, "case must be 1 or 2");
    } catch (const Json::exception & e) {
        throw Error(ErrorCode::MalformedBundle, e.what());
    }
}

inline Json to_json(const RnhBundle & bundle, const GammaColoring & f)
{
    Json rows = Json::array();
    for (const auto & [y, p] : f.table())
        rows.push_back(Json::array({y, p.first, p.second}));
    auto sets = [](const std::vector<NatSet> & v) {
        Json a = Json::array();
        for (const auto & s : v)
            a.push_back(to_json(s));
        return a;
    };
    Json j;
    if (const auto * b = std::get_if<RnhCase1Bundle>(&bundle)) {
        j = Json{{"case", 1}, {"X", to_json(f.base().elements())}, {"f", rows}, {"k", b->k}, {"D", to_json(b->d)},
                 {"x", b->x}, {"Dseq", sets(b->d_seq)}};
    } else {
        const auto & c = std::get<RnhCase2Bundle>(bundle);
        j = Json{{"case", 2}, {"X", to_json(f.base().elements())}, {"f", rows}, {"x", c.x}, {"Dseq", sets(c.d_seq)},
                 {"n", c.n}, {"j", c.j}, {"kseq", c.k}, {"F", sets(c.f_sets)}};
    }
    return j;
}

// ---- command configuration ---------------------------------------------------

struct CarrierArgs {
    std::optional<std::string> set;
    std::optional<std::string> edges;
    std::optional<std::string> grid;
    std::optional<Nat> size;     // initial segment [0, size)
    std::optional<Nat> vertices; // complete graph on [0, vertices)
};

struct CommandConfig {
    std::string subcommand;
    ScaleParams params;
    SearchBudget budget;
    std::uint64_t seed = 0;
    std::optional<std::string> out_path;

    std::optional<std::string> ideal;
    std::optional<std::string> op;
    std::optional<std::string> strategy;
    std::optional<std::string> what;
    std::optional<std::string> phi;
    std::optional<Nat> phi_window;
    std::optional<std::string> case_name;
    std::optional<std::string> blocks;
    std::optional<std::string> pool;
    std::optional<std::string> basis;
    std::optional<std::string> closing;
    std::optional<std::string> map;
    std::optional<std::string> input;
    std::optional<Nat> k;
    std::optional<Nat> m;
    std::optional<Nat> x;
    std::optional<Nat> y;
    std::optional<Nat> ground;
    std::optional<Nat> tall_target;
    std::uint64_t search_nodes = ReductionBudget{}.max_nodes;
    std::size_t threads = 0;
    CarrierArgs carrier;
    std::optional<std::string> src_ideal;
    std::optional<std::string> dst_ideal;
    CarrierArgs src;
    CarrierArgs dst;

    void validate() const
    {
        params.validate();
        budget.validate();
    }
};

namespace detail {

inline const std::map<std::string, std::set<std::string>> & allowed_options()
{
    static const std::map<std::string, std::set<std::string>> table{
        {"oracle", {"--ideal", "--set", "--edges", "--vertices", "--ground", "--grid", "--size", "--tall-target"}},
        {"fs", {"--op", "--set", "--pool", "--k", "--x", "--y"}},
        {"canonize", {"--op", "--phi", "--phi-window", "--set", "--blocks", "--pool", "--m", "--ground"}},
        {"adversary", {"--strategy", "--phi", "--phi-window", "--case", "--set", "--blocks", "--basis", "--ground",
                       "--closing", "--candidate-cap", "--max-nodes"}},
        {"search", {"--src-ideal", "--dst-ideal", "--src-set", "--dst-set", "--src-size", "--dst-size",
                    "--src-vertices", "--dst-vertices", "--src-grid", "--dst-grid", "--search-nodes"}},
        {"verify", {"--what", "--input", "--phi", "--phi-window", "--map", "--basis", "--ground", "--src-ideal",
                    "--dst-ideal", "--src-set", "--dst-set", "--src-size", "--dst-size", "--src-vertices",
                    "--dst-vertices", "--src-grid", "--dst-grid"}},
    };
    return table;
}

} // namespace detail

/// Parses argv into a config. Throws CLI::ParseError for malformed flags and
/// Error(InvalidArgument) for flags that do not apply to the subcommand.
/// Returns nothing when help was requested (and printed to `help`).
inline std::optional<CommandConfig> parse_command_line(int argc, const char * const * argv, std::ostream & help)
{
    CommandConfig c;
    CLI::App app{"Finite-scale workbench for ideals on the naturals"};
    app.require_subcommand(1, 1);
    std::string tau;
    std::vector<CLI::Option *> scoped;
    auto scoped_opt = [&](auto & target, const std::string & flag, const std::string & help) {
        auto * o = app.add_option(flag, target, help);
        scoped.push_back(o);
        return o;
    };

    app.add_option("--window", c.params.window, "FIN proxy window");
    app.add_option("--ap-len", c.params.ap_len, "progression length for the vdw proxy");
    app.add_option("--clique-size", c.params.clique_size, "clique size for the ramsey proxy");
    app.add_option("--fs-size", c.params.fs_size, "FS basis size for the hindman and fin2 proxies");
    app.add_option("--tau", tau, "reciprocal-sum threshold p/q");
    app.add_option("--nmax", c.budget.n_max, "construction steps");
    app.add_option("--budget-max-element", c.budget.max_element, "largest natural a construction may use");
    app.add_option("--seed", c.seed, "seed for random colorings");
    app.add_option("--out", c.out_path, "also write the report to this path");
    app.add_option("--threads", c.threads, "worker threads (default IDEALFORGE_THREADS or 1)");

    scoped_opt(c.ideal, "--ideal", "vdw | hindman | ramsey | summable | fin | fin2");
    scoped_opt(c.carrier.set, "--set", "set literal");
    scoped_opt(c.carrier.edges, "--edges", "edge literal i-j, ...");
    scoped_opt(c.carrier.grid, "--grid", "grid literal r:c, ...");
    scoped_opt(c.carrier.size, "--size", "initial segment [0, n)");
    scoped_opt(c.carrier.vertices, "--vertices", "complete graph on n vertices");
    scoped_opt(c.ground, "--ground", "vertex count for pair carriers and colorings");
    scoped_opt(c.tall_target, "--tall-target", "also build a non-positive subset of this size");
    scoped_opt(c.op, "--op", "operation");
    scoped_opt(c.pool, "--pool", "set literal");
    scoped_opt(c.k, "--k", "size");
    scoped_opt(c.x, "--x", "point");
    scoped_opt(c.y, "--y", "point");
    scoped_opt(c.phi, "--phi", "builtin coloring or table file");
    scoped_opt(c.phi_window, "--phi-window", "domain size of the coloring");
    scoped_opt(c.blocks, "--blocks", "block basis literal");
    scoped_opt(c.m, "--m", "target size");
    scoped_opt(c.strategy, "--strategy", "w-summable | h-summable | r-summable | r-hindman");
    scoped_opt(c.case_name, "--case", "CONST | MIN | MAX | MINMAX | INJ");
    scoped_opt(c.basis, "--basis", "very sparse basis D");
    scoped_opt(c.closing, "--closing", "set C for the closing argument");
    scoped_opt(c.budget.candidate_cap, "--candidate-cap", "size of the first nested set");
    scoped_opt(c.budget.max_nodes, "--max-nodes", "node budget per step");
    scoped_opt(c.src_ideal, "--src-ideal", "ideal on the source carrier");
    scoped_opt(c.dst_ideal, "--dst-ideal", "ideal on the target carrier");
    scoped_opt(c.src.set, "--src-set", "");
    scoped_opt(c.dst.set, "--dst-set", "");
    scoped_opt(c.src.size, "--src-size", "");
    scoped_opt(c.dst.size, "--dst-size", "");
    scoped_opt(c.src.vertices, "--src-vertices", "");
    scoped_opt(c.dst.vertices, "--dst-vertices", "");
    scoped_opt(c.src.grid, "--src-grid", "");
    scoped_opt(c.dst.grid, "--dst-grid", "");
    scoped_opt(c.search_nodes, "--search-nodes", "node budget per top-level branch");
    scoped_opt(c.what, "--what", "reduction | transcript | hnr | rnh");
    scoped_opt(c.input, "--input", "JSON input file");
    scoped_opt(c.map, "--map", "reduction as a list of source indices");

    for (const auto & [name, allowed] : detail::allowed_options())
        app.add_subcommand(name, name)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        help << app.help();
        return std::nullopt;
    }
    c.subcommand = app.get_subcommands().front()->get_name();
    const auto & allowed = detail::allowed_options().at(c.subcommand);
    for (auto * o : scoped)
        if (o->count() > 0 && !allowed.count(o->get_name()))
            throw Error(ErrorCode::InvalidArgument, o->get_name() + " does not apply to '" + c.subcommand + "'");
    if (!tau.empty())
        c.params.tau = Rational::parse(tau);
    return c;
}

// ---- dispatch ----------------------------------------------------------------

namespace detail {

template <class T>
inline const T & require(const std::optional<T> & v, const char * flag)
{
    if (!v)
        throw Error(ErrorCode::InvalidArgument, std::string("missing ") + flag);
    return *v;
}

inline Json params_json(const ScaleParams & p)
{
    return Json{{"ap_len", p.ap_len},
                {"clique_size", p.clique_size},
                {"fs_size", p.fs_size},
                {"tau", p.tau.str()},
                {"window", p.window}};
}

inline Json budget_json(const SearchBudget & b)
{
    return Json{{"max_element", b.max_element},
                {"n_max", b.n_max},
                {"candidate_cap", b.candidate_cap},
                {"max_nodes", b.max_nodes}};
}

inline Json carrier_json(const Carrier & c)
{
    return std::visit(
        [](const auto & s) -> Json {
            using C = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<C, NatSet>) {
                return to_json(s);
            } else if constexpr (std::is_same_v<C, EdgeSet>) {
                Json edges = Json::array();
                for (const auto & e : s)
                    edges.push_back(Json::array({e.lo, e.hi}));
                return Json{{"ground", s.ground()}, {"edges", std::move(edges)}};
            } else {
                Json pts = Json::array();
                for (const auto & p : s)
                    pts.push_back(Json::array({p.row, p.col}));
                return pts;
            }
        },
        c);
}

inline Json error_json(const Error & e)
{
    Json j{{"code", std::string(code_name(e.code()))}, {"message", e.what()}};
    if (const auto * pe = dynamic_cast<const ParseError *>(&e))
        j["position"] = pe->position();
    if (const auto * se = dynamic_cast<const SearchExhausted *>(&e)) {
        j["step"] = se->step();
        j["window"] = se->window();
        j["condition"] = se->condition();
    }
    return j;
}

inline Carrier build_carrier(const CarrierArgs & a, std::optional<Nat> ground, const char * prefix)
{
    const int given = a.set.has_value() + a.edges.has_value() + a.grid.has_value() + a.size.has_value() +
                      a.vertices.has_value();
    if (given != 1)
        throw Error(ErrorCode::InvalidArgument,
                    std::string("give exactly one of --") + prefix + "set, --" + prefix + "size, --" + prefix +
                        "vertices, --" + prefix + "grid" + (std::string(prefix).empty() ? ", --edges" : ""));
    if (a.set)
        return parse_set_literal(*a.set);
    if (a.size)
        return NatSet::range(0, *a.size);
    if (a.vertices)
        return EdgeSet::complete(static_cast<std::size_t>(*a.vertices));
    if (a.grid)
        return parse_grid_literal(*a.grid);
    Nat g = 0;
    if (ground) {
        g = *ground;
    } else {
        // smallest ground containing every endpoint
        const auto probe = parse_edge_literal(*a.edges, std::numeric_limits<std::size_t>::max());
        for (const auto & e : probe)
            g = std::max(g, e.hi + 1);
    }
    return parse_edge_literal(*a.edges, static_cast<std::size_t>(g));
}

struct Outcome {
    Json body;
    int code = 0;
};

inline Outcome run_oracle(const CommandConfig & c)
{
    const IdealId id = parse_ideal(require(c.ideal, "--ideal"));
    const Carrier a = build_carrier(c.carrier, c.ground, "");
    Json body{{"ideal", std::string(ideal_name(id))}, {"params", params_json(c.params)}, {"carrier", carrier_json(a)}};
    body["positive"] = is_positive(a, id, c.params);
    Json stats = Json::object();
    switch (id) {
    case IdealId::Vdw: {
        const auto & s = std::get<NatSet>(a);
        stats["longest_ap"] = longest_ap(s);
        const auto ap = find_ap(s, c.params.ap_len);
        stats["first_ap"] = ap ? Json::array({ap->first, ap->second}) : Json(nullptr);
        break;
    }
    case IdealId::Summable: stats["reciprocal_sum"] = reciprocal_sum(std::get<NatSet>(a)).str(); break;
    case IdealId::Ramsey: {
        const auto k = find_clique(std::get<EdgeSet>(a), c.params.clique_size);
        stats["clique"] = k ? to_json(*k) : Json(nullptr);
        break;
    }
    case IdealId::Hindman: {
        const auto b = find_fs_subset(std::get<NatSet>(a), c.params.fs_size);
        stats["fs_basis"] = b ? to_json(*b) : Json(nullptr);
        break;
    }
    case IdealId::Fin:
        stats["size"] = carrier_size(a);
        stats["bound"] = c.params.fin_bound();
        break;
    case IdealId::Fin2: stats["heavy_rows"] = to_json(heavy_columns(std::get<GridSet>(a), c.params.fs_size)); break;
    }
    body["stats"] = std::move(stats);
    if (c.tall_target) {
        try {
            body["tall_witness"] = carrier_json(tall_witness(a, id, c.params, static_cast<std::size_t>(*c.tall_target)));
        } catch (const SearchExhausted &) {
            throw;
        } catch (const Error & e) {
            body["tall_witness"] = Json{{"error", error_json(e)}};
        }
    }
    return {std::move(body)};
}

inline Outcome run_fs(const CommandConfig & c)
{
    const std::string op = require(c.op, "--op");
    Json body{{"op", op}};
    auto set = [&] { return parse_set_literal(require(c.carrier.set, "--set")); };
    if (op == "fs") {
        const auto s = set();
        body["set"] = to_json(s);
        body["fs"] = to_json(fs(s));
    } else if (op == "alpha") {
        const auto d = SparseBasis::make(set());
        body["set"] = to_json(d.elements());
        body["x"] = require(c.x, "--x");
        body["alpha"] = to_json(alpha(d, *c.x));
    } else if (op == "is-sparse") {
        const auto s = set();
        body["set"] = to_json(s);
        body["sparse"] = is_sparse(s);
    } else if (op == "very-sparse") {
        const auto s = set();
        const auto flag = is_very_sparse(s);
        body["set"] = to_json(s);
        body["very_sparse"] = flag.verified;
        body["counterexample"] = flag.counterexample
                                     ? Json::array({flag.counterexample->first, flag.counterexample->second})
                                     : Json(nullptr);
    } else if (op == "very-sparse-subset") {
        const auto pool = parse_set_literal(require(c.pool, "--pool"));
        const auto k = require(c.k, "--k");
        body["pool_size"] = pool.size();
        body["k"] = k;
        body["subset"] = to_json(very_sparse_subset(pool, static_cast<std::size_t>(k)).elements());
    } else if (op == "find-fs-subset") {
        const auto s = set();
        const auto k = require(c.k, "--k");
        const auto b = find_fs_subset(s, static_cast<std::size_t>(k));
        body["set"] = to_json(s);
        body["k"] = k;
        body["basis"] = b ? to_json(*b) : Json(nullptr);
    } else if (op == "conflict-set") {
        const auto d = SparseBasis::make(set());
        body["set"] = to_json(d.elements());
        body["y"] = require(c.y, "--y");
        body["conflict_set"] = to_json(conflict_set(d, *c.y));
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown fs op '" + op + "'");
    }
    return {std::move(body)};
}

inline Json case_json(const std::optional<CanonicalCase> & c)
{
    return c ? Json(std::string(case_name(*c))) : Json(nullptr);
}

inline Outcome run_canonize(const CommandConfig & c)
{
    const std::string op = c.op.value_or("classify");
    const std::string phi_name = require(c.phi, "--phi");
    Json body{{"op", op}, {"phi", phi_name}};
    if (op == "classify" && c.carrier.set) {
        const auto t = parse_set_literal(*c.carrier.set);
        const Nat ground = c.phi_window.value_or(t.empty() ? 0 : t.max() + 1);
        const auto phi = load_pair_coloring(phi_name, ground, c.seed);
        body["set"] = to_json(t);
        body["case"] = case_json(classify_pairs_on(phi, t));
    } else if (op == "classify") {
        const auto blocks = BlockBasis::make(parse_set_literal(require(c.blocks, "--blocks (or --set)")));
        const auto phi = load_nat_coloring(phi_name, c.phi_window.value_or(blocks.total() + 1), c.seed);
        body["blocks"] = to_json(blocks.elements());
        body["case"] = case_json(classify_fs_on(phi, blocks));
    } else if (op == "find-subset") {
        const auto phi = load_pair_coloring(phi_name, c.phi_window ? c.phi_window : c.ground, c.seed);
        const auto m = require(c.m, "--m");
        const auto found = find_canonical_subset(phi, static_cast<std::size_t>(m));
        body["ground"] = phi.ground();
        body["m"] = m;
        body["subset"] = found ? to_json(found->first) : Json(nullptr);
        body["case"] = found ? case_json(found->second) : Json(nullptr);
    } else if (op == "find-basis") {
        const auto pool = BlockBasis::make(parse_set_literal(require(c.pool, "--pool")));
        const auto phi = load_nat_coloring(phi_name, c.phi_window.value_or(pool.total() + 1), c.seed);
        const auto m = require(c.m, "--m");
        const auto found = find_block_basis(phi, pool, static_cast<std::size_t>(m));
        body["pool"] = to_json(pool.elements());
        body["m"] = m;
        body["basis"] = found ? to_json(found->first.elements()) : Json(nullptr);
        body["case"] = found ? case_json(found->second) : Json(nullptr);
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown canonize op '" + op + "'");
    }
    return {std::move(body)};
}

inline Outcome run_adversary(const CommandConfig & c)
{
    const std::string strategy = require(c.strategy, "--strategy");
    const std::string phi_name = require(c.phi, "--phi");
    Json body{{"strategy", strategy}, {"phi", phi_name}, {"budget", budget_json(c.budget)}};
    auto emit = [&](const Transcript & t, const Report & r) {
        body["transcript"] = to_json(t);
        body["verification"] = to_json(r);
    };
    if (strategy == "w-summable") {
        const auto phi = load_nat_coloring(phi_name, c.phi_window.value_or(c.budget.max_element), c.seed);
        const auto t = defeat_w_summable(phi, c.budget);
        emit(t, reverify_w_summable(t, phi));
    } else if (strategy == "h-summable") {
        const auto blocks = BlockBasis::make(parse_set_literal(require(c.blocks, "--blocks")));
        const auto phi = load_nat_coloring(phi_name, c.phi_window.value_or(blocks.total() + 1), c.seed);
        std::optional<CanonicalCase> cs;
        if (c.case_name)
            cs = parse_case(*c.case_name);
        else
            cs = classify_fs_on(phi, blocks);
        if (!cs)
            throw Error(ErrorCode::CaseMismatch, "phi is not canonical on FS(C)");
        body["blocks"] = to_json(blocks.elements());
        const auto t = defeat_h_summable(phi, blocks, *cs, c.budget);
        emit(t, reverify_h_summable(t, phi));
    } else if (strategy == "r-summable") {
        const auto t_set = parse_set_literal(require(c.carrier.set, "--set"));
        if (t_set.empty())
            throw Error(ErrorCode::TooSmall, "T is empty");
        const auto phi = load_pair_coloring(phi_name, c.phi_window.value_or(t_set.max() + 1), c.seed);
        std::optional<CanonicalCase> cs;
        if (c.case_name)
            cs = parse_case(*c.case_name);
        else
            cs = classify_pairs_on(phi, t_set);
        if (!cs)
            throw Error(ErrorCode::CaseMismatch, "phi is not canonical on [T]^2");
        body["set"] = to_json(t_set);
        const auto t = defeat_r_summable(phi, t_set, *cs, c.budget);
        emit(t, reverify_r_summable(t, phi));
    } else if (strategy == "r-hindman") {
        const auto d = SparseBasis::make(parse_set_literal(require(c.basis, "--basis")));
        const auto phi = load_pair_coloring(phi_name, c.phi_window ? c.phi_window : c.ground, c.seed);
        body["basis"] = to_json(d.elements());
        const auto t = defeat_r_hindman(phi, d, c.budget);
        emit(t, check_hnr_conditions(t, phi, d));
        if (c.closing) {
            try {
                body["closing"] = to_json(replay_final_contradiction(t, phi, d, parse_set_literal(*c.closing)));
            } catch (const SearchExhausted &) {
                throw;
            } catch (const Error & e) {
                if (e.code() != ErrorCode::NoSuchC)
                    throw;
                body["closing"] = Json{{"error", error_json(e)}};
            }
        }
    } else {
        throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + strategy + "'");
    }
    return {std::move(body)};
}

inline FiniteIdealSpec side_spec(const CommandConfig & c, const std::optional<std::string> & ideal, const CarrierArgs & a,
                                 const char * flag, const char * prefix)
{
    return FiniteIdealSpec(parse_ideal(require(ideal, flag)), c.params, build_carrier(a, std::nullopt, prefix));
}

inline Json side_json(const FiniteIdealSpec & s)
{
    return Json{{"ideal", std::string(ideal_name(s.id()))}, {"carrier", carrier_json(s.carrier())}};
}

inline Outcome run_search(const CommandConfig & c)
{
    const auto src = side_spec(c, c.src_ideal, c.src, "--src-ideal", "src-");
    const auto dst = side_spec(c, c.dst_ideal, c.dst, "--dst-ideal", "dst-");
    const auto result = search_reduction(src, dst, ReductionBudget{c.search_nodes, c.threads});
    Json body{{"params", params_json(c.params)}, {"src", side_json(src)}, {"dst", side_json(dst)}};
    body["outcome"] = outcome_name(result.outcome);
    body["map"] = result.map ? Json(result.map->image) : Json(nullptr);
    if (result.map)
        body["verification"] = to_json(verify_reduction(*result.map, src, dst));
    body["caveat"] = kFiniteScaleCaveat;
    return {std::move(body), result.outcome == SearchOutcome::Found ? 0 : 2};
}

inline Json read_json_file(const std::string & path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error & e) {
        throw ParseError(e.byte, e.what());
    }
}

/// Smallest nat window covering every point a transcript queries.
inline Nat transcript_nat_window(const Transcript & t)
{
    Nat w = 0;
    for (const auto & s : t.steps)
        for (const auto & q : s.checks)
            for (Nat a : q.args)
                w = std::max(w, a + 1);
    if (t.strategy == "h-summable") {
        Nat total = 0;
        for (Nat b : t.witness)
            total |= b;
        w = std::max(w, total + 1);
    } else if (!t.witness.empty()) {
        w = std::max(w, t.witness.max() + 1);
    }
    return w;
}

inline Outcome run_verify(const CommandConfig & c)
{
    const std::string what = require(c.what, "--what");
    Json body{{"what", what}};
    if (what == "reduction") {
        const auto src = side_spec(c, c.src_ideal, c.src, "--src-ideal", "src-");
        const auto dst = side_spec(c, c.dst_ideal, c.dst, "--dst-ideal", "dst-");
        ReductionCandidate f;
        for (Nat v : parse_list_literal(require(c.map, "--map")))
            f.image.push_back(static_cast<std::size_t>(v));
        body["src"] = side_json(src);
        body["dst"] = side_json(dst);
        body["map"] = f.image;
        body["report"] = to_json(verify_reduction(f, src, dst));
        return {std::move(body)};
    }
    Json doc = read_json_file(require(c.input, "--input"));
    if (doc.contains("body"))
        doc = doc.at("body");
    if (what == "transcript" || what == "hnr") {
        const Json & tj = doc.contains("transcript") ? doc.at("transcript") : doc;
        const Transcript t = transcript_from_json(tj);
        const std::string phi_name = c.phi.value_or(t.phi);
        body["strategy"] = t.strategy;
        body["phi"] = phi_name;
        Report r;
        if (t.strategy == "w-summable") {
            r = reverify_w_summable(t, load_nat_coloring(phi_name, c.phi_window.value_or(transcript_nat_window(t)), c.seed));
        } else if (t.strategy == "h-summable") {
            r = reverify_h_summable(t, load_nat_coloring(phi_name, c.phi_window.value_or(transcript_nat_window(t)), c.seed));
        } else if (t.strategy == "r-summable") {
            r = reverify_r_summable(t, load_pair_coloring(phi_name, c.phi_window.value_or(transcript_nat_window(t)), c.seed));
        } else if (t.strategy == "r-hindman") {
            std::optional<std::string> basis = c.basis;
            if (!basis && doc.contains("basis"))
                basis = doc.at("basis").dump();
            const auto d = SparseBasis::make(basis && basis->front() == '[' ? natset_from_json(Json::parse(*basis))
                                                                          : parse_set_literal(require(basis, "--basis")));
            std::optional<Nat> ground = c.phi_window ? c.phi_window : c.ground;
            if (!ground && !t.nested.empty() && !t.nested.front().empty())
                ground = t.nested.front().max() + 1;
            r = check_hnr_conditions(t, load_pair_coloring(phi_name, ground, c.seed), d);
        } else {
            throw Error(ErrorCode::InvalidArgument, "unknown transcript strategy '" + t.strategy + "'");
        }
        body["report"] = to_json(r);
        return {std::move(body)};
    }
    if (what == "rnh") {
        const auto loaded = bundle_from_json(doc);
        body["case"] = loaded.bundle.index() + 1;
        body["report"] = to_json(check_rnh_conditions(loaded.bundle, loaded.f));
        return {std::move(body)};
    }
    throw Error(ErrorCode::InvalidArgument, "unknown verify target '" + what + "'");
}

} // namespace detail

/// Runs one command. The report goes to `out` (and to --out when given);
/// diagnostics go to `err`. Returns 0, 2 for exhausted searches, 1 for input errors.
inline int run(const CommandConfig & config, std::ostream & out, std::ostream & err)
{
    Json header{{"tool", "idealforge"},
                {"version", kToolVersion},
                {"command", config.subcommand},
                {"threads", config.threads ? config.threads : configured_threads()}};
    detail::Outcome result;
    try {
        config.validate();
        if (config.subcommand == "oracle")
            result = detail::run_oracle(config);
        else if (config.subcommand == "fs")
            result = detail::run_fs(config);
        else if (config.subcommand == "canonize")
            result = detail::run_canonize(config);
        else if (config.subcommand == "adversary")
            result = detail::run_adversary(config);
        else if (config.subcommand == "search")
            result = detail::run_search(config);
        else if (config.subcommand == "verify")
            result = detail::run_verify(config);
        else
            throw Error(ErrorCode::InvalidArgument, "unknown subcommand '" + config.subcommand + "'");
    } catch (const SearchExhausted & e) {
        result = {Json{{"outcome", "exhausted"}, {"error", detail::error_json(e)}}, 2};
        err << e.what() << '\n';
    } catch (const Error & e) {
        result = {Json{{"error", detail::error_json(e)}}, 1};
        err << e.what() << '\n';
    }
    const Json doc{{"header", std::move(header)}, {"body", std::move(result.body)}};
    const std::string text = doc.dump(2) + "\n";
    out << text;
    if (config.out_path) {
        std::ofstream file(*config.out_path, std::ios::binary);
        if (!file) {
            err << "cannot write " << *config.out_path << '\n';
            return 1;
        }
        file << text;
    }
    return result.code;
}

/// argv front end: parse, run, map flag errors to exit code 1.
inline int main_entry(int argc, const char * const * argv, std::ostream & out, std::ostream & err)
{
    std::optional<CommandConfig> config;
    try {
        config = parse_command_line(argc, argv, out);
    } catch (const CLI::ParseError & e) {
        err << "ParseError: " << e.what() << '\n';
        return 1;
    } catch (const Error & e) {
        err << e.what() << '\n';
        return 1;
    }
    return config ? run(*config, out, err) : 0;
}

} // namespace idealforge
