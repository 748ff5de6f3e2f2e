#pragma once

#include "idealforge/error.hpp"
#include "idealforge/natset.hpp"
#include "idealforge/sparse_fs.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace idealforge {

enum class CanonicalCase { Const, Min, Max, MinMax, Inj };

inline constexpr CanonicalCase kAllCases[] = {CanonicalCase::Const, CanonicalCase::Min, CanonicalCase::Max,
                                              CanonicalCase::MinMax, CanonicalCase::Inj};

constexpr std::string_view case_name(CanonicalCase c) noexcept
{
    switch (c) {
    case CanonicalCase::Const: return "CONST";
    case CanonicalCase::Min: return "MIN";
    case CanonicalCase::Max: return "MAX";
    case CanonicalCase::MinMax: return "MINMAX";
    case CanonicalCase::Inj: return "INJ";
    }
    return "?";
}

inline CanonicalCase parse_case(std::string_view name)
{
    for (auto c : kAllCases)
        if (case_name(c) == name)
            return c;
    std::string lower(name);
    for (auto c : kAllCases) {
        std::string n(case_name(c));
        std::transform(n.begin(), n.end(), n.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (n == lower)
            return c;
    }
    throw Error(ErrorCode::InvalidArgument, "unknown canonical case '" + std::string(name) + "'");
}

/// Cantor pairing, checked.
inline Nat cantor_pair(Nat a, Nat b)
{
    const Nat s = detail::checked_add(a, b);
    const Nat t = detail::checked_mul(s, detail::checked_add(s, 1));
    return detail::checked_add(t / 2, b);
}

/// Total map from unordered pairs {i,j}, i<j<n, to naturals.
class PairColoring {
public:
    PairColoring() = default;

    PairColoring(std::size_t n, std::vector<Nat> table, std::string name = "table")
        : n_(n), table_(std::make_shared<const std::vector<Nat>>(std::move(table))), name_(std::move(name))
    {
        if (table_->size() != pair_count(n))
            throw Error(ErrorCode::Incomplete, "pair table has " + std::to_string(table_->size()) + " entries, need " +
                                                   std::to_string(pair_count(n)));
    }

    /// Tabulates fn(i, j) for i < j < n.
    template <class Fn>
    static PairColoring tabulate(std::size_t n, Fn && fn, std::string name = "table")
    {
        std::vector<Nat> t;
        t.reserve(pair_count(n));
        for (Nat j = 1; j < n; ++j)
            for (Nat i = 0; i < j; ++i)
                t.push_back(fn(i, j));
        return PairColoring(n, std::move(t), std::move(name));
    }

    static PairColoring constant(std::size_t n, Nat v)
    {
        return tabulate(n, [v](Nat, Nat) { return v; }, "const:" + std::to_string(v));
    }
    static PairColoring min(std::size_t n) { return tabulate(n, [](Nat i, Nat) { return i; }, "min"); }
    static PairColoring max(std::size_t n) { return tabulate(n, [](Nat, Nat j) { return j; }, "max"); }
    static PairColoring pairing(std::size_t n) { return tabulate(n, cantor_pair, "pairing"); }

    static constexpr std::size_t pair_count(std::size_t n) noexcept { return n < 2 ? 0 : n * (n - 1) / 2; }
    static constexpr std::size_t index(Nat lo, Nat hi) noexcept
    {
        return static_cast<std::size_t>(hi * (hi - 1) / 2 + lo);
    }

    std::size_t ground() const noexcept { return n_; }
    const std::string & name() const noexcept { return name_; }

    Nat at(Edge e) const
    {
        if (e.hi >= n_)
            throw Error(ErrorCode::WindowExceeded, "pair {" + std::to_string(e.lo) + "," + std::to_string(e.hi) +
                                                       "} outside coloring window " + std::to_string(n_));
        return (*table_)[index(e.lo, e.hi)];
    }
    Nat operator()(Nat a, Nat b) const { return at(Edge::of(a, b)); }

private:
    std::size_t n_ = 0;
    std::shared_ptr<const std::vector<Nat>> table_ = std::make_shared<const std::vector<Nat>>();
    std::string name_;
};

/// Total map [0, N) -> naturals, either tabulated or computed.
class NatColoring {
public:
    using Fn = std::function<Nat(Nat)>;

    NatColoring() = default;
    NatColoring(Nat window, Fn fn, std::string name = "custom")
        : window_(window), fn_(std::move(fn)), name_(std::move(name))
    {
        if (!fn_)
            throw Error(ErrorCode::InvalidArgument, "NatColoring needs an evaluator");
    }

    static NatColoring from_table(std::vector<Nat> table, std::string name = "table")
    {
        auto shared = std::make_shared<const std::vector<Nat>>(std::move(table));
        const Nat n = shared->size();
        return NatColoring(n, [shared](Nat x) { return (*shared)[x]; }, std::move(name));
    }

    static NatColoring identity(Nat window) { return NatColoring(window, [](Nat x) { return x; }, "identity"); }
    static NatColoring constant(Nat window, Nat v)
    {
        return NatColoring(window, [v](Nat) { return v; }, "const:" + std::to_string(v));
    }
    static NatColoring square(Nat window)
    {
        return NatColoring(window, [](Nat x) { return detail::checked_mul(x, x); }, "square");
    }
    static NatColoring min_alpha(Nat window) { return NatColoring(window, min_alpha_fn, "min-alpha"); }
    static NatColoring max_alpha(Nat window) { return NatColoring(window, max_alpha_fn, "max-alpha"); }
    /// Injective encoding of (min alpha(x), max alpha(x)).
    static NatColoring minmax_alpha(Nat window)
    {
        return NatColoring(window, [](Nat x) { return cantor_pair(min_alpha_fn(x), max_alpha_fn(x)); }, "minmax-alpha");
    }

    Nat window() const noexcept { return window_; }
    const std::string & name() const noexcept { return name_; }

    Nat operator()(Nat x) const
    {
        if (x >= window_)
            throw Error(ErrorCode::WindowExceeded,
                        "point " + std::to_string(x) + " outside coloring window " + std::to_string(window_));
        return fn_(x);
    }

private:
    static Nat min_alpha_fn(Nat x) { return idealforge::min_alpha(x); }
    static Nat max_alpha_fn(Nat x) { return idealforge::max_alpha(x); }

    Nat window_ = 0;
    Fn fn_;
    std::string name_;
};

/// Ascending c_0 < c_1 < ... with max alpha(c_i) < min alpha(c_{i+1}) in base 2.
class BlockBasis {
public:
    BlockBasis() = default;

    static BlockBasis make(NatSet elements)
    {
        for (std::size_t i = 0; i < elements.size(); ++i) {
            if (elements[i] == 0)
                throw Error(ErrorCode::InvalidArgument, "block basis elements must be positive");
            if (i > 0 && max_alpha(elements[i - 1]) >= min_alpha(elements[i]))
                throw Error(ErrorCode::InvalidArgument, "blocks " + std::to_string(elements[i - 1]) + " and " +
                                                            std::to_string(elements[i]) + " overlap in base 2");
        }
        BlockBasis b;
        b.elements_ = std::move(elements);
        return b;
    }

    /// {2^i : i < m}
    static BlockBasis powers_of_two(std::size_t m)
    {
        if (m > 63)
            throw Error(ErrorCode::TooLarge, "at most 63 binary blocks");
        std::vector<Nat> v;
        for (std::size_t i = 0; i < m; ++i)
            v.push_back(Nat{1} << i);
        return make(NatSet::from_sorted(std::move(v)));
    }

    const NatSet & elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    Nat operator[](std::size_t i) const { return elements_[i]; }
    /// Blocks are bit-disjoint, so FS sums never carry.
    Nat total() const
    {
        Nat s = 0;
        for (Nat c : elements_)
            s |= c;
        return s;
    }

    friend bool operator==(const BlockBasis &, const BlockBasis &) = default;

private:
    NatSet elements_;
};

namespace detail {

using Key = std::pair<Nat, Nat>;

/// phi(x) = phi(y) iff key(x) = key(y) across all sampled points.
inline bool biconditional_holds(std::vector<std::pair<Key, Nat>> rows)
{
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    std::size_t keys = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (i == 0 || rows[i].first != rows[i - 1].first)
            ++keys;
    if (keys != rows.size())
        return false;
    std::vector<Nat> values;
    values.reserve(rows.size());
    for (const auto & r : rows)
        values.push_back(r.second);
    std::sort(values.begin(), values.end());
    return std::adjacent_find(values.begin(), values.end()) == values.end();
}

inline constexpr CanonicalCase kPairCases[] = {CanonicalCase::Const, CanonicalCase::Min, CanonicalCase::Max,
                                               CanonicalCase::Inj};

inline Key pair_key(CanonicalCase c, Nat lo, Nat hi)
{
    switch (c) {
    case CanonicalCase::Const: return {0, 0};
    case CanonicalCase::Min: return {lo, 0};
    case CanonicalCase::Max: return {hi, 0};
    default: return {lo, hi};
    }
}

inline Key fs_key(CanonicalCase c, Nat x)
{
    switch (c) {
    case CanonicalCase::Const: return {0, 0};
    case CanonicalCase::Min: return {min_alpha(x), 0};
    case CanonicalCase::Max: return {max_alpha(x), 0};
    case CanonicalCase::MinMax: return {min_alpha(x), max_alpha(x)};
    case CanonicalCase::Inj: return {x, 0};
    }
    return {0, 0};
}

inline std::optional<CanonicalCase> classify_pairs_unchecked(const PairColoring & phi, std::span<const Nat> t)
{
    std::vector<std::pair<Nat, Nat>> pairs;
    std::vector<Nat> values;
    for (std::size_t j = 1; j < t.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) {
            pairs.emplace_back(t[i], t[j]);
            values.push_back(phi(t[i], t[j]));
        }
    for (auto c : kPairCases) {
        std::vector<std::pair<Key, Nat>> rows;
        rows.reserve(pairs.size());
        for (std::size_t p = 0; p < pairs.size(); ++p)
            rows.emplace_back(pair_key(c, pairs[p].first, pairs[p].second), values[p]);
        if (biconditional_holds(std::move(rows)))
            return c;
    }
    return std::nullopt;
}

inline std::vector<Nat> block_sums(std::span<const Nat> blocks)
{
    std::vector<Nat> out;
    out.reserve((std::size_t{1} << blocks.size()) - 1);
    for (Nat c : blocks) {
        const std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i)
            out.push_back(out[i] | c);
        out.push_back(c);
    }
    return out;
}

inline std::optional<CanonicalCase> classify_fs_unchecked(const NatColoring & phi, std::span<const Nat> blocks)
{
    const auto points = block_sums(blocks);
    std::vector<Nat> values;
    values.reserve(points.size());
    for (Nat x : points)
        values.push_back(phi(x));
    for (auto c : kAllCases) {
        std::vector<std::pair<Key, Nat>> rows;
        rows.reserve(points.size());
        for (std::size_t p = 0; p < points.size(); ++p)
            rows.emplace_back(fs_key(c, points[p]), values[p]);
        if (biconditional_holds(std::move(rows)))
            return c;
    }
    return std::nullopt;
}

} // namespace detail

/// Which of CONST, MIN, MAX, INJ describes phi exactly on [T]^2.
inline std::optional<CanonicalCase> classify_pairs_on(const PairColoring & phi, const NatSet & t)
{
    if (t.size() < 3)
        throw Error(ErrorCode::TooSmall, "pair classification needs |T| >= 3");
    if (t.max() >= phi.ground())
        throw Error(ErrorCode::WindowExceeded, "T leaves the coloring window");
    return detail::classify_pairs_unchecked(phi, t.elements());
}

namespace detail {

inline bool extend_canonical(const PairColoring & phi, std::size_t m, std::vector<Nat> & chosen,
                             std::optional<CanonicalCase> & found)
{
    if (chosen.size() >= 3) {
        found = classify_pairs_unchecked(phi, chosen);
        if (!found)
            return false;
    }
    if (chosen.size() == m)
        return true;
    const Nat start = chosen.empty() ? 0 : chosen.back() + 1;
    for (Nat v = start; v + (m - chosen.size()) <= phi.ground(); ++v) {
        chosen.push_back(v);
        if (extend_canonical(phi, m, chosen, found))
            return true;
        chosen.pop_back();
    }
    return false;
}

} // namespace detail

/// Lexicographically least m-subset of [0,n) on which phi is canonical.
inline std::optional<std::pair<NatSet, CanonicalCase>> find_canonical_subset(const PairColoring & phi, std::size_t m)
{
    if (m < 3 || m > phi.ground())
        throw Error(ErrorCode::InvalidArgument, "find_canonical_subset needs 3 <= m <= n");
    std::vector<Nat> chosen;
    std::optional<CanonicalCase> found;
    if (!detail::extend_canonical(phi, m, chosen, found))
        return std::nullopt;
    return std::pair{NatSet::from_sorted(std::move(chosen)), *found};
}

/// Which of the five block patterns describes phi exactly on FS(C).
inline std::optional<CanonicalCase> classify_fs_on(const NatColoring & phi, const BlockBasis & c)
{
    if (c.size() < 3)
        throw Error(ErrorCode::TooSmall, "block classification needs |C| >= 3");
    detail::require_fs_size(c.size(), kFsLimit, "classify_fs_on");
    if (c.total() >= phi.window())
        throw Error(ErrorCode::WindowExceeded,
                    "FS(C) reaches " + std::to_string(c.total()) + ", window is " + std::to_string(phi.window()));
    return detail::classify_fs_unchecked(phi, c.elements().elements());
}

namespace detail {

inline bool extend_block(const NatColoring & phi, const BlockBasis & pool, std::size_t m, std::size_t next,
                         std::vector<Nat> & chosen, Nat total, std::optional<CanonicalCase> & found)
{
    if (chosen.size() >= 3) {
        found = classify_fs_unchecked(phi, chosen);
        if (!found)
            return false;
    }
    if (chosen.size() == m)
        return true;
    for (std::size_t i = next; i + (m - chosen.size()) <= pool.size(); ++i) {
        const Nat t = total | pool[i];
        if (t >= phi.window())
            break; // later blocks are larger still
        chosen.push_back(pool[i]);
        if (extend_block(phi, pool, m, i + 1, chosen, t, found))
            return true;
        chosen.pop_back();
    }
    return false;
}

} // namespace detail

/// Least m-element sub-basis of pool (by index order) on which phi is
/// canonical. Blocks whose sums leave phi's window are never used.
inline std::optional<std::pair<BlockBasis, CanonicalCase>> find_block_basis(const NatColoring & phi,
                                                                            const BlockBasis & pool, std::size_t m)
{
    if (m < 3)
        throw Error(ErrorCode::InvalidArgument, "find_block_basis needs m >= 3");
    detail::require_fs_size(m, kFsLimit, "find_block_basis");
    std::vector<Nat> chosen;
    std::optional<CanonicalCase> found;
    if (!detail::extend_block(phi, pool, m, 0, chosen, 0, found))
        return std::nullopt;
    return std::pair{BlockBasis::make(NatSet::from_sorted(std::move(chosen))), *found};
}

} // namespace idealforge
