#pragma once

#include "idealforge/error.hpp"
#include "idealforge/natset.hpp"
#include "idealforge/rational.hpp"
#include "idealforge/sparse_fs.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace idealforge {

enum class IdealId { Vdw, Hindman, Ramsey, Summable, Fin, Fin2 };

inline constexpr IdealId kAllIdeals[] = {IdealId::Vdw,      IdealId::Hindman, IdealId::Ramsey,
                                         IdealId::Summable, IdealId::Fin,     IdealId::Fin2};

constexpr std::string_view ideal_name(IdealId id) noexcept
{
    switch (id) {
    case IdealId::Vdw: return "vdw";
    case IdealId::Hindman: return "hindman";
    case IdealId::Ramsey: return "ramsey";
    case IdealId::Summable: return "summable";
    case IdealId::Fin: return "fin";
    case IdealId::Fin2: return "fin2";
    }
    return "?";
}

inline IdealId parse_ideal(std::string_view name)
{
    for (IdealId id : kAllIdeals)
        if (ideal_name(id) == name)
            return id;
    throw Error(ErrorCode::InvalidArgument, "unknown ideal '" + std::string(name) + "'");
}

/// Finite proxies for positivity (membership in the coideal).
struct ScaleParams {
    std::size_t ap_len = 5;
    std::size_t clique_size = 4;
    std::size_t fs_size = 3;
    Rational tau{2};
    Nat window = 64;

    void validate() const
    {
        if (ap_len < 3)
            throw Error(ErrorCode::InvalidArgument, "ap_len must be >= 3");
        if (clique_size < 3)
            throw Error(ErrorCode::InvalidArgument, "clique_size must be >= 3");
        if (fs_size < 2)
            throw Error(ErrorCode::InvalidArgument, "fs_size must be >= 2");
        if (tau.sign() <= 0)
            throw Error(ErrorCode::InvalidArgument, "tau must be positive");
        if (window == 0)
            throw Error(ErrorCode::InvalidArgument, "window must be positive");
    }

    /// FIN-positive sets have at least ceil(window / 2) elements.
    Nat fin_bound() const { return window / 2 + window % 2; }
};

/// Length of the longest arithmetic progression inside A.
inline std::size_t longest_ap(const NatSet & a)
{
    if (a.size() <= 2)
        return a.size();
    std::size_t best = 2;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const Nat d = a[j] - a[i];
            // only start counting at the first term of a maximal run
            if (a[i] >= d && a.contains(a[i] - d))
                continue;
            std::size_t len = 2;
            Nat next = a[j];
            while (!__builtin_add_overflow(next, d, &next) && a.contains(next))
                ++len;
            best = std::max(best, len);
        }
    }
    return best;
}

/// (start, difference) of a k-term progression in A; smallest start, then
/// smallest difference. k = 1 reports difference 1.
inline std::optional<std::pair<Nat, Nat>> find_ap(const NatSet & a, std::size_t k)
{
    if (k == 0)
        throw Error(ErrorCode::InvalidArgument, "find_ap needs k >= 1");
    if (a.empty())
        return std::nullopt;
    if (k == 1)
        return std::pair{a.min(), Nat{1}};
    const Nat top = a.max();
    const Nat steps = k - 1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Nat start = a[i];
        if (a.size() - i < k)
            break;
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const Nat d = a[j] - start;
            if (d > (top - start) / steps)
                break;
            bool ok = true;
            for (Nat t = 2; t < k && ok; ++t)
                ok = a.contains(start + t * d);
            if (ok)
                return std::pair{start, d};
        }
    }
    return std::nullopt;
}

/// Sum over A of 1/(n+1), exactly.
inline Rational reciprocal_sum(const NatSet & a)
{
    Rational s;
    for (Nat n : a)
        s += Rational::harmonic_weight(n);
    return s;
}

namespace detail {

class Bitset {
public:
    explicit Bitset(std::size_t bits = 0) : words_((bits + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
    bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
    std::size_t count() const
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }
    Bitset & operator&=(const Bitset & o)
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= o.words_[i];
        return *this;
    }
    /// Clear bits 0..i inclusive.
    void clear_through(std::size_t i)
    {
        for (std::size_t w = 0; w < i / 64; ++w)
            words_[w] = 0;
        const auto keep = (i % 64 == 63) ? 0 : (~std::uint64_t{0} << (i % 64 + 1));
        words_[i / 64] &= keep;
    }
    /// Lowest set bit at or after i, or npos.
    std::size_t next(std::size_t i) const
    {
        std::size_t w = i / 64;
        if (w >= words_.size())
            return npos;
        std::uint64_t cur = words_[w] & (~std::uint64_t{0} << (i % 64));
        while (true) {
            if (cur)
                return w * 64 + static_cast<std::size_t>(std::countr_zero(cur));
            if (++w == words_.size())
                return npos;
            cur = words_[w];
        }
    }
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<std::uint64_t> words_;
};

inline bool extend_clique(const std::vector<Bitset> & adj, std::size_t k, std::vector<Nat> & current,
                          const Bitset & candidates)
{
    if (current.size() == k)
        return true;
    if (current.size() + candidates.count() < k)
        return false;
    for (std::size_t v = candidates.next(0); v != Bitset::npos; v = candidates.next(v + 1)) {
        Bitset rest = candidates;
        rest.clear_through(v);
        if (current.size() + 1 + rest.count() < k)
            return false;
        rest &= adj[v];
        current.push_back(v);
        if (extend_clique(adj, k, current, rest))
            return true;
        current.pop_back();
    }
    return false;
}

} // namespace detail

/// Lexicographically least k-clique of G. Vertices of degree < k-1 are
/// dropped up front; branches whose candidate pool cannot reach k are cut.
inline std::optional<NatSet> find_clique(const EdgeSet & g, std::size_t k)
{
    if (k == 0)
        throw Error(ErrorCode::InvalidArgument, "find_clique needs k >= 1");
    const std::size_t n = g.ground();
    if (n == 0)
        return std::nullopt;
    if (k == 1)
        return NatSet{0};
    std::vector<detail::Bitset> adj(n, detail::Bitset(n));
    std::vector<std::size_t> degree(n, 0);
    for (const auto & e : g) {
        adj[e.lo].set(e.hi);
        adj[e.hi].set(e.lo);
        ++degree[e.lo];
        ++degree[e.hi];
    }
    detail::Bitset start(n);
    for (std::size_t v = 0; v < n; ++v)
        if (degree[v] + 1 >= k)
            start.set(v);
    std::vector<Nat> current;
    if (!detail::extend_clique(adj, k, current, start))
        return std::nullopt;
    return NatSet::from_sorted(std::move(current));
}

/// Rows n whose column {k : (n,k) in C} has at least t members.
inline NatSet heavy_columns(const GridSet & c, std::size_t t)
{
    if (t == 0)
        throw Error(ErrorCode::InvalidArgument, "heavy_columns needs t >= 1");
    std::map<Nat, std::size_t> counts;
    for (const auto & p : c)
        ++counts[p.row];
    std::vector<Nat> out;
    for (const auto & [row, count] : counts)
        if (count >= t)
            out.push_back(row);
    return NatSet::from_sorted(std::move(out));
}

namespace detail {

inline std::size_t carrier_size(const Carrier & a)
{
    return std::visit([](const auto & s) { return s.size(); }, a);
}

[[noreturn]] inline void carrier_mismatch(IdealId id, const char * got)
{
    throw Error(ErrorCode::CarrierMismatch, std::string(ideal_name(id)) + " does not live on " + got);
}

inline const char * carrier_kind(const Carrier & a)
{
    switch (a.index()) {
    case 0: return "sets of naturals";
    case 1: return "sets of pairs";
    default: return "grid sets";
    }
}

} // namespace detail

/// Finite positivity proxy: is A outside the ideal at scale p?
inline bool is_positive(const Carrier & a, IdealId id, const ScaleParams & p)
{
    switch (id) {
    case IdealId::Vdw:
        if (auto s = std::get_if<NatSet>(&a))
            return longest_ap(*s) >= p.ap_len;
        break;
    case IdealId::Hindman:
        if (auto s = std::get_if<NatSet>(&a))
            return find_fs_subset(*s, p.fs_size).has_value();
        break;
    case IdealId::Summable:
        if (auto s = std::get_if<NatSet>(&a))
            return reciprocal_sum(*s) >= p.tau;
        break;
    case IdealId::Ramsey:
        if (auto g = std::get_if<EdgeSet>(&a))
            return find_clique(*g, p.clique_size).has_value();
        break;
    case IdealId::Fin2:
        if (auto c = std::get_if<GridSet>(&a))
            return !heavy_columns(*c, p.fs_size).empty();
        break;
    case IdealId::Fin:
        return detail::carrier_size(a) >= p.fin_bound();
    }
    detail::carrier_mismatch(id, detail::carrier_kind(a));
}

namespace detail {

inline NatSet greedy_three_ap_free(const NatSet & a, std::size_t target)
{
    std::vector<Nat> kept;
    for (Nat x : a) {
        if (kept.size() == target)
            break;
        bool closes_ap = false;
        for (Nat c : kept) {
            // x would be the top of (2c - x, c, x)
            if (2 * c >= x && std::binary_search(kept.begin(), kept.end(), 2 * c - x)) {
                closes_ap = true;
                break;
            }
        }
        if (!closes_ap)
            kept.push_back(x);
    }
    return NatSet::from_sorted(std::move(kept));
}

inline NatSet greedy_sum_free(const NatSet & a, std::size_t target)
{
    std::vector<Nat> kept; // descending
    for (auto it = a.vec().rbegin(); it != a.vec().rend() && kept.size() < target; ++it) {
        const Nat x = *it;
        bool ok = true;
        for (Nat b : kept) {
            Nat s;
            if (!__builtin_add_overflow(x, b, &s) && std::find(kept.begin(), kept.end(), s) != kept.end()) {
                ok = false;
                break;
            }
        }
        if (ok)
            kept.push_back(x);
    }
    return NatSet(std::move(kept));
}

} // namespace detail

/// A subset of A of size >= target that is not positive at scale p.
///
/// Strategies: VDW greedy 3-AP-free; HINDMAN greedy sum-free from the top;
/// RAMSEY greedy matching; SUMMABLE the `target` largest elements; FIN the
/// `target` smallest elements; FIN2 greedy with every row kept light.
inline Carrier tall_witness(const Carrier & a, IdealId id, const ScaleParams & p, std::size_t target)
{
    if (detail::carrier_size(a) < target)
        throw Error(ErrorCode::InvalidArgument, "tall_witness target exceeds |A|");
    Carrier result;
    switch (id) {
    case IdealId::Vdw: {
        auto s = std::get_if<NatSet>(&a);
        if (!s)
            detail::carrier_mismatch(id, detail::carrier_kind(a));
        result = detail::greedy_three_ap_free(*s, target);
        break;
    }
    case IdealId::Hindman: {
        auto s = std::get_if<NatSet>(&a);
        if (!s)
            detail::carrier_mismatch(id, detail::carrier_kind(a));
        result = detail::greedy_sum_free(*s, target);
        break;
    }
    case IdealId::Summable: {
        auto s = std::get_if<NatSet>(&a);
        if (!s)
            detail::carrier_mismatch(id, detail::carrier_kind(a));
        result = NatSet::from_sorted(std::vector<Nat>(s->end() - static_cast<std::ptrdiff_t>(target), s->end()));
        break;
    }
    case IdealId::Fin: {
        if (target >= p.fin_bound())
            throw Error(ErrorCode::CannotAvoid, "any " + std::to_string(target) + " points are FIN-positive");
        if (auto s = std::get_if<NatSet>(&a))
            result = s->prefix(target);
        else if (auto g = std::get_if<EdgeSet>(&a))
            result = EdgeSet(g->ground(), std::vector<Edge>(g->begin(), g->begin() + static_cast<std::ptrdiff_t>(target)));
        else {
            const auto & c = std::get<GridSet>(a);
            result = GridSet(std::vector<GridPoint>(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(target)));
        }
        break;
    }
    case IdealId::Ramsey: {
        auto g = std::get_if<EdgeSet>(&a);
        if (!g)
            detail::carrier_mismatch(id, detail::carrier_kind(a));
        std::vector<Edge> matching;
        std::vector<bool> used(g->ground(), false);
        for (const auto & e : *g) {
            if (matching.size() == target)
                break;
            if (!used[e.lo] && !used[e.hi]) {
                used[e.lo] = used[e.hi] = true;
                matching.push_back(e);
            }
        }
        result = EdgeSet(g->ground(), std::move(matching));
        break;
    }
    case IdealId::Fin2: {
        auto c = std::get_if<GridSet>(&a);
        if (!c)
            detail::carrier_mismatch(id, detail::carrier_kind(a));
        std::map<Nat, std::size_t> per_row;
        std::vector<GridPoint> kept;
        for (const auto & pt : *c) {
            if (kept.size() == target)
                break;
            if (per_row[pt.row] + 1 < p.fs_size) {
                ++per_row[pt.row];
                kept.push_back(pt);
            }
        }
        result = GridSet(std::move(kept));
        break;
    }
    }
    if (detail::carrier_size(result) < target)
        throw Error(ErrorCode::CannotAvoid, std::string(ideal_name(id)) + " strategy found only " +
                                                std::to_string(detail::carrier_size(result)) + " of " +
                                                std::to_string(target) + " elements");
    if (is_positive(result, id, p))
        throw Error(ErrorCode::CannotAvoid, std::string(ideal_name(id)) + " strategy output is still positive");
    return result;
}

} // namespace idealforge
