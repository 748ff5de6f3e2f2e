#pragma once

// Brute-force oracles, seeded generators and hand-built bundles shared by the
// unit tests and the acceptance binary. Nothing here calls the search or
// classification code it is used to check.

#include "idealforge/adversary.hpp"
#include "idealforge/canonical.hpp"
#include "idealforge/ideal_core.hpp"
#include "idealforge/reduction_search.hpp"
#include "idealforge/sparse_fs.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <vector>

namespace oracle {

using idealforge::Nat;

/// Every subset as (sum, mask), masks over the given order.
inline std::vector<std::pair<Nat, std::uint32_t>> subset_sums(const std::vector<Nat> & d)
{
    std::vector<std::pair<Nat, std::uint32_t>> out;
    for (std::uint32_t m = 1; m < (1u << d.size()); ++m) {
        Nat s = 0;
        for (std::size_t i = 0; i < d.size(); ++i)
            if (m >> i & 1)
                s += d[i];
        out.emplace_back(s, m);
    }
    return out;
}

inline std::set<Nat> fs(const std::vector<Nat> & d)
{
    std::set<Nat> out;
    for (const auto & [s, m] : subset_sums(d))
        out.insert(s);
    return out;
}

/// All subsets of d summing to x.
inline std::vector<std::uint32_t> decompositions(const std::vector<Nat> & d, Nat x)
{
    std::vector<std::uint32_t> out;
    for (const auto & [s, m] : subset_sums(d))
        if (s == x)
            out.push_back(m);
    return out;
}

inline bool sparse(const std::vector<Nat> & d)
{
    std::map<Nat, int> seen;
    for (const auto & [s, m] : subset_sums(d))
        if (++seen[s] > 1)
            return false;
    return true;
}

/// Definition: x, y in FS(D) with overlapping decompositions never sum into FS(D).
inline bool very_sparse(const std::vector<Nat> & d)
{
    if (!sparse(d))
        return false;
    const auto sums = subset_sums(d);
    const auto all = fs(d);
    for (const auto & [x, mx] : sums)
        for (const auto & [y, my] : sums)
            if ((mx & my) && all.count(x + y))
                return false;
    return true;
}

inline std::size_t longest_ap(const std::vector<Nat> & a)
{
    const std::set<Nat> s(a.begin(), a.end());
    std::size_t best = s.empty() ? 0 : 1;
    for (Nat x : s)
        for (Nat y : s)
            if (y > x) {
                std::size_t len = 2;
                for (Nat z = y + (y - x); s.count(z); z += y - x)
                    ++len;
                best = std::max(best, len);
            }
    return best;
}

inline bool has_clique(const std::set<std::pair<Nat, Nat>> & edges, std::size_t ground, std::size_t k)
{
    if (k == 0)
        return true;
    std::vector<std::size_t> pick(k);
    std::function<bool(std::size_t, std::size_t)> rec = [&](std::size_t depth, std::size_t from) -> bool {
        if (depth == k)
            return true;
        for (std::size_t v = from; v < ground; ++v) {
            bool ok = true;
            for (std::size_t i = 0; i < depth && ok; ++i)
                ok = edges.count({pick[i], v}) > 0;
            if (!ok)
                continue;
            pick[depth] = v;
            if (rec(depth + 1, v + 1))
                return true;
        }
        return false;
    };
    return rec(0, 0);
}

using idealforge::CanonicalCase;

/// Checks each pair pattern straight from its defining biconditional.
inline std::optional<CanonicalCase> classify_pairs(const std::function<Nat(Nat, Nat)> & phi, const std::vector<Nat> & t)
{
    struct P {
        Nat lo, hi, v;
    };
    std::vector<P> pairs;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            pairs.push_back({t[i], t[j], phi(t[i], t[j])});
    auto holds = [&](auto same) {
        for (const auto & a : pairs)
            for (const auto & b : pairs)
                if ((a.v == b.v) != same(a, b))
                    return false;
        return true;
    };
    std::vector<CanonicalCase> ok;
    if (holds([](const P &, const P &) { return true; }))
        ok.push_back(CanonicalCase::Const);
    if (holds([](const P & a, const P & b) { return a.lo == b.lo; }))
        ok.push_back(CanonicalCase::Min);
    if (holds([](const P & a, const P & b) { return a.hi == b.hi; }))
        ok.push_back(CanonicalCase::Max);
    if (holds([](const P & a, const P & b) { return a.lo == b.lo && a.hi == b.hi; }))
        ok.push_back(CanonicalCase::Inj);
    if (ok.size() != 1)
        return std::nullopt;
    return ok.front();
}

/// Same for FS patterns over bit-disjoint blocks; alpha is the block index set.
inline std::optional<CanonicalCase> classify_fs(const std::function<Nat(Nat)> & phi, const std::vector<Nat> & blocks)
{
    struct P {
        std::uint32_t m;
        Nat v;
    };
    std::vector<P> pts;
    for (const auto & [s, m] : subset_sums(blocks))
        pts.push_back({m, phi(s)});
    auto lo = [](std::uint32_t m) { return __builtin_ctz(m); };
    auto hi = [](std::uint32_t m) { return 31 - __builtin_clz(m); };
    auto holds = [&](auto same) {
        for (const auto & a : pts)
            for (const auto & b : pts)
                if ((a.v == b.v) != same(a.m, b.m))
                    return false;
        return true;
    };
    std::vector<CanonicalCase> ok;
    if (holds([](std::uint32_t, std::uint32_t) { return true; }))
        ok.push_back(CanonicalCase::Const);
    if (holds([&](std::uint32_t a, std::uint32_t b) { return lo(a) == lo(b); }))
        ok.push_back(CanonicalCase::Min);
    if (holds([&](std::uint32_t a, std::uint32_t b) { return hi(a) == hi(b); }))
        ok.push_back(CanonicalCase::Max);
    if (holds([&](std::uint32_t a, std::uint32_t b) { return lo(a) == lo(b) && hi(a) == hi(b); }))
        ok.push_back(CanonicalCase::MinMax);
    if (holds([](std::uint32_t a, std::uint32_t b) { return a == b; }))
        ok.push_back(CanonicalCase::Inj);
    if (ok.size() != 1)
        return std::nullopt;
    return ok.front();
}

/// First m-subset of [0,n) in lexicographic order that is canonical.
inline std::optional<std::pair<std::vector<Nat>, CanonicalCase>>
find_canonical_subset(const std::function<Nat(Nat, Nat)> & phi, std::size_t n, std::size_t m)
{
    std::vector<Nat> pick(m);
    std::optional<std::pair<std::vector<Nat>, CanonicalCase>> found;
    std::function<void(std::size_t, Nat)> rec = [&](std::size_t depth, Nat from) {
        if (found)
            return;
        if (depth == m) {
            if (auto c = classify_pairs(phi, pick))
                found = std::pair{pick, *c};
            return;
        }
        for (Nat v = from; v < n && !found; ++v) {
            pick[depth] = v;
            rec(depth + 1, v + 1);
        }
    };
    rec(0, 0);
    return found;
}

/// Is there any map f : dst -> src with f[B] src-positive for every
/// dst-positive B? Every subset is checked, not just minimal ones.
inline bool reduction_exists(const idealforge::FiniteIdealSpec & src, const idealforge::FiniteIdealSpec & dst,
                             std::vector<std::size_t> * witness = nullptr)
{
    const std::size_t ns = src.size(), nd = dst.size();
    std::vector<idealforge::SubsetMask> dst_pos;
    for (idealforge::SubsetMask b = 0; b < (idealforge::SubsetMask{1} << nd); ++b)
        if (dst.positive(b))
            dst_pos.push_back(b);
    std::vector<char> src_pos(std::size_t{1} << ns);
    for (idealforge::SubsetMask m = 0; m < src_pos.size(); ++m)
        src_pos[m] = src.positive(m);
    if (nd == 0)
        return true;
    if (ns == 0)
        return false;
    std::vector<std::size_t> f(nd, 0);
    while (true) {
        bool ok = true;
        for (auto b : dst_pos) {
            idealforge::SubsetMask img = 0;
            for (std::size_t i = 0; i < nd; ++i)
                if (b >> i & 1)
                    img |= idealforge::SubsetMask{1} << f[i];
            if (!src_pos[img]) {
                ok = false;
                break;
            }
        }
        if (ok) {
            if (witness)
                *witness = f;
            return true;
        }
        std::size_t i = 0;
        while (i < nd && ++f[i] == ns)
            f[i++] = 0;
        if (i == nd)
            return false;
    }
}

} // namespace oracle

namespace gen {

using idealforge::Nat;
using idealforge::NatSet;

/// Seeded source for the property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    Nat below(Nat n) { return std::uniform_int_distribution<Nat>(0, n - 1)(rng_); }
    Nat between(Nat lo, Nat hi) { return std::uniform_int_distribution<Nat>(lo, hi)(rng_); }
    bool coin() { return below(2) == 1; }

    NatSet set(std::size_t max_size, Nat bound)
    {
        std::vector<Nat> v(below(max_size + 1));
        for (auto & x : v)
            x = below(bound);
        return NatSet(std::move(v));
    }

    /// Each element above twice the running sum, so every digit sum is unique.
    NatSet very_sparse(std::size_t size, Nat slack = 5)
    {
        std::vector<Nat> v;
        Nat sum = 0;
        for (std::size_t i = 0; i < size; ++i) {
            const Nat x = 2 * sum + 1 + below(slack + 1);
            v.push_back(x);
            sum += x;
        }
        return NatSet::from_sorted(std::move(v));
    }

    /// Random strictly increasing injection [0,n) -> naturals.
    std::vector<Nat> injection(std::size_t n, Nat gap = 1000)
    {
        std::vector<Nat> out;
        std::set<Nat> used;
        while (out.size() < n) {
            const Nat x = below(gap * n + 1);
            if (used.insert(x).second)
                out.push_back(x);
        }
        return out;
    }

    std::mt19937_64 & engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

} // namespace gen

namespace instances {

using namespace idealforge;

inline ScaleParams params(std::size_t ap_len, std::size_t clique, std::size_t fs_size, Rational tau, Nat window)
{
    ScaleParams p;
    p.ap_len = ap_len;
    p.clique_size = clique;
    p.fs_size = fs_size;
    p.tau = tau;
    p.window = window;
    return p;
}

/// Small truncations of every ideal, each under seven points.
inline std::vector<FiniteIdealSpec> micro_specs()
{
    std::vector<FiniteIdealSpec> out;
    for (Nat n = 1; n <= 6; ++n) {
        out.push_back(FiniteIdealSpec::on_segment(IdealId::Vdw, n, params(3, 3, 2, Rational(2), 64)));
        out.push_back(FiniteIdealSpec::on_segment(IdealId::Summable, n, params(3, 3, 2, Rational(3, 2), 64)));
        out.push_back(FiniteIdealSpec::on_segment(IdealId::Fin, n, params(3, 3, 2, Rational(2), n)));
    }
    for (Nat n = 3; n <= 6; ++n)
        out.push_back(FiniteIdealSpec::on_set(IdealId::Hindman, NatSet::range(1, n + 1), params(3, 3, 2, Rational(2), 64)));
    for (std::size_t v : {3, 4})
        out.push_back(FiniteIdealSpec::on_vertices(IdealId::Ramsey, v, params(3, 3, 2, Rational(2), 64)));
    out.push_back(FiniteIdealSpec::on_grid(IdealId::Fin2, GridSet{{0, 0}, {0, 1}, {1, 0}, {1, 1}},
                                           params(3, 3, 2, Rational(2), 64)));
    out.push_back(FiniteIdealSpec::on_grid(IdealId::Fin2, GridSet{{0, 0}, {0, 1}, {0, 2}, {1, 0}, {1, 1}, {2, 0}},
                                           params(3, 3, 2, Rational(2), 64)));
    return out;
}

inline bool within_naive_bound(std::size_t ns, std::size_t nd)
{
    std::size_t maps = 1;
    for (std::size_t i = 0; i < nd; ++i) {
        maps *= ns;
        if (maps > 729)
            return false;
    }
    return true;
}

/// Any three points of [0,5) sum to at most 11/6 < 2, so no 3-AP image is
/// SUMMABLE-positive at tau = 2.
inline std::pair<FiniteIdealSpec, FiniteIdealSpec> impossible_summable()
{
    return {FiniteIdealSpec::on_segment(IdealId::Summable, 5, params(3, 3, 2, Rational(2), 64)),
            FiniteIdealSpec::on_segment(IdealId::Vdw, 5, params(3, 3, 2, Rational(2), 64))};
}

} // namespace instances

namespace bundles {

using namespace idealforge;

/// Second alternative, three steps, every item satisfied.
inline RnhCase2Bundle case2_valid()
{
    RnhCase2Bundle b;
    b.x = {1, 3, 10};
    b.d_seq = {NatSet{3, 9, 27, 81, 243}, NatSet{9, 81, 243}, NatSet{81, 243}};
    b.n = {1, 3, 5};
    b.j = {0, 0, 1};
    b.k = {-1, -1, 0};
    b.f_sets = {NatSet{}, NatSet{}, NatSet{0, 1}};
    return b;
}

inline GammaColoring case2_coloring()
{
    const auto x = SparseBasis::make(NatSet{1, 3, 9, 27, 81, 243});
    const auto tail = fs(NatSet{27, 81, 243});
    return GammaColoring::tabulate(x, [&](Nat y) -> GammaPoint {
        if (y == 10 || (y > 10 && tail.contains(y - 10)))
            return {5, 1};
        const auto m = *x.mask_of(y);
        if (m & 1)
            return {2, 1};
        if (m & 2)
            return {4, 3};
        return {7, 6};
    });
}

/// First alternative, three fragments, every item satisfied.
inline RnhCase1Bundle case1_valid()
{
    RnhCase1Bundle b;
    b.k = 0;
    b.d = NatSet{1, 3, 9, 27, 81};
    b.x = {1, 3, 9};
    b.d_seq = {NatSet{3, 9, 27, 81}, NatSet{9, 27, 81}, NatSet{27, 81}};
    return b;
}

inline GammaColoring case1_coloring()
{
    const auto x = SparseBasis::make(NatSet{1, 3, 9, 27, 81});
    return GammaColoring::tabulate(x, [](Nat y) -> GammaPoint {
        if (y == 1)
            return {5, 1};
        if (y == 3)
            return {6, 2};
        return {1, 0};
    });
}

struct Mutant {
    const char * target;
    RnhBundle bundle;
    GammaColoring f;
};

/// Single-violation variants: each breaks exactly the named item.
inline std::vector<Mutant> mutants()
{
    std::vector<Mutant> out;
    {
        auto b = case2_valid();
        b.d_seq[2] = NatSet{27, 81, 243};
        out.push_back({"b1", b, case2_coloring()});
    }
    out.push_back({"d3a", case2_valid(), case2_coloring().with(10, {6, 1})});
    out.push_back({"c4", case2_valid(), case2_coloring().with(84, {5, 4})});
    out.push_back({"e3", case2_valid(), case2_coloring().with(4, {3, 1})});
    out.push_back({"a2", case2_valid(), case2_coloring().with(4, {5, 1})});
    out.push_back({"f", case1_valid(), case1_coloring().with(27, {5, 1})});
    out.push_back({"e", case1_valid(), case1_coloring().with(28, {5, 1})});
    return out;
}

/// f on [0,8)^2 into FS({1,3,9,27,81}) whose nested construction closes
/// with C = {1,3}.
inline PairColoring closing_coloring()
{
    return PairColoring::tabulate(
        8,
        [](Nat a, Nat b) -> Nat {
            if (a == 0 && b == 1)
                return 1;
            if (a == 0 && b == 2)
                return 3;
            if (a == 1 && b == 2)
                return 4;
            return 81;
        },
        "closing");
}

} // namespace bundles
