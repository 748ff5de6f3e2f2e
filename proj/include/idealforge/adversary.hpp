#pragma once

#include "idealforge/canonical.hpp"
#include "idealforge/error.hpp"
#include "idealforge/ideal_core.hpp"
#include "idealforge/natset.hpp"
#include "idealforge/rational.hpp"
#include "idealforge/report.hpp"
#include "idealforge/sparse_fs.hpp"
#include "idealforge/transcript.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace idealforge {

struct SearchBudget {
    Nat max_element = 65536;
    std::size_t n_max = 10;
    std::size_t candidate_cap = 8;
    std::uint64_t max_nodes = 2'000'000;

    void validate() const
    {
        if (max_element == 0 || n_max == 0 || candidate_cap == 0 || max_nodes == 0)
            throw Error(ErrorCode::InvalidArgument, "search budget fields must be positive");
        if (n_max > 60)
            throw Error(ErrorCode::TooLarge, "n_max above 60 overflows the thresholds");
    }
};

// ---- witness maps into the grid --------------------------------------------

/// x = 2^k (2n + 1)  ->  (k, n).
inline std::pair<Nat, Nat> fin2_to_h_map(Nat x)
{
    if (x == 0)
        throw Error(ErrorCode::ZeroInput, "0 has no 2-adic decomposition");
    const auto k = static_cast<Nat>(std::countr_zero(x));
    return {k, ((x >> k) - 1) / 2};
}

/// {k, i} with k < i  ->  (k, i - k - 1).
inline std::pair<Nat, Nat> fin2_to_r_map(Edge e) { return {e.lo, e.hi - e.lo - 1}; }
inline std::pair<Nat, Nat> fin2_to_r_map(Nat a, Nat b) { return fin2_to_r_map(Edge::of(a, b)); }

/// A_k intersected with [0, limit): the numbers of 2-adic valuation k.
inline NatSet valuation_class(Nat k, Nat limit)
{
    std::vector<Nat> out;
    if (k < 63)
        for (Nat odd = 1;; odd += 2) {
            Nat x;
            if (__builtin_mul_overflow(odd, Nat{1} << k, &x) || x >= limit)
                break;
            out.push_back(x);
        }
    return NatSet::from_sorted(std::move(out));
}

/// Edges {k, i}, k < i < ground: the preimage of row k under fin2_to_r_map.
inline EdgeSet row_star(Nat k, std::size_t ground)
{
    std::vector<Edge> edges;
    for (Nat i = k + 1; i < ground; ++i)
        edges.push_back({k, i});
    return EdgeSet(ground, std::move(edges));
}

// ---- thresholds and majorants ----------------------------------------------

namespace detail {

inline Nat pow2(std::size_t n)
{
    if (n >= 64)
        throw Error(ErrorCode::Overflow, "2^" + std::to_string(n) + " overflows 64 bits");
    return Nat{1} << n;
}

inline Nat n_pow2(std::size_t n) { return checked_mul(n, pow2(n)); }

inline Rational reciprocal_of(Nat v) { return Rational::harmonic_weight(v); }

inline Rational image_sum(const NatSet & image) { return reciprocal_sum(image); }

} // namespace detail

/// sum_{n=1..n_max} n / (n 2^n + 1)
inline Rational w_summable_majorant(std::size_t n_max)
{
    Rational s;
    for (std::size_t n = 1; n <= n_max; ++n)
        s += Rational(static_cast<long>(n)) * detail::reciprocal_of(detail::n_pow2(n));
    return s;
}

/// Majorant for the block construction with steps n = 0..n_max-1.
/// CONST uses the single image value.
inline Rational h_summable_majorant(CanonicalCase c, std::size_t n_max, Nat const_value = 0)
{
    Rational s;
    switch (c) {
    case CanonicalCase::Const: return detail::reciprocal_of(const_value);
    case CanonicalCase::Min:
    case CanonicalCase::Max:
        for (std::size_t n = 0; n < n_max; ++n)
            s += detail::reciprocal_of(detail::pow2(n));
        return s;
    case CanonicalCase::MinMax:
        for (std::size_t n = 0; n < n_max; ++n)
            s += Rational(static_cast<long>(n + 1)) * detail::reciprocal_of(detail::n_pow2(n));
        return s;
    case CanonicalCase::Inj:
        for (std::size_t n = 0; n < n_max; ++n)
            s += Rational(static_cast<long>(detail::pow2(n))) * detail::reciprocal_of(detail::pow2(2 * n));
        return s;
    }
    return s;
}

inline std::string h_summable_formula(CanonicalCase c)
{
    switch (c) {
    case CanonicalCase::Const: return "1/(v+1)";
    case CanonicalCase::Min:
    case CanonicalCase::Max: return "sum_n 1/(2^n+1)";
    case CanonicalCase::MinMax: return "sum_n (n+1)/(n*2^n+1)";
    case CanonicalCase::Inj: return "sum_n 2^n/(2^(2n)+1)";
    }
    return {};
}

/// Majorant for the pair construction with steps n = 0..n_max-1.
inline Rational r_summable_majorant(CanonicalCase c, std::size_t n_max, Nat const_value = 0)
{
    Rational s;
    switch (c) {
    case CanonicalCase::Const: return detail::reciprocal_of(const_value);
    case CanonicalCase::Min:
    case CanonicalCase::Max:
        for (std::size_t n = 0; n < n_max; ++n)
            s += Rational(1, detail::pow2(n));
        return s;
    case CanonicalCase::Inj:
        for (std::size_t n = 0; n < n_max; ++n)
            s += Rational(static_cast<long>(n)) * detail::reciprocal_of(detail::n_pow2(n));
        return s;
    case CanonicalCase::MinMax: break;
    }
    throw Error(ErrorCode::CaseMismatch, "MINMAX is not a pair pattern");
}

inline std::string r_summable_formula(CanonicalCase c)
{
    switch (c) {
    case CanonicalCase::Const: return "1/(v+1)";
    case CanonicalCase::Min:
    case CanonicalCase::Max: return "sum_n 1/2^n";
    case CanonicalCase::Inj: return "sum_n n/(n*2^n+1) <= sum_n 1/2^n";
    case CanonicalCase::MinMax: break;
    }
    return {};
}

// ---- images ----------------------------------------------------------------

inline NatSet image_of(const NatColoring & phi, const NatSet & a)
{
    std::vector<Nat> out;
    out.reserve(a.size());
    for (Nat x : a)
        out.push_back(phi(x));
    return NatSet(std::move(out));
}

/// phi[FS(D)] for a set of bit-disjoint blocks.
inline NatSet block_fs_image(const NatColoring & phi, const NatSet & blocks)
{
    detail::require_fs_size(blocks.size(), kFsLimit, "block_fs_image");
    std::vector<Nat> out;
    for (Nat x : detail::block_sums(blocks.elements()))
        out.push_back(phi(x));
    return NatSet(std::move(out));
}

/// phi[[H]^2]
inline NatSet pair_image(const PairColoring & phi, const NatSet & h)
{
    std::vector<Nat> out;
    for (std::size_t j = 1; j < h.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            out.push_back(phi(h[i], h[j]));
    return NatSet(std::move(out));
}

// ---- summable vs van der Waerden ------------------------------------------

/// For n = 1..n_max pick the first n-term progression F_n among points with
/// phi(x) >= n 2^n. The witness is the union of the F_n.
inline Transcript defeat_w_summable(const NatColoring & phi, const SearchBudget & budget)
{
    budget.validate();
    const Nat limit = std::min(phi.window(), budget.max_element);
    std::vector<Nat> values(limit);
    for (Nat x = 0; x < limit; ++x)
        values[x] = phi(x);

    Transcript t;
    t.strategy = "w-summable";
    t.phi = phi.name();
    std::vector<Nat> all;
    for (std::size_t n = 1; n <= budget.n_max; ++n) {
        const Nat threshold = detail::n_pow2(n);
        std::vector<Nat> good;
        for (Nat x = 0; x < limit; ++x)
            if (values[x] >= threshold)
                good.push_back(x);
        const auto ap = find_ap(NatSet::from_sorted(std::move(good)), n);
        if (!ap)
            throw SearchExhausted(n, limit,
                                  "no " + std::to_string(n) + "-term progression with phi >= " + std::to_string(threshold));
        Step s;
        s.index = n;
        s.threshold = threshold;
        s.window = limit;
        std::vector<Nat> f;
        for (std::size_t i = 0; i < n; ++i) {
            const Nat x = ap->first + i * ap->second;
            f.push_back(x);
            s.checks.push_back({{x}, values[x], threshold, Relation::GreaterEqual});
        }
        all.insert(all.end(), f.begin(), f.end());
        s.chosen = NatSet::from_sorted(std::move(f));
        t.steps.push_back(std::move(s));
    }
    t.witness = NatSet(std::move(all));
    const auto image = image_of(phi, t.witness);
    t.certificate = Certificate{image, detail::image_sum(image), w_summable_majorant(budget.n_max),
                                "sum_{n=1..n_max} n/(n*2^n+1)"};
    return t;
}

// ---- summable vs Hindman ---------------------------------------------------

namespace detail {

inline Step block_step(std::size_t n, Nat c, Nat threshold, Nat window, std::vector<Inequality> checks,
                       std::string note = {})
{
    Step s;
    s.index = n;
    s.chosen = NatSet{c};
    s.threshold = threshold;
    s.window = window;
    s.checks = std::move(checks);
    s.note = std::move(note);
    return s;
}

} // namespace detail

/// Select c_{k_0} < c_{k_1} < ... from C by the rule of the given case and
/// certify phi[FS(D)] against the case majorant.
inline Transcript defeat_h_summable(const NatColoring & phi, const BlockBasis & c, CanonicalCase expected,
                                    const SearchBudget & budget)
{
    budget.validate();
    const auto actual = classify_fs_on(phi, c);
    if (actual != expected)
        throw Error(ErrorCode::CaseMismatch, "phi on FS(C) is " +
                                                 (actual ? std::string(case_name(*actual)) : std::string("not canonical")) +
                                                 ", expected " + std::string(case_name(expected)));
    const Nat window = c.total();
    const std::size_t n_max = budget.n_max;

    Transcript t;
    t.strategy = "h-summable";
    t.phi = phi.name();
    t.canonical_case = expected;

    std::vector<std::size_t> ks;
    std::vector<Nat> chosen;
    auto next_index = [&] { return ks.empty() ? std::size_t{0} : ks.back() + 1; };

    // all pairwise-prefix sums of the chosen blocks, kept as FS(chosen)
    std::vector<Nat> fs_prev;

    // (value, point) over FS(C), for the INJ scan of phi^{-1}[0..m]
    std::vector<std::pair<Nat, Nat>> by_value;
    if (expected == CanonicalCase::Inj) {
        for (Nat x : detail::block_sums(c.elements().elements()))
            by_value.emplace_back(phi(x), x);
        std::sort(by_value.begin(), by_value.end());
    }

    for (std::size_t n = 0; n < n_max; ++n) {
        std::optional<std::size_t> pick;
        Nat threshold = 0;
        std::vector<Inequality> checks;
        std::string note;
        switch (expected) {
        case CanonicalCase::Const:
            if (next_index() < c.size())
                pick = next_index();
            break;
        case CanonicalCase::Min:
        case CanonicalCase::Max:
            threshold = detail::pow2(n);
            for (std::size_t k = next_index(); k < c.size() && !pick; ++k)
                if (phi(c[k]) > threshold) {
                    pick = k;
                    checks.push_back({{c[k]}, phi(c[k]), threshold, Relation::Greater});
                }
            break;
        case CanonicalCase::MinMax:
            threshold = detail::n_pow2(n);
            for (std::size_t k = next_index(); k < c.size() && !pick; ++k) {
                std::vector<Inequality> qs{{{c[k]}, phi(c[k]), threshold, Relation::Greater}};
                for (Nat prev : chosen) {
                    const Nat y = c[k] | prev;
                    qs.push_back({{y}, phi(y), threshold, Relation::Greater});
                }
                if (std::all_of(qs.begin(), qs.end(), [](const Inequality & q) { return q.holds(); })) {
                    pick = k;
                    checks = std::move(qs);
                }
            }
            break;
        case CanonicalCase::Inj: {
            threshold = detail::pow2(2 * n);
            Nat m = threshold;
            for (Nat x : fs_prev)
                m = std::max(m, phi(x));
            m = detail::checked_add(m, 1);
            // F = phi^{-1}[{0..m}] inside FS(C)
            std::optional<Nat> max_f;
            for (const auto & [v, x] : by_value) {
                if (v > m)
                    break;
                max_f = std::max(max_f.value_or(0), x);
            }
            note = "m=" + std::to_string(m) + (max_f ? ", max F=" + std::to_string(*max_f) : ", F empty");
            for (std::size_t k = next_index(); k < c.size() && !pick; ++k) {
                if (max_f && c[k] <= *max_f)
                    continue;
                std::vector<Inequality> qs{{{c[k]}, phi(c[k]), threshold, Relation::Greater}};
                for (Nat x : fs_prev) {
                    const Nat y = c[k] | x;
                    qs.push_back({{y}, phi(y), threshold, Relation::Greater});
                }
                if (std::all_of(qs.begin(), qs.end(), [](const Inequality & q) { return q.holds(); })) {
                    pick = k;
                    checks = std::move(qs);
                }
            }
            break;
        }
        }
        if (!pick)
            throw SearchExhausted(n, window,
                                  std::string(case_name(expected)) + ": no block of C after index " +
                                      std::to_string(next_index()) + " clears threshold " + std::to_string(threshold));
        const Nat ck = c[*pick];
        ks.push_back(*pick);
        const std::size_t old = fs_prev.size();
        for (std::size_t i = 0; i < old; ++i)
            fs_prev.push_back(fs_prev[i] | ck);
        fs_prev.push_back(ck);
        chosen.push_back(ck);
        t.steps.push_back(detail::block_step(n, ck, threshold, window, std::move(checks),
                                             "k=" + std::to_string(*pick) + (note.empty() ? "" : "; " + note)));
    }
    t.witness = NatSet::from_sorted(std::move(chosen));
    const auto image = block_fs_image(phi, t.witness);
    const Nat const_value = image.empty() ? 0 : image.min();
    t.certificate = Certificate{image, detail::image_sum(image), h_summable_majorant(expected, n_max, const_value),
                                h_summable_formula(expected)};
    return t;
}

// ---- summable vs Ramsey ----------------------------------------------------

/// Build H = {t_n : n < n_max} inside T by the rule of the given case and
/// certify phi[[H]^2] against the case majorant.
inline Transcript defeat_r_summable(const PairColoring & phi, const NatSet & tset, CanonicalCase expected,
                                    const SearchBudget & budget)
{
    budget.validate();
    if (expected == CanonicalCase::MinMax)
        throw Error(ErrorCode::CaseMismatch, "MINMAX is not a pair pattern");
    const auto actual = classify_pairs_on(phi, tset);
    if (actual != expected)
        throw Error(ErrorCode::CaseMismatch, "phi on [T]^2 is " +
                                                 (actual ? std::string(case_name(*actual)) : std::string("not canonical")) +
                                                 ", expected " + std::string(case_name(expected)));
    const Nat window = tset.max() + 1;
    const std::size_t n_max = budget.n_max;

    Transcript t;
    t.strategy = "r-summable";
    t.phi = phi.name();
    t.canonical_case = expected;

    std::vector<Nat> hs;
    std::vector<bool> used(tset.size(), false);
    for (std::size_t n = 0; n < n_max; ++n) {
        std::optional<std::size_t> pick;
        Nat threshold = 0;
        std::vector<Inequality> checks;
        for (std::size_t idx = 0; idx < tset.size() && !pick; ++idx) {
            if (used[idx])
                continue;
            const Nat cand = tset[idx];
            switch (expected) {
            case CanonicalCase::Const: pick = idx; break;
            case CanonicalCase::Min: {
                // k_t = phi({t, s}) for any s > t in T
                threshold = detail::pow2(n);
                if (idx + 1 == tset.size())
                    break;
                const Nat v = phi(cand, tset[idx + 1]);
                if (v > threshold) {
                    pick = idx;
                    checks.push_back({{cand, tset[idx + 1]}, v, threshold, Relation::Greater});
                }
                break;
            }
            case CanonicalCase::Max: {
                threshold = detail::pow2(n);
                if (idx == 0)
                    break;
                const Nat v = phi(tset[idx - 1], cand);
                if (v > threshold) {
                    pick = idx;
                    checks.push_back({{tset[idx - 1], cand}, v, threshold, Relation::Greater});
                }
                break;
            }
            case CanonicalCase::Inj: {
                threshold = detail::n_pow2(n);
                std::vector<Inequality> qs;
                for (Nat prev : hs)
                    qs.push_back({{prev, cand}, phi(prev, cand), threshold, Relation::Greater});
                if (std::all_of(qs.begin(), qs.end(), [](const Inequality & q) { return q.holds(); })) {
                    pick = idx;
                    checks = std::move(qs);
                }
                break;
            }
            case CanonicalCase::MinMax: break;
            }
        }
        if (!pick)
            throw SearchExhausted(n, window,
                                  std::string(case_name(expected)) + ": no unused t in T clears threshold " +
                                      std::to_string(threshold));
        used[*pick] = true;
        hs.push_back(tset[*pick]);
        Step s;
        s.index = n;
        s.chosen = NatSet{tset[*pick]};
        s.threshold = threshold;
        s.window = window;
        s.checks = std::move(checks);
        t.steps.push_back(std::move(s));
    }
    t.witness = NatSet(hs);
    const auto image = pair_image(phi, t.witness);
    const Nat const_value = image.empty() ? 0 : image.min();
    t.certificate = Certificate{image, detail::image_sum(image), r_summable_majorant(expected, n_max, const_value),
                                r_summable_formula(expected)};
    return t;
}

// ---- transcript re-verification -------------------------------------------

namespace detail {

template <class Query>
inline void reverify_common(Report & r, const Transcript & t, Query && query, const NatSet & recomputed_image,
                            const Rational & expected_majorant)
{
    std::string first_bad;
    for (const auto & s : t.steps)
        for (const auto & q : s.checks) {
            const Nat v = query(q.args);
            const Inequality fresh{q.args, v, q.bound, q.relation};
            if (first_bad.empty() && (v != q.value || !fresh.holds())) {
                first_bad = "step " + std::to_string(s.index) + ": phi(";
                for (std::size_t i = 0; i < q.args.size(); ++i)
                    first_bad += (i ? "," : "") + std::to_string(q.args[i]);
                first_bad += ")=" + std::to_string(v) + " against bound " + std::to_string(q.bound);
            }
        }
    r.add("inequalities", first_bad.empty(), first_bad);
    if (!t.certificate) {
        r.add("certificate", false, "transcript carries no certificate");
        return;
    }
    const auto & c = *t.certificate;
    r.add("image", c.image == recomputed_image, c.image == recomputed_image ? "" : "recomputed " + recomputed_image.str());
    const Rational sum = reciprocal_sum(recomputed_image);
    r.add("certificate", sum == c.image_sum, sum == c.image_sum ? "" : "recomputed sum " + sum.str());
    r.add("majorant", c.majorant == expected_majorant && sum <= c.majorant,
          "sum " + sum.str() + " vs majorant " + c.majorant.str());
}

} // namespace detail

inline Report reverify_w_summable(const Transcript & t, const NatColoring & phi)
{
    Report r;
    r.subject = "w-summable transcript";
    NatSet f_union;
    bool shapes = true;
    for (const auto & s : t.steps) {
        f_union = set_union(f_union, s.chosen);
        const auto ap = find_ap(s.chosen, s.index);
        shapes = shapes && s.chosen.size() == s.index && ap.has_value();
    }
    r.add("progressions", shapes && f_union == t.witness);
    detail::reverify_common(
        r, t, [&](const std::vector<Nat> & a) { return phi(a.at(0)); }, image_of(phi, t.witness),
        w_summable_majorant(t.steps.size()));
    return r;
}

inline Report reverify_h_summable(const Transcript & t, const NatColoring & phi)
{
    Report r;
    r.subject = "h-summable transcript";
    const auto image = block_fs_image(phi, t.witness);
    const auto c = t.canonical_case.value_or(CanonicalCase::Const);
    detail::reverify_common(
        r, t, [&](const std::vector<Nat> & a) { return phi(a.at(0)); }, image,
        h_summable_majorant(c, t.steps.size(), image.empty() ? 0 : image.min()));
    return r;
}

inline Report reverify_r_summable(const Transcript & t, const PairColoring & phi)
{
    Report r;
    r.subject = "r-summable transcript";
    const auto image = pair_image(phi, t.witness);
    const auto c = t.canonical_case.value_or(CanonicalCase::Const);
    detail::reverify_common(
        r, t, [&](const std::vector<Nat> & a) { return phi(a.at(0), a.at(1)); }, image,
        r_summable_majorant(c, t.steps.size(), image.empty() ? 0 : image.min()));
    return r;
}

// ---- Hindman vs Ramsey -----------------------------------------------------

namespace detail {

struct HindmanSearch {
    const PairColoring & f;
    const std::vector<SparseBasis::Mask> & masks; // per pair index
    SparseBasis::Mask forbidden = 0;              // union of alpha(y), y in f[[b_<n]^2]
    std::vector<std::pair<Nat, Nat>> shifts;      // (b_i, y) for condition (d)
    std::size_t fs_size = 2;
    std::uint64_t max_nodes = 0;
    std::uint64_t nodes = 0;
    std::uint64_t rejected_c = 0;
    std::uint64_t rejected_d = 0;
    bool out_of_budget = false;

    SparseBasis::Mask mask(Nat a, Nat b) const
    {
        const Edge e = Edge::of(a, b);
        return masks[PairColoring::index(e.lo, e.hi)];
    }

    bool extend(const std::vector<Nat> & cands, std::size_t next, std::size_t size, std::vector<Nat> & chosen,
                std::vector<std::vector<Nat>> & images)
    {
        if (chosen.size() == size)
            return true;
        for (std::size_t i = next; i + (size - chosen.size()) <= cands.size(); ++i) {
            if (++nodes > max_nodes) {
                out_of_budget = true;
                return false;
            }
            const Nat b = cands[i];
            bool ok = true;
            for (Nat u : chosen)
                if (mask(u, b) & forbidden) {
                    ok = false;
                    break;
                }
            if (!ok) {
                ++rejected_c;
                continue;
            }
            auto saved = images;
            for (std::size_t s = 0; s < shifts.size() && ok; ++s) {
                const auto [bi, y] = shifts[s];
                const Nat v = f(bi, b);
                if (v < y)
                    continue;
                auto & img = images[s];
                const Nat w = v - y;
                if (std::find(img.begin(), img.end(), w) != img.end())
                    continue;
                img.push_back(w);
                if (img.size() >= fs_size && find_fs_subset(NatSet(img), fs_size))
                    ok = false;
            }
            if (!ok) {
                ++rejected_d;
                images = std::move(saved);
                continue;
            }
            chosen.push_back(b);
            if (extend(cands, i + 1, size, chosen, images))
                return true;
            chosen.pop_back();
            images = std::move(saved);
            if (out_of_budget)
                return false;
        }
        return false;
    }
};

} // namespace detail

/// Bounded replay of the nested construction b_0 < b_1 < ..., B_0 ⊇ B_1 ⊇ ...
/// for f : [W]^2 -> FS(D). B_0 = [0, W), b_0 = 0; for n >= 1, B_n is the
/// lexicographically least subset of B_{n-1} above b_{n-1} of size
/// cap - n + 1 satisfying the conflict-set and shifted-image conditions, and
/// b_n = min B_n.
inline Transcript defeat_r_hindman(const PairColoring & f, const SparseBasis & d, const SearchBudget & budget,
                                   std::size_t fs_size = 2)
{
    budget.validate();
    if (fs_size < 2)
        throw Error(ErrorCode::InvalidArgument, "fs_size must be >= 2");
    if (!is_very_sparse(d.elements()).verified)
        throw Error(ErrorCode::NotVerySparse, d.elements().str() + " is not very sparse");
    const std::size_t w = static_cast<std::size_t>(std::min<Nat>(f.ground(), budget.max_element));
    const std::size_t cap = budget.candidate_cap;
    if (cap < budget.n_max)
        throw Error(ErrorCode::InvalidArgument, "candidate cap must be at least n_max so the nested sets stay nonempty");
    if (w < cap + 1)
        throw Error(ErrorCode::InvalidArgument, "window " + std::to_string(w) + " too small for candidate cap " +
                                                    std::to_string(cap));

    std::vector<SparseBasis::Mask> masks(PairColoring::pair_count(w));
    for (Nat j = 1; j < w; ++j)
        for (Nat i = 0; i < j; ++i)
            masks[PairColoring::index(i, j)] = d.require_mask(f(i, j));

    Transcript t;
    t.strategy = "r-hindman";
    t.phi = f.name();
    std::vector<Nat> bs{0};
    t.nested.push_back(NatSet::range(0, w));
    {
        Step s;
        s.index = 0;
        s.chosen = NatSet{0};
        s.window = w;
        s.note = "B_0 = [0," + std::to_string(w) + ")";
        t.steps.push_back(std::move(s));
    }

    for (std::size_t n = 1; n <= budget.n_max; ++n) {
        std::set<Nat> ys;
        for (std::size_t j = 1; j < bs.size(); ++j)
            for (std::size_t i = 0; i < j; ++i)
                ys.insert(f(bs[i], bs[j]));
        detail::HindmanSearch search{f, masks, 0, {}};
        for (Nat y : ys)
            search.forbidden |= d.require_mask(y);
        for (Nat bi : bs)
            for (Nat y : ys)
                search.shifts.emplace_back(bi, y);
        search.fs_size = fs_size;
        search.max_nodes = budget.max_nodes;

        std::vector<Nat> cands;
        for (Nat b : t.nested.back())
            if (b > bs.back())
                cands.push_back(b);
        const std::size_t size = cap - n + 1;
        std::vector<Nat> chosen;
        std::vector<std::vector<Nat>> images(search.shifts.size());
        if (!search.extend(cands, 0, size, chosen, images)) {
            std::string why;
            if (search.out_of_budget)
                why = "node budget " + std::to_string(budget.max_nodes) + " exhausted";
            else if (cands.size() < size)
                why = "only " + std::to_string(cands.size()) + " candidates for a set of size " + std::to_string(size);
            else if (search.rejected_c >= search.rejected_d)
                why = "(c) conflict-set avoidance";
            else
                why = "(d) shifted image admits an FS basis of size " + std::to_string(fs_size);
            throw SearchExhausted(n, w, why);
        }
        bs.push_back(chosen.front());
        Step s;
        s.index = n;
        s.chosen = NatSet{chosen.front()};
        s.window = w;
        s.note = "|B_" + std::to_string(n) + "| = " + std::to_string(size) + ", " + std::to_string(ys.size()) +
                 " image values constrain";
        t.steps.push_back(std::move(s));
        t.nested.push_back(NatSet::from_sorted(std::move(chosen)));
    }
    t.witness = NatSet::from_sorted(bs);
    return t;
}

/// Itemized check of (a) b_n in B_n and increasing, (b) nesting, (c)
/// conflict-set avoidance and (d) FS-freeness of the shifted images.
inline Report check_hnr_conditions(const std::vector<Nat> & b, const std::vector<NatSet> & bsets, const PairColoring & f,
                                   const SparseBasis & d, std::size_t fs_size = 2)
{
    Report r;
    r.subject = "nested construction conditions";
    if (b.size() != bsets.size()) {
        r.add("shape", false, "|b| = " + std::to_string(b.size()) + " but |B| = " + std::to_string(bsets.size()));
        return r;
    }
    std::string fail_a, fail_b, fail_c, fail_d;
    for (std::size_t n = 0; n < b.size(); ++n) {
        if (fail_a.empty() && !bsets[n].contains(b[n]))
            fail_a = "b_" + std::to_string(n) + " = " + std::to_string(b[n]) + " not in B_" + std::to_string(n);
        if (fail_a.empty() && n + 1 < b.size() && b[n + 1] <= b[n])
            fail_a = "b_" + std::to_string(n + 1) + " <= b_" + std::to_string(n);
        if (fail_b.empty() && n + 1 < b.size() && !bsets[n + 1].is_subset_of(bsets[n]))
            fail_b = "B_" + std::to_string(n + 1) + " not inside B_" + std::to_string(n);
    }
    for (std::size_t n = 0; n < b.size(); ++n) {
        try {
            std::set<Nat> ys;
            for (std::size_t j = 1; j < n; ++j)
                for (std::size_t i = 0; i < j; ++i)
                    ys.insert(f(b[i], b[j]));
            if (ys.empty())
                continue;
            SparseBasis::Mask forbidden = 0;
            for (Nat y : ys)
                forbidden |= d.require_mask(y);
            const auto & bn = bsets[n];
            for (std::size_t q = 1; q < bn.size() && fail_c.empty(); ++q)
                for (std::size_t p = 0; p < q && fail_c.empty(); ++p) {
                    const Nat v = f(bn[p], bn[q]);
                    const auto m = d.mask_of(v);
                    if (!m)
                        fail_c = "f({" + std::to_string(bn[p]) + "," + std::to_string(bn[q]) + "}) = " +
                                 std::to_string(v) + " outside FS(D)";
                    else if (*m & forbidden)
                        fail_c = "f({" + std::to_string(bn[p]) + "," + std::to_string(bn[q]) + "}) = " +
                                 std::to_string(v) + " meets a conflict set at step " + std::to_string(n);
                }
            for (std::size_t i = 0; i < n && fail_d.empty(); ++i) {
                std::vector<Nat> img;
                for (Nat x : bn)
                    if (x != b[i])
                        img.push_back(f(b[i], x));
                const NatSet image(std::move(img));
                for (Nat y : ys) {
                    const auto basis = find_fs_subset(shift_down(image, y), fs_size);
                    if (basis) {
                        fail_d = "step " + std::to_string(n) + ", i = " + std::to_string(i) + ", y = " +
                                 std::to_string(y) + ": FS basis " + basis->str();
                        break;
                    }
                }
            }
        } catch (const Error & e) {
            if (fail_c.empty())
                fail_c = e.what();
        }
    }
    r.add("a", fail_a.empty(), fail_a);
    r.add("b", fail_b.empty(), fail_b);
    r.add("c", fail_c.empty(), fail_c);
    r.add("d", fail_d.empty(), fail_d);
    return r;
}

inline Report check_hnr_conditions(const Transcript & t, const PairColoring & f, const SparseBasis & d,
                                   std::size_t fs_size = 2)
{
    return check_hnr_conditions(t.witness.vec(), t.nested, f, d, fs_size);
}

/// Replays the closing argument on B = {b_n}: for c = min C = f({b_j, b_n})
/// (least such pair), [B]^2 splits into X, Y, Z and FS(C \ {c}) misses
/// f[Z] - c, so FS(C \ {c}) is covered by (f[X] - c) ∪ (f[Y] - c).
inline Report replay_final_contradiction(const Transcript & t, const PairColoring & f, const SparseBasis & d,
                                         const NatSet & c_set)
{
    if (c_set.size() < 2)
        throw Error(ErrorCode::NoSuchC, "C needs at least two elements");
    const auto & b = t.witness;
    const auto image = pair_image(f, b);
    const auto fs_c = fs(c_set);
    if (!fs_c.is_subset_of(image))
        throw Error(ErrorCode::NoSuchC, "FS(" + c_set.str() + ") is not inside f[[B]^2]");
    const Nat c = c_set.min();
    std::optional<std::pair<std::size_t, std::size_t>> jn;
    for (std::size_t n = 1; n < b.size() && !jn; ++n)
        for (std::size_t j = 0; j < n && !jn; ++j)
            if (f(b[j], b[n]) == c)
                jn = std::pair{j, n};
    const auto [j, n] = *jn;

    std::vector<Nat> fx, fy, fz;
    std::size_t cx = 0, cy = 0, cz = 0;
    for (std::size_t q = 1; q < b.size(); ++q)
        for (std::size_t p = 0; p < q; ++p) {
            const Nat v = f(b[p], b[q]);
            if (q <= n) {
                fx.push_back(v);
                ++cx;
            } else if (p <= n) {
                fy.push_back(v);
                ++cy;
            } else {
                fz.push_back(v);
                ++cz;
            }
        }
    const std::size_t total = b.size() * (b.size() - 1) / 2;
    Report r;
    r.subject = "closing argument, c = " + std::to_string(c) + " = f({b_" + std::to_string(j) + ",b_" +
                std::to_string(n) + "})";
    r.add("partition", cx + cy + cz == total,
          "|X|=" + std::to_string(cx) + " |Y|=" + std::to_string(cy) + " |Z|=" + std::to_string(cz) +
              " |[B]^2|=" + std::to_string(total));

    const auto rest = fs(c_set.without(c));
    const auto z_shift = shift_down(NatSet(fz), c);
    const auto meet = set_intersection(rest, z_shift);
    std::string why;
    if (!meet.empty()) {
        const Nat a = meet.min();
        const auto cm = d.mask_of(c);
        const auto am = d.mask_of(a);
        const auto acm = d.mask_of(a + c);
        why = "a = " + std::to_string(a) + " lies in FS(C\\{c}) and f[Z]-c";
        if (cm && am && acm)
            why += "; alpha(a+c) " + std::string((*acm == (*am | *cm)) ? "=" : "!=") + " alpha(a) ∪ alpha(c)";
    }
    r.add("z-disjoint", meet.empty(), why);
    const auto covered = set_union(shift_down(NatSet(fx), c), shift_down(NatSet(fy), c));
    const auto missing = set_difference(rest, covered);
    r.add("cover", missing.empty(), missing.empty() ? "" : "uncovered " + missing.str());
    return r;
}

// ---- Ramsey vs Hindman condition systems ------------------------------------

/// A point (z0, z1) of the ordered view, z0 > z1.
using GammaPoint = std::pair<Nat, Nat>;

/// Total map FS(X) -> Gamma for a very sparse base X.
class GammaColoring {
public:
    GammaColoring(SparseBasis x, std::map<Nat, GammaPoint> table) : x_(std::move(x)), table_(std::move(table))
    {
        for (const auto & [y, p] : table_) {
            if (!x_.in_fs(y))
                throw Error(ErrorCode::NotInFS, std::to_string(y) + " is not in FS(X)");
            if (p.first <= p.second)
                throw Error(ErrorCode::InvalidArgument, "(" + std::to_string(p.first) + "," +
                                                            std::to_string(p.second) + ") is not in Gamma");
        }
        std::vector<Nat> missing;
        for (const auto & [y, m] : x_.fs_with_masks())
            if (!table_.count(y))
                missing.push_back(y);
        if (!missing.empty())
            throw Error(ErrorCode::Incomplete, "no value for " + NatSet(missing).str());
    }

    template <class Fn>
    static GammaColoring tabulate(SparseBasis x, Fn && fn)
    {
        std::map<Nat, GammaPoint> table;
        for (const auto & [y, m] : x.fs_with_masks())
            table[y] = fn(y);
        return GammaColoring(std::move(x), std::move(table));
    }

    const SparseBasis & base() const noexcept { return x_; }
    const std::map<Nat, GammaPoint> & table() const noexcept { return table_; }

    /// f(y), or nothing when y is outside FS(X).
    std::optional<GammaPoint> at(Nat y) const
    {
        auto it = table_.find(y);
        if (it == table_.end())
            return std::nullopt;
        return it->second;
    }

    GammaColoring with(Nat y, GammaPoint p) const
    {
        auto t = table_;
        t[y] = p;
        return GammaColoring(x_, std::move(t));
    }

private:
    SparseBasis x_;
    std::map<Nat, GammaPoint> table_;
};

/// Data for the first alternative: k, D and the fragments x_0.., D_0...
struct RnhCase1Bundle {
    Nat k = 0;
    NatSet d;
    std::vector<Nat> x;
    std::vector<NatSet> d_seq;
};

/// Data for the second alternative; D_{-1} is X.
struct RnhCase2Bundle {
    std::vector<Nat> x;
    std::vector<NatSet> d_seq;
    std::vector<Nat> n;
    std::vector<int> j;
    std::vector<long long> k;
    std::vector<NatSet> f_sets;
};

using RnhBundle = std::variant<RnhCase1Bundle, RnhCase2Bundle>;

namespace detail {

/// Records the first failure per item, keeping declaration order.
class ItemLog {
public:
    explicit ItemLog(std::vector<std::string> ids) : ids_(std::move(ids)) {}

    void fail(const std::string & id, const std::string & why)
    {
        failures_.try_emplace(id, why);
    }
    void check(const std::string & id, bool ok, const std::string & why)
    {
        if (!ok)
            fail(id, why);
    }

    Report finish(std::string subject) const
    {
        Report r;
        r.subject = std::move(subject);
        for (const auto & id : ids_) {
            auto it = failures_.find(id);
            r.add(id, it == failures_.end(), it == failures_.end() ? "" : it->second);
        }
        return r;
    }

private:
    std::vector<std::string> ids_;
    std::map<std::string, std::string> failures_;
};

/// Sparse view of a finite set; empty when the set is not sparse.
struct Fragment {
    NatSet elements;
    NatSet fs;
    std::optional<SparseBasis> basis;
    bool very_sparse = false;

    explicit Fragment(const NatSet & d) : elements(d), fs(idealforge::fs(d))
    {
        try {
            basis = SparseBasis::make(d);
            very_sparse = d.size() <= kVerySparseLimit && is_very_sparse(d).verified;
        } catch (const Error &) {
            basis.reset();
        }
    }

    /// alpha_D(a) meets alpha_D(b); false when either is outside FS(D).
    bool overlap(Nat a, Nat b) const
    {
        if (!basis)
            return false;
        const auto ma = basis->mask_of(a);
        const auto mb = basis->mask_of(b);
        return ma && mb && (*ma & *mb);
    }
};

inline std::string idx(const char * what, long long i) { return std::string(what) + "_" + std::to_string(i); }

/// Sums over nonempty index subsets of `indices`; each entry is (sum, min index).
inline std::vector<std::pair<Nat, std::size_t>> indexed_sums(const std::vector<Nat> & x,
                                                             const std::vector<std::size_t> & indices,
                                                             std::size_t min_size = 1)
{
    if (indices.size() > 16)
        throw Error(ErrorCode::TooLarge, "too many free indices to enumerate");
    std::vector<std::pair<Nat, std::size_t>> out;
    for (std::uint32_t mask = 1; mask < (1u << indices.size()); ++mask) {
        if (static_cast<std::size_t>(std::popcount(mask)) < min_size)
            continue;
        Nat s = 0;
        std::size_t first = indices[static_cast<std::size_t>(std::countr_zero(mask))];
        for (std::size_t b = 0; b < indices.size(); ++b)
            if (mask & (1u << b))
                s = checked_add(s, x[indices[b]]);
        out.emplace_back(s, first);
    }
    return out;
}

inline Report check_rnh_case1(const RnhCase1Bundle & bundle, const GammaColoring & f)
{
    const auto & x = bundle.x;
    if (bundle.d_seq.size() != x.size())
        throw Error(ErrorCode::MalformedBundle, "x and D sequences differ in length");
    ItemLog log({"pre", "a", "b", "c", "d", "e", "f"});
    const NatSet fs_x = f.base().fs();
    const Fragment base(bundle.d);
    log.check("pre", base.very_sparse, "D is not very sparse");
    log.check("pre", base.fs.is_subset_of(fs_x), "FS(D) not inside FS(X)");

    std::vector<Fragment> seq;
    for (const auto & dn : bundle.d_seq)
        seq.emplace_back(dn);
    auto prev = [&](std::size_t n) -> const Fragment & { return n == 0 ? base : seq[n - 1]; };
    auto column_hit = [&](Nat y, std::size_t n) {
        const auto p = f.at(y);
        return p && p->second >= bundle.k + 1 && p->second <= bundle.k + n + 1;
    };

    for (std::size_t n = 0; n < x.size(); ++n) {
        const std::string at = " at n=" + std::to_string(n);
        // (a)
        log.check("a", prev(n).fs.contains(x[n]), idx("x", n) + " not in FS(D_{n-1})" + at);
        for (std::size_t i = 0; i < n; ++i) {
            log.check("a", x[n] != x[i], idx("x", n) + " repeats " + idx("x", i));
            for (std::size_t jj = 0; jj < n; ++jj)
                log.check("a", !seq[jj].overlap(x[n], x[i]),
                          idx("x", n) + " meets alpha of " + idx("x", i) + " in " + idx("D", jj));
        }
        // (b)
        log.check("b", seq[n].very_sparse, idx("D", n) + " is not very sparse");
        // (c)
        const NatSet fs_xs = fs(NatSet(std::vector<Nat>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n + 1))));
        log.check("c", fs_xs.is_subset_of(base.fs), "FS(x_0..x_n) leaves FS(D)" + at);
        // (d)
        log.check("d", seq[n].fs.is_subset_of(prev(n).fs) && prev(n).fs.is_subset_of(base.fs),
                  "FS(D_n) not nested" + at);
        // (e)
        for (Nat xs : fs_xs)
            for (Nat y : seq[n].fs)
                if (column_hit(xs + y, n))
                    log.fail("e", "f(" + std::to_string(xs) + "+" + std::to_string(y) + ") lands in a forbidden column" + at);
        // (f)
        for (Nat y : seq[n].fs)
            if (column_hit(y, n))
                log.fail("f", "f(" + std::to_string(y) + ") lands in a forbidden column" + at);
    }
    return log.finish("first alternative conditions");
}

inline Report check_rnh_case2(const RnhCase2Bundle & bundle, const GammaColoring & f)
{
    const auto & x = bundle.x;
    const std::size_t m = x.size();
    if (bundle.d_seq.size() != m || bundle.n.size() != m || bundle.j.size() != m || bundle.k.size() != m ||
        bundle.f_sets.size() != m)
        throw Error(ErrorCode::MalformedBundle, "bundle sequences differ in length");
    for (std::size_t i = 0; i < m; ++i) {
        if (bundle.j[i] != 0 && bundle.j[i] != 1)
            throw Error(ErrorCode::MalformedBundle, idx("j", i) + " must be 0 or 1");
        if (bundle.k[i] < -1 || bundle.k[i] >= static_cast<long long>(i))
            throw Error(ErrorCode::MalformedBundle, idx("k", i) + " must lie in [-1, i)");
        if (!bundle.f_sets[i].empty() && bundle.f_sets[i].max() >= i)
            throw Error(ErrorCode::MalformedBundle, idx("F", i) + " must lie in [0, i)");
    }
    ItemLog log({"a1", "a2", "b1", "b2", "c1", "c2", "c3", "c4", "d1", "d2", "d3a", "d3b", "d4", "e1", "e2", "e3",
                 "f", "g1", "g2"});
    const NatSet fs_x = f.base().fs();
    const Fragment root(f.base().elements());
    std::vector<Fragment> seq;
    for (const auto & dn : bundle.d_seq)
        seq.emplace_back(dn);
    // D_t for t = -1 .. m-1
    auto frag = [&](long long t) -> const Fragment & { return t < 0 ? root : seq[static_cast<std::size_t>(t)]; };
    auto f_union = [&](std::size_t upto) {
        NatSet u;
        for (std::size_t q = 0; q < upto; ++q)
            u = set_union(u, bundle.f_sets[q]);
        return u;
    };
    auto f_is = [&](Nat y, GammaPoint p) { return f.at(y) == std::optional<GammaPoint>(p); };

    for (std::size_t i = 0; i < m; ++i) {
        const std::string at = " at i=" + std::to_string(i);
        const Nat ni = bundle.n[i];
        // (a)
        log.check("a1", i == 0 || ni > bundle.n[i - 1], "n_i not increasing" + at);
        Nat bound = 0;
        for (Nat s : fs(NatSet(std::vector<Nat>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(i)))))
            if (auto p = f.at(s))
                bound = std::max(bound, p->first);
        log.check("a2", ni > bound, "n_i = " + std::to_string(ni) + " not above " + std::to_string(bound) + at);
        // (b)
        log.check("b1", seq[i].fs.is_subset_of(frag(static_cast<long long>(i) - 1).fs) && seq[i].fs.is_subset_of(fs_x),
                  "FS(D_i) not inside FS(D_{i-1})" + at);
        log.check("b2", seq[i].very_sparse, "D_i is not very sparse" + at);
        const NatSet before = f_union(i);
        const NatSet through = set_union(before, bundle.f_sets[i]);
        if (bundle.j[i] == 0) {
            log.check("c1", bundle.k[i] == -1, "k_i != -1" + at);
            log.check("c2", bundle.f_sets[i].empty(), "F_i nonempty" + at);
            const auto p = f.at(x[i]);
            log.check("c3", frag(static_cast<long long>(i) - 1).fs.contains(x[i]) && p && p->second == ni,
                      "x_i misses FS(D_{i-1}) or column n_i" + at);
            for (Nat y : seq[i].fs) {
                const auto q = f.at(x[i] + y);
                log.check("c4", q && q->second == ni, "f(x_i+" + std::to_string(y) + ") off column n_i" + at);
            }
        } else {
            const long long ki = bundle.k[i];
            const bool valid_k = ki >= 0;
            log.check("d1", valid_k && !before.contains(static_cast<Nat>(ki)) && bundle.j[static_cast<std::size_t>(ki)] == 0,
                      "k_i not an unused index with j = 0" + at);
            if (!valid_k) {
                for (const char * id : {"d2", "d3a", "d3b", "d4"})
                    log.fail(id, "k_i undefined" + at);
            } else {
                const auto kk = static_cast<std::size_t>(ki);
                log.check("d2", bundle.f_sets[i] == NatSet::range(kk, i), "F_i != {k_i..i-1}" + at);
                const GammaPoint target{ni, bundle.n[kk]};
                log.check("d3a", f_is(x[i], target), "f(x_i) != (n_i, n_{k_i})" + at);
                std::vector<std::size_t> between;
                for (std::size_t r = kk + 1; r < i; ++r)
                    if (!before.contains(r))
                        between.push_back(r);
                std::vector<Nat> offsets{0};
                for (const auto & [s, first] : indexed_sums(x, between))
                    offsets.push_back(s);
                bool found = false;
                for (Nat o : offsets) {
                    const Nat base = x[kk] + o;
                    if (x[i] > base && frag(static_cast<long long>(i) - 1).fs.contains(x[i] - base))
                        found = true;
                }
                log.check("d3b", found, "x_i not in x_{k_i} + ({0} ∪ FS(...)) + FS(D_{i-1})" + at);
                for (Nat y : seq[i].fs)
                    log.check("d4", f_is(x[i] + y, target), "f(x_i+" + std::to_string(y) + ") != (n_i, n_{k_i})" + at);
            }
        }
        // (e)
        std::vector<std::size_t> free_before;
        for (std::size_t t = 0; t < i; ++t)
            if (!through.contains(t))
                free_before.push_back(t);
        for (const auto & [s, t0] : indexed_sums(x, free_before)) {
            const GammaPoint target{ni, bundle.n[t0]};
            for (Nat y : seq[i].fs) {
                log.check("e1", !f_is(s + x[i] + y, target), "x+x_i+" + std::to_string(y) + " hits (n_i,n_t0)" + at);
                log.check("e2", !f_is(s + y, target), "x+" + std::to_string(y) + " hits (n_i,n_t0)" + at);
            }
            log.check("e3", !f_is(s + x[i], target), "x+x_i = " + std::to_string(s + x[i]) + " hits (n_i,n_t0)" + at);
        }
        // (f)
        for (long long t = -1; t < static_cast<long long>(i); ++t) {
            const auto & dt = frag(t);
            for (std::size_t u = 0; u <= i; ++u) {
                if (!dt.fs.contains(x[u]))
                    continue;
                for (Nat y : seq[i].fs)
                    log.check("f", !dt.overlap(y, x[u]),
                              std::to_string(y) + " in FS(D_i) meets alpha of " + idx("x", u) + " in " + idx("D", t) + at);
            }
        }
        // (g)
        std::vector<std::size_t> free_through;
        for (std::size_t t = 0; t <= i; ++t)
            if (!through.contains(t))
                free_through.push_back(t);
        for (const auto & [s, t0] : indexed_sums(x, free_through))
            log.check("g1", fs_x.contains(s), "sum " + std::to_string(s) + " outside FS(X)" + at);
        for (const auto & [s, t0] : indexed_sums(x, free_through, 2))
            log.check("g2", s > x[t0] && seq[t0].fs.contains(s - x[t0]),
                      "sum " + std::to_string(s) + " not in x_t0 + FS(D_t0)" + at);
    }
    return log.finish("second alternative conditions");
}

} // namespace detail

/// Itemized verification of the supplied finite fragments.
inline Report check_rnh_conditions(const RnhBundle & bundle, const GammaColoring & f)
{
    if (auto c1 = std::get_if<RnhCase1Bundle>(&bundle))
        return detail::check_rnh_case1(*c1, f);
    return detail::check_rnh_case2(std::get<RnhCase2Bundle>(bundle), f);
}

} // namespace idealforge
