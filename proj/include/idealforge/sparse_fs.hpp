#pragma once

#include "idealforge/error.hpp"
#include "idealforge/natset.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace idealforge {

/// Largest base for which FS / sparseness are enumerated (2^24 subset sums).
inline constexpr std::size_t kFsLimit = 24;
/// Largest base for the quadratic very-sparse pair scan.
inline constexpr std::size_t kVerySparseLimit = 16;
/// Largest non-binary SparseBasis (its decomposition table has 2^m entries).
inline constexpr std::size_t kSparseTableLimit = 20;

namespace detail {

inline void require_fs_size(std::size_t size, std::size_t limit, const char * what)
{
    if (size > limit)
        throw Error(ErrorCode::TooLarge, std::string(what) + ": base of " + std::to_string(size) +
                                             " elements exceeds limit " + std::to_string(limit));
}

/// sums[mask] = sum of the elements selected by mask; sums[0] = 0.
inline std::vector<Nat> subset_sums(std::span<const Nat> elements)
{
    Nat total = 0;
    for (Nat x : elements)
        total = checked_add(total, x);
    const std::size_t count = std::size_t{1} << elements.size();
    std::vector<Nat> sums(count, 0);
    for (std::size_t mask = 1; mask < count; ++mask) {
        const auto low = static_cast<std::size_t>(std::countr_zero(mask));
        sums[mask] = sums[mask & (mask - 1)] + elements[low];
    }
    return sums;
}

} // namespace detail

/// FS(B): all sums of nonempty subsets of distinct elements of B.
inline NatSet fs(const NatSet & base)
{
    detail::require_fs_size(base.size(), kFsLimit, "fs");
    auto sums = detail::subset_sums(base.elements());
    sums.erase(sums.begin());
    return NatSet(std::move(sums));
}

/// True iff the nonempty subset sums of D are pairwise distinct.
inline bool is_sparse(const NatSet & d)
{
    detail::require_fs_size(d.size(), kFsLimit, "is_sparse");
    auto sums = detail::subset_sums(d.elements());
    sums.erase(sums.begin());
    std::sort(sums.begin(), sums.end());
    return std::adjacent_find(sums.begin(), sums.end()) == sums.end();
}

/// Decomposition relative to E = {2^n}: the powers of two in x's binary expansion.
inline NatSet binary_alpha(Nat x)
{
    std::vector<Nat> out;
    while (x) {
        const Nat low = x & (~x + 1);
        out.push_back(low);
        x ^= low;
    }
    return NatSet::from_sorted(std::move(out));
}

/// min alpha(x) for base E; 0 for x = 0.
constexpr Nat min_alpha(Nat x) noexcept { return x & (~x + 1); }
/// max alpha(x) for base E; 0 for x = 0.
constexpr Nat max_alpha(Nat x) noexcept { return x ? std::bit_floor(x) : 0; }

/// Sparse set together with its decomposition map alpha_D.
///
/// Subsets of D are represented as bitmasks over the increasing enumeration
/// of D. Bases made only of powers of two decompose by binary expansion and
/// carry no table; other bases keep every subset sum sorted for lookup.
class SparseBasis {
public:
    using Mask = std::uint32_t;

    static SparseBasis make(NatSet elements)
    {
        SparseBasis b;
        b.elements_ = std::move(elements);
        b.binary_ = std::all_of(b.elements_.begin(), b.elements_.end(), [](Nat x) { return std::has_single_bit(x); });
        if (b.binary_) {
            if (b.elements_.size() > 32)
                throw Error(ErrorCode::TooLarge, "binary sparse basis wider than 32 elements");
            return b;
        }
        detail::require_fs_size(b.elements_.size(), kSparseTableLimit, "SparseBasis");
        const auto sums = detail::subset_sums(b.elements_.elements());
        b.table_.reserve(sums.size() - 1);
        for (std::size_t mask = 1; mask < sums.size(); ++mask)
            b.table_.emplace_back(sums[mask], static_cast<Mask>(mask));
        std::sort(b.table_.begin(), b.table_.end());
        for (std::size_t i = 1; i < b.table_.size(); ++i)
            if (b.table_[i].first == b.table_[i - 1].first)
                throw Error(ErrorCode::NotSparse, b.elements_.str() + " has two decompositions of " +
                                                      std::to_string(b.table_[i].first));
        return b;
    }

    const NatSet & elements() const noexcept { return elements_; }
    std::size_t size() const noexcept { return elements_.size(); }
    bool is_binary() const noexcept { return binary_; }

    /// Mask of alpha_D(x), or nullopt when x is not in FS(D).
    std::optional<Mask> mask_of(Nat x) const
    {
        if (x == 0)
            return std::nullopt;
        if (binary_) {
            Mask mask = 0;
            while (x) {
                const Nat low = x & (~x + 1);
                const auto i = elements_.index_of(low);
                if (i == elements_.size())
                    return std::nullopt;
                mask |= Mask{1} << i;
                x ^= low;
            }
            return mask;
        }
        auto it = std::lower_bound(table_.begin(), table_.end(), std::pair<Nat, Mask>{x, 0});
        if (it == table_.end() || it->first != x)
            return std::nullopt;
        return it->second;
    }

    bool in_fs(Nat x) const { return mask_of(x).has_value(); }

    Mask require_mask(Nat x) const
    {
        auto m = mask_of(x);
        if (!m)
            throw Error(ErrorCode::NotInFS, std::to_string(x) + " is not in FS(" + elements_.str() + ")");
        return *m;
    }

    NatSet subset(Mask mask) const
    {
        std::vector<Nat> out;
        for (std::size_t i = 0; i < elements_.size(); ++i)
            if (mask & (Mask{1} << i))
                out.push_back(elements_[i]);
        return NatSet::from_sorted(std::move(out));
    }

    Nat sum_of(Mask mask) const
    {
        Nat s = 0;
        for (std::size_t i = 0; i < elements_.size(); ++i)
            if (mask & (Mask{1} << i))
                s += elements_[i];
        return s;
    }

    /// Every element of FS(D) with its decomposition mask, ascending by value.
    std::vector<std::pair<Nat, Mask>> fs_with_masks() const
    {
        if (!binary_)
            return table_;
        detail::require_fs_size(elements_.size(), kFsLimit, "SparseBasis::fs_with_masks");
        const auto sums = detail::subset_sums(elements_.elements());
        std::vector<std::pair<Nat, Mask>> out;
        out.reserve(sums.size() - 1);
        for (std::size_t mask = 1; mask < sums.size(); ++mask)
            out.emplace_back(sums[mask], static_cast<Mask>(mask));
        std::sort(out.begin(), out.end());
        return out;
    }

    NatSet fs() const
    {
        std::vector<Nat> out;
        for (const auto & [x, m] : fs_with_masks())
            out.push_back(x);
        return NatSet::from_sorted(std::move(out));
    }

    friend bool operator==(const SparseBasis & a, const SparseBasis & b) { return a.elements_ == b.elements_; }

private:
    NatSet elements_;
    bool binary_ = false;
    std::vector<std::pair<Nat, Mask>> table_;
};

/// alpha_D(x): the unique subset of D summing to x.
inline NatSet alpha(const SparseBasis & d, Nat x) { return d.subset(d.require_mask(x)); }

struct VerySparseFlag {
    bool verified = false;
    std::optional<std::pair<Nat, Nat>> counterexample;
};

/// Checks: for all x, y in FS(D), alpha(x) and alpha(y) overlapping forces
/// x + y outside FS(D). Pairs x < y are scanned lexicographically before the
/// diagonal x = y, and the first offender is reported.
inline VerySparseFlag is_very_sparse(const NatSet & d)
{
    detail::require_fs_size(d.size(), kVerySparseLimit, "is_very_sparse");
    const auto basis = SparseBasis::make(d); // NotSparse propagates
    const auto sums = basis.fs_with_masks();
    auto in_fs = [&](Nat a, Nat b) {
        Nat s;
        if (__builtin_add_overflow(a, b, &s))
            return false;
        return std::binary_search(sums.begin(), sums.end(), std::pair<Nat, SparseBasis::Mask>{s, 0},
                                  [](const auto & l, const auto & r) { return l.first < r.first; });
    };
    for (std::size_t i = 0; i < sums.size(); ++i)
        for (std::size_t j = i + 1; j < sums.size(); ++j)
            if ((sums[i].second & sums[j].second) && in_fs(sums[i].first, sums[j].first))
                return {false, std::pair{sums[i].first, sums[j].first}};
    for (const auto & [x, m] : sums)
        if (in_fs(x, x))
            return {false, std::pair{x, x}};
    return {true, std::nullopt};
}

/// Greedy very sparse subset: scan the pool upward and keep x whenever
/// x > 2 * (sum of the kept elements). Such sequences have unique
/// representations with digits 0..2, so the result is very sparse; the
/// result is re-verified anyway.
inline SparseBasis very_sparse_subset(const NatSet & pool, std::size_t k)
{
    if (pool.empty() || k == 0)
        throw Error(ErrorCode::InvalidArgument, "very_sparse_subset needs a nonempty pool and k >= 1");
    detail::require_fs_size(k, kVerySparseLimit, "very_sparse_subset");
    std::vector<Nat> chosen;
    Nat sum = 0;
    for (Nat x : pool) {
        if (chosen.size() == k)
            break;
        Nat twice;
        if (__builtin_mul_overflow(sum, Nat{2}, &twice))
            break;
        if (x > twice) {
            chosen.push_back(x);
            sum = detail::checked_add(sum, x);
        }
    }
    if (chosen.size() < k)
        throw Error(ErrorCode::PoolExhausted, "greedy growth rule reached only " + std::to_string(chosen.size()) +
                                                  " of " + std::to_string(k) + " elements in " + pool.str());
    NatSet result = NatSet::from_sorted(std::move(chosen));
    if (!is_very_sparse(result).verified)
        throw Error(ErrorCode::NotVerySparse, "greedy output failed verification: " + result.str());
    return SparseBasis::make(std::move(result));
}

namespace detail {

inline bool extend_fs_subset(const NatSet & a, std::size_t k, std::size_t start, std::vector<Nat> & chosen,
                             std::vector<Nat> & sums)
{
    if (chosen.size() == k)
        return true;
    const std::size_t need = k - chosen.size();
    for (std::size_t i = start; i + need <= a.size(); ++i) {
        const Nat x = a[i];
        const std::size_t old = sums.size();
        bool ok = true;
        for (std::size_t s = 0; s < old; ++s) {
            Nat t;
            if (__builtin_add_overflow(sums[s], x, &t) || !a.contains(t)) {
                ok = false;
                break;
            }
            sums.push_back(t);
        }
        if (ok) {
            sums.push_back(x);
            chosen.push_back(x);
            if (extend_fs_subset(a, k, i + 1, chosen, sums))
                return true;
            chosen.pop_back();
        }
        sums.resize(old);
    }
    return false;
}

} // namespace detail

/// Lexicographically least B subset of A with |B| = k and FS(B) inside A.
inline std::optional<NatSet> find_fs_subset(const NatSet & a, std::size_t k)
{
    if (k == 0)
        throw Error(ErrorCode::InvalidArgument, "find_fs_subset needs k >= 1");
    if (k > 63)
        throw Error(ErrorCode::TooLarge, "find_fs_subset basis size");
    std::vector<Nat> chosen;
    std::vector<Nat> sums;
    if (!detail::extend_fs_subset(a, k, 0, chosen, sums))
        return std::nullopt;
    return NatSet::from_sorted(std::move(chosen));
}

/// {x in FS(D) : alpha_D(x) meets alpha_D(y)}.
inline NatSet conflict_set(const SparseBasis & d, Nat y)
{
    const auto ym = d.require_mask(y);
    std::vector<Nat> out;
    for (const auto & [x, m] : d.fs_with_masks())
        if (m & ym)
            out.push_back(x);
    return NatSet::from_sorted(std::move(out));
}

} // namespace idealforge
