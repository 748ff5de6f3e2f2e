#pragma once

#include "idealforge/error.hpp"
#include "idealforge/ideal_core.hpp"
#include "idealforge/natset.hpp"
#include "idealforge/report.hpp"
#include "idealforge/sparse_fs.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

namespace idealforge {

inline constexpr std::size_t kFamilyCarrierLimit = 20;
inline constexpr std::size_t kFamilyVertexLimit = 8;
inline constexpr std::size_t kSearchCarrierLimit = 10;

inline constexpr const char * kFiniteScaleCaveat =
    "finite truncation: a missing reduction at this scale is evidence, not a proof of non-reducibility";

/// Subsets of a carrier, as bitmasks over carrier indices.
using SubsetMask = std::uint64_t;

/// An ideal restricted to a finite carrier.
class FiniteIdealSpec {
public:
    FiniteIdealSpec(IdealId id, ScaleParams params, Carrier carrier)
        : id_(id), params_(std::move(params)), carrier_(std::move(carrier))
    {
        params_.validate();
        if (size() > 64)
            throw Error(ErrorCode::TooLarge, "finite carriers are capped at 64 points");
        (void)is_positive(subset(0), id_, params_); // rejects carrier mismatches early
    }

    static FiniteIdealSpec on_segment(IdealId id, Nat n, ScaleParams p = {})
    {
        return {id, std::move(p), NatSet::range(0, n)};
    }
    static FiniteIdealSpec on_set(IdealId id, NatSet s, ScaleParams p = {}) { return {id, std::move(p), std::move(s)}; }
    /// All edges of the complete graph on v vertices.
    static FiniteIdealSpec on_vertices(IdealId id, std::size_t v, ScaleParams p = {})
    {
        return {id, std::move(p), EdgeSet::complete(v)};
    }
    static FiniteIdealSpec on_grid(IdealId id, GridSet g, ScaleParams p = {}) { return {id, std::move(p), std::move(g)}; }

    IdealId id() const noexcept { return id_; }
    const ScaleParams & params() const noexcept { return params_; }
    const Carrier & carrier() const noexcept { return carrier_; }
    std::size_t size() const { return detail::carrier_size(carrier_); }
    SubsetMask full() const { return size() == 64 ? ~SubsetMask{0} : (SubsetMask{1} << size()) - 1; }

    Carrier subset(SubsetMask mask) const
    {
        return std::visit(
            [&](const auto & c) -> Carrier {
                using C = std::decay_t<decltype(c)>;
                if constexpr (std::is_same_v<C, NatSet>) {
                    std::vector<Nat> out;
                    for (std::size_t i = 0; i < c.size(); ++i)
                        if (mask >> i & 1)
                            out.push_back(c[i]);
                    return NatSet::from_sorted(std::move(out));
                } else if constexpr (std::is_same_v<C, EdgeSet>) {
                    std::vector<Edge> out;
                    for (std::size_t i = 0; i < c.size(); ++i)
                        if (mask >> i & 1)
                            out.push_back(c.edges()[i]);
                    return EdgeSet(c.ground(), std::move(out));
                } else {
                    std::vector<GridPoint> out;
                    std::size_t i = 0;
                    for (const auto & p : c)
                        if (mask >> i++ & 1)
                            out.push_back(p);
                    return GridSet(std::move(out));
                }
            },
            carrier_);
    }

    bool positive(SubsetMask mask) const { return is_positive(subset(mask), id_, params_); }

    /// "{a,b}" / "{0-1,1-2}" / "{0:1,2:3}"
    std::string describe(SubsetMask mask) const
    {
        std::string out = "{";
        bool first = true;
        auto emit = [&](const std::string & s) {
            out += (first ? "" : ",") + s;
            first = false;
        };
        std::visit(
            [&](const auto & c) {
                using C = std::decay_t<decltype(c)>;
                std::size_t i = 0;
                for (const auto & p : c) {
                    if (mask >> i++ & 1) {
                        if constexpr (std::is_same_v<C, NatSet>)
                            emit(std::to_string(p));
                        else if constexpr (std::is_same_v<C, EdgeSet>)
                            emit(std::to_string(p.lo) + "-" + std::to_string(p.hi));
                        else
                            emit(std::to_string(p.row) + ":" + std::to_string(p.col));
                    }
                }
            },
            carrier_);
        return out + "}";
    }

private:
    IdealId id_;
    ScaleParams params_;
    Carrier carrier_;
};

namespace detail {

template <class Fn>
inline void for_each_combination(std::size_t n, std::size_t k, Fn && fn)
{
    if (k > n)
        return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i)
        idx[i] = i;
    while (true) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1)
            --i;
        if (i == 0)
            return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j)
            idx[j] = idx[j - 1] + 1;
    }
}

inline SubsetMask mask_of_indices(const std::vector<std::size_t> & idx)
{
    SubsetMask m = 0;
    for (auto i : idx)
        m |= SubsetMask{1} << i;
    return m;
}

/// Keeps the inclusion-minimal masks, ordered by size then value.
inline std::vector<SubsetMask> minimal_masks(std::vector<SubsetMask> cands)
{
    std::sort(cands.begin(), cands.end(), [](SubsetMask a, SubsetMask b) {
        const int pa = std::popcount(a), pb = std::popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    std::vector<SubsetMask> kept;
    for (auto c : cands)
        if (std::none_of(kept.begin(), kept.end(), [c](SubsetMask k) { return (k & c) == k; }))
            kept.push_back(c);
    return kept;
}

inline std::vector<SubsetMask> summable_candidates(const NatSet & s, const Rational & tau)
{
    // ascending x is descending weight 1/(x+1)
    std::vector<Rational> w, suffix(s.size() + 1);
    for (Nat x : s)
        w.push_back(Rational::harmonic_weight(x));
    for (std::size_t i = s.size(); i-- > 0;)
        suffix[i] = suffix[i + 1] + w[i];
    std::vector<SubsetMask> out;
    auto rec = [&](auto && self, std::size_t i, SubsetMask m, const Rational & acc) -> void {
        if (acc >= tau) {
            out.push_back(m);
            return;
        }
        if (i == s.size() || acc + suffix[i] < tau)
            return;
        self(self, i + 1, m | SubsetMask{1} << i, acc + w[i]);
        self(self, i + 1, m, acc);
    };
    rec(rec, 0, 0, Rational{});
    return out;
}

} // namespace detail

/// Inclusion-minimal positive subsets of the carrier.
inline std::vector<SubsetMask> positive_family(const FiniteIdealSpec & spec)
{
    const auto & p = spec.params();
    const std::size_t n = spec.size();
    std::vector<SubsetMask> cands;
    if (const auto * g = std::get_if<EdgeSet>(&spec.carrier())) {
        if (g->ground() > kFamilyVertexLimit)
            throw Error(ErrorCode::TooLarge, "pair carriers are capped at " + std::to_string(kFamilyVertexLimit) + " vertices");
    } else if (n > kFamilyCarrierLimit) {
        throw Error(ErrorCode::TooLarge, "carriers are capped at " + std::to_string(kFamilyCarrierLimit) + " points");
    }

    switch (spec.id()) {
    case IdealId::Vdw: {
        const auto & s = std::get<NatSet>(spec.carrier());
        const std::size_t k = p.ap_len;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (k == 1) {
                cands.push_back(SubsetMask{1} << i);
                continue;
            }
            for (std::size_t j = i + 1; j < s.size(); ++j) {
                const Nat d = s[j] - s[i];
                SubsetMask m = SubsetMask{1} << i | SubsetMask{1} << j;
                std::size_t len = 2;
                Nat next = s[j];
                while (len < k && !__builtin_add_overflow(next, d, &next) && s.contains(next)) {
                    m |= SubsetMask{1} << s.index_of(next);
                    ++len;
                }
                if (len == k)
                    cands.push_back(m);
            }
        }
        break;
    }
    case IdealId::Ramsey: {
        const auto & g = std::get<EdgeSet>(spec.carrier());
        const std::size_t k = p.clique_size;
        if (k == 1) {
            // any nonempty graph
            for (std::size_t i = 0; i < g.size(); ++i)
                cands.push_back(SubsetMask{1} << i);
            break;
        }
        detail::for_each_combination(g.ground(), k, [&](const std::vector<std::size_t> & vs) {
            SubsetMask m = 0;
            for (std::size_t a = 0; a < vs.size(); ++a)
                for (std::size_t b = a + 1; b < vs.size(); ++b) {
                    const Edge e{vs[a], vs[b]};
                    if (!g.contains(e))
                        return;
                    const auto it = std::lower_bound(g.begin(), g.end(), e);
                    m |= SubsetMask{1} << static_cast<std::size_t>(it - g.begin());
                }
            cands.push_back(m);
        });
        break;
    }
    case IdealId::Hindman: {
        const auto & s = std::get<NatSet>(spec.carrier());
        detail::for_each_combination(s.size(), p.fs_size, [&](const std::vector<std::size_t> & idx) {
            std::vector<Nat> base;
            for (auto i : idx)
                base.push_back(s[i]);
            const auto sums = fs(NatSet::from_sorted(std::move(base)));
            if (!sums.is_subset_of(s))
                return;
            SubsetMask m = 0;
            for (Nat x : sums)
                m |= SubsetMask{1} << s.index_of(x);
            cands.push_back(m);
        });
        break;
    }
    case IdealId::Summable:
        cands = detail::summable_candidates(std::get<NatSet>(spec.carrier()), p.tau);
        break;
    case IdealId::Fin: {
        const Nat k = p.fin_bound();
        if (k <= n)
            detail::for_each_combination(n, static_cast<std::size_t>(k), [&](const std::vector<std::size_t> & idx) {
                cands.push_back(detail::mask_of_indices(idx));
            });
        break;
    }
    case IdealId::Fin2: {
        const auto & g = std::get<GridSet>(spec.carrier());
        std::map<Nat, std::vector<std::size_t>> rows;
        std::size_t i = 0;
        for (const auto & pt : g)
            rows[pt.row].push_back(i++);
        for (const auto & [row, members] : rows)
            detail::for_each_combination(members.size(), p.fs_size, [&](const std::vector<std::size_t> & idx) {
                SubsetMask m = 0;
                for (auto t : idx)
                    m |= SubsetMask{1} << members[t];
                cands.push_back(m);
            });
        break;
    }
    }
    return detail::minimal_masks(std::move(cands));
}

/// f : dst carrier -> src carrier, by carrier index.
struct ReductionCandidate {
    std::vector<std::size_t> image;

    SubsetMask image_of(SubsetMask b) const
    {
        SubsetMask out = 0;
        for (std::size_t i = 0; i < image.size(); ++i)
            if (b >> i & 1)
                out |= SubsetMask{1} << image[i];
        return out;
    }

    friend bool operator==(const ReductionCandidate &, const ReductionCandidate &) = default;
};

/// Checks f[B] is src-positive for every minimal dst-positive B.
inline Report verify_reduction(const ReductionCandidate & f, const FiniteIdealSpec & src, const FiniteIdealSpec & dst)
{
    Report r;
    r.subject = "reduction " + std::string(ideal_name(dst.id())) + " -> " + std::string(ideal_name(src.id()));
    r.caveat = kFiniteScaleCaveat;
    const bool total = f.image.size() == dst.size() &&
                       std::all_of(f.image.begin(), f.image.end(), [&](std::size_t v) { return v < src.size(); });
    r.add("totality", total, total ? "" : "map must send each of the " + std::to_string(dst.size()) +
                                              " dst points to one of the " + std::to_string(src.size()) + " src points");
    if (!total)
        return r;
    const auto family = positive_family(dst);
    for (auto b : family) {
        const auto img = f.image_of(b);
        if (!src.positive(img)) {
            r.add("images-positive", false, "B = " + dst.describe(b) + " has image " + src.describe(img));
            return r;
        }
    }
    r.add("images-positive", true, std::to_string(family.size()) + " minimal positive sets checked");
    return r;
}

enum class SearchOutcome { Found, Exhausted, BudgetExceeded };

inline const char * outcome_name(SearchOutcome o)
{
    switch (o) {
    case SearchOutcome::Found: return "found";
    case SearchOutcome::Exhausted: return "exhausted";
    case SearchOutcome::BudgetExceeded: return "budget-exceeded";
    }
    return "?";
}

struct SearchResult {
    SearchOutcome outcome = SearchOutcome::Exhausted;
    std::optional<ReductionCandidate> map;
    std::uint64_t nodes = 0;
};

struct ReductionBudget {
    std::uint64_t max_nodes = 50'000'000; // per top-level branch
    std::size_t threads = 0;              // 0: IDEALFORGE_THREADS or 1
};

inline std::size_t configured_threads()
{
    if (const char * env = std::getenv("IDEALFORGE_THREADS")) {
        char * end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return std::min<unsigned long>(v, 64);
    }
    return 1;
}

namespace detail {

struct SearchPlan {
    std::size_t n_dst = 0;
    std::size_t n_src = 0;
    std::vector<std::size_t> order;                 // constrained variables, most constrained first
    std::vector<std::size_t> free;                  // variables in no minimal set
    std::vector<std::vector<SubsetMask>> closing;   // family sets completed at each depth
    std::vector<bool> src_positive;                 // per src mask
    bool fin_growth = false;                        // src values interchangeable
    bool vertex_growth = false;                     // src is a complete graph
    std::vector<Edge> src_edges;
    std::optional<std::vector<std::size_t>> mirror; // src reflection
};

inline SearchPlan make_plan(const FiniteIdealSpec & src, const FiniteIdealSpec & dst)
{
    SearchPlan plan;
    plan.n_dst = dst.size();
    plan.n_src = src.size();
    const auto family = positive_family(dst);
    plan.src_positive.resize(std::size_t{1} << plan.n_src);
    for (SubsetMask m = 0; m < plan.src_positive.size(); ++m)
        plan.src_positive[m] = src.positive(m);

    std::vector<std::size_t> count(plan.n_dst, 0);
    for (auto b : family)
        for (std::size_t i = 0; i < plan.n_dst; ++i)
            count[i] += b >> i & 1;
    for (std::size_t i = 0; i < plan.n_dst; ++i)
        (count[i] ? plan.order : plan.free).push_back(i);
    std::stable_sort(plan.order.begin(), plan.order.end(),
                     [&](std::size_t a, std::size_t b) { return count[a] > count[b]; });
    std::vector<std::size_t> depth_of(plan.n_dst, 0);
    for (std::size_t d = 0; d < plan.order.size(); ++d)
        depth_of[plan.order[d]] = d;
    plan.closing.resize(plan.order.size());
    for (auto b : family) {
        std::size_t last = 0;
        for (std::size_t i = 0; i < plan.n_dst; ++i)
            if (b >> i & 1)
                last = std::max(last, depth_of[i]);
        plan.closing[last].push_back(b);
    }

    if (src.id() == IdealId::Fin) {
        plan.fin_growth = true;
    } else if (const auto * g = std::get_if<EdgeSet>(&src.carrier());
               g && src.id() == IdealId::Ramsey && g->size() == g->ground() * (g->ground() - 1) / 2) {
        plan.vertex_growth = true;
        plan.src_edges.assign(g->begin(), g->end());
    } else if (const auto * s = std::get_if<NatSet>(&src.carrier()); s && src.id() == IdealId::Vdw && !s->empty()) {
        std::vector<std::size_t> mirror(s->size());
        bool ok = true;
        for (std::size_t i = 0; i < s->size() && ok; ++i) {
            const Nat y = s->min() + s->max() - (*s)[i];
            ok = s->contains(y);
            if (ok)
                mirror[i] = s->index_of(y);
        }
        for (SubsetMask m = 0; ok && m < plan.src_positive.size(); ++m) {
            SubsetMask r = 0;
            for (std::size_t i = 0; i < s->size(); ++i)
                if (m >> i & 1)
                    r |= SubsetMask{1} << mirror[i];
            ok = plan.src_positive[m] == plan.src_positive[r];
        }
        if (ok)
            plan.mirror = std::move(mirror);
    }
    return plan;
}

struct Searcher {
    const SearchPlan & plan;
    std::uint64_t max_nodes;
    std::uint64_t nodes = 0;
    bool out_of_budget = false;
    std::vector<std::size_t> value;

    // symmetry bookkeeping
    std::size_t fin_used = 0;
    std::size_t vertices_used = 0;

    bool allowed(std::size_t depth, std::size_t v, std::size_t & fin_next, std::size_t & vert_next) const
    {
        fin_next = fin_used;
        vert_next = vertices_used;
        if (plan.fin_growth) {
            if (v > fin_used)
                return false;
            fin_next = std::max(fin_used, v + 1);
        }
        if (plan.vertex_growth) {
            const Edge e = plan.src_edges[v];
            const std::size_t u = vertices_used;
            if (e.hi < u) {
            } else if (e.lo < u) {
                if (e.hi != u)
                    return false;
                vert_next = u + 1;
            } else {
                if (e.lo != u || e.hi != u + 1)
                    return false;
                vert_next = u + 2;
            }
        }
        if (plan.mirror && depth == 0 && v > (*plan.mirror)[v])
            return false;
        return true;
    }

    bool closes(std::size_t depth) const
    {
        for (auto b : plan.closing[depth]) {
            SubsetMask img = 0;
            for (std::size_t i = 0; i < plan.n_dst; ++i)
                if (b >> i & 1)
                    img |= SubsetMask{1} << value[i];
            if (!plan.src_positive[img])
                return false;
        }
        return true;
    }

    bool dfs(std::size_t depth)
    {
        if (depth == plan.order.size())
            return true;
        const std::size_t var = plan.order[depth];
        for (std::size_t v = 0; v < plan.n_src; ++v)
            if (assign(depth, var, v))
                return true;
            else if (out_of_budget)
                return false;
        return false;
    }

    bool assign(std::size_t depth, std::size_t var, std::size_t v)
    {
        std::size_t fin_next, vert_next;
        if (!allowed(depth, v, fin_next, vert_next))
            return false;
        if (++nodes > max_nodes) {
            out_of_budget = true;
            return false;
        }
        value[var] = v;
        if (!closes(depth))
            return false;
        const auto saved = std::pair{fin_used, vertices_used};
        fin_used = fin_next;
        vertices_used = vert_next;
        const bool ok = dfs(depth + 1);
        std::tie(fin_used, vertices_used) = saved;
        return ok;
    }
};

} // namespace detail

/// Depth-first search for a map f : dst -> src whose images of minimal
/// dst-positive sets are src-positive. Deterministic for any thread count.
inline SearchResult search_reduction(const FiniteIdealSpec & src, const FiniteIdealSpec & dst,
                                     const ReductionBudget & budget = {})
{
    if (src.size() > kSearchCarrierLimit || dst.size() > kSearchCarrierLimit)
        throw Error(ErrorCode::TooLarge, "search carriers are capped at " + std::to_string(kSearchCarrierLimit) + " points");
    SearchResult result;
    if (dst.size() == 0) {
        result.outcome = SearchOutcome::Found;
        result.map = ReductionCandidate{};
        return result;
    }
    if (src.size() == 0)
        return result;
    const auto plan = detail::make_plan(src, dst);
    auto finish = [&](std::vector<std::size_t> value) {
        for (auto i : plan.free)
            value[i] = 0;
        return ReductionCandidate{std::move(value)};
    };
    if (plan.order.empty()) {
        result.outcome = SearchOutcome::Found;
        result.map = finish(std::vector<std::size_t>(plan.n_dst, 0));
        return result;
    }

    // one branch per value of the first variable
    struct Branch {
        SearchOutcome outcome = SearchOutcome::Exhausted;
        std::vector<std::size_t> value;
        std::uint64_t nodes = 0;
    };
    std::vector<Branch> branches(plan.n_src);
    auto run_branch = [&](std::size_t v) {
        detail::Searcher s{plan, budget.max_nodes, 0, false, {}};
        s.value.assign(plan.n_dst, 0);
        Branch & b = branches[v];
        if (s.assign(0, plan.order[0], v)) {
            b.outcome = SearchOutcome::Found;
            b.value = s.value;
        } else if (s.out_of_budget) {
            b.outcome = SearchOutcome::BudgetExceeded;
        }
        b.nodes = s.nodes;
    };

    const std::size_t threads = std::max<std::size_t>(1, budget.threads ? budget.threads : configured_threads());
    if (threads == 1) {
        for (std::size_t v = 0; v < plan.n_src; ++v) {
            run_branch(v);
            if (branches[v].outcome != SearchOutcome::Exhausted)
                break;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::atomic<std::size_t> decided{plan.n_src};
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < std::min(threads, plan.n_src); ++t)
            pool.emplace_back([&] {
                for (std::size_t v; (v = next.fetch_add(1)) < plan.n_src;) {
                    if (v > decided.load())
                        continue;
                    run_branch(v);
                    if (branches[v].outcome != SearchOutcome::Exhausted) {
                        std::size_t cur = decided.load();
                        while (v < cur && !decided.compare_exchange_weak(cur, v)) {
                        }
                    }
                }
            });
        for (auto & th : pool)
            th.join();
    }

    for (std::size_t v = 0; v < plan.n_src; ++v) {
        result.nodes += branches[v].nodes;
        if (branches[v].outcome == SearchOutcome::Found) {
            result.outcome = SearchOutcome::Found;
            result.map = finish(branches[v].value);
            return result;
        }
        if (branches[v].outcome == SearchOutcome::BudgetExceeded) {
            result.outcome = SearchOutcome::BudgetExceeded;
            return result;
        }
    }
    result.outcome = SearchOutcome::Exhausted;
    return result;
}

} // namespace idealforge
