// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include "support.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

using namespace idealforge;

namespace {

/// Collects the first few failure notes of a criterion.
struct Verdict {
    bool ok = true;
    std::vector<std::string> notes;
    std::string info;

    void require(bool cond, const std::string & what)
    {
        if (cond)
            return;
        ok = false;
        if (notes.size() < 5)
            notes.push_back(what);
    }
};

struct Criterion {
    int id;
    const char * title;
    double limit_seconds; // 0: untimed
    std::function<void(Verdict &)> body;
};

Rational reciprocal_total(const std::set<Nat> & values)
{
    Rational s(0);
    for (Nat v : values)
        s = s + Rational(1, v + 1);
    return s;
}

// ---- 1 ----------------------------------------------------------------------

NatSet log_uniform_pool(gen::Gen & g, std::size_t count)
{
    std::uniform_real_distribution<double> u(0.0, std::log(1e9));
    std::vector<Nat> v;
    for (std::size_t i = 0; i < count; ++i)
        v.push_back(static_cast<Nat>(std::exp(u(g.engine()))));
    return NatSet(std::move(v));
}

/// Length of the greedy chain x > 2 * (running sum), independent replay.
std::size_t greedy_reach(const NatSet & pool, std::size_t k)
{
    std::size_t len = 0;
    Nat sum = 0;
    for (Nat x : pool)
        if (len < k && x > 2 * sum) {
            ++len;
            sum += x;
        }
    return len;
}

void sparse_machinery(Verdict & v)
{
    gen::Gen g(1001);
    std::size_t built = 0, exhausted = 0, points = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 1 + trial % 8;
        const auto pool = log_uniform_pool(g, 80);
        try {
            const auto d = very_sparse_subset(pool, k);
            ++built;
            v.require(d.size() == k && d.elements().is_subset_of(pool), "size or membership of greedy output");
            v.require(is_very_sparse(d.elements()).verified, "is_very_sparse rejects " + d.elements().str());
            v.require(oracle::very_sparse(d.elements().vec()), "oracle rejects " + d.elements().str());
        } catch (const Error & e) {
            ++exhausted;
            v.require(e.code() == ErrorCode::PoolExhausted && greedy_reach(pool, k) < k,
                      std::string("unexpected error ") + e.what());
        }
    }

    // validated bases up to 12 elements: super-increasing ones, random sparse ones and binary ones
    std::vector<NatSet> bases;
    for (std::size_t size = 1; size <= 12; ++size) {
        bases.push_back(g.very_sparse(size, 7));
        bases.push_back(BlockBasis::powers_of_two(size).elements());
    }
    while (bases.size() < 120) {
        const auto s = g.set(9, 400);
        if (!s.empty() && oracle::sparse(s.vec()))
            bases.push_back(s);
    }
    for (const auto & s : bases) {
        const auto d = SparseBasis::make(s);
        std::map<Nat, std::vector<std::uint32_t>> by_sum;
        for (const auto & [sum, mask] : oracle::subset_sums(s.vec()))
            by_sum[sum].push_back(mask);
        for (const auto & [x, masks] : by_sum) {
            const auto a = alpha(d, x);
            Nat total = 0;
            for (Nat e : a)
                total += e;
            v.require(total == x, "alpha sum mismatch at " + std::to_string(x));
            v.require(masks.size() == 1, std::to_string(x) + " has several decompositions in " + s.str());
            std::vector<Nat> expect;
            for (std::size_t i = 0; i < s.size(); ++i)
                if (masks.front() >> i & 1)
                    expect.push_back(s[i]);
            v.require(a.vec() == expect, "alpha differs from oracle at " + std::to_string(x));
            ++points;
        }
    }
    v.require(built + exhausted == 200, "pool count");
    v.require(built >= 190, "greedy growth failed on " + std::to_string(exhausted) + " pools");
    v.info = std::to_string(built) + " greedy bases, " + std::to_string(exhausted) + " pools exhausted, " +
             std::to_string(bases.size()) + " bases, " + std::to_string(points) + " decompositions";
}

// ---- 2 ----------------------------------------------------------------------

void conflict_sets_hold_no_pair_basis(Verdict & v)
{
    gen::Gen g(2002);
    std::size_t queries = 0;
    for (int trial = 0; trial < 50; ++trial) {
        NatSet s;
        if (trial % 2 == 0) {
            s = g.very_sparse(1 + g.below(8), 9);
        } else {
            do
                s = g.set(8, 3000);
            while (s.empty() || !oracle::very_sparse(s.vec()));
        }
        v.require(oracle::very_sparse(s.vec()), "generator produced " + s.str());
        const auto d = SparseBasis::make(s);
        const auto sums = oracle::subset_sums(s.vec());
        for (const auto & [y, ym] : sums)
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (!(ym >> i & 1))
                    continue;
                std::vector<Nat> holders;
                for (const auto & [x, xm] : sums)
                    if (xm >> i & 1)
                        holders.push_back(x);
                const NatSet set(holders);
                v.require(set == conflict_set(d, s[i]), "conflict_set disagrees for d = " + std::to_string(s[i]));
                ++queries;
                v.require(!find_fs_subset(set, 2), "two-element FS basis inside the sets holding " +
                                                       std::to_string(s[i]) + " for D = " + s.str());
            }
    }
    v.info = std::to_string(queries) + " (y, d) queries";
}

// ---- 3 ----------------------------------------------------------------------

void valuation_witnesses(Verdict & v)
{
    const Nat limit = Nat{1} << 16;
    for (Nat k = 0; k <= 10; ++k) {
        const auto a = valuation_class(k, limit).vec();
        bool all_good = !a.empty();
        for (Nat x : a)
            v.require(x != 0 && fin2_to_h_map(x).first == k, "valuation_class member off row");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const Nat x = a[i];
            std::size_t bad = 0;
            for (std::size_t j = i; j < a.size(); ++j)
                bad += static_cast<Nat>(std::countr_zero(x + a[j])) == k;
            all_good = all_good && bad == 0;
        }
        v.require(all_good, "A_" + std::to_string(k) + " is not sum-free");
    }

    gen::Gen g(3003);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<Nat> b;
        Nat total = 0;
        while (b.size() < 3) {
            const Nat x = g.between(1, 21000);
            if (std::find(b.begin(), b.end(), x) == b.end()) {
                b.push_back(x);
                total += x;
            }
        }
        v.require(total < limit, "basis leaves the window");
        std::map<Nat, int> per_row;
        for (Nat x : oracle::fs(b))
            ++per_row[fin2_to_h_map(x).first];
        v.require(std::any_of(per_row.begin(), per_row.end(), [](const auto & r) { return r.second >= 2; }),
                  "no row holds two sums of " + NatSet(b).str());
    }

    const std::size_t ground = 24;
    const auto all = EdgeSet::complete(ground);
    for (Nat k = 0; k < ground; ++k) {
        std::vector<Edge> pre;
        for (const auto & e : all.edges())
            if (fin2_to_r_map(e).first == k)
                pre.push_back(e);
        const EdgeSet star(ground, pre);
        v.require(star == row_star(k, ground), "row " + std::to_string(k) + " preimage is not the star");
        std::set<std::pair<Nat, Nat>> edges;
        for (const auto & e : pre)
            edges.insert({e.lo, e.hi});
        v.require(!find_clique(star, 3) && !oracle::has_clique(edges, ground, 3), "triangle in a star");
    }
}

// ---- 4 ----------------------------------------------------------------------

void w_summable_replay(Verdict & v)
{
    const auto phi = NatColoring::identity(65536);
    SearchBudget b;
    b.n_max = 10;
    const auto t = defeat_w_summable(phi, b);
    v.require(t.steps.size() == 10, "expected 10 steps");
    std::set<Nat> image;
    for (const auto & s : t.steps) {
        const Nat n = s.index;
        const auto f = s.chosen.vec();
        v.require(f.size() == n && oracle::longest_ap(f) == n, "F_" + std::to_string(n) + " is not an n-AP");
        for (Nat x : f) {
            v.require(x >= n * (Nat{1} << n), "phi below n 2^n in F_" + std::to_string(n));
            image.insert(x);
        }
    }
    Rational majorant(0);
    for (Nat n = 1; n <= 10; ++n)
        majorant = majorant + Rational(n, n * (Nat{1} << n) + 1);
    const Rational sum = reciprocal_total(image);
    v.require(t.certificate && t.certificate->image_sum == sum, "certificate differs from recomputed sum");
    v.require(t.certificate && t.certificate->majorant == majorant, "majorant differs from the displayed series");
    v.require(sum <= majorant, "sum " + sum.str() + " exceeds " + majorant.str());
}

// ---- 5 ----------------------------------------------------------------------

Rational series(std::size_t n_max, const std::function<Rational(Nat)> & term)
{
    Rational s(0);
    for (Nat n = 0; n < n_max; ++n)
        s = s + term(n);
    return s;
}

Rational h_case_bound(CanonicalCase c, Nat const_value)
{
    switch (c) {
    case CanonicalCase::Const: return Rational(1, const_value + 1);
    case CanonicalCase::Min:
    case CanonicalCase::Max: return series(10, [](Nat n) { return Rational(1, (Nat{1} << n) + 1); });
    case CanonicalCase::MinMax: return series(10, [](Nat n) { return Rational(n + 1, n * (Nat{1} << n) + 1); });
    case CanonicalCase::Inj:
        return series(10, [](Nat n) {
            const Nat q = (Nat{1} << (2 * n)) + 1;
            return Rational(1, q) + Rational((Nat{1} << n) - 1, q);
        });
    }
    return Rational(0);
}

Rational r_case_bound(CanonicalCase c, Nat const_value)
{
    if (c == CanonicalCase::Const)
        return Rational(1, const_value + 1);
    return series(10, [](Nat n) { return Rational(1, Nat{1} << n); });
}

void h_summable_replays(Verdict & v)
{
    struct Row {
        CanonicalCase c;
        NatColoring phi;
        std::size_t blocks;
    };
    const std::vector<Row> rows{
        {CanonicalCase::Const, NatColoring::constant(1 << 14, 6), 14},
        {CanonicalCase::Min, NatColoring::min_alpha(1 << 14), 14},
        {CanonicalCase::Max, NatColoring::max_alpha(1 << 14), 14},
        {CanonicalCase::MinMax, NatColoring::minmax_alpha(1 << 14), 14},
        {CanonicalCase::Inj, NatColoring::identity(1 << 20), 20},
    };
    SearchBudget b;
    b.n_max = 10;
    for (const auto & r : rows) {
        const std::string name(case_name(r.c));
        const auto c = BlockBasis::powers_of_two(r.blocks);
        const auto t = defeat_h_summable(r.phi, c, r.c, b);
        v.require(t.steps.size() == 10, name + ": fewer than 10 steps");
        for (const auto & s : t.steps)
            for (const auto & q : s.checks) {
                const Nat fresh = r.phi(q.args.at(0));
                v.require(fresh == q.value && fresh > q.bound, name + ": inequality fails on re-query");
            }
        std::set<Nat> image;
        for (const auto & [sum, mask] : oracle::subset_sums(t.witness.vec()))
            image.insert(r.phi(sum));
        const Rational sum = reciprocal_total(image);
        const Rational bound = h_case_bound(r.c, *image.begin());
        v.require(t.certificate && t.certificate->image_sum == sum, name + ": certificate differs");
        v.require(sum <= bound, name + ": " + sum.str() + " exceeds " + bound.str());
    }
}

void r_summable_replays(Verdict & v)
{
    struct Row {
        CanonicalCase c;
        PairColoring phi;
    };
    const std::vector<Row> rows{
        {CanonicalCase::Const, PairColoring::constant(12, 6)},
        {CanonicalCase::Min, PairColoring::min(600)},
        {CanonicalCase::Max, PairColoring::max(600)},
        {CanonicalCase::Inj, PairColoring::pairing(120)},
    };
    SearchBudget b;
    b.n_max = 10;
    for (const auto & r : rows) {
        const std::string name(case_name(r.c));
        const auto t = defeat_r_summable(r.phi, NatSet::range(0, r.phi.ground()), r.c, b);
        v.require(t.steps.size() == 10, name + ": fewer than 10 steps");
        for (const auto & s : t.steps)
            for (const auto & q : s.checks) {
                const Nat fresh = r.phi(q.args.at(0), q.args.at(1));
                v.require(fresh == q.value && fresh > q.bound, name + ": inequality fails on re-query");
            }
        const auto h = t.witness.vec();
        std::set<Nat> image;
        for (std::size_t j = 1; j < h.size(); ++j)
            for (std::size_t i = 0; i < j; ++i)
                image.insert(r.phi(h[i], h[j]));
        if (r.c == CanonicalCase::Inj)
            for (std::size_t n = 1; n < h.size(); ++n)
                for (std::size_t i = 0; i < n; ++i)
                    v.require(r.phi(h[i], h[n]) > n * (Nat{1} << n), "INJ: threshold fails for a pair");
        const Rational sum = reciprocal_total(image);
        const Rational bound = r_case_bound(r.c, *image.begin());
        v.require(t.certificate && t.certificate->image_sum == sum, name + ": certificate differs");
        v.require(sum <= bound, name + ": " + sum.str() + " exceeds " + bound.str());
    }
}

// ---- 6 ----------------------------------------------------------------------

void canonical_classifiers(Verdict & v)
{
    gen::Gen g(6006);
    auto relabel = [&](std::map<Nat, Nat> & table, std::set<Nat> & used, Nat key) {
        auto it = table.find(key);
        if (it != table.end())
            return it->second;
        Nat x;
        do
            x = g.below(1'000'000'000);
        while (!used.insert(x).second);
        return table[key] = x;
    };
    const CanonicalCase pair_cases[] = {CanonicalCase::Const, CanonicalCase::Min, CanonicalCase::Max,
                                        CanonicalCase::Inj};
    for (int trial = 0; trial < 250; ++trial) {
        const auto c = pair_cases[trial % 4];
        std::map<Nat, Nat> table;
        std::set<Nat> used;
        const std::size_t n = 3 + g.below(10);
        const auto phi = PairColoring::tabulate(n, [&](Nat i, Nat j) {
            switch (c) {
            case CanonicalCase::Const: return relabel(table, used, 0);
            case CanonicalCase::Min: return relabel(table, used, i);
            case CanonicalCase::Max: return relabel(table, used, j);
            default: return relabel(table, used, cantor_pair(i, j));
            }
        });
        v.require(classify_pairs_on(phi, NatSet::range(0, n)) == c, "pair pattern not recovered");
    }
    for (int trial = 0; trial < 250; ++trial) {
        const auto c = kAllCases[trial % 5];
        const std::size_t bits = 3 + g.below(6);
        std::map<Nat, Nat> table;
        std::set<Nat> used;
        std::vector<Nat> values(Nat{1} << bits);
        for (Nat x = 1; x < values.size(); ++x) {
            const Nat lo = static_cast<Nat>(std::countr_zero(x)), hi = static_cast<Nat>(std::bit_width(x) - 1);
            switch (c) {
            case CanonicalCase::Const: values[x] = relabel(table, used, 0); break;
            case CanonicalCase::Min: values[x] = relabel(table, used, lo); break;
            case CanonicalCase::Max: values[x] = relabel(table, used, hi); break;
            case CanonicalCase::MinMax: values[x] = relabel(table, used, lo * 64 + hi); break;
            case CanonicalCase::Inj: values[x] = relabel(table, used, x); break;
            }
        }
        const auto phi = NatColoring::from_table(values);
        v.require(classify_fs_on(phi, BlockBasis::powers_of_two(bits)) == c, "FS pattern not recovered");
    }
    std::size_t compared = 0, present = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const std::size_t n = 3 + g.below(6);
        const std::size_t m = 3 + g.below(2);
        if (m > n)
            continue;
        const Nat colors = 1 + g.below(4);
        const auto phi = PairColoring::tabulate(n, [&](Nat, Nat) { return g.below(colors); });
        const auto got = find_canonical_subset(phi, m);
        const auto want = oracle::find_canonical_subset([&](Nat i, Nat j) { return phi(i, j); }, n, m);
        ++compared;
        present += want.has_value();
        v.require(got.has_value() == want.has_value(), "existence differs from full enumeration");
        if (got && want)
            v.require(got->first.vec() == want->first && got->second == want->second,
                      "subset differs from full enumeration");
    }
    v.info = "500 patterned colorings, " + std::to_string(compared) + " subset searches (" + std::to_string(present) +
             " with a canonical subset)";
}

// ---- 7 ----------------------------------------------------------------------

void hindman_ramsey_checkers(Verdict & v)
{
    std::size_t successes = 0;
    auto run = [&](const PairColoring & f, const SparseBasis & d, std::size_t n_max, std::size_t cap) {
        SearchBudget b;
        b.n_max = n_max;
        b.candidate_cap = cap;
        b.max_nodes = 200'000;
        try {
            const auto t = defeat_r_hindman(f, d, b);
            ++successes;
            v.require(check_hnr_conditions(t, f, d).passed(), "checker rejects transcript for " + f.name());
        } catch (const SearchExhausted &) {
        }
    };
    const auto d5 = SparseBasis::make(NatSet{1, 3, 9, 27, 81});
    run(bundles::closing_coloring(), d5, 4, 4);
    for (Nat value : {1, 3, 4, 81, 121})
        for (std::size_t n_max = 1; n_max <= 3; ++n_max)
            run(PairColoring::constant(16, value), d5, n_max, 5);
    gen::Gen g(7007);
    const auto values = d5.fs().vec();
    for (int trial = 0; trial < 40; ++trial) {
        const auto f = PairColoring::tabulate(
            20, [&](Nat, Nat) { return values[g.below(trial % 2 ? values.size() : 4)]; }, "random");
        run(f, d5, 1 + trial % 4, 5);
    }
    v.require(successes > 0, "no transcript completed");
    v.info = std::to_string(successes) + " transcripts completed, " + std::to_string(bundles::mutants().size()) +
             " mutant bundles";

    const auto r1 = check_rnh_conditions(bundles::case1_valid(), bundles::case1_coloring());
    const auto r2 = check_rnh_conditions(bundles::case2_valid(), bundles::case2_coloring());
    v.require(r1.passed(), "valid first-alternative bundle fails");
    v.require(r2.passed(), "valid second-alternative bundle fails");
    const auto mutants = bundles::mutants();
    v.require(mutants.size() >= 5, "fewer than five single-violation bundles");
    for (const auto & m : mutants)
        v.require(check_rnh_conditions(m.bundle, m.f).failed_ids() == std::vector<std::string>{m.target},
                  std::string("mutant ") + m.target + " does not fail exactly its item");
}

// ---- 8 ----------------------------------------------------------------------

void search_agreement(Verdict & v)
{
    const auto specs = instances::micro_specs();
    std::size_t pairs = 0;
    for (const auto & src : specs)
        for (const auto & dst : specs) {
            if (!instances::within_naive_bound(src.size(), dst.size()))
                continue;
            ++pairs;
            const auto r = search_reduction(src, dst);
            const bool exists = oracle::reduction_exists(src, dst);
            const std::string tag = std::string(ideal_name(dst.id())) + "[" + std::to_string(dst.size()) + "] -> " +
                                    std::string(ideal_name(src.id())) + "[" + std::to_string(src.size()) + "]";
            v.require(r.outcome != SearchOutcome::BudgetExceeded, tag + ": budget exceeded");
            v.require((r.outcome == SearchOutcome::Found) == exists, tag + ": disagrees with enumeration");
            if (r.map)
                v.require(verify_reduction(*r.map, src, dst).passed(), tag + ": found map fails verification");
        }
    v.require(pairs > 200, "too few instances");
    v.info = std::to_string(pairs) + " instance pairs";
    const auto [src, dst] = instances::impossible_summable();
    v.require(search_reduction(src, dst).outcome == SearchOutcome::Exhausted, "SUMMABLE instance not exhausted");
    v.require(!oracle::reduction_exists(src, dst), "SUMMABLE instance has a reduction");
}

// ---- 9 ----------------------------------------------------------------------

std::string shell_quote(const std::string & s)
{
    std::string out = "'";
    for (char c : s)
        out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

std::string capture(const std::string & command)
{
    std::string out;
    FILE * pipe = ::popen(command.c_str(), "r");
    if (!pipe)
        return out;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0)
        out.append(buf.data(), n);
    ::pclose(pipe);
    return out;
}

void cli_determinism(Verdict & v)
{
    const std::string cli = IDEALFORGE_CLI;
    const std::vector<std::string> commands{
        "adversary --strategy w-summable --phi identity --nmax 6",
        "adversary --strategy h-summable --phi identity --blocks 'pow2(20)' --nmax 10",
        "adversary --strategy r-summable --phi pairing --set 0..119 --nmax 10",
        "canonize --op find-subset --phi random:3 --seed 4 --phi-window 8 --m 4",
        "search --src-ideal vdw --src-size 6 --dst-ideal vdw --dst-size 6 --ap-len 3",
        "search --src-ideal ramsey --src-vertices 4 --dst-ideal vdw --dst-size 6 --ap-len 3 --clique-size 3",
        "search --src-ideal summable --src-size 5 --tau 2 --dst-ideal vdw --dst-size 5 --ap-len 3",
        "fs --op very-sparse-subset --pool 1..50 --k 4",
    };
    for (const auto & cmd : commands) {
        std::vector<std::string> bodies;
        for (const char * threads : {"1", "1", "4", "8"}) {
            const std::string full =
                "IDEALFORGE_THREADS=" + std::string(threads) + " " + shell_quote(cli) + " " + cmd + " 2>/dev/null";
            const std::string text = capture(full);
            try {
                bodies.push_back(nlohmann::ordered_json::parse(text).at("body").dump());
            } catch (const std::exception &) {
                v.require(false, "unparsable output from: " + cmd);
                bodies.push_back("<" + text + ">");
            }
        }
        for (std::size_t i = 1; i < bodies.size(); ++i)
            v.require(bodies[i] == bodies[0], "report body changes across runs: " + cmd);
    }
}

} // namespace

int main()
{
    const std::vector<Criterion> criteria{
        {1, "sparse machinery and decomposition uniqueness", 10, sparse_machinery},
        {2, "sets sharing a basis element hold no two-element FS basis", 5, conflict_sets_hold_no_pair_basis},
        {3, "valuation classes, FS rows and row stars", 5, valuation_witnesses},
        {4, "w-summable replay with n_max = 10", 2, w_summable_replay},
        {5, "h-summable and r-summable replays in every case", 20,
         [](Verdict & v) {
             using clock = std::chrono::steady_clock;
             const auto t0 = clock::now();
             h_summable_replays(v);
             const auto t1 = clock::now();
             r_summable_replays(v);
             const auto t2 = clock::now();
             v.require(std::chrono::duration<double>(t1 - t0).count() < 10, "h-summable replays over 10 s");
             v.require(std::chrono::duration<double>(t2 - t1).count() < 10, "r-summable replays over 10 s");
         }},
        {6, "canonical classifiers and subset search", 30, canonical_classifiers},
        {7, "nested construction checker agreement and condition bundles", 10, hindman_ramsey_checkers},
        {8, "reduction search against naive enumeration", 60, search_agreement},
        {9, "CLI report bodies identical across runs and thread counts", 0, cli_determinism},
    };
    bool all = true;
    for (const auto & c : criteria) {
        Verdict v;
        const auto start = std::chrono::steady_clock::now();
        try {
            c.body(v);
        } catch (const std::exception & e) {
            v.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (c.limit_seconds > 0 && secs >= c.limit_seconds)
            v.require(false, "runtime limit exceeded");
        all = all && v.ok;
        std::ostringstream line;
        line << (v.ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title << " (" << std::fixed
             << std::setprecision(2) << secs << " s";
        if (c.limit_seconds > 0)
            line << ", limit " << c.limit_seconds << " s";
        line << ")";
        std::cout << line.str() << '\n';
        if (!v.info.empty())
            std::cout << "    " << v.info << '\n';
        for (const auto & n : v.notes)
            std::cout << "    " << n << '\n';
    }
    return all ? 0 : 1;
}
