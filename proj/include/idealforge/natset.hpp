#pragma once

#include "idealforge/error.hpp"

#include <algorithm>
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <iterator>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace idealforge {

/// Finite set of naturals in canonical (strictly increasing) form.
class NatSet {
public:
    using value_type = Nat;
    using const_iterator = std::vector<Nat>::const_iterator;

    NatSet() = default;
    NatSet(std::initializer_list<Nat> values) : NatSet(std::vector<Nat>(values)) {}
    explicit NatSet(std::vector<Nat> values) : elements_(std::move(values)) { canonicalize(); }

    template <std::input_iterator It>
    NatSet(It first, It last) : elements_(first, last)
    {
        canonicalize();
    }

    /// [lo, hi)
    static NatSet range(Nat lo, Nat hi)
    {
        std::vector<Nat> v;
        if (hi > lo)
            v.reserve(hi - lo);
        for (Nat x = lo; x < hi; ++x)
            v.push_back(x);
        return from_sorted(std::move(v));
    }

    /// Caller guarantees strictly increasing input.
    static NatSet from_sorted(std::vector<Nat> values)
    {
        NatSet s;
        s.elements_ = std::move(values);
        return s;
    }

    bool contains(Nat x) const { return std::binary_search(elements_.begin(), elements_.end(), x); }
    std::size_t size() const noexcept { return elements_.size(); }
    bool empty() const noexcept { return elements_.empty(); }
    const_iterator begin() const noexcept { return elements_.begin(); }
    const_iterator end() const noexcept { return elements_.end(); }
    Nat operator[](std::size_t i) const { return elements_[i]; }
    Nat min() const { return elements_.front(); }
    Nat max() const { return elements_.back(); }
    std::span<const Nat> elements() const noexcept { return elements_; }
    const std::vector<Nat> & vec() const noexcept { return elements_; }

    /// Position of x in the enumeration, or size() when absent.
    std::size_t index_of(Nat x) const
    {
        auto it = std::lower_bound(elements_.begin(), elements_.end(), x);
        return (it != elements_.end() && *it == x) ? static_cast<std::size_t>(it - elements_.begin()) : size();
    }

    bool is_subset_of(const NatSet & other) const
    {
        return std::includes(other.elements_.begin(), other.elements_.end(), elements_.begin(), elements_.end());
    }

    NatSet with(Nat x) const
    {
        NatSet r = *this;
        auto it = std::lower_bound(r.elements_.begin(), r.elements_.end(), x);
        if (it == r.elements_.end() || *it != x)
            r.elements_.insert(it, x);
        return r;
    }

    NatSet without(Nat x) const
    {
        NatSet r = *this;
        auto it = std::lower_bound(r.elements_.begin(), r.elements_.end(), x);
        if (it != r.elements_.end() && *it == x)
            r.elements_.erase(it);
        return r;
    }

    /// First `count` elements.
    NatSet prefix(std::size_t count) const
    {
        count = std::min(count, size());
        return from_sorted(std::vector<Nat>(elements_.begin(), elements_.begin() + static_cast<std::ptrdiff_t>(count)));
    }

    Nat sum() const
    {
        Nat s = 0;
        for (Nat x : elements_)
            s = detail::checked_add(s, x);
        return s;
    }

    std::string str() const
    {
        std::string s = "{";
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            if (i)
                s += ",";
            s += std::to_string(elements_[i]);
        }
        return s + "}";
    }

    friend bool operator==(const NatSet &, const NatSet &) = default;
    friend auto operator<=>(const NatSet & a, const NatSet & b) { return a.elements_ <=> b.elements_; }
    friend std::ostream & operator<<(std::ostream & os, const NatSet & s) { return os << s.str(); }

private:
    void canonicalize()
    {
        std::sort(elements_.begin(), elements_.end());
        elements_.erase(std::unique(elements_.begin(), elements_.end()), elements_.end());
    }

    std::vector<Nat> elements_;
};

inline NatSet set_union(const NatSet & a, const NatSet & b)
{
    std::vector<Nat> out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return NatSet::from_sorted(std::move(out));
}

inline NatSet set_intersection(const NatSet & a, const NatSet & b)
{
    std::vector<Nat> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return NatSet::from_sorted(std::move(out));
}

inline NatSet set_difference(const NatSet & a, const NatSet & b)
{
    std::vector<Nat> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return NatSet::from_sorted(std::move(out));
}

enum class ShiftDirection { Up, Down };

/// A+n, or A-n = {a-n : a in A, a >= n}.
inline NatSet shift(const NatSet & a, Nat n, ShiftDirection direction)
{
    std::vector<Nat> out;
    out.reserve(a.size());
    if (direction == ShiftDirection::Up) {
        for (Nat x : a)
            out.push_back(detail::checked_add(x, n));
    }
    else {
        for (Nat x : a)
            if (x >= n)
                out.push_back(x - n);
    }
    return NatSet::from_sorted(std::move(out));
}

inline NatSet shift_up(const NatSet & a, Nat n) { return shift(a, n, ShiftDirection::Up); }
inline NatSet shift_down(const NatSet & a, Nat n) { return shift(a, n, ShiftDirection::Down); }

/// Unordered pair {lo, hi} with lo < hi.
struct Edge {
    Nat lo = 0;
    Nat hi = 1;

    static Edge of(Nat a, Nat b)
    {
        if (a == b)
            throw Error(ErrorCode::DegeneratePair, "pair {" + std::to_string(a) + "," + std::to_string(b) + "}");
        return a < b ? Edge{a, b} : Edge{b, a};
    }

    friend auto operator<=>(const Edge &, const Edge &) = default;
};

/// Subset of [n]^2: unordered pairs below a ground size.
class EdgeSet {
public:
    EdgeSet() = default;

    EdgeSet(std::size_t ground, std::vector<Edge> edges) : ground_(ground), edges_(std::move(edges))
    {
        for (const auto & e : edges_) {
            if (e.lo >= e.hi)
                throw Error(ErrorCode::DegeneratePair, "edge endpoints must be distinct and ordered");
            if (e.hi >= ground_)
                throw Error(ErrorCode::WindowExceeded, "edge endpoint " + std::to_string(e.hi) + " outside ground " +
                                                           std::to_string(ground_));
        }
        std::sort(edges_.begin(), edges_.end());
        edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
    }

    static EdgeSet complete(std::size_t ground) { return complete_on(NatSet::range(0, ground), ground); }

    static EdgeSet complete_on(const NatSet & vertices, std::size_t ground)
    {
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < vertices.size(); ++i)
            for (std::size_t j = i + 1; j < vertices.size(); ++j)
                edges.push_back(Edge{vertices[i], vertices[j]});
        return EdgeSet(ground, std::move(edges));
    }

    std::size_t ground() const noexcept { return ground_; }
    std::size_t size() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return edges_.empty(); }
    auto begin() const noexcept { return edges_.begin(); }
    auto end() const noexcept { return edges_.end(); }
    std::span<const Edge> edges() const noexcept { return edges_; }

    bool contains(Edge e) const { return std::binary_search(edges_.begin(), edges_.end(), e); }
    bool contains(Nat a, Nat b) const { return a != b && contains(Edge::of(a, b)); }

    bool is_subset_of(const EdgeSet & other) const
    {
        return std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
    }

    /// The same pairs as points (max, min) of Gamma = {(z0,z1) : z0 > z1}.
    std::vector<std::pair<Nat, Nat>> ordered_view() const
    {
        std::vector<std::pair<Nat, Nat>> out;
        out.reserve(edges_.size());
        for (const auto & e : edges_)
            out.emplace_back(e.hi, e.lo);
        std::sort(out.begin(), out.end());
        return out;
    }

    friend bool operator==(const EdgeSet &, const EdgeSet &) = default;

private:
    std::size_t ground_ = 0;
    std::vector<Edge> edges_;
};

/// Ordered pair (row, column) of omega x omega.
struct GridPoint {
    Nat row = 0;
    Nat col = 0;
    friend auto operator<=>(const GridPoint &, const GridPoint &) = default;
};

/// Finite subset of omega x omega.
class GridSet {
public:
    GridSet() = default;
    explicit GridSet(std::vector<GridPoint> points) : points_(std::move(points))
    {
        std::sort(points_.begin(), points_.end());
        points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    }
    GridSet(std::initializer_list<GridPoint> points) : GridSet(std::vector<GridPoint>(points)) {}

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    auto begin() const noexcept { return points_.begin(); }
    auto end() const noexcept { return points_.end(); }
    bool contains(GridPoint p) const { return std::binary_search(points_.begin(), points_.end(), p); }
    bool is_subset_of(const GridSet & other) const
    {
        return std::includes(other.points_.begin(), other.points_.end(), points_.begin(), points_.end());
    }

    friend bool operator==(const GridSet &, const GridSet &) = default;

private:
    std::vector<GridPoint> points_;
};

/// Any of the three carrier shapes the ideals live on.
using Carrier = std::variant<NatSet, EdgeSet, GridSet>;

} // namespace idealforge
