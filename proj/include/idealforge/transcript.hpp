#pragma once

#include "idealforge/canonical.hpp"
#include "idealforge/error.hpp"
#include "idealforge/natset.hpp"
#include "idealforge/rational.hpp"
#include "idealforge/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace idealforge {

enum class Relation { Greater, GreaterEqual };

/// A recorded query phi(args) compared against a bound.
struct Inequality {
    std::vector<Nat> args; // one point, or the two ends of a pair
    Nat value = 0;
    Nat bound = 0;
    Relation relation = Relation::Greater;

    bool holds() const { return relation == Relation::Greater ? value > bound : value >= bound; }
    friend bool operator==(const Inequality &, const Inequality &) = default;
};

struct Step {
    std::size_t index = 0;
    NatSet chosen;
    Nat threshold = 0;
    Nat window = 0;
    std::vector<Inequality> checks;
    std::string note;

    friend bool operator==(const Step &, const Step &) = default;
};

/// Exact image sum next to the majorant it must not exceed.
struct Certificate {
    NatSet image;
    Rational image_sum;
    Rational majorant;
    std::string majorant_formula;

    bool within_majorant() const { return image_sum <= majorant; }
    friend bool operator==(const Certificate &, const Certificate &) = default;
};

struct Transcript {
    std::string strategy;
    std::string phi;
    std::optional<CanonicalCase> canonical_case;
    std::vector<Step> steps;
    NatSet witness;
    std::vector<NatSet> nested;
    std::optional<Certificate> certificate;

    friend bool operator==(const Transcript &, const Transcript &) = default;
};

inline Json to_json(const NatSet & s) { return Json(s.vec()); }

inline NatSet natset_from_json(const Json & j) { return NatSet(j.get<std::vector<Nat>>()); }

inline Json to_json(const Inequality & q)
{
    return Json{{"args", q.args},
                {"value", q.value},
                {"relation", q.relation == Relation::Greater ? ">" : ">="},
                {"bound", q.bound}};
}

inline Json to_json(const Step & s)
{
    Json checks = Json::array();
    for (const auto & q : s.checks)
        checks.push_back(to_json(q));
    Json j{{"index", s.index},
           {"chosen", to_json(s.chosen)},
           {"threshold", s.threshold},
           {"window", s.window},
           {"checks", std::move(checks)}};
    if (!s.note.empty())
        j["note"] = s.note;
    return j;
}

inline Json to_json(const Certificate & c)
{
    return Json{{"image", to_json(c.image)},
                {"image_sum", c.image_sum.str()},
                {"majorant", c.majorant.str()},
                {"majorant_formula", c.majorant_formula},
                {"within_majorant", c.within_majorant()}};
}

inline Json to_json(const Transcript & t)
{
    Json steps = Json::array();
    for (const auto & s : t.steps)
        steps.push_back(to_json(s));
    Json j{{"strategy", t.strategy}, {"phi", t.phi}};
    if (t.canonical_case)
        j["case"] = std::string(case_name(*t.canonical_case));
    j["steps"] = std::move(steps);
    j["witness"] = to_json(t.witness);
    if (!t.nested.empty()) {
        Json nested = Json::array();
        for (const auto & b : t.nested)
            nested.push_back(to_json(b));
        j["nested"] = std::move(nested);
    }
    if (t.certificate)
        j["certificate"] = to_json(*t.certificate);
    return j;
}

inline Transcript transcript_from_json(const Json & j)
{
    try {
        Transcript t;
        t.strategy = j.at("strategy").get<std::string>();
        t.phi = j.at("phi").get<std::string>();
        if (j.contains("case"))
            t.canonical_case = parse_case(j.at("case").get<std::string>());
        for (const auto & s : j.at("steps")) {
            Step step;
            step.index = s.at("index").get<std::size_t>();
            step.chosen = natset_from_json(s.at("chosen"));
            step.threshold = s.at("threshold").get<Nat>();
            step.window = s.at("window").get<Nat>();
            for (const auto & q : s.at("checks")) {
                const auto rel = q.at("relation").get<std::string>();
                if (rel != ">" && rel != ">=")
                    throw Error(ErrorCode::ParseError, "unknown relation '" + rel + "'");
                step.checks.push_back({q.at("args").get<std::vector<Nat>>(), q.at("value").get<Nat>(),
                                       q.at("bound").get<Nat>(),
                                       rel == ">" ? Relation::Greater : Relation::GreaterEqual});
            }
            if (s.contains("note"))
                step.note = s.at("note").get<std::string>();
            t.steps.push_back(std::move(step));
        }
        t.witness = natset_from_json(j.at("witness"));
        if (j.contains("nested"))
            for (const auto & b : j.at("nested"))
                t.nested.push_back(natset_from_json(b));
        if (j.contains("certificate")) {
            const auto & c = j.at("certificate");
            t.certificate = Certificate{natset_from_json(c.at("image")),
                                        Rational::parse(c.at("image_sum").get<std::string>()),
                                        Rational::parse(c.at("majorant").get<std::string>()),
                                        c.at("majorant_formula").get<std::string>()};
        }
        return t;
    } catch (const nlohmann::json::exception & e) {
        throw Error(ErrorCode::ParseError, std::string("malformed transcript: ") + e.what());
    }
}

} // namespace idealforge
