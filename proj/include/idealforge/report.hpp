#pragma once

#include "idealforge/error.hpp"

#include <json.hpp>

#include <string>
#include <utility>
#include <vector>

namespace idealforge {

/// One checked item: an id, a verdict and a human-readable detail.
struct ReportItem {
    std::string id;
    bool passed = true;
    std::string detail;

    friend bool operator==(const ReportItem &, const ReportItem &) = default;
};

/// Itemized verification result.
struct Report {
    std::string subject;
    std::vector<ReportItem> items;
    std::string caveat;

    void add(std::string id, bool passed, std::string detail = {})
    {
        items.push_back({std::move(id), passed, std::move(detail)});
    }

    bool passed() const
    {
        for (const auto & it : items)
            if (!it.passed)
                return false;
        return true;
    }

    const ReportItem * find(std::string_view id) const
    {
        for (const auto & it : items)
            if (it.id == id)
                return &it;
        return nullptr;
    }

    std::vector<std::string> failed_ids() const
    {
        std::vector<std::string> out;
        for (const auto & it : items)
            if (!it.passed)
                out.push_back(it.id);
        return out;
    }

    friend bool operator==(const Report &, const Report &) = default;
};

using Json = nlohmann::ordered_json;

inline Json to_json(const Report & r)
{
    Json items = Json::array();
    for (const auto & it : r.items)
        items.push_back(Json{{"id", it.id}, {"passed", it.passed}, {"detail", it.detail}});
    Json j{{"subject", r.subject}, {"passed", r.passed()}, {"items", std::move(items)}};
    if (!r.caveat.empty())
        j["caveat"] = r.caveat;
    return j;
}

inline Report report_from_json(const Json & j)
{
    try {
        Report r;
        r.subject = j.at("subject").get<std::string>();
        for (const auto & it : j.at("items"))
            r.items.push_back(
                {it.at("id").get<std::string>(), it.at("passed").get<bool>(), it.at("detail").get<std::string>()});
        if (j.contains("caveat"))
            r.caveat = j.at("caveat").get<std::string>();
        return r;
    } catch (const nlohmann::json::exception & e) {
        throw Error(ErrorCode::ParseError, std::string("malformed report: ") + e.what());
    }
}

} // namespace idealforge
