#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "blab/io.hpp"
#include "blab/stats.hpp"

namespace blab {

using ojson = nlohmann::ordered_json;

/// Fixed field order, schema version "v": 1.
inline ojson report_to_json(const TestReport& r) {
    ojson j;
    j["v"] = 1;
    j["test_name"] = r.test_name;
    j["statistic"] = r.statistic;
    j["threshold"] = r.threshold;
    if (r.p_value)
        j["p_value"] = *r.p_value;
    else
        j["p_value"] = nullptr;
    j["n"] = r.n;
    j["seeds"] = r.seeds;
    j["verdict"] = to_string(r.verdict);
    j["notes"] = r.notes;
    return j;
}

struct ExperimentResult {
    std::string name;
    std::string anchor;
    std::vector<TestReport> checks;
};

inline ojson suite_to_json(const ojson& config, const std::vector<ExperimentResult>& results) {
    ojson j;
    j["version"] = 1;
    j["config"] = config;
    j["experiments"] = ojson::array();
    for (const auto& r : results) {
        ojson e;
        e["name"] = r.name;
        e["anchor"] = r.anchor;
        e["checks"] = ojson::array();
        for (const auto& c : r.checks) e["checks"].push_back(report_to_json(c));
        j["experiments"].push_back(e);
    }
    return j;
}

inline std::string suite_to_csv(const std::vector<ExperimentResult>& results) {
    std::string out = "experiment,check,statistic,threshold,p_value,verdict\n";
    for (const auto& r : results) {
        for (const auto& c : r.checks) {
            out += r.name + ',' + c.test_name + ',' + format_double(c.statistic) + ',' +
                   format_double(c.threshold) + ',' +
                   (c.p_value ? format_double(*c.p_value) : std::string()) + ',' +
                   to_string(c.verdict) + '\n';
        }
    }
    return out;
}

inline std::string suite_to_markdown(const std::vector<ExperimentResult>& results) {
    std::string out = "# Experiment suite\n";
    std::size_t pass = 0, flag = 0, fail = 0;
    for (const auto& r : results)
        for (const auto& c : r.checks) {
            if (c.verdict == Verdict::pass) ++pass;
            else if (c.verdict == Verdict::flag) ++flag;
            else ++fail;
        }
    out += "\n" + std::to_string(pass) + " pass, " + std::to_string(flag) + " flag, " +
           std::to_string(fail) + " fail\n";
    for (const auto& r : results) {
        out += "\n## " + r.name + "\n\n";
        out += r.anchor + "\n\n";
        out += "| check | statistic | threshold | p | verdict |\n";
        out += "|---|---|---|---|---|\n";
        for (const auto& c : r.checks) {
            out += "| " + c.test_name + " | " + format_double(c.statistic) + " | " +
                   format_double(c.threshold) + " | " +
                   (c.p_value ? format_double(*c.p_value) : std::string("-")) + " | " +
                   to_string(c.verdict) + " |\n";
        }
    }
    return out;
}

} // namespace blab
