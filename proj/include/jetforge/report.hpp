#ifndef JETFORGE_REPORT_HPP
#define JETFORGE_REPORT_HPP

#include <string>

#include "jetforge/problem.hpp"

namespace jetforge {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kPrngName = "splitmix64-v1";

// Common envelope: every command answers with the same outer shape so that
// reports diff cleanly and golden files stay stable.
inline Json report_envelope(const std::string& command, const ProblemSpec* problem) {
    Json j;
    j["tool"] = "jetforge";
    j["version"] = kVersion;
    j["prng"] = kPrngName;
    j["command"] = command;
    if (problem) j["problem"] = problem_echo(*problem);
    return j;
}

inline Json rank_row_json(const RankRow& r) {
    Json j;
    j["order"] = r.order;
    j["ambient"] = r.ambient;
    j["rank"] = r.rank;
    j["codim"] = r.codim;
    j["constant_rank"] = r.constant_rank;
    j["sample_ranks"] = r.sample_ranks;
    return j;
}

inline Json rank_report_json(const RankReport& rep) {
    Json j;
    j["seed"] = rep.seed;
    j["samples"] = rep.samples;
    Json rows = Json::array();
    for (const auto& r : rep.rows) rows.push_back(rank_row_json(r));
    j["orders"] = rows;
    j["kernel_dims"] = rep.kernel_dims;
    return j;
}

inline Json filtration_report_json(const FiltrationReport& rep) {
    Json j;
    Json rows = Json::array();
    for (const auto& r : rep.rows) {
        Json row;
        row["order"] = r.order;
        row["kernel_dim"] = r.kernel_dim;
        row["constant_dim"] = r.constant_dim;
        row["matches_prolongation"] = r.matches_prolongation;
        rows.push_back(row);
    }
    j["kernels"] = rows;
    if (rep.stable_from)
        j["stable_from"] = *rep.stable_from;
    else
        j["stable_from"] = nullptr;
    return j;
}

inline Json cartan_report_json(const CartanReport& rep) {
    Json j;
    j["restricted_dims"] = rep.restricted_dims;
    j["characters"] = rep.characters;
    j["prolong_dim"] = rep.prolong_dim;
    j["character_bound"] = rep.character_bound;
    j["involutive"] = rep.involutive;
    return j;
}

inline Json flow_report_json(const FlowCheckReport& rep) {
    Json j;
    j["order"] = rep.order;
    j["step"] = rep.step;
    j["tolerance"] = rep.tolerance;
    j["max_error"] = rep.max_error;
    j["passed"] = rep.passed;
    return j;
}

inline Json finiteness_report_json(const FinitenessReport& rep) {
    Json j;
    j["order"] = rep.order;
    j["ambient"] = rep.ambient;
    Json rows = Json::array();
    for (const auto& r : rep.per_sample) {
        Json row;
        row["function_rank"] = r.function_rank;
        row["orbit_rank"] = r.orbit_rank;
        row["codim"] = r.codim;
        row["annihilates"] = r.annihilates;
        row["pass"] = r.pass;
        rows.push_back(row);
    }
    j["samples"] = rows;
    j["pass"] = rep.pass;
    return j;
}

inline Json transitivity_report_json(const TransitivityReport& rep) {
    Json j;
    j["per_sample"] = rep.per_sample;
    j["transitive"] = rep.transitive;
    return j;
}

// Deterministic plain-text rendering of a report: the same content as the
// JSON, one "path: value" line per leaf, arrays indexed.
inline void render_text_into(const Json& j, const std::string& prefix, std::string& out) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            render_text_into(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(),
                             out);
        return;
    }
    if (j.is_array()) {
        bool scalars = true;
        for (const auto& v : j)
            if (v.is_object() || v.is_array()) scalars = false;
        if (scalars) {
            out += prefix + ": " + j.dump() + "\n";
            return;
        }
        for (std::size_t i = 0; i < j.size(); ++i)
            render_text_into(j[i], prefix + "[" + std::to_string(i) + "]", out);
        return;
    }
    out += prefix + ": " + j.dump() + "\n";
}

inline std::string render_report(const Json& j, const std::string& format) {
    if (format == "json") return j.dump(2) + "\n";
    std::string out;
    render_text_into(j, "", out);
    return out;
}

} // namespace jetforge

#endif
