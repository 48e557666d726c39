#include "foliage/serialize.hpp"

#include "foliage/errors.hpp"

namespace foliage {

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed) {
            if (item.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) throw ParseError(where + ": unknown key '" + item.key() + "'");
    }
}

void to_json(nlohmann::json& j, const LSystemSpec& spec) {
    nlohmann::json rules = nlohmann::json::object();
    for (const auto& [symbol, body] : spec.rules) rules[std::string(1, symbol)] = body;
    j = {{"axiom", spec.axiom},
         {"rules", std::move(rules)},
         {"iterations", spec.iterations},
         {"step_m", spec.turtle.step_m},
         {"branching_angle_deg", spec.turtle.branching_angle_deg},
         {"golden_azimuth", spec.turtle.golden_azimuth},
         {"alphabet", spec.alphabet}};
}

void from_json(const nlohmann::json& j, LSystemSpec& spec) {
    reject_unknown_keys(
        j, {"axiom", "rules", "iterations", "step_m", "branching_angle_deg", "golden_azimuth", "alphabet"},
        "lsystem");
    spec = LSystemSpec{};
    spec.axiom = j.at("axiom").get<std::string>();
    spec.rules.clear();
    for (const auto& item : j.at("rules").items()) {
        if (item.key().size() != 1) {
            throw ValidationError("lsystem: rule key '" + item.key() + "' must be a single symbol");
        }
        spec.rules[item.key()[0]] = item.value().get<std::string>();
    }
    spec.iterations = j.at("iterations").get<int>();
    if (j.contains("step_m")) spec.turtle.step_m = j.at("step_m").get<double>();
    if (j.contains("branching_angle_deg")) {
        spec.turtle.branching_angle_deg = j.at("branching_angle_deg").get<double>();
    }
    if (j.contains("golden_azimuth")) spec.turtle.golden_azimuth = j.at("golden_azimuth").get<bool>();
    if (j.contains("alphabet")) spec.alphabet = j.at("alphabet").get<std::string>();
}

void to_json(nlohmann::json& j, const RandomizationParams& p) {
    j = {{"length_scale", {p.length_scale_lo, p.length_scale_hi}},
         {"curvature_jitter_m", p.curvature_jitter_m},
         {"sub_branch_jitter", p.sub_branch_jitter},
         {"leaf_orientation_uniform", p.leaf_orientation_uniform},
         {"leaf_count_scale", p.leaf_count_scale}};
}

void from_json(const nlohmann::json& j, RandomizationParams& p) {
    reject_unknown_keys(j,
                        {"length_scale", "curvature_jitter_m", "sub_branch_jitter",
                         "leaf_orientation_uniform", "leaf_count_scale"},
                        "randomization");
    p = RandomizationParams{};
    if (j.contains("length_scale")) {
        const auto& range = j.at("length_scale");
        if (!range.is_array() || range.size() != 2) {
            throw ValidationError("randomization: length_scale must be [lo, hi]");
        }
        p.length_scale_lo = range[0].get<double>();
        p.length_scale_hi = range[1].get<double>();
    }
    if (j.contains("curvature_jitter_m")) p.curvature_jitter_m = j.at("curvature_jitter_m").get<double>();
    if (j.contains("sub_branch_jitter")) p.sub_branch_jitter = j.at("sub_branch_jitter").get<double>();
    if (j.contains("leaf_orientation_uniform")) {
        p.leaf_orientation_uniform = j.at("leaf_orientation_uniform").get<bool>();
    }
    if (j.contains("leaf_count_scale")) p.leaf_count_scale = j.at("leaf_count_scale").get<double>();
}

void to_json(nlohmann::json& j, const Rect& r) {
    j = {r.x0, r.y0, r.x1, r.y1};
}

void from_json(const nlohmann::json& j, Rect& r) {
    if (!j.is_array() || j.size() != 4) throw ValidationError("domain must be [x0, y0, x1, y1]");
    r.x0 = j[0].get<double>();
    r.y0 = j[1].get<double>();
    r.x1 = j[2].get<double>();
    r.y1 = j[3].get<double>();
}

} // namespace foliage
