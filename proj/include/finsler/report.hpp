#pragma once

// Report assembly for the CLI.  One ordered JSON document per run is the
// single source of truth: the structured format dumps it verbatim and the
// text format pretty-prints the same tree, so the two can never disagree.
// Checks carry the formula label they certify; the first failing check names
// the run's exit reason.  The volatile wall-clock lives in a single trailing
// "timing" object so reproducibility comparisons can drop exactly one key.

#include <cmath>
#include <string>
#include <vector>

#include "json.hpp"

#include "finsler/config.hpp"

namespace finsler {

using ordered_json = nlohmann::ordered_json;

struct Check {
    std::string name;
    std::string tag;  // formula label ("f2", "eq4", "1.6", "2.02", ...)
    double value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

class CheckSet {
  public:
    // value <= bound passes; non-finite values always fail
    void require(const std::string& name, const std::string& tag, double value, double bound) {
        Check c{name, tag, value, bound, std::isfinite(value) && value <= bound};
        checks_.push_back(std::move(c));
    }

    void require_true(const std::string& name, const std::string& tag, bool ok) {
        checks_.push_back(Check{name, tag, ok ? 0.0 : 1.0, 0.0, ok});
    }

    const Check* first_violation() const {
        for (const Check& c : checks_)
            if (!c.pass) return &c;
        return nullptr;
    }

    ordered_json to_json() const {
        ordered_json arr = ordered_json::array();
        for (const Check& c : checks_) {
            ordered_json j;
            j["name"] = c.name;
            j["tag"] = c.tag;
            j["value"] = c.value;
            j["bound"] = c.bound;
            j["pass"] = c.pass;
            arr.push_back(std::move(j));
        }
        return arr;
    }

    ordered_json violations() const {
        ordered_json arr = ordered_json::array();
        for (const Check& c : checks_)
            if (!c.pass) arr.push_back(c.name);
        return arr;
    }

    bool all_pass() const { return first_violation() == nullptr; }

  private:
    std::vector<Check> checks_;
};

inline ordered_json json_vec(const Vecd& v) {
    ordered_json arr = ordered_json::array();
    for (double e : v) arr.push_back(e);
    return arr;
}

inline ordered_json json_metric(const MetricSpec& m) {
    ordered_json j;
    switch (m.kind) {
        case MetricKind::Riemannian: {
            j["kind"] = "riemannian";
            if (!m.name.empty()) j["name"] = m.name;
            j["dim"] = m.dim;
            ordered_json g = ordered_json::array();
            for (const Expr& e : m.g_entries) g.push_back(e.text());
            j["g"] = std::move(g);
            break;
        }
        case MetricKind::Randers: {
            j["kind"] = "randers";
            if (!m.name.empty()) j["name"] = m.name;
            j["dim"] = m.dim;
            ordered_json b = ordered_json::array();
            for (const Expr& e : m.b_entries) b.push_back(e.text());
            j["b"] = std::move(b);
            j["alpha"] = json_metric(*m.alpha);
            break;
        }
        case MetricKind::MinkowskiNorm: {
            j["kind"] = "minkowski";
            if (!m.name.empty()) j["name"] = m.name;
            j["dim"] = m.dim;
            j["norm"] = m.norm.text();
            break;
        }
        case MetricKind::WarpedProduct: {
            j["kind"] = "warped";
            if (!m.name.empty()) j["name"] = m.name;
            j["dim"] = m.dim;
            j["warp"] = m.warp.text();
            j["base"] = json_metric(*m.base);
            j["fiber"] = json_metric(*m.fiber);
            break;
        }
    }
    return j;
}

namespace detail_report {

inline std::string scalar_text(const ordered_json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

inline bool is_scalar_array(const ordered_json& v) {
    if (!v.is_array()) return false;
    for (const auto& e : v)
        if (e.is_object() || e.is_array()) return false;
    return true;
}

inline void render(const ordered_json& v, const std::string& key, int depth, std::string& out) {
    std::string pad(static_cast<size_t>(depth) * 2, ' ');
    if (v.is_object()) {
        if (!key.empty()) out += pad + key + ":\n";
        for (auto it = v.begin(); it != v.end(); ++it) render(it.value(), it.key(), key.empty() ? depth : depth + 1, out);
        return;
    }
    if (v.is_array() && !is_scalar_array(v)) {
        out += pad + key + ":\n";
        int i = 0;
        for (const auto& e : v) render(e, "[" + std::to_string(i++) + "]", depth + 1, out);
        return;
    }
    if (is_scalar_array(v)) {
        std::string line = pad + key + " = [";
        for (size_t i = 0; i < v.size(); ++i) line += std::string(i ? ", " : "") + scalar_text(v[i]);
        out += line + "]\n";
        return;
    }
    out += pad + key + " = " + scalar_text(v) + "\n";
}

}  // namespace detail_report

inline std::string render_structured(const ordered_json& doc) { return doc.dump(2) + "\n"; }

inline std::string render_text(const ordered_json& doc) {
    std::string out;
    detail_report::render(doc, "", 0, out);
    return out;
}

// Drops the trailing timing object; reproducibility comparisons use this.
inline ordered_json strip_timing(ordered_json doc) {
    doc.erase("timing");
    return doc;
}

inline ordered_json json_tolerances(const Tolerances& t) {
    ordered_json j;
    j["identity"] = t.identity;
    j["mixed"] = t.mixed;
    j["flat"] = t.flat;
    j["berwald_match"] = t.berwald_match;
    j["speed_drift"] = t.speed_drift;
    j["detector"] = t.detector;
    return j;
}

inline ordered_json report_header(const RunConfig& cfg, const std::string& command) {
    ordered_json doc;
    doc["tool"] = "finslercurv";
    doc["command"] = command;
    doc["seed"] = cfg.seed;
    doc["budget"] = cfg.budget;
    doc["samples"] = cfg.samples;
    doc["tolerances"] = json_tolerances(cfg.tol);
    doc["metric"] = json_metric(cfg.metric);
    doc["config_echo"] = serialize_config(cfg);
    return doc;
}

}  // namespace finsler
