#pragma once

// Run configuration: a small key = value / [table] text format (a strict
// subset of TOML), a typed schema on top of it, and a canonical serializer.
// parse(serialize(cfg)) reproduces cfg byte-for-byte, which is what makes
// config echoes and reproducibility checks cheap.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "finsler/errors.hpp"
#include "finsler/metric.hpp"

namespace finsler {

struct Tolerances {
    double identity = 1e-6;      // closed-form identity residuals
    double mixed = 1e-8;         // mixed Ricci block
    double flat = 1e-8;          // flat-anchor curvature magnitudes
    double berwald_match = 1e-7; // closed-form vs brute-force Berwald entries
    double speed_drift = 1e-6;   // geodesic constant-speed drift
    double detector = 1e-3;      // nonconstant-warp Berwald family floor
};

struct GridParams {
    int base_per_dim = 64;
    int fiber_per_dim = 4;
    int curvature_points = 8;
    int einstein_batch = 6;
};

struct VolumeConfig {
    std::string form = "HT";  // HT | max | min | BH
    int n_dirs = 4096;
    double mc_rel_tol = 0.05;
    int quad_order = 16;
    bool has_bounds = false;  // warp range [bound_a, bound_b] for the volume bound
    double bound_a = 0.0;
    double bound_b = 0.0;
};

struct GeodesicConfig {
    Vecd x0;
    Vecd y0;
    double t_end = 10.0;
    double step = 1e-3;
    int store_every = 10;
};

struct AuditConfig {
    std::string op = "all";  // triviality | positivity | conditions | all
    double lambda_claim = 0.0;
};

struct WarpedConfig {
    bool einstein_expected = false;  // gate the Einstein-only residuals
};

struct RunConfig {
    std::string command;  // may be empty; the CLI subcommand takes precedence
    std::uint64_t seed = 20240901ull;
    long long budget = 100000;
    int samples = 20;
    std::string out;
    std::string format = "text";  // text | structured

    Tolerances tol;
    GridParams grid;
    VolumeConfig volume;
    GeodesicConfig geodesic;
    AuditConfig audit;
    WarpedConfig warped;
    MetricSpec metric;
};

namespace detail_cfg {

struct Value {
    enum class K { Str, Num, Bool, Arr };
    K k = K::Num;
    std::string s;
    double num = 0.0;
    bool b = false;
    std::vector<Value> arr;
    int line = 1, col = 1;
};

struct Doc {
    std::vector<std::pair<std::string, Value>> entries;  // dotted path -> value
    const Value* find(const std::string& path) const {
        for (const auto& e : entries)
            if (e.first == path) return &e.second;
        return nullptr;
    }
};

class Lexer {
  public:
    explicit Lexer(const std::string& text) : t_(text) {}

    bool eof() const { return i_ >= t_.size(); }
    char peek() const { return i_ < t_.size() ? t_[i_] : '\0'; }
    int line() const { return line_; }
    int col() const { return col_; }

    char get() {
        char c = t_[i_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_inline_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) get();
    }

    // whitespace, newlines and comments; used between statements and inside arrays
    void skip_all_ws() {
        for (;;) {
            skip_inline_ws();
            if (!eof() && peek() == '#') {
                while (!eof() && peek() != '\n') get();
                continue;
            }
            if (!eof() && (peek() == '\n' || peek() == '\r')) {
                get();
                continue;
            }
            return;
        }
    }

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_, col_, msg); }

    void expect_line_end() {
        skip_inline_ws();
        if (eof()) return;
        if (peek() == '#') {
            while (!eof() && peek() != '\n') get();
        }
        if (eof()) return;
        if (peek() == '\r') get();
        if (eof()) return;
        if (peek() != '\n') fail("expected end of line");
        get();
    }

    static bool bare_char(char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    }

    std::string bareword() {
        if (eof() || !bare_char(peek())) fail("expected identifier");
        std::string w;
        while (!eof() && bare_char(peek())) w += get();
        return w;
    }

    std::string dotted_key() {
        std::string key = bareword();
        while (!eof() && peek() == '.') {
            get();
            key += '.';
            key += bareword();
        }
        return key;
    }

    Value value() {
        Value v;
        v.line = line_;
        v.col = col_;
        if (eof()) fail("expected value");
        char c = peek();
        if (c == '"') {
            get();
            v.k = Value::K::Str;
            for (;;) {
                if (eof() || peek() == '\n') fail("unterminated string");
                char d = get();
                if (d == '"') break;
                if (d == '\\') {
                    if (eof()) fail("unterminated escape");
                    char e = get();
                    if (e == '"' || e == '\\')
                        v.s += e;
                    else
                        fail("unsupported escape sequence");
                } else {
                    v.s += d;
                }
            }
            return v;
        }
        if (c == '[') {
            get();
            v.k = Value::K::Arr;
            skip_all_ws();
            if (!eof() && peek() == ']') {
                get();
                return v;
            }
            for (;;) {
                v.arr.push_back(value());
                skip_all_ws();
                if (eof()) fail("unterminated array");
                char d = get();
                if (d == ']') break;
                if (d != ',') throw ParseError(line_, col_ - 1, "expected ',' or ']' in array");
                skip_all_ws();
            }
            return v;
        }
        if (bare_char(c)) {
            // true/false or a number
            size_t save_i = i_;
            int save_l = line_, save_c = col_;
            std::string w;
            while (!eof() && (bare_char(peek()) || peek() == '+' || peek() == '.')) w += get();
            if (w == "true" || w == "false") {
                v.k = Value::K::Bool;
                v.b = (w == "true");
                return v;
            }
            i_ = save_i;
            line_ = save_l;
            col_ = save_c;
        }
        // number: token up to a delimiter
        std::string tok;
        while (!eof()) {
            char d = peek();
            if (d == ' ' || d == '\t' || d == '\n' || d == '\r' || d == ',' || d == ']' || d == '#') break;
            tok += get();
        }
        if (tok.empty()) fail("expected value");
        char* end = nullptr;
        v.num = std::strtod(tok.c_str(), &end);
        if (end == nullptr || *end != '\0') throw ParseError(v.line, v.col, "invalid number '" + tok + "'");
        v.k = Value::K::Num;
        return v;
    }

  private:
    const std::string& t_;
    size_t i_ = 0;
    int line_ = 1, col_ = 1;
};

inline Doc parse_doc(const std::string& text) {
    Doc doc;
    Lexer lx(text);
    std::string prefix;
    for (;;) {
        lx.skip_all_ws();
        if (lx.eof()) break;
        if (lx.peek() == '[') {
            lx.get();
            lx.skip_inline_ws();
            std::string path = lx.dotted_key();
            lx.skip_inline_ws();
            if (lx.eof() || lx.peek() != ']') lx.fail("expected ']' after table name");
            lx.get();
            lx.expect_line_end();
            prefix = path + ".";
            continue;
        }
        int kline = lx.line(), kcol = lx.col();
        std::string key = lx.dotted_key();
        lx.skip_inline_ws();
        if (lx.eof() || lx.peek() != '=') lx.fail("expected '=' after key '" + key + "'");
        lx.get();
        lx.skip_inline_ws();
        Value v = lx.value();
        lx.expect_line_end();
        std::string path = prefix + key;
        if (doc.find(path)) throw ParseError(kline, kcol, "duplicate key '" + path + "'");
        doc.entries.emplace_back(std::move(path), std::move(v));
    }
    return doc;
}

class Reader {
  public:
    explicit Reader(const Doc& doc) : doc_(doc) {}

    bool has(const std::string& path) const { return doc_.find(path) != nullptr; }

    std::string str(const std::string& path, const char* fallback = nullptr) {
        const Value* v = take(path, fallback == nullptr);
        if (!v) return fallback;
        if (v->k != Value::K::Str) throw ParseError(v->line, v->col, "field '" + path + "' must be a string");
        return v->s;
    }

    double num(const std::string& path, double fallback, bool required = false) {
        const Value* v = take(path, required);
        if (!v) return fallback;
        if (v->k != Value::K::Num) throw ParseError(v->line, v->col, "field '" + path + "' must be a number");
        return v->num;
    }

    long long integer(const std::string& path, long long fallback, bool required = false) {
        const Value* v = take(path, required);
        if (!v) return fallback;
        if (v->k != Value::K::Num) throw ParseError(v->line, v->col, "field '" + path + "' must be a number");
        double r = std::round(v->num);
        if (std::abs(v->num - r) > 1e-9 || std::abs(v->num) > 9.0e15)
            throw ParseError(v->line, v->col, "field '" + path + "' must be an integer");
        return static_cast<long long>(r);
    }

    bool boolean(const std::string& path, bool fallback) {
        const Value* v = take(path, false);
        if (!v) return fallback;
        if (v->k != Value::K::Bool) throw ParseError(v->line, v->col, "field '" + path + "' must be true or false");
        return v->b;
    }

    std::vector<std::string> str_array(const std::string& path, bool required = true) {
        const Value* v = take(path, required);
        std::vector<std::string> out;
        if (!v) return out;
        if (v->k != Value::K::Arr) throw ParseError(v->line, v->col, "field '" + path + "' must be an array");
        for (const Value& e : v->arr) {
            if (e.k != Value::K::Str) throw ParseError(e.line, e.col, "field '" + path + "' must hold strings");
            out.push_back(e.s);
        }
        return out;
    }

    Vecd num_array(const std::string& path, bool required = true) {
        const Value* v = take(path, required);
        Vecd out;
        if (!v) return out;
        if (v->k != Value::K::Arr) throw ParseError(v->line, v->col, "field '" + path + "' must be an array");
        for (const Value& e : v->arr) {
            if (e.k != Value::K::Num) throw ParseError(e.line, e.col, "field '" + path + "' must hold numbers");
            out.push_back(e.num);
        }
        return out;
    }

    std::vector<bool> bool_array(const std::string& path) {
        const Value* v = take(path, true);
        std::vector<bool> out;
        if (v->k != Value::K::Arr) throw ParseError(v->line, v->col, "field '" + path + "' must be an array");
        for (const Value& e : v->arr) {
            if (e.k != Value::K::Bool) throw ParseError(e.line, e.col, "field '" + path + "' must hold booleans");
            out.push_back(e.b);
        }
        return out;
    }

    std::vector<std::pair<double, double>> pair_array(const std::string& path) {
        const Value* v = take(path, true);
        std::vector<std::pair<double, double>> out;
        if (v->k != Value::K::Arr) throw ParseError(v->line, v->col, "field '" + path + "' must be an array");
        for (const Value& e : v->arr) {
            if (e.k != Value::K::Arr || e.arr.size() != 2 || e.arr[0].k != Value::K::Num || e.arr[1].k != Value::K::Num)
                throw ParseError(e.line, e.col, "field '" + path + "' must hold [lo, hi] pairs");
            out.emplace_back(e.arr[0].num, e.arr[1].num);
        }
        return out;
    }

    // every entry must have been consumed by the schema
    void finish() const {
        for (const auto& e : doc_.entries)
            if (used_.find(e.first) == used_.end())
                throw ParseError(e.second.line, e.second.col, "unknown field '" + e.first + "'");
    }

  private:
    const Value* take(const std::string& path, bool required) {
        const Value* v = doc_.find(path);
        if (!v) {
            if (required) throw ParseError(0, 0, "missing required field '" + path + "'");
            return nullptr;
        }
        used_.insert(path);
        return v;
    }

    const Doc& doc_;
    std::set<std::string> used_;
};

inline Chart build_chart(Reader& r, const std::string& p, int n) {
    std::string kind = r.str(p + ".chart", "box");
    if (kind == "box") {
        double lo = r.num(p + ".lo", -1.0);
        double hi = r.num(p + ".hi", 1.0);
        return box_chart(n, lo, hi);
    }
    if (kind == "torus") {
        double period = r.num(p + ".period", 6.28318530717958647692);
        return torus_chart(n, period);
    }
    if (kind == "custom") {
        Chart c;
        c.periodic = r.bool_array(p + ".periodic");
        Vecd per = r.num_array(p + ".period");
        c.period.assign(per.begin(), per.end());
        c.domain = r.pair_array(p + ".domain");
        if (static_cast<int>(c.periodic.size()) != n || static_cast<int>(c.period.size()) != n ||
            static_cast<int>(c.domain.size()) != n)
            throw DimensionMismatch("custom chart arrays must have " + std::to_string(n) + " entries");
        return c;
    }
    throw ParseError(0, 0, "field '" + p + ".chart' must be box, torus or custom");
}

inline MetricSpec build_metric(Reader& r, const std::string& p) {
    std::string kind = r.str(p + ".kind");
    std::string name = r.str(p + ".name", "");
    try {
        if (kind == "riemannian") {
            int dim = static_cast<int>(r.integer(p + ".dim", 0, true));
            if (dim <= 0) throw DimensionMismatch("field '" + p + ".dim' must be positive");
            std::vector<std::string> g = r.str_array(p + ".g");
            return riemannian_spec(dim, std::move(g), build_chart(r, p, dim), std::move(name));
        }
        if (kind == "randers") {
            MetricSpec alpha = build_metric(r, p + ".alpha");
            std::vector<std::string> b = r.str_array(p + ".b");
            return randers_spec(std::move(alpha), std::move(b), std::move(name));
        }
        if (kind == "minkowski") {
            int dim = static_cast<int>(r.integer(p + ".dim", 0, true));
            if (dim <= 0) throw DimensionMismatch("field '" + p + ".dim' must be positive");
            std::string norm = r.str(p + ".norm");
            MetricSpec m = minkowski_spec(dim, norm, std::move(name));
            if (r.has(p + ".chart") || r.has(p + ".lo") || r.has(p + ".hi")) m.chart = build_chart(r, p, dim);
            return m;
        }
        if (kind == "warped") {
            MetricSpec base = build_metric(r, p + ".base");
            MetricSpec fiber = build_metric(r, p + ".fiber");
            std::string warp = r.str(p + ".warp");
            return warped_spec_metric(std::move(base), std::move(fiber), warp, std::move(name));
        }
    } catch (const ParseError&) {
        throw;
    } catch (const EngineError& e) {
        // lift construction-time failures (bad expressions, size mismatches)
        // into a located parse error naming the table
        throw ParseError(0, 0, "in table '" + p + "': " + e.what());
    }
    throw ParseError(0, 0, "field '" + p + ".kind' must be riemannian, randers, minkowski or warped");
}

// shortest decimal form that re-reads to exactly the same double
inline std::string fmt_double(double v) {
    char buf[40];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    std::string s(buf);
    // mark floats so integers stay visually distinct
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

inline std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

inline void serialize_chart(const Chart& c, const std::string& p, std::string& out) {
    const size_t n = c.domain.size();
    bool all_per = true, all_box = true;
    for (size_t i = 0; i < n; ++i) {
        if (c.periodic[i])
            all_box = false;
        else
            all_per = false;
    }
    auto same = [](double a, double b) { return a == b; };
    if (all_per && n > 0) {
        bool uniform = true;
        for (size_t i = 1; i < n; ++i)
            if (!same(c.period[i], c.period[0])) uniform = false;
        if (uniform) {
            out += "chart = \"torus\"\nperiod = " + fmt_double(c.period[0]) + "\n";
            return;
        }
    }
    if (all_box && n > 0) {
        bool uniform = true;
        for (size_t i = 1; i < n; ++i)
            if (!same(c.domain[i].first, c.domain[0].first) || !same(c.domain[i].second, c.domain[0].second))
                uniform = false;
        if (uniform) {
            out += "chart = \"box\"\nlo = " + fmt_double(c.domain[0].first) + "\nhi = " +
                   fmt_double(c.domain[0].second) + "\n";
            return;
        }
    }
    out += "chart = \"custom\"\nperiodic = [";
    for (size_t i = 0; i < n; ++i) out += std::string(i ? ", " : "") + (c.periodic[i] ? "true" : "false");
    out += "]\nperiod = [";
    for (size_t i = 0; i < n; ++i) out += std::string(i ? ", " : "") + fmt_double(c.period[i]);
    out += "]\ndomain = [";
    for (size_t i = 0; i < n; ++i)
        out += std::string(i ? ", " : "") + "[" + fmt_double(c.domain[i].first) + ", " +
               fmt_double(c.domain[i].second) + "]";
    out += "]\n";
    (void)p;
}

inline void serialize_metric(const MetricSpec& m, const std::string& p, std::string& out) {
    out += "\n[" + p + "]\n";
    switch (m.kind) {
        case MetricKind::Riemannian: {
            out += "kind = \"riemannian\"\n";
            if (!m.name.empty()) out += "name = " + quote(m.name) + "\n";
            out += "dim = " + std::to_string(m.dim) + "\n";
            out += "g = [";
            for (size_t i = 0; i < m.g_entries.size(); ++i)
                out += std::string(i ? ", " : "") + quote(m.g_entries[i].text());
            out += "]\n";
            serialize_chart(m.chart, p, out);
            break;
        }
        case MetricKind::Randers: {
            out += "kind = \"randers\"\n";
            if (!m.name.empty()) out += "name = " + quote(m.name) + "\n";
            out += "b = [";
            for (size_t i = 0; i < m.b_entries.size(); ++i)
                out += std::string(i ? ", " : "") + quote(m.b_entries[i].text());
            out += "]\n";
            serialize_metric(*m.alpha, p + ".alpha", out);
            break;
        }
        case MetricKind::MinkowskiNorm: {
            out += "kind = \"minkowski\"\n";
            if (!m.name.empty()) out += "name = " + quote(m.name) + "\n";
            out += "dim = " + std::to_string(m.dim) + "\n";
            out += "norm = " + quote(m.norm.text()) + "\n";
            serialize_chart(m.chart, p, out);
            break;
        }
        case MetricKind::WarpedProduct: {
            out += "kind = \"warped\"\n";
            if (!m.name.empty()) out += "name = " + quote(m.name) + "\n";
            out += "warp = " + quote(m.warp.text()) + "\n";
            serialize_metric(*m.base, p + ".base", out);
            serialize_metric(*m.fiber, p + ".fiber", out);
            break;
        }
    }
}

}  // namespace detail_cfg

inline RunConfig parse_config(const std::string& text) {
    detail_cfg::Doc doc = detail_cfg::parse_doc(text);
    detail_cfg::Reader r(doc);
    RunConfig c;
    c.command = r.str("command", "");
    long long seed = r.integer("seed", static_cast<long long>(c.seed));
    if (seed < 0) throw ParseError(0, 0, "field 'seed' must be nonnegative");
    c.seed = static_cast<std::uint64_t>(seed);
    c.budget = r.integer("budget", c.budget);
    c.samples = static_cast<int>(r.integer("samples", c.samples));
    c.out = r.str("out", "");
    c.format = r.str("format", "text");
    if (c.format != "text" && c.format != "structured")
        throw ParseError(0, 0, "field 'format' must be text or structured");

    c.tol.identity = r.num("tolerances.identity", c.tol.identity);
    c.tol.mixed = r.num("tolerances.mixed", c.tol.mixed);
    c.tol.flat = r.num("tolerances.flat", c.tol.flat);
    c.tol.berwald_match = r.num("tolerances.berwald_match", c.tol.berwald_match);
    c.tol.speed_drift = r.num("tolerances.speed_drift", c.tol.speed_drift);
    c.tol.detector = r.num("tolerances.detector", c.tol.detector);

    c.grid.base_per_dim = static_cast<int>(r.integer("grid.base_per_dim", c.grid.base_per_dim));
    c.grid.fiber_per_dim = static_cast<int>(r.integer("grid.fiber_per_dim", c.grid.fiber_per_dim));
    c.grid.curvature_points = static_cast<int>(r.integer("grid.curvature_points", c.grid.curvature_points));
    c.grid.einstein_batch = static_cast<int>(r.integer("grid.einstein_batch", c.grid.einstein_batch));

    c.volume.form = r.str("volume.form", "HT");
    if (c.volume.form != "HT" && c.volume.form != "max" && c.volume.form != "min" && c.volume.form != "BH")
        throw ParseError(0, 0, "field 'volume.form' must be HT, max, min or BH");
    c.volume.n_dirs = static_cast<int>(r.integer("volume.n_dirs", c.volume.n_dirs));
    c.volume.mc_rel_tol = r.num("volume.mc_rel_tol", c.volume.mc_rel_tol);
    c.volume.quad_order = static_cast<int>(r.integer("volume.quad_order", c.volume.quad_order));
    bool has_a = r.has("volume.bound_a"), has_b = r.has("volume.bound_b");
    if (has_a != has_b) throw ParseError(0, 0, "volume.bound_a and volume.bound_b must be given together");
    if (has_a) {
        c.volume.has_bounds = true;
        c.volume.bound_a = r.num("volume.bound_a", 0.0);
        c.volume.bound_b = r.num("volume.bound_b", 0.0);
    }

    c.geodesic.x0 = r.num_array("geodesic.x0", false);
    c.geodesic.y0 = r.num_array("geodesic.y0", false);
    c.geodesic.t_end = r.num("geodesic.t_end", c.geodesic.t_end);
    c.geodesic.step = r.num("geodesic.step", c.geodesic.step);
    c.geodesic.store_every = static_cast<int>(r.integer("geodesic.store_every", c.geodesic.store_every));

    c.audit.op = r.str("audit.op", "all");
    if (c.audit.op != "all" && c.audit.op != "triviality" && c.audit.op != "positivity" && c.audit.op != "conditions")
        throw ParseError(0, 0, "field 'audit.op' must be all, triviality, positivity or conditions");
    c.audit.lambda_claim = r.num("audit.lambda_claim", c.audit.lambda_claim);

    c.warped.einstein_expected = r.boolean("warped.einstein_expected", false);

    c.metric = detail_cfg::build_metric(r, "metric");
    r.finish();
    return c;
}

inline std::string serialize_config(const RunConfig& c) {
    using detail_cfg::fmt_double;
    using detail_cfg::quote;
    std::string out;
    out += "command = " + quote(c.command) + "\n";
    out += "seed = " + std::to_string(c.seed) + "\n";
    out += "budget = " + std::to_string(c.budget) + "\n";
    out += "samples = " + std::to_string(c.samples) + "\n";
    out += "out = " + quote(c.out) + "\n";
    out += "format = " + quote(c.format) + "\n";

    out += "\n[tolerances]\n";
    out += "identity = " + fmt_double(c.tol.identity) + "\n";
    out += "mixed = " + fmt_double(c.tol.mixed) + "\n";
    out += "flat = " + fmt_double(c.tol.flat) + "\n";
    out += "berwald_match = " + fmt_double(c.tol.berwald_match) + "\n";
    out += "speed_drift = " + fmt_double(c.tol.speed_drift) + "\n";
    out += "detector = " + fmt_double(c.tol.detector) + "\n";

    out += "\n[grid]\n";
    out += "base_per_dim = " + std::to_string(c.grid.base_per_dim) + "\n";
    out += "fiber_per_dim = " + std::to_string(c.grid.fiber_per_dim) + "\n";
    out += "curvature_points = " + std::to_string(c.grid.curvature_points) + "\n";
    out += "einstein_batch = " + std::to_string(c.grid.einstein_batch) + "\n";

    out += "\n[volume]\n";
    out += "form = " + quote(c.volume.form) + "\n";
    out += "n_dirs = " + std::to_string(c.volume.n_dirs) + "\n";
    out += "mc_rel_tol = " + fmt_double(c.volume.mc_rel_tol) + "\n";
    out += "quad_order = " + std::to_string(c.volume.quad_order) + "\n";
    if (c.volume.has_bounds) {
        out += "bound_a = " + fmt_double(c.volume.bound_a) + "\n";
        out += "bound_b = " + fmt_double(c.volume.bound_b) + "\n";
    }

    out += "\n[geodesic]\n";
    out += "x0 = [";
    for (size_t i = 0; i < c.geodesic.x0.size(); ++i) out += std::string(i ? ", " : "") + fmt_double(c.geodesic.x0[i]);
    out += "]\ny0 = [";
    for (size_t i = 0; i < c.geodesic.y0.size(); ++i) out += std::string(i ? ", " : "") + fmt_double(c.geodesic.y0[i]);
    out += "]\n";
    out += "t_end = " + fmt_double(c.geodesic.t_end) + "\n";
    out += "step = " + fmt_double(c.geodesic.step) + "\n";
    out += "store_every = " + std::to_string(c.geodesic.store_every) + "\n";

    out += "\n[audit]\n";
    out += "op = " + quote(c.audit.op) + "\n";
    out += "lambda_claim = " + fmt_double(c.audit.lambda_claim) + "\n";

    out += "\n[warped]\n";
    out += std::string("einstein_expected = ") + (c.warped.einstein_expected ? "true" : "false") + "\n";

    detail_cfg::serialize_metric(c.metric, "metric", out);
    return out;
}

inline bool operator==(const RunConfig& a, const RunConfig& b) { return serialize_config(a) == serialize_config(b); }

}  // namespace finsler
