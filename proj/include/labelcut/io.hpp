#ifndef LABELCUT_IO_HPP
#define LABELCUT_IO_HPP

#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "labelcut/core.hpp"
#include "labelcut/errors.hpp"
#include "labelcut/reduction.hpp"
#include "labelcut/solver.hpp"
#include "labelcut/verifier.hpp"

namespace labelcut {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolations = 2;
inline constexpr int kExitSelfCheckMismatch = 3;

namespace detail {

/// Shortest decimal string that parses back to exactly v.
inline std::string fmt_double(double v) {
    char buf[64];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Function-spec records
// ---------------------------------------------------------------------------

/// Parse a function spec record: {"kind": ..., "p"/"slope"/"cap"/"values",
/// "weight" (default 1)}.
inline std::pair<FamilySpec, double> parse_g_record(const json& rec) {
    if (!rec.is_object() || !rec.contains("kind") || !rec.at("kind").is_string())
        throw ParseError("function spec record needs a string field \"kind\"");
    const std::string kind = rec.at("kind").get<std::string>();
    double weight = 1.0;
    if (rec.contains("weight")) {
        if (!rec.at("weight").is_number()) throw ParseError("\"weight\" must be a number");
        weight = rec.at("weight").get<double>();
    }
    if (kind == "sqrt") return {SqrtFamily{}, weight};
    if (kind == "log1p") return {Log1pFamily{}, weight};
    if (kind == "power") {
        if (!rec.contains("p") || !rec.at("p").is_number())
            throw ParseError("power spec needs a numeric field \"p\"");
        return {PowerFamily{rec.at("p").get<double>()}, weight};
    }
    if (kind == "trunclin") {
        if (!rec.contains("slope") || !rec.at("slope").is_number() || !rec.contains("cap") ||
            !rec.at("cap").is_number())
            throw ParseError("trunclin spec needs numeric fields \"slope\" and \"cap\"");
        return {TruncLinFamily{rec.at("slope").get<double>(), rec.at("cap").get<double>()}, weight};
    }
    if (kind == "table") {
        if (!rec.contains("values") || !rec.at("values").is_array())
            throw ParseError("table spec needs an array field \"values\"");
        std::vector<double> values;
        for (const auto& v : rec.at("values")) {
            if (!v.is_number()) throw ParseError("table values must be numbers");
            values.push_back(v.get<double>());
        }
        return {TableFamily{std::move(values)}, weight};
    }
    throw ParseError("unknown function kind \"" + kind + "\"");
}

inline json g_record_to_json(const FamilySpec& family, double weight) {
    json rec;
    if (std::holds_alternative<SqrtFamily>(family)) {
        rec["kind"] = "sqrt";
    } else if (std::holds_alternative<Log1pFamily>(family)) {
        rec["kind"] = "log1p";
    } else if (const auto* pw = std::get_if<PowerFamily>(&family)) {
        rec["kind"] = "power";
        rec["p"] = pw->p;
    } else if (const auto* tl = std::get_if<TruncLinFamily>(&family)) {
        rec["kind"] = "trunclin";
        rec["slope"] = tl->slope;
        rec["cap"] = tl->cap;
    } else {
        rec["kind"] = "table";
        rec["values"] = std::get<TableFamily>(family).values;
    }
    if (weight != 1.0) rec["weight"] = weight;
    return rec;
}

/// Command-line mini-syntax: "sqrt", "log1p", "power:p", "trunclin:slope,cap",
/// "table:v0,v1,..."; an optional "*weight" suffix scales the function.
inline std::pair<FamilySpec, double> parse_g_string(const std::string& text) {
    std::string body = text;
    double weight = 1.0;
    if (auto star = body.rfind('*'); star != std::string::npos) {
        try {
            std::size_t used = 0;
            weight = std::stod(body.substr(star + 1), &used);
            if (used != body.size() - star - 1) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("bad weight suffix in g spec \"" + text + "\"");
        }
        body = body.substr(0, star);
    }
    std::string name = body, args;
    if (auto colon = body.find(':'); colon != std::string::npos) {
        name = body.substr(0, colon);
        args = body.substr(colon + 1);
    }
    auto split_numbers = [&](const std::string& list) {
        std::vector<double> out;
        std::size_t pos = 0;
        while (pos <= list.size()) {
            std::size_t comma = list.find(',', pos);
            std::string item = list.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            try {
                std::size_t used = 0;
                out.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError("bad number \"" + item + "\" in g spec \"" + text + "\"");
            }
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return out;
    };
    if (name == "sqrt" && args.empty()) return {SqrtFamily{}, weight};
    if (name == "log1p" && args.empty()) return {Log1pFamily{}, weight};
    if (name == "power") {
        auto v = split_numbers(args);
        if (v.size() != 1) throw ParseError("power takes one parameter, e.g. \"power:0.5\"");
        return {PowerFamily{v[0]}, weight};
    }
    if (name == "trunclin") {
        auto v = split_numbers(args);
        if (v.size() != 2) throw ParseError("trunclin takes two parameters, e.g. \"trunclin:1,2\"");
        return {TruncLinFamily{v[0], v[1]}, weight};
    }
    if (name == "table") {
        auto v = split_numbers(args);
        if (v.size() < 2) throw ParseError("table needs at least two values");
        return {TableFamily{std::move(v)}, weight};
    }
    throw ParseError("unknown g spec \"" + text + "\"");
}

inline std::string g_to_string(const FamilySpec& family, double weight) {
    std::string s;
    if (std::holds_alternative<SqrtFamily>(family)) {
        s = "sqrt";
    } else if (std::holds_alternative<Log1pFamily>(family)) {
        s = "log1p";
    } else if (const auto* pw = std::get_if<PowerFamily>(&family)) {
        s = "power:" + detail::fmt_double(pw->p);
    } else if (const auto* tl = std::get_if<TruncLinFamily>(&family)) {
        s = "trunclin:" + detail::fmt_double(tl->slope) + "," + detail::fmt_double(tl->cap);
    } else {
        s = "table:";
        const auto& values = std::get<TableFamily>(family).values;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += (i ? "," : "") + detail::fmt_double(values[i]);
    }
    if (weight != 1.0) s += "*" + detail::fmt_double(weight);
    return s;
}

inline std::string g_to_string(const ConcaveSpec& spec) { return g_to_string(spec.family, spec.weight); }

/// Materialize a spec for vectors of length k. Table specs keep their own
/// length; builtin families are sampled exactly as far as deviations reach.
/// With allow_unvalidated, a table that fails the concavity checks is kept as
/// a raw table instead of being rejected.
inline ConcaveSpec make_spec_for_k(const FamilySpec& family, double weight, std::size_t k,
                                   bool allow_unvalidated = false) {
    std::size_t t_max = std::max<std::size_t>(1, k / 2);
    if (const auto* tab = std::get_if<TableFamily>(&family)) {
        if (tab->values.size() < 2) throw ParameterError("table needs at least two samples");
        t_max = tab->values.size() - 1;
        if (allow_unvalidated) {
            try {
                return make_concave_spec(family, t_max, weight);
            } catch (const ValidationError&) {
                return make_unvalidated_table(tab->values, weight);
            }
        }
    }
    return make_concave_spec(family, t_max, weight);
}

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

/// Parse an instance document: {"nodes": n, "unary": [[c0, c1], ...],
/// "hyperedges": [{"members": [...], "g": {...}}, ...]}.
inline Instance parse_instance(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("instance document is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("instance document must be a JSON object");
    if (!doc.contains("nodes") || !doc.at("nodes").is_number_integer())
        throw ParseError("field \"nodes\" must be an integer");
    if (!doc.contains("unary") || !doc.at("unary").is_array())
        throw ParseError("field \"unary\" must be a list of [c0, c1] pairs");

    Instance inst;
    long nodes = doc.at("nodes").get<long>();
    if (nodes < 1) throw SemanticError("\"nodes\" must be >= 1");
    inst.nodes = static_cast<std::size_t>(nodes);

    for (const auto& pair : doc.at("unary")) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw ParseError("each \"unary\" entry must be a pair [c0, c1] of numbers");
        inst.unary.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }

    if (doc.contains("hyperedges")) {
        if (!doc.at("hyperedges").is_array()) throw ParseError("field \"hyperedges\" must be a list");
        long index = 0;
        for (const auto& rec : doc.at("hyperedges")) {
            if (!rec.is_object() || !rec.contains("members") || !rec.at("members").is_array() ||
                !rec.contains("g"))
                throw ParseError("each hyperedge needs fields \"members\" and \"g\" (hyperedge " +
                                 std::to_string(index) + ")");
            Hyperedge edge{{}, ConcaveSpec{}};
            for (const auto& m : rec.at("members")) {
                if (!m.is_number_integer())
                    throw ParseError("hyperedge members must be integers (hyperedge " +
                                     std::to_string(index) + ")");
                edge.members.push_back(m.get<int>());
            }
            auto [family, weight] = parse_g_record(rec.at("g"));
            try {
                edge.spec = make_spec_for_k(family, weight, edge.members.size());
            } catch (const ValidationError& e) {
                throw SemanticError("penalty validation failed at hyperedge " + std::to_string(index) +
                                        ": " + e.what(),
                                    index);
            } catch (const ParameterError& e) {
                throw SemanticError("bad penalty parameters at hyperedge " + std::to_string(index) + ": " +
                                        e.what(),
                                    index);
            }
            inst.hyperedges.push_back(std::move(edge));
            ++index;
        }
    }
    validate_instance(inst);
    return inst;
}

inline std::string serialize_instance(const Instance& inst) {
    json doc;
    doc["nodes"] = inst.nodes;
    json unary = json::array();
    for (const auto& [c0, c1] : inst.unary) unary.push_back(json::array({c0, c1}));
    doc["unary"] = std::move(unary);
    json edges = json::array();
    for (const Hyperedge& e : inst.hyperedges) {
        json rec;
        rec["members"] = e.members;
        rec["g"] = g_record_to_json(e.spec.family, e.spec.weight);
        edges.push_back(std::move(rec));
    }
    doc["hyperedges"] = std::move(edges);
    return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json violation_to_json(const Violation& v) {
    auto [proof_case, kappa] = classify_case(v.a, v.b);
    json rec;
    rec["a"] = v.a.to_string();
    rec["b"] = v.b.to_string();
    rec["margin"] = v.margin;
    rec["kappa"] = json::array({kappa.k1, kappa.k2, kappa.k3, kappa.k4});
    rec["case"] = to_string(proof_case);
    return rec;
}

inline json verify_report_to_json(const VerifyReport& report) {
    json doc;
    doc["pairs_checked"] = report.pairs_checked;
    doc["min_margin"] = report.min_margin;
    doc["violations_total"] = report.violations_total;
    doc["truncated"] = report.truncated;
    json list = json::array();
    for (const Violation& v : report.violations) list.push_back(violation_to_json(v));
    doc["violations"] = std::move(list);
    doc["elapsed_ms"] = report.elapsed.count();
    return doc;
}

inline json solution_to_json(const Solution& sol) {
    json doc;
    doc["assignment"] = sol.assignment.to_string();
    doc["energy"] = sol.energy;
    doc["method"] = sol.method == SolveMethod::Brute ? "brute" : "cut";
    json stats;
    if (sol.method == SolveMethod::Brute) {
        stats["assignments_scanned"] = sol.stats.assignments_scanned;
    } else {
        stats["flow"] = sol.stats.flow;
        stats["phases"] = sol.stats.phases;
    }
    doc["stats"] = std::move(stats);
    return doc;
}

} // namespace labelcut

#endif
