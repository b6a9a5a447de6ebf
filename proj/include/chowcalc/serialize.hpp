#pragma once

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "chowcalc/errors.hpp"
#include "chowcalc/groupoid.hpp"
#include "chowcalc/poly.hpp"
#include "chowcalc/ring.hpp"
#include "chowcalc/stablemaps.hpp"
#include "chowcalc/stratnet.hpp"
#include "chowcalc/wblow.hpp"

namespace chowcalc {
namespace io {

using nlohmann::json;

inline void require_object(const json& j, const std::string& what) {
    if (!j.is_object())
        throw input_error(what + " must be a JSON object");
}

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& what) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw input_error(what + ": unknown field '" + it.key() + "'");
}

// ---------------------------------------------------------------------
// polynomials: {"cap": n, "terms": [{"mono": {"H": 2}, "coef": "3/2"}]}

inline json mono_to_json(const gring::Monomial& m, const gring::GenTable& table) {
    json out = json::object();
    for (const auto& [idx, exp] : m)
        out[table.gen(idx).name] = exp;
    return out;
}

inline gring::Monomial mono_from_json(const json& j, const gring::GenTable& table) {
    require_object(j, "monomial");
    gring::Monomial m;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const int idx = table.index_of(it.key());
        if (idx < 0)
            throw input_error("monomial uses unknown generator '" + it.key() + "'");
        if (!it.value().is_number_integer() || it.value().get<long>() <= 0)
            throw input_error("exponent of '" + it.key() + "' must be a positive integer");
        m.emplace_back(idx, it.value().get<int>());
    }
    std::sort(m.begin(), m.end());
    return m;
}

inline json poly_to_json(const gring::GradedPoly& p) {
    json terms = json::array();
    for (const auto& [m, c] : p.sorted_terms())
        terms.push_back(json{{"mono", mono_to_json(m, *p.table())},
                             {"coef", gring::rational_to_string(c)}});
    return json{{"cap", p.cap()}, {"terms", terms}};
}

inline gring::GradedPoly poly_from_json(const json& j, const gring::GenTablePtr& table,
                                        std::optional<int> cap_override = std::nullopt) {
    require_object(j, "polynomial");
    reject_unknown_keys(j, {"cap", "terms"}, "polynomial");
    int cap = 0;
    if (cap_override)
        cap = *cap_override;
    else if (j.contains("cap") && j.at("cap").is_number_integer())
        cap = j.at("cap").get<int>();
    else
        throw input_error("polynomial needs a 'cap' field");
    gring::GradedPoly p(table, cap);
    if (!j.contains("terms"))
        return p;
    if (!j.at("terms").is_array())
        throw input_error("polynomial 'terms' must be an array");
    for (const auto& term : j.at("terms")) {
        require_object(term, "polynomial term");
        reject_unknown_keys(term, {"mono", "coef"}, "polynomial term");
        if (!term.contains("mono") || !term.contains("coef"))
            throw input_error("polynomial term needs 'mono' and 'coef'");
        p.add_term(mono_from_json(term.at("mono"), *table),
                   gring::parse_rational(term.at("coef").get<std::string>()));
    }
    return p;
}

// ---------------------------------------------------------------------
// ring presentations:
// {generators: [{name, degree}], relations: [{lhs_mono, rhs_poly}],
//  cap, integral: [{mono, value}]}

inline json ringspec_to_json(const gring::RingSpec& ring) {
    json gens = json::array();
    for (int i = 0; i < ring.table()->size(); ++i)
        gens.push_back(json{{"name", ring.table()->gen(i).name},
                            {"degree", ring.table()->gen(i).degree}});
    json rels = json::array();
    for (const auto& rule : ring.rules())
        rels.push_back(json{{"lhs_mono", mono_to_json(rule.lhs, *ring.table())},
                            {"rhs_poly", poly_to_json(rule.rhs)}});
    json out{{"generators", gens}, {"relations", rels}, {"cap", ring.cap()}};
    if (ring.has_integral()) {
        json table = json::array();
        for (const auto& [m, v] : ring.integral())
            table.push_back(json{{"mono", mono_to_json(m, *ring.table())},
                                 {"value", gring::rational_to_string(v)}});
        out["integral"] = table;
    }
    return out;
}

inline gring::RingSpec ringspec_from_json(const json& j) {
    require_object(j, "ring spec");
    reject_unknown_keys(j, {"generators", "relations", "cap", "integral"}, "ring spec");
    if (!j.contains("generators") || !j.at("generators").is_array())
        throw input_error("ring spec needs a 'generators' array");
    if (!j.contains("cap") || !j.at("cap").is_number_integer())
        throw input_error("ring spec needs an integer 'cap'");
    std::vector<gring::Generator> gens;
    for (const auto& g : j.at("generators")) {
        require_object(g, "generator");
        reject_unknown_keys(g, {"name", "degree"}, "generator");
        gring::Generator gen;
        gen.name = g.at("name").get<std::string>();
        gen.degree = g.contains("degree") ? g.at("degree").get<int>() : 1;
        gens.push_back(gen);
    }
    auto table = gring::GenTable::make(std::move(gens));
    const int cap = j.at("cap").get<int>();
    std::vector<gring::RewriteRule> rules;
    if (j.contains("relations")) {
        for (const auto& r : j.at("relations")) {
            require_object(r, "relation");
            reject_unknown_keys(r, {"lhs_mono", "rhs_poly"}, "relation");
            gring::Monomial lhs = mono_from_json(r.at("lhs_mono"), *table);
            gring::GradedPoly rhs = r.contains("rhs_poly")
                                        ? poly_from_json(r.at("rhs_poly"), table, cap)
                                        : gring::GradedPoly(table, cap);
            rules.push_back({std::move(lhs), std::move(rhs)});
        }
    }
    std::map<gring::Monomial, gring::Rational> integral;
    bool has_integral = false;
    if (j.contains("integral")) {
        has_integral = true;
        for (const auto& entry : j.at("integral")) {
            require_object(entry, "integral entry");
            reject_unknown_keys(entry, {"mono", "value"}, "integral entry");
            integral[mono_from_json(entry.at("mono"), *table)] =
                gring::parse_rational(entry.at("value").get<std::string>());
        }
        if (integral.empty())
            throw input_error("integral table must not be empty");
        const int top = gring::monomial_degree(integral.begin()->first, *table);
        for (const auto& [m, v] : integral)
            if (gring::monomial_degree(m, *table) != top)
                throw input_error("integral table monomials must share one degree");
    }
    return gring::RingSpec(table, cap, std::move(rules), std::move(integral), has_integral);
}

// ---------------------------------------------------------------------
// bundle data: {blocks: [{weight, rank, total_class, roots: [...]?}]}

inline json bundle_to_json(const wblow::WeightedBundleData& data) {
    json blocks = json::array();
    for (const auto& b : data.blocks) {
        json block{{"weight", b.weight},
                   {"rank", b.rank},
                   {"total_class", poly_to_json(b.total_class)}};
        if (!b.roots.empty()) {
            json roots = json::array();
            for (const auto& r : b.roots)
                roots.push_back(poly_to_json(r));
            block["roots"] = roots;
        }
        blocks.push_back(block);
    }
    return json{{"blocks", blocks}};
}

inline wblow::WeightedBundleData bundle_from_json(const json& j, const gring::GenTablePtr& table,
                                                  int cap) {
    require_object(j, "bundle data");
    reject_unknown_keys(j, {"blocks"}, "bundle data");
    wblow::WeightedBundleData data;
    if (!j.contains("blocks"))
        return data;
    for (const auto& b : j.at("blocks")) {
        require_object(b, "bundle block");
        reject_unknown_keys(b, {"weight", "rank", "total_class", "roots"}, "bundle block");
        if (!b.contains("weight") || !b.contains("rank"))
            throw input_error("bundle block needs 'weight' and 'rank'");
        gring::GradedPoly cls =
            b.contains("total_class")
                ? poly_from_json(b.at("total_class"), table, cap)
                : gring::GradedPoly::constant(table, cap, gring::Rational(1));
        std::vector<gring::GradedPoly> roots;
        if (b.contains("roots"))
            for (const auto& r : b.at("roots"))
                roots.push_back(poly_from_json(r, table, cap));
        data.blocks.emplace_back(b.at("weight").get<int>(), b.at("rank").get<int>(),
                                 std::move(cls), std::move(roots));
    }
    wblow::validate_bundle(data);
    return data;
}

// ---------------------------------------------------------------------
// stratum networks: {strata: [{index: [1,2], rank: 2}],
//                    covers: [{upper, lower, degree: "2"}]}

inline json index_to_json(const stratnet::Index& index) {
    json out = json::array();
    for (const int i : index)
        out.push_back(i);
    return out;
}

inline stratnet::Index index_from_json(const json& j) {
    if (!j.is_array())
        throw input_error("stratum index must be an array of integers");
    stratnet::Index index;
    for (const auto& e : j)
        index.insert(e.get<int>());
    return index;
}

inline stratnet::StratumNetwork network_from_json(const json& j) {
    require_object(j, "network");
    reject_unknown_keys(j, {"strata", "covers"}, "network");
    if (!j.contains("strata") || !j.at("strata").is_array())
        throw input_error("network needs a 'strata' array");
    std::vector<std::pair<stratnet::Index, int>> strata;
    for (const auto& s : j.at("strata")) {
        require_object(s, "stratum");
        reject_unknown_keys(s, {"index", "rank"}, "stratum");
        strata.emplace_back(index_from_json(s.at("index")), s.at("rank").get<int>());
    }
    std::vector<stratnet::StratumNetwork::Cover> covers;
    if (j.contains("covers"))
        for (const auto& c : j.at("covers")) {
            require_object(c, "cover");
            reject_unknown_keys(c, {"upper", "lower", "degree"}, "cover");
            covers.push_back({index_from_json(c.at("upper")), index_from_json(c.at("lower")),
                              c.contains("degree")
                                  ? gring::parse_rational(c.at("degree").get<std::string>())
                                  : gring::Rational(1)});
        }
    return stratnet::StratumNetwork(std::move(strata), std::move(covers));
}

// ---------------------------------------------------------------------
// groupoid models:
// {objects: [...], arrows: [{id, src, tgt}], compose: [[f,g,h]],
//  inverse: [[f,g]], identity: {obj: arrow},
//  parts: [{stratum, copy, tokens: [{id, at}]}],
//  equiv: [[v,w]], arrow_image: [[v,w,arrow]]}

inline groupoidlift::FiniteGroupoid groupoid_from_json(const json& j) {
    require_object(j, "groupoid model");
    std::vector<std::string> objects;
    for (const auto& o : j.at("objects"))
        objects.push_back(o.get<std::string>());
    std::vector<groupoidlift::FiniteGroupoid::ArrowData> arrows;
    for (const auto& a : j.at("arrows")) {
        require_object(a, "arrow");
        reject_unknown_keys(a, {"id", "src", "tgt"}, "arrow");
        arrows.push_back({a.at("id").get<std::string>(), a.at("src").get<std::string>(),
                          a.at("tgt").get<std::string>()});
    }
    std::map<std::string, std::string> identities;
    for (auto it = j.at("identity").begin(); it != j.at("identity").end(); ++it)
        identities[it.key()] = it.value().get<std::string>();
    std::vector<std::pair<std::string, std::string>> inverses;
    for (const auto& p : j.at("inverse"))
        inverses.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    std::vector<std::array<std::string, 3>> composition;
    for (const auto& c : j.at("compose"))
        composition.push_back({c.at(0).get<std::string>(), c.at(1).get<std::string>(),
                               c.at(2).get<std::string>()});
    return groupoidlift::FiniteGroupoid(std::move(objects), std::move(arrows),
                                        std::move(identities), std::move(inverses),
                                        std::move(composition));
}

inline groupoidlift::EmbeddedCoverData cover_data_from_json(const json& j) {
    require_object(j, "cover model");
    reject_unknown_keys(j,
                        {"objects", "arrows", "identity", "inverse", "compose", "parts", "equiv",
                         "arrow_image"},
                        "cover model");
    groupoidlift::EmbeddedCoverData data{groupoid_from_json(j), {}, {}, {}};
    if (j.contains("parts"))
        for (const auto& p : j.at("parts")) {
            require_object(p, "cover part");
            reject_unknown_keys(p, {"stratum", "copy", "tokens"}, "cover part");
            groupoidlift::CoverPart part;
            part.stratum = p.at("stratum").get<int>();
            part.copy = p.contains("copy") ? p.at("copy").get<int>() : 1;
            for (const auto& t : p.at("tokens")) {
                require_object(t, "cover token");
                reject_unknown_keys(t, {"id", "at"}, "cover token");
                part.tokens.push_back(
                    {t.at("id").get<std::string>(), t.at("at").get<std::string>()});
            }
            data.parts.push_back(std::move(part));
        }
    if (j.contains("equiv"))
        for (const auto& p : j.at("equiv"))
            data.equiv.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    if (j.contains("arrow_image"))
        for (const auto& p : j.at("arrow_image"))
            data.arrow_image[std::make_pair(p.at(0).get<std::string>(),
                                            p.at(1).get<std::string>())] =
                p.at(2).get<std::string>();
    return data;
}

// ---------------------------------------------------------------------
// curve models: {components: [{id, degree, parent}],
//                base_points: [{id, component, mult}], marks: {"1": comp},
//                stratum_marks: [{h: [...], kind, at}],
//                partition: [{owner, block: [...]}]}

inline stablemaps::CurveModel curve_from_json(const json& j) {
    require_object(j, "curve model");
    reject_unknown_keys(j, {"components", "base_points", "marks", "stratum_marks", "partition"},
                        "curve model");
    stablemaps::CurveModel curve;
    for (const auto& c : j.at("components")) {
        require_object(c, "component");
        reject_unknown_keys(c, {"id", "degree", "parent"}, "component");
        stablemaps::CurveComponent comp;
        comp.id = c.at("id").get<std::string>();
        comp.degree = c.contains("degree") ? c.at("degree").get<int>() : 0;
        comp.parent = c.contains("parent") ? c.at("parent").get<std::string>() : "";
        curve.components.push_back(std::move(comp));
    }
    if (j.contains("base_points"))
        for (const auto& b : j.at("base_points")) {
            require_object(b, "base point");
            reject_unknown_keys(b, {"id", "component", "mult"}, "base point");
            curve.base_points.push_back({b.at("id").get<std::string>(),
                                         b.at("component").get<std::string>(),
                                         b.at("mult").get<int>()});
        }
    if (j.contains("marks"))
        for (auto it = j.at("marks").begin(); it != j.at("marks").end(); ++it)
            curve.marks[std::stoi(it.key())] = it.value().get<std::string>();
    if (j.contains("stratum_marks"))
        for (const auto& sm : j.at("stratum_marks")) {
            require_object(sm, "stratum mark");
            reject_unknown_keys(sm, {"h", "kind", "at"}, "stratum mark");
            stablemaps::StratumMark mark;
            for (const auto& e : sm.at("h"))
                mark.h.push_back(e.get<int>());
            const std::string kind = sm.at("kind").get<std::string>();
            if (kind != "tail" && kind != "point")
                throw input_error("stratum mark kind must be 'tail' or 'point'");
            mark.is_tail = kind == "tail";
            mark.at = sm.at("at").get<std::string>();
            curve.stratum_marks.push_back(std::move(mark));
        }
    if (j.contains("partition")) {
        std::vector<stablemaps::CurveModel::PartitionEntry> entries;
        for (const auto& e : j.at("partition")) {
            require_object(e, "partition entry");
            reject_unknown_keys(e, {"owner", "block"}, "partition entry");
            stablemaps::CurveModel::PartitionEntry entry;
            entry.owner = e.at("owner").get<std::string>();
            for (const auto& x : e.at("block"))
                entry.block.push_back(x.get<int>());
            entries.push_back(std::move(entry));
        }
        curve.partition = std::move(entries);
    }
    return curve;
}

// ---------------------------------------------------------------------
// matrices for the decomposition data: rows of "p/q" strings

inline linalg::Matrix matrix_from_json(const json& j) {
    if (!j.is_array())
        throw input_error("matrix must be an array of rows");
    linalg::Matrix m;
    for (const auto& row : j) {
        linalg::Vector r;
        for (const auto& x : row)
            r.push_back(x.is_string() ? gring::parse_rational(x.get<std::string>())
                                      : gring::Rational(x.get<long>()));
        m.push_back(std::move(r));
    }
    linalg::check_rect(m);
    return m;
}

inline stratnet::DecompositionData decomposition_from_json(const json& j) {
    require_object(j, "decomposition data");
    reject_unknown_keys(j, {"indices", "covers"}, "decomposition data");
    stratnet::DecompositionData data;
    for (const auto& e : j.at("indices")) {
        require_object(e, "decomposition index");
        reject_unknown_keys(e, {"index", "restrict_plain", "restrict_lifted", "pullback"},
                            "decomposition index");
        data.indices[index_from_json(e.at("index"))] = {
            matrix_from_json(e.at("restrict_plain")),
            matrix_from_json(e.at("restrict_lifted")), matrix_from_json(e.at("pullback"))};
    }
    if (j.contains("covers"))
        for (const auto& e : j.at("covers")) {
            require_object(e, "decomposition cover");
            reject_unknown_keys(e, {"upper", "lower", "push_plain", "push_lifted"},
                                "decomposition cover");
            data.covers[std::make_pair(index_from_json(e.at("upper")),
                                       index_from_json(e.at("lower")))] = {
                matrix_from_json(e.at("push_plain")), matrix_from_json(e.at("push_lifted"))};
        }
    return data;
}

} // namespace io
} // namespace chowcalc
