#pragma once

#include <cstdint>
#include <future>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chowcalc/errors.hpp"
#include "chowcalc/poly.hpp"
#include "chowcalc/ring.hpp"

namespace chowcalc {
namespace stablemaps {

using gring::GenTablePtr;
using gring::GradedPoly;
using gring::Rational;

// Mark universe for degree-d maps with m marked points. The set D holds
// the d degree marks 1_D..d_D; D' adds the non-privileged marked points
// 2_M..m_M, so |D'| = d + m - 1. Subsets of D' are bitmasks: bits
// 0..d-1 are the degree marks, bits d..d+m-2 the marked points.
struct MarkSet {
    int d = 1;
    int m = 1;

    int universe_size() const { return d + m - 1; }
    std::uint64_t full_set() const { return (std::uint64_t(1) << universe_size()) - 1; }
    std::uint64_t degree_mask() const { return (std::uint64_t(1) << d) - 1; }
    std::uint64_t mark_mask() const { return full_set() & ~degree_mask(); }

    bool is_mark_singleton(std::uint64_t h) const {
        return (h & mark_mask()) == h && h != 0 && (h & (h - 1)) == 0;
    }

    std::string element_name(int bit) const {
        if (bit < d)
            return std::to_string(bit + 1);
        return std::to_string(bit - d + 2) + "M";
    }

    std::string subset_name(std::uint64_t h) const {
        std::string s = "{";
        bool first = true;
        for (int bit = 0; bit < universe_size(); ++bit) {
            if (!(h >> bit & 1))
                continue;
            if (!first)
                s += ",";
            s += element_name(bit);
            first = false;
        }
        return s + "}";
    }
};

inline void validate_markset(const MarkSet& ms) {
    if (ms.d < 1)
        throw input_error("degree d must be at least 1");
    if (ms.m < 1)
        throw input_error("number of marked points m must be at least 1");
    if (ms.universe_size() > 20)
        throw guard_error("mark universe too large: |D'| = " +
                          std::to_string(ms.universe_size()));
}

inline int popcount(std::uint64_t h) {
    int c = 0;
    while (h) {
        h &= h - 1;
        ++c;
    }
    return c;
}

// A collection of subsets is nested when any two members are comparable
// or disjoint.
inline bool is_nested(const MarkSet& ms, const std::vector<std::uint64_t>& sets) {
    for (const auto h : sets)
        if (h == 0 || (h & ~ms.full_set()) != 0)
            throw input_error("nested-set member outside the mark universe");
    for (std::size_t i = 0; i < sets.size(); ++i) {
        for (std::size_t j = i + 1; j < sets.size(); ++j) {
            const std::uint64_t c = sets[i] & sets[j];
            if (c != sets[i] && c != sets[j] && c != 0)
                return false;
        }
    }
    return true;
}

// All h over which the boundary-divisor products range: nonempty subsets
// of D' with |h| > k_threshold, keeping I ∪ {h} nested, excluding the
// marked-point singletons, members of I, and (unless include_full_set)
// the full set D', whose complement cannot carry a stable contracted
// component. Output is in ascending bitmask order.
inline std::vector<std::uint64_t> admissible_h(const MarkSet& ms,
                                               const std::vector<std::uint64_t>& nested,
                                               int k_threshold,
                                               bool include_full_set = false) {
    validate_markset(ms);
    if (!is_nested(ms, nested))
        throw input_error("the supplied collection I is not a nested set");
    std::vector<std::uint64_t> out;
    for (std::uint64_t h = 1; h <= ms.full_set(); ++h) {
        if (popcount(h) <= k_threshold)
            continue;
        if (ms.is_mark_singleton(h))
            continue;
        if (h == ms.full_set() && !include_full_set)
            continue;
        bool ok = true;
        for (const auto hp : nested) {
            if (h == hp) { // already a member of I, not a new divisor
                ok = false;
                break;
            }
            const std::uint64_t c = h & hp;
            if (c != h && c != hp && c != 0) {
                ok = false;
                break;
            }
        }
        if (ok)
            out.push_back(h);
    }
    return out;
}

// Generators and derived classes for one stratum's Chern-class formulas:
// the free truncated polynomial ring on H, psi and the divisors D_h.
class ClassContext {
public:
    ClassContext(MarkSet ms, std::vector<std::uint64_t> nested, int n,
                 std::optional<int> cap = std::nullopt, bool include_full_set = false,
                 bool override_guard = false, bool parallel = false)
        : ms_(ms),
          nested_(std::move(nested)),
          n_(n),
          include_full_set_(include_full_set),
          parallel_(parallel) {
        validate_markset(ms_);
        if (n_ < 1)
            throw input_error("target dimension n must be at least 1");
        if (!override_guard && ms_.d > 4)
            throw guard_error("generator budget exceeded: 2^" +
                              std::to_string(ms_.universe_size()) + " = " +
                              std::to_string(std::uint64_t(1) << ms_.universe_size()) +
                              " candidate divisors at d = " + std::to_string(ms_.d));
        std::sort(nested_.begin(), nested_.end());
        family_ = admissible_h(ms_, nested_, 0, include_full_set_);
        cap_ = cap.value_or(ambient_dimension());
        if (cap_ < 0)
            cap_ = 0;

        std::vector<gring::Generator> gens{{"H", 1}, {"psi", 1}};
        for (const auto h : family_)
            gens.push_back({divisor_name(h), 1});
        table_ = gring::GenTable::make(std::move(gens));
    }

    const MarkSet& markset() const { return ms_; }
    const std::vector<std::uint64_t>& nested() const { return nested_; }
    const std::vector<std::uint64_t>& family() const { return family_; }
    int n() const { return n_; }
    int cap() const { return cap_; }
    bool parallel() const { return parallel_; }
    const GenTablePtr& table() const { return table_; }

    // dim M_{0,m}(P^n, d) = nd + d + n + m - 3
    int ambient_dimension() const { return n_ * ms_.d + ms_.d + n_ + ms_.m - 3; }

    std::string divisor_name(std::uint64_t h) const { return "D" + ms_.subset_name(h); }

    GradedPoly zero() const { return GradedPoly(table_, cap_); }
    GradedPoly one() const { return GradedPoly::constant(table_, cap_, Rational(1)); }
    GradedPoly H() const { return GradedPoly::generator(table_, cap_, "H"); }
    GradedPoly psi() const { return GradedPoly::generator(table_, cap_, "psi"); }
    GradedPoly divisor(std::uint64_t h) const {
        return GradedPoly::generator(table_, cap_, divisor_name(h));
    }

    bool is_admissible(std::uint64_t h) const {
        return std::binary_search(family_.begin(), family_.end(), h);
    }

    // l_I = |∪_{h∈I} h|
    int l_I() const {
        std::uint64_t u = 0;
        for (const auto h : nested_)
            u |= h;
        return popcount(u);
    }

    // s_I = number of maximal elements of I
    int s_I() const {
        int count = 0;
        for (const auto h : nested_) {
            bool maximal = true;
            for (const auto hp : nested_)
                if (hp != h && (h & hp) == h)
                    maximal = false;
            if (maximal)
                ++count;
        }
        return count;
    }

    // I_h = { h' in I : h' strictly contained in h }
    std::vector<std::uint64_t> I_h(std::uint64_t h) const {
        std::vector<std::uint64_t> out;
        for (const auto hp : nested_)
            if (hp != h && (hp & h) == hp)
                out.push_back(hp);
        return out;
    }

private:
    MarkSet ms_;
    std::vector<std::uint64_t> nested_;
    int n_;
    int cap_ = 0;
    bool include_full_set_ = false;
    bool parallel_ = false;
    std::vector<std::uint64_t> family_;
    GenTablePtr table_;
};

// psi_h = psi - sum_{h' ⊇ h} D_{h'},  psi_h^0 = psi - sum_{h' ⊋ h} D_{h'},
// both sums over the admissible divisors of the context. Their difference
// is -D_h identically.
inline std::pair<GradedPoly, GradedPoly> psi_classes(const ClassContext& ctx, std::uint64_t h) {
    if (!ctx.is_admissible(h))
        throw input_error("psi_classes: subset " + ctx.markset().subset_name(h) +
                          " is not admissible in this context");
    GradedPoly psi_h = ctx.psi();
    GradedPoly psi_h0 = ctx.psi();
    for (const auto hp : ctx.family()) {
        if ((h & hp) != h)
            continue; // not a superset of h
        psi_h -= ctx.divisor(hp);
        if (hp != h)
            psi_h0 -= ctx.divisor(hp);
    }
    return {psi_h, psi_h0};
}

// H_{I;h} = H + (|D'| - |h ∪ (∪I)|) psi - sum_{h' ⊋ h} |h' \ (h ∪ ∪I)| D_{h'}
inline GradedPoly H_class(const ClassContext& ctx, std::uint64_t h) {
    if (!ctx.is_admissible(h))
        throw input_error("H_class: subset " + ctx.markset().subset_name(h) +
                          " is not admissible in this context");
    std::uint64_t union_I = 0;
    for (const auto hp : ctx.nested())
        union_I |= hp;
    const std::uint64_t hu = h | union_I;
    GradedPoly result =
        ctx.H() + ctx.psi() * Rational(ctx.markset().universe_size() - popcount(hu));
    for (const auto hp : ctx.family()) {
        if (hp == h || (h & hp) != h)
            continue; // want strict supersets of h
        const int excess = popcount(hp & ~hu);
        if (excess != 0)
            result -= ctx.divisor(hp) * Rational(excess);
    }
    return result;
}

// c of the last contraction in the tower, a weighted projective fibration:
//   (1+H)^{n+1} (1+psi)^{s_I - 1} prod_{i=1}^{|D'| - l_I} (1+H+i psi)^{n+1}
inline GradedPoly chern_fibration_step(const ClassContext& ctx) {
    const GradedPoly one = ctx.one();
    GradedPoly result = (one + ctx.H()).pow(ctx.n() + 1);
    result = result * (one + ctx.psi()).pow(ctx.s_I() - 1);
    const int steps = ctx.markset().universe_size() - ctx.l_I();
    for (int i = 1; i <= steps; ++i)
        result = result * (one + ctx.H() + ctx.psi() * Rational(i)).pow(ctx.n() + 1);
    return result;
}

namespace detail {

// The per-divisor factor of the blow-up formulas:
//  (1+D_h)(1+psi_h)^{|I_h|-1} prod_j (1+H_{I;h}+j psi_h)^{n+1}
//  ------------------------------------------------------------
//  (1+psi_h^0)^{|I_h|-1} prod_j (1+H_{I;h}+j psi_h^0)^{n+1}
// with j = 1..|h \ ∪ I_h|.
inline GradedPoly h_factor(const ClassContext& ctx, std::uint64_t h) {
    const GradedPoly one = ctx.one();
    const auto [psi_h, psi_h0] = psi_classes(ctx, h);
    const GradedPoly Hh = H_class(ctx, h);
    std::uint64_t union_Ih = 0;
    for (const auto hp : ctx.I_h(h))
        union_Ih |= hp;
    const int q = popcount(h & ~union_Ih);
    const int e = static_cast<int>(ctx.I_h(h).size()) - 1;

    GradedPoly num = (one + ctx.divisor(h)) * (one + psi_h).pow(e);
    GradedPoly den = (one + psi_h0).pow(e);
    for (int j = 1; j <= q; ++j) {
        num = num * (one + Hh + psi_h * Rational(j)).pow(ctx.n() + 1);
        den = den * (one + Hh + psi_h0 * Rational(j)).pow(ctx.n() + 1);
    }
    return num * den.inv_unit();
}

// Multiplies the factors for the given h's into acc, in canonical
// (ascending bitmask) order. With ctx.parallel() the factors are computed
// concurrently but multiplied in the same order, so the result is
// identical either way.
inline GradedPoly multiply_factors(const ClassContext& ctx, GradedPoly acc,
                                   const std::vector<std::uint64_t>& hs) {
    if (!ctx.parallel() || hs.size() < 2) {
        for (const auto h : hs)
            acc = acc * h_factor(ctx, h);
        return acc;
    }
    std::vector<std::future<GradedPoly>> factors;
    factors.reserve(hs.size());
    for (const auto h : hs)
        factors.push_back(
            std::async(std::launch::async, [&ctx, h]() { return h_factor(ctx, h); }));
    for (auto& f : factors)
        acc = acc * f.get();
    return acc;
}

} // namespace detail

// One blow-up step of the tower: multiplies the previous total Chern class
// by the factor of every admissible h with |h| = k.
inline GradedPoly chern_blowup_step(const ClassContext& ctx, int k, const GradedPoly& c_prev) {
    if (k < 0 || k > ctx.markset().universe_size())
        throw input_error("chern_blowup_step: level k out of range");
    std::vector<std::uint64_t> hs;
    for (const auto h : ctx.family())
        if (popcount(h) == k)
            hs.push_back(h);
    return detail::multiply_factors(ctx, c_prev, hs);
}

// Closed form for the total Chern class of the normalized stratum at
// level k: the fibration class times the factors of all admissible h
// with |h| > k.
inline GradedPoly chern_stratum_closed_form(const ClassContext& ctx, int k) {
    std::vector<std::uint64_t> hs;
    for (const auto h : ctx.family())
        if (popcount(h) > k)
            hs.push_back(h);
    return detail::multiply_factors(ctx, chern_fibration_step(ctx), hs);
}

// Total Chern class of the moduli space of stable maps M_{0,m}(P^n, d),
// realized as the stratum I = {{2_M},...,{m_M}} at level 0 inside the
// one-pointed space of degree d + m - 1.
inline GradedPoly chern_M0m(const ClassContext& ctx) {
    std::vector<std::uint64_t> expected;
    for (int bit = ctx.markset().d; bit < ctx.markset().universe_size(); ++bit)
        expected.push_back(std::uint64_t(1) << bit);
    if (ctx.nested() != expected)
        throw input_error("chern_M0m: the context must carry I = {{2_M},...,{m_M}}");
    return chern_stratum_closed_form(ctx, 0);
}

inline ClassContext make_M0m_context(int n, int m, int d, std::optional<int> cap = std::nullopt,
                                     bool include_full_set = false, bool override_guard = false,
                                     bool parallel = false) {
    MarkSet ms{d, m};
    std::vector<std::uint64_t> nested;
    for (int bit = d; bit < ms.universe_size(); ++bit)
        nested.push_back(std::uint64_t(1) << bit);
    return ClassContext(ms, std::move(nested), n, cap, include_full_set, override_guard,
                        parallel);
}

// Degree-1 part computed by the log expansion: c_1 of a product of
// classes (1 + L)^e with L linear is sum e * L. Shares no code with the
// product engine above, so the two routes cross-check each other.
inline GradedPoly chern_degree1_log(const ClassContext& ctx, int k) {
    GradedPoly c1 = ctx.zero();
    c1 += ctx.H() * Rational(ctx.n() + 1);
    c1 += ctx.psi() * Rational(ctx.s_I() - 1);
    const int steps = ctx.markset().universe_size() - ctx.l_I();
    for (int i = 1; i <= steps; ++i)
        c1 += (ctx.H() + ctx.psi() * Rational(i)) * Rational(ctx.n() + 1);
    for (const auto h : ctx.family()) {
        if (popcount(h) <= k)
            continue;
        const auto [psi_h, psi_h0] = psi_classes(ctx, h);
        const GradedPoly Hh = H_class(ctx, h);
        std::uint64_t union_Ih = 0;
        for (const auto hp : ctx.I_h(h))
            union_Ih |= hp;
        const int q = popcount(h & ~union_Ih);
        const int e = static_cast<int>(ctx.I_h(h).size()) - 1;
        c1 += ctx.divisor(h);
        c1 += (psi_h - psi_h0) * Rational(e);
        for (int j = 1; j <= q; ++j)
            c1 += (psi_h - psi_h0) * Rational(j) * Rational(ctx.n() + 1);
    }
    return c1.degree_part(1);
}

// Coefficients of the degree-1 part, keyed by generator name.
inline std::map<std::string, Rational> degree1_coefficients(const GradedPoly& p) {
    std::map<std::string, Rational> out;
    const GradedPoly part = p.degree_part(1);
    for (const auto& [m, c] : part.terms()) {
        if (m.size() != 1 || m.front().second != 1)
            continue;
        out[p.table()->gen(m.front().first).name] = c;
    }
    return out;
}

// Substitutes 0 for every divisor generator D_h.
inline GradedPoly collapse_divisors(const ClassContext& ctx, const GradedPoly& p) {
    GradedPoly result = p;
    for (const auto h : ctx.family()) {
        const int idx = ctx.table()->index_of(ctx.divisor_name(h));
        result = result.substituted(idx, ctx.zero());
    }
    return result;
}

// ---------------------------------------------------------------------
// Curve models and combinatorial validators

struct CurveComponent {
    std::string id;
    int degree = 0;
    std::string parent; // empty for the root component
};

struct BasePoint {
    std::string id;
    std::string component;
    int multiplicity = 1;
};

// Marks h ∈ I on the curve: a tail (the full subcurve hanging at a
// component, away from the root) or a base point.
struct StratumMark {
    std::vector<int> h; // elements of D, 1-based
    bool is_tail = true;
    std::string at; // component id (tail) or base point id (point)
};

struct CurveModel {
    std::vector<CurveComponent> components;
    std::vector<BasePoint> base_points;
    std::map<int, std::string> marks; // marked point -> component id
    std::vector<StratumMark> stratum_marks;
    struct PartitionEntry {
        std::string owner; // component id or base point id
        std::vector<int> block;
    };
    std::optional<std::vector<PartitionEntry>> partition;
};

struct ValidationReport {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

namespace detail {

inline const CurveComponent* find_component(const CurveModel& curve, const std::string& id) {
    for (const auto& c : curve.components)
        if (c.id == id)
            return &c;
    return nullptr;
}

// Components of the subtree hanging at `root_of_tail` (inclusive).
inline std::set<std::string> subtree_of(const CurveModel& curve, const std::string& root_of_tail) {
    std::set<std::string> in{root_of_tail};
    bool grew = true;
    while (grew) {
        grew = false;
        for (const auto& c : curve.components)
            if (!in.count(c.id) && in.count(c.parent))
                grew = in.insert(c.id).second;
    }
    return in;
}

// Degree marks carried by the subtree: component degrees plus the
// multiplicities of the base points sitting on it. This is the unit count
// the set h of a tail accounts for, nested base points included.
inline int tail_units(const CurveModel& curve, const std::set<std::string>& subtree) {
    int units = 0;
    for (const auto& c : curve.components)
        if (subtree.count(c.id))
            units += c.degree;
    for (const auto& b : curve.base_points)
        if (subtree.count(b.component))
            units += b.multiplicity;
    return units;
}

} // namespace detail

inline void validate_curve(const CurveModel& curve, const MarkSet& ms) {
    std::set<std::string> ids;
    int roots = 0;
    for (const auto& c : curve.components) {
        if (!ids.insert(c.id).second)
            throw input_error("duplicate component id '" + c.id + "'");
        if (c.degree < 0)
            throw input_error("component '" + c.id + "' has negative degree");
        if (c.parent.empty())
            ++roots;
    }
    if (roots != 1)
        throw input_error("curve must have exactly one root component");
    for (const auto& c : curve.components)
        if (!c.parent.empty() && !ids.count(c.parent))
            throw input_error("component '" + c.id + "' has unknown parent '" + c.parent + "'");
    // acyclicity: walking parents from every component must reach the root
    for (const auto& c : curve.components) {
        std::set<std::string> seen;
        const CurveComponent* cur = &c;
        while (!cur->parent.empty()) {
            if (!seen.insert(cur->id).second)
                throw input_error("component parent links contain a cycle at '" + c.id + "'");
            cur = detail::find_component(curve, cur->parent);
        }
    }
    std::set<std::string> bids;
    int total = 0;
    for (const auto& c : curve.components)
        total += c.degree;
    for (const auto& b : curve.base_points) {
        if (!bids.insert(b.id).second)
            throw input_error("duplicate base point id '" + b.id + "'");
        if (ids.count(b.id))
            throw input_error("base point id '" + b.id + "' collides with a component id");
        if (!ids.count(b.component))
            throw input_error("base point '" + b.id + "' sits on unknown component");
        if (b.multiplicity < 1)
            throw input_error("base point '" + b.id + "' has multiplicity < 1");
        total += b.multiplicity;
    }
    if (total != ms.d)
        throw input_error("total degree plus base multiplicity is " + std::to_string(total) +
                          ", expected d = " + std::to_string(ms.d));
    for (const auto& [mark, comp] : curve.marks) {
        if (mark < 1 || mark > ms.m)
            throw input_error("mark " + std::to_string(mark) + " out of range");
        if (!ids.count(comp))
            throw input_error("mark " + std::to_string(mark) + " on unknown component");
    }
}

namespace detail {
inline std::uint64_t subset_from_elements(const MarkSet& ms, const std::vector<int>& elems) {
    std::uint64_t h = 0;
    for (const int e : elems) {
        if (e < 1 || e > ms.d)
            throw input_error("subset element " + std::to_string(e) + " outside D");
        h |= std::uint64_t(1) << (e - 1);
    }
    return h;
}
} // namespace detail

// Checks the three splitting-type conditions of a level-k stratum: tails
// of the right unit count for the large h, base points of the right
// multiplicity for the small h, and compatibility of the incidences.
inline ValidationReport validate_splitting_type(const CurveModel& curve, const MarkSet& ms,
                                                const std::vector<std::uint64_t>& nested, int k) {
    validate_curve(curve, ms);
    ValidationReport report;
    if (!is_nested(ms, nested)) {
        report.violations.push_back("I is not a nested set");
        return report;
    }
    const int d = ms.d;
    // small elements must be pairwise disjoint
    for (std::size_t i = 0; i < nested.size(); ++i)
        for (std::size_t j = i + 1; j < nested.size(); ++j)
            if (popcount(nested[i]) <= d - k && popcount(nested[j]) <= d - k &&
                (nested[i] & nested[j]) != 0)
                report.violations.push_back("small elements " + ms.subset_name(nested[i]) +
                                            " and " + ms.subset_name(nested[j]) +
                                            " are not disjoint");

    std::map<std::uint64_t, const StratumMark*> mark_of;
    for (const auto& sm : curve.stratum_marks)
        mark_of[detail::subset_from_elements(ms, sm.h)] = &sm;

    const std::string root_mark =
        curve.marks.count(1) ? curve.marks.at(1) : std::string();
    std::map<std::uint64_t, std::set<std::string>> tail_subtrees;
    std::map<std::uint64_t, std::string> point_components;

    for (const auto h : nested) {
        auto it = mark_of.find(h);
        if (it == mark_of.end()) {
            report.violations.push_back("no tail or point marked by " + ms.subset_name(h));
            continue;
        }
        const StratumMark& sm = *it->second;
        if (popcount(h) > d - k) {
            // condition (1): a tail avoiding the privileged point, of unit count |h|
            if (!sm.is_tail) {
                report.violations.push_back(ms.subset_name(h) +
                                            " should mark a tail at this level");
                continue;
            }
            if (!detail::find_component(curve, sm.at)) {
                report.violations.push_back("tail for " + ms.subset_name(h) +
                                            " at unknown component '" + sm.at + "'");
                continue;
            }
            const auto subtree = detail::subtree_of(curve, sm.at);
            if (subtree.size() == curve.components.size())
                report.violations.push_back("tail for " + ms.subset_name(h) +
                                            " is the whole curve");
            if (!root_mark.empty() && subtree.count(root_mark))
                report.violations.push_back("the privileged point lies on the tail for " +
                                            ms.subset_name(h));
            const int units = detail::tail_units(curve, subtree);
            if (units != popcount(h))
                report.violations.push_back("tail for " + ms.subset_name(h) + " carries " +
                                            std::to_string(units) + " units, expected " +
                                            std::to_string(popcount(h)));
            tail_subtrees[h] = subtree;
        } else {
            // condition (2): a base point of multiplicity |h|
            if (sm.is_tail) {
                report.violations.push_back(ms.subset_name(h) +
                                            " should mark a base point at this level");
                continue;
            }
            const BasePoint* bp = nullptr;
            for (const auto& b : curve.base_points)
                if (b.id == sm.at)
                    bp = &b;
            if (!bp) {
                report.violations.push_back("base point '" + sm.at + "' for " +
                                            ms.subset_name(h) + " not found");
                continue;
            }
            if (bp->multiplicity != popcount(h))
                report.violations.push_back("base point for " + ms.subset_name(h) +
                                            " has multiplicity " +
                                            std::to_string(bp->multiplicity) + ", expected " +
                                            std::to_string(popcount(h)));
            point_components[h] = bp->component;
        }
    }

    // condition (3): incidences mirror the nesting
    for (const auto& [hs, comp] : point_components) {
        for (const auto& [hb, subtree] : tail_subtrees) {
            const bool contained = (hs & hb) == hs;
            const bool on_tail = subtree.count(comp) > 0;
            if (contained != on_tail)
                report.violations.push_back("point " + ms.subset_name(hs) + " and tail " +
                                            ms.subset_name(hb) + " violate incidence");
        }
    }
    for (const auto& [h1, s1] : tail_subtrees) {
        for (const auto& [h2, s2] : tail_subtrees) {
            if (h1 >= h2)
                continue;
            const std::uint64_t c = h1 & h2;
            const auto contains = [](const std::set<std::string>& big,
                                     const std::set<std::string>& small) {
                for (const auto& x : small)
                    if (!big.count(x))
                        return false;
                return true;
            };
            if (c == h1) { // h1 ⊂ h2
                if (!contains(s2, s1))
                    report.violations.push_back("tail " + ms.subset_name(h1) +
                                                " not inside tail " + ms.subset_name(h2));
            } else if (c == h2) {
                if (!contains(s1, s2))
                    report.violations.push_back("tail " + ms.subset_name(h2) +
                                                " not inside tail " + ms.subset_name(h1));
            } else if (c == 0) {
                for (const auto& x : s1)
                    if (s2.count(x)) {
                        report.violations.push_back("tails " + ms.subset_name(h1) + " and " +
                                                    ms.subset_name(h2) +
                                                    " overlap but their sets are disjoint");
                        break;
                    }
            }
        }
    }
    return report;
}

// Checks a semi-rigid partition: blocks biject with components and base
// points, and block sizes match degrees and multiplicities.
inline ValidationReport validate_partition(const CurveModel& curve, const MarkSet& ms) {
    validate_curve(curve, ms);
    if (!curve.partition.has_value())
        throw input_error("curve model carries no partition");
    ValidationReport report;
    std::map<std::string, std::uint64_t> block_of;
    std::uint64_t used = 0;
    for (const auto& entry : *curve.partition) {
        if (block_of.count(entry.owner)) {
            report.violations.push_back("owner '" + entry.owner + "' has two blocks");
            continue;
        }
        const std::uint64_t b = detail::subset_from_elements(ms, entry.block);
        if (used & b)
            report.violations.push_back("block of '" + entry.owner +
                                        "' overlaps an earlier block");
        used |= b;
        block_of[entry.owner] = b;
    }
    if (used != ms.degree_mask())
        report.violations.push_back("blocks do not partition D");
    for (const auto& c : curve.components) {
        auto it = block_of.find(c.id);
        if (it == block_of.end()) {
            report.violations.push_back("component '" + c.id + "' has no block");
            continue;
        }
        if (popcount(it->second) != c.degree)
            report.violations.push_back("component '" + c.id + "' has degree " +
                                        std::to_string(c.degree) + " but block size " +
                                        std::to_string(popcount(it->second)));
        block_of.erase(it);
    }
    for (const auto& b : curve.base_points) {
        auto it = block_of.find(b.id);
        if (it == block_of.end()) {
            report.violations.push_back("base point '" + b.id + "' has no block");
            continue;
        }
        if (popcount(it->second) != b.multiplicity)
            report.violations.push_back("base point '" + b.id + "' has multiplicity " +
                                        std::to_string(b.multiplicity) + " but block size " +
                                        std::to_string(popcount(it->second)));
        block_of.erase(it);
    }
    for (const auto& [owner, block] : block_of)
        report.violations.push_back("block owner '" + owner +
                                    "' is neither a component nor a base point");
    return report;
}

} // namespace stablemaps
} // namespace chowcalc
