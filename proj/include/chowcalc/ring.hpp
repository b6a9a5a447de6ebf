#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "chowcalc/errors.hpp"
#include "chowcalc/poly.hpp"

namespace chowcalc {
namespace gring {

// One rewrite rule: a leading monomial and its replacement polynomial.
// Rules must be degree-homogeneous and strictly decrease the graded-lex
// order, which guarantees termination of normal_form.
struct RewriteRule {
    Monomial lhs;
    GradedPoly rhs;
};

// Presentation of a graded ring: generators with degrees, rewrite rules,
// a truncation cap, and optionally an integration table assigning exact
// values to the top-degree monomials.
class RingSpec {
public:
    RingSpec(GenTablePtr table, int cap, std::vector<RewriteRule> rules = {},
             std::map<Monomial, Rational> integral = {}, bool has_integral = false)
        : table_(std::move(table)),
          cap_(cap),
          rules_(std::move(rules)),
          has_integral_(has_integral) {
        for (auto& rule : rules_)
            rule.lhs = normalized_monomial(rule.lhs);
        for (auto& [m, v] : integral)
            integral_[normalized_monomial(m)] = v;
        validate();
    }

    const GenTablePtr& table() const { return table_; }
    int cap() const { return cap_; }
    const std::vector<RewriteRule>& rules() const { return rules_; }
    bool has_integral() const { return has_integral_; }
    const std::map<Monomial, Rational>& integral() const { return integral_; }

    // Common degree of the integral table's monomials.
    int integral_degree() const {
        if (!has_integral_ || integral_.empty())
            throw input_error("ring has no integral table");
        return monomial_degree(integral_.begin()->first, *table_);
    }

    GradedPoly zero() const { return GradedPoly(table_, cap_); }
    GradedPoly one() const { return GradedPoly::constant(table_, cap_, Rational(1)); }
    GradedPoly constant(const Rational& c) const { return GradedPoly::constant(table_, cap_, c); }
    GradedPoly gen(std::string_view name) const {
        return GradedPoly::generator(table_, cap_, name);
    }

private:
    void validate() const {
        for (const auto& rule : rules_) {
            if (rule.lhs.empty())
                throw input_error("rewrite rule with empty leading monomial");
            for (const auto& [idx, exp] : rule.lhs) {
                if (idx < 0 || idx >= table_->size())
                    throw input_error("rewrite rule references an unknown generator");
                if (exp <= 0)
                    throw input_error("rewrite rule with nonpositive exponent");
            }
            if (!rule.rhs.table()->same_as(*table_))
                throw input_error("rewrite rule replacement uses a different generator universe");
            const int lhs_deg = monomial_degree(rule.lhs, *table_);
            for (const auto& [m, c] : rule.rhs.terms()) {
                if (monomial_degree(m, *table_) != lhs_deg)
                    throw input_error("rewrite rule is not degree-homogeneous (leading monomial degree " +
                                      std::to_string(lhs_deg) + ")");
                if (grlex_cmp(m, rule.lhs, *table_) >= 0)
                    throw input_error(
                        "rewrite rule does not strictly decrease the graded-lex order");
            }
        }
    }

    GenTablePtr table_;
    int cap_;
    std::vector<RewriteRule> rules_;
    std::map<Monomial, Rational> integral_;
    bool has_integral_ = false;
};

namespace detail {
// Rewrites one reducible monomial occurrence; returns false if none applies.
inline bool reduce_once(GradedPoly& p, const RingSpec& ring) {
    for (const auto& [m, c] : p.terms()) {
        for (const auto& rule : ring.rules()) {
            if (!monomial_divides(rule.lhs, m))
                continue;
            const Monomial q = monomial_quotient(m, rule.lhs);
            GradedPoly replacement(ring.table(), p.cap());
            replacement.add_term(q, c);
            GradedPoly rhs_at_cap(ring.table(), p.cap());
            for (const auto& [rm, rc] : rule.rhs.terms())
                rhs_at_cap.add_term(rm, rc);
            p.set_term(m, Rational(0));
            p += replacement * rhs_at_cap;
            return true;
        }
    }
    return false;
}
} // namespace detail

// Reduces until no monomial is divisible by any rule's leading monomial.
// Terminates because every rule strictly decreases the graded-lex order;
// the step budget is a hard stop against rule sets that slipped past
// validation.
inline GradedPoly normal_form(const GradedPoly& a, const RingSpec& ring,
                              long step_budget = 1000000) {
    if (!a.table()->same_as(*ring.table()))
        throw input_error("normal_form: polynomial uses generators outside the ring");
    GradedPoly p = a;
    long steps = 0;
    while (detail::reduce_once(p, ring)) {
        if (++steps > step_budget)
            throw guard_error("normal_form exceeded the step budget (" +
                              std::to_string(step_budget) + "); rule set rejected");
    }
    return p;
}

// Local-confluence diamond test on desk-scale instances: for every pair of
// rules and every monomial up to max_degree divisible by both leading
// monomials, applying either rule first must normalize to the same value.
inline bool check_confluence(const RingSpec& ring, int max_degree,
                             std::string* counterexample = nullptr) {
    const auto& rules = ring.rules();
    const int n = ring.table()->size();
    for (std::size_t i = 0; i < rules.size(); ++i) {
        for (std::size_t j = i; j < rules.size(); ++j) {
            // smallest common multiple of the two leading monomials
            Monomial lcm;
            {
                auto ia = rules[i].lhs.begin();
                auto ib = rules[j].lhs.begin();
                while (ia != rules[i].lhs.end() || ib != rules[j].lhs.end()) {
                    if (ib == rules[j].lhs.end() ||
                        (ia != rules[i].lhs.end() && ia->first < ib->first))
                        lcm.push_back(*ia++);
                    else if (ia == rules[i].lhs.end() || ib->first < ia->first)
                        lcm.push_back(*ib++);
                    else {
                        lcm.emplace_back(ia->first, std::max(ia->second, ib->second));
                        ++ia;
                        ++ib;
                    }
                }
            }
            if (i == j || monomial_degree(lcm, *ring.table()) > max_degree)
                continue;
            // multiply the overlap by every monomial keeping the degree small
            std::vector<Monomial> cofactors{Monomial{}};
            for (std::size_t head = 0; head < cofactors.size(); ++head) {
                const Monomial cf = cofactors[head];
                const int last = cf.empty() ? 0 : cf.back().first;
                for (int g = last; g < n; ++g) {
                    const Monomial extended = monomial_product(cf, Monomial{{g, 1}});
                    if (monomial_degree(monomial_product(lcm, extended), *ring.table()) <=
                        max_degree)
                        cofactors.push_back(extended);
                }
            }
            for (const auto& cf : cofactors) {
                const Monomial m = monomial_product(lcm, cf);
                GradedPoly start(ring.table(), ring.cap());
                start.add_term(m, Rational(1));
                if (start.is_zero())
                    continue;
                auto apply_rule = [&](const RewriteRule& rule) {
                    const Monomial q = monomial_quotient(m, rule.lhs);
                    GradedPoly p(ring.table(), ring.cap());
                    for (const auto& [rm, rc] : rule.rhs.terms())
                        p.add_term(monomial_product(rm, q), rc);
                    return normal_form(p, ring);
                };
                if (apply_rule(rules[i]) != apply_rule(rules[j])) {
                    if (counterexample) {
                        GradedPoly witness(ring.table(), ring.cap());
                        witness.add_term(m, Rational(1));
                        *counterexample = witness.to_string();
                    }
                    return false;
                }
            }
        }
    }
    return true;
}

// Pairs each top-degree term with its value from the integral table.
// Lower-degree terms contribute zero; a top-degree monomial missing from
// the table, or any term above the table degree, rejects the input.
inline Rational integrate(const GradedPoly& a, const RingSpec& ring) {
    if (!ring.has_integral())
        throw input_error("integrate: ring has no integral table");
    if (!a.table()->same_as(*ring.table()))
        throw input_error("integrate: polynomial uses generators outside the ring");
    const int top = ring.integral_degree();
    Rational total(0);
    for (const auto& [m, c] : a.terms()) {
        const int d = monomial_degree(m, *ring.table());
        if (d < top)
            continue;
        if (d > top)
            throw input_error("integrate: term of degree " + std::to_string(d) +
                              " above the integral table degree " + std::to_string(top));
        auto it = ring.integral().find(m);
        if (it == ring.integral().end())
            throw input_error("integrate: top-degree monomial " + a.monomial_to_string(m) +
                              " absent from the integral table");
        total += c * it->second;
    }
    return total;
}

} // namespace gring
} // namespace chowcalc
