#pragma once

#include <optional>
#include <string>
#include <vector>

#include "chowcalc/errors.hpp"
#include "chowcalc/poly.hpp"
#include "chowcalc/ring.hpp"

namespace chowcalc {
namespace wblow {

using gring::GradedPoly;
using gring::Monomial;
using gring::Rational;
using gring::RingSpec;

// One weight block Q_n of a filtered normal bundle: the torus acts on Q_n
// with weight `weight`, rk Q_n = `rank`, and `total_class` is the total
// Chern class 1 + c_1 + ... + c_rank expressed in the ambient ring. Chern
// roots may be supplied instead of (or along with) the total class.
struct WeightBlock {
    int weight = 1;
    int rank = 1;
    GradedPoly total_class;
    std::vector<GradedPoly> roots; // optional degree-1 classes, size == rank

    WeightBlock(int w, int k, GradedPoly cls, std::vector<GradedPoly> rts = {})
        : weight(w), rank(k), total_class(std::move(cls)), roots(std::move(rts)) {}
};

struct WeightedBundleData {
    std::vector<WeightBlock> blocks;
};

inline void validate_bundle(const WeightedBundleData& data) {
    int prev_weight = 0;
    for (const auto& block : data.blocks) {
        if (block.weight <= 0)
            throw input_error("bundle block with nonpositive weight");
        if (block.weight <= prev_weight)
            throw input_error("bundle block weights must be strictly increasing");
        prev_weight = block.weight;
        if (block.rank <= 0)
            throw input_error("bundle block with nonpositive rank");
        if (block.total_class.constant_term() != Rational(1))
            throw input_error("bundle block total class must have constant term 1");
        if (!block.roots.empty()) {
            if (static_cast<int>(block.roots.size()) != block.rank)
                throw input_error("bundle block has " + std::to_string(block.roots.size()) +
                                  " roots but rank " + std::to_string(block.rank));
            GradedPoly prod =
                GradedPoly::constant(block.total_class.table(), block.total_class.cap(),
                                     Rational(1));
            for (const auto& r : block.roots) {
                if (!r.is_zero() && (r.max_degree() != 1 || r.degree_part(1) != r))
                    throw input_error("Chern roots must be homogeneous of degree 1");
                prod = prod * (GradedPoly::constant(r.table(), r.cap(), Rational(1)) + r);
            }
            if (prod != block.total_class)
                throw input_error("product of the supplied roots does not reproduce the "
                                  "block's total class");
        }
    }
}

// Total Chern class of Q tensored by the w-th power of the line class with
// c_1 = s: with roots a_i this is prod_i (1 + a_i + w*s); without roots it
// is computed through c(Q ⊗ M) = sum_i c_i(Q) (1 + t)^{rank-i} with
// t = w*s, the universal twist polynomial in the Chern classes.
inline GradedPoly twist_class(const WeightBlock& block, int w, const GradedPoly& s) {
    if (!s.is_zero() && (s.max_degree() != 1 || s.degree_part(1) != s))
        throw input_error("twist_class: the twisting class must be homogeneous of degree 1");
    const auto& table = block.total_class.table();
    const int cap = block.total_class.cap();
    const GradedPoly one = GradedPoly::constant(table, cap, Rational(1));
    const GradedPoly t = s * Rational(w);
    if (!block.roots.empty()) {
        GradedPoly prod = one;
        for (const auto& a : block.roots)
            prod = prod * (one + a + t);
        return prod;
    }
    GradedPoly result(table, cap);
    const GradedPoly one_plus_t = one + t;
    for (int i = 0; i <= block.rank && i <= cap; ++i)
        result += block.total_class.degree_part(i) * one_plus_t.pow(block.rank - i);
    return result;
}

// c(P) = p*c(Y) * prod_n c(Q_n ⊗ L^{w_n}), the total Chern class of a
// locally trivial weighted projective fibration; `tau` is c_1(O_P(1)).
inline GradedPoly fibration_chern(const GradedPoly& base_class, const WeightedBundleData& data,
                                  const GradedPoly& tau) {
    validate_bundle(data);
    GradedPoly result = base_class;
    for (const auto& block : data.blocks)
        result = result * twist_class(block, block.weight, tau);
    return result;
}

// Chern class of the relative tangent bundle of the fibration, from the
// Euler sequence 0 -> O_P -> ⊕ g*L_i ⊗ O_P(w_i) -> T_{P|Y} -> 0.
inline GradedPoly relative_tangent_chern(const WeightedBundleData& data, const GradedPoly& tau) {
    if (data.blocks.empty())
        throw input_error("relative_tangent_chern: empty bundle");
    const auto& model = data.blocks.front().total_class;
    return fibration_chern(GradedPoly::constant(model.table(), model.cap(), Rational(1)), data,
                           tau);
}

// Total Chern class of a weighted blow-up:
//   c(X~) = f*c(X) * (1 + E) * prod_n p(Q_n(-w_n E)) / prod_n p(Q_n),
// with E the class of the exceptional divisor. All block classes must
// already be expressed in the ambient ring's generators.
inline GradedPoly blowup_chern(const GradedPoly& ambient_class, const WeightedBundleData& data,
                               const GradedPoly& exceptional) {
    validate_bundle(data);
    if (data.blocks.empty())
        return ambient_class; // nothing blown up, no exceptional divisor
    if (!exceptional.is_zero() &&
        (exceptional.max_degree() != 1 || exceptional.degree_part(1) != exceptional))
        throw input_error("blowup_chern: exceptional class must be homogeneous of degree 1");
    const auto& table = ambient_class.table();
    const int cap = ambient_class.cap();
    const GradedPoly one = GradedPoly::constant(table, cap, Rational(1));
    GradedPoly numerator = ambient_class * (one + exceptional);
    GradedPoly denominator = one;
    for (const auto& block : data.blocks) {
        numerator = numerator * twist_class(block, -block.weight, exceptional);
        denominator = denominator * block.total_class;
    }
    return numerator * denominator.inv_unit();
}

// Presentation A*(E) ≅ A*(Y)[tau] / <P_{Y|X}(tau)> of the Chow ring of the
// exceptional divisor. P_{Y|X}(t) = prod_n prod_i (a_i + w_n t) is the top
// equivariant Chern class of ⊕ Q_n; its free term is the top Chern class
// of the normal bundle.
struct FibrationRing {
    RingSpec ring;
    std::string tau_name;
    Monomial relation_lhs;
};

inline FibrationRing make_fibration_ring(const RingSpec& base, const std::string& tau_name,
                                         const WeightedBundleData& data) {
    validate_bundle(data);
    std::vector<gring::Generator> gens;
    for (int i = 0; i < base.table()->size(); ++i)
        gens.push_back(base.table()->gen(i));
    gens.push_back(gring::Generator{tau_name, 1});
    auto table = gring::GenTable::make(gens);
    const int tau_idx = table->index_of(tau_name);
    int codim = 0;
    for (const auto& block : data.blocks)
        codim += block.rank;
    const int cap = base.cap() + codim; // enough room to hold the relation

    // P(t) = prod_n sum_j c_j(Q_n) w_n^{k_n - j} t^{k_n - j}, collected as
    // polynomial coefficients of powers of tau in the extended ring.
    auto lift = [&](const GradedPoly& p) {
        GradedPoly out(table, cap);
        for (const auto& [m, c] : p.terms()) {
            Monomial lifted;
            for (const auto& [idx, exp] : m) {
                const int new_idx = table->index_of(base.table()->gen(idx).name);
                lifted.emplace_back(new_idx, exp);
            }
            std::sort(lifted.begin(), lifted.end());
            out.add_term(lifted, c);
        }
        return out;
    };
    const GradedPoly tau = GradedPoly::generator(table, cap, tau_name);
    GradedPoly relation = GradedPoly::constant(table, cap, Rational(1));
    for (const auto& block : data.blocks) {
        GradedPoly factor(table, cap);
        for (int j = 0; j <= block.rank && j <= block.total_class.cap(); ++j) {
            Rational wpow(1);
            for (int i = 0; i < block.rank - j; ++i)
                wpow *= block.weight;
            factor += lift(block.total_class.degree_part(j)) * wpow * tau.pow(block.rank - j);
        }
        relation = relation * factor;
    }
    // normalize so the leading monomial tau^codim has coefficient 1
    const Monomial lead{{tau_idx, codim}};
    const Rational lc = relation.coeff(lead);
    if (lc == 0)
        throw internal_error("fibration relation lost its leading term");
    GradedPoly rhs = relation * (Rational(-1) / lc);
    rhs.set_term(lead, Rational(0));

    // base relations carry over into the presentation of A*(E)
    std::vector<gring::RewriteRule> rules;
    for (const auto& rule : base.rules()) {
        Monomial lifted_lhs;
        for (const auto& [idx, exp] : rule.lhs)
            lifted_lhs.emplace_back(table->index_of(base.table()->gen(idx).name), exp);
        std::sort(lifted_lhs.begin(), lifted_lhs.end());
        rules.push_back({std::move(lifted_lhs), lift(rule.rhs)});
    }
    rules.push_back({lead, rhs});
    return FibrationRing{RingSpec(table, cap, std::move(rules)), tau_name, lead};
}

} // namespace wblow
} // namespace chowcalc
