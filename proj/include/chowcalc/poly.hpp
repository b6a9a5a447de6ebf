#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chowcalc/errors.hpp"
#include "chowcalc/rational.hpp"

namespace chowcalc {
namespace gring {

struct Generator {
    std::string name;
    int degree = 1; // cohomological degree, > 0
};

// Immutable generator universe shared by all polynomials of one ring.
//
// Generators are stored in precedence order for the graded-lex monomial
// order: descending by name, so index 0 is the most significant slot.
class GenTable {
public:
    static std::shared_ptr<const GenTable> make(std::vector<Generator> gens) {
        for (const auto& g : gens) {
            if (g.name.empty())
                throw input_error("generator with empty name");
            if (g.degree <= 0)
                throw input_error("generator '" + g.name + "' must have positive degree");
        }
        std::sort(gens.begin(), gens.end(),
                  [](const Generator& a, const Generator& b) { return a.name > b.name; });
        for (std::size_t i = 1; i < gens.size(); ++i)
            if (gens[i].name == gens[i - 1].name)
                throw input_error("duplicate generator name '" + gens[i].name + "'");
        return std::shared_ptr<const GenTable>(new GenTable(std::move(gens)));
    }

    int size() const { return static_cast<int>(gens_.size()); }
    const Generator& gen(int i) const { return gens_.at(static_cast<std::size_t>(i)); }

    int index_of(std::string_view name) const {
        // descending-name order, so search with the reversed comparison
        auto it = std::lower_bound(gens_.begin(), gens_.end(), name,
                                   [](const Generator& g, std::string_view n) { return g.name > n; });
        if (it != gens_.end() && it->name == name)
            return static_cast<int>(it - gens_.begin());
        return -1;
    }

    bool same_as(const GenTable& other) const {
        if (this == &other)
            return true;
        if (gens_.size() != other.gens_.size())
            return false;
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (gens_[i].name != other.gens_[i].name || gens_[i].degree != other.gens_[i].degree)
                return false;
        return true;
    }

private:
    explicit GenTable(std::vector<Generator> gens) : gens_(std::move(gens)) {}
    std::vector<Generator> gens_;
};

using GenTablePtr = std::shared_ptr<const GenTable>;

// Sparse exponent vector: (generator index, exponent > 0), ascending index.
using Monomial = std::vector<std::pair<int, int>>;

// Sorts entries and merges repeated indices; entry point for monomials
// built by hand in initializer lists.
inline Monomial normalized_monomial(Monomial m) {
    std::sort(m.begin(), m.end());
    Monomial out;
    for (const auto& [idx, exp] : m) {
        if (!out.empty() && out.back().first == idx)
            out.back().second += exp;
        else
            out.emplace_back(idx, exp);
    }
    return out;
}

inline int monomial_degree(const Monomial& m, const GenTable& table) {
    int deg = 0;
    for (const auto& [idx, exp] : m)
        deg += table.gen(idx).degree * exp;
    return deg;
}

inline bool monomial_divides(const Monomial& d, const Monomial& m) {
    auto it = m.begin();
    for (const auto& [idx, exp] : d) {
        while (it != m.end() && it->first < idx)
            ++it;
        if (it == m.end() || it->first != idx || it->second < exp)
            return false;
    }
    return true;
}

inline Monomial monomial_quotient(const Monomial& m, const Monomial& d) {
    Monomial q;
    auto it = d.begin();
    for (const auto& [idx, exp] : m) {
        int e = exp;
        if (it != d.end() && it->first == idx) {
            e -= it->second;
            ++it;
        }
        if (e < 0)
            throw internal_error("monomial_quotient: divisor does not divide");
        if (e > 0)
            q.emplace_back(idx, e);
    }
    if (it != d.end())
        throw internal_error("monomial_quotient: divisor does not divide");
    return q;
}

inline Monomial monomial_product(const Monomial& a, const Monomial& b) {
    Monomial p;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() || ib != b.end()) {
        if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
            p.push_back(*ia++);
        } else if (ia == a.end() || ib->first < ia->first) {
            p.push_back(*ib++);
        } else {
            p.emplace_back(ia->first, ia->second + ib->second);
            ++ia;
            ++ib;
        }
    }
    return p;
}

// Graded lexicographic order: first by graded degree, ties broken
// lexicographically with index 0 (largest name) most significant.
// Returns <0, 0, >0 like a three-way comparison of a vs b.
inline int grlex_cmp(const Monomial& a, const Monomial& b, const GenTable& table) {
    const int da = monomial_degree(a, table);
    const int db = monomial_degree(b, table);
    if (da != db)
        return da < db ? -1 : 1;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first != ib->first) {
            // the one with a nonzero exponent in the more significant slot wins
            return ia->first < ib->first ? 1 : -1;
        }
        if (ia->second != ib->second)
            return ia->second < ib->second ? -1 : 1;
        ++ia;
        ++ib;
    }
    if (ia != a.end())
        return 1;
    if (ib != b.end())
        return -1;
    return 0;
}

// Sparse polynomial over Q, graded and truncated at a cap degree. Every
// mutating path drops zero coefficients and terms above the cap, so two
// equal values always have identical term maps.
class GradedPoly {
public:
    using TermMap = std::map<Monomial, Rational>;

    GradedPoly(GenTablePtr table, int cap) : table_(std::move(table)), cap_(cap) {
        if (!table_)
            throw input_error("GradedPoly requires a generator table");
        if (cap_ < 0)
            throw input_error("cap must be nonnegative");
    }

    static GradedPoly constant(GenTablePtr table, int cap, const Rational& c) {
        GradedPoly p(std::move(table), cap);
        if (c != 0)
            p.terms_[Monomial{}] = c;
        return p;
    }

    static GradedPoly generator(const GenTablePtr& table, int cap, std::string_view name) {
        const int idx = table->index_of(name);
        if (idx < 0)
            throw input_error("unknown generator '" + std::string(name) + "'");
        GradedPoly p(table, cap);
        if (table->gen(idx).degree <= cap)
            p.terms_[Monomial{{idx, 1}}] = Rational(1);
        return p;
    }

    const GenTablePtr& table() const { return table_; }
    int cap() const { return cap_; }
    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Rational constant_term() const {
        auto it = terms_.find(Monomial{});
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Rational coeff(const Monomial& mono) const {
        auto it = terms_.find(normalized_monomial(mono));
        return it == terms_.end() ? Rational(0) : it->second;
    }

    void set_term(const Monomial& mono, const Rational& c) {
        const Monomial m = normalized_monomial(mono);
        if (monomial_degree(m, *table_) > cap_)
            return;
        if (c == 0)
            terms_.erase(m);
        else
            terms_[m] = c;
    }

    void add_term(const Monomial& mono, const Rational& c) {
        const Monomial m = normalized_monomial(mono);
        if (c == 0 || monomial_degree(m, *table_) > cap_)
            return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (it->second == 0)
                terms_.erase(it);
        }
    }

    GradedPoly& operator+=(const GradedPoly& other) {
        require_compatible(other);
        for (const auto& [m, c] : other.terms_)
            add_term(m, c);
        return *this;
    }

    GradedPoly& operator-=(const GradedPoly& other) {
        require_compatible(other);
        for (const auto& [m, c] : other.terms_)
            add_term(m, -c);
        return *this;
    }

    friend GradedPoly operator+(GradedPoly a, const GradedPoly& b) { return a += b; }
    friend GradedPoly operator-(GradedPoly a, const GradedPoly& b) { return a -= b; }

    friend GradedPoly operator-(const GradedPoly& a) {
        GradedPoly r(a.table_, a.cap_);
        for (const auto& [m, c] : a.terms_)
            r.terms_[m] = -c;
        return r;
    }

    friend GradedPoly operator*(const GradedPoly& a, const GradedPoly& b) {
        a.require_compatible(b);
        GradedPoly r(a.table_, a.cap_);
        for (const auto& [ma, ca] : a.terms_) {
            const int da = monomial_degree(ma, *a.table_);
            for (const auto& [mb, cb] : b.terms_) {
                if (da + monomial_degree(mb, *a.table_) > a.cap_)
                    continue;
                r.add_term(monomial_product(ma, mb), ca * cb);
            }
        }
        return r;
    }

    friend GradedPoly operator*(const GradedPoly& a, const Rational& s) {
        GradedPoly r(a.table_, a.cap_);
        if (s != 0)
            for (const auto& [m, c] : a.terms_)
                r.terms_[m] = c * s;
        return r;
    }
    friend GradedPoly operator*(const Rational& s, const GradedPoly& a) { return a * s; }

    bool operator==(const GradedPoly& other) const {
        return cap_ == other.cap_ && table_->same_as(*other.table_) && terms_ == other.terms_;
    }
    bool operator!=(const GradedPoly& other) const { return !(*this == other); }

    // Multiplicative inverse of a unit, by geometric series up to the cap.
    GradedPoly inv_unit() const {
        const Rational c = constant_term();
        if (c == 0)
            throw input_error("inv_unit: constant term is zero, no inverse exists");
        GradedPoly u = *this;
        u.terms_.erase(Monomial{});
        const Rational cinv = Rational(1) / c;
        GradedPoly step = u * (-cinv); // -(a - c)/c, positive degree only
        GradedPoly acc = constant(table_, cap_, Rational(1));
        GradedPoly power = constant(table_, cap_, Rational(1));
        for (int i = 0; i < cap_; ++i) {
            power = power * step;
            if (power.is_zero())
                break;
            acc += power;
        }
        return acc * cinv;
    }

    // Integer power; negative exponents require a unit constant term.
    GradedPoly pow(long e) const {
        if (e < 0)
            return inv_unit().pow(-e);
        GradedPoly result = constant(table_, cap_, Rational(1));
        GradedPoly base = *this;
        while (e > 0) {
            if (e & 1)
                result = result * base;
            base = (e >>= 1) ? base * base : base;
        }
        return result;
    }

    // Sum of the terms of graded degree exactly k.
    GradedPoly degree_part(int k) const {
        if (k < 0 || k > cap_)
            throw input_error("degree_part: degree " + std::to_string(k) + " outside cap " +
                              std::to_string(cap_));
        GradedPoly r(table_, cap_);
        for (const auto& [m, c] : terms_)
            if (monomial_degree(m, *table_) == k)
                r.terms_[m] = c;
        return r;
    }

    int max_degree() const {
        int d = 0;
        for (const auto& [m, c] : terms_)
            d = std::max(d, monomial_degree(m, *table_));
        return d;
    }

    GradedPoly truncated(int new_cap) const {
        if (new_cap > cap_)
            throw input_error("truncated: cannot raise the cap");
        GradedPoly r(table_, new_cap);
        for (const auto& [m, c] : terms_)
            if (monomial_degree(m, *table_) <= new_cap)
                r.terms_[m] = c;
        return r;
    }

    // Same terms, larger cap. The caller asserts that the value is the full
    // product at the new cap too (e.g. generators, degree-1 classes).
    GradedPoly with_cap(int new_cap) const {
        if (new_cap < max_degree())
            throw input_error("with_cap: terms above requested cap");
        GradedPoly r(table_, new_cap);
        r.terms_ = terms_;
        return r;
    }

    // Replace one generator by a polynomial value, expanding exactly.
    GradedPoly substituted(int gen_index, const GradedPoly& value) const {
        require_compatible(value);
        GradedPoly result(table_, cap_);
        for (const auto& [m, c] : terms_) {
            GradedPoly term = constant(table_, cap_, c);
            for (const auto& [idx, exp] : m) {
                if (idx == gen_index) {
                    term = term * value.pow(exp);
                } else {
                    GradedPoly g(table_, cap_);
                    g.terms_[Monomial{{idx, 1}}] = Rational(1);
                    term = term * g.pow(exp);
                }
                if (term.is_zero())
                    break;
            }
            result += term;
        }
        return result;
    }

    // Terms in canonical order: degree ascending, graded-lex descending
    // within a degree. This is the order used by all serialized output.
    std::vector<std::pair<Monomial, Rational>> sorted_terms() const {
        std::vector<std::pair<Monomial, Rational>> out(terms_.begin(), terms_.end());
        std::sort(out.begin(), out.end(), [this](const auto& a, const auto& b) {
            const int da = monomial_degree(a.first, *table_);
            const int db = monomial_degree(b.first, *table_);
            if (da != db)
                return da < db;
            return grlex_cmp(a.first, b.first, *table_) > 0;
        });
        return out;
    }

    std::string monomial_to_string(const Monomial& m) const {
        // factors in ascending name order, e.g. "H*psi^2"
        std::vector<std::pair<std::string, int>> factors;
        for (const auto& [idx, exp] : m)
            factors.emplace_back(table_->gen(idx).name, exp);
        std::sort(factors.begin(), factors.end());
        std::string s;
        for (const auto& [name, exp] : factors) {
            if (!s.empty())
                s += "*";
            s += name;
            if (exp > 1)
                s += "^" + std::to_string(exp);
        }
        return s;
    }

    std::string to_string() const {
        if (terms_.empty())
            return "0";
        std::string s;
        for (const auto& [m, c] : sorted_terms()) {
            const bool neg = c < 0;
            const Rational mag = neg ? Rational(-c) : c;
            if (s.empty())
                s += neg ? "-" : "";
            else
                s += neg ? " - " : " + ";
            if (m.empty())
                s += rational_to_string(mag);
            else
                s += rational_to_string(mag) + "*" + monomial_to_string(m);
        }
        return s;
    }

private:
    void require_compatible(const GradedPoly& other) const {
        if (cap_ != other.cap_)
            throw input_error("cap mismatch: " + std::to_string(cap_) + " vs " +
                              std::to_string(other.cap_));
        if (!table_->same_as(*other.table_))
            throw input_error("generator universe mismatch");
    }

    GenTablePtr table_;
    int cap_;
    TermMap terms_;
};

} // namespace gring
} // namespace chowcalc
