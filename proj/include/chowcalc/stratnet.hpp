#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chowcalc/errors.hpp"
#include "chowcalc/linalg.hpp"
#include "chowcalc/poly.hpp"
#include "chowcalc/ring.hpp"

namespace chowcalc {
namespace stratnet {

using gring::GradedPoly;
using gring::Rational;
using gring::RingSpec;

// Index of a stratum: the set of labels it lies on. The empty index is
// the ambient space.
using Index = std::set<int>;

inline std::string index_to_string(const Index& index) {
    std::string s = "{";
    bool first = true;
    for (const int i : index) {
        if (!first)
            s += ",";
        s += std::to_string(i);
        first = false;
    }
    return s + "}";
}

inline bool subset_of(const Index& a, const Index& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

// Ranked poset of stratum indices with a positive rational degree on
// each cover relation (J, I), I ⊂ J, rank(J) = rank(I) + 1, modelling
// the generic degree of Y_J over its image in Y_I.
class StratumNetwork {
public:
    struct Cover {
        Index upper;
        Index lower;
        Rational degree;
    };

    StratumNetwork(std::vector<std::pair<Index, int>> strata, std::vector<Cover> covers) {
        for (const auto& [index, rank] : strata) {
            if (rank < 0)
                throw input_error("stratum " + index_to_string(index) + " has negative rank");
            if (!rank_.emplace(index, rank).second)
                throw input_error("duplicate stratum " + index_to_string(index));
        }
        auto bottom = rank_.find(Index{});
        if (bottom == rank_.end() || bottom->second != 0)
            throw input_error("network must contain the bottom stratum {} at rank 0");
        for (const auto& [index, rank] : rank_) {
            if (rank == 0 && !index.empty())
                throw input_error("rank-0 stratum " + index_to_string(index) +
                                  " is not the bottom");
            by_rank_.resize(std::max<std::size_t>(by_rank_.size(), rank + 1));
            by_rank_[rank].push_back(index);
        }
        for (auto& level : by_rank_)
            std::sort(level.begin(), level.end());
        for (const auto& cover : covers) {
            const int ru = rank_of(cover.upper);
            const int rl = rank_of(cover.lower);
            if (ru != rl + 1)
                throw input_error("cover " + index_to_string(cover.upper) + " over " +
                                  index_to_string(cover.lower) + " has rank gap " +
                                  std::to_string(ru - rl));
            if (!subset_of(cover.lower, cover.upper) || cover.lower == cover.upper)
                throw input_error("cover " + index_to_string(cover.upper) + " over " +
                                  index_to_string(cover.lower) +
                                  " is not a strict inclusion of index sets");
            if (cover.degree <= 0)
                throw input_error("cover degree must be positive");
            if (!edges_.emplace(std::make_pair(cover.upper, cover.lower), cover.degree).second)
                throw input_error("duplicate cover " + index_to_string(cover.upper) + " over " +
                                  index_to_string(cover.lower));
        }
        for (const auto& [index, rank] : rank_) {
            if (rank == 0)
                continue;
            if (lower_covers(index).empty())
                throw input_error("stratum " + index_to_string(index) + " has no lower cover");
        }
        validate_chain_products();
    }

    bool contains(const Index& index) const { return rank_.count(index) > 0; }

    int rank_of(const Index& index) const {
        auto it = rank_.find(index);
        if (it == rank_.end())
            throw input_error("unknown stratum " + index_to_string(index));
        return it->second;
    }

    int max_rank() const { return static_cast<int>(by_rank_.size()) - 1; }

    const std::vector<Index>& at_rank(int rank) const {
        static const std::vector<Index> empty;
        if (rank < 0 || rank >= static_cast<int>(by_rank_.size()))
            return empty;
        return by_rank_[rank];
    }

    std::vector<Index> all_indices() const {
        std::vector<Index> out;
        for (const auto& level : by_rank_)
            out.insert(out.end(), level.begin(), level.end());
        return out;
    }

    std::vector<Index> lower_covers(const Index& upper) const {
        std::vector<Index> out;
        for (const auto& [edge, degree] : edges_)
            if (edge.first == upper)
                out.push_back(edge.second);
        return out;
    }

    std::vector<Index> upper_covers(const Index& lower) const {
        std::vector<Index> out;
        for (const auto& [edge, degree] : edges_)
            if (edge.second == lower)
                out.push_back(edge.first);
        return out;
    }

    Rational edge_degree(const Index& upper, const Index& lower) const {
        auto it = edges_.find(std::make_pair(upper, lower));
        if (it == edges_.end())
            throw input_error("no cover " + index_to_string(upper) + " over " +
                              index_to_string(lower));
        return it->second;
    }

private:
    // Chain-product independence: along every saturated chain between two
    // comparable strata, the product of edge degrees is the same. This is
    // what makes degrees over a fixed chain well defined.
    void validate_chain_products() const {
        for (const auto& [top, rank] : rank_) {
            // all chains downward from `top`, tracked as (bottom, product, path)
            std::map<Index, std::pair<Rational, std::vector<Index>>> best;
            struct Item {
                Index at;
                Rational product;
                std::vector<Index> path;
            };
            std::vector<Item> queue{{top, Rational(1), {top}}};
            while (!queue.empty()) {
                Item item = queue.back();
                queue.pop_back();
                auto it = best.find(item.at);
                if (it == best.end()) {
                    best.emplace(item.at, std::make_pair(item.product, item.path));
                } else if (it->second.first != item.product) {
                    std::string a, b;
                    for (const auto& idx : it->second.second)
                        a += (a.empty() ? "" : " > ") + index_to_string(idx);
                    for (const auto& idx : item.path)
                        b += (b.empty() ? "" : " > ") + index_to_string(idx);
                    throw input_error("chain-product independence fails between " +
                                      index_to_string(top) + " and " +
                                      index_to_string(item.at) + ": chain " + a +
                                      " gives " + gring::rational_to_string(it->second.first) +
                                      " but chain " + b + " gives " +
                                      gring::rational_to_string(item.product));
                }
                for (const auto& lower : lower_covers(item.at)) {
                    Item next{lower, item.product * edge_degree(item.at, lower), item.path};
                    next.path.push_back(lower);
                    queue.push_back(next);
                }
            }
        }
    }

    std::map<Index, int> rank_;
    std::vector<std::vector<Index>> by_rank_;
    std::map<std::pair<Index, Index>, Rational> edges_;
};

// Number of saturated chains K = K_k ⊃ ... ⊃ K_j = J through the network.
inline long count_chains(const StratumNetwork& net, const Index& upper, const Index& lower) {
    if (!subset_of(lower, upper))
        throw input_error("count_chains: " + index_to_string(lower) + " is not a subset of " +
                          index_to_string(upper));
    net.rank_of(lower);
    std::map<Index, long> memo;
    auto count = [&](auto&& self, const Index& at) -> long {
        if (at == lower)
            return 1;
        if (net.rank_of(at) <= net.rank_of(lower))
            return 0;
        auto it = memo.find(at);
        if (it != memo.end())
            return it->second;
        long total = 0;
        for (const auto& below : net.lower_covers(at))
            if (subset_of(lower, below))
                total += self(self, below);
        memo[at] = total;
        return total;
    };
    return count(count, upper);
}

// Degree of Y_K over its image in Y_J: the number of chains times the
// product of edge degrees along any one fixed chain.
inline Rational total_degree(const StratumNetwork& net, const Index& upper, const Index& lower) {
    const long chains = count_chains(net, upper, lower);
    if (upper == lower)
        return Rational(1);
    if (chains == 0)
        throw input_error("total_degree: no saturated chain from " + index_to_string(upper) +
                          " to " + index_to_string(lower));
    // fixed chain: always descend through the lexicographically smallest cover
    Rational product(1);
    Index at = upper;
    while (at != lower) {
        std::vector<Index> nexts;
        for (const auto& below : net.lower_covers(at))
            if (subset_of(lower, below) && count_chains(net, below, lower) > 0)
                nexts.push_back(below);
        std::sort(nexts.begin(), nexts.end());
        if (nexts.empty())
            throw internal_error("total_degree: chain search dead-ends");
        product *= net.edge_degree(at, nexts.front());
        at = nexts.front();
    }
    return Rational(chains) * product;
}

// Exact evaluation of both sides of the degree-ratio identity
//   [K->J][J->I] / [K->I]  =  |{K' in P_k : K' ⊇ I}| /
//                             (|{K' in P_k : K' ⊇ J}| |{J' in P_j : J' ⊇ I}|).
// A mismatch is a first-class result, not an error: the identity is a
// chain-counting statement whose scope depends on the network's homogeneity.
struct DegreeRatioReport {
    Rational lhs;
    Rational rhs;
    bool equal = false;
};

inline DegreeRatioReport verify_degree_ratio(const StratumNetwork& net, const Index& K,
                                             const Index& J, const Index& I) {
    if (!subset_of(I, J) || !subset_of(J, K))
        throw input_error("verify_degree_ratio requires I ⊆ J ⊆ K");
    DegreeRatioReport report;
    report.lhs = total_degree(net, K, J) * total_degree(net, J, I) / total_degree(net, K, I);
    const auto count_above = [&](int rank, const Index& base) {
        long c = 0;
        for (const auto& idx : net.at_rank(rank))
            if (subset_of(base, idx))
                ++c;
        return c;
    };
    const long above_I_at_k = count_above(net.rank_of(K), I);
    const long above_J_at_k = count_above(net.rank_of(K), J);
    const long above_I_at_j = count_above(net.rank_of(J), I);
    if (above_J_at_k == 0 || above_I_at_j == 0)
        throw internal_error("verify_degree_ratio: empty counting set");
    report.rhs = Rational(above_I_at_k) / (Rational(above_J_at_k) * Rational(above_I_at_j));
    report.equal = report.lhs == report.rhs;
    return report;
}

// Probabilistic weights w(xi_I) = 1 / (|P_k| [Y_I -> X]) together with the
// outcome of the weight-degree identity
//   w(xi_I) = sum_{J in P_{k+1}, J ⊃ I} [Y_J -> Y_I] w(xi_J)
// checked at every stratum that has upper covers.
struct WeightTable {
    std::map<Index, Rational> weight;

    const Rational& at(const Index& index) const {
        auto it = weight.find(index);
        if (it == weight.end())
            throw input_error("no weight for stratum " + index_to_string(index));
        return it->second;
    }
};

struct WeightViolation {
    Index index;
    Rational weight;
    Rational cover_sum;
};

struct WeightResult {
    WeightTable table;
    std::vector<WeightViolation> violations;
    bool ok() const { return violations.empty(); }
};

inline WeightResult compute_weights(const StratumNetwork& net) {
    WeightResult result;
    for (const auto& index : net.all_indices()) {
        const int k = net.rank_of(index);
        const long level_size = static_cast<long>(net.at_rank(k).size());
        result.table.weight[index] =
            Rational(1) / (Rational(level_size) * total_degree(net, index, Index{}));
    }
    for (const auto& index : net.all_indices()) {
        const int k = net.rank_of(index);
        Rational sum(0);
        bool any = false;
        for (const auto& upper : net.at_rank(k + 1)) {
            if (!subset_of(index, upper))
                continue;
            if (count_chains(net, upper, index) == 0)
                continue;
            any = true;
            sum += total_degree(net, upper, index) * result.table.weight[upper];
        }
        if (any && sum != result.table.weight[index])
            result.violations.push_back({index, result.table.weight[index], sum});
    }
    return result;
}

// A cycle on the lifted space: a formal sum of (stratum index, coefficient,
// degree of the cycle over its image).
struct CycleTerm {
    Index index;
    Rational coefficient;
    Rational degree_over_image;
};

// Universally closed pushforward f_*[V] = w(V) deg(V/W) [W], extended
// linearly. Output coefficients are keyed by the image stratum.
inline std::map<Index, Rational> pushforward(const StratumNetwork& net, const WeightTable& weights,
                                             const std::vector<CycleTerm>& cycle) {
    std::map<Index, Rational> out;
    for (const auto& term : cycle) {
        net.rank_of(term.index);
        const Rational value = term.coefficient * weights.at(term.index) * term.degree_over_image;
        auto [it, inserted] = out.emplace(term.index, value);
        if (!inserted)
            it->second += value;
        if (it->second == 0)
            out.erase(it);
    }
    return out;
}

// Pullback data for the section identity: each basis class (supported on
// stratum `support`) pulls back to the listed preimage components.
struct PullbackComponent {
    Index index;
    Rational multiplicity;
    Rational degree_over_image;
};

struct SectionClassData {
    std::string label;
    Index support;
    std::vector<PullbackComponent> components;
};

struct SectionClassOutcome {
    std::string label;
    Rational sum;
};

struct SectionIdentityReport {
    std::vector<SectionClassOutcome> outcomes;
    Rational d;
    bool uniform = false;
    bool matches_expected = false;
};

// Checks that pushforward after pullback multiplies every basis class by
// one constant d (and equals `expected` when supplied).
inline SectionIdentityReport verify_section_identity(const StratumNetwork& net,
                                                     const WeightTable& weights,
                                                     const std::vector<SectionClassData>& classes,
                                                     std::optional<Rational> expected = {}) {
    if (classes.empty())
        throw input_error("verify_section_identity: no classes supplied");
    SectionIdentityReport report;
    for (const auto& cls : classes) {
        Rational sum(0);
        for (const auto& component : cls.components) {
            net.rank_of(component.index);
            sum += component.multiplicity * weights.at(component.index) *
                   component.degree_over_image;
        }
        report.outcomes.push_back({cls.label, sum});
    }
    report.d = report.outcomes.front().sum;
    report.uniform = true;
    for (const auto& outcome : report.outcomes)
        if (outcome.sum != report.d)
            report.uniform = false;
    report.matches_expected = !expected || (report.uniform && report.d == *expected);
    return report;
}

// Sub-network of strata above (and including) `base`, re-ranked so that
// `base` becomes the bottom. Models the network attached to Y_I itself.
inline StratumNetwork restricted_network(const StratumNetwork& net, const Index& base) {
    const int base_rank = net.rank_of(base);
    std::vector<std::pair<Index, int>> strata;
    std::vector<StratumNetwork::Cover> covers;
    std::map<Index, Index> relabel; // original index -> index minus base
    for (const auto& index : net.all_indices()) {
        if (!subset_of(base, index))
            continue;
        Index stripped;
        std::set_difference(index.begin(), index.end(), base.begin(), base.end(),
                            std::inserter(stripped, stripped.end()));
        relabel[index] = stripped;
        strata.emplace_back(stripped, net.rank_of(index) - base_rank);
    }
    for (const auto& index : net.all_indices()) {
        if (!subset_of(base, index))
            continue;
        for (const auto& upper : net.upper_covers(index))
            if (subset_of(base, upper))
                covers.push_back(
                    {relabel.at(upper), relabel.at(index), net.edge_degree(upper, index)});
    }
    return StratumNetwork(std::move(strata), std::move(covers));
}

// The valuative-criterion pullback data for the cover of Y_I: the basis
// class supported on stratum J pulls back to one component over every
// same-rank stratum J' ⊇ I, with multiplicity [Y_{J'} -> Y_I] and degree 1.
// Indices are expressed in the restricted network (base stripped).
inline std::vector<SectionClassData> canonical_section_data(const StratumNetwork& net,
                                                            const Index& base) {
    const StratumNetwork sub = restricted_network(net, base);
    std::vector<SectionClassData> classes;
    for (const auto& index : sub.all_indices()) {
        SectionClassData cls;
        cls.label = "[Y" + index_to_string(index) + "]";
        cls.support = index;
        const int rank = sub.rank_of(index);
        for (const auto& other : sub.at_rank(rank))
            cls.components.push_back({other, total_degree(sub, other, Index{}), Rational(1)});
        classes.push_back(std::move(cls));
    }
    return classes;
}

// ---------------------------------------------------------------------
// Network Chow data: rings per stratum with Gysin pullbacks and top
// Chern classes of the embedding normal bundles, realizing the product
//   a ._r b = gys_{I->I∪J}(a) gys_{J->I∪J}(b) gys_{I∩J->I∪J}(c_top N).

struct NetworkChowData {
    std::map<Index, RingSpec> rings;
    std::map<Index, GradedPoly> normal_class; // c_top(N_{Y_I|Z}) at index I
    // generator images of the Gysin homomorphism A*(Y_from) -> A*(Y_to)
    std::map<std::pair<Index, Index>, std::map<std::string, GradedPoly>> gysin;
};

inline const RingSpec& chow_ring(const NetworkChowData& data, const Index& index) {
    auto it = data.rings.find(index);
    if (it == data.rings.end())
        throw input_error("no Chow ring supplied for stratum " + index_to_string(index));
    return it->second;
}

inline GradedPoly gysin_pull(const NetworkChowData& data, const Index& from, const Index& to,
                             const GradedPoly& cls) {
    const RingSpec& target = chow_ring(data, to);
    if (from == to)
        return normal_form(cls, target);
    auto it = data.gysin.find(std::make_pair(from, to));
    if (it == data.gysin.end())
        throw input_error("no Gysin data for " + index_to_string(from) + " -> " +
                          index_to_string(to));
    const auto& images = it->second;
    const RingSpec& source = chow_ring(data, from);
    GradedPoly result = target.zero();
    for (const auto& [mono, coeff] : cls.terms()) {
        GradedPoly term = target.constant(coeff);
        for (const auto& [gen_idx, exp] : mono) {
            const std::string& name = source.table()->gen(gen_idx).name;
            auto img = images.find(name);
            if (img == images.end())
                throw input_error("Gysin data for " + index_to_string(from) + " -> " +
                                  index_to_string(to) + " lacks the image of generator '" +
                                  name + "'");
            term = term * img->second.pow(exp);
        }
        result += term;
    }
    return normal_form(result, target);
}

// The extended network product of (I, a) and (J, b), landing at I ∪ J.
inline std::pair<Index, GradedPoly> network_product(const NetworkChowData& data, const Index& I,
                                                    const GradedPoly& a, const Index& J,
                                                    const GradedPoly& b) {
    Index target;
    std::set_union(I.begin(), I.end(), J.begin(), J.end(),
                   std::inserter(target, target.end()));
    Index meet;
    std::set_intersection(I.begin(), I.end(), J.begin(), J.end(),
                          std::inserter(meet, meet.end()));
    auto nc = data.normal_class.find(meet);
    if (nc == data.normal_class.end())
        throw input_error("no normal class supplied for stratum " + index_to_string(meet));
    const RingSpec& ring = chow_ring(data, target);
    GradedPoly product = gysin_pull(data, I, target, a) * gysin_pull(data, J, target, b) *
                         gysin_pull(data, meet, target, nc->second);
    return {target, normal_form(product, ring)};
}

// ---------------------------------------------------------------------
// Decomposition of a class on the lifted space into stratum contributions,
// driven by user-supplied matrices for the open/closed exact sequences
//   ⊕_k A(Y_{J∪{k}}) -> A(Y_J) -> A(U_J) -> 0      (plain row)
//   ⊕_k A(Y'_{J∪{k}}) -> A(Y'_J) -> A(U_J) -> 0     (lifted row)
// linked by the flat pullbacks p*_J.

struct DecompositionIndexData {
    linalg::Matrix restrict_plain;  // open_dim x plain_dim
    linalg::Matrix restrict_lifted; // open_dim x lifted_dim
    linalg::Matrix pullback;        // lifted_dim x plain_dim
};

struct DecompositionCoverData {
    linalg::Matrix push_plain;  // plain_dim(lower) x plain_dim(upper)
    linalg::Matrix push_lifted; // lifted_dim(lower) x lifted_dim(upper)
};

struct DecompositionData {
    std::map<Index, DecompositionIndexData> indices;
    std::map<std::pair<Index, Index>, DecompositionCoverData> covers; // (upper, lower)
};

inline std::size_t plain_dim(const DecompositionData& data, const Index& index) {
    return linalg::cols(data.indices.at(index).pullback);
}
inline std::size_t lifted_dim(const DecompositionData& data, const Index& index) {
    return linalg::rows(data.indices.at(index).pullback);
}

inline void validate_decomposition_data(const DecompositionData& data,
                                        const StratumNetwork& net) {
    using namespace linalg;
    for (const auto& [index, d] : data.indices) {
        net.rank_of(index);
        check_rect(d.restrict_plain);
        check_rect(d.restrict_lifted);
        check_rect(d.pullback);
        if (rows(d.restrict_plain) != rows(d.restrict_lifted))
            throw input_error("open-part dimensions disagree at " + index_to_string(index));
        if (cols(d.restrict_plain) != cols(d.pullback) ||
            cols(d.restrict_lifted) != rows(d.pullback))
            throw input_error("matrix dimensions disagree at " + index_to_string(index));
        // both rows end in A(U_J) -> 0
        if (rank(d.restrict_plain) != rows(d.restrict_plain))
            throw input_error("plain restriction not surjective at " + index_to_string(index));
        if (rank(d.restrict_lifted) != rows(d.restrict_lifted))
            throw input_error("lifted restriction not surjective at " + index_to_string(index));
        // the pullback commutes with restriction to the open part
        if (mat_mul(d.restrict_lifted, d.pullback) != d.restrict_plain)
            throw input_error("pullback does not commute with restriction at " +
                              index_to_string(index));
    }
    for (const auto& [edge, cover] : data.covers) {
        const auto& [upper, lower] = edge;
        check_rect(cover.push_plain);
        check_rect(cover.push_lifted);
        if (rows(cover.push_plain) != plain_dim(data, lower) ||
            cols(cover.push_plain) != plain_dim(data, upper) ||
            rows(cover.push_lifted) != lifted_dim(data, lower) ||
            cols(cover.push_lifted) != lifted_dim(data, upper))
            throw input_error("pushforward dimensions disagree for " + index_to_string(upper) +
                              " over " + index_to_string(lower));
        const auto& dl = data.indices.at(lower);
        const auto& du = data.indices.at(upper);
        if (!is_zero(mat_mul(dl.restrict_plain, cover.push_plain)))
            throw input_error("plain composite restriction∘pushforward nonzero for " +
                              index_to_string(upper) + " over " + index_to_string(lower));
        if (!is_zero(mat_mul(dl.restrict_lifted, cover.push_lifted)))
            throw input_error("lifted composite restriction∘pushforward nonzero for " +
                              index_to_string(upper) + " over " + index_to_string(lower));
        // commuting square p*_J ∘ push_plain = push_lifted ∘ p*_K
        if (mat_mul(dl.pullback, cover.push_plain) != mat_mul(cover.push_lifted, du.pullback))
            throw input_error("pullback/pushforward square does not commute for " +
                              index_to_string(upper) + " over " + index_to_string(lower));
    }
    // exactness in the middle of the lifted row: rank of the stacked
    // pushforwards equals dim ker(restriction)
    for (const auto& [index, d] : data.indices) {
        using linalg::Matrix;
        Matrix stacked;
        bool any = false;
        for (const auto& upper : net.upper_covers(index)) {
            auto it = data.covers.find(std::make_pair(upper, index));
            if (it == data.covers.end())
                throw input_error("missing pushforward data for " + index_to_string(upper) +
                                  " over " + index_to_string(index));
            stacked = any ? linalg::hconcat(stacked, it->second.push_lifted)
                          : it->second.push_lifted;
            any = true;
        }
        const std::size_t kernel_dim =
            lifted_dim(data, index) - linalg::rank(d.restrict_lifted);
        const std::size_t image_rank = any ? linalg::rank(stacked) : 0;
        if (image_rank != kernel_dim)
            throw input_error("lifted row is not exact at " + index_to_string(index) +
                              ": pushforward image rank " + std::to_string(image_rank) +
                              " vs kernel dimension " + std::to_string(kernel_dim));
    }
}

// alpha' = p*_J(alpha_J) + sum_k push'(alpha'_{J∪{k}}), peeled recursively;
// the output lists (I, alpha_I) with I ⊇ J, summed per index, in
// (rank, lexicographic) order.
inline std::vector<std::pair<Index, linalg::Vector>> decompose_class(
    const DecompositionData& data, const StratumNetwork& net, const Index& start,
    const linalg::Vector& lifted_class) {
    validate_decomposition_data(data, net);
    std::map<Index, linalg::Vector> result;
    auto add_to = [&](const Index& index, const linalg::Vector& v) {
        auto [it, inserted] = result.emplace(index, v);
        if (!inserted)
            for (std::size_t i = 0; i < v.size(); ++i)
                it->second[i] += v[i];
    };

    auto peel = [&](auto&& self, const Index& at, const linalg::Vector& alpha) -> void {
        const auto& d = data.indices.at(at);
        if (alpha.size() != lifted_dim(data, at))
            throw input_error("class dimension mismatch at " + index_to_string(at));
        // solve the open-part restriction for the plain contribution
        const auto open_image = linalg::mat_vec(d.restrict_lifted, alpha);
        auto plain = linalg::solve(d.restrict_plain, open_image);
        if (!plain)
            throw internal_error("open restriction unsolvable at " + index_to_string(at));
        add_to(at, *plain);
        // residual lies in the image of the deeper pushforwards
        linalg::Vector residual = alpha;
        const auto pulled = linalg::mat_vec(d.pullback, *plain);
        for (std::size_t i = 0; i < residual.size(); ++i)
            residual[i] -= pulled[i];
        bool residual_zero = true;
        for (const auto& x : residual)
            if (x != 0)
                residual_zero = false;
        auto uppers = net.upper_covers(at);
        std::sort(uppers.begin(), uppers.end());
        if (uppers.empty()) {
            if (!residual_zero)
                throw internal_error("nonzero residual at maximal stratum " +
                                     index_to_string(at));
            return;
        }
        if (residual_zero)
            return;
        linalg::Matrix stacked;
        std::vector<std::size_t> widths;
        for (std::size_t i = 0; i < uppers.size(); ++i) {
            const auto& push = data.covers.at(std::make_pair(uppers[i], at)).push_lifted;
            stacked = i == 0 ? push : linalg::hconcat(stacked, push);
            widths.push_back(linalg::cols(push));
        }
        auto gamma = linalg::solve(stacked, residual);
        if (!gamma)
            throw internal_error("residual outside the pushforward image at " +
                                 index_to_string(at));
        std::size_t offset = 0;
        for (std::size_t i = 0; i < uppers.size(); ++i) {
            linalg::Vector piece(gamma->begin() + offset, gamma->begin() + offset + widths[i]);
            offset += widths[i];
            bool zero = true;
            for (const auto& x : piece)
                if (x != 0)
                    zero = false;
            if (!zero)
                self(self, uppers[i], piece);
        }
    };
    peel(peel, start, lifted_class);

    std::vector<std::pair<Index, linalg::Vector>> out(result.begin(), result.end());
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        const int ra = net.rank_of(a.first);
        const int rb = net.rank_of(b.first);
        if (ra != rb)
            return ra < rb;
        return a.first < b.first;
    });
    return out;
}

// Recomposes stratum contributions into a lifted class:
//   alpha' = sum_I p*_J (composite plain pushforward) alpha_I,
// with composites taken along lexicographically smallest chains.
inline linalg::Vector recompose_class(const DecompositionData& data, const StratumNetwork& net,
                                      const Index& start,
                                      const std::vector<std::pair<Index, linalg::Vector>>& parts) {
    linalg::Vector total(lifted_dim(data, start), Rational(0));
    for (const auto& [index, alpha] : parts) {
        if (!subset_of(start, index))
            throw input_error("contribution at " + index_to_string(index) +
                              " is not above " + index_to_string(start));
        // composite plain pushforward along the lex-smallest chain down to start
        linalg::Vector v = alpha;
        Index at = index;
        while (at != start) {
            std::vector<Index> lowers;
            for (const auto& lower : net.lower_covers(at))
                if (subset_of(start, lower))
                    lowers.push_back(lower);
            std::sort(lowers.begin(), lowers.end());
            if (lowers.empty())
                throw input_error("no chain from " + index_to_string(index) + " down to " +
                                  index_to_string(start));
            v = linalg::mat_vec(data.covers.at(std::make_pair(at, lowers.front())).push_plain, v);
            at = lowers.front();
        }
        const auto lifted = linalg::mat_vec(data.indices.at(start).pullback, v);
        for (std::size_t i = 0; i < total.size(); ++i)
            total[i] += lifted[i];
    }
    return total;
}

} // namespace stratnet
} // namespace chowcalc
