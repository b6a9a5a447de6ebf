#pragma once

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chowcalc/errors.hpp"
#include "chowcalc/stratnet.hpp"

namespace chowcalc {
namespace groupoidlift {

using stratnet::Index;
using stratnet::StratumNetwork;

// Finite groupoid [R ⇉ U]: objects, arrows with source and target, one
// identity arrow per object, a total inverse, and composition defined
// exactly on composable pairs. compose(f, g) is "f then g", so it is
// defined iff target(f) = source(g).
class FiniteGroupoid {
public:
    struct ArrowData {
        std::string id;
        std::string src;
        std::string tgt;
    };

    FiniteGroupoid(std::vector<std::string> objects, std::vector<ArrowData> arrows,
                   std::map<std::string, std::string> identity_of,
                   std::vector<std::pair<std::string, std::string>> inverse_pairs,
                   std::vector<std::array<std::string, 3>> composition) {
        for (std::size_t i = 0; i < objects.size(); ++i)
            if (!object_index_.emplace(objects[i], static_cast<int>(i)).second)
                throw input_error("duplicate object '" + objects[i] + "'");
        objects_ = std::move(objects);
        for (std::size_t i = 0; i < arrows.size(); ++i) {
            if (!arrow_index_.emplace(arrows[i].id, static_cast<int>(i)).second)
                throw input_error("duplicate arrow '" + arrows[i].id + "'");
            if (!object_index_.count(arrows[i].src) || !object_index_.count(arrows[i].tgt))
                throw input_error("arrow '" + arrows[i].id + "' has an unknown endpoint");
        }
        arrows_ = std::move(arrows);

        identity_.assign(objects_.size(), -1);
        for (const auto& [obj, arr] : identity_of) {
            const int o = object_of(obj);
            const int a = arrow_of(arr);
            identity_[o] = a;
        }
        inverse_.assign(arrows_.size(), -1);
        for (const auto& [f, g] : inverse_pairs) {
            inverse_[arrow_of(f)] = arrow_of(g);
            inverse_[arrow_of(g)] = arrow_of(f);
        }
        for (const auto& [f, g, h] : composition) {
            const auto key = std::make_pair(arrow_of(f), arrow_of(g));
            if (!compose_.emplace(key, arrow_of(h)).second)
                throw input_error("duplicate composition entry for (" + f + ", " + g + ")");
        }
        const auto problems = axiom_violations();
        if (!problems.empty())
            throw input_error("groupoid axioms fail: " + problems.front() +
                              (problems.size() > 1
                                   ? " (+" + std::to_string(problems.size() - 1) + " more)"
                                   : ""));
    }

    int object_count() const { return static_cast<int>(objects_.size()); }
    int arrow_count() const { return static_cast<int>(arrows_.size()); }
    const std::string& object_name(int o) const { return objects_.at(o); }
    const ArrowData& arrow(int a) const { return arrows_.at(a); }

    int object_of(const std::string& name) const {
        auto it = object_index_.find(name);
        if (it == object_index_.end())
            throw input_error("unknown object '" + name + "'");
        return it->second;
    }
    int arrow_of(const std::string& name) const {
        auto it = arrow_index_.find(name);
        if (it == arrow_index_.end())
            throw input_error("unknown arrow '" + name + "'");
        return it->second;
    }

    int src(int a) const { return object_index_.at(arrows_.at(a).src); }
    int tgt(int a) const { return object_index_.at(arrows_.at(a).tgt); }
    int identity(int o) const { return identity_.at(o); }
    int inverse(int a) const { return inverse_.at(a); }
    bool is_identity(int a) const { return identity_.at(src(a)) == a; }

    bool composable(int f, int g) const { return tgt(f) == src(g); }
    int compose(int f, int g) const {
        auto it = compose_.find(std::make_pair(f, g));
        if (it == compose_.end())
            throw input_error("composition of '" + arrows_.at(f).id + "' and '" +
                              arrows_.at(g).id + "' is not defined");
        return it->second;
    }

    std::set<int> all_arrows() const {
        std::set<int> s;
        for (int a = 0; a < arrow_count(); ++a)
            s.insert(a);
        return s;
    }

    std::set<int> identity_arrows() const {
        std::set<int> s;
        for (int o = 0; o < object_count(); ++o)
            s.insert(identity_.at(o));
        return s;
    }

    // Exhaustive category-axiom check; empty result means all axioms hold.
    std::vector<std::string> axiom_violations() const {
        std::vector<std::string> out;
        for (int o = 0; o < object_count(); ++o) {
            const int e = identity_.at(o);
            if (e < 0) {
                out.push_back("object '" + objects_[o] + "' has no identity arrow");
                continue;
            }
            if (src(e) != o || tgt(e) != o)
                out.push_back("identity of '" + objects_[o] + "' is not an endomorphism");
        }
        for (int a = 0; a < arrow_count(); ++a)
            if (inverse_.at(a) < 0)
                out.push_back("arrow '" + arrows_[a].id + "' has no inverse");
        if (!out.empty())
            return out; // structure incomplete, deeper checks would throw
        for (int f = 0; f < arrow_count(); ++f) {
            for (int g = 0; g < arrow_count(); ++g) {
                const bool defined = compose_.count(std::make_pair(f, g)) > 0;
                if (defined != composable(f, g)) {
                    out.push_back("composition of '" + arrows_[f].id + "' and '" +
                                  arrows_[g].id +
                                  (defined ? "' defined but not composable"
                                           : "' composable but not defined"));
                    continue;
                }
                if (!defined)
                    continue;
                const int h = compose_.at(std::make_pair(f, g));
                if (src(h) != src(f) || tgt(h) != tgt(g))
                    out.push_back("composite of '" + arrows_[f].id + "' and '" +
                                  arrows_[g].id + "' has wrong endpoints");
            }
        }
        if (!out.empty())
            return out;
        for (int f = 0; f < arrow_count(); ++f) {
            if (compose(identity_.at(src(f)), f) != f)
                out.push_back("left identity fails for '" + arrows_[f].id + "'");
            if (compose(f, identity_.at(tgt(f))) != f)
                out.push_back("right identity fails for '" + arrows_[f].id + "'");
            const int finv = inverse_.at(f);
            if (src(finv) != tgt(f) || tgt(finv) != src(f))
                out.push_back("inverse of '" + arrows_[f].id + "' has wrong endpoints");
            else {
                if (compose(f, finv) != identity_.at(src(f)))
                    out.push_back("f ; f^-1 is not the identity for '" + arrows_[f].id + "'");
                if (compose(finv, f) != identity_.at(tgt(f)))
                    out.push_back("f^-1 ; f is not the identity for '" + arrows_[f].id + "'");
            }
        }
        for (int f = 0; f < arrow_count(); ++f)
            for (int g = 0; g < arrow_count(); ++g) {
                if (!composable(f, g))
                    continue;
                for (int h = 0; h < arrow_count(); ++h) {
                    if (!composable(g, h))
                        continue;
                    if (compose(compose(f, g), h) != compose(f, compose(g, h)))
                        out.push_back("associativity fails on ('" + arrows_[f].id + "', '" +
                                      arrows_[g].id + "', '" + arrows_[h].id + "')");
                }
            }
        return out;
    }

private:
    std::vector<std::string> objects_;
    std::vector<ArrowData> arrows_;
    std::map<std::string, int> object_index_;
    std::map<std::string, int> arrow_index_;
    std::vector<int> identity_;
    std::vector<int> inverse_;
    std::map<std::pair<int, int>, int> compose_;
};

// Étale cover data of a local embedding: tokens model the points of the
// pulled-back cover V = Y ×_X U, each anchored at an object of U; the
// equivalence relation models V ×_Y V, and arrow_image realizes the map
// into U ×_X U. Parts are labelled (stratum, copy).
struct CoverToken {
    std::string id;
    std::string at; // object of the groupoid
};

struct CoverPart {
    int stratum = 1;
    int copy = 1;
    std::vector<CoverToken> tokens;
};

struct EmbeddedCoverData {
    FiniteGroupoid groupoid;
    std::vector<CoverPart> parts;
    std::vector<std::pair<std::string, std::string>> equiv; // generating pairs
    std::map<std::pair<std::string, std::string>, std::string> arrow_image;
};

// Validated and completed form: the equivalence closure is computed, the
// arrow images are completed over diagonal/symmetric/transitive pairs,
// and the cocycle condition is checked exhaustively.
class CoverModel {
public:
    explicit CoverModel(const EmbeddedCoverData& data) : groupoid_(data.groupoid) {
        for (std::size_t p = 0; p < data.parts.size(); ++p) {
            const auto& part = data.parts[p];
            const auto key = std::make_pair(part.stratum, part.copy);
            if (!part_index_.emplace(key, static_cast<int>(p)).second)
                throw input_error("duplicate part (" + std::to_string(part.stratum) + "," +
                                  std::to_string(part.copy) + ")");
            std::set<std::string> anchors;
            for (const auto& token : part.tokens) {
                if (token_part_.count(token.id))
                    throw input_error("token '" + token.id + "' appears in two parts");
                const int obj = groupoid_.object_of(token.at);
                token_part_[token.id] = static_cast<int>(p);
                token_anchor_[token.id] = obj;
                if (!anchors.insert(token.at).second)
                    throw input_error("part (" + std::to_string(part.stratum) + "," +
                                      std::to_string(part.copy) +
                                      ") anchors two tokens at object '" + token.at + "'");
                covered_objects_.insert(obj);
            }
        }
        parts_ = data.parts;

        // union-find closure of the equivalence
        for (const auto& [id, part] : token_part_)
            uf_parent_[id] = id;
        for (const auto& [a, b] : data.equiv) {
            require_token(a);
            require_token(b);
            unite(a, b);
        }
        for (const auto& [pair, arrow] : data.arrow_image) {
            require_token(pair.first);
            require_token(pair.second);
            if (find(pair.first) != find(pair.second))
                throw input_error("arrow_image given for non-equivalent tokens '" + pair.first +
                                  "', '" + pair.second + "'");
            const int a = groupoid_.arrow_of(arrow);
            if (groupoid_.src(a) != token_anchor_.at(pair.first) ||
                groupoid_.tgt(a) != token_anchor_.at(pair.second))
                throw input_error("arrow_image('" + pair.first + "', '" + pair.second +
                                  "') = '" + arrow + "' is not anchored at the tokens");
            image_[std::make_pair(pair.first, pair.second)] = a;
        }

        complete_images();
        check_saturation();
    }

    const FiniteGroupoid& groupoid() const { return groupoid_; }
    const std::vector<CoverPart>& parts() const { return parts_; }
    int part_count() const { return static_cast<int>(parts_.size()); }

    bool equivalent(const std::string& a, const std::string& b) const {
        return find(a) == find(b);
    }

    int image_arrow(const std::string& a, const std::string& b) const {
        return image_.at(std::make_pair(a, b));
    }

    // S_{(i,a)(j,b)}: images of equivalent token pairs from the two parts.
    std::set<int> image_set(int part_a, int part_b) const {
        std::set<int> s;
        for (const auto& [pair, arrow] : image_) {
            if (token_part_.at(pair.first) == part_a && token_part_.at(pair.second) == part_b)
                s.insert(arrow);
        }
        return s;
    }

    // Objects in the image of the stratum's cover: union over its copies.
    std::set<int> stratum_objects(int stratum) const {
        std::set<int> s;
        for (std::size_t p = 0; p < parts_.size(); ++p)
            if (parts_[p].stratum == stratum)
                for (const auto& token : parts_[p].tokens)
                    s.insert(token_anchor_.at(token.id));
        return s;
    }

    const std::set<int>& covered_objects() const { return covered_objects_; }

    std::vector<int> strata() const {
        std::set<int> s;
        for (const auto& part : parts_)
            s.insert(part.stratum);
        return std::vector<int>(s.begin(), s.end());
    }

    // All equivalent cross-part token pairs with their image arrows.
    struct CrossImage {
        int part_a;
        int part_b;
        int arrow;
    };
    std::vector<CrossImage> cross_images() const {
        std::vector<CrossImage> out;
        for (const auto& [pair, arrow] : image_) {
            const int pa = token_part_.at(pair.first);
            const int pb = token_part_.at(pair.second);
            if (pa != pb)
                out.push_back({pa, pb, arrow});
        }
        return out;
    }

    const std::map<std::pair<int, int>, int>& part_index() const { return part_index_; }

private:
    void require_token(const std::string& id) const {
        if (!token_part_.count(id))
            throw input_error("unknown cover token '" + id + "'");
    }

    std::string find(const std::string& id) const {
        std::string at = id;
        while (uf_parent_.at(at) != at)
            at = uf_parent_.at(at);
        return at;
    }
    void unite(const std::string& a, const std::string& b) {
        const std::string ra = find(a);
        const std::string rb = find(b);
        if (ra != rb)
            uf_parent_[ra < rb ? rb : ra] = ra < rb ? ra : rb;
    }

    // Fill diagonal images with identities, symmetrize with inverses and
    // close transitively with compositions; then check the cocycle
    // condition on every equivalent triple.
    void complete_images() {
        std::map<std::string, std::vector<std::string>> classes;
        for (const auto& [id, part] : token_part_)
            classes[find(id)].push_back(id);
        for (auto& [root, members] : classes) {
            std::sort(members.begin(), members.end());
            for (const auto& v : members) {
                const auto key = std::make_pair(v, v);
                const int e = groupoid_.identity(token_anchor_.at(v));
                auto it = image_.find(key);
                if (it == image_.end())
                    image_[key] = e;
                else if (it->second != e)
                    throw input_error("arrow_image('" + v + "', '" + v +
                                      "') is not the identity");
            }
            for (const auto& v : members)
                for (const auto& w : members) {
                    auto it = image_.find(std::make_pair(v, w));
                    if (it == image_.end())
                        continue;
                    const int inv = groupoid_.inverse(it->second);
                    auto rit = image_.find(std::make_pair(w, v));
                    if (rit == image_.end())
                        image_[std::make_pair(w, v)] = inv;
                    else if (rit->second != inv)
                        throw input_error("arrow_image('" + w + "', '" + v +
                                          "') is not the inverse of arrow_image('" + v +
                                          "', '" + w + "')");
                }
            bool grew = true;
            while (grew) {
                grew = false;
                for (const auto& v : members)
                    for (const auto& w : members) {
                        auto vw = image_.find(std::make_pair(v, w));
                        if (vw == image_.end())
                            continue;
                        for (const auto& x : members) {
                            auto wx = image_.find(std::make_pair(w, x));
                            if (wx == image_.end())
                                continue;
                            const int composite = groupoid_.compose(vw->second, wx->second);
                            auto vx = image_.find(std::make_pair(v, x));
                            if (vx == image_.end()) {
                                image_[std::make_pair(v, x)] = composite;
                                grew = true;
                            } else if (vx->second != composite)
                                throw input_error("arrow_image violates the cocycle on ('" + v +
                                                  "', '" + w + "', '" + x + "')");
                        }
                    }
            }
            for (const auto& v : members)
                for (const auto& w : members)
                    if (!image_.count(std::make_pair(v, w)))
                        throw input_error("arrow_image is underdetermined for ('" + v +
                                          "', '" + w + "')");
        }
    }

    // The cover must contain the whole fiber over its image: an arrow from
    // a covered object cannot leave the covered locus.
    void check_saturation() const {
        for (int a = 0; a < groupoid_.arrow_count(); ++a) {
            const bool s = covered_objects_.count(groupoid_.src(a)) > 0;
            const bool t = covered_objects_.count(groupoid_.tgt(a)) > 0;
            if (s != t)
                throw input_error("cover is not saturated: arrow '" + groupoid_.arrow(a).id +
                                  "' connects a covered object to an uncovered one");
        }
    }

    FiniteGroupoid groupoid_;
    std::vector<CoverPart> parts_;
    std::map<std::pair<int, int>, int> part_index_;
    std::map<std::string, int> token_part_;
    std::map<std::string, int> token_anchor_;
    std::map<std::string, std::string> uf_parent_;
    std::map<std::pair<std::string, std::string>, int> image_;
    std::set<int> covered_objects_;
};

// Kept arrow set of a lifted presentation.
struct LiftResult {
    std::set<int> arrows_kept;
    Index stratum_index;
};

// Closure report for a kept arrow set: identities present, closed under
// inverse, closed under composition.
struct GroupoidReport {
    std::vector<int> missing_identities;
    std::vector<int> inverse_violations;
    std::vector<std::pair<int, int>> composition_violations;
    bool ok() const {
        return missing_identities.empty() && inverse_violations.empty() &&
               composition_violations.empty();
    }
};

inline GroupoidReport check_groupoid(const FiniteGroupoid& g, const LiftResult& kept,
                                     const std::set<int>* objects = nullptr) {
    GroupoidReport report;
    for (int a : kept.arrows_kept)
        if (a < 0 || a >= g.arrow_count())
            throw input_error("kept arrow index out of range");
    for (int o = 0; o < g.object_count(); ++o) {
        if (objects && !objects->count(o))
            continue;
        if (!kept.arrows_kept.count(g.identity(o)))
            report.missing_identities.push_back(o);
    }
    for (int a : kept.arrows_kept)
        if (!kept.arrows_kept.count(g.inverse(a)))
            report.inverse_violations.push_back(a);
    for (int f : kept.arrows_kept)
        for (int g2 : kept.arrows_kept) {
            if (!g.composable(f, g2))
                continue;
            if (!kept.arrows_kept.count(g.compose(f, g2)))
                report.composition_violations.push_back({f, g2});
        }
    return report;
}

// R' = R \ (S12 ∪ S21 ∪ (S22 \ S11)) ∪ Im e, the arrow-subtracted
// presentation for a two-component cover: the distinguished part is V1,
// everything else is V2. Models where one arrow is the image both of a
// kept pair and of a removed pair are rejected as ambiguous.
inline LiftResult subtract_arrows(const CoverModel& model, int keep_part) {
    if (keep_part < 0 || keep_part >= model.part_count())
        throw input_error("keep_part out of range");
    std::set<int> s11, s12, s21, s22;
    for (const auto& ci : model.cross_images()) {
        const bool a_keep = ci.part_a == keep_part;
        const bool b_keep = ci.part_b == keep_part;
        if (a_keep && !b_keep)
            s12.insert(ci.arrow);
        else if (!a_keep && b_keep)
            s21.insert(ci.arrow);
        else if (!a_keep && !b_keep)
            s22.insert(ci.arrow);
    }
    // same-part pairs: S11 within the kept part, S22 within the others
    for (int p = 0; p < model.part_count(); ++p) {
        const auto within = model.image_set(p, p);
        if (p == keep_part)
            s11.insert(within.begin(), within.end());
        else
            s22.insert(within.begin(), within.end());
    }
    const auto& g = model.groupoid();
    for (int a : s12)
        if (s11.count(a) || g.is_identity(a))
            throw input_error("ambiguous model: arrow '" + g.arrow(a).id +
                              "' lies in S12 and in a kept image set");
    for (int a : s21)
        if (s11.count(a) || g.is_identity(a))
            throw input_error("ambiguous model: arrow '" + g.arrow(a).id +
                              "' lies in S21 and in a kept image set");

    LiftResult result;
    result.arrows_kept = g.all_arrows();
    for (int a : s12)
        result.arrows_kept.erase(a);
    for (int a : s21)
        result.arrows_kept.erase(a);
    for (int a : s22)
        if (!s11.count(a))
            result.arrows_kept.erase(a);
    for (int a : g.identity_arrows())
        result.arrows_kept.insert(a);
    result.stratum_index = Index{model.parts().at(keep_part).stratum};
    return result;
}

// The "étale on its image" hypothesis at model level: S22 \ S11 closed
// under composition (up to identities).
inline bool is_etale_on_image(const CoverModel& model, int keep_part) {
    std::set<int> s11, s22;
    for (const auto& ci : model.cross_images())
        if (ci.part_a != keep_part && ci.part_b != keep_part)
            s22.insert(ci.arrow);
    for (int p = 0; p < model.part_count(); ++p) {
        const auto within = model.image_set(p, p);
        if (p == keep_part)
            s11.insert(within.begin(), within.end());
        else
            s22.insert(within.begin(), within.end());
    }
    std::set<int> s;
    for (int a : s22)
        if (!s11.count(a))
            s.insert(a);
    const auto& g = model.groupoid();
    for (int f : s)
        for (int h : s) {
            if (!g.composable(f, h))
                continue;
            const int c = g.compose(f, h);
            if (!s.count(c) && !g.is_identity(c))
                return false;
        }
    return true;
}

// Iterated lift over a stratum poset: for every index I, the presentation
//   R'_I = (arrows over W_I) \ (images of all cross-part pairs) ∪ Im e,
// with W_I the common image of the strata in I. The removal set is the
// symmetric hull of the paper's S-unions; at I = {} this is exactly the
// final-step presentation R' = U ×_X U \ ∪_{(i,a)≠(j,b)} S_ij^ab.
// Every result must pass the groupoid closure check.
inline std::map<Index, LiftResult> iterated_lift(const CoverModel& model,
                                                 const StratumNetwork& poset) {
    const auto& g = model.groupoid();
    std::set<int> removed;
    for (const auto& ci : model.cross_images()) {
        removed.insert(ci.arrow);
        removed.insert(g.inverse(ci.arrow));
    }
    // a non-identity arrow that is also the image of a same-part pair has
    // contradictory keep/remove status; such models are rejected rather
    // than silently resolved
    for (int p = 0; p < model.part_count(); ++p)
        for (const int a : model.image_set(p, p))
            if (removed.count(a) && !g.is_identity(a))
                throw input_error("ambiguous model: arrow '" + g.arrow(a).id +
                                  "' is the image both of a same-part pair and of a "
                                  "cross-part pair");
    std::map<Index, LiftResult> out;
    auto indices = poset.all_indices();
    std::sort(indices.begin(), indices.end(), [&](const Index& a, const Index& b) {
        if (poset.rank_of(a) != poset.rank_of(b))
            return poset.rank_of(a) > poset.rank_of(b); // decreasing rank
        return a < b;
    });
    for (const auto& index : indices) {
        std::set<int> objects;
        if (index.empty()) {
            for (int o = 0; o < g.object_count(); ++o)
                objects.insert(o);
        } else {
            bool first = true;
            for (const int stratum : index) {
                const auto w = model.stratum_objects(stratum);
                if (first) {
                    objects = w;
                    first = false;
                } else {
                    std::set<int> both;
                    std::set_intersection(objects.begin(), objects.end(), w.begin(), w.end(),
                                          std::inserter(both, both.end()));
                    objects = std::move(both);
                }
            }
        }
        LiftResult result;
        result.stratum_index = index;
        for (int a = 0; a < g.arrow_count(); ++a) {
            if (!objects.count(g.src(a)) || !objects.count(g.tgt(a)))
                continue;
            if (removed.count(a) && !g.is_identity(a))
                continue;
            result.arrows_kept.insert(a);
        }
        for (int o : objects)
            result.arrows_kept.insert(g.identity(o));
        const auto report = check_groupoid(g, result, &objects);
        if (!report.ok())
            throw internal_error("lifted presentation at " + stratnet::index_to_string(index) +
                                 " fails the groupoid axioms");
        out.emplace(index, std::move(result));
    }
    return out;
}

// Unprimed presentation R_I of the stratum Y_I: arrows over W_I minus the
// images of cross-part pairs touching a stratum of I.
inline LiftResult stratum_presentation(const CoverModel& model, const Index& index) {
    const auto& g = model.groupoid();
    std::set<int> objects;
    if (index.empty()) {
        for (int o = 0; o < g.object_count(); ++o)
            objects.insert(o);
    } else {
        bool first = true;
        for (const int stratum : index) {
            const auto w = model.stratum_objects(stratum);
            if (first) {
                objects = w;
                first = false;
            } else {
                std::set<int> both;
                std::set_intersection(objects.begin(), objects.end(), w.begin(), w.end(),
                                      std::inserter(both, both.end()));
                objects = std::move(both);
            }
        }
    }
    std::set<int> removed;
    for (const auto& ci : model.cross_images()) {
        const int sa = model.parts().at(ci.part_a).stratum;
        const int sb = model.parts().at(ci.part_b).stratum;
        if (index.count(sa) || index.count(sb)) {
            removed.insert(ci.arrow);
            removed.insert(g.inverse(ci.arrow));
        }
    }
    LiftResult result;
    result.stratum_index = index;
    for (int a = 0; a < g.arrow_count(); ++a) {
        if (!objects.count(g.src(a)) || !objects.count(g.tgt(a)))
            continue;
        if (removed.count(a) && !g.is_identity(a))
            continue;
        result.arrows_kept.insert(a);
    }
    for (int o : objects)
        result.arrows_kept.insert(g.identity(o));
    return result;
}

// Connected components of the finite-model fiber product Y_I ×_{Y_J} W_J:
// orbits of pairs (x ∈ W_I, r ∈ R_J with src(r) = x) under the R_I action
// (x, r) ↦ (x', s·r) for s: x' → x in R_I. By the chain decomposition this
// equals the chain count from I to J times the per-level sheet counts.
inline long fiber_decomposition_counts(const CoverModel& model, const StratumNetwork& poset,
                                       const Index& upper, const Index& lower) {
    if (!stratnet::subset_of(lower, upper))
        throw input_error("fiber_decomposition_counts: " + stratnet::index_to_string(lower) +
                          " is not contained in " + stratnet::index_to_string(upper));
    poset.rank_of(upper);
    poset.rank_of(lower);
    const auto& g = model.groupoid();
    const LiftResult r_upper = stratum_presentation(model, upper);
    const LiftResult r_lower = stratum_presentation(model, lower);

    std::set<int> w_upper;
    for (int a : r_upper.arrows_kept)
        w_upper.insert(g.src(a));

    std::vector<std::pair<int, int>> points; // (object of W_I, arrow of R_J)
    for (const int x : w_upper)
        for (const int r : r_lower.arrows_kept)
            if (g.src(r) == x)
                points.emplace_back(x, r);

    std::map<std::pair<int, int>, int> point_index;
    for (std::size_t i = 0; i < points.size(); ++i)
        point_index[points[i]] = static_cast<int>(i);

    std::vector<int> parent(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        parent[i] = static_cast<int>(i);
    auto find = [&](int i) {
        while (parent[i] != i)
            i = parent[i] = parent[parent[i]];
        return i;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    };

    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& [x, r] = points[i];
        for (const int s : r_upper.arrows_kept) {
            if (g.tgt(s) != x)
                continue;
            const int glued = g.compose(s, r);
            auto it = point_index.find(std::make_pair(g.src(s), glued));
            if (it == point_index.end())
                throw internal_error("fiber product glue leaves the point set");
            unite(static_cast<int>(i), it->second);
        }
    }
    std::set<int> roots;
    for (std::size_t i = 0; i < points.size(); ++i)
        roots.insert(find(static_cast<int>(i)));
    return static_cast<long>(roots.size());
}

} // namespace groupoidlift
} // namespace chowcalc
