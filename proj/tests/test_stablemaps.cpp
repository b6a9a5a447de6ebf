#include <catch2/catch_amalgamated.hpp>

#include "chowcalc/serialize.hpp"
#include "chowcalc/stablemaps.hpp"

using namespace chowcalc;
using namespace chowcalc::stablemaps;
using gring::Rational;

namespace {

std::uint64_t bits(std::initializer_list<int> elems, const MarkSet& ms) {
    std::uint64_t h = 0;
    for (const int e : elems)
        h |= std::uint64_t(1) << (e - 1);
    (void)ms;
    return h;
}

} // namespace

TEST_CASE("nested sets", "[stablemaps]") {
    MarkSet ms{3, 1};
    CHECK(is_nested(ms, {}));
    CHECK_FALSE(is_nested(ms, {bits({1, 2}, ms), bits({1, 3}, ms)}));
    CHECK(is_nested(ms, {bits({1}, ms), bits({1, 2}, ms), bits({3}, ms)}));
}

TEST_CASE("admissible divisors", "[stablemaps]") {
    SECTION("d=1, m=1: only candidate is the full set, excluded") {
        CHECK(admissible_h(MarkSet{1, 1}, {}, 0).empty());
    }
    SECTION("d=2, m=1, k=0: the two degree-1 tails") {
        MarkSet ms{2, 1};
        const auto hs = admissible_h(ms, {}, 0);
        REQUIRE(hs.size() == 2);
        CHECK(hs[0] == bits({1}, ms));
        CHECK(hs[1] == bits({2}, ms));
    }
    SECTION("d=2, m=1, k=1: nothing of size above 1 besides the full set") {
        CHECK(admissible_h(MarkSet{2, 1}, {}, 1).empty());
    }
    SECTION("full set togglable") {
        MarkSet ms{2, 1};
        const auto hs = admissible_h(ms, {}, 0, true);
        REQUIRE(hs.size() == 3);
        CHECK(hs.back() == ms.full_set());
    }
    SECTION("marked-point singletons are never divisors") {
        MarkSet ms{1, 2}; // D' = {1_D, 2_M}
        const auto hs = admissible_h(ms, {std::uint64_t(1) << 1}, 0);
        REQUIRE(hs.size() == 1);
        CHECK(hs[0] == bits({1}, ms));
    }
    SECTION("nestedness against I filters") {
        MarkSet ms{3, 1};
        const auto hs = admissible_h(ms, {bits({1, 2}, ms)}, 0);
        // {1,3} and {2,3} clash with {1,2}; {1,2} itself is in I
        for (const auto h : hs) {
            CHECK(h != bits({1, 3}, ms));
            CHECK(h != bits({2, 3}, ms));
            CHECK(h != bits({1, 2}, ms));
        }
        CHECK(std::find(hs.begin(), hs.end(), bits({3}, ms)) != hs.end());
    }
    SECTION("order independence: output is sorted canonically") {
        MarkSet ms{3, 1};
        auto hs = admissible_h(ms, {}, 0);
        auto sorted = hs;
        std::sort(sorted.begin(), sorted.end());
        CHECK(hs == sorted);
    }
}

TEST_CASE("psi classes", "[stablemaps]") {
    ClassContext ctx(MarkSet{2, 1}, {}, 1);
    const auto h1 = std::uint64_t(1);

    SECTION("maximal admissible h") {
        const auto [psi_h, psi_h0] = psi_classes(ctx, h1);
        CHECK(psi_h == ctx.psi() - ctx.divisor(h1));
        CHECK(psi_h0 == ctx.psi());
    }
    SECTION("difference is minus the divisor") {
        for (const auto h : ctx.family()) {
            const auto [psi_h, psi_h0] = psi_classes(ctx, h);
            CHECK(psi_h0 - psi_h == ctx.divisor(h));
        }
    }
    SECTION("inadmissible h rejected") {
        CHECK_THROWS_AS(psi_classes(ctx, ctx.markset().full_set()), input_error);
    }
}

TEST_CASE("fibration step", "[stablemaps]") {
    SECTION("one-pointed degree-1 maps to the line") {
        // (1+H)^2 (1+psi)^{-1} (1+H+psi)^2 at the ambient cap
        ClassContext ctx(MarkSet{1, 1}, {}, 1);
        REQUIRE(ctx.cap() == 1); // nd+d+n+m-3 = 1
        const auto c = chern_fibration_step(ctx);
        const auto one = ctx.one();
        const auto expected = (one + ctx.H()).pow(2) * (one + ctx.psi()).inv_unit() *
                              (one + ctx.H() + ctx.psi()).pow(2);
        CHECK(c == expected);
    }
    SECTION("saturated stratum: only the H factor survives") {
        // I = {D}: s_I = 1, l_I = d, so c = (1+H)^{n+1}
        MarkSet ms{2, 1};
        ClassContext ctx(ms, {bits({1, 2}, ms)}, 2, 3);
        CHECK(chern_fibration_step(ctx) == (ctx.one() + ctx.H()).pow(3));
    }
    SECTION("frozen degree-1 expansion at (n,d) = (1,2)") {
        // 2H - psi + (2H+2psi) + (2H+4psi) = 6H + 5psi
        ClassContext ctx(MarkSet{2, 1}, {}, 1, 3);
        const auto c1 = chern_fibration_step(ctx).degree_part(1);
        CHECK(c1 == ctx.H() * Rational(6) + ctx.psi() * Rational(5));
    }
}

TEST_CASE("blow-up steps and closed form", "[stablemaps]") {
    SECTION("no admissible h at a level leaves the class unchanged") {
        ClassContext ctx(MarkSet{2, 1}, {}, 1, 3);
        const auto c = chern_fibration_step(ctx);
        CHECK(chern_blowup_step(ctx, 2, c) == c); // |h|=2 is only the full set
    }
    SECTION("degree-1 coefficient of a lone h factor") {
        // I_h empty: coefficient of D_h is 2 - (n+1) q(q+1)/2 with q = |h|
        ClassContext ctx(MarkSet{3, 1}, {}, 1, 3);
        const auto coeffs = degree1_coefficients(chern_stratum_closed_form(ctx, 0));
        // q = 1: 2 - 2*1 = 0, so no D column for singletons
        CHECK_FALSE(coeffs.count(ctx.divisor_name(bits({1}, ctx.markset()))));
        // q = 2: 2 - 2*3 = -4
        CHECK(coeffs.at(ctx.divisor_name(bits({1, 2}, ctx.markset()))) == Rational(-4));
    }
    SECTION("closed form at k = d-1 is the fibration step") {
        ClassContext ctx(MarkSet{3, 1}, {}, 1, 2);
        CHECK(chern_stratum_closed_form(ctx, 2) == chern_fibration_step(ctx));
    }
    SECTION("iterating the steps reproduces the closed form") {
        ClassContext ctx(MarkSet{2, 1}, {}, 1, 3);
        auto c = chern_fibration_step(ctx);
        for (int k = 1; k >= 0; --k)
            c = chern_blowup_step(ctx, k, c);
        CHECK(c == chern_stratum_closed_form(ctx, 0));
    }
    SECTION("collapsing the divisors recovers the fibration step") {
        ClassContext ctx(MarkSet{2, 1}, {}, 1, 3);
        const auto closed = chern_stratum_closed_form(ctx, 0);
        CHECK(collapse_divisors(ctx, closed) == chern_fibration_step(ctx));
    }
    SECTION("parallel factor evaluation is bit-identical") {
        ClassContext serial(MarkSet{3, 1}, {}, 2, 3);
        ClassContext parallel(MarkSet{3, 1}, {}, 2, 3, false, false, true);
        const auto a = chern_stratum_closed_form(serial, 0);
        const auto b = chern_stratum_closed_form(parallel, 0);
        CHECK(a == b);
        CHECK(io::poly_to_json(a).dump() == io::poly_to_json(b).dump());
    }
}

TEST_CASE("total Chern class of the stable map spaces", "[stablemaps]") {
    SECTION("no divisor columns at (1,1,1)") {
        const auto ctx = make_M0m_context(1, 1, 1);
        CHECK(ctx.family().empty());
        const auto c = chern_M0m(ctx);
        const auto coeffs = degree1_coefficients(c);
        CHECK(coeffs.at("H") == Rational(4)); // (n+1)(d+1)
    }
    SECTION("degree-1 table at (1,1,2)") {
        const auto ctx = make_M0m_context(1, 1, 2);
        const auto coeffs = degree1_coefficients(chern_M0m(ctx));
        CHECK(coeffs.at("H") == Rational(6));
        CHECK(coeffs.at("psi") == Rational(5));
    }
    SECTION("two marked points at degree 1") {
        // D' = {1_D, 2_M}, I = {{2_M}}: (1+psi)^{m-2} = 1 and a single
        // admissible divisor {1_D}
        const auto ctx = make_M0m_context(1, 2, 1);
        CHECK(ctx.family().size() == 1);
        const auto coeffs = degree1_coefficients(chern_M0m(ctx));
        CHECK(coeffs.at("H") == Rational(4));
        CHECK(coeffs.at("psi") == Rational(2)); // (n+1)d(d+1)/2 + (m-2) = 2
    }
    SECTION("degree-1 coefficients across the desk grid") {
        for (int n = 1; n <= 2; ++n)
            for (int m = 1; m <= 3; ++m)
                for (int d = 1; d <= 3; ++d) {
                    const auto ctx = make_M0m_context(n, m, d, 1);
                    const auto c1 = chern_M0m(ctx).degree_part(1);
                    const auto log_c1 = chern_degree1_log(ctx, 0);
                    REQUIRE(c1 == log_c1);
                    const auto coeffs = degree1_coefficients(c1);
                    REQUIRE(coeffs.at("H") == Rational((n + 1) * (d + 1)));
                    const Rational psi_expected =
                        Rational((n + 1) * d * (d + 1), 2) + Rational(m - 2);
                    if (psi_expected != 0)
                        REQUIRE(coeffs.at("psi") == psi_expected);
                }
    }
    SECTION("generator budget guard") {
        CHECK_THROWS_AS(make_M0m_context(1, 1, 5), guard_error);
        CHECK_NOTHROW(make_M0m_context(1, 1, 5, 1, false, true));
    }
    SECTION("truncation consistency across caps") {
        const auto low = chern_M0m(make_M0m_context(1, 1, 2, 1));
        const auto high = chern_M0m(make_M0m_context(1, 1, 2, 2));
        CHECK(high.truncated(1) == low);
    }
}

TEST_CASE("splitting-type validator", "[stablemaps]") {
    MarkSet ms{3, 1};

    SECTION("empty I is always valid") {
        CurveModel curve;
        curve.components = {{"c0", 3, ""}};
        curve.marks[1] = "c0";
        CHECK(validate_splitting_type(curve, ms, {}, 1).ok());
    }
    SECTION("tail of matching units") {
        // root of degree 1, tail of degree 1 carrying a base point of
        // multiplicity 1: tail units 2 match |{1,2}|, the point {1} sits
        // on the tail
        CurveModel curve;
        curve.components = {{"c0", 1, ""}, {"t", 1, "c0"}};
        curve.base_points = {{"p", "t", 1}};
        curve.marks[1] = "c0";
        curve.stratum_marks = {{{1, 2}, true, "t"}, {{1}, false, "p"}};
        const auto report =
            validate_splitting_type(curve, ms, {bits({1, 2}, ms), bits({1}, ms)}, 2);
        CAPTURE(report.violations);
        CHECK(report.ok());
    }
    SECTION("point outside its tail violates incidence") {
        CurveModel curve;
        curve.components = {{"c0", 0, ""}, {"t", 2, "c0"}};
        curve.base_points = {{"p", "c0", 1}};
        curve.marks[1] = "c0";
        curve.stratum_marks = {{{1, 2}, true, "t"}, {{1}, false, "p"}};
        const auto report =
            validate_splitting_type(curve, ms, {bits({1, 2}, ms), bits({1}, ms)}, 2);
        CHECK_FALSE(report.ok());
    }
    SECTION("tail with wrong units reported") {
        CurveModel curve;
        curve.components = {{"c0", 2, ""}, {"t", 1, "c0"}};
        curve.marks[1] = "c0";
        curve.stratum_marks = {{{1, 2}, true, "t"}};
        const auto report = validate_splitting_type(curve, ms, {bits({1, 2}, ms)}, 2);
        REQUIRE_FALSE(report.ok());
        CHECK(report.violations.front().find("units") != std::string::npos);
    }
    SECTION("privileged point on the tail reported") {
        CurveModel curve;
        curve.components = {{"c0", 1, ""}, {"t", 2, "c0"}};
        curve.marks[1] = "t";
        curve.stratum_marks = {{{1, 2}, true, "t"}};
        const auto report = validate_splitting_type(curve, ms, {bits({1, 2}, ms)}, 2);
        CHECK_FALSE(report.ok());
    }
}

TEST_CASE("semi-rigid partition validator", "[stablemaps]") {
    MarkSet ms{3, 1};

    SECTION("single component carrying everything") {
        CurveModel curve;
        curve.components = {{"c0", 3, ""}};
        curve.marks[1] = "c0";
        curve.partition = {{{"c0", {1, 2, 3}}}};
        CHECK(validate_partition(curve, ms).ok());
    }
    SECTION("two components with matching blocks") {
        CurveModel curve;
        curve.components = {{"c0", 1, ""}, {"c1", 2, "c0"}};
        curve.marks[1] = "c0";
        curve.partition = {{{"c0", {3}}, {"c1", {1, 2}}}};
        CHECK(validate_partition(curve, ms).ok());
    }
    SECTION("block size mismatch reported") {
        CurveModel curve;
        curve.components = {{"c0", 1, ""}, {"c1", 2, "c0"}};
        curve.marks[1] = "c0";
        curve.partition = {{{"c0", {1, 2}}, {"c1", {3}}}};
        const auto report = validate_partition(curve, ms);
        CHECK_FALSE(report.ok());
    }
    SECTION("base points own blocks too") {
        CurveModel curve;
        curve.components = {{"c0", 2, ""}};
        curve.base_points = {{"p", "c0", 1}};
        curve.marks[1] = "c0";
        curve.partition = {{{"c0", {2, 3}}, {"p", {1}}}};
        CHECK(validate_partition(curve, ms).ok());
    }
    SECTION("missing partition rejected") {
        CurveModel curve;
        curve.components = {{"c0", 3, ""}};
        CHECK_THROWS_AS(validate_partition(curve, ms), input_error);
    }
}

TEST_CASE("curve model json", "[stablemaps][io]") {
    const auto j = R"({
        "components": [{"id": "c0", "degree": 1},
                       {"id": "t", "degree": 1, "parent": "c0"}],
        "base_points": [{"id": "p", "component": "t", "mult": 1}],
        "marks": {"1": "c0"},
        "stratum_marks": [{"h": [1, 2], "kind": "tail", "at": "t"},
                           {"h": [1], "kind": "point", "at": "p"}]
    })"_json;
    const auto curve = io::curve_from_json(j);
    MarkSet ms{3, 1};
    CHECK(validate_splitting_type(curve, ms, {bits({1, 2}, ms), bits({1}, ms)}, 2).ok());
    CHECK_THROWS_AS(io::curve_from_json(R"({"components": [], "bogus": 1})"_json), input_error);
}
