// chowcalc: batch front-end for the exact Chern-class engine.
//
// Subcommands load JSON inputs, run one computation and emit canonical
// JSON (or a human-readable text rendering). Exit codes: 0 success,
// 2 bad input, 3 resource guard tripped, 4 internal invariant failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "chowcalc/errors.hpp"
#include "chowcalc/groupoid.hpp"
#include "chowcalc/serialize.hpp"
#include "chowcalc/stablemaps.hpp"
#include "chowcalc/stratnet.hpp"
#include "chowcalc/wblow.hpp"

using nlohmann::json;
using namespace chowcalc;

namespace {

json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw input_error("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw input_error("invalid JSON in '" + path + "': " + e.what());
    }
    return j;
}

void emit(const json& payload, const std::string& format, const std::string& out_path,
          const std::string& text) {
    std::ostringstream buffer;
    if (format == "json")
        buffer << payload.dump(2) << "\n";
    else
        buffer << text;
    if (out_path.empty()) {
        std::cout << buffer.str();
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out)
            throw input_error("cannot write '" + out_path + "'");
        out << buffer.str();
    }
}

// summary block shared by the class-producing commands
json class_summary(const gring::GradedPoly& cls, const gring::RingSpec& ring) {
    json summary;
    summary["c1"] = cls.cap() >= 1 ? cls.degree_part(1).to_string() : "0";
    summary["c2"] = cls.cap() >= 2 ? cls.degree_part(2).to_string() : "0";
    if (ring.has_integral()) {
        const int top = ring.integral_degree();
        if (top <= cls.cap())
            summary["integral_top"] =
                gring::rational_to_string(integrate(cls.degree_part(top), ring));
    }
    return summary;
}

std::string render_class_text(const gring::GradedPoly& cls, const json& summary) {
    std::ostringstream out;
    out << "class = " << cls.to_string() << "\n";
    out << "c1 = " << summary.at("c1").get<std::string>() << "\n";
    out << "c2 = " << summary.at("c2").get<std::string>() << "\n";
    if (summary.contains("integral_top"))
        out << "integral of top part = " << summary.at("integral_top").get<std::string>()
            << "\n";
    return out.str();
}

int run_blowup(const std::string& ring_path, const std::string& bundle_path,
               const std::string& class_path, const std::string& exceptional,
               std::optional<int> cap, const std::string& format, const std::string& out) {
    auto ring = io::ringspec_from_json(load_json(ring_path));
    const int use_cap = cap.value_or(ring.cap());
    auto bundle = io::bundle_from_json(load_json(bundle_path), ring.table(), use_cap);
    gring::GradedPoly ambient =
        class_path.empty()
            ? gring::GradedPoly::constant(ring.table(), use_cap, gring::Rational(1))
            : io::poly_from_json(load_json(class_path), ring.table(), use_cap);
    const auto e = gring::GradedPoly::generator(ring.table(), use_cap, exceptional);
    auto cls = wblow::blowup_chern(ambient, bundle, e);
    cls = normal_form(cls, ring);
    const json summary = class_summary(cls, ring);
    const json payload{{"command", "blowup"},
                       {"class", io::poly_to_json(cls)},
                       {"summary", summary}};
    emit(payload, format, out, render_class_text(cls, summary));
    return 0;
}

int run_fibration(const std::string& ring_path, const std::string& bundle_path,
                  const std::string& class_path, const std::string& tau,
                  std::optional<int> cap, const std::string& format, const std::string& out) {
    auto ring = io::ringspec_from_json(load_json(ring_path));
    const int use_cap = cap.value_or(ring.cap());
    auto bundle = io::bundle_from_json(load_json(bundle_path), ring.table(), use_cap);
    gring::GradedPoly base =
        class_path.empty()
            ? gring::GradedPoly::constant(ring.table(), use_cap, gring::Rational(1))
            : io::poly_from_json(load_json(class_path), ring.table(), use_cap);
    const auto t = gring::GradedPoly::generator(ring.table(), use_cap, tau);
    auto cls = wblow::fibration_chern(base, bundle, t);
    cls = normal_form(cls, ring);
    const json summary = class_summary(cls, ring);
    const json payload{{"command", "fibration"},
                       {"class", io::poly_to_json(cls)},
                       {"summary", summary}};
    emit(payload, format, out, render_class_text(cls, summary));
    return 0;
}

std::vector<std::uint64_t> parse_nested(const stablemaps::MarkSet& ms, const std::string& text) {
    // "1,2;3" -> {{1,2},{3}}; marked points as "2M".."mM"
    std::vector<std::uint64_t> nested;
    std::stringstream stream(text);
    std::string part;
    while (std::getline(stream, part, ';')) {
        if (part.empty())
            continue;
        std::uint64_t h = 0;
        std::stringstream inner(part);
        std::string token;
        while (std::getline(inner, token, ',')) {
            if (token.empty())
                continue;
            bool found = false;
            for (int bit = 0; bit < ms.universe_size(); ++bit)
                if (ms.element_name(bit) == token) {
                    h |= std::uint64_t(1) << bit;
                    found = true;
                }
            if (!found)
                throw input_error("unknown mark '" + token + "' in --I");
        }
        if (h)
            nested.push_back(h);
    }
    return nested;
}

int run_stablemaps(int n, int m, int d, std::optional<int> k, const std::string& nested_text,
                   std::optional<int> cap, bool include_full_set, bool override_guard,
                   bool parallel, const std::string& format, const std::string& out) {
    stablemaps::MarkSet ms{d, m};
    std::optional<stablemaps::ClassContext> ctx;
    const bool custom_stratum = !nested_text.empty() || k.has_value();
    if (!nested_text.empty()) {
        ctx.emplace(ms, parse_nested(ms, nested_text), n, cap, include_full_set,
                    override_guard, parallel);
    } else {
        ctx = stablemaps::make_M0m_context(n, m, d, cap, include_full_set, override_guard,
                                           parallel);
    }
    const auto cls = custom_stratum
                         ? stablemaps::chern_stratum_closed_form(*ctx, k.value_or(0))
                         : stablemaps::chern_M0m(*ctx);
    json c1_table = json::object();
    for (const auto& [name, coeff] : stablemaps::degree1_coefficients(cls))
        c1_table[name] = gring::rational_to_string(coeff);
    const json payload{{"command", "stablemaps"},
                       {"params",
                        {{"n", n}, {"m", m}, {"d", d}, {"k", k.value_or(0)},
                         {"cap", ctx->cap()}}},
                       {"metadata",
                        {{"full_set_divisor_included", include_full_set},
                         {"divisor_count", ctx->family().size()}}},
                       {"class", io::poly_to_json(cls)},
                       {"c1_table", c1_table}};
    std::ostringstream text;
    text << "class = " << cls.to_string() << "\n";
    text << "c1 coefficients:\n";
    for (const auto& [name, coeff] : stablemaps::degree1_coefficients(cls))
        text << "  " << name << " = " << gring::rational_to_string(coeff) << "\n";
    emit(payload, format, out, text.str());
    return 0;
}

int run_network(const std::string& net_path, const std::string& chow_path,
                const std::string& format, const std::string& out) {
    const auto net = io::network_from_json(load_json(net_path));
    const auto weights = stratnet::compute_weights(net);
    json wtable = json::object();
    for (const auto& [index, w] : weights.table.weight)
        wtable[stratnet::index_to_string(index)] = gring::rational_to_string(w);
    json violations = json::array();
    for (const auto& v : weights.violations)
        violations.push_back(json{{"index", stratnet::index_to_string(v.index)},
                                  {"weight", gring::rational_to_string(v.weight)},
                                  {"cover_sum", gring::rational_to_string(v.cover_sum)}});
    const auto section = stratnet::verify_section_identity(
        net, weights.table, stratnet::canonical_section_data(net, stratnet::Index{}));
    json payload{{"command", "network"},
                 {"weights", wtable},
                 {"weight_degree", {{"ok", weights.ok()}, {"violations", violations}}},
                 {"section_identity",
                  {{"d", gring::rational_to_string(section.d)},
                   {"uniform", section.uniform}}}};
    if (!chow_path.empty()) {
        const auto data = io::decomposition_from_json(load_json(chow_path));
        stratnet::validate_decomposition_data(data, net);
        // round-trip every lifted basis vector through the decomposition
        bool ok = true;
        for (const auto& [index, idx_data] : data.indices) {
            const std::size_t dim = stratnet::lifted_dim(data, index);
            for (std::size_t i = 0; i < dim; ++i) {
                linalg::Vector basis(dim, gring::Rational(0));
                basis[i] = gring::Rational(1);
                const auto parts = stratnet::decompose_class(data, net, index, basis);
                if (stratnet::recompose_class(data, net, index, parts) != basis)
                    ok = false;
            }
        }
        payload["decomposition"] = {{"exactness", "pass"},
                                    {"round_trip", ok ? "pass" : "fail"}};
        if (!ok)
            throw internal_error("decomposition round-trip failed");
    }
    std::ostringstream text;
    text << "weights:\n";
    for (const auto& [index, w] : weights.table.weight)
        text << "  " << stratnet::index_to_string(index) << " = "
             << gring::rational_to_string(w) << "\n";
    text << "weight-degree identity: " << (weights.ok() ? "pass" : "FAIL") << "\n";
    text << "section identity: d = " << gring::rational_to_string(section.d)
         << (section.uniform ? " (uniform)" : " (NOT uniform)") << "\n";
    emit(payload, format, out, text.str());
    return weights.ok() && section.uniform ? 0 : 4;
}

int run_groupoid(const std::string& model_path, int keep_part, const std::string& poset_path,
                 const std::string& format, const std::string& out) {
    const auto data = io::cover_data_from_json(load_json(model_path));
    const groupoidlift::CoverModel model(data);
    json payload{{"command", "groupoid"}, {"axioms", "pass"}};
    std::ostringstream text;
    text << "groupoid axioms: pass\n";
    if (!model.parts().empty()) {
        const auto lift = groupoidlift::subtract_arrows(model, keep_part);
        const auto report = groupoidlift::check_groupoid(model.groupoid(), lift);
        json violations = json::array();
        for (const auto& [f, g] : report.composition_violations)
            violations.push_back(json::array({model.groupoid().arrow(f).id,
                                              model.groupoid().arrow(g).id}));
        payload["subtract"] = {{"kept_arrows", lift.arrows_kept.size()},
                               {"closure", report.ok() ? "pass" : "fail"},
                               {"composition_violations", violations},
                               {"etale_on_image",
                                groupoidlift::is_etale_on_image(model, keep_part)}};
        text << "subtracted presentation: " << lift.arrows_kept.size() << " arrows, closure "
             << (report.ok() ? "pass" : "FAIL") << "\n";
        if (!poset_path.empty()) {
            const auto poset = io::network_from_json(load_json(poset_path));
            const auto lifts = groupoidlift::iterated_lift(model, poset);
            json iterated = json::object();
            for (const auto& [index, result] : lifts)
                iterated[stratnet::index_to_string(index)] = result.arrows_kept.size();
            payload["iterated"] = {{"presentations", iterated}, {"closure", "pass"}};
            text << "iterated lift: " << lifts.size() << " presentations, all closed\n";
        }
    }
    emit(payload, format, out, text.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Chern classes of weighted blow-ups, weighted projective "
                 "fibrations and stable-map spaces"};
    app.require_subcommand(1);

    std::string ring_path, bundle_path, class_path, out_path;
    std::string format = "json";
    std::string exceptional = "E", tau = "tau";
    std::optional<int> cap;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--cap", cap, "truncation cap override");
        cmd->add_option("--format", format, "output format: json|text")
            ->check(CLI::IsMember({"json", "text"}));
        cmd->add_option("--out", out_path, "write output to a file instead of stdout");
    };

    auto* blowup = app.add_subcommand("blowup", "total Chern class of a weighted blow-up");
    blowup->add_option("--ring", ring_path, "ring spec JSON")->required();
    blowup->add_option("--bundle", bundle_path, "normal bundle blocks JSON")->required();
    blowup->add_option("--class", class_path, "ambient total Chern class JSON (default 1)");
    blowup->add_option("--exceptional", exceptional, "exceptional divisor generator name");
    add_common(blowup);

    auto* fibration =
        app.add_subcommand("fibration", "total Chern class of a weighted projective fibration");
    fibration->add_option("--ring", ring_path, "ring spec JSON")->required();
    fibration->add_option("--bundle", bundle_path, "weight blocks JSON")->required();
    fibration->add_option("--class", class_path, "base total Chern class JSON (default 1)");
    fibration->add_option("--tau", tau, "name of c_1(O(1)) in the ring");
    add_common(fibration);

    int n = 1, m = 1, d = 1;
    std::optional<int> level;
    std::string nested_text;
    bool include_full_set = false, override_guard = false, parallel = false;
    auto* stable = app.add_subcommand(
        "stablemaps", "total Chern class of stable-map moduli and their strata");
    stable->add_option("--n", n, "target projective space dimension")->required();
    stable->add_option("--m", m, "number of marked points")->required();
    stable->add_option("--d", d, "degree")->required();
    stable->add_option("--k", level, "stratum level (with --I)");
    stable->add_option("--I", nested_text, "nested set, e.g. \"1,2;3\"");
    stable->add_flag("--include-full-set-h", include_full_set,
                     "include the full-set boundary divisor");
    stable->add_flag("--override-generator-guard", override_guard,
                     "allow more than the default divisor budget");
    stable->add_flag("--parallel", parallel, "evaluate divisor factors concurrently");
    add_common(stable);

    std::string net_path, chow_path;
    auto* network = app.add_subcommand("network", "stratum network reports");
    network->add_option("file", net_path, "network JSON")->required();
    network->add_option("--chow", chow_path, "decomposition matrices JSON");
    add_common(network);

    std::string model_path, poset_path;
    int keep_part = 0;
    auto* groupoid = app.add_subcommand("groupoid", "finite groupoid model checks");
    groupoid->add_option("file", model_path, "groupoid model JSON")->required();
    groupoid->add_option("--keep-part", keep_part, "index of the distinguished part");
    groupoid->add_option("--poset", poset_path, "stratum poset JSON for the iterated lift");
    add_common(groupoid);

    CLI11_PARSE(app, argc, argv);

    const auto fail = [](int code, const char* type, const std::string& message) {
        std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump() << "\n";
        return code;
    };

    try {
        if (blowup->parsed())
            return run_blowup(ring_path, bundle_path, class_path, exceptional, cap, format,
                              out_path);
        if (fibration->parsed())
            return run_fibration(ring_path, bundle_path, class_path, tau, cap, format,
                                 out_path);
        if (stable->parsed())
            return run_stablemaps(n, m, d, level, nested_text, cap, include_full_set,
                                  override_guard, parallel, format, out_path);
        if (network->parsed())
            return run_network(net_path, chow_path, format, out_path);
        if (groupoid->parsed())
            return run_groupoid(model_path, keep_part, poset_path, format, out_path);
    } catch (const guard_error& e) {
        return fail(3, "guard", e.what());
    } catch (const internal_error& e) {
        return fail(4, "internal", e.what());
    } catch (const input_error& e) {
        return fail(2, "input", e.what());
    } catch (const json::exception& e) {
        return fail(2, "input", e.what());
    }
    return 0;
}
