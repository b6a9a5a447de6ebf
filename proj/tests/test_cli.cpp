#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

using nlohmann::json;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string bin_path() {
    const char* p = std::getenv("CHOWCALC_BIN");
    REQUIRE(p != nullptr);
    return p;
}

std::string data_path(const std::string& file) {
    const char* p = std::getenv("CHOWCALC_DATA");
    REQUIRE(p != nullptr);
    return std::string(p) + "/" + file;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

RunResult run_cli(const std::string& args) {
    const std::string out_file = "cli_stdout.tmp";
    const std::string err_file = "cli_stderr.tmp";
    const std::string command =
        bin_path() + " " + args + " > " + out_file + " 2> " + err_file;
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_file);
    result.err = slurp(err_file);
    std::remove(out_file.c_str());
    std::remove(err_file.c_str());
    return result;
}

} // namespace

TEST_CASE("blowup command", "[cli]") {
    const std::string args = "blowup --ring " + data_path("ring_blowup_p2.json") +
                             " --bundle " + data_path("bundle_point_in_p2.json") +
                             " --class " + data_path("class_p2.json");
    const auto result = run_cli(args);
    REQUIRE(result.exit_code == 0);
    const auto j = json::parse(result.out);
    CHECK(j.at("summary").at("c1").get<std::string>() == "3*H - 1*E");
    CHECK(j.at("summary").at("integral_top").get<std::string>() == "4");

    SECTION("text format") {
        const auto text = run_cli(args + " --format text");
        REQUIRE(text.exit_code == 0);
        CHECK(text.out.find("c1 = 3*H - 1*E") != std::string::npos);
        CHECK(text.out.find("integral of top part = 4") != std::string::npos);
    }
    SECTION("empty block list returns the input class") {
        std::ofstream("empty_bundle.tmp.json") << R"({"blocks": []})";
        std::ofstream("no_e.tmp.json")
            << R"({"cap":2,"terms":[{"mono":{},"coef":"1"},{"mono":{"H":1},"coef":"3"}]})";
        const auto r = run_cli("blowup --ring " + data_path("ring_blowup_p2.json") +
                               " --bundle empty_bundle.tmp.json --class no_e.tmp.json");
        REQUIRE(r.exit_code == 0);
        const auto jr = json::parse(r.out);
        CHECK(jr.at("summary").at("c1").get<std::string>() == "3*H");
        std::remove("empty_bundle.tmp.json");
        std::remove("no_e.tmp.json");
    }
}

TEST_CASE("fibration command", "[cli]") {
    const auto result = run_cli("fibration --ring " + data_path("ring_wp112.json") +
                                " --bundle " + data_path("bundle_wp112.json"));
    REQUIRE(result.exit_code == 0);
    const auto j = json::parse(result.out);
    CHECK(j.at("summary").at("c1").get<std::string>() == "4*tau");
    CHECK(j.at("summary").at("c2").get<std::string>() == "5*tau^2");
    CHECK(j.at("summary").at("integral_top").get<std::string>() == "5/2");
}

TEST_CASE("stablemaps command", "[cli]") {
    SECTION("degree-1 table at (1,1,2)") {
        const auto result = run_cli("stablemaps --n 1 --m 1 --d 2");
        REQUIRE(result.exit_code == 0);
        const auto j = json::parse(result.out);
        CHECK(j.at("c1_table").at("H").get<std::string>() == "6");
        CHECK(j.at("c1_table").at("psi").get<std::string>() == "5");
    }
    SECTION("no divisor columns at (1,1,1)") {
        const auto result = run_cli("stablemaps --n 1 --m 1 --d 1");
        REQUIRE(result.exit_code == 0);
        const auto j = json::parse(result.out);
        for (auto it = j.at("c1_table").begin(); it != j.at("c1_table").end(); ++it)
            CHECK(it.key().find("D{") == std::string::npos);
        CHECK(j.at("metadata").at("divisor_count").get<int>() == 0);
    }
    SECTION("cap 1 run equals the truncation of a cap 2 run") {
        const auto low = run_cli("stablemaps --n 1 --m 1 --d 2 --cap 1");
        const auto high = run_cli("stablemaps --n 1 --m 1 --d 2 --cap 2");
        REQUIRE(low.exit_code == 0);
        REQUIRE(high.exit_code == 0);
        const auto jl = json::parse(low.out).at("class").at("terms");
        auto jh = json::parse(high.out).at("class").at("terms");
        // degree <= 1 terms of the cap-2 run must be exactly the cap-1 terms
        json filtered = json::array();
        for (const auto& term : jh) {
            int degree = 0;
            for (auto it = term.at("mono").begin(); it != term.at("mono").end(); ++it)
                degree += it.value().get<int>();
            if (degree <= 1)
                filtered.push_back(term);
        }
        CHECK(jl.dump() == filtered.dump());
    }
    SECTION("generator guard exits with code 3") {
        const auto result = run_cli("stablemaps --n 1 --m 1 --d 5");
        CHECK(result.exit_code == 3);
        const auto err = json::parse(result.err);
        CHECK(err.at("error").at("type").get<std::string>() == "guard");
        CHECK(err.at("error").at("message").get<std::string>().find("2^5") !=
              std::string::npos);
    }
    SECTION("custom stratum") {
        const auto result = run_cli("stablemaps --n 1 --m 1 --d 2 --I \"1\" --k 0");
        REQUIRE(result.exit_code == 0);
    }
}

TEST_CASE("network command", "[cli]") {
    SECTION("weights of the two-sheet network") {
        const auto result = run_cli("network " + data_path("network_two_sheets.json"));
        REQUIRE(result.exit_code == 0);
        const auto j = json::parse(result.out);
        CHECK(j.at("weights").at("{}").get<std::string>() == "1");
        CHECK(j.at("weights").at("{1}").get<std::string>() == "1/2");
        CHECK(j.at("weights").at("{2}").get<std::string>() == "1/2");
        CHECK(j.at("weight_degree").at("ok").get<bool>());
        CHECK(j.at("section_identity").at("d").get<std::string>() == "1");
    }
    SECTION("chain-product violation is rejected naming the chains") {
        const auto result = run_cli("network " + data_path("network_bad_chains.json"));
        CHECK(result.exit_code == 2);
        const auto err = json::parse(result.err);
        const auto message = err.at("error").at("message").get<std::string>();
        CHECK(message.find("chain") != std::string::npos);
        CHECK(message.find("{1}") != std::string::npos);
        CHECK(message.find("{2}") != std::string::npos);
    }
    SECTION("decomposition data round-trips") {
        const auto result = run_cli("network " + data_path("network_single.json") +
                                    " --chow " + data_path("chow_two_level.json"));
        REQUIRE(result.exit_code == 0);
        const auto j = json::parse(result.out);
        CHECK(j.at("decomposition").at("round_trip").get<std::string>() == "pass");
    }
}

TEST_CASE("groupoid command", "[cli]") {
    const auto result = run_cli("groupoid " + data_path("groupoid_z2.json") + " --poset " +
                                data_path("poset_single_stratum.json"));
    REQUIRE(result.exit_code == 0);
    const auto j = json::parse(result.out);
    CHECK(j.at("axioms").get<std::string>() == "pass");
    CHECK(j.at("subtract").at("kept_arrows").get<int>() == 1);
    CHECK(j.at("subtract").at("closure").get<std::string>() == "pass");
    CHECK(j.at("iterated").at("presentations").at("{}").get<int>() == 1);
}

TEST_CASE("malformed input exits with code 2 and an error object", "[cli]") {
    std::ofstream("broken.tmp.json") << "{ not json";
    const auto result = run_cli("blowup --ring broken.tmp.json --bundle broken.tmp.json");
    CHECK(result.exit_code == 2);
    const auto err = json::parse(result.err);
    CHECK(err.at("error").at("type").get<std::string>() == "input");
    std::remove("broken.tmp.json");
}

TEST_CASE("output is byte-identical across runs", "[cli][determinism]") {
    const std::string args = "stablemaps --n 2 --m 1 --d 3 --cap 2";
    const auto first = run_cli(args);
    REQUIRE(first.exit_code == 0);
    for (int i = 0; i < 2; ++i) {
        const auto again = run_cli(args);
        REQUIRE(again.exit_code == 0);
        CHECK(again.out == first.out);
    }
    const auto parallel = run_cli(args + " --parallel");
    REQUIRE(parallel.exit_code == 0);
    CHECK(parallel.out == first.out);
}
