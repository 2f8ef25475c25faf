#include "doctest.h"

#include "checks.hpp"
#include "homogbl/config.hpp"
#include "homogbl/errors.hpp"

#include <cstdio>
#include <fstream>
#include <string>

using namespace homogbl;

namespace {

// Runs fn and reports the full error message ("" if nothing was thrown).
template <typename Fn>
std::string thrown_message(Fn&& fn) {
    try {
        fn();
    } catch (const error& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("an empty config yields the documented defaults") {
    const RunConfig cfg = parse_config_text("", "defaults.ini");
    CHECK(cfg.family == "trig-isotropic");
    CHECK(cfg.p0 == 2.0);
    CHECK(cfg.p1 == 1.0);
    CHECK(cfg.cell_n == 64);
    CHECK(cfg.points_per_cell == 16);
    REQUIRE(cfg.eps_list.size() == 4);
    CHECK(cfg.eps_list[0] == 0.25);
    CHECK(cfg.eps_list[3] == 0.03125);
    CHECK(cfg.eigen_tol == 1e-8);
    CHECK(cfg.study_cell);
    CHECK(cfg.study_sweep);
    CHECK(cfg.study_oscillating);
    CHECK(cfg.study_spectral);
    CHECK(cfg.study_unfolding);
    CHECK(cfg.output_dir == "out");
    CHECK(cfg.cache);
}

TEST_CASE("every section and key round-trips") {
    const std::string text = R"(# experiment description
[coefficient]
family = layered
p0 = 1.0
p1 = 4.0

[grid]
cell_n = 32
points_per_cell = 8

[sweep]
eps = 1/2, 1/4 0.125

[solver]
rel_tol = 1e-5
eigen_tol = 1e-6

[studies]
cell = on
spectral = yes

[output]
directory = results
cache = off
)";
    const RunConfig cfg = parse_config_text(text, "full.ini");
    CHECK(cfg.family == "layered");
    CHECK(cfg.p0 == 1.0);
    CHECK(cfg.p1 == 4.0);
    CHECK(cfg.cell_n == 32);
    CHECK(cfg.points_per_cell == 8);
    REQUIRE(cfg.eps_list.size() == 3);
    CHECK(cfg.eps_list[0] == 0.5);
    CHECK(cfg.eps_list[1] == 0.25);
    CHECK(cfg.eps_list[2] == 0.125);
    CHECK(cfg.solver.rel_tol == 1e-5);
    CHECK(cfg.eigen_tol == 1e-6);
    // Listing [studies] selects exactly the named ones.
    CHECK(cfg.study_cell);
    CHECK(cfg.study_spectral);
    CHECK_FALSE(cfg.study_sweep);
    CHECK_FALSE(cfg.study_oscillating);
    CHECK_FALSE(cfg.study_unfolding);
    CHECK(cfg.output_dir == "results");
    CHECK_FALSE(cfg.cache);
}

TEST_CASE("a second studies header does not reset earlier selections") {
    const std::string text =
        "[studies]\nsweep = on\n[studies]\nunfolding-checks = on\n";
    const RunConfig cfg = parse_config_text(text, "twice.ini");
    CHECK(cfg.study_sweep);
    CHECK(cfg.study_unfolding);
    CHECK_FALSE(cfg.study_cell);
}

TEST_CASE("boolean values accept the usual spellings case-insensitively") {
    auto parse_cache = [](const std::string& v) {
        return parse_config_text("[output]\ncache = " + v + "\n", "b.ini").cache;
    };
    for (const char* v : {"on", "True", "YES", "1"}) CHECK(parse_cache(v));
    for (const char* v : {"off", "False", "NO", "0"}) CHECK_FALSE(parse_cache(v));
    CHECK(checks::thrown_code([&] { parse_cache("maybe"); }) == "config-error");
}

TEST_CASE("eps tokens accept fractions and reciprocal decimals") {
    CHECK(parse_eps_token("1/8") == 0.125);
    CHECK(parse_eps_token("0.125") == 0.125);
    CHECK(parse_eps_token("1/1") == 1.0);
    CHECK(parse_eps_token("2/8") == 0.25);
    CHECK(parse_eps_token("1/3") == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    for (const char* bad : {"0.3", "3/8", "0", "-0.5", "1.5", "abc", "1/0",
                            "/8", "1/", ""})
        CHECK(checks::thrown_code([&] { parse_eps_token(bad); }) == "config-error");
}

TEST_CASE("parse errors carry the origin and line number") {
    const std::string text = "[grid]\ncell_n = 32\nbogus line\n";
    const std::string msg =
        thrown_message([&] { parse_config_text(text, "test.ini"); });
    CHECK(msg.find("config-error") != std::string::npos);
    CHECK(msg.find("test.ini:3:") != std::string::npos);
    CHECK(msg.find("key = value") != std::string::npos);
}

TEST_CASE("structural mistakes are rejected with context") {
    auto code = [](const std::string& text) {
        return checks::thrown_code([&] { parse_config_text(text, "t.ini"); });
    };
    CHECK(code("[nonsense]\n") == "config-error");
    CHECK(code("[grid\ncell_n = 16\n") == "config-error");
    CHECK(code("cell_n = 16\n") == "config-error");          // key before section
    CHECK(code("[grid]\n = 16\n") == "config-error");        // empty key
    CHECK(code("[grid]\nwidth = 16\n") == "config-error");   // unknown key
    CHECK(code("[coefficient]\ncolor = red\n") == "config-error");
    CHECK(code("[sweep]\nstep = 1\n") == "config-error");
    CHECK(code("[solver]\nabs_tol = 1\n") == "config-error");
    CHECK(code("[studies]\neverything = on\n") == "config-error");
    CHECK(code("[output]\nmode = fast\n") == "config-error");
    CHECK(code("[sweep]\neps =\n") == "config-error");       // empty list
    CHECK(code("[grid]\ncell_n = 16 # trailing\n") == "config-error");
    CHECK(code("[grid]\ncell_n = many\n") == "config-error");
    CHECK(code("[coefficient]\np0 = fast\n") == "config-error");
}

TEST_CASE("validation enforces the documented invariants") {
    auto invalid = [](auto&& tweak) {
        RunConfig cfg;
        tweak(cfg);
        return checks::thrown_code([&] { validate_config(cfg); });
    };
    CHECK(invalid([](RunConfig& c) { c.family = "marble"; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.p0 = 1.0; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.points_per_cell = 9; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.points_per_cell = 6; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.cell_n = 1; c.points_per_cell = 8; }) ==
          "config-error");
    CHECK(invalid([](RunConfig& c) { c.cell_n = 20; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.eps_list.clear(); }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.eps_list = {0.3}; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.eps_list = {2.0}; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.solver.rel_tol = 1e-3; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.solver.rel_tol = 0.0; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.eigen_tol = 2e-4; }) == "config-error");
    CHECK(invalid([](RunConfig& c) { c.output_dir.clear(); }) == "config-error");

    RunConfig ok;
    ok.cell_n = 48;
    ok.points_per_cell = 8;
    CHECK(checks::thrown_code([&] { validate_config(ok); }) == "");
}

TEST_CASE("config files load through the same path as inline text") {
    const std::string path = "config_roundtrip_test.ini";
    {
        std::ofstream out(path);
        out << "[grid]\ncell_n = 16\npoints_per_cell = 8\n";
    }
    const RunConfig cfg = parse_config_file(path);
    CHECK(cfg.cell_n == 16);
    CHECK(cfg.points_per_cell == 8);
    CHECK(cfg.family == "trig-isotropic");
    std::remove(path.c_str());

    CHECK(checks::thrown_code([] {
              parse_config_file("no-such-directory/missing.ini");
          }) == "config-error");
    const std::string msg = thrown_message(
        [] { parse_config_file("no-such-directory/missing.ini"); });
    CHECK(msg.find("cannot open") != std::string::npos);
}
