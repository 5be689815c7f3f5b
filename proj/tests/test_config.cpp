#include <doctest.h>

#include "minent/config.hpp"

using namespace minent;

TEST_CASE("config parses sections, numbers, strings, arrays") {
    const char* text = R"(
# surgery inputs
[cusp]
delta = 0.1
zeta2_a = 0.3
zeta2_b = 0.7
base_area = 1.0
label = "torus cusp"  # trailing comment

[oracle]
kind = free
rank = 2
lengths = [1.0, 1.0]
names = ["a", "b"]
verbose = true
)";
    Config cfg = Config::parse_string(text);
    CHECK(cfg.number("cusp", "delta") == doctest::Approx(0.1));
    CHECK(cfg.number("cusp", "zeta2_b") == doctest::Approx(0.7));
    CHECK(cfg.text("cusp", "label") == "torus cusp");
    CHECK(cfg.text("oracle", "kind") == "free");
    CHECK(cfg.integer("oracle", "rank") == 2);
    CHECK(cfg.numbers("oracle", "lengths") == std::vector<double>{1.0, 1.0});
    CHECK(cfg.strings("oracle", "names") == std::vector<std::string>{"a", "b"});
    CHECK(cfg.flag_or("oracle", "verbose", false));
    CHECK(cfg.number_or("cusp", "missing", 7.0) == 7.0);
    CHECK(cfg.has_section("cusp"));
    CHECK_FALSE(cfg.has_section("nope"));
}

TEST_CASE("config reports line numbers on malformed input") {
    try {
        Config::parse_string("[a]\nx 3\n", "bad.toml");
        FAIL("expected a parse error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("bad.toml:2") != std::string::npos);
    }
    CHECK_THROWS_AS(Config::parse_string("x = 1\n"), ConfigError); // key outside section
    CHECK_THROWS_AS(Config::parse_string("[a]\nx = [1, oops]\n"), ConfigError);
}

TEST_CASE("config lookups raise useful diagnostics") {
    Config cfg = Config::parse_string("[a]\nx = 1\n", "t");
    CHECK_THROWS_AS(cfg.number("a", "y"), ConfigError);
    CHECK_THROWS_AS(cfg.number("b", "x"), ConfigError);
    CHECK_THROWS_AS(cfg.text("a", "x"), ConfigError);
}

TEST_CASE("config set overrides values for sweeps") {
    Config cfg = Config::parse_string("[a]\nx = 1\n", "t");
    cfg.set("a", "x", 2.5);
    CHECK(cfg.number("a", "x") == doctest::Approx(2.5));
}
