#include <catch_amalgamated.hpp>

#include <string>

#include "conespec/config.hpp"

using namespace conespec;
using config::Value;

TEST_CASE("config grammar: sections, fractions, lists, tuples and calls", "[config]") {
    const auto doc = config::parse(R"(
        # comment
        cmd = sweep
        [geometry]
        r0 = 1/2
        cap_m2 = robin(-3/4)
        channels = [(0, 1), (1/2, 2)]
        name = "two words"
        eps = [1e-1, 1e-2]
    )",
                                   "t.cfg");
    REQUIRE(doc.sections.size() == 2);
    const auto* root = doc.find("");
    REQUIRE(root != nullptr);
    config::Reader top(doc, *root);
    CHECK(top.word("cmd") == "sweep");

    const auto* g = doc.find("geometry");
    REQUIRE(g != nullptr);
    config::Reader rd(doc, *g);
    CHECK(rd.number("r0") == 0.5);
    const auto& cap = rd.entry("cap_m2").value;
    CHECK(cap.kind == Value::Kind::Call);
    CHECK(cap.text == "robin");
    REQUIRE(cap.items.size() == 1);
    CHECK(cap.items[0].number == -0.75);
    const auto& ch = rd.entry("channels").value;
    REQUIRE(ch.items.size() == 2);
    CHECK(ch.items[1].kind == Value::Kind::Tuple);
    CHECK(ch.items[1].items[0].number == 0.5);
    CHECK(rd.word("name") == "two words");
    CHECK(rd.numbers("eps") == std::vector<double>{1e-1, 1e-2});
    CHECK(rd.entry("eps").line == 9);
}

TEST_CASE("config errors name the source line and field", "[config]") {
    auto message = [](const std::string& text) {
        try {
            config::parse(text, "bad.cfg");
        } catch (const InputError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(message("a = 1\na = 2\n") == "bad.cfg:2: field 'a': duplicate key");
    CHECK(message("[s]\nx = 1\n[s]\n") == "bad.cfg:3: duplicate section [s]");
    CHECK(message("x = 1/0\n") == "bad.cfg:1: zero denominator");
    CHECK(message("x = [1, 2\n") == "bad.cfg:2: expected ',' or closing bracket");
}

TEST_CASE("typed readers reject mismatched values", "[config]") {
    const auto doc = config::parse("n = 2.5\nw = word\nl = [1, x]\n", "r.cfg");
    config::Reader rd(doc, *doc.find(""));
    CHECK_THROWS_WITH(rd.integer("n"), "r.cfg:1: field 'n': expected an integer");
    CHECK_THROWS_WITH(rd.number("w"), "r.cfg:2: field 'w': expected a number");
    CHECK_THROWS_WITH(rd.numbers("l"), "r.cfg:3: field 'l': expected a number");
    CHECK_THROWS_WITH(rd.number("missing"), "r.cfg:0: field 'missing': missing in top level");
    CHECK(rd.integer_or("absent", 7) == 7);
    CHECK_THROWS_WITH(config::require_known_keys(doc, *doc.find(""), {"n", "w"}),
                      "r.cfg:3: field 'l': unknown key in top level");
}
