#include "doctest.h"
#include "tourb/smr.hpp"

using tourb::SmrState;

TEST_CASE("commands") {
    SmrState s;
    s.apply("inc");
    s.apply("inc");
    s.apply("append:alpha");
    s.apply("inc");
    CHECK(s.counter == 3);
    REQUIRE(s.log.size() == 1);
    CHECK(s.log[0] == "alpha");
}

TEST_CASE("unknown commands are ignored") {
    SmrState s;
    s.apply("");
    s.apply("bogus");
    s.apply("append");   // no colon, not an append
    s.apply("inc2");
    CHECK(s == SmrState{});
}

TEST_CASE("render and parse round-trip") {
    SmrState s;
    s.apply("inc");
    s.apply("append:a");
    s.apply("append:b");
    std::string text = s.render();
    CHECK(text == "1|a|b");
    CHECK(SmrState::parse(text) == s);
    CHECK(SmrState::parse("0") == SmrState{});
}

TEST_CASE("digest separates states") {
    SmrState a, b;
    a.apply("inc");
    b.apply("append:inc");
    CHECK(a.digest() != b.digest());
    CHECK(a.digest() == [] {
        SmrState c;
        c.apply("inc");
        return c.digest();
    }());
}
