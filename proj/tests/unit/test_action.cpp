#include "bnb/action.hpp"
#include "bnb/error.hpp"

#include "support.hpp"

#include <doctest.h>

#include <map>

using namespace bnb;

TEST_CASE("signature canonical forms") {
    CHECK(action_signature(act::Click{"e12"}) == "CLICK|e12");
    CHECK(action_signature(act::TabSelect{0}) == "TAB_SELECT|0");
    CHECK(action_signature(act::NavigateBack{}) == "NAVIGATE_BACK");
    CHECK(action_signature(act::Type{"e_q", "Q1 2022"}) == "TYPE|e_q|7:Q1 2022");
    CHECK(action_signature(act::Drag{"a", "b"}) == "DRAG|a|b");
}

TEST_CASE("typed text does not collide") {
    CHECK(action_signature(act::Type{"e_q", "Q1 2022"}) != action_signature(act::Type{"e_q", "Q1 2023"}));
    // the delimiter inside free text must not fake an extra field
    CHECK(action_signature(act::Type{"a", "b|1:c"}) != action_signature(act::Type{"a|b", "c"}));
    CHECK(action_signature(act::Stop{""}) != action_signature(act::Stop{" "}));
}

TEST_CASE("signature injectivity over a generated corpus") {
    testing::Rng rng(11);
    std::vector<Action> corpus;
    for (int i = 0; i < 3000; ++i) corpus.push_back(testing::random_action(rng));
    // pairwise: equal actions iff equal signatures
    std::map<std::string, Action> seen;
    std::size_t collisions = 0;
    for (const auto& a : corpus) {
        const auto sig = action_signature(a);
        auto [it, fresh] = seen.emplace(sig, a);
        if (!fresh && !(it->second == a)) ++collisions;
    }
    CHECK(collisions == 0);
    for (std::size_t i = 0; i < 400; ++i) {
        for (std::size_t j = 0; j < 400; ++j) {
            CHECK_EQ(corpus[i] == corpus[j], action_signature(corpus[i]) == action_signature(corpus[j]));
        }
    }
}

TEST_CASE("render/parse round trip") {
    const Action nav = act::Navigate{"https://s.local/admin"};
    CHECK(parse_action(render_action(nav)) == nav);
    CHECK(render_action(act::Click{"e1"}) == Json::parse(R"({"type":"CLICK","args":{"element":"e1"}})"));
    CHECK(render_action(act::TabNew{}) == Json::parse(R"({"type":"TAB_NEW","args":{}})"));

    testing::Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const Action a = testing::random_action(rng);
        CHECK(parse_action(render_action(a)) == a);
        CHECK(parse_action(std::string_view(render_action(a).dump())) == a);
    }
}

TEST_CASE("malformed action documents") {
    CHECK_THROWS_AS(parse_action(Json::parse(R"({"type":"CLICK","args":{}})")), ParseError);
    CHECK_THROWS_AS(parse_action(Json::parse(R"({"type":"CLICK"})")), ParseError);
    CHECK_THROWS_AS(parse_action(Json::parse(R"({"type":"CLICK","args":{"element":7}})")), ParseError);
    CHECK_THROWS_AS(parse_action(Json::parse(R"({"type":"SCROLL","args":{}})")), UnknownVariant);
    CHECK_THROWS_AS(parse_action(Json::parse(R"({"type":"TAB_SELECT","args":{"id":-1}})")), ParseError);
    CHECK_THROWS_AS(parse_action(Json::parse(R"({"type":"CLICK","args":{"element":"e1","x":1}})")), ParseError);

    try {
        parse_action(std::string_view(R"({"type": "CLICK", )"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() > 0);
    }
}

TEST_CASE("well-formedness") {
    CHECK(is_well_formed(act::Click{"e1"}));
    CHECK_FALSE(is_well_formed(act::Click{""}));
    CHECK_FALSE(is_well_formed(act::Click{"a|b"}));
    CHECK(is_well_formed(act::Type{"e1", "a|b"}));
}
