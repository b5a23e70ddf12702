#include <doctest.h>

#include <random>

#include "hexcross/crossing.hpp"
#include "hexcross/errors.hpp"
#include "hexcross/serialize.hpp"

using namespace hexcross;

TEST_CASE("fnv1a reference values") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ull);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hex64(0xabcull) == "0000000000000abc");
}

TEST_CASE("domain specs") {
    CHECK(parse_domain("hexagon:2")->size() == 19);
    CHECK(parse_domain("box:4x3")->size() == 12);
    CHECK(parse_domain("strip:5x2")->size() == 10);
    CHECK(parse_domain("annulus:1,1")->size() == 12);
    for (const std::string bad : {"hexagon", "box:4", "circle:3", "hexagon:-1", "box:0x3"})
        CHECK_THROWS_AS(parse_domain(bad), ConfigError);
    for (const std::string spec : {"hexagon:3", "box:4x3", "annulus:2,1", "strip:6x2"})
        CHECK(domain_spec(*parse_domain(spec)) == spec);
}

TEST_CASE("domain json round trip") {
    const FaceCoord centers[3] = {{-3, 0}, {0, 0}, {3, 0}};
    for (const auto& d : {build_regular_hexagon(2), build_hex_box(4, 3), annulus(1, 2), translate_union(2, centers),
                          build_regular_hexagon(1, {5, -2})}) {
        const auto back = domain_from_json(domain_to_json(*d));
        CHECK(back->faces() == d->faces());
        CHECK(back->hash() == d->hash());
    }
    auto j = domain_to_json(*build_hex_box(3, 3));
    j["faces"][0] = json::array({7, 7});
    CHECK_THROWS_AS(domain_from_json(j), ConfigError);
}

TEST_CASE("configuration round trips") {
    std::mt19937_64 rng(1);
    const auto d = build_regular_hexagon(3);
    std::vector<Spin> s(static_cast<std::size_t>(d->size()));
    for (auto& v : s) v = rng() & 1 ? Spin::plus : Spin::minus;
    SpinConfig c(d, BoundaryCondition::free(), s);
    CHECK(config_from_json(config_to_json(c), *d) == s);
    const auto bytes = config_to_binary(c);
    CHECK(bytes.size() == 4 + 8 + 4 + (37 + 7) / 8);
    CHECK(config_from_binary(bytes, *d) == s);

    const auto other = build_regular_hexagon(2);
    CHECK_THROWS_AS(config_from_json(config_to_json(c), *other), ConfigError);
    CHECK_THROWS_AS(config_from_binary(bytes, *other), ConfigError);
    auto bad = bytes;
    bad[0] = 'X';
    CHECK_THROWS_AS(config_from_binary(bad, *d), ConfigError);
}

TEST_CASE("event round trip") {
    const auto d = build_hex_box(4, 4);
    const auto ev = vertical_crossing(*d, Spin::minus);
    const auto back = event_from_json(event_to_json(ev));
    CHECK(back.name == ev.name);
    CHECK(back.source == ev.source);
    CHECK(back.target == ev.target);
    CHECK(back.region == ev.region);
    CHECK(back.spin == ev.spin);
}

TEST_CASE("params and estimates serialise") {
    const auto p = params_to_json({1.5, 0.6, 0.1, -0.2});
    CHECK(p["n"] == 1.5);
    CHECK(p["h_prime"] == -0.2);
    Estimate e;
    e.mean = 0.25;
    e.std_error = 0.01;
    e.seeds = {1, 2};
    const auto j = estimate_to_json(e);
    CHECK(j["mean"] == 0.25);
    CHECK(j["seeds"].size() == 2);
}
