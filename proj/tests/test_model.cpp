#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hexcross/boundary.hpp"
#include "hexcross/dilute_potts.hpp"
#include "hexcross/errors.hpp"
#include "hexcross/loops.hpp"
#include "hexcross/model.hpp"
#include "hexcross/spin_config.hpp"
#include "oracle.hpp"

using namespace hexcross;

namespace {

std::vector<int> oracle_spins(const HexDomain& d, const oracle::Lattice& L, const SpinConfig& c) {
    std::vector<int> s(static_cast<std::size_t>(L.n()));
    for (int i = 0; i < d.size(); ++i) s[static_cast<std::size_t>(L.index.at(d.coord(i)))] = value(c.spin(i));
    return s;
}

oracle::Exterior oracle_exterior(const HexDomain& d, const BoundaryCondition& bc) {
    const auto ext = bc.resolve(d);
    std::map<FaceCoord, int> m;
    for (int i = 0; i < d.exterior_size(); ++i) m[d.exterior()[static_cast<std::size_t>(i)]] = value(ext[static_cast<std::size_t>(i)]);
    return [m](FaceCoord f) { return m.at(f); };
}

}  // namespace

TEST_CASE("nienhuis critical point") {
    CHECK(nienhuis_xc(0) == doctest::Approx(0.5411961).epsilon(1e-7));
    CHECK(nienhuis_xc(0) == doctest::Approx(1.0 / std::sqrt(2.0 + std::sqrt(2.0))).epsilon(1e-15));
    CHECK(nienhuis_xc(1) == doctest::Approx(0.5773503).epsilon(1e-7));
    CHECK(nienhuis_xc(2) == doctest::Approx(0.7071068).epsilon(1e-7));
    CHECK_THROWS_AS(nienhuis_xc(-0.1), std::domain_error);
    CHECK_THROWS_AS(nienhuis_xc(2.1), std::domain_error);
}

TEST_CASE("homeomorphism f") {
    for (double c0 : {0.1, 0.5, 1.0, 3.0}) CHECK(homeomorphism_f(c0, 1.0) == doctest::Approx(1.0));
    for (double v : {0.0, 0.3, 1.0}) CHECK(homeomorphism_f(1.0, v) == doctest::Approx(v));
    CHECK(homeomorphism_f(0.5, 0.0) == doctest::Approx(-0.4142136).epsilon(1e-7));
    CHECK(homeomorphism_f(0.5, 0.6) > homeomorphism_f(0.5, 0.5));
}

TEST_CASE("fkg regime predicate") {
    CHECK(ModelParams{1, 0.5, 0, 0}.is_fkg_regime());
    CHECK(ModelParams{2, 0.7, 0, 0}.is_fkg_regime());
    CHECK_FALSE(ModelParams{2, 0.75, 0, 0}.is_fkg_regime());
    CHECK_FALSE(ModelParams{0.5, 0.3, 0, 0}.is_fkg_regime());
    CHECK_FALSE(ModelParams{1, 0.9, 0, -0.5}.is_fkg_regime());
}

TEST_CASE("log weight of simple configurations") {
    const auto d = build_regular_hexagon(1);
    SpinConfig c(d, BoundaryCondition::wired(), Spin::plus);
    CHECK(c.stats().k == 1);
    CHECK(c.stats().e == 0);
    CHECK(log_weight(c.stats(), ModelParams{1.7, 0.4, 0, 0}) == doctest::Approx(std::log(1.7)));
    const double base = log_weight(c.stats(), ModelParams{1.7, 0.4, 0, 0.2});
    CHECK(log_weight(c.stats(), ModelParams{1.7, 0.4, 0.3, 0.2}) - base == doctest::Approx(0.3 * 7));

    SpinConfig m(d, BoundaryCondition::wired(), Spin::minus);
    CHECK(log_weight(m.stats(), ModelParams{1, 0, 0, 0}) == kNegInf);
    CHECK(log_weight(c.stats(), ModelParams{1, 0, 0, 0}) == 0.0);
}

TEST_CASE("statistics match the oracle on every configuration of small domains") {
    struct Case {
        DomainPtr d;
        BoundaryCondition bc;
    };
    const std::vector<Case> cases{
        {build_regular_hexagon(1), BoundaryCondition::free()},
        {build_regular_hexagon(1), BoundaryCondition::wired()},
        {build_regular_hexagon(1), BoundaryCondition::dobrushin(0.0, 0.5)},
        {build_hex_box(3, 3), BoundaryCondition::push_mixed()},
        {build_hex_box(4, 2), BoundaryCondition::dobrushin(0.25, 0.8)},
        {annulus(1, 1), BoundaryCondition::free()},
    };
    for (const auto& cs : cases) {
        const oracle::Lattice L(cs.d->faces());
        const auto ext = oracle_exterior(*cs.d, cs.bc);
        SpinConfig c(cs.d, cs.bc);
        const int n = cs.d->size();
        for (unsigned long b = 0; b < (1ul << n); ++b) {
            std::vector<Spin> s(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = (b >> i) & 1u ? Spin::plus : Spin::minus;
            c.assign(s);
            const auto o = oracle::stats(L, oracle_spins(*cs.d, L, c), ext);
            const auto st = c.stats();
            REQUIRE(st.e == o.e);
            REQUIRE(st.k == o.k);
            REQUIRE(st.r == o.r);
            REQUIRE(st.r_prime == o.rp);
        }
    }
}

TEST_CASE("global spin flip symmetry at zero fields") {
    const auto d = build_hex_box(3, 3);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        std::vector<Spin> s(9), f(9);
        for (int i = 0; i < 9; ++i) {
            s[static_cast<std::size_t>(i)] = rng() & 1 ? Spin::plus : Spin::minus;
            f[static_cast<std::size_t>(i)] = opposite(s[static_cast<std::size_t>(i)]);
        }
        const auto bc = BoundaryCondition::push_mixed();
        SpinConfig a(d, bc, s), b(d, bc.flipped(), f);
        const ModelParams p{1.5, 0.6, 0, 0};
        CHECK(log_weight(a.stats(), p) == doctest::Approx(log_weight(b.stats(), p)));
        CHECK(a.stats().r == -b.stats().r);
        CHECK(a.stats().r_prime == -b.stats().r_prime);
    }
}

TEST_CASE("cache coherence under random flip sequences") {
    std::mt19937_64 rng(11);
    const std::vector<std::pair<DomainPtr, BoundaryCondition>> cases{
        {build_regular_hexagon(2), BoundaryCondition::free()},
        {build_regular_hexagon(2), BoundaryCondition::dobrushin(0.1, 0.6)},
        {build_hex_box(4, 4), BoundaryCondition::push_mixed()},
        {annulus(1, 1), BoundaryCondition::wired()},
    };
    for (const auto& [d, bc] : cases) {
        for (int seq = 0; seq < 250; ++seq) {
            SpinConfig c(d, bc, seq % 2 ? Spin::plus : Spin::minus);
            for (int step = 0; step < 40; ++step) {
                const int u = static_cast<int>(rng() % static_cast<unsigned>(d->size()));
                const int predicted = c.delta_cluster_count(u, opposite(c.spin(u)));
                const auto before = c.stats().k;
                c.flip(u);
                REQUIRE(c.stats() == c.recount());
                REQUIRE(c.stats().k - before == predicted);
            }
        }
    }
}

TEST_CASE("delta cluster count fixtures") {
    const auto d = build_regular_hexagon(1);
    const int centre = d->index_of({0, 0});
    SpinConfig c(d, BoundaryCondition::wired(), Spin::plus);
    // Isolated opposite face appears.
    CHECK(c.delta_cluster_count(centre, Spin::minus) == 1);
    // Ring of + around a - centre: flipping the centre back merges nothing new.
    c.flip(centre);
    CHECK(c.delta_cluster_count(centre, Spin::plus) == -1);
    CHECK(c.stats().k == 2);

    // Search budget exhausted: the recount fallback still gives the exact answer.
    const auto big = build_regular_hexagon(4);
    std::mt19937_64 rng(5);
    SpinConfig g(big, BoundaryCondition::free());
    g.set_search_budget(2);
    for (int step = 0; step < 2000; ++step) {
        const int u = static_cast<int>(rng() % static_cast<unsigned>(big->size()));
        g.flip(u);
    }
    CHECK(g.stats() == g.recount());
    CHECK(g.cluster_diagnostics().fallbacks > 0);
}

TEST_CASE("loop weights") {
    const auto one = build_hex_box(1, 1);
    CHECK(loop_weight(LoopConfig(one, {}), ModelParams{2, 0.5, 0, 0}) == 1.0);
    CHECK(loop_count(LoopConfig(one, {})) == 0);
    std::vector<int> all{0, 1, 2, 3, 4, 5};
    const LoopConfig hexagon(one, all);
    CHECK(loop_count(hexagon) == 1);
    CHECK(loop_weight(hexagon, ModelParams{2, 0.5, 0, 0}) == doctest::Approx(0.03125));

    // Two disjoint elementary cycles.
    const auto strip = build_hex_box(3, 1);
    SpinConfig c(strip, BoundaryCondition::wired(), Spin::plus);
    c.flip(0);
    c.flip(2);
    const LoopConfig two = spins_to_loops(c);
    CHECK(two.edge_count() == 12);
    CHECK(loop_count(two) == 2);
    CHECK(loop_weight(two, ModelParams{1.3, 0.7, 0, 0}) == doctest::Approx(std::pow(0.7, 12) * 1.3 * 1.3));

    CHECK_THROWS_AS(LoopConfig(build_regular_hexagon(1), {0}), ConfigError);
}

TEST_CASE("spins to loops") {
    const auto d = build_regular_hexagon(1);
    SpinConfig c(d, BoundaryCondition::wired(), Spin::plus);
    CHECK(spins_to_loops(c).edge_count() == 0);
    c.flip(d->index_of({0, 0}));
    const auto single = spins_to_loops(c);
    CHECK(single.edge_count() == 6);
    CHECK(loop_count(single) == 1);
}

TEST_CASE("domain walls: edge count equals e, loops equal k - 1, both loop counts agree") {
    for (const auto& d : {build_regular_hexagon(1), build_hex_box(4, 3), build_hex_box(3, 2)}) {
        for (const auto& bc : {BoundaryCondition::free(), BoundaryCondition::wired()}) {
            SpinConfig c(d, bc);
            const int n = d->size();
            for (unsigned long b = 0; b < (1ul << n); ++b) {
                std::vector<Spin> s(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = (b >> i) & 1u ? Spin::plus : Spin::minus;
                c.assign(s);
                const auto loops = spins_to_loops(c);
                REQUIRE(loops.edge_count() == c.stats().e);
                REQUIRE(loop_count(loops) == c.stats().k - 1);
                REQUIRE(loop_count(loops) == loop_count_cycle_space(loops));
            }
        }
    }
}

TEST_CASE("loop counts agree on random even subgraphs of the hexagon") {
    // Symmetric differences of domain walls are again even subgraphs.
    const auto d = build_regular_hexagon(2);
    std::mt19937_64 rng(17);
    SpinConfig c(d, BoundaryCondition::free());
    for (int t = 0; t < 500; ++t) {
        c.flip(static_cast<int>(rng() % 19));
        const auto loops = spins_to_loops(c);
        CHECK(loop_count(loops) == loop_count_cycle_space(loops));
    }
}

TEST_CASE("dilute Potts weight") {
    // Three mutually adjacent sites.
    const auto d = build_hex_box(2, 2);
    SiteGraph g = site_graph(*d);
    CHECK(g.sites == 4);
    CHECK(g.pairs.size() == 5);
    CHECK(g.triangles.size() == 2);

    SiteGraph tri;
    tri.sites = 3;
    tri.pairs = {{0, 1}, {1, 2}, {0, 2}};
    tri.triangles = {{0, 1, 2}};
    const DiluteParams p{3, 0.3, -0.7, 1.1};
    CHECK(dilute_potts_log_weight({{0, 0, 0}, {1, 2, 3}}, p, tri) == 0.0);
    CHECK(dilute_potts_log_weight({{1, 1, 1}, {2, 2, 2}}, p, tri) == doctest::Approx(3 * 0.3 + 3 * -0.7 + 1.1));
    CHECK(dilute_potts_log_weight({{1, 1, 0}, {1, 2, 2}}, p, tri) == kNegInf);
    CHECK(dilute_potts_log_weight({{1, 0, 1}, {1, 3, 1}}, p, tri) == doctest::Approx(2 * 0.3 - 0.7));
}

TEST_CASE("boundary conditions") {
    const auto box = build_hex_box(3, 3);
    CHECK(boundary_leq(*box, BoundaryCondition::free(), BoundaryCondition::push_mixed()));
    CHECK(boundary_leq(*box, BoundaryCondition::push_mixed(), BoundaryCondition::wired()));
    CHECK_FALSE(boundary_leq(*box, BoundaryCondition::push_mixed(), BoundaryCondition::push_mixed_dual()));
    CHECK_THROWS_AS(BoundaryCondition::explicit_spins({{{0, 0}, Spin::plus}}).resolve(*box), ConfigError);
    CHECK_THROWS_AS(parse_boundary("sideways"), ConfigError);
    CHECK(parse_boundary("mixed").describe() == BoundaryCondition::push_mixed().describe());
}
