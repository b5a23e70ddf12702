#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <random>

#include "hexcross/crossing.hpp"
#include "hexcross/errors.hpp"
#include "hexcross/exact.hpp"
#include "hexcross/sampler.hpp"

using namespace hexcross;

namespace {

Schedule quick(int sweeps, std::uint64_t seed = 7) {
    Schedule s;
    s.burn_in = 500;
    s.sweeps = sweeps;
    s.chains = 3;
    s.seed = seed;
    return s;
}

std::size_t row_of(const SpinConfig& c) {
    std::size_t row = 0;
    for (int f = 0; f < c.size(); ++f)
        if (c.spin(f) == Spin::plus) row |= std::size_t{1} << f;
    return row;
}

}  // namespace

TEST_CASE("splitmix64 reference stream") {
    // Published reference outputs for seed 1234567.
    SplitMix64 g(1234567);
    CHECK(g.next() == 6457827717110365317ull);
    CHECK(g.next() == 3203168211198807973ull);
    CHECK(g.next() == 9817491932198370423ull);
    SplitMix64 u(3);
    for (int i = 0; i < 1000; ++i) {
        const double v = u.uniform();
        CHECK((v >= 0 && v < 1));
        CHECK(u.below(7) < 7);
    }
}

TEST_CASE("seed derivation") {
    CHECK(chain_seed(1, 0) != chain_seed(1, 1));
    CHECK(chain_seed(1, 0) != chain_seed(2, 0));
    CHECK(job_seed(5, 0) != job_seed(5, 1));
    CHECK(job_seed(5, 3) == job_seed(5, 3));
    CHECK(initial_state(0) == InitialState::AllPlus);
    CHECK(initial_state(1) == InitialState::AllMinus);
    CHECK(initial_state(2) == InitialState::Random);
    CHECK(initial_state(3) == InitialState::AllPlus);
    CHECK(update_from_string("wolff") == UpdateKind::Wolff);
    CHECK(to_string(UpdateKind::HeatBath) == "heatbath");
    CHECK_THROWS_AS(update_from_string("metropolis"), ConfigError);
}

TEST_CASE("heat-bath conditional matches the weight ratio") {
    std::mt19937_64 rng(1);
    const auto d = build_hex_box(4, 4);
    for (const ModelParams p : {ModelParams{1.7, 0.6, 0.2, -0.3}, ModelParams{0.5, 1.2, -0.4, 0.5}}) {
        ChainState chain(d, p, BoundaryCondition::push_mixed(), 3);
        for (int t = 0; t < 200; ++t) {
            chain.config().flip(static_cast<int>(rng() % 16));
            const int u = static_cast<int>(rng() % 16);
            SpinConfig a = chain.config(), b = chain.config();
            a.set(u, Spin::plus);
            b.set(u, Spin::minus);
            const double lp = log_weight(a.recount(), p), lm = log_weight(b.recount(), p);
            CHECK(chain.conditional_plus(u) == doctest::Approx(1 / (1 + std::exp(lm - lp))).epsilon(1e-12));
        }
    }
}

TEST_CASE("runs are reproducible and independent of the thread count") {
    const auto d = build_hex_box(3, 3);
    const auto ev = as_predicate(*d, horizontal_crossing(*d));
    Schedule s = quick(2000);
    s.threads = 1;
    const auto a = estimate_event(d, {1.5, 0.6, 0, 0}, BoundaryCondition::free(), ev, s);
    s.threads = 3;
    const auto b = estimate_event(d, {1.5, 0.6, 0, 0}, BoundaryCondition::free(), ev, s);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    CHECK(a.seeds == b.seeds);
    CHECK(a.n_samples == 3 * 2000);
    s.seed = 8;
    const auto c = estimate_event(d, {1.5, 0.6, 0, 0}, BoundaryCondition::free(), ev, s);
    CHECK(c.mean != a.mean);
}

TEST_CASE("heat-bath chain has the exact measure as its stationary law") {
    const auto d = build_regular_hexagon(1);
    const ModelParams p{1.5, 0.7, 0.15, -0.2};
    const auto bc = BoundaryCondition::dobrushin(0.0, 0.5);
    const EnumerationTable table(d, bc);
    const auto m = table.measure(p);

    ChainState chain(d, p, bc, 99);
    for (int i = 0; i < 1000; ++i) chain.sweep();
    const int samples = 200000;
    std::vector<double> counts(128, 0);
    for (int i = 0; i < samples; ++i) {
        chain.sweep();
        chain.sweep();
        counts[row_of(chain.config())] += 1;
    }
    double chi2 = 0;
    int dof = -1;
    for (std::size_t row = 0; row < 128; ++row) {
        const double expected = samples * m.row_probability(row);
        if (expected < 5) continue;
        chi2 += (counts[row] - expected) * (counts[row] - expected) / expected;
        ++dof;
    }
    REQUIRE(dof > 20);
    const double p_value = boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), chi2));
    MESSAGE("chi2 = " << chi2 << " dof = " << dof << " p = " << p_value);
    CHECK(p_value > 1e-4);
}

TEST_CASE("sampled event probabilities agree with enumeration") {
    const auto d = build_hex_box(3, 3);
    const std::vector<EventPredicate> evs{as_predicate(*d, horizontal_crossing(*d)), as_predicate(*d, vertical_crossing(*d)),
                                          EventPredicate::face_is(4)};
    for (const ModelParams p : {ModelParams{1, 0.5, 0.1, 0}, ModelParams{2, 0.7, 0, 0}, ModelParams{0.5, 0.9, -0.2, 0.3}}) {
        const auto bc = BoundaryCondition::push_mixed();
        EnumerationTable table(d, bc, evs);
        const auto m = table.measure(p);
        const auto est = estimate_events(d, p, bc, evs, quick(20000));
        for (std::size_t i = 0; i < evs.size(); ++i) {
            CHECK(est[i].std_error > 0);
            CHECK(std::abs(est[i].mean - m.event(i)) <= 4 * est[i].std_error);
            CHECK(est[i].converged);
        }
    }
}

TEST_CASE("Wolff moves preserve the measure") {
    const auto d = build_hex_box(4, 3);
    const std::vector<EventPredicate> evs{as_predicate(*d, horizontal_crossing(*d)), EventPredicate::face_is(5)};
    for (const ModelParams p : {ModelParams{1, 0.5, 0.0, 0.0}, ModelParams{1, 0.8, 0.3, -0.2}}) {
        const auto bc = BoundaryCondition::dobrushin(0.1, 0.6);
        const EnumerationTable table(d, bc, evs);
        const auto m = table.measure(p);
        Schedule s = quick(20000, 3);
        s.update = UpdateKind::Wolff;
        const auto est = estimate_events(d, p, bc, evs, s);
        for (std::size_t i = 0; i < evs.size(); ++i) CHECK(std::abs(est[i].mean - m.event(i)) <= 4 * est[i].std_error);
    }
    Schedule s = quick(10);
    s.update = UpdateKind::Wolff;
    CHECK_THROWS_AS(estimate_event(d, {1.5, 0.5, 0, 0}, BoundaryCondition::free(), EventPredicate::always(), s),
                    ConfigError);
}

TEST_CASE("zero temperature") {
    const auto d = build_hex_box(3, 3);
    CHECK_THROWS_AS(estimate_event(d, {1, 0, 0, 0}, BoundaryCondition::push_mixed(), EventPredicate::always(), quick(10)),
                    ConfigError);
    const auto e = estimate_event(d, {1, 0, 0, 0}, BoundaryCondition::wired(), EventPredicate::all_plus(), quick(100));
    CHECK(e.mean == 1.0);
    CHECK(e.std_error == 0.0);
}

TEST_CASE("checkpoints keep a bounded history") {
    const auto d = build_regular_hexagon(3);
    ChainState chain(d, {1.5, 0.6, 0, 0}, BoundaryCondition::free(), 4);
    for (int i = 0; i < 40; ++i) {
        chain.sweep();
        CHECK_NOTHROW(chain.checkpoint());
    }
    CHECK(chain.history().size() <= 16);
    CHECK(chain.history().back() == chain.config().recount());
}

TEST_CASE("batch means reduction") {
    SUBCASE("constant series") {
        const auto e = reduce_batch_means({std::vector<double>(100, 0.25), std::vector<double>(100, 0.25)}, 20);
        CHECK(e.mean == 0.25);
        CHECK(e.std_error == 0);
        CHECK(e.autocorrelation_time == 0.5);
        CHECK(e.converged);
    }
    SUBCASE("independent samples") {
        std::mt19937_64 rng(6);
        std::normal_distribution<double> g(1.0, 2.0);
        std::vector<std::vector<double>> chains(4, std::vector<double>(20000));
        for (auto& c : chains)
            for (auto& v : c) v = g(rng);
        const auto e = reduce_batch_means(chains, 20);
        const double ideal = 2.0 / std::sqrt(80000.0);
        CHECK(e.std_error == doctest::Approx(ideal).epsilon(0.35));
        CHECK(e.autocorrelation_time == doctest::Approx(0.5).epsilon(0.5));
        CHECK(std::abs(e.mean - 1.0) < 5 * ideal);
        CHECK(e.chain_means.size() == 4);
        CHECK(e.n_samples == 80000);
    }
    SUBCASE("disagreeing chains are flagged") {
        std::mt19937_64 rng(6);
        std::normal_distribution<double> g(0.0, 0.1);
        std::vector<std::vector<double>> chains(2, std::vector<double>(2000));
        for (auto& v : chains[0]) v = g(rng);
        for (auto& v : chains[1]) v = 1 + g(rng);
        CHECK_FALSE(reduce_batch_means(chains, 20).converged);
    }
    CHECK_THROWS_AS(reduce_batch_means({}, 20), ConfigError);
}
