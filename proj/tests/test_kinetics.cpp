#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "spinotto/errors.hpp"
#include "spinotto/kinetics.hpp"
#include "oracles.hpp"
#include "stats_helpers.hpp"
#include "test_helpers.hpp"

using namespace spinotto;

namespace {

ContactPhase heating_phase(double tau, const RateTable& t) {
    return ContactPhase{Direction::heating, tau, 346.5, t};
}

ContactPhase cooling_phase(double tau, const RateTable& t) {
    return ContactPhase{Direction::cooling, tau, 31.6, t};
}

} // namespace

TEST_CASE("zero-duration contact is the identity") {
    auto d = LevelDistribution::uniform();
    auto out = evolve_master(d, heating_phase(0.0, RateTable::default_calibrated()));
    for (int n = 0; n < 7; ++n) CHECK(out[n] == d[n]);
    auto counted = evolve_master_counted(d, cooling_phase(0.0, RateTable::default_calibrated()));
    CHECK(counted.collisions == 0.0);
}

TEST_CASE("negative duration is rejected") {
    auto d = LevelDistribution::polarized();
    CHECK_THROWS_AS(evolve_master(d, heating_phase(-1.0, RateTable::default_calibrated())),
                    DomainError);
}

TEST_CASE("two-level analytic decay") {
    // Only the last link is active when starting from level 5: pure
    // exponential transfer 5 -> 6.
    RateTable t = RateTable::uniform(0.02);
    auto d = LevelDistribution::delta(5);
    double tau = 37.0;
    auto out = evolve_master(d, heating_phase(tau, t));
    double expected = std::exp(-0.02 * tau);
    CHECK(out[5] == doctest::Approx(expected).epsilon(1e-10));
    CHECK(out[6] == doctest::Approx(1.0 - expected).epsilon(1e-10));
    for (int n = 0; n < 5; ++n) CHECK(out[n] == 0.0);
}

TEST_CASE("uniform-rate chain matches the analytic jump-count solution") {
    RateTable t = RateTable::default_calibrated();
    double rate = 6.0 / 450.0;
    for (double tau : {10.0, 150.0, 450.0, 1200.0}) {
        auto out = evolve_master(LevelDistribution::polarized(), heating_phase(tau, t));
        auto exact = oracles::uniform_chain_analytic(0, rate, tau);
        for (int n = 0; n < 7; ++n)
            CHECK(out[n] == doctest::Approx(exact[static_cast<std::size_t>(n)]).epsilon(1e-8));
    }
    // Same chain started mid-ladder.
    auto out = evolve_master(LevelDistribution::delta(2), heating_phase(300.0, t));
    auto exact = oracles::uniform_chain_analytic(2, rate, 300.0);
    for (int n = 0; n < 7; ++n)
        CHECK(out[n] == doctest::Approx(exact[static_cast<std::size_t>(n)]).epsilon(1e-8));
}

TEST_CASE("propagator matches the matrix-exponential oracle") {
    SplitMix64 rng(2024);
    for (int k = 0; k < 40; ++k) {
        auto table = helpers::random_table(rng);
        auto d = helpers::random_distribution(rng);
        double tau = 1.0 + 700.0 * rng.next_unit();
        ContactPhase ph = k % 2 == 0 ? heating_phase(tau, table) : cooling_phase(tau, table);
        auto fast = evolve_master(d, ph);
        auto exact = oracles::propagate(d, ph);
        for (int n = 0; n < 7; ++n)
            CHECK(std::abs(fast[n] - exact[static_cast<std::size_t>(n)]) < 1e-8);
    }
}

TEST_CASE("probability is conserved and the chain saturates monotonically") {
    SplitMix64 rng(7);
    for (int k = 0; k < 30; ++k) {
        auto table = helpers::random_table(rng);
        auto d = helpers::random_distribution(rng);
        ContactPhase ph = k % 2 == 0 ? heating_phase(0.0, table) : cooling_phase(0.0, table);

        // Cumulative tail mass toward the absorbing end never decreases.
        std::array<double, 7> prev_tail{};
        bool first = true;
        for (double tau : {5.0, 20.0, 80.0, 320.0, 1280.0}) {
            ph.duration_ms = tau;
            auto out = evolve_master(d, ph);
            CHECK(std::abs(out.total() - 1.0) <= 1e-9);

            std::array<double, 7> tail{};
            if (ph.direction == Direction::heating) {
                double acc = 0.0;
                for (int n = 6; n >= 0; --n) {
                    acc += out[n];
                    tail[static_cast<std::size_t>(n)] = acc;
                }
            } else {
                double acc = 0.0;
                for (int n = 0; n < 7; ++n) {
                    acc += out[n];
                    tail[static_cast<std::size_t>(n)] = acc;
                }
            }
            if (!first)
                for (int n = 0; n < 7; ++n)
                    CHECK(tail[static_cast<std::size_t>(n)] >=
                          prev_tail[static_cast<std::size_t>(n)] - 1e-12);
            prev_tail = tail;
            first = false;
        }
    }
}

TEST_CASE("long contacts polarize completely") {
    RateTable t = RateTable::default_calibrated();
    auto up = evolve_master(LevelDistribution::polarized(), heating_phase(20000.0, t));
    CHECK(up[6] == doctest::Approx(1.0).epsilon(1e-9));
    auto down = evolve_master(LevelDistribution::inverted(), cooling_phase(20000.0, t));
    CHECK(down[0] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("collision count equals the mean level displacement") {
    SplitMix64 rng(11);
    for (int k = 0; k < 25; ++k) {
        auto table = helpers::random_table(rng);
        auto d = helpers::random_distribution(rng);
        double tau = 700.0 * rng.next_unit();
        ContactPhase ph = k % 2 == 0 ? heating_phase(tau, table) : cooling_phase(tau, table);
        auto res = evolve_master_counted(d, ph);
        double dn = mean_level(res.dist) - mean_level(d);
        if (ph.direction == Direction::cooling)
            dn = -dn;
        CHECK(res.collisions == doctest::Approx(dn).epsilon(1e-9));
        CHECK(res.collisions >= -1e-12);
    }
}

TEST_CASE("saturated strokes move exactly six quanta each") {
    RateTable t = RateTable::default_calibrated();
    auto up = evolve_master_counted(LevelDistribution::polarized(), heating_phase(2400.0, t));
    auto down = evolve_master_counted(LevelDistribution::inverted(), cooling_phase(2400.0, t));
    CHECK(up.collisions + down.collisions == doctest::Approx(12.0).epsilon(1e-7));
    CHECK(std::abs(up.collisions - 6.0) < 1e-6);
    CHECK(std::abs(down.collisions - 6.0) < 1e-6);
}

TEST_CASE("mean collision rate sums the active-link fluxes") {
    RateTable t = RateTable::uniform(0.02);
    auto uni = LevelDistribution::uniform();
    // Heating: level 6 is absorbing, so 6/7 of the mass is active.
    CHECK(mean_collision_rate(uni, heating_phase(1.0, t)) ==
          doctest::Approx(0.02 * 6.0 / 7.0).epsilon(1e-14));
    CHECK(mean_collision_rate(LevelDistribution::inverted(), heating_phase(1.0, t)) == 0.0);
    CHECK(mean_collision_rate(LevelDistribution::inverted(), cooling_phase(1.0, t)) ==
          doctest::Approx(0.02).epsilon(1e-14));
}

TEST_CASE("trajectories are monotone and respect the absorbing ends") {
    RateTable t = RateTable::default_calibrated();
    SplitMix64 rng(123);

    auto hot = heating_phase(400.0, t);
    for (int k = 0; k < 200; ++k) {
        auto rec = sample_trajectory(0, hot, rng);
        CHECK(rec.start_level == 0);
        CHECK(rec.final_level == rec.quanta());
        CHECK(rec.quanta() <= 6);
        CHECK(std::is_sorted(rec.jump_times_ms.begin(), rec.jump_times_ms.end()));
        for (double jt : rec.jump_times_ms) {
            CHECK(jt >= 0.0);
            CHECK(jt <= 400.0);
        }
    }

    // Absorbing starts never jump.
    auto rec = sample_trajectory(6, hot, rng);
    CHECK(rec.quanta() == 0);
    CHECK(rec.final_level == 6);
    auto rec2 = sample_trajectory(0, cooling_phase(500.0, t), rng);
    CHECK(rec2.quanta() == 0);

    CHECK_THROWS_AS(sample_trajectory(9, hot, rng), DomainError);
}

TEST_CASE("two-level ensemble fraction matches the exponential law") {
    // Start at level 5: jump probability within tau is 1 - exp(-rate tau).
    RateTable t = RateTable::uniform(0.01);
    double tau = 69.3147180559945; // rate * tau = ln(2): exactly 1/2
    auto ph = heating_phase(tau, t);
    auto st = ensemble_statistics(LevelDistribution::delta(5), ph, 100000, 99);
    CHECK(st.mean_quanta == doctest::Approx(0.5).epsilon(0.01));
    CHECK(st.final_fraction[6] == doctest::Approx(0.5).epsilon(0.01));
    CHECK(st.final_fraction[5] + st.final_fraction[6] == doctest::Approx(1.0));
}

TEST_CASE("ensemble statistics agree with the rate equations") {
    SplitMix64 seed_src(5150);
    for (int k = 0; k < 4; ++k) {
        auto table = helpers::random_table(seed_src);
        auto d = helpers::random_distribution(seed_src);
        double tau = 30.0 + 400.0 * seed_src.next_unit();
        ContactPhase ph = k % 2 == 0 ? heating_phase(tau, table) : cooling_phase(tau, table);

        const std::size_t n_traj = 20000;
        auto st = ensemble_statistics(d, ph, n_traj, 1000 + static_cast<std::uint64_t>(k));
        auto res = evolve_master_counted(d, ph);

        // Chi-square consistency of sampled final levels.
        std::array<double, 7> expected{};
        for (int n = 0; n < 7; ++n) expected[static_cast<std::size_t>(n)] = res.dist[n];
        double p = stats::chi_square_test(st.final_counts, expected, n_traj);
        CHECK(p > 0.001);

        // Mean quanta within 4 standard errors of the exact expectation.
        double se = std::sqrt(st.var_quanta / static_cast<double>(n_traj));
        CHECK(std::abs(st.mean_quanta - res.collisions) < 4.0 * se + 1e-12);
    }
}

TEST_CASE("ensembles are reproducible and seed-sensitive") {
    RateTable t = RateTable::default_calibrated();
    auto ph = heating_phase(250.0, t);
    auto a = ensemble_statistics(LevelDistribution::polarized(), ph, 5000, 7);
    auto b = ensemble_statistics(LevelDistribution::polarized(), ph, 5000, 7);
    CHECK(a.mean_quanta == b.mean_quanta);
    CHECK(a.final_counts == b.final_counts);
    auto c = ensemble_statistics(LevelDistribution::polarized(), ph, 5000, 8);
    CHECK(a.final_counts != c.final_counts);
}

TEST_CASE("frozen links freeze the chain") {
    RateTable t = RateTable::uniform(0.02);
    t.heating[3] = 0.0; // wall between 3 and 4
    auto out = evolve_master(LevelDistribution::polarized(), heating_phase(50000.0, t));
    CHECK(out[3] == doctest::Approx(1.0).epsilon(1e-8));
    for (int n = 4; n < 7; ++n) CHECK(out[n] == doctest::Approx(0.0).epsilon(1e-12));

    SplitMix64 rng(1);
    auto rec = sample_trajectory(0, heating_phase(50000.0, t), rng);
    CHECK(rec.final_level == 3);
}
