#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinotto/errors.hpp"
#include "spinotto/kinetics.hpp"

namespace spinotto {

namespace {

constexpr int n = constants::n_levels;

// State vector: 7 level probabilities plus the running collision integral.
struct State {
    std::array<double, n + 1> v{};
};

// Time derivative of the one-directional chain.  Heating: n -> n+1 at
// heating[n]; cooling: n -> n-1 at cooling[n-1].  The extra component
// accumulates sum_n p_n Gamma_n (the mean collision rate).
void derivative(const State& s, const ContactPhase& phase, State& out) {
    const auto& p = s.v;
    auto& d = out.v;
    d.fill(0.0);
    if (phase.direction == Direction::heating) {
        const auto& g = phase.rates.heating;
        for (int i = 0; i < n - 1; ++i) {
            double flux = g[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)];
            d[static_cast<std::size_t>(i)] -= flux;
            d[static_cast<std::size_t>(i) + 1] += flux;
            d[n] += flux;
        }
    } else {
        const auto& g = phase.rates.cooling;
        for (int i = n - 1; i > 0; --i) {
            double flux = g[static_cast<std::size_t>(i) - 1] * p[static_cast<std::size_t>(i)];
            d[static_cast<std::size_t>(i)] -= flux;
            d[static_cast<std::size_t>(i) - 1] += flux;
            d[n] += flux;
        }
    }
}

double active_max_rate(const ContactPhase& phase) {
    return phase.direction == Direction::heating ? phase.rates.max_heating_rate()
                                                 : phase.rates.max_cooling_rate();
}

EvolveResult integrate(const LevelDistribution& initial, const ContactPhase& phase) {
    if (!(phase.duration_ms >= 0.0))
        throw DomainError("contact duration must be non-negative");
    phase.rates.validate();
    if (phase.duration_ms == 0.0)
        return EvolveResult{initial, 0.0};

    double gmax = active_max_rate(phase);
    // Step small enough that RK4 tracks the exact exponential to ~1e-10 per
    // transition: h <= 0.01 / Gamma_max, and never fewer than 100 steps.
    long steps = 100;
    if (gmax > 0.0) {
        double needed = std::ceil(phase.duration_ms * gmax / 0.01);
        steps = std::max(steps, static_cast<long>(needed));
    }
    double h = phase.duration_ms / static_cast<double>(steps);

    State s{};
    for (int i = 0; i < n; ++i) s.v[static_cast<std::size_t>(i)] = initial[i];
    s.v[n] = 0.0;

    State k1, k2, k3, k4, tmp;
    for (long step = 0; step < steps; ++step) {
        derivative(s, phase, k1);
        for (int i = 0; i <= n; ++i)
            tmp.v[static_cast<std::size_t>(i)] =
                s.v[static_cast<std::size_t>(i)] + 0.5 * h * k1.v[static_cast<std::size_t>(i)];
        derivative(tmp, phase, k2);
        for (int i = 0; i <= n; ++i)
            tmp.v[static_cast<std::size_t>(i)] =
                s.v[static_cast<std::size_t>(i)] + 0.5 * h * k2.v[static_cast<std::size_t>(i)];
        derivative(tmp, phase, k3);
        for (int i = 0; i <= n; ++i)
            tmp.v[static_cast<std::size_t>(i)] =
                s.v[static_cast<std::size_t>(i)] + h * k3.v[static_cast<std::size_t>(i)];
        derivative(tmp, phase, k4);
        for (int i = 0; i <= n; ++i)
            s.v[static_cast<std::size_t>(i)] +=
                h / 6.0 *
                (k1.v[static_cast<std::size_t>(i)] + 2.0 * k2.v[static_cast<std::size_t>(i)] +
                 2.0 * k3.v[static_cast<std::size_t>(i)] + k4.v[static_cast<std::size_t>(i)]);
    }

    std::array<double, n> p{};
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = s.v[static_cast<std::size_t>(i)];
    try {
        LevelDistribution dist = LevelDistribution::from_probabilities(p);
        return EvolveResult{dist, s.v[n]};
    } catch (const DomainError& e) {
        std::ostringstream os;
        os << "rate-equation step failed after " << steps << " steps of h = " << h
           << " ms: " << e.what();
        throw SimulationError(os.str());
    }
}

} // namespace

LevelDistribution evolve_master(const LevelDistribution& initial, const ContactPhase& phase) {
    return integrate(initial, phase).dist;
}

EvolveResult evolve_master_counted(const LevelDistribution& initial, const ContactPhase& phase) {
    return integrate(initial, phase);
}

double mean_collision_rate(const LevelDistribution& dist, const ContactPhase& phase) {
    double r = 0.0;
    if (phase.direction == Direction::heating) {
        for (int i = 0; i < n - 1; ++i)
            r += phase.rates.heating[static_cast<std::size_t>(i)] * dist[i];
    } else {
        for (int i = 1; i < n; ++i)
            r += phase.rates.cooling[static_cast<std::size_t>(i) - 1] * dist[i];
    }
    return r;
}

TrajectoryRecord sample_trajectory(int start_level, const ContactPhase& phase, SplitMix64& rng) {
    if (start_level < 0 || start_level >= n)
        throw DomainError("start level out of range");
    if (!(phase.duration_ms >= 0.0))
        throw DomainError("contact duration must be non-negative");

    TrajectoryRecord rec;
    rec.start_level = start_level;
    int level = start_level;
    double t = 0.0;
    for (;;) {
        double rate;
        if (phase.direction == Direction::heating) {
            if (level >= n - 1) break;
            rate = phase.rates.heating[static_cast<std::size_t>(level)];
        } else {
            if (level <= 0) break;
            rate = phase.rates.cooling[static_cast<std::size_t>(level) - 1];
        }
        if (rate <= 0.0) break; // frozen link
        t += rng.next_exponential(rate);
        if (t > phase.duration_ms) break;
        level += phase.direction == Direction::heating ? 1 : -1;
        rec.jump_times_ms.push_back(t);
    }
    rec.final_level = level;
    return rec;
}

EnsembleStatistics ensemble_statistics(const LevelDistribution& initial, const ContactPhase& phase,
                                       std::size_t n_traj, std::uint64_t seed) {
    if (n_traj == 0)
        throw DomainError("ensemble needs at least one trajectory");

    EnsembleStatistics st;
    st.n_traj = n_traj;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t j = 0; j < n_traj; ++j) {
        SplitMix64 rng(SplitMix64::derive_stream(seed, j));
        // Sample the start level from the initial distribution.
        double u = rng.next_unit();
        int start = n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += initial[i];
            if (u < acc) {
                start = i;
                break;
            }
        }
        TrajectoryRecord rec = sample_trajectory(start, phase, rng);
        st.final_counts[static_cast<std::size_t>(rec.final_level)] += 1;
        double q = rec.quanta();
        sum += q;
        sum_sq += q * q;
    }
    double N = static_cast<double>(n_traj);
    st.mean_quanta = sum / N;
    st.var_quanta = n_traj > 1 ? (sum_sq - sum * sum / N) / (N - 1.0) : 0.0;
    for (int i = 0; i < n; ++i)
        st.final_fraction[static_cast<std::size_t>(i)] =
            static_cast<double>(st.final_counts[static_cast<std::size_t>(i)]) / N;
    return st;
}

} // namespace spinotto
