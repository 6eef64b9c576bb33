#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "spinotto/errors.hpp"
#include "spinotto/rng.hpp"
#include "spinotto/sweep.hpp"

namespace spinotto {

void SweepSpec::validate() const {
    base.validate();
    if (explicit_pairs.empty()) {
        if (!(tau_min_ms > 0.0) || !(tau_max_ms >= tau_min_ms))
            throw DomainError("sweep needs 0 < tau_min <= tau_max");
        if (steps < 1)
            throw DomainError("sweep needs at least one step");
    } else {
        for (const auto& [h, c] : explicit_pairs)
            if (!(h >= 0.0) || !(c >= 0.0))
                throw DomainError("explicit stroke times must be non-negative");
    }
    if (max_workers < 0)
        throw DomainError("worker count must be non-negative");
}

std::pair<double, double> pair_strokes_for_closure(const CycleSpec& base, double budget_ms,
                                                   double count_tol) {
    if (!(budget_ms >= 0.0))
        throw DomainError("contact budget must be non-negative");
    if (budget_ms == 0.0)
        return {0.0, 0.0};

    // Expected collisions of each stroke probed from its polarized anchor:
    // the hot stroke filling up from n = 0, the cold stroke draining from
    // n = 6.  This mirrors how the strokes are characterized independently.
    auto n_hot = [&base](double tau) {
        ContactPhase ph{Direction::heating, tau, base.field.b1_mG, base.rates};
        return evolve_master_counted(LevelDistribution::polarized(), ph).collisions;
    };
    auto n_cold = [&base](double tau) {
        ContactPhase ph{Direction::cooling, tau, base.field.b2_mG, base.rates};
        return evolve_master_counted(LevelDistribution::inverted(), ph).collisions;
    };

    // mismatch(f) = N_hot(f T) - N_cold((1-f) T) rises monotonically with f,
    // negative at f = 0 and positive at f = 1, so bisection cannot miss.
    auto mismatch = [&](double f) { return n_hot(f * budget_ms) - n_cold((1.0 - f) * budget_ms); };

    double m_half = mismatch(0.5);
    if (std::abs(m_half) <= count_tol)
        return {0.5 * budget_ms, 0.5 * budget_ms}; // symmetric tables land here

    double lo = 0.0, hi = 1.0;
    double m = m_half;
    double f = 0.5;
    if (m > 0.0)
        hi = 0.5;
    else
        lo = 0.5;
    for (int it = 0; it < 200; ++it) {
        f = 0.5 * (lo + hi);
        m = mismatch(f);
        if (std::abs(m) <= count_tol)
            return {f * budget_ms, (1.0 - f) * budget_ms};
        if (m > 0.0)
            hi = f;
        else
            lo = f;
    }
    std::ostringstream os;
    os << "stroke pairing did not close: budget " << budget_ms << " ms, last split " << f
       << ", count mismatch " << m << " vs tol " << count_tol;
    throw SimulationError(os.str());
}

namespace {

McCheck mc_cross_check(const CycleRecord& rec, const CycleSpec& spec, std::size_t n_traj,
                       std::uint64_t point_seed) {
    McCheck mc;
    mc.n_traj = n_traj;

    ContactPhase hot{Direction::heating, spec.tau_h_ms, spec.field.b1_mG, spec.rates};
    ContactPhase cold{Direction::cooling, spec.tau_c_ms, spec.field.b2_mG, spec.rates};

    EnsembleStatistics h =
        ensemble_statistics(rec.dist_a, hot, n_traj, SplitMix64::derive_stream(point_seed, 1));
    EnsembleStatistics c =
        ensemble_statistics(rec.dist_c, cold, n_traj, SplitMix64::derive_stream(point_seed, 2));

    mc.mean_quanta_h = h.mean_quanta;
    mc.mean_quanta_c = c.mean_quanta;
    auto z_of = [n_traj](const EnsembleStatistics& st, double exact) {
        double se = std::sqrt(std::max(st.var_quanta, 1e-300) / static_cast<double>(n_traj));
        return (st.mean_quanta - exact) / se;
    };
    mc.z_heating = z_of(h, rec.n_heating);
    mc.z_cooling = z_of(c, rec.n_cooling);
    mc.consistent = std::abs(mc.z_heating) <= 4.0 && std::abs(mc.z_cooling) <= 4.0;
    return mc;
}

} // namespace

SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate();

    std::vector<std::pair<double, double>> pairs;
    if (!spec.explicit_pairs.empty()) {
        pairs = spec.explicit_pairs;
        std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) {
            return x.first + x.second < y.first + y.second;
        });
    } else {
        for (int i = 0; i < spec.steps; ++i) {
            double tau = spec.steps == 1 ? spec.tau_min_ms
                                         : spec.tau_min_ms + (spec.tau_max_ms - spec.tau_min_ms) *
                                                                 static_cast<double>(i) /
                                                                 (spec.steps - 1);
            if (spec.pairing == PairingRule::even) {
                pairs.emplace_back(tau, tau);
            } else {
                pairs.push_back(pair_strokes_for_closure(spec.base, 2.0 * tau));
            }
        }
    }

    SweepResult result;
    result.rows.resize(pairs.size());
    result.metadata.seed = spec.seed;
    result.metadata.rng_algorithm = SplitMix64::algorithm;
    result.metadata.rate_table_hash = spec.base.rates.hash_hex();
    result.metadata.constants_version = constants::constants_version;
    result.metadata.pairing = spec.pairing == PairingRule::even ? "even" : "closure";
    result.metadata.n_traj = spec.n_traj;

    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = spec.max_workers > 0 ? static_cast<std::size_t>(spec.max_workers)
                                               : std::max(1u, hw);
    workers = std::min(workers, pairs.size());

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= pairs.size())
                return;
            SweepRow& row = result.rows[i];
            CycleSpec point = spec.base;
            point.tau_h_ms = pairs[i].first;
            point.tau_c_ms = pairs[i].second;
            try {
                LimitCycleResult lim = find_limit_cycle(point);
                row.record = lim.record;
                row.iterations = lim.iterations;
                if (spec.n_traj > 0)
                    row.mc = mc_cross_check(lim.record, point, spec.n_traj,
                                            SplitMix64::derive_stream(spec.seed, i));
            } catch (const Error& e) {
                row.record.tau_h_ms = point.tau_h_ms;
                row.record.tau_c_ms = point.tau_c_ms;
                row.record.tau_cycle_ms = point.cycle_time_ms();
                row.error = e.what();
            }
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    // Argmax of power over valid rows.
    for (std::size_t i = 0; i < result.rows.size(); ++i) {
        const SweepRow& row = result.rows[i];
        if (row.error)
            continue;
        if (!result.argmax_power || row.record.power > result.rows[*result.argmax_power].record.power)
            result.argmax_power = i;
    }

    // First F = 1 crossing from above, linearly interpolated in tau_cycle.
    const SweepRow* prev = nullptr;
    for (const SweepRow& row : result.rows) {
        if (row.error || !row.record.fano)
            continue;
        if (prev && *prev->record.fano >= 1.0 && *row.record.fano < 1.0) {
            double f0 = *prev->record.fano, f1 = *row.record.fano;
            double t0 = prev->record.tau_cycle_ms, t1 = row.record.tau_cycle_ms;
            result.fano_crossing_ms = t0 + (1.0 - f0) * (t1 - t0) / (f1 - f0);
            break;
        }
        prev = &row;
    }

    return result;
}

double eta_spread(const SweepResult& result) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const SweepRow& row : result.rows) {
        if (row.error || !row.record.closed || !row.record.eta)
            continue;
        lo = std::min(lo, *row.record.eta);
        hi = std::max(hi, *row.record.eta);
    }
    return hi >= lo ? hi - lo : 0.0;
}

bool sigma_p_decreasing_past(const SweepResult& result, double n_spin_threshold) {
    const SweepRow* prev = nullptr;
    for (const SweepRow& row : result.rows) {
        if (row.error)
            continue;
        if (row.record.n_spin < n_spin_threshold)
            continue;
        if (prev && row.record.sigma_p_sq >= prev->record.sigma_p_sq)
            return false;
        prev = &row;
    }
    return true;
}

} // namespace spinotto
