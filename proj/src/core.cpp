#include <cmath>
#include <cstring>
#include <sstream>

#include "spinotto/coupling.hpp"
#include "spinotto/cycle_spec.hpp"
#include "spinotto/energy.hpp"
#include "spinotto/errors.hpp"
#include "spinotto/level_distribution.hpp"
#include "spinotto/rate_table.hpp"

namespace spinotto {

namespace {

constexpr double clamp_tol = 1e-12; // negatives no worse than this are rounding noise
constexpr double norm_tol = 1e-9;

} // namespace

CouplingConstants CouplingConstants::from_g_factors(double g_medium, double g_bath) {
    if (!(g_medium > 0.0) || !(g_bath > 0.0))
        throw DomainError("coupling g-factors must be positive");
    return CouplingConstants{g_medium * constants::mu_bohr_nK_per_mG,
                             g_bath * constants::mu_bohr_nK_per_mG};
}

CouplingConstants CouplingConstants::standard() {
    return from_g_factors(0.25, 0.5);
}

LevelDistribution LevelDistribution::delta(int level) {
    if (level < 0 || level >= n_levels)
        throw DomainError("level index out of range");
    std::array<double, n_levels> p{};
    p[static_cast<std::size_t>(level)] = 1.0;
    return LevelDistribution(p);
}

LevelDistribution LevelDistribution::uniform() {
    std::array<double, n_levels> p{};
    p.fill(1.0 / n_levels);
    return LevelDistribution(p);
}

LevelDistribution LevelDistribution::from_probabilities(const std::array<double, n_levels>& p_in) {
    std::array<double, n_levels> p = p_in;
    bool clamped = false;
    for (auto& v : p) {
        if (!std::isfinite(v))
            throw DomainError("level probability is not finite");
        if (v < 0.0) {
            if (v < -clamp_tol) {
                std::ostringstream os;
                os << "level probability " << v << " below clamp tolerance -" << clamp_tol;
                throw DomainError(os.str());
            }
            v = 0.0;
            clamped = true;
        }
    }
    double total = 0.0;
    for (double v : p) total += v;
    if (std::abs(total - 1.0) > norm_tol) {
        std::ostringstream os;
        os << "level probabilities sum to " << total << ", outside 1 +/- " << norm_tol;
        throw DomainError(os.str());
    }
    if (clamped) {
        for (auto& v : p) v /= total;
    }
    return LevelDistribution(p);
}

double LevelDistribution::total() const {
    double t = 0.0;
    for (double v : p_) t += v;
    return t;
}

double mean_level(const LevelDistribution& dist) {
    double m = 0.0;
    for (int n = 0; n < LevelDistribution::n_levels; ++n) m += n * dist[n];
    return m;
}

double level_variance(const LevelDistribution& dist) {
    double m = mean_level(dist);
    double s = 0.0;
    for (int n = 0; n < LevelDistribution::n_levels; ++n) s += (n - m) * (n - m) * dist[n];
    return s;
}

double max_norm_distance(const LevelDistribution& a, const LevelDistribution& b) {
    double d = 0.0;
    for (int n = 0; n < LevelDistribution::n_levels; ++n)
        d = std::max(d, std::abs(a[n] - b[n]));
    return d;
}

RateTable RateTable::uniform(double rate_per_ms) {
    RateTable t;
    t.heating.fill(rate_per_ms);
    t.cooling.fill(rate_per_ms);
    t.validate();
    return t;
}

RateTable RateTable::default_calibrated() {
    return uniform(6.0 / 450.0);
}

void RateTable::validate() const {
    for (double r : heating)
        if (!std::isfinite(r) || r < 0.0)
            throw DomainError("heating rate must be finite and non-negative");
    for (double r : cooling)
        if (!std::isfinite(r) || r < 0.0)
            throw DomainError("cooling rate must be finite and non-negative");
}

double RateTable::max_heating_rate() const {
    double m = 0.0;
    for (double r : heating) m = std::max(m, r);
    return m;
}

double RateTable::max_cooling_rate() const {
    double m = 0.0;
    for (double r : cooling) m = std::max(m, r);
    return m;
}

std::uint64_t RateTable::fnv1a_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffull;
            h *= 0x100000001b3ull;
        }
    };
    for (double r : heating) mix(r);
    for (double r : cooling) mix(r);
    return h;
}

std::string RateTable::hash_hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a_hash()));
    return std::string(buf);
}

void FieldSchedule::validate() const {
    if (!(b1_mG > b2_mG) || !(b2_mG > 0.0))
        throw DomainError("field schedule requires b1 > b2 > 0");
    if (!(ramp_ms >= 0.0))
        throw DomainError("ramp duration must be non-negative");
}

void CycleSpec::validate() const {
    if (!(tau_h_ms >= 0.0) || !(tau_c_ms >= 0.0))
        throw DomainError("contact durations must be non-negative");
    if (!(bath_swap_ms >= 0.0))
        throw DomainError("bath swap time must be non-negative");
    field.validate();
    rates.validate();
    if (!(coupling.lambda > 0.0) || !(coupling.kappa > 0.0))
        throw DomainError("coupling constants must be positive");
}

double zeeman_energy(int level, double b_mG, const CouplingConstants& c) {
    if (level < 0 || level >= constants::n_levels)
        throw DomainError("level index out of range");
    if (!(b_mG > 0.0))
        throw DomainError("field must be positive");
    return level * c.lambda * b_mG;
}

double mean_energy(const LevelDistribution& dist, double b_mG, const CouplingConstants& c) {
    if (!(b_mG > 0.0))
        throw DomainError("field must be positive");
    return mean_level(dist) * c.lambda * b_mG;
}

double energy_variance(const LevelDistribution& dist, double b_mG, const CouplingConstants& c) {
    if (!(b_mG > 0.0))
        throw DomainError("field must be positive");
    double s = c.lambda * b_mG;
    return level_variance(dist) * s * s;
}

} // namespace spinotto
