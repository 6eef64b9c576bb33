#pragma once

#include <array>

#include "spinotto/constants.hpp"

namespace spinotto {

// Probability distribution over the 7 Zeeman levels of the working medium.
// Levels are indexed by the quantum number n = 3 - m_F, so n = 0 is the
// energetic ground state (m_F = +3) and n = 6 the fully inverted one.
//
// Immutable after construction.  Factories validate normalization to 1e-9
// and apply the clamp policy: components in [-1e-12, 0) are clamped to zero
// (with renormalization); anything more negative is a domain error.
class LevelDistribution {
public:
    static constexpr int n_levels = constants::n_levels;

    static LevelDistribution delta(int level);
    static LevelDistribution polarized() { return delta(0); }
    static LevelDistribution inverted() { return delta(n_levels - 1); }
    static LevelDistribution uniform();
    static LevelDistribution from_probabilities(const std::array<double, n_levels>& p);

    double operator[](int level) const { return p_[static_cast<std::size_t>(level)]; }
    const std::array<double, n_levels>& probabilities() const { return p_; }

    double total() const;

    static constexpr int m_f(int level) { return 3 - level; }

private:
    explicit LevelDistribution(const std::array<double, n_levels>& p) : p_(p) {}
    std::array<double, n_levels> p_{};
};

// Mean level index <n> and its variance.
double mean_level(const LevelDistribution& dist);
double level_variance(const LevelDistribution& dist);

// Max-norm distance between two distributions.
double max_norm_distance(const LevelDistribution& a, const LevelDistribution& b);

} // namespace spinotto
