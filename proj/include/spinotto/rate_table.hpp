#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "spinotto/constants.hpp"

namespace spinotto {

// Spin-exchange collision rates (1/ms) for the two bath contacts.
//
// heating[i] is the rate of the upward jump i -> i+1 while coupled to the
// hot (inverted) bath; cooling[i] is the rate of the downward jump
// i+1 -> i while coupled to the cold (polarized) bath.  Both chains are
// one-directional: the opposite-direction process is fully suppressed by
// bath polarization.
struct RateTable {
    std::array<double, constants::max_quanta> heating{};
    std::array<double, constants::max_quanta> cooling{};

    static RateTable uniform(double rate_per_ms);

    // Default calibration: uniform rate such that the mean full 6-quantum
    // inversion time sum(1/rate) is 450 ms per stroke, i.e. 6/450 per ms.
    static RateTable default_calibrated();

    void validate() const; // throws DomainError on negative or non-finite rates

    double max_heating_rate() const;
    double max_cooling_rate() const;

    // FNV-1a over the 12 rate values, for output provenance metadata.
    std::uint64_t fnv1a_hash() const;
    std::string hash_hex() const;
};

} // namespace spinotto
