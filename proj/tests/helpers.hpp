#pragma once

#include "sburgers/noise.hpp"
#include "sburgers/spectral.hpp"

#include <cmath>
#include <cstdint>

namespace test {

/// Random field with N(0,1) / k^decay coefficients from the counter-based stream.
inline sburgers::SpectralField random_field(std::size_t n, std::uint64_t seed, double decay = 1.0)
{
    sburgers::SpectralField u(n);
    for (std::size_t k = 1; k <= n; ++k) {
        u[k - 1] = sburgers::philox_standard_normal(seed, 0x7E57ULL, k) / std::pow(double(k), decay);
    }
    return u;
}

inline sburgers::SpectralField unit_random_field(std::size_t n, std::uint64_t seed)
{
    auto u = random_field(n, seed);
    u *= 1.0 / u.l2_norm();
    return u;
}

} // namespace test
