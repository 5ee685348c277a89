#include "sburgers/error.hpp"
#include "sburgers/noise.hpp"
#include "sburgers/parallel.hpp"
#include "sburgers/philox.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>

using namespace sburgers;

TEST_SUITE("noise") {

TEST_CASE("Philox4x32-10 known-answer vectors")
{
    using P = Philox4x32;
    CHECK(P::block({0, 0, 0, 0}, {0, 0}) == P::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(P::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          P::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(P::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          P::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("split seeds are distinct")
{
    CHECK(split_seed(1, 0) != split_seed(1, 1));
    CHECK(split_seed(1, 0) != split_seed(2, 0));
    CHECK(split_seed(7, 3) == split_seed(7, 3));
}

TEST_CASE("increments are deterministic in (seed, k, j)")
{
    const NoisePath a(42, 1e-3), b(42, 1e-3), c(43, 1e-3);
    for (std::int64_t j : {-5, 0, 1, 1000000}) {
        CHECK(a.increment(3, j) == b.increment(3, j));
        CHECK(a.increment(3, j) != c.increment(3, j));
        CHECK(a.increment(3, j) != a.increment(4, j));
    }
    CHECK(a.increment(1, 0) == doctest::Approx(std::sqrt(1e-3) * a.standard_normal(1, 0)).epsilon(1e-15));
}

TEST_CASE("sample mean and variance over 1e6 slots")
{
    const double h = 1e-3;
    const NoisePath path(2024, h);
    std::vector<double> xs(1000000);
    for (std::size_t j = 0; j < xs.size(); ++j) xs[j] = path.increment(1, std::int64_t(j));
    const SampleStats s = sample_stats(xs);
    CHECK(std::abs(s.mean) <= 4.0 * std::sqrt(h) / 1e3);
    // var of the sample variance of N(0,h) is 2h^2/(N-1)
    CHECK(std::abs(s.variance - h) <= 4.0 * h * std::sqrt(2.0 / 1e6));
}

TEST_CASE("Wiener shift reindexes the slots")
{
    const NoisePath path(9, 0.01);
    for (std::int64_t r : {-7, 0, 3, 250}) {
        const NoisePath shifted = path.shifted(r);
        for (std::int64_t j : {-2, 0, 5, 99}) CHECK(shifted.increment(2, j) == path.increment(2, j + r));
    }
}

TEST_CASE("slot alignment")
{
    const NoisePath path(1, 1e-3);
    CHECK(path.slot_of(0.25) == 250);
    CHECK(path.slot_of(-16.0) == -16000);
    CHECK_THROWS_AS(path.slot_of(0.0005), AlignmentError);
}

TEST_CASE("noise spec")
{
    const NoiseSpec s({1.0, 0.5, 0.25});
    CHECK(s.epsilon0() == doctest::Approx(1.3125));
    CHECK(s.resized(5).epsilon0() == doctest::Approx(1.3125));
    CHECK(s.resized(1).epsilon0() == doctest::Approx(1.0));
    CHECK(s.scaled(2.0).epsilon0() == doctest::Approx(4 * 1.3125));
    CHECK(s.sigma(10) == 0.0);
    CHECK_THROWS_AS(NoiseSpec({1.0, -0.1}), ConfigError);
    CHECK_THROWS_AS(NoiseSpec::from_profile(NoiseProfile::power_decay(1.0, 0.5), 8), ConfigError);

    const NoiseProfile p = NoiseProfile::power_decay(1.0, 1.0);
    const NoiseSpec s64 = NoiseSpec::from_profile(p, 64);
    CHECK(s64.sigma(4) == doctest::Approx(0.25));
    CHECK(s64.epsilon0() + p.dropped_tail(64) == doctest::Approx(kPi * kPi / 6.0).epsilon(1e-12));
    const NoiseSpec c = NoiseSpec::from_profile(NoiseProfile::constant(0.3, 2), 6);
    CHECK(c.epsilon0() == doctest::Approx(0.18));
}

TEST_CASE("OU step with zero noise stays at zero")
{
    const NoisePath path(5, 1e-2);
    OUState st{SpectralField(4), 0.0};
    for (int i = 0; i < 100; ++i) st = ou_step(st, path, NoiseSpec::zero(4), 1.0, 1e-2);
    CHECK(st.w.l2_norm() == 0.0);
    CHECK(st.t == doctest::Approx(1.0));
}

TEST_CASE("OU step rejects a mismatched step")
{
    const NoisePath path(5, 1e-2);
    OUState st{SpectralField(2), 0.0};
    CHECK_THROWS_AS(ou_step(st, path, NoiseSpec({1.0, 1.0}), 1.0, 2e-2), ConfigError);
}

TEST_CASE("OU one-step conditional mean over 1e4 branches")
{
    const double h = 0.01, nu = 1.0, w0 = 0.3;
    const NoiseSpec spec({1.0});
    std::vector<double> next(10000);
    for (std::size_t i = 0; i < next.size(); ++i) {
        const NoisePath path(split_seed(77, i), h);
        next[i] = ou_step(OUState{SpectralField(std::vector<double>{w0}), 0.0}, path, spec, nu, h).w[0];
    }
    const SampleStats s = sample_stats(next);
    const double mu = nu * kLambda1;
    CHECK(std::abs(s.mean - std::exp(-mu * h) * w0) <= 4.0 * s.standard_error);
    CHECK(s.variance == doctest::Approx((1 - std::exp(-2 * mu * h)) / (2 * mu)).epsilon(0.05));
}

TEST_CASE("convolution windows reuse increments on their overlap")
{
    // W(t0', t) = T(t - t0) W(t0', t0) + W(t0, t) for t0' < t0 < t.
    const NoisePath path(3, 1e-3);
    const NoiseSpec spec = NoiseSpec::from_profile(NoiseProfile::power_decay(1.0, 1.0), 8);
    const auto long_w = stochastic_convolution_window(path, spec, 0.5, -0.3, 0.2);
    const auto short_w = stochastic_convolution_window(path, spec, 0.5, 0.0, 0.2);
    REQUIRE(long_w.size() == 501);
    REQUIRE(short_w.size() == 201);
    const SpectralField at_t0 = long_w[300].w;
    const SpectralField recombined = semigroup_apply(at_t0, 0.2, 0.5) + short_w.back().w;
    CHECK(distance(recombined, long_w.back().w) <= 1e-14);
    CHECK(short_w.front().w.l2_norm() == 0.0);
    CHECK_THROWS_AS(stochastic_convolution_window(path, spec, 0.5, 0.2, 0.2), DomainError);
}

TEST_CASE("Ito energy identity along a path")
{
    const double h = 1e-5, nu = 1.0;
    const NoisePath path(11, h);
    const NoiseSpec spec({1.0, 0.5});
    const auto traj = stochastic_convolution_window(path, spec, nu, 0.0, 0.5);
    const OUEnergyReport r = ou_energy_identity_check(traj, path, spec, nu);
    CHECK(r.t == doctest::Approx(0.5));
    CHECK(r.rel_discrepancy < 1e-2);
}

TEST_CASE("expected energy identity: E|W|^2 + 2 nu E int |W_x|^2 = t eps0")
{
    const double h = 1e-3, nu = 1.0, t = 0.5;
    const NoiseSpec spec({1.0, 0.5, 0.25});
    std::vector<double> lhs(400);
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const NoisePath path(split_seed(5, i), h);
        const auto r = ou_energy_identity_check(stochastic_convolution_window(path, spec, nu, 0.0, t), path, spec, nu);
        lhs[i] = r.lhs;
    }
    const SampleStats s = sample_stats(lhs);
    CHECK(std::abs(s.mean - t * spec.epsilon0()) <= 4.0 * s.standard_error + 1e-3);
}

}
