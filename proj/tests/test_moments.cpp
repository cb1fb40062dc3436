#include "ndasnr/moments.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace ndasnr;

TEST_CASE("sample moment examples") {
    const std::vector<double> a{1, -1, 1, -1};
    auto m = sample_moments(a);
    CHECK(m.m1 == 0.0);
    CHECK(m.m2 == 1.0);
    CHECK(m.m4 == 1.0);
    CHECK(m.abs_moment == 1.0);
    CHECK(m.n == 4);

    const std::vector<double> b{2, -2};
    m = sample_moments(b);
    CHECK(m.m1 == 0.0);
    CHECK(m.m2 == 4.0);
    CHECK(m.m4 == 16.0);
    CHECK(m.abs_moment == 2.0);

    const std::vector<double> z{0, 0, 0};
    m = sample_moments(z);
    CHECK(m.m1 == 0.0);
    CHECK(m.m2 == 0.0);
    CHECK(m.m4 == 0.0);
    CHECK(m.abs_moment == 0.0);
    CHECK(m.abs_ratio() == 0.0);

    CHECK_THROWS_AS(sample_moments(std::span<const double>{}), std::invalid_argument);
}

TEST_CASE("exact moment examples") {
    auto m = exact_moments(ChannelParams(1.0, 1e-9));
    CHECK(m.m1 == doctest::Approx(0.0));
    CHECK(m.m2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.m4 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.abs_moment == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(exact_moments(ChannelParams(1.0, 0.0)).abs_moment == 1.0);

    m = exact_moments(ChannelParams(0.0, 1.0));
    CHECK(m.m2 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(m.m4 == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(m.abs_moment == doctest::Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-15));

    m = exact_moments(ChannelParams(1.0, 0.5));
    CHECK(m.m2 == doctest::Approx(1.25).epsilon(1e-15));
    CHECK(m.m4 == doctest::Approx(2.6875).epsilon(1e-15));

    m = exact_moments(ChannelParams(1.0, 1.0, 0.8));
    CHECK(m.m1 == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("sample moments converge to exact moments") {
    const double mu = 0.9, sigma = 0.7;
    const auto y = oracle::bpsk_awgn(mu, sigma, 2'000'000, 11, 0.3);
    const auto s = sample_moments(y);
    const auto e = exact_moments(ChannelParams(mu, sigma, 0.3));
    CHECK(std::abs(s.m1 - e.m1) < 5e-3);
    CHECK(std::abs(s.m2 - e.m2) / e.m2 < 5e-3);
    CHECK(std::abs(s.m4 - e.m4) / e.m4 < 1e-2);
    CHECK(std::abs(s.abs_moment - e.abs_moment) / e.abs_moment < 5e-3);
}

TEST_CASE("even moments ignore the prior and the signs") {
    const auto a = exact_moments(ChannelParams(0.8, 0.6, 0.5));
    const auto b = exact_moments(ChannelParams(0.8, 0.6, 0.05));
    CHECK(a.m2 == b.m2);
    CHECK(a.m4 == b.m4);
    CHECK(a.abs_moment == b.abs_moment);

    std::mt19937_64 rng(3);
    auto y = oracle::bpsk_awgn(1.0, 1.0, 1000, 5);
    const auto before = sample_moments(y);
    std::bernoulli_distribution flip(0.5);
    for (auto& v : y) {
        if (flip(rng)) {
            v = -v;
        }
    }
    const auto after = sample_moments(y);
    CHECK(after.m2 == doctest::Approx(before.m2).epsilon(1e-15));
    CHECK(after.m4 == doctest::Approx(before.m4).epsilon(1e-15));
    CHECK(after.abs_moment == doctest::Approx(before.abs_moment).epsilon(1e-15));
}

TEST_CASE("compensated sum recovers cancelled terms") {
    CompensatedSum s;
    s.add(1e16);
    s.add(1.0);
    s.add(-1e16);
    CHECK(s.value() == 1.0);
}
