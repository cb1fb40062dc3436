#include "ndasnr/estimators.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace ndasnr;

namespace {

MomentSummary moments_of(double m2, double m4, double a, double m1 = 0.0) {
    MomentSummary m;
    m.m1 = m1;
    m.m2 = m2;
    m.m4 = m4;
    m.abs_moment = a;
    m.n = 64;
    return m;
}

}  // namespace

TEST_CASE("method names") {
    for (auto m : kAllMethods) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK_FALSE(parse_method("bogus").has_value());
}

TEST_CASE("MM on exact moments is exact") {
    const auto e = estimate_from_moments(exact_moments(ChannelParams(1.0, 0.5)), Method::mm);
    CHECK(e.gamma_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(e.clamped);

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.05, 3.0);
    for (int i = 0; i < 20; ++i) {
        const ChannelParams p(u(rng), u(rng));
        const auto est = estimate_from_moments(exact_moments(p), Method::mm);
        CHECK(std::abs(est.gamma_hat - p.gamma()) <= 1e-10 * std::max(1.0, p.gamma()));
    }
}

TEST_CASE("estimator examples on synthetic moments") {
    auto mm = estimate_from_moments(moments_of(1.0, 3.5, 0.8), Method::mm);
    CHECK(mm.gamma_hat == 0.0);
    CHECK(mm.clamped);

    auto cm = estimate_from_moments(moments_of(1.0, 1.5, std::sqrt(0.8)), Method::cm);
    CHECK(cm.gamma_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(cm.clamped);

    auto am = estimate_from_moments(moments_of(1.0, 3.0, std::sqrt(0.6)), Method::am);
    CHECK(am.gamma_hat == 0.0);
    CHECK(am.clamped);

    CHECK_THROWS_AS(estimate_from_moments(moments_of(1.0, 1.0, 1.0), Method::ml), std::invalid_argument);
}

TEST_CASE("constant magnitude input caps every method") {
    for (double c : {0.5, 1.0, 3.0}) {
        const std::vector<double> y{c, c, -c, -c};
        const auto mom = sample_moments(y);
        const auto ml = estimate_snr(y, mom, Method::ml);
        CHECK(ml.gamma_hat == kGammaCap);
        CHECK(ml.clamped);
        const auto traj = ml_trajectory(y, mom);
        REQUIRE(traj.mu_hats.size() >= 2);
        CHECK(traj.mu_hats.back() <= c);
        CHECK(traj.mu_hats.back() == doctest::Approx(c).epsilon(1e-8));
        for (auto m : {Method::cm, Method::mm, Method::am}) {
            const auto e = estimate_snr(y, mom, m);
            CHECK(e.gamma_hat == kGammaCap);
            CHECK(e.clamped);
        }
    }
}

TEST_CASE("all-zero block") {
    const std::vector<double> y{0.0, 0.0, 0.0};
    const auto mom = sample_moments(y);
    for (auto m : {Method::cm, Method::ml, Method::mm, Method::am}) {
        const auto e = estimate_snr(y, mom, m);
        CHECK(e.gamma_hat == 0.0);
    }
    CHECK_THROWS_AS(estimate_snr(y, mom, Method::p2), EstimatorError);
}

TEST_CASE("ml starts from the absolute moment") {
    const auto y = oracle::bpsk_awgn(1.0, 0.8, 64, 21);
    const auto mom = sample_moments(y);
    EstimatorOptions opts;
    const auto traj = ml_trajectory(y, mom, opts);
    CHECK(traj.mu_hats.front() == mom.abs_moment);
    opts.max_iter = 0;
    const auto ml0 = estimate_snr(y, mom, Method::ml, opts);
    const auto cm = estimate_snr(y, mom, Method::cm);
    CHECK(ml0.gamma_hat == cm.gamma_hat);
}

TEST_CASE("scale invariance") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> logc(-3.0, 3.0);
    for (double gdb : {-4.0, 2.0, 12.0}) {
        const double g = std::pow(10.0, gdb / 10.0);
        const double sigma = 1.0;
        const auto y = oracle::bpsk_awgn(std::sqrt(2.0 * g), sigma, 64, 1234);
        const auto base_mom = sample_moments(y);
        for (int i = 0; i < 20; ++i) {
            const double c = std::pow(10.0, logc(rng));
            std::vector<double> z(y);
            for (auto& v : z) {
                v *= c;
            }
            const auto mom = sample_moments(z);
            for (auto m : kAllMethods) {
                const double a = estimate_snr(y, base_mom, m).gamma_hat;
                const double b = estimate_snr(z, mom, m).gamma_hat;
                CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
            }
        }
        std::vector<double> z(y);
        for (auto& v : z) {
            v *= 8.0;
        }
        const auto mom = sample_moments(z);
        for (auto m : kAllMethods) {
            CHECK(estimate_snr(y, base_mom, m).gamma_hat == estimate_snr(z, mom, m).gamma_hat);
        }
    }
}

TEST_CASE("sign invariance") {
    std::mt19937_64 rng(78);
    std::bernoulli_distribution flip(0.5);
    const auto y = oracle::bpsk_awgn(1.2, 1.0, 64, 4321);
    const auto base_mom = sample_moments(y);
    for (int i = 0; i < 20; ++i) {
        std::vector<double> z(y);
        for (auto& v : z) {
            if (flip(rng)) {
                v = -v;
            }
        }
        const auto mom = sample_moments(z);
        for (auto m : kAllMethods) {
            CHECK(estimate_snr(y, base_mom, m).gamma_hat == estimate_snr(z, mom, m).gamma_hat);
        }
    }
}

TEST_CASE("log-likelihood gradient matches finite differences") {
    const auto y = oracle::bpsk_awgn(0.8, 1.1, 100, 55);
    const double mu = 0.8, sigma = 1.1, h = 1e-5;
    const auto ll = log_likelihood(y, mu, sigma);
    const double gmu = oracle::central_difference([&](double m) { return log_likelihood(y, m, sigma).value; }, mu, h);
    const double gsig = oracle::central_difference([&](double s) { return log_likelihood(y, mu, s).value; }, sigma, h);
    CHECK(std::abs(ll.grad_mu - gmu) <= 1e-6 * std::abs(gmu));
    CHECK(std::abs(ll.grad_sigma - gsig) <= 1e-6 * std::abs(gsig));
    CHECK_THROWS_AS(log_likelihood(y, mu, 0.0), std::invalid_argument);
}

TEST_CASE("zero amplitude reduces to a Gaussian log-likelihood") {
    const auto y = oracle::bpsk_awgn(0.5, 1.0, 50, 56);
    const double sigma = 1.3;
    double ref = 0.0;
    for (double v : y) {
        ref += -0.5 * std::log(2.0 * std::numbers::pi * sigma * sigma) - v * v / (2.0 * sigma * sigma);
    }
    CHECK(log_likelihood(y, 0.0, sigma).value == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("EM ascent and stationarity") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto y = oracle::bpsk_awgn(0.9, 1.0, 256, seed);
        const auto mom = sample_moments(y);
        EstimatorOptions opts;
        opts.max_iter = 20000;
        opts.ml_tol = 0.0;
        const auto traj = ml_trajectory(y, mom, opts);
        double prev = -INFINITY;
        for (double m : traj.mu_hats) {
            const double ll = log_likelihood(y, m, std::sqrt(mom.m2 - m * m)).value;
            CHECK(ll >= prev - 1e-9 * std::abs(ll));
            prev = ll;
        }
        const double m = traj.mu_hats.back();
        if (m > 0.05 * std::sqrt(mom.m2)) {
            const auto ll = log_likelihood(y, m, std::sqrt(mom.m2 - m * m));
            CHECK(std::abs(ll.grad_mu) < 1e-6 * static_cast<double>(y.size()));
            CHECK(std::abs(ll.grad_sigma) < 1e-6 * static_cast<double>(y.size()));
        }
    }
}

TEST_CASE("early exit records the iterations used") {
    const auto y = oracle::bpsk_awgn(2.0, 0.3, 64, 90);
    const auto mom = sample_moments(y);
    EstimatorOptions opts;
    opts.max_iter = 100;
    const auto e = estimate_snr(y, mom, Method::ml, opts);
    CHECK(e.iterations_used < 100);
    CHECK(e.iterations_used >= 1);
}

TEST_CASE("derive_params examples") {
    auto d = derive_params(0.5, 0.0, 2.0);
    CHECK(d.mu_hat == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.sigma_hat == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(d.lambda_hat == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(d.q_hat == doctest::Approx(0.5).epsilon(1e-15));

    d = derive_params(0.5, 1.0, 2.0);
    CHECK(d.q_hat == doctest::Approx(1.0).epsilon(1e-14));

    d = derive_params(0.0, 0.0, 1.0);
    CHECK(d.mu_hat == 0.0);
    CHECK(d.sigma_hat == 1.0);
    CHECK(d.lambda_hat == 0.0);
    CHECK(d.q_hat == 0.5);
    CHECK(d.q_undefined);

    d = derive_params(0.5, 5.0, 2.0);
    CHECK(d.q_hat == 1.0);
    CHECK(d.q_clamped);

    CHECK_THROWS_AS(derive_params(0.5, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(derive_params(-1.0, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("symbol metrics") {
    auto s = symbol_metrics(2.0, 0.0);
    CHECK(s.llr == 0.0);
    CHECK(s.inst_ber == 0.5);
    CHECK(std::abs(s.inst_mi) < 1e-15);
    s = symbol_metrics(10.0, 5.0);
    CHECK(s.llr == 50.0);
    CHECK(s.inst_ber < 1e-21);
    CHECK(std::abs(s.inst_mi - 1.0) < 1e-15);
    s = symbol_metrics(1e300, -1e300);
    CHECK(std::isfinite(s.inst_ber));
    CHECK(std::isfinite(s.inst_mi));
    CHECK(symbol_metrics(2.0, 0.7).inst_ber == symbol_metrics(2.0, -0.7).inst_ber);
}

TEST_CASE("channel metrics") {
    auto c = channel_metrics(0.0);
    CHECK(c.avg_ber == 0.5);
    CHECK(c.avg_mi == 0.0);
    CHECK(channel_metrics(1.0).avg_ber > channel_metrics(2.0).avg_ber);
    CHECK(channel_metrics(1.0).avg_mi < channel_metrics(2.0).avg_mi);
    CHECK(channel_metrics(0.5).avg_ber == doctest::Approx(0.15865525393145705).epsilon(1e-14));
}

TEST_CASE("ml is consistent at moderate snr") {
    const double g = std::pow(10.0, 0.5);
    const double sigma = 1.0;
    const auto y = oracle::bpsk_awgn(std::sqrt(2.0 * g) * sigma, sigma, 200000, 13);
    const auto e = estimate_snr(y, sample_moments(y), Method::ml);
    CHECK(std::abs(e.gamma_hat - g) / g < 0.02);
}
