#include "ndasnr/format.hpp"
#include "ndasnr/model.hpp"
#include "ndasnr/moments.hpp"
#include "ndasnr/rng.hpp"
#include "ndasnr/sample_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

using namespace ndasnr;

TEST_CASE("philox known answers") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::block({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("uniforms stay inside the open interval") {
    CHECK(uniform_open01(std::uint32_t{0}) > 0.0);
    CHECK(uniform_open01(std::uint32_t{0xffffffff}) < 1.0);
    CHECK(uniform_open01(std::uint64_t{0}) > 0.0);
    CHECK(uniform_open01(~std::uint64_t{0}) < 1.0);
    CHECK(standard_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(standard_normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
    CHECK_THROWS_AS(standard_normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(standard_normal_quantile(1.0), std::domain_error);
}

TEST_CASE("seed combination is order sensitive") {
    CHECK(combine_seed(1, 2) != combine_seed(2, 1));
    CHECK(combine_seed(1, 2) == combine_seed(1, 2));
    CHECK(mix64(0) != mix64(1));
}

TEST_CASE("params_from examples") {
    const auto a = params_from(AmplitudeNoise{1.0, 1.0});
    CHECK(a.gamma() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(a.lambda() == doctest::Approx(2.0).epsilon(1e-15));

    const auto b = params_from(DecibelSnr{0.0, 1.0});
    CHECK(b.gamma() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(b.mu() == doctest::Approx(std::sqrt(2.0 / 3.0)).epsilon(1e-14));
    CHECK(b.sigma() == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-14));

    const auto c = params_from(AmplitudeNoise{2.0, 1.0});
    CHECK(c.gamma() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(c.lambda() == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("params_from rejects bad input") {
    CHECK_THROWS_AS(params_from(AmplitudeNoise{1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(params_from(AmplitudeNoise{-1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(params_from(LinearSnr{-0.1, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(params_from(LinearSnr{1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(params_from(LinearSnr{1.0, 1.0}, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(ChannelParams(1.0, 1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(ChannelParams(1.0, 0.0).gamma(), std::domain_error);
}

TEST_CASE("snr parameterizations round trip") {
    for (double g : {0.01, 0.3, 1.0, 7.5, 250.0}) {
        for (double m2 : {0.1, 1.0, 42.0}) {
            const auto p = params_from(LinearSnr{g, m2});
            CHECK(p.gamma() == doctest::Approx(g).epsilon(1e-13));
            CHECK(p.m2() == doctest::Approx(m2).epsilon(1e-13));
            const auto q = params_from(DecibelSnr{linear_to_db(g), m2});
            CHECK(q.gamma() == doctest::Approx(g).epsilon(1e-12));
            CHECK(p.lambda() == doctest::Approx(2.0 * p.mu() / (p.sigma() * p.sigma())).epsilon(1e-15));
        }
    }
    CHECK(db_to_linear(10.0) == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(linear_to_db(100.0) == doctest::Approx(20.0).epsilon(1e-15));
}

TEST_CASE("noiseless deterministic symbols") {
    const auto block = generate_block(ChannelParams(1.0, 0.0, 1.0), 4, 12345);
    for (double y : block.samples()) {
        CHECK(y == 1.0);
    }
}

TEST_CASE("pure noise obeys the law of large numbers") {
    const auto block = generate_block(ChannelParams(0.0, 1.0), 1'000'000, 7);
    const auto m = sample_moments(block);
    CHECK(std::abs(m.m1) < 5e-3);
    CHECK(std::abs(m.m2 - 1.0) < 1e-2);
}

TEST_CASE("symbol fraction concentrates at the prior") {
    for (double q : {0.5, 0.2}) {
        const auto block = generate_block(ChannelParams(1.0, 0.0, q), 1'000'000, 99);
        std::size_t plus = 0;
        for (double y : block.samples()) {
            plus += y > 0.0 ? 1 : 0;
        }
        CHECK(std::abs(static_cast<double>(plus) / 1e6 - q) < 0.01 * q);
    }
}

TEST_CASE("generation is reproducible and sample k depends only on (seed, k)") {
    const auto p = params_from(DecibelSnr{3.0, 1.0});
    const auto a = generate_block(p, 1000, 5);
    const auto b = generate_block(p, 1000, 5);
    const auto c = generate_block(p, 1000, 6);
    const auto prefix = generate_block(p, 10, 5);
    CHECK(std::equal(a.samples().begin(), a.samples().end(), b.samples().begin()));
    CHECK(!std::equal(a.samples().begin(), a.samples().end(), c.samples().begin()));
    CHECK(std::equal(prefix.samples().begin(), prefix.samples().end(), a.samples().begin()));
    CHECK(a.seed() == 5);
    REQUIRE(a.truth().has_value());
    CHECK(*a.truth() == p);
    CHECK_THROWS_AS(generate_block(p, 0, 1), std::invalid_argument);
}

TEST_CASE("sample block validation") {
    CHECK_THROWS_AS(SampleBlock(std::vector<double>{}), std::invalid_argument);
    CHECK_THROWS_AS(SampleBlock({1.0, std::numeric_limits<double>::quiet_NaN()}), std::invalid_argument);
    CHECK_THROWS_AS(SampleBlock({std::numeric_limits<double>::infinity()}), std::invalid_argument);
}

TEST_CASE("sample files round trip losslessly") {
    const auto p = params_from(DecibelSnr{-2.0, 1.0}, 0.3);
    const auto block = generate_block(p, 257, 31337);
    std::stringstream ss;
    write_samples(ss, block);
    const auto back = read_samples(ss);
    REQUIRE(back.n() == block.n());
    CHECK(std::equal(back.samples().begin(), back.samples().end(), block.samples().begin()));
    CHECK(back.seed() == 31337);
    REQUIRE(back.truth().has_value());
    CHECK(*back.truth() == p);

    const auto path = std::filesystem::temp_directory_path() / "ndasnr_sample_io_test.txt";
    write_samples(path, block);
    const auto from_file = read_samples(path);
    CHECK(std::equal(from_file.samples().begin(), from_file.samples().end(), block.samples().begin()));
    std::filesystem::remove(path);
}

TEST_CASE("sample file errors") {
    std::istringstream empty("# only a comment\n\n");
    CHECK_THROWS_AS(read_samples(empty), SampleFormatError);
    std::istringstream junk("1.0\nabc\n");
    CHECK_THROWS_AS(read_samples(junk), SampleFormatError);
    std::istringstream plain("1\n-1\n\n+0.5\n");
    CHECK(read_samples(plain).n() == 3);
    CHECK_THROWS(read_samples(std::filesystem::path("/nonexistent/ndasnr/file.txt")));
}

TEST_CASE("number formatting round trips") {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
        double back = 1.0;
        REQUIRE(parse_double(format_double(v), back));
        CHECK(back == v);
    }
    double v = 0;
    CHECK(parse_double("+2", v));
    CHECK(v == 2.0);
    CHECK_FALSE(parse_double("2x", v));
    CHECK_FALSE(parse_double("", v));
}
