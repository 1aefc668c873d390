#include <doctest.h>

#include <cmath>
#include <numbers>

#include "wprime/errors.hpp"
#include "wprime/io.hpp"
#include "wprime/signal.hpp"

using namespace wprime;

TEST_CASE("generate_signal basics") {
    SUBCASE("constant") {
        const auto s = parse_signal_spec("const:amp=2");
        CHECK(generate_signal(s, {0.0, 7.5, -3.0}) == std::vector<double>{2.0, 2.0, 2.0});
    }
    SUBCASE("step is inclusive at the step time") {
        const auto s = parse_signal_spec("step:t0=1,amp=1");
        CHECK(generate_signal(s, {0.5, 1.0, 1.5}) == std::vector<double>{0.0, 1.0, 1.0});
    }
    SUBCASE("sine at a quarter period") {
        const auto s = parse_signal_spec("sine:amp=1,f=0.25");
        CHECK(generate_signal(s, {1.0})[0] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("sine with offset and phase") {
        const auto s = parse_signal_spec("sine:amp=2,f=1,phase=0.5,offset=3");
        CHECK(s(0.3) == doctest::Approx(3.0 + 2.0 * std::sin(2.0 * std::numbers::pi * 0.3 + 0.5)));
    }
    SUBCASE("linear chirp phase") {
        // f = 0 -> 2 Hz over T = 4 s: theta(t) = 2 pi (t^2 / 4) while sweeping, then 2 Hz
        const auto s = parse_signal_spec("chirp:amp=1,f=0,f1=2,T=4");
        CHECK(s(0.0) == 0.0);
        CHECK(s(1.0) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(s(5.0) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(s(5.125) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("signal spec validation") {
    CHECK_THROWS_AS(parse_signal_spec("sine:f=-1"), DomainError);
    CHECK_THROWS_AS(parse_signal_spec("chirp:f=2,f1=1"), DomainError);
    CHECK_THROWS_AS(parse_signal_spec("square:amp=1"), Error);
    CHECK_THROWS_AS(parse_signal_spec("sine:amp"), Error);
    CHECK_THROWS_AS(parse_signal_spec("sine:amp=x"), Error);
    CHECK_THROWS_AS(parse_signal_spec("sine:gain=1"), Error);
    CHECK_THROWS_AS(parse_signal_spec("csv"), Error);
}

TEST_CASE("csv-column signals") {
    SignalTable table;
    table.t = {0.0, 1.0, 2.0};
    table.columns["u"] = {0.0, 10.0, 30.0};
    auto s = parse_signal_spec("csv:col=u");

    SUBCASE("needs an attached table") {
        try {
            generate_signal(s, {0.0});
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(e.code() == ErrorCode::Io);
        }
    }
    SUBCASE("interpolates linearly") {
        s.table = &table;
        CHECK(generate_signal(s, {0.0, 0.5, 1.0, 1.5, 2.0}) == std::vector<double>{0.0, 5.0, 10.0, 20.0, 30.0});
        CHECK_THROWS_AS(s(2.5), IoError);
    }
    SUBCASE("missing column") {
        auto other = parse_signal_spec("csv:col=v");
        other.table = &table;
        CHECK_THROWS_AS(generate_signal(other, {0.0}), IoError);
    }
}

TEST_CASE("format_number round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 1e22, 0.0, 123456789.125}) {
        CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.25) == "0.25");
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("parse_csv errors carry line numbers") {
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,2\n3\n", "f.csv"), doctest::Contains("f.csv:3"), IoError);
    CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,x\n", "f.csv"), doctest::Contains("not a number"), IoError);
    const auto t = parse_csv("a, b\r\n1, 2\n\n3,4\n");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    CHECK(t.rows.size() == 2);
}
