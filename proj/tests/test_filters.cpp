#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "firlock/eval.hpp"
#include "firlock/filters.hpp"
#include "fixtures.hpp"

using namespace firlock;

namespace {

FilterSpec make_spec(std::vector<std::int64_t> c, int mbw, int ibw, FilterForm form, BlockStyle style = BlockStyle::ShiftAdds) {
    FilterSpec s;
    s.coefficients = std::move(c);
    s.mbw = mbw;
    s.ibw = ibw;
    s.form = form;
    s.style = style;
    return s;
}

const FilterForm kForms[] = {FilterForm::Direct, FilterForm::Transposed, FilterForm::Folded};

} // namespace

TEST_CASE("golden convolution") {
    CHECK(golden_convolution({57, 81}, {1, 0}) == std::vector<std::int64_t>{57, 81});
    CHECK(golden_convolution({1, 1}, {1, 2, 3}) == std::vector<std::int64_t>{1, 3, 5});
}

TEST_CASE("filters reproduce the golden convolution") {
    std::mt19937_64 rng(11);
    for (auto form : kForms) {
        for (auto style : {BlockStyle::ShiftAdds, BlockStyle::Multiplier}) {
            auto impulse = make_spec({57, 81}, 8, 4, form, style);
            auto nl = gen_filter(impulse);
            CHECK(run_filter(nl, form, 2, {1, 0, 0}) == std::vector<std::int64_t>{57, 81, 0});

            auto ident = make_spec({1}, 2, 4, form, style);
            std::vector<std::int64_t> xs{3, -2, 7, -8, 0};
            CHECK(run_filter(gen_filter(ident), form, 1, xs) == xs);

            std::vector<std::int64_t> c;
            for (int i = 0; i < 4; ++i) c.push_back(fixtures::random_signed(rng, 6));
            auto spec = make_spec(c, 6, 5, form, style);
            std::vector<std::int64_t> samples;
            for (int i = 0; i < 64; ++i) samples.push_back(fixtures::random_signed(rng, 5));
            CHECK(run_filter(gen_filter(spec), form, 4, samples) == golden_convolution(c, samples));

            auto zero = run_filter(gen_filter(spec), form, 4, std::vector<std::int64_t>(10, 0));
            CHECK(zero == std::vector<std::int64_t>(10, 0));
        }
    }
    auto f3 = make_spec({1, 2, 3}, 3, 4, FilterForm::Folded);
    std::vector<std::int64_t> ten{1, -1, 2, 5, -8, 7, 0, 3, 3, -4};
    CHECK(run_filter(gen_filter(f3), FilterForm::Folded, 3, ten) == golden_convolution({1, 2, 3}, ten));
}

TEST_CASE("folded filter streams the coefficients of an impulse") {
    auto spec = make_spec({5, -3, 7}, 4, 4, FilterForm::Folded);
    auto nl = gen_filter(spec);
    // Raw trace: one frame per sample, valid on the last cycle.
    std::vector<Assignment> xs;
    auto xin = nl.find_input_bus("X")->bus;
    for (int s = 0; s < 3; ++s)
        for (int c = 0; c < 3; ++c) {
            Assignment a;
            a.set_bits(xin.bits, static_cast<std::uint64_t>(s == 0 ? 1 : 0));
            xs.push_back(a);
        }
    auto trace = simulate_seq(nl, xs, {}, 9);
    auto ybus = nl.find_output_bus("Y")->bus;
    auto valid = nl.find_output_bus("valid")->bus[0];
    std::vector<std::int64_t> seen;
    for (std::size_t t = 0; t < trace.size(); ++t) {
        CHECK(*trace[t].get(valid) == (t % 3 == 2));
        if (t % 3 == 2) {
            std::vector<bool> bits;
            for (NetId n : ybus.bits) bits.push_back(*trace[t].get(n));
            seen.push_back(bits_to_int(bits, true));
        }
    }
    CHECK(seen == std::vector<std::int64_t>{5, -3, 7});
}

TEST_CASE("property: forms agree and never overflow at worst-case inputs") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 6; ++trial) {
        std::size_t n = 1 + rng() % 6;
        int mbw = 2 + static_cast<int>(rng() % 6), ibw = 2 + static_cast<int>(rng() % 6);
        std::vector<std::int64_t> c;
        for (std::size_t i = 0; i < n; ++i) c.push_back(fixtures::random_signed(rng, mbw));
        // Extreme inputs: every tap at the most negative or most positive value.
        std::vector<std::int64_t> xs;
        const std::int64_t lo = -(std::int64_t{1} << (ibw - 1)), hi = -lo - 1;
        for (int i = 0; i < 40; ++i) xs.push_back(i % 7 < 3 ? lo : (i % 7 < 5 ? hi : fixtures::random_signed(rng, ibw)));
        for (int i = 0; i < 100; ++i) xs.push_back(fixtures::random_signed(rng, ibw));
        auto want = golden_convolution(c, xs);
        for (auto form : kForms) {
            auto spec = make_spec(c, mbw, ibw, form);
            REQUIRE(run_filter(gen_filter(spec), form, n, xs) == want);
        }
        std::int64_t bound = 0;
        for (auto ci : c) bound += std::llabs(ci) * (std::int64_t{1} << (ibw - 1));
        auto spec = make_spec(c, mbw, ibw, FilterForm::Direct);
        CHECK(bound < (std::int64_t{1} << (spec.output_width() - 1)));
    }
}

TEST_CASE("filter spec validation and JSON") {
    CHECK_THROWS_AS(make_spec({}, 4, 4, FilterForm::Direct).validate(), SpecError);
    CHECK_THROWS_AS(make_spec({9}, 4, 4, FilterForm::Direct).validate(), SpecError);
    CHECK_NOTHROW(make_spec({-8}, 4, 4, FilterForm::Direct).validate());
    auto s = parse_filter_spec_json(R"({"name": "lp", "coefficients": [1, -2, 3], "mbw": 4, "ibw": 6})");
    CHECK(s.name == "lp");
    CHECK(s.coefficients == std::vector<std::int64_t>{1, -2, 3});
    CHECK(s.output_width() == 6 + 4 + 2);
    auto back = parse_filter_spec_json(filter_spec_json(s));
    CHECK(back.coefficients == s.coefficients);
    CHECK(back.mbw == 4);
    CHECK_THROWS_AS(parse_filter_spec_json("{\"coefficients\": 3}"), SpecError);
    CHECK_THROWS_AS(parse_filter_spec_json("not json"), SpecError);
}

TEST_CASE("standalone blocks") {
    const std::vector<std::int64_t> c{57, -81, 3};
    for (auto style : {BlockStyle::ShiftAdds, BlockStyle::Multiplier}) {
        auto r = plain_realizer(c, style);
        BusEvaluator cavm(gen_block(BlockKind::Cavm, 3, 4, 8, r));
        BusEvaluator mcm(gen_block(BlockKind::Mcm, 3, 4, 8, r));
        auto tnl = gen_block(BlockKind::Tmcm, 3, 4, 8, r);
        BusEvaluator tmcm(tnl);
        for (std::int64_t x = -8; x < 8; ++x) {
            auto y = mcm.eval(std::vector<std::int64_t>{x});
            CHECK(y == std::vector<std::int64_t>{57 * x, -81 * x, 3 * x});
            for (std::int64_t s = 0; s < 4; ++s)
                REQUIRE(tmcm.eval(std::vector<std::int64_t>{x, s})[0] == c[std::min<std::size_t>(static_cast<std::size_t>(s), 2)] * x);
            CHECK(cavm.eval(std::vector<std::int64_t>{x, 1, x})[0] == 57 * x - 81 + 3 * x);
        }
    }
}

TEST_CASE("zero-phase frequency response") {
    auto one = zpfr({1}, 9);
    for (double a : one.amplitude) CHECK(a == doctest::Approx(1.0));
    auto r = zpfr({1, 2, 1}, 3);
    CHECK(r.omega[1] == doctest::Approx(std::numbers::pi / 2));
    CHECK(r.amplitude[0] == doctest::Approx(4.0));
    CHECK(r.amplitude[1] == doctest::Approx(2.0));
    CHECK(std::abs(r.amplitude[2]) < 1e-12);
    for (int k = 0; k < 3; ++k) CHECK(r.amplitude[k] == doctest::Approx(2 + 2 * std::cos(r.omega[k])));

    std::vector<std::int64_t> sym{3, -7, 12, 40, 12, -7, 3};
    auto s = zpfr(sym, 64);
    CHECK(std::abs(s.amplitude[0] - 56.0) <= 1e-12 * 56.0);
    CHECK_FALSE(s.asymmetric());

    auto anti = zpfr({1, 0, -1}, 3);
    CHECK(anti.symmetry == Symmetry::Antisymmetric);
    CHECK(anti.amplitude[1] == doctest::Approx(2.0));
    auto asym = zpfr({1, 2}, 2);
    CHECK(asym.asymmetric());
    CHECK(asym.amplitude[0] == doctest::Approx(3.0));
    CHECK(asym.amplitude[1] == doctest::Approx(1.0));
    CHECK(zpfr({1, 2}, 2).omega == std::vector<double>{0.0, std::numbers::pi});
    CHECK_THROWS_AS(zpfr({1}, 1), SpecError);
    CHECK(frequency_response_csv(r).rfind("omega,amplitude\n", 0) == 0);
}
