#include <doctest.h>

#include <random>

#include "firlock/bench.hpp"
#include "firlock/eval.hpp"
#include "firlock/filters.hpp"
#include "firlock/netlist.hpp"
#include "fixtures.hpp"

using namespace firlock;

namespace {

Assignment bits_of(const Netlist& nl, std::uint64_t x) {
    Assignment a;
    a.set_bits(nl.input_nets(), x);
    return a;
}

Assignment key_of(const Netlist& nl, std::uint64_t k) {
    Assignment a;
    a.set_bits(nl.key_inputs(), k);
    return a;
}

bool out_bit(const Netlist& nl, const Assignment& y, std::size_t i = 0) {
    return *y.get(nl.output_nets().at(i));
}

} // namespace

TEST_CASE("topological order") {
    Netlist nl;
    auto x = nl.add_input_bus("x", 2);
    auto n = nl.add_gate(GateKind::Not, {x[0]});
    auto a = nl.add_gate(GateKind::And, {n, x[1]});
    nl.add_output_bus("y", Bus{{a}, false});
    auto order = topological_order(nl);
    REQUIRE(order.size() == 2);
    CHECK(nl.gate(order[0]).kind == GateKind::Not);
    CHECK(nl.gate(order[1]).kind == GateKind::And);

    CHECK(topological_order(Netlist{}).empty());

    Netlist loop;
    auto i = loop.add_input_bus("i", 1)[0];
    auto self = loop.add_net("s");
    std::array<NetId, 2> ins{i, self};
    loop.add_gate_driving(GateKind::And, ins, self);
    CHECK_THROWS_AS(topological_order(loop), CycleError);
}

TEST_CASE("majority simulation") {
    auto plain = fixtures::majority_plain();
    for (std::uint64_t x = 0; x < 8; ++x) {
        int ones = std::popcount(x);
        CHECK(out_bit(plain, simulate_comb(plain, bits_of(plain, x), {})) == (ones >= 2));
    }
    auto locked = fixtures::majority_locked_b();
    CHECK(out_bit(locked, simulate_comb(locked, bits_of(locked, 0), key_of(locked, 0b01))) == false);
    for (std::uint64_t x = 0; x < 8; ++x)
        CHECK(out_bit(locked, simulate_comb(locked, bits_of(locked, x), key_of(locked, 0b01))) == (std::popcount(x) >= 2));
    CHECK_THROWS_AS(simulate_comb(locked, bits_of(locked, 0), Assignment{}), IncompleteAssignment);
}

TEST_CASE("sequential toggle and zero stream") {
    Netlist nl;
    auto q = nl.add_net("q");
    auto d = nl.add_gate(GateKind::Not, {q});
    std::array<NetId, 1> din{d};
    nl.add_gate_driving(GateKind::Dff, din, q);
    nl.add_output_bus("q", Bus{{q}, false});
    auto trace = simulate_seq(nl, {}, {}, 4);
    std::vector<bool> seen;
    for (auto& a : trace) seen.push_back(*a.get(q));
    CHECK(seen == std::vector<bool>{false, true, false, true});

    Netlist comb = fixtures::majority_plain();
    CHECK_THROWS_AS(simulate_comb(nl, {}, {}), HasStateError);
    CHECK(comb.is_combinational());
}

TEST_CASE("constant propagation on the locked majority circuits") {
    auto check_residual = [](const Netlist& locked, auto expected) {
        Assignment partial = bits_of(locked, 0);
        partial.set(locked.output_nets()[0], false);
        auto r = propagate_constants(locked, partial);
        CHECK(r.netlist.input_width() == 0);
        REQUIRE(r.required.size() == 1);
        for (std::uint64_t k = 0; k < 4; ++k) {
            auto y = simulate_comb(r.netlist, {}, key_of(r.netlist, k));
            bool satisfied = out_bit(r.netlist, y) == r.required[0].value;
            CHECK(satisfied == expected(k & 1U, (k >> 1) & 1U));
        }
    };
    // k0 AND NOT k1
    check_residual(fixtures::majority_locked_b(), [](bool k0, bool k1) { return k0 && !k1; });
    // (k0 OR k1) AND (NOT k0 OR NOT k1)
    check_residual(fixtures::majority_locked_d(), [](bool k0, bool k1) { return k0 != k1; });

    auto locked = fixtures::majority_locked_b();
    Assignment all = bits_of(locked, 0b011);
    all.set_bits(locked.key_inputs(), std::uint64_t{0b01});
    auto r = propagate_constants(locked, all);
    CHECK(r.netlist.logic_gate_count() == 0);
    CHECK(*r.netlist.constant_value(r.netlist.output_nets()[0]) == true);

    Assignment bad = all;
    bad.set(locked.output_nets()[0], false);
    CHECK_THROWS_AS(propagate_constants(locked, bad), ConflictError);
}

TEST_CASE("property: constant propagation preserves function and never grows") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int ni = 5, nk = 5;
        auto nl = fixtures::random_netlist(rng, ni, nk, 40, 3);
        // Fix a random subset of the inputs; the free bits total <= 10.
        Assignment partial;
        std::vector<NetId> fixed;
        auto in = nl.input_nets();
        std::uint64_t xval = rng();
        for (std::size_t i = 0; i < in.size(); ++i)
            if (rng() & 1U) {
                partial.set(in[i], (xval >> i) & 1U);
                fixed.push_back(in[i]);
            }
        auto r = propagate_constants(nl, partial);
        CHECK(r.netlist.logic_gate_count() <= nl.logic_gate_count());
        CHECK(r.netlist.key_inputs().size() == nl.key_inputs().size());

        auto free_in = r.netlist.input_nets();
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << (free_in.size() + nk)); ++v) {
            Assignment rx, ox;
            rx.set_bits(free_in, v);
            std::size_t j = 0;
            for (std::size_t i = 0; i < in.size(); ++i) {
                if (auto f = partial.get(in[i]))
                    ox.set(in[i], *f);
                else
                    ox.set(in[i], (v >> j++) & 1U);
            }
            auto kv = v >> free_in.size();
            auto y0 = simulate_comb(nl, ox, key_of(nl, kv));
            auto y1 = simulate_comb(r.netlist, rx, key_of(r.netlist, kv));
            for (std::size_t o = 0; o < 3; ++o) REQUIRE(out_bit(nl, y0, o) == out_bit(r.netlist, y1, o));
        }
    }
}

TEST_CASE("combinational frame cuts registers") {
    Netlist nl;
    auto x = nl.add_input_bus("x", 1)[0];
    auto q = nl.add_net("q");
    auto d = nl.add_gate(GateKind::Xor, {x, q});
    std::array<NetId, 1> din{d};
    nl.add_gate_driving(GateKind::Dff, din, q);
    nl.add_output_bus("y", Bus{{q}, false});
    auto f = combinational_frame(nl);
    CHECK(f.is_combinational());
    CHECK(f.find_input_bus("__state_q") != nullptr);
    CHECK(f.find_output_bus("__state_d") != nullptr);
}

TEST_CASE("bits helpers round trip") {
    for (std::int64_t v = -16; v < 16; ++v) CHECK(bits_to_int(int_to_bits(v, 5), true) == v);
    CHECK(bits_to_int(int_to_bits(13, 4), false) == 13);
}

TEST_CASE("property: scan view evaluates one clock step") {
    std::mt19937_64 rng(77);
    FilterSpec spec;
    spec.coefficients = {3, -5, 7, 2};
    spec.ibw = 5;
    for (FilterForm form : {FilterForm::Direct, FilterForm::Transposed, FilterForm::Folded}) {
        spec.form = form;
        Netlist nl = gen_filter(spec);
        Netlist sv = scan_view(nl);
        CHECK(sv.is_combinational());
        const std::size_t ns = nl.state_elements().size();
        REQUIRE(ns > 0);
        CHECK(sv.input_width() == nl.input_width() + ns);
        CHECK(sv.output_width() == nl.output_width() + ns);
        Simulator seq(nl), comb(sv);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<std::uint64_t> x(nl.input_width()), state(ns);
            for (auto& w : x) w = rng();
            for (auto& w : state) w = rng();
            std::vector<std::uint64_t> xs = x;
            xs.insert(xs.end(), state.begin(), state.end());
            auto want = seq.step(x, {}, state);
            auto got = comb.eval(xs, {});
            REQUIRE(got.size() == want.size() + ns);
            for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == want[i]);
            for (std::size_t i = 0; i < ns; ++i) CHECK(got[want.size() + i] == state[i]);
        }
    }
    Netlist plain = fixtures::majority_plain();
    CHECK(scan_view(plain).input_width() == plain.input_width());
}
