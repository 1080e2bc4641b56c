#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "firlock/netlist.hpp"

namespace fixtures {

using namespace firlock;

// Majority of three inputs x1, x2, x3 (one-bit buses) with output y.
struct Majority {
    Netlist nl;
    NetId a, b, c;
};

inline Majority majority() {
    Majority m{Netlist("majority"), 0, 0, 0};
    auto x1 = m.nl.add_input_bus("x1", 1)[0];
    auto x2 = m.nl.add_input_bus("x2", 1)[0];
    auto x3 = m.nl.add_input_bus("x3", 1)[0];
    m.a = m.nl.add_gate(GateKind::And, {x1, x2});
    m.b = m.nl.add_gate(GateKind::And, {x1, x3});
    m.c = m.nl.add_gate(GateKind::And, {x2, x3});
    return m;
}

inline Netlist majority_plain() {
    auto m = majority();
    auto ab = m.nl.add_gate(GateKind::Or, {m.a, m.b});
    m.nl.add_output_bus("y", Bus{{m.nl.add_gate(GateKind::Or, {ab, m.c})}, false});
    return m.nl;
}

// XNOR on a with k0, XOR on b with k1; secret k1k0 = 01.
inline Netlist majority_locked_b() {
    auto m = majority();
    auto k0 = m.nl.add_key_input();
    auto k1 = m.nl.add_key_input();
    auto a = m.nl.add_gate(GateKind::Xnor, {m.a, k0});
    auto b = m.nl.add_gate(GateKind::Xor, {m.b, k1});
    auto ab = m.nl.add_gate(GateKind::Or, {a, b});
    m.nl.add_output_bus("y", Bus{{m.nl.add_gate(GateKind::Or, {ab, m.c})}, false});
    return m.nl;
}

// XNOR then XOR chained on a; secret k1k0 = 01 (10 is equivalent).
inline Netlist majority_locked_d() {
    auto m = majority();
    auto k0 = m.nl.add_key_input();
    auto k1 = m.nl.add_key_input();
    auto a = m.nl.add_gate(GateKind::Xor, {m.nl.add_gate(GateKind::Xnor, {m.a, k0}), k1});
    auto ab = m.nl.add_gate(GateKind::Or, {a, m.b});
    m.nl.add_output_bus("y", Bus{{m.nl.add_gate(GateKind::Or, {ab, m.c})}, false});
    return m.nl;
}

// key bits LSB first: {k0, k1}
inline const std::vector<bool> kMajoritySecret{true, false};

inline std::int64_t random_signed(std::mt19937_64& rng, int width) {
    std::uniform_int_distribution<std::int64_t> d(-(std::int64_t{1} << (width - 1)), (std::int64_t{1} << (width - 1)) - 1);
    return d(rng);
}

} // namespace fixtures

namespace fixtures {

// Random combinational netlist over `ni` one-bit inputs and `nk` keys.
inline firlock::Netlist random_netlist(std::mt19937_64& rng, int ni, int nk, int gates, int outputs) {
    using namespace firlock;
    Netlist nl("random");
    std::vector<NetId> pool;
    for (int i = 0; i < ni; ++i) pool.push_back(nl.add_input_bus("x" + std::to_string(i), 1)[0]);
    for (int i = 0; i < nk; ++i) pool.push_back(nl.add_key_input());
    const GateKind kinds[] = {GateKind::And, GateKind::Or,  GateKind::Nand, GateKind::Nor, GateKind::Xor,
                              GateKind::Xnor, GateKind::Not, GateKind::Buf, GateKind::Mux2};
    for (int g = 0; g < gates; ++g) {
        GateKind k = kinds[rng() % std::size(kinds)];
        auto pick = [&] { return pool[rng() % pool.size()]; };
        NetId out;
        switch (arity(k)) {
        case 1: out = nl.add_gate(k, {pick()}); break;
        case 2: out = nl.add_gate(k, {pick(), pick()}); break;
        default: out = nl.add_gate(k, {pick(), pick(), pick()}); break;
        }
        pool.push_back(out);
    }
    Bus y;
    for (int o = 0; o < outputs; ++o) y.bits.push_back(pool[pool.size() - 1 - static_cast<std::size_t>(o)]);
    nl.add_output_bus("y", y);
    return nl;
}

} // namespace fixtures
