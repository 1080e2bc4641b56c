#include "firlock/lock.hpp"

#include <algorithm>

#include "firlock/arith.hpp"
#include "firlock/rng.hpp"

namespace firlock {

namespace {

KeyMap default_keymap(const Netlist& nl) {
    KeyMap km;
    km.ports.resize(nl.key_inputs().size());
    return km;
}

ProtectedDesign point_function(const ProtectedDesign& in, const PointFunctionConfig& cfg) {
    const Netlist& src = in.netlist;
    if (in.keys.p() != src.key_inputs().size()) throw ConfigError("key map does not match the key inputs");
    if (cfg.w == 0) throw ConfigError("point function needs w >= 1");
    if (cfg.w > 62) throw ConfigError("point function supports at most 62 key bits");
    if (cfg.cv < 0 || static_cast<std::uint64_t>(cfg.cv) >= (std::uint64_t{1} << cfg.w))
        throw ConfigError("cv must lie in [0, 2^w)");
    if (cfg.secret.size() != cfg.w) throw ConfigError("secret must have w bits");
    if (src.input_buses().empty()) throw ConfigError("design has no input bus");

    const PortGroup* bus = cfg.comparand_bus.empty() ? &src.input_buses().front() : src.find_input_bus(cfg.comparand_bus);
    if (!bus) throw ConfigError("no input bus named '" + cfg.comparand_bus + "'");
    if (cfg.w > bus->bus.width()) throw ConfigError("w exceeds the comparand width");
    std::vector<std::size_t> slice = cfg.slice_bits;
    if (slice.empty())
        for (std::size_t i = 0; i < cfg.w; ++i) slice.push_back(i);
    if (slice.size() != cfg.w) throw ConfigError("slice must list w bits");
    if (src.output_width() == 0) throw ConfigError("design has no outputs");
    const std::size_t target = cfg.target_output.value_or(src.output_width() - 1);
    if (target >= src.output_width()) throw ConfigError("target output out of range");

    ProtectedDesign out{src, in.keys};
    Netlist& nl = out.netlist;
    LogicBuilder b(nl);
    Bus xs, ks;
    for (std::size_t i : slice) {
        if (i >= bus->bus.width()) throw ConfigError("slice bit out of range");
        xs.bits.push_back(bus->bus[i]);
    }
    for (std::size_t i = 0; i < cfg.w; ++i) {
        ks.bits.push_back(nl.add_key_input());
        out.keys.ports.push_back({KeyRole::Ll, cfg.secret[i], std::nullopt});
    }
    std::uint64_t secret = 0;
    for (std::size_t i = 0; i < cfg.w; ++i)
        if (cfg.secret[i]) secret |= std::uint64_t{1} << i;

    NetId hit = cfg.cv == 0 ? equality_comparator(b, xs, ks) : range_comparator(b, xs, ks, cfg.cv);
    NetId wrong = b.not1(equals_const(b, ks, secret));
    NetId f = nl.output_nets().at(target);
    nl.set_output_bit(target, b.xor2(f, b.and2(hit, wrong)));
    nl.validate();
    return out;
}

} // namespace

ProtectedDesign lock_one_point(const ProtectedDesign& design, PointFunctionConfig cfg) {
    cfg.cv = 0;
    return point_function(design, cfg);
}

ProtectedDesign lock_one_point(const Netlist& netlist, PointFunctionConfig cfg) {
    return lock_one_point(ProtectedDesign{netlist, default_keymap(netlist)}, std::move(cfg));
}

ProtectedDesign lock_relaxed(const ProtectedDesign& design, const PointFunctionConfig& cfg) {
    return point_function(design, cfg);
}

ProtectedDesign lock_relaxed(const Netlist& netlist, const PointFunctionConfig& cfg) {
    return point_function(ProtectedDesign{netlist, default_keymap(netlist)}, cfg);
}

std::vector<bool> random_key(std::size_t w, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<bool> k;
    for (std::size_t i = 0; i < w; ++i) k.push_back(rng.coin());
    return k;
}

namespace {

// Points every reader of `from` (gate inputs and output bits) at `to`,
// except the gate `skip`.
void redirect(Netlist& nl, NetId from, NetId to, std::size_t skip) {
    auto fo = nl.fanouts();
    for (auto [gate, slot] : fo[from])
        if (gate != skip) nl.set_gate_input(gate, slot, to);
    auto outs = nl.output_nets();
    for (std::size_t i = 0; i < outs.size(); ++i)
        if (outs[i] == from) nl.set_output_bit(i, to);
}

// True when flipping the key gate on this net changes some output.
bool observable(const Netlist& nl, NetId net, Rng& rng) {
    Netlist probe = nl;
    NetId k = probe.add_key_input();
    NetId x = probe.add_gate(GateKind::Xor, {net, k});
    redirect(probe, net, x, probe.gate_count() - 1);
    Simulator sim(probe);
    const std::size_t in_w = probe.input_width();
    const std::size_t rounds = in_w <= 12 ? ((std::size_t{1} << in_w) + 63) / 64 : 64;
    std::vector<std::uint64_t> keys(probe.key_inputs().size(), 0);
    for (std::size_t r = 0; r < rounds; ++r) {
        std::vector<std::uint64_t> in(in_w);
        for (std::size_t i = 0; i < in_w; ++i) {
            if (in_w <= 12) {
                std::uint64_t word = 0;
                for (std::uint64_t lane = 0; lane < 64; ++lane)
                    if (((r * 64 + lane) >> i) & 1U) word |= std::uint64_t{1} << lane;
                in[i] = word;
            } else {
                in[i] = rng.next();
            }
        }
        for (auto& kw : keys) kw = rng.next();
        keys.back() = 0;
        auto a = sim.eval(in, keys);
        keys.back() = ~std::uint64_t{0};
        if (sim.eval(in, keys) != a) return true;
    }
    return false;
}

} // namespace

ProtectedDesign lock_rll(const Netlist& netlist, std::size_t p, std::uint64_t seed) {
    if (!netlist.is_combinational()) throw HasStateError("random logic locking needs a combinational netlist");
    ProtectedDesign out{netlist, default_keymap(netlist)};
    if (p == 0) return out;
    std::vector<NetId> candidates;
    for (const auto& g : netlist.gates())
        if (!is_constant(g.kind)) candidates.push_back(g.out);
    if (p > candidates.size()) throw TooManyKeys("p exceeds the number of internal nets");
    Rng rng(seed);
    rng.shuffle(candidates);
    Netlist& nl = out.netlist;
    std::size_t placed = 0;
    for (NetId net : candidates) {
        if (placed == p) break;
        if (!observable(nl, net, rng)) continue;
        bool secret = rng.coin();
        NetId k = nl.add_key_input();
        NetId gated = nl.add_gate(secret ? GateKind::Xnor : GateKind::Xor, {net, k});
        redirect(nl, net, gated, nl.gate_count() - 1);
        out.keys.ports.push_back({KeyRole::Obf, secret, std::nullopt});
        ++placed;
    }
    if (placed < p) throw TooManyKeys("only " + std::to_string(placed) + " observable nets available");
    nl.validate();
    return out;
}

ProtectedDesign hybridize(const ProtectedDesign& obf, const PointFunctionConfig& cfg, std::uint64_t seed) {
    const std::size_t v = obf.keys.v();
    if (v < 2) throw ConfigError("key hiding needs at least 2 obfuscation key bits");
    ProtectedDesign locked = lock_relaxed(obf, cfg);
    Netlist& nl = locked.netlist;
    KeyMap& km = locked.keys;

    std::vector<std::size_t> obf_idx;
    for (std::size_t i = 0; i < km.p(); ++i)
        if (km.ports[i].role == KeyRole::Obf) obf_idx.push_back(i);

    Rng rng(seed);
    std::vector<std::size_t> perm = obf_idx;
    bool deranged = false;
    while (!deranged) {
        rng.shuffle(perm);
        deranged = true;
        for (std::size_t i = 0; i < perm.size(); ++i) deranged = deranged && perm[i] != obf_idx[i];
    }
    std::vector<std::size_t> partner(km.p());
    for (std::size_t i = 0; i < obf_idx.size(); ++i) partner[obf_idx[i]] = perm[i];
    for (std::size_t i = 0; i < km.p(); ++i)
        if (km.ports[i].role == KeyRole::Ll) partner[i] = obf_idx[rng.below(obf_idx.size())];

    std::vector<NetId> old_keys = nl.key_inputs();
    std::vector<NetId> new_keys;
    for (std::size_t i = 0; i < old_keys.size(); ++i) new_keys.push_back(nl.add_net());
    nl.set_key_inputs(new_keys);
    for (std::size_t i = 0; i < old_keys.size(); ++i) {
        const std::size_t j = partner[i];
        const HideKind kind = km.ports[j].secret ? HideKind::Xnor : HideKind::Xor;
        std::array<NetId, 2> ins{new_keys[i], new_keys[j]};
        nl.add_gate_driving(kind == HideKind::Xor ? GateKind::Xor : GateKind::Xnor, ins, old_keys[i]);
        nl.set_net_name(old_keys[i], "hidden_key" + std::to_string(i));
        km.ports[i].hiding = KeyHiding{j, kind};
    }
    nl.validate();
    return locked;
}

} // namespace firlock
