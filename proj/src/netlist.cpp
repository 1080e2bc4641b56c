#include "firlock/netlist.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace firlock {

int arity(GateKind kind) {
    switch (kind) {
    case GateKind::Not:
    case GateKind::Buf:
    case GateKind::Dff:
        return 1;
    case GateKind::Mux2:
        return 3;
    case GateKind::Const0:
    case GateKind::Const1:
        return 0;
    default:
        return 2;
    }
}

std::string_view gate_kind_name(GateKind kind) {
    switch (kind) {
    case GateKind::And: return "AND";
    case GateKind::Or: return "OR";
    case GateKind::Nand: return "NAND";
    case GateKind::Nor: return "NOR";
    case GateKind::Xor: return "XOR";
    case GateKind::Xnor: return "XNOR";
    case GateKind::Not: return "NOT";
    case GateKind::Buf: return "BUF";
    case GateKind::Mux2: return "MUX";
    case GateKind::Const0: return "CONST0";
    case GateKind::Const1: return "CONST1";
    case GateKind::Dff: return "DFF";
    }
    return "?";
}

bool is_constant(GateKind kind) {
    return kind == GateKind::Const0 || kind == GateKind::Const1;
}

// ---------------------------------------------------------------------------
// Netlist

NetId Netlist::add_net(std::string name) {
    auto id = static_cast<NetId>(net_names_.size());
    net_names_.push_back(std::move(name));
    driver_.push_back(kUndriven);
    return id;
}

NetId Netlist::add_gate(GateKind kind, std::initializer_list<NetId> inputs, std::string out_name) {
    NetId out = add_net(std::move(out_name));
    add_gate_driving(kind, std::span<const NetId>(inputs.begin(), inputs.size()), out);
    return out;
}

std::size_t Netlist::add_gate_driving(GateKind kind, std::span<const NetId> inputs, NetId out) {
    if (static_cast<int>(inputs.size()) != arity(kind))
        throw Error(std::string("wrong arity for ") + std::string(gate_kind_name(kind)));
    if (out >= net_count())
        throw Error("gate output net does not exist");
    if (driver_[out] != kUndriven)
        throw Error("net " + std::to_string(out) + " already driven");
    Gate g;
    g.kind = kind;
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        // kNoNet is allowed for DFF placeholders that are connected later
        if (inputs[i] != kNoNet && inputs[i] >= net_count())
            throw Error("gate input net does not exist");
        g.in[i] = inputs[i];
    }
    g.out = out;
    gates_.push_back(g);
    driver_[out] = static_cast<int>(gates_.size() - 1);
    return gates_.size() - 1;
}

void Netlist::set_gate_input(std::size_t gate, int slot, NetId net) {
    Gate& g = gates_.at(gate);
    if (slot < 0 || slot >= arity(g.kind))
        throw Error("gate input slot out of range");
    g.in[static_cast<std::size_t>(slot)] = net;
}

void Netlist::remove_gate(std::size_t gate) {
    // Swap-and-pop keeps gate indices dense; the moved gate is re-registered.
    NetId out = gates_.at(gate).out;
    driver_[out] = kUndriven;
    if (gate != gates_.size() - 1) {
        gates_[gate] = gates_.back();
        driver_[gates_[gate].out] = static_cast<int>(gate);
    }
    gates_.pop_back();
    if (out == const0_) const0_ = kNoNet;
    if (out == const1_) const1_ = kNoNet;
}

std::size_t Netlist::logic_gate_count() const {
    return static_cast<std::size_t>(std::count_if(gates_.begin(), gates_.end(),
                                                  [](const Gate& g) { return !is_constant(g.kind); }));
}

std::optional<bool> Netlist::constant_value(NetId net) const {
    int d = driver(net);
    if (d < 0) return std::nullopt;
    switch (gates_[static_cast<std::size_t>(d)].kind) {
    case GateKind::Const0: return false;
    case GateKind::Const1: return true;
    default: return std::nullopt;
    }
}

NetId Netlist::const0() {
    if (const0_ == kNoNet) const0_ = add_gate(GateKind::Const0, {});
    return const0_;
}

NetId Netlist::const1() {
    if (const1_ == kNoNet) const1_ = add_gate(GateKind::Const1, {});
    return const1_;
}

Bus Netlist::add_input_bus(const std::string& name, std::size_t width, bool is_signed) {
    Bus bus;
    bus.is_signed = is_signed;
    for (std::size_t i = 0; i < width; ++i) {
        NetId n = add_net(width == 1 ? name : name + "[" + std::to_string(i) + "]");
        driver_[n] = kPrimaryInput;
        bus.bits.push_back(n);
    }
    inputs_.push_back({name, bus});
    return bus;
}

void Netlist::adopt_input_bus(const std::string& name, Bus bus) {
    for (NetId n : bus.bits) {
        if (driver_.at(n) != kUndriven) throw Error("input net already driven");
        driver_[n] = kPrimaryInput;
    }
    inputs_.push_back({name, std::move(bus)});
}

NetId Netlist::add_key_input() {
    NetId n = add_net("keyinput" + std::to_string(keys_.size()));
    driver_[n] = kKeyInput;
    keys_.push_back(n);
    return n;
}

void Netlist::adopt_key_input(NetId net) {
    if (driver_.at(net) != kUndriven) throw Error("key net already driven");
    driver_[net] = kKeyInput;
    keys_.push_back(net);
}

void Netlist::set_key_inputs(std::vector<NetId> keys) {
    for (NetId k : keys_)
        if (driver_[k] == kKeyInput) driver_[k] = kUndriven;
    for (NetId k : keys) {
        if (driver_.at(k) != kUndriven) throw Error("key net already driven");
        driver_[k] = kKeyInput;
    }
    keys_ = std::move(keys);
    for (std::size_t i = 0; i < keys_.size(); ++i) net_names_[keys_[i]] = "keyinput" + std::to_string(i);
}

void Netlist::add_output_bus(const std::string& name, Bus bus) {
    for (NetId n : bus.bits)
        if (n >= net_count()) throw Error("output net does not exist");
    outputs_.push_back({name, std::move(bus)});
}

void Netlist::set_output_bit(std::size_t flat_index, NetId net) {
    for (auto& group : outputs_) {
        if (flat_index < group.bus.width()) {
            group.bus.bits[flat_index] = net;
            return;
        }
        flat_index -= group.bus.width();
    }
    throw Error("output index out of range");
}

const PortGroup* Netlist::find_input_bus(std::string_view name) const {
    for (const auto& g : inputs_)
        if (g.name == name) return &g;
    return nullptr;
}

const PortGroup* Netlist::find_output_bus(std::string_view name) const {
    for (const auto& g : outputs_)
        if (g.name == name) return &g;
    return nullptr;
}

std::vector<NetId> Netlist::input_nets() const {
    std::vector<NetId> nets;
    for (const auto& g : inputs_) nets.insert(nets.end(), g.bus.bits.begin(), g.bus.bits.end());
    return nets;
}

std::vector<NetId> Netlist::output_nets() const {
    std::vector<NetId> nets;
    for (const auto& g : outputs_) nets.insert(nets.end(), g.bus.bits.begin(), g.bus.bits.end());
    return nets;
}

std::size_t Netlist::input_width() const {
    std::size_t w = 0;
    for (const auto& g : inputs_) w += g.bus.width();
    return w;
}

std::size_t Netlist::output_width() const {
    std::size_t w = 0;
    for (const auto& g : outputs_) w += g.bus.width();
    return w;
}

std::vector<std::size_t> Netlist::state_elements() const {
    std::vector<std::size_t> dffs;
    for (std::size_t i = 0; i < gates_.size(); ++i)
        if (gates_[i].kind == GateKind::Dff) dffs.push_back(i);
    return dffs;
}

bool Netlist::is_combinational() const {
    return std::none_of(gates_.begin(), gates_.end(), [](const Gate& g) { return g.kind == GateKind::Dff; });
}

std::vector<std::vector<std::pair<std::size_t, int>>> Netlist::fanouts() const {
    std::vector<std::vector<std::pair<std::size_t, int>>> fo(net_count());
    for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
        const Gate& g = gates_[gi];
        for (int s = 0; s < arity(g.kind); ++s) fo[g.in[static_cast<std::size_t>(s)]].emplace_back(gi, s);
    }
    return fo;
}

void Netlist::validate() const {
    for (std::size_t gi = 0; gi < gates_.size(); ++gi) {
        const Gate& g = gates_[gi];
        if (driver_[g.out] != static_cast<int>(gi)) throw Error("driver table out of sync");
        for (NetId n : g.inputs()) {
            if (n == kNoNet || n >= net_count()) throw Error("gate with unconnected input");
            if (driver_[n] == kUndriven) throw Error("net '" + net_names_[n] + "' is undriven");
        }
    }
    std::vector<char> seen(net_count(), 0);
    for (const auto& g : inputs_)
        for (NetId n : g.bus.bits) {
            if (driver_[n] != kPrimaryInput) throw Error("input bus bit is not a primary input");
            if (seen[n]++) throw Error("input net listed twice");
        }
    for (NetId n : keys_) {
        if (driver_[n] != kKeyInput) throw Error("key net is not a key input");
        if (seen[n]++) throw Error("key net listed twice or shared with a primary input");
    }
    for (const auto& g : outputs_)
        for (NetId n : g.bus.bits)
            if (n >= net_count() || driver_[n] == kUndriven) throw Error("output net is undriven");
    (void)topological_order(*this);
}

// ---------------------------------------------------------------------------
// Assignment

std::optional<bool> Assignment::get(NetId net) const {
    auto it = values_.find(net);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

bool Assignment::complete_over(std::span<const NetId> nets) const {
    return std::all_of(nets.begin(), nets.end(), [&](NetId n) { return contains(n); });
}

void Assignment::set_bits(std::span<const NetId> nets, std::uint64_t value) {
    for (std::size_t i = 0; i < nets.size(); ++i) set(nets[i], i < 64 && ((value >> i) & 1U));
}

void Assignment::set_bits(std::span<const NetId> nets, const std::vector<bool>& bits) {
    for (std::size_t i = 0; i < nets.size(); ++i) set(nets[i], bits.at(i));
}

// ---------------------------------------------------------------------------
// Ordering and simulation

std::vector<std::size_t> topological_order(const Netlist& netlist) {
    const auto& gates = netlist.gates();
    std::vector<std::size_t> order;
    order.reserve(gates.size());
    std::vector<int> pending(gates.size(), 0);
    std::vector<std::vector<std::size_t>> readers(gates.size());

    for (std::size_t gi = 0; gi < gates.size(); ++gi) {
        const Gate& g = gates[gi];
        if (g.kind == GateKind::Dff) continue;
        for (NetId n : g.inputs()) {
            if (n == kNoNet) throw Error("gate with unconnected input");
            int d = netlist.driver(n);
            if (d >= 0 && gates[static_cast<std::size_t>(d)].kind != GateKind::Dff) {
                ++pending[gi];
                readers[static_cast<std::size_t>(d)].push_back(gi);
            }
        }
    }

    for (std::size_t gi = 0; gi < gates.size(); ++gi)
        if (gates[gi].kind == GateKind::Dff) order.push_back(gi);

    // Smallest-index-first keeps the order deterministic.
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t gi = 0; gi < gates.size(); ++gi)
        if (gates[gi].kind != GateKind::Dff && pending[gi] == 0) ready.push(gi);
    while (!ready.empty()) {
        std::size_t gi = ready.top();
        ready.pop();
        order.push_back(gi);
        for (std::size_t r : readers[gi])
            if (--pending[r] == 0) ready.push(r);
    }
    if (order.size() != gates.size()) throw CycleError("combinational cycle detected");
    return order;
}

Simulator::Simulator(const Netlist& netlist)
    : netlist_(&netlist),
      order_(topological_order(netlist)),
      dffs_(netlist.state_elements()),
      input_nets_(netlist.input_nets()),
      output_nets_(netlist.output_nets()),
      values_(netlist.net_count(), 0) {}

void Simulator::evaluate(std::span<const std::uint64_t> inputs, std::span<const std::uint64_t> keys,
                         std::span<const std::uint64_t> state) {
    const Netlist& nl = *netlist_;
    if (inputs.size() != input_nets_.size()) throw IncompleteAssignment("input word count mismatch");
    if (keys.size() != nl.key_inputs().size()) throw IncompleteAssignment("key word count mismatch");
    if (!state.empty() && state.size() != dffs_.size()) throw Error("state word count mismatch");
    for (std::size_t i = 0; i < inputs.size(); ++i) values_[input_nets_[i]] = inputs[i];
    for (std::size_t i = 0; i < keys.size(); ++i) values_[nl.key_inputs()[i]] = keys[i];

    const auto& gates = nl.gates();
    for (std::size_t i = 0; i < dffs_.size(); ++i) values_[gates[dffs_[i]].out] = state.empty() ? 0 : state[i];

    std::uint64_t* v = values_.data();
    for (std::size_t gi : order_) {
        const Gate& g = gates[gi];
        std::uint64_t r = 0;
        switch (g.kind) {
        case GateKind::And: r = v[g.in[0]] & v[g.in[1]]; break;
        case GateKind::Or: r = v[g.in[0]] | v[g.in[1]]; break;
        case GateKind::Nand: r = ~(v[g.in[0]] & v[g.in[1]]); break;
        case GateKind::Nor: r = ~(v[g.in[0]] | v[g.in[1]]); break;
        case GateKind::Xor: r = v[g.in[0]] ^ v[g.in[1]]; break;
        case GateKind::Xnor: r = ~(v[g.in[0]] ^ v[g.in[1]]); break;
        case GateKind::Not: r = ~v[g.in[0]]; break;
        case GateKind::Buf: r = v[g.in[0]]; break;
        case GateKind::Mux2: {
            std::uint64_t s = v[g.in[0]];
            r = (~s & v[g.in[1]]) | (s & v[g.in[2]]);
            break;
        }
        case GateKind::Const0: r = 0; break;
        case GateKind::Const1: r = ~std::uint64_t{0}; break;
        case GateKind::Dff: continue;
        }
        v[g.out] = r;
    }
}

std::vector<std::uint64_t> Simulator::eval(std::span<const std::uint64_t> inputs,
                                           std::span<const std::uint64_t> keys,
                                           std::span<const std::uint64_t> state) {
    evaluate(inputs, keys, state);
    std::vector<std::uint64_t> out(output_nets_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = values_[output_nets_[i]];
    return out;
}

std::vector<std::uint64_t> Simulator::step(std::span<const std::uint64_t> inputs,
                                           std::span<const std::uint64_t> keys,
                                           std::vector<std::uint64_t>& state) {
    state.resize(dffs_.size(), 0);
    auto out = eval(inputs, keys, state);
    const auto& gates = netlist_->gates();
    for (std::size_t i = 0; i < dffs_.size(); ++i) state[i] = values_[gates[dffs_[i]].in[0]];
    return out;
}

namespace {

std::vector<std::uint64_t> words_from(const Assignment& a, std::span<const NetId> nets, const char* what) {
    std::vector<std::uint64_t> words(nets.size());
    for (std::size_t i = 0; i < nets.size(); ++i) {
        auto v = a.get(nets[i]);
        if (!v) throw IncompleteAssignment(std::string(what) + " assignment misses net " + std::to_string(nets[i]));
        words[i] = *v ? ~std::uint64_t{0} : 0;
    }
    return words;
}

} // namespace

Assignment simulate_comb(const Netlist& netlist, const Assignment& x, const Assignment& k) {
    if (!netlist.is_combinational()) throw HasStateError("netlist has state elements");
    Simulator sim(netlist);
    auto in = netlist.input_nets();
    auto out = sim.eval(words_from(x, in, "input"), words_from(k, netlist.key_inputs(), "key"));
    Assignment y;
    auto outs = netlist.output_nets();
    for (std::size_t i = 0; i < outs.size(); ++i) y.set(outs[i], out[i] & 1U);
    return y;
}

std::vector<Assignment> simulate_seq(const Netlist& netlist, const std::vector<Assignment>& xs,
                                     const Assignment& k, int cycles) {
    if (cycles < 1) throw Error("cycles must be >= 1");
    Simulator sim(netlist);
    auto in = netlist.input_nets();
    auto outs = netlist.output_nets();
    auto keys = words_from(k, netlist.key_inputs(), "key");
    std::vector<std::uint64_t> state(sim.state_size(), 0);
    std::vector<Assignment> trace;
    Assignment zeros;
    for (NetId n : in) zeros.set(n, false);
    for (int c = 0; c < cycles; ++c) {
        const Assignment& x = static_cast<std::size_t>(c) < xs.size() ? xs[static_cast<std::size_t>(c)] : zeros;
        auto words = sim.step(words_from(x, in, "input"), keys, state);
        Assignment y;
        for (std::size_t i = 0; i < outs.size(); ++i) y.set(outs[i], words[i] & 1U);
        trace.push_back(std::move(y));
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Constant propagation

namespace {

// A literal of the residual circuit: a net (possibly complemented) or a constant.
struct Lit {
    NetId net = kNoNet; // kNoNet means constant `neg`
    bool neg = false;

    bool is_const() const { return net == kNoNet; }
    bool operator==(const Lit&) const = default;
    Lit operator~() const { return {net, !neg}; }
};

constexpr Lit kFalse{kNoNet, false};
constexpr Lit kTrue{kNoNet, true};

class Folder {
public:
    explicit Folder(Netlist& out) : out_(out) {}

    NetId materialize(Lit l) {
        if (l.is_const()) return l.neg ? out_.const1() : out_.const0();
        if (!l.neg) return l.net;
        auto it = negations_.find(l.net);
        if (it != negations_.end()) return it->second;
        NetId n = out_.add_gate(GateKind::Not, {l.net});
        negations_.emplace(l.net, n);
        return n;
    }

    Lit and2(Lit a, Lit b) {
        if (a == kFalse || b == kFalse) return kFalse;
        if (a == kTrue) return b;
        if (b == kTrue) return a;
        if (a == b) return a;
        if (a == ~b) return kFalse;
        if (a.neg && b.neg) return {out_.add_gate(GateKind::Nor, {a.net, b.net}), false};
        return {out_.add_gate(GateKind::And, {materialize(a), materialize(b)}), false};
    }

    Lit or2(Lit a, Lit b) {
        if (a == kTrue || b == kTrue) return kTrue;
        if (a == kFalse) return b;
        if (b == kFalse) return a;
        if (a == b) return a;
        if (a == ~b) return kTrue;
        if (a.neg && b.neg) return {out_.add_gate(GateKind::Nand, {a.net, b.net}), false};
        return {out_.add_gate(GateKind::Or, {materialize(a), materialize(b)}), false};
    }

    Lit xor2(Lit a, Lit b) {
        if (a.is_const()) return a.neg ? ~b : b;
        if (b.is_const()) return b.neg ? ~a : a;
        if (a.net == b.net) return a.neg == b.neg ? kFalse : kTrue;
        return {out_.add_gate(GateKind::Xor, {a.net, b.net}), a.neg != b.neg};
    }

    Lit mux(Lit s, Lit d0, Lit d1) {
        if (s.is_const()) return s.neg ? d1 : d0;
        if (d0 == d1) return d0;
        if (s.neg) {
            s = ~s;
            std::swap(d0, d1);
        }
        if (d0 == kFalse && d1 == kTrue) return s;
        if (d0 == kTrue && d1 == kFalse) return ~s;
        if (d0 == kFalse) return and2(s, d1);
        if (d1 == kTrue) return or2(s, d0);
        return {out_.add_gate(GateKind::Mux2, {s.net, materialize(d0), materialize(d1)}), false};
    }

    Lit nand2(Lit a, Lit b) {
        if (a.is_const() || b.is_const() || a.net == b.net) return ~and2(a, b);
        if (a.neg && b.neg) return {out_.add_gate(GateKind::Or, {a.net, b.net}), false};
        return {out_.add_gate(GateKind::Nand, {materialize(a), materialize(b)}), false};
    }

    Lit nor2(Lit a, Lit b) {
        if (a.is_const() || b.is_const() || a.net == b.net) return ~or2(a, b);
        if (a.neg && b.neg) return {out_.add_gate(GateKind::And, {a.net, b.net}), false};
        return {out_.add_gate(GateKind::Nor, {materialize(a), materialize(b)}), false};
    }

private:
    Netlist& out_;
    std::unordered_map<NetId, NetId> negations_;
};

} // namespace

PropagationResult propagate_constants(const Netlist& netlist, const Assignment& partial) {
    if (!netlist.is_combinational()) throw HasStateError("constant propagation needs a combinational netlist");

    PropagationResult result;
    Netlist& out = result.netlist;
    out.set_name(netlist.name());
    Folder fold(out);

    std::vector<Lit> lit(netlist.net_count());
    std::vector<char> known(netlist.net_count(), 0);

    for (const auto& group : netlist.input_buses()) {
        Bus kept;
        kept.is_signed = group.bus.is_signed;
        for (NetId n : group.bus.bits) {
            if (auto v = partial.get(n)) {
                lit[n] = *v ? kTrue : kFalse;
            } else {
                NetId m = out.add_net(netlist.net_name(n));
                kept.bits.push_back(m);
                lit[n] = {m, false};
            }
            known[n] = 1;
        }
        if (!kept.bits.empty()) out.adopt_input_bus(group.name, kept);
    }
    for (NetId k : netlist.key_inputs()) {
        NetId m = out.add_key_input();
        known[k] = 1;
        if (auto v = partial.get(k))
            lit[k] = *v ? kTrue : kFalse;
        else
            lit[k] = {m, false};
    }

    for (std::size_t gi : topological_order(netlist)) {
        const Gate& g = netlist.gate(gi);
        auto in = [&](int i) { return lit[g.in[static_cast<std::size_t>(i)]]; };
        Lit r;
        switch (g.kind) {
        case GateKind::And: r = fold.and2(in(0), in(1)); break;
        case GateKind::Or: r = fold.or2(in(0), in(1)); break;
        case GateKind::Nand: r = fold.nand2(in(0), in(1)); break;
        case GateKind::Nor: r = fold.nor2(in(0), in(1)); break;
        case GateKind::Xor: r = fold.xor2(in(0), in(1)); break;
        case GateKind::Xnor: r = ~fold.xor2(in(0), in(1)); break;
        case GateKind::Not: r = ~in(0); break;
        case GateKind::Buf: r = in(0); break;
        case GateKind::Mux2: r = fold.mux(in(0), in(1), in(2)); break;
        case GateKind::Const0: r = kFalse; break;
        case GateKind::Const1: r = kTrue; break;
        case GateKind::Dff: throw HasStateError("unexpected DFF");
        }
        lit[g.out] = r;
        known[g.out] = 1;
    }

    std::size_t flat = 0;
    for (const auto& group : netlist.output_buses()) {
        Bus bus;
        bus.is_signed = group.bus.is_signed;
        for (NetId n : group.bus.bits) {
            if (!known[n]) throw Error("output net is undriven");
            Lit l = lit[n];
            if (auto want = partial.get(n)) {
                if (l.is_const() && l.neg != *want)
                    throw ConflictError("output " + netlist.net_name(n) + " is constant " +
                                        std::to_string(int(l.neg)) + " but " + std::to_string(int(*want)) +
                                        " was observed");
                if (!l.is_const()) result.required.push_back({flat, *want});
            }
            bus.bits.push_back(fold.materialize(l));
            ++flat;
        }
        out.add_output_bus(group.name, bus);
    }
    return result;
}

Netlist combinational_frame(const Netlist& netlist) {
    Netlist frame = netlist;
    auto dffs = netlist.state_elements();
    if (dffs.empty()) return frame;
    Bus q, d;
    // Remove from the back so earlier indices stay valid.
    std::vector<std::pair<NetId, NetId>> cut;
    for (std::size_t gi : dffs) cut.emplace_back(netlist.gate(gi).out, netlist.gate(gi).in[0]);
    for (auto it = dffs.rbegin(); it != dffs.rend(); ++it) frame.remove_gate(*it);
    for (auto [out, data] : cut) {
        q.bits.push_back(out);
        d.bits.push_back(data);
    }
    frame.adopt_input_bus("__state_q", q);
    frame.add_output_bus("__state_d", d);
    return frame;
}

std::int64_t bits_to_int(const std::vector<bool>& bits, bool is_signed) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size() && i < 64; ++i)
        if (bits[i]) v |= std::uint64_t{1} << i;
    if (is_signed && !bits.empty() && bits.back() && bits.size() < 64) v |= ~std::uint64_t{0} << bits.size();
    return static_cast<std::int64_t>(v);
}

std::vector<bool> int_to_bits(std::int64_t value, std::size_t width) {
    std::vector<bool> bits(width);
    auto u = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < width; ++i) bits[i] = i < 64 ? ((u >> i) & 1U) : (value < 0);
    return bits;
}

Netlist scan_view(const Netlist& netlist) {
    auto dffs = netlist.state_elements();
    if (dffs.empty()) return netlist;
    Netlist out = netlist;
    Bus q, d;
    for (std::size_t g : dffs) {
        q.bits.push_back(netlist.gate(g).out);
        d.bits.push_back(netlist.gate(g).in[0]);
    }
    std::sort(dffs.rbegin(), dffs.rend());
    for (std::size_t g : dffs) out.remove_gate(g);
    out.adopt_input_bus("state", q);
    out.add_output_bus("next", d);
    return out;
}

} // namespace firlock
