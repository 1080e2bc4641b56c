#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "firlock/error.hpp"

namespace firlock {

using NetId = std::uint32_t;
inline constexpr NetId kNoNet = ~NetId{0};

enum class GateKind : std::uint8_t {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Not,
    Buf,
    Mux2, // inputs: select, in0 (select=0), in1 (select=1)
    Const0,
    Const1,
    Dff, // input: data; output resets to 0
};

int arity(GateKind kind);
std::string_view gate_kind_name(GateKind kind);
bool is_constant(GateKind kind);

struct Gate {
    GateKind kind = GateKind::Buf;
    std::array<NetId, 3> in{kNoNet, kNoNet, kNoNet};
    NetId out = kNoNet;

    std::span<const NetId> inputs() const {
        return {in.data(), static_cast<std::size_t>(arity(kind))};
    }
};

/// Ordered bits, least significant first.
struct Bus {
    std::vector<NetId> bits;
    bool is_signed = false;

    std::size_t width() const { return bits.size(); }
    NetId operator[](std::size_t i) const { return bits[i]; }
    NetId msb() const { return bits.back(); }
};

struct PortGroup {
    std::string name;
    Bus bus;
};

/// Gate-level circuit: every net is driven by exactly one gate or one
/// input port. Primary inputs and outputs are grouped into named buses,
/// key inputs are individual nets named keyinput<i>.
class Netlist {
public:
    static constexpr int kUndriven = -1;
    static constexpr int kPrimaryInput = -2;
    static constexpr int kKeyInput = -3;

    Netlist() = default;
    explicit Netlist(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    void set_name(std::string name) { name_ = std::move(name); }

    NetId add_net(std::string name = {});
    std::size_t net_count() const { return net_names_.size(); }
    const std::string& net_name(NetId net) const { return net_names_.at(net); }
    void set_net_name(NetId net, std::string name) { net_names_.at(net) = std::move(name); }

    /// Adds a gate with a fresh output net; returns that net.
    NetId add_gate(GateKind kind, std::initializer_list<NetId> inputs, std::string out_name = {});
    /// Adds a gate driving an existing undriven net; returns the gate index.
    std::size_t add_gate_driving(GateKind kind, std::span<const NetId> inputs, NetId out);
    /// Repoints one input slot of an existing gate.
    void set_gate_input(std::size_t gate, int slot, NetId net);
    /// Detaches the driver of `net`; the net becomes undriven.
    void remove_gate(std::size_t gate);

    const std::vector<Gate>& gates() const { return gates_; }
    const Gate& gate(std::size_t i) const { return gates_.at(i); }
    std::size_t gate_count() const { return gates_.size(); }
    /// Gate count excluding CONST0/CONST1 sources.
    std::size_t logic_gate_count() const;

    /// Gate index driving `net`, or one of kUndriven/kPrimaryInput/kKeyInput.
    int driver(NetId net) const { return driver_.at(net); }
    bool is_primary_input(NetId net) const { return driver(net) == kPrimaryInput; }
    bool is_key_input(NetId net) const { return driver(net) == kKeyInput; }
    /// Value of a net driven by a CONST gate.
    std::optional<bool> constant_value(NetId net) const;

    NetId const0();
    NetId const1();

    Bus add_input_bus(const std::string& name, std::size_t width, bool is_signed = false);
    /// Appends a key input named keyinput<index>.
    NetId add_key_input();
    /// Turns an existing undriven net into a key input (keeps the net id).
    void adopt_key_input(NetId net);
    void set_key_inputs(std::vector<NetId> keys);
    void add_output_bus(const std::string& name, Bus bus);
    void set_output_bit(std::size_t flat_index, NetId net);
    /// Adds a primary input bus made of existing undriven nets.
    void adopt_input_bus(const std::string& name, Bus bus);

    const std::vector<PortGroup>& input_buses() const { return inputs_; }
    const std::vector<PortGroup>& output_buses() const { return outputs_; }
    const std::vector<NetId>& key_inputs() const { return keys_; }
    const PortGroup* find_input_bus(std::string_view name) const;
    const PortGroup* find_output_bus(std::string_view name) const;

    /// Input nets flattened in bus order (LSB first within a bus).
    std::vector<NetId> input_nets() const;
    std::vector<NetId> output_nets() const;
    std::size_t input_width() const;
    std::size_t output_width() const;

    /// Gate indices of DFFs.
    std::vector<std::size_t> state_elements() const;
    bool is_combinational() const;

    /// Every reader of each net (gate index, slot). Outputs are not listed.
    std::vector<std::vector<std::pair<std::size_t, int>>> fanouts() const;

    /// Throws Error when a structural invariant is violated.
    void validate() const;

private:
    std::string name_ = "top";
    std::vector<std::string> net_names_;
    std::vector<int> driver_;
    std::vector<Gate> gates_;
    std::vector<PortGroup> inputs_;
    std::vector<PortGroup> outputs_;
    std::vector<NetId> keys_;
    NetId const0_ = kNoNet;
    NetId const1_ = kNoNet;
};

/// Sparse association net -> bit value.
class Assignment {
public:
    Assignment() = default;

    void set(NetId net, bool value) { values_[net] = value; }
    std::optional<bool> get(NetId net) const;
    bool contains(NetId net) const { return values_.count(net) != 0; }
    bool complete_over(std::span<const NetId> nets) const;
    std::size_t size() const { return values_.size(); }
    auto begin() const { return values_.begin(); }
    auto end() const { return values_.end(); }

    /// Assigns `nets` from the bits of `value` (LSB first).
    void set_bits(std::span<const NetId> nets, std::uint64_t value);
    void set_bits(std::span<const NetId> nets, const std::vector<bool>& bits);

private:
    std::map<NetId, bool> values_;
};

/// Gates in evaluation order: DFFs first (their outputs are sources), then
/// combinational gates after all of their drivers.
std::vector<std::size_t> topological_order(const Netlist& netlist);

/// Bit-parallel evaluator: every net carries 64 independent patterns.
class Simulator {
public:
    explicit Simulator(const Netlist& netlist);

    const Netlist& netlist() const { return *netlist_; }

    /// Evaluates the combinational logic. `inputs` and `keys` hold one word
    /// per flattened input/key bit, `state` one word per DFF (in
    /// state_elements order). Returns one word per flattened output bit.
    std::vector<std::uint64_t> eval(std::span<const std::uint64_t> inputs,
                                    std::span<const std::uint64_t> keys,
                                    std::span<const std::uint64_t> state = {});

    /// Same as eval() and then latches DFF data into `state`.
    std::vector<std::uint64_t> step(std::span<const std::uint64_t> inputs,
                                    std::span<const std::uint64_t> keys,
                                    std::vector<std::uint64_t>& state);

    std::size_t state_size() const { return dffs_.size(); }
    /// Word of an arbitrary net after the last eval().
    std::uint64_t net_word(NetId net) const { return values_[net]; }

private:
    void evaluate(std::span<const std::uint64_t> inputs, std::span<const std::uint64_t> keys,
                  std::span<const std::uint64_t> state);

    const Netlist* netlist_;
    std::vector<std::size_t> order_;
    std::vector<std::size_t> dffs_;
    std::vector<NetId> input_nets_;
    std::vector<NetId> output_nets_;
    std::vector<std::uint64_t> values_;
};

/// Full-scan view: DFF outputs become the input bus "state" and DFF data
/// nets the output bus "next", both in state_elements order. Unchanged when
/// the netlist has no state.
Netlist scan_view(const Netlist& netlist);

/// Pure combinational evaluation; x and k must cover the primary and key inputs.
Assignment simulate_comb(const Netlist& netlist, const Assignment& x, const Assignment& k);

/// Cycle-accurate trace; DFFs start at 0 and latch at every step boundary.
/// Input assignments missing from `xs` (when cycles > xs.size()) hold zeros.
std::vector<Assignment> simulate_seq(const Netlist& netlist, const std::vector<Assignment>& xs,
                                     const Assignment& k, int cycles);

struct OutputRequirement {
    std::size_t output_index; // flattened output bit
    bool value;
};

struct PropagationResult {
    Netlist netlist;
    std::vector<OutputRequirement> required;
};

/// Folds the constants implied by `partial` (primary inputs, key inputs,
/// and output values). Fixed primary inputs disappear from the port list;
/// key ports are always kept so key indices stay aligned. Assigned outputs
/// become requirements on the residual circuit.
PropagationResult propagate_constants(const Netlist& netlist, const Assignment& partial);

/// Cuts every DFF: its output becomes a primary input bit of bus
/// "__state_q" and its data input a primary output bit of bus "__state_d".
Netlist combinational_frame(const Netlist& netlist);

/// Two's-complement helpers for LSB-first bit vectors.
std::int64_t bits_to_int(const std::vector<bool>& bits, bool is_signed);
std::vector<bool> int_to_bits(std::int64_t value, std::size_t width);

} // namespace firlock
