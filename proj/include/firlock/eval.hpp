#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "firlock/netlist.hpp"

namespace firlock {

/// Integer-level view of a combinational netlist: one value per input bus,
/// one value per output bus (two's complement for signed buses).
class BusEvaluator {
public:
    /// Keeps its own copy of the netlist.
    explicit BusEvaluator(const Netlist& netlist);

    std::vector<std::int64_t> eval(std::span<const std::int64_t> inputs, const std::vector<bool>& key = {});

    /// Up to 64 input vectors at once; returns one output vector per input vector.
    std::vector<std::vector<std::int64_t>> eval_batch(const std::vector<std::vector<std::int64_t>>& inputs,
                                                      const std::vector<bool>& key = {});

    /// Same with a different key per lane.
    std::vector<std::vector<std::int64_t>> eval_batch(const std::vector<std::vector<std::int64_t>>& inputs,
                                                      const std::vector<std::vector<bool>>& keys);

private:
    std::shared_ptr<const Netlist> netlist_;
    Simulator sim_;
};

/// Packs up to 64 bit vectors into per-bit words (lane i = vector i).
std::vector<std::uint64_t> pack_lanes(const std::vector<std::vector<bool>>& vectors, std::size_t width);

} // namespace firlock
