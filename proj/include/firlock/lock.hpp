#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "firlock/keymap.hpp"
#include "firlock/netlist.hpp"
#include "firlock/obfuscate.hpp"

namespace firlock {

struct PointFunctionConfig {
    std::size_t w = 0;            // key bits of the point function
    std::int64_t cv = 0;          // corruption value; 0 is the one-point function
    std::vector<bool> secret;     // K*, w bits, LSB first
    std::string comparand_bus;    // empty: first input bus
    std::vector<std::size_t> slice_bits; // empty: the w least significant bits
    std::optional<std::size_t> target_output; // flattened output bit; default the last one
};

/// g = f XOR (X_slice == K AND K != K*). New key ports are appended with role ll.
ProtectedDesign lock_one_point(const ProtectedDesign& design, PointFunctionConfig cfg);
ProtectedDesign lock_one_point(const Netlist& netlist, PointFunctionConfig cfg);
/// g = f XOR ((X_slice - K) mod 2^w <= cv AND K != K*).
ProtectedDesign lock_relaxed(const ProtectedDesign& design, const PointFunctionConfig& cfg);
ProtectedDesign lock_relaxed(const Netlist& netlist, const PointFunctionConfig& cfg);

/// XOR (secret 0) or XNOR (secret 1) key gates on p distinct observable internal nets.
ProtectedDesign lock_rll(const Netlist& netlist, std::size_t p, std::uint64_t seed);

/// Point-function lock of an obfuscated design followed by key hiding: every
/// original key net is driven by XOR/XNOR(own port, partner port), the gate
/// kind chosen by the partner's secret bit. ll bits partner a random obf bit,
/// obf bits partner a distinct obf bit (seeded derangement).
ProtectedDesign hybridize(const ProtectedDesign& obf, const PointFunctionConfig& cfg, std::uint64_t seed);

/// Random secret for a point function of w bits.
std::vector<bool> random_key(std::size_t w, std::uint64_t seed);

} // namespace firlock
