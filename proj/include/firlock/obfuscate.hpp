#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "firlock/filters.hpp"
#include "firlock/keymap.hpp"
#include "firlock/netlist.hpp"

namespace firlock {

enum class Criterion { HardwareComplexity, OutputCorruption, FilterBehavior };
enum class Architecture { Straightforward, Mul, ShiftAdds, Crk };

std::string to_string(Criterion c);
std::string to_string(Architecture a);
/// Accepts hc|oc|fb.
Criterion parse_criterion(const std::string& s);
/// Accepts straightforward|mul|sa|crk.
Architecture parse_architecture(const std::string& s);

/// Decoys for every constant. The number of key bits granted per constant
/// follows the doubling schedule: pass noi hands 2^noi new decoys to each
/// constant in turn, one key bit per grant, until v bits are used.
/// Decoys are mbw-bit two's-complement values, unique per constant.
std::vector<std::vector<std::int64_t>> select_decoys(const std::vector<std::int64_t>& c, int v, Criterion criterion,
                                                     int mbw, std::uint64_t seed);

struct DecoyPlan {
    std::vector<std::int64_t> c;
    std::vector<std::vector<std::int64_t>> d;
    std::vector<std::vector<std::int64_t>> r;
    std::vector<std::size_t> secret_pos; // index of c_i in r_i
    std::vector<std::int64_t> s;
    std::vector<std::vector<std::int64_t>> t;
    int mbw = 8;
    Criterion criterion = Criterion::HardwareComplexity;
    std::uint64_t seed = 0;

    std::size_t n() const { return c.size(); }
    /// ceil(log2(|r_i|))
    std::size_t key_width(std::size_t i) const;
    std::size_t key_offset(std::size_t i) const;
    std::size_t v() const;
    /// Concatenated MUX selects; constant 1 occupies the least significant bits.
    std::vector<bool> secret_key() const;
    /// Constant each MUX picks under `key` (out-of-range selects clamp to the last entry).
    std::vector<std::int64_t> effective_coefficients(const std::vector<bool>& key) const;

    std::string to_json() const;
    static DecoyPlan from_json(const std::string& text);
};

/// Shuffles c_i among its decoys with the seed, then picks S and T.
DecoyPlan build_plan(const std::vector<std::int64_t>& c, const std::vector<std::vector<std::int64_t>>& d, int mbw,
                     std::uint64_t seed, Criterion criterion = Criterion::HardwareComplexity);
/// Plan from a given R ordering; c_i sits at secret_pos[i].
DecoyPlan build_plan_from_r(const std::vector<std::vector<std::int64_t>>& r, const std::vector<std::size_t>& secret_pos,
                            int mbw);
/// Base constant for one R array: the entry minimizing the width of
/// T = R - s (unsigned when all entries are >= 0), ties toward smaller |s|.
std::int64_t choose_base(const std::vector<std::int64_t>& r);

struct ProtectedDesign {
    Netlist netlist;
    KeyMap keys;
};

/// Block realizer whose MUX selects are fresh key inputs (keyinput order
/// follows constant order).
BlockRealizer decoy_realizer(const DecoyPlan& plan, Architecture arch);
/// Constant bits replaced by key inputs: the first p_bits positions of the
/// LSB-first, round-robin-over-constants order.
BlockRealizer crk_realizer(const std::vector<std::int64_t>& c, int mbw, std::size_t p_bits);
std::vector<bool> crk_secret(const std::vector<std::int64_t>& c, int mbw, std::size_t p_bits);

ProtectedDesign obfuscate_block(BlockKind kind, const FilterSpec& spec, const DecoyPlan& plan, Architecture arch);
ProtectedDesign obfuscate_cavm(const FilterSpec& spec, const DecoyPlan& plan, Architecture arch);
ProtectedDesign obfuscate_mcm(const FilterSpec& spec, const DecoyPlan& plan, Architecture arch);
ProtectedDesign obfuscate_tmcm(const FilterSpec& spec, const DecoyPlan& plan, Architecture arch);
ProtectedDesign obfuscate_crk(const FilterSpec& spec, BlockKind kind, std::size_t p_bits);

/// Whole filter (form from spec) with its constant block obfuscated:
/// direct -> CAVM, transposed -> MCM, folded -> TMCM.
ProtectedDesign obfuscate_filter(const FilterSpec& spec, const DecoyPlan& plan, Architecture arch);

BlockKind block_kind_of(FilterForm form);
/// Plain reference of the block (multiplier style).
Netlist plain_block(BlockKind kind, const FilterSpec& spec);

} // namespace firlock
