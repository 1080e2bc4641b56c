#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "firlock/arith.hpp"
#include "firlock/netlist.hpp"

namespace firlock {

enum class FilterForm { Direct, Transposed, Folded };
enum class BlockKind { Cavm, Mcm, Tmcm };
/// Realization of plain constant multiplications.
enum class BlockStyle { Multiplier, ShiftAdds };

std::string to_string(FilterForm f);
std::string to_string(BlockKind k);
FilterForm parse_filter_form(const std::string& s);
BlockKind parse_block_kind(const std::string& s);

struct FilterSpec {
    std::string name = "fir";
    std::vector<std::int64_t> coefficients;
    int mbw = 8;
    int ibw = 8;
    FilterForm form = FilterForm::Direct;
    BlockStyle style = BlockStyle::ShiftAdds;

    std::size_t n() const { return coefficients.size(); }
    /// Throws SpecError when a coefficient does not fit mbw bits or sizes are degenerate.
    void validate() const;
    /// ibw + mbw + ceil(log2 n)
    std::size_t output_width() const;
};

/// {name, coefficients, mbw, ibw}; mbw defaults to the widest coefficient.
FilterSpec parse_filter_spec_json(const std::string& text);
std::string filter_spec_json(const FilterSpec& spec);
FilterSpec load_filter_spec(const std::string& path);

/// Callbacks that build the constant-multiplication block of a filter inside
/// the netlist under construction. Obfuscated realizers add key inputs.
struct BlockRealizer {
    /// sum_i c_i * xs[i]
    std::function<Bus(LogicBuilder&, const std::vector<Bus>& xs, std::size_t out_width)> cavm;
    /// c_i * x for every i
    std::function<std::vector<Bus>(LogicBuilder&, const Bus& x, std::size_t out_width)> mcm;
    /// c_sel * x
    std::function<Bus(LogicBuilder&, const Bus& x, const Bus& sel, std::size_t out_width)> tmcm;
};

BlockRealizer plain_realizer(std::vector<std::int64_t> coefficients, BlockStyle style);

/// Delay line of n-1 input registers feeding a CAVM block. Output Y is
/// combinational in the current sample (latency 0).
Netlist gen_direct(const FilterSpec& spec, const BlockRealizer& block);
/// MCM block feeding a register/adder chain. Latency 0.
Netlist gen_transposed(const FilterSpec& spec, const BlockRealizer& block);
/// TMCM block, counter, accumulator and sample history. Each sample is held
/// on X for n cycles; Y is valid (output "valid" = 1) on the last cycle of
/// the frame.
Netlist gen_folded(const FilterSpec& spec, const BlockRealizer& block);
/// Dispatches on spec.form with the plain realizer of spec.style.
Netlist gen_filter(const FilterSpec& spec);
Netlist gen_filter(const FilterSpec& spec, const BlockRealizer& block);

/// Standalone block with ports CAVM: X1..Xn -> Y; MCM: X -> Y1..Yn;
/// TMCM: X, SEL -> Y. All data buses are signed, ibw wide.
Netlist gen_block(BlockKind kind, std::size_t n, int ibw, int mbw, const BlockRealizer& block);
std::size_t block_output_width(BlockKind kind, std::size_t n, int ibw, int mbw);

/// Drives a filter netlist with one sample per frame and returns the output
/// sequence at valid cycles (every cycle for parallel forms, every n-th for
/// folded).
std::vector<std::int64_t> run_filter(const Netlist& netlist, FilterForm form, std::size_t n,
                                     const std::vector<std::int64_t>& samples,
                                     const std::vector<bool>& key = {});

/// y(j) = sum_i c_i x(j-i) with zero history; same length as xs.
std::vector<std::int64_t> golden_convolution(const std::vector<std::int64_t>& c,
                                             const std::vector<std::int64_t>& xs);

enum class Symmetry { Symmetric, Antisymmetric, Asymmetric };

struct FrequencyResponse {
    std::vector<double> omega;
    std::vector<double> amplitude;
    Symmetry symmetry = Symmetry::Symmetric;
    bool asymmetric() const { return symmetry == Symmetry::Asymmetric; }
};

Symmetry classify_symmetry(const std::vector<std::int64_t>& c);
/// Zero-phase amplitude on omega_k = pi k / (grid_points - 1).
FrequencyResponse zpfr(const std::vector<std::int64_t>& c, int grid_points);
std::string frequency_response_csv(const FrequencyResponse& r);

} // namespace firlock
