#pragma once

#include <string>
#include <string_view>

#include "firlock/netlist.hpp"

namespace firlock {

/// Reads an ISCAS-style BENCH netlist. A lone word in a comment on line 1
/// names the circuit. Inputs named keyinput<i> become key
/// inputs (ordered by i); names of the form bus[i] are grouped into buses.
/// Bus signedness comes from "# bus <name> signed" comment directives.
/// MUX(s,a,b), CONST0()/CONST1() and n-ary AND/OR/NAND/NOR/XOR/XNOR are
/// accepted and reduced to the primitive gate kinds.
Netlist parse_bench(std::string_view text);

/// Writes BENCH text. MUX2 is lowered to AND/OR/NOT; constants use
/// CONST0()/CONST1(). Output bits that alias an input or another output
/// bit get a BUFF alias line.
std::string emit_bench(const Netlist& netlist);

/// Structural Verilog: one module, one primitive instance or assign per
/// gate, DFFs as a zero-initialized register clocked by `clk`.
std::string emit_structural_hdl(const Netlist& netlist);

} // namespace firlock
