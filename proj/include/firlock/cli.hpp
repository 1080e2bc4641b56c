#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "firlock/netlist.hpp"

namespace firlock::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,       // module error
    kUsage = 2,         // bad command line
    kProvenPartial = 3, // attack ended with some key bits unresolved
    kTimeout = 4,       // attack budget exhausted
    kMismatch = 5,      // verify found a counterexample
    kInterrupted = 130,
};

/// Runs one command line; `args` excludes the program name. Diagnostics go
/// to `err` as a single line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Unsigned ripple-carry adder with inputs A, B and output S (width+1 bits).
Netlist adder_template(std::size_t width);

/// Parses "a..b" (inclusive) or a comma list. Throws ConfigError on an empty range.
std::vector<std::int64_t> parse_range(const std::string& text);

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fingerprint(const std::string& bytes);

} // namespace firlock::cli
