#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "firlock/netlist.hpp"

namespace firlock {

/// Gate factory over a netlist under construction. Folds constants,
/// trivial identities, and structurally identical gates.
class LogicBuilder {
public:
    explicit LogicBuilder(Netlist& netlist) : nl_(netlist) {}

    Netlist& netlist() { return nl_; }

    NetId zero() { return nl_.const0(); }
    NetId one() { return nl_.const1(); }
    NetId constant(bool v) { return v ? one() : zero(); }

    NetId not1(NetId a);
    NetId and2(NetId a, NetId b);
    NetId or2(NetId a, NetId b);
    NetId xor2(NetId a, NetId b);
    NetId xnor2(NetId a, NetId b) { return not1(xor2(a, b)); }
    /// select ? in1 : in0
    NetId mux2(NetId select, NetId in0, NetId in1);
    NetId dff(NetId data);

    NetId and_all(std::span<const NetId> nets);
    NetId or_all(std::span<const NetId> nets);

    /// Counters of arithmetic blocks built so far.
    struct Stats {
        std::size_t adders = 0;      // adder/subtractor/add-sub blocks
        std::size_t multipliers = 0; // array multipliers
    };
    Stats& stats() { return stats_; }

private:
    std::optional<bool> const_of(NetId n) const { return nl_.constant_value(n); }
    std::optional<NetId> inverse_of(NetId n) const;
    NetId make(GateKind kind, NetId a, NetId b = kNoNet, NetId c = kNoNet);

    struct Key {
        GateKind kind;
        NetId a, b, c;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const {
            std::size_t h = static_cast<std::size_t>(k.kind);
            for (NetId n : {k.a, k.b, k.c}) h = h * 1000003U ^ n;
            return h;
        }
    };

    Netlist& nl_;
    std::unordered_map<Key, NetId, KeyHash> cache_;
    Stats stats_;
};

/// Signed digit: value digit * 2^position, digit in {-1, +1}.
struct SignedDigit {
    int position = 0;
    int digit = 1;
    bool operator==(const SignedDigit&) const = default;
};

struct SignedDigitExpansion {
    std::int64_t source = 0;
    std::vector<SignedDigit> digits; // positions strictly increasing

    std::int64_t value() const;
    std::size_t nonzero_count() const { return digits.size(); }
};

enum class Recoding { Csd, Binary };

/// Canonical signed digit (non-adjacent) form.
SignedDigitExpansion csd_expand(std::int64_t c);
/// Plain binary digits of |c|, each carrying the sign of c.
SignedDigitExpansion binary_expand(std::int64_t c);

/// Width of the smallest two's-complement field holding v.
int signed_width(std::int64_t v);
/// Width of the smallest unsigned field holding v >= 0 (1 for 0).
int unsigned_width(std::int64_t v);
/// Smallest width representing every value: unsigned when all are
/// non-negative, two's complement otherwise. Sets is_signed accordingly.
int representation_width(std::span<const std::int64_t> values, bool& is_signed);

/// Constant bus of the given width; two's complement when is_signed.
Bus constant_bus(LogicBuilder& b, std::int64_t value, std::size_t width, bool is_signed);
/// Sign- or zero-extends (or truncates) to `width`.
Bus resize(LogicBuilder& b, const Bus& a, std::size_t width);

/// a + b, width max(wa, wb) + 1 (one more when mixing signedness).
Bus adder(LogicBuilder& b, const Bus& x, const Bus& y);
/// a - b, signed result.
Bus subtractor(LogicBuilder& b, const Bus& x, const Bus& y);
/// sel = 0: a + b; sel = 1: a - b. Signed result.
Bus add_sub_select(LogicBuilder& b, NetId sel, const Bus& x, const Bus& y);
Bus negate(LogicBuilder& b, const Bus& a);
/// Pure rewiring: s constant-zero LSBs are prepended.
Bus shift_left(LogicBuilder& b, const Bus& a, int s);
/// Exact product of width wa + wb (ripple-carry array multiplier).
Bus array_multiplier(LogicBuilder& b, const Bus& x, const Bus& y);

/// Product term c*x split into magnitude and sign so that consumers can
/// fold the negation into their adder.
struct SignedTerm {
    Bus value;
    bool negative = false;
};

/// |c| * x from shifted copies of x, one adder/subtractor per extra
/// nonzero digit.
SignedTerm dbr_product(LogicBuilder& b, std::int64_t c, const Bus& x, Recoding recoding = Recoding::Csd);
/// c * x at width signed_width(c) + x.width (explicit negation when c < 0).
Bus dbr_const_mul(LogicBuilder& b, std::int64_t c, const Bus& x, Recoding recoding = Recoding::Csd);
/// Sum of signed terms; negative terms are subtracted.
Bus sum_terms(LogicBuilder& b, std::span<const SignedTerm> terms);

/// choices[sel]; selections past the end pick the last choice.
Bus mux_tree(LogicBuilder& b, const Bus& sel, std::span<const Bus> choices);
/// Constant lookup; the bus is two's complement when any constant is negative.
Bus mux_tree_consts(LogicBuilder& b, const Bus& sel, std::span<const std::int64_t> consts, std::size_t width);

NetId equality_comparator(LogicBuilder& b, const Bus& x, const Bus& y);
/// 1 iff (x - k) mod 2^w lies in [0, cv].
NetId range_comparator(LogicBuilder& b, const Bus& x, const Bus& k, std::int64_t cv);
/// 1 iff unsigned value of a <= c.
NetId unsigned_le_const(LogicBuilder& b, const Bus& a, std::uint64_t c);
/// 1 iff a equals the constant (low bits of c).
NetId equals_const(LogicBuilder& b, const Bus& a, std::uint64_t c);

/// Number of select bits for `count` choices: ceil(log2(count)), 0 for 1.
int select_width(std::size_t count);

Bus register_bus(LogicBuilder& b, const Bus& d);

} // namespace firlock
