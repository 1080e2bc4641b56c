#include "firlock/arith.hpp"

#include <algorithm>
#include <cstdlib>

namespace firlock {

// ---------------------------------------------------------------------------
// LogicBuilder

std::optional<NetId> LogicBuilder::inverse_of(NetId n) const {
    int d = nl_.driver(n);
    if (d >= 0 && nl_.gate(static_cast<std::size_t>(d)).kind == GateKind::Not)
        return nl_.gate(static_cast<std::size_t>(d)).in[0];
    return std::nullopt;
}

NetId LogicBuilder::make(GateKind kind, NetId a, NetId b, NetId c) {
    if (kind != GateKind::Mux2 && kind != GateKind::Not && b < a) std::swap(a, b);
    Key key{kind, a, b, c};
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    NetId out;
    switch (arity(kind)) {
    case 1: out = nl_.add_gate(kind, {a}); break;
    case 2: out = nl_.add_gate(kind, {a, b}); break;
    default: out = nl_.add_gate(kind, {a, b, c}); break;
    }
    cache_.emplace(key, out);
    return out;
}

NetId LogicBuilder::not1(NetId a) {
    if (auto v = const_of(a)) return constant(!*v);
    if (auto inv = inverse_of(a)) return *inv;
    return make(GateKind::Not, a);
}

NetId LogicBuilder::and2(NetId a, NetId b) {
    auto ca = const_of(a), cb = const_of(b);
    if ((ca && !*ca) || (cb && !*cb)) return zero();
    if (ca) return b;
    if (cb) return a;
    if (a == b) return a;
    if (inverse_of(a) == b || inverse_of(b) == a) return zero();
    return make(GateKind::And, a, b);
}

NetId LogicBuilder::or2(NetId a, NetId b) {
    auto ca = const_of(a), cb = const_of(b);
    if ((ca && *ca) || (cb && *cb)) return one();
    if (ca) return b;
    if (cb) return a;
    if (a == b) return a;
    if (inverse_of(a) == b || inverse_of(b) == a) return one();
    return make(GateKind::Or, a, b);
}

NetId LogicBuilder::xor2(NetId a, NetId b) {
    auto ca = const_of(a), cb = const_of(b);
    if (ca) return *ca ? not1(b) : b;
    if (cb) return *cb ? not1(a) : a;
    if (a == b) return zero();
    if (inverse_of(a) == b || inverse_of(b) == a) return one();
    return make(GateKind::Xor, a, b);
}

NetId LogicBuilder::mux2(NetId s, NetId in0, NetId in1) {
    if (auto cs = const_of(s)) return *cs ? in1 : in0;
    if (in0 == in1) return in0;
    auto c0 = const_of(in0), c1 = const_of(in1);
    if (c0 && c1) return *c1 ? s : not1(s);
    if (c0) return *c0 ? or2(not1(s), in1) : and2(s, in1);
    if (c1) return *c1 ? or2(s, in0) : and2(not1(s), in0);
    return make(GateKind::Mux2, s, in0, in1);
}

NetId LogicBuilder::dff(NetId data) {
    if (auto c = const_of(data); c && !*c) return zero();
    return nl_.add_gate(GateKind::Dff, {data});
}

NetId LogicBuilder::and_all(std::span<const NetId> nets) {
    if (nets.empty()) return one();
    // Balanced reduction keeps the depth logarithmic.
    std::vector<NetId> level(nets.begin(), nets.end());
    while (level.size() > 1) {
        std::vector<NetId> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(and2(level[i], level[i + 1]));
        if (level.size() % 2) next.push_back(level.back());
        level = std::move(next);
    }
    return level[0];
}

NetId LogicBuilder::or_all(std::span<const NetId> nets) {
    if (nets.empty()) return zero();
    std::vector<NetId> level(nets.begin(), nets.end());
    while (level.size() > 1) {
        std::vector<NetId> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(or2(level[i], level[i + 1]));
        if (level.size() % 2) next.push_back(level.back());
        level = std::move(next);
    }
    return level[0];
}

// ---------------------------------------------------------------------------
// Digit recodings

std::int64_t SignedDigitExpansion::value() const {
    std::int64_t v = 0;
    for (const auto& d : digits) v += static_cast<std::int64_t>(d.digit) * (std::int64_t{1} << d.position);
    return v;
}

SignedDigitExpansion csd_expand(std::int64_t c) {
    SignedDigitExpansion e;
    e.source = c;
    std::int64_t v = c;
    int pos = 0;
    while (v != 0) {
        if (v & 1) {
            // mod 4 == 1 -> +1, mod 4 == 3 -> -1 (non-adjacent form)
            int d = ((v & 3) == 1) ? 1 : -1;
            e.digits.push_back({pos, d});
            v -= d;
        }
        v /= 2;
        ++pos;
    }
    return e;
}

SignedDigitExpansion binary_expand(std::int64_t c) {
    SignedDigitExpansion e;
    e.source = c;
    std::uint64_t m = c < 0 ? static_cast<std::uint64_t>(-c) : static_cast<std::uint64_t>(c);
    int sign = c < 0 ? -1 : 1;
    for (int pos = 0; m != 0; ++pos, m >>= 1)
        if (m & 1U) e.digits.push_back({pos, sign});
    return e;
}

int signed_width(std::int64_t v) {
    int w = 1;
    while (w < 64 && (v < -(std::int64_t{1} << (w - 1)) || v > (std::int64_t{1} << (w - 1)) - 1)) ++w;
    return w;
}

int unsigned_width(std::int64_t v) {
    int w = 1;
    while (w < 63 && v >= (std::int64_t{1} << w)) ++w;
    return w;
}

int representation_width(std::span<const std::int64_t> values, bool& is_signed) {
    is_signed = std::any_of(values.begin(), values.end(), [](std::int64_t v) { return v < 0; });
    int w = 1;
    for (std::int64_t v : values) w = std::max(w, is_signed ? signed_width(v) : unsigned_width(v));
    return w;
}

int select_width(std::size_t count) {
    int w = 0;
    while ((std::size_t{1} << w) < count) ++w;
    return w;
}

// ---------------------------------------------------------------------------
// Bus arithmetic

Bus constant_bus(LogicBuilder& b, std::int64_t value, std::size_t width, bool is_signed) {
    Bus bus;
    bus.is_signed = is_signed;
    auto u = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < width; ++i) bus.bits.push_back(b.constant(i < 64 ? ((u >> i) & 1U) : value < 0));
    return bus;
}

Bus resize(LogicBuilder& b, const Bus& a, std::size_t width) {
    Bus r;
    r.is_signed = a.is_signed;
    NetId fill = a.is_signed && a.width() > 0 ? a.msb() : b.zero();
    for (std::size_t i = 0; i < width; ++i) r.bits.push_back(i < a.width() ? a[i] : fill);
    return r;
}

namespace {

void require_width(const Bus& a) {
    if (a.width() == 0) throw WidthError("zero-width bus");
}

// Makes an unsigned operand signed by adding a zero MSB.
Bus as_signed(LogicBuilder& b, const Bus& a) {
    if (a.is_signed) return a;
    Bus r = resize(b, a, a.width() + 1);
    r.is_signed = true;
    return r;
}

// x + (invert ? ~y : y) + cin over equal widths; carry out dropped.
std::vector<NetId> ripple(LogicBuilder& b, std::span<const NetId> x, std::span<const NetId> y, NetId invert,
                          NetId cin) {
    std::vector<NetId> sum(x.size());
    NetId carry = cin;
    for (std::size_t i = 0; i < x.size(); ++i) {
        NetId yi = b.xor2(y[i], invert);
        NetId p = b.xor2(x[i], yi);
        sum[i] = b.xor2(p, carry);
        if (i + 1 < x.size()) carry = b.or2(b.and2(x[i], yi), b.and2(carry, p));
    }
    return sum;
}

Bus add_sub_impl(LogicBuilder& b, const Bus& x0, const Bus& y0, NetId subtract, bool force_signed) {
    require_width(x0);
    require_width(y0);
    Bus x = x0, y = y0;
    if (force_signed || x.is_signed != y.is_signed) {
        x = as_signed(b, x);
        y = as_signed(b, y);
    }
    std::size_t w = std::max(x.width(), y.width()) + 1;
    Bus xs = resize(b, x, w), ys = resize(b, y, w);
    Bus r;
    r.is_signed = x.is_signed;
    r.bits = ripple(b, xs.bits, ys.bits, subtract, subtract);
    ++b.stats().adders;
    return r;
}

} // namespace

Bus adder(LogicBuilder& b, const Bus& x, const Bus& y) {
    return add_sub_impl(b, x, y, b.zero(), false);
}

Bus subtractor(LogicBuilder& b, const Bus& x, const Bus& y) {
    return add_sub_impl(b, x, y, b.one(), true);
}

Bus add_sub_select(LogicBuilder& b, NetId sel, const Bus& x, const Bus& y) {
    return add_sub_impl(b, x, y, sel, true);
}

Bus negate(LogicBuilder& b, const Bus& a) {
    return subtractor(b, constant_bus(b, 0, 1, true), a);
}

Bus shift_left(LogicBuilder& b, const Bus& a, int s) {
    if (s < 0) throw WidthError("negative shift");
    Bus r;
    r.is_signed = a.is_signed;
    r.bits.assign(static_cast<std::size_t>(s), b.zero());
    r.bits.insert(r.bits.end(), a.bits.begin(), a.bits.end());
    return r;
}

Bus array_multiplier(LogicBuilder& b, const Bus& x, const Bus& y) {
    require_width(x);
    require_width(y);
    const std::size_t w = x.width() + y.width();
    Bus xe = resize(b, x, w);
    std::vector<NetId> acc(w, b.zero());
    for (std::size_t i = 0; i < y.width(); ++i) {
        std::vector<NetId> row;
        for (std::size_t j = i; j < w; ++j) row.push_back(b.and2(xe[j - i], y[i]));
        const bool negative_row = y.is_signed && i + 1 == y.width();
        NetId sub = b.constant(negative_row);
        // Bits below i are untouched: the row is zero there and, when
        // subtracting, the +1 carry ripples through the inverted zeros.
        auto upper = ripple(b, std::span<const NetId>(acc).subspan(i), row, sub, sub);
        std::copy(upper.begin(), upper.end(), acc.begin() + static_cast<std::ptrdiff_t>(i));
    }
    ++b.stats().multipliers;
    Bus r;
    r.bits = std::move(acc);
    r.is_signed = x.is_signed || y.is_signed;
    return r;
}

SignedTerm dbr_product(LogicBuilder& b, std::int64_t c, const Bus& x, Recoding recoding) {
    require_width(x);
    if (c == 0) return {constant_bus(b, 0, 1, true), false};
    std::int64_t mag = std::llabs(c);
    SignedDigitExpansion e = recoding == Recoding::Csd ? csd_expand(mag) : binary_expand(mag);

    std::vector<SignedTerm> terms;
    for (const auto& d : e.digits) terms.push_back({shift_left(b, x, d.position), d.digit < 0});
    Bus acc = sum_terms(b, terms);

    std::size_t width = static_cast<std::size_t>(unsigned_width(mag)) + x.width() + (x.is_signed ? 0 : 1);
    Bus r = resize(b, acc, width);
    r.is_signed = true;
    return {r, c < 0};
}

Bus dbr_const_mul(LogicBuilder& b, std::int64_t c, const Bus& x, Recoding recoding) {
    SignedTerm t = dbr_product(b, c, x, recoding);
    Bus v = t.negative ? negate(b, t.value) : t.value;
    Bus r = resize(b, v, static_cast<std::size_t>(signed_width(c)) + x.width());
    r.is_signed = true;
    return r;
}

Bus sum_terms(LogicBuilder& b, std::span<const SignedTerm> terms) {
    if (terms.empty()) return constant_bus(b, 0, 1, true);
    auto first = std::find_if(terms.begin(), terms.end(), [](const SignedTerm& t) { return !t.negative; });
    Bus acc;
    if (first == terms.end()) {
        acc = negate(b, terms.front().value);
        first = terms.begin();
    } else {
        acc = first->value;
    }
    for (auto it = terms.begin(); it != terms.end(); ++it) {
        if (it == first) continue;
        acc = it->negative ? subtractor(b, acc, it->value) : adder(b, acc, it->value);
    }
    return acc;
}

namespace {

Bus mux_bus(LogicBuilder& b, NetId s, const Bus& a, const Bus& c) {
    Bus r;
    r.is_signed = a.is_signed;
    for (std::size_t i = 0; i < a.width(); ++i) r.bits.push_back(b.mux2(s, a[i], c[i]));
    return r;
}

} // namespace

Bus mux_tree(LogicBuilder& b, const Bus& sel, std::span<const Bus> choices) {
    if (choices.empty()) throw WidthError("mux_tree needs at least one choice");
    for (const auto& c : choices)
        if (c.width() != choices[0].width() || c.width() == 0) throw WidthError("mux_tree choices differ in width");
    const int needed = select_width(choices.size());
    if (static_cast<int>(sel.width()) < needed) throw WidthError("select bus too narrow");

    std::vector<Bus> level(choices.begin(), choices.end());
    level.resize(std::size_t{1} << needed, choices.back());
    for (int bit = 0; bit < needed; ++bit) {
        std::vector<Bus> next;
        for (std::size_t i = 0; i < level.size(); i += 2)
            next.push_back(mux_bus(b, sel[static_cast<std::size_t>(bit)], level[i], level[i + 1]));
        level = std::move(next);
    }
    Bus r = level[0];
    if (static_cast<int>(sel.width()) > needed) {
        std::vector<NetId> extra(sel.bits.begin() + needed, sel.bits.end());
        r = mux_bus(b, b.or_all(extra), r, choices.back());
    }
    return r;
}

Bus mux_tree_consts(LogicBuilder& b, const Bus& sel, std::span<const std::int64_t> consts, std::size_t width) {
    const bool is_signed = std::any_of(consts.begin(), consts.end(), [](std::int64_t c) { return c < 0; });
    std::vector<Bus> choices;
    for (std::int64_t c : consts) choices.push_back(constant_bus(b, c, width, is_signed));
    return mux_tree(b, sel, choices);
}

NetId equality_comparator(LogicBuilder& b, const Bus& x, const Bus& y) {
    if (x.width() != y.width() || x.width() == 0) throw WidthError("equality_comparator width mismatch");
    std::vector<NetId> eq;
    for (std::size_t i = 0; i < x.width(); ++i) eq.push_back(b.xnor2(x[i], y[i]));
    return b.and_all(eq);
}

NetId unsigned_le_const(LogicBuilder& b, const Bus& a, std::uint64_t c) {
    if (a.width() < 64 && c >= (std::uint64_t{1} << a.width())) return b.one();
    NetId le = b.one();
    for (std::size_t i = 0; i < a.width(); ++i) {
        NetId lt_here = b.not1(a[i]);
        le = ((c >> i) & 1U) ? b.or2(lt_here, le) : b.and2(lt_here, le);
    }
    return le;
}

NetId equals_const(LogicBuilder& b, const Bus& a, std::uint64_t c) {
    std::vector<NetId> lits;
    for (std::size_t i = 0; i < a.width(); ++i) lits.push_back(((c >> i) & 1U) ? a[i] : b.not1(a[i]));
    return b.and_all(lits);
}

NetId range_comparator(LogicBuilder& b, const Bus& x, const Bus& k, std::int64_t cv) {
    if (x.width() != k.width() || x.width() == 0) throw WidthError("range_comparator width mismatch");
    if (cv < 0) throw WidthError("negative corruption value");
    if (cv == 0) return equality_comparator(b, x, k);
    Bus diff;
    diff.bits = ripple(b, x.bits, k.bits, b.one(), b.one());
    ++b.stats().adders;
    return unsigned_le_const(b, diff, static_cast<std::uint64_t>(cv));
}

Bus register_bus(LogicBuilder& b, const Bus& d) {
    Bus q;
    q.is_signed = d.is_signed;
    for (NetId n : d.bits) q.bits.push_back(b.dff(n));
    return q;
}

} // namespace firlock
