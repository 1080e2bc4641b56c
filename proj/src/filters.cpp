#include "firlock/filters.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace firlock {

std::string to_string(FilterForm f) {
    switch (f) {
    case FilterForm::Direct: return "direct";
    case FilterForm::Transposed: return "transposed";
    case FilterForm::Folded: return "folded";
    }
    return "?";
}

std::string to_string(BlockKind k) {
    switch (k) {
    case BlockKind::Cavm: return "cavm";
    case BlockKind::Mcm: return "mcm";
    case BlockKind::Tmcm: return "tmcm";
    }
    return "?";
}

FilterForm parse_filter_form(const std::string& s) {
    if (s == "direct") return FilterForm::Direct;
    if (s == "transposed") return FilterForm::Transposed;
    if (s == "folded") return FilterForm::Folded;
    throw SpecError("unknown filter form '" + s + "'");
}

BlockKind parse_block_kind(const std::string& s) {
    if (s == "cavm") return BlockKind::Cavm;
    if (s == "mcm") return BlockKind::Mcm;
    if (s == "tmcm") return BlockKind::Tmcm;
    throw SpecError("unknown block kind '" + s + "'");
}

void FilterSpec::validate() const {
    if (coefficients.empty()) throw SpecError("filter needs at least one coefficient");
    if (ibw < 2 || ibw > 30) throw SpecError("ibw must lie in [2, 30]");
    if (mbw < 1 || mbw > 30) throw SpecError("mbw must lie in [1, 30]");
    for (std::int64_t c : coefficients)
        if (signed_width(c) > mbw)
            throw SpecError("coefficient " + std::to_string(c) + " does not fit " + std::to_string(mbw) + " bits");
}

std::size_t FilterSpec::output_width() const {
    return block_output_width(BlockKind::Cavm, n(), ibw, mbw);
}

std::size_t block_output_width(BlockKind kind, std::size_t n, int ibw, int mbw) {
    std::size_t w = static_cast<std::size_t>(ibw + mbw);
    return kind == BlockKind::Cavm ? w + static_cast<std::size_t>(select_width(n)) : w;
}

FilterSpec parse_filter_spec_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("filter spec: ") + e.what());
    }
    FilterSpec s;
    try {
        s.name = j.value("name", std::string("fir"));
        s.coefficients = j.at("coefficients").get<std::vector<std::int64_t>>();
        int widest = 1;
        for (std::int64_t c : s.coefficients) widest = std::max(widest, signed_width(c));
        s.mbw = j.value("mbw", widest);
        s.ibw = j.value("ibw", 8);
        if (j.contains("form")) s.form = parse_filter_form(j.at("form").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("filter spec: ") + e.what());
    }
    s.validate();
    return s;
}

std::string filter_spec_json(const FilterSpec& spec) {
    nlohmann::json j;
    j["name"] = spec.name;
    j["coefficients"] = spec.coefficients;
    j["mbw"] = spec.mbw;
    j["ibw"] = spec.ibw;
    j["form"] = to_string(spec.form);
    return j.dump(2) + "\n";
}

FilterSpec load_filter_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_filter_spec_json(ss.str());
}

// ---------------------------------------------------------------------------
// Plain blocks

namespace {

Bus sum_to_width(LogicBuilder& b, const std::vector<SignedTerm>& terms, std::size_t width) {
    if (terms.empty()) return constant_bus(b, 0, width, true);
    Bus acc = terms[0].negative ? negate(b, terms[0].value) : terms[0].value;
    acc = resize(b, acc, width);
    for (std::size_t i = 1; i < terms.size(); ++i) {
        Bus next = terms[i].negative ? subtractor(b, acc, terms[i].value) : adder(b, acc, terms[i].value);
        acc = resize(b, next, width);
        acc.is_signed = true;
    }
    acc.is_signed = true;
    return acc;
}

Bus signed_resize(LogicBuilder& b, const Bus& a, std::size_t width) {
    Bus r = resize(b, a, width);
    r.is_signed = true;
    return r;
}

Bus const_times(LogicBuilder& b, std::int64_t c, const Bus& x, BlockStyle style) {
    if (style == BlockStyle::ShiftAdds) return dbr_const_mul(b, c, x);
    return array_multiplier(b, x, constant_bus(b, c, static_cast<std::size_t>(signed_width(c)), true));
}

} // namespace

BlockRealizer plain_realizer(std::vector<std::int64_t> coefficients, BlockStyle style) {
    BlockRealizer r;
    r.cavm = [coefficients, style](LogicBuilder& b, const std::vector<Bus>& xs, std::size_t width) {
        std::vector<SignedTerm> terms;
        for (std::size_t i = 0; i < coefficients.size(); ++i) {
            if (style == BlockStyle::ShiftAdds) {
                if (coefficients[i] != 0) terms.push_back(dbr_product(b, coefficients[i], xs.at(i)));
            } else {
                terms.push_back({const_times(b, coefficients[i], xs.at(i), style), false});
            }
        }
        return sum_to_width(b, terms, width);
    };
    r.mcm = [coefficients, style](LogicBuilder& b, const Bus& x, std::size_t width) {
        std::vector<Bus> ys;
        for (std::int64_t c : coefficients) ys.push_back(signed_resize(b, const_times(b, c, x, style), width));
        return ys;
    };
    r.tmcm = [coefficients, style](LogicBuilder& b, const Bus& x, const Bus& sel, std::size_t width) {
        if (style == BlockStyle::Multiplier) {
            bool is_signed = false;
            int cw = representation_width(coefficients, is_signed);
            Bus c = mux_tree_consts(b, sel, coefficients, static_cast<std::size_t>(cw));
            return signed_resize(b, array_multiplier(b, x, c), width);
        }
        std::vector<Bus> products;
        for (std::int64_t c : coefficients) products.push_back(signed_resize(b, dbr_const_mul(b, c, x), width));
        return mux_tree(b, sel, products);
    };
    return r;
}

// ---------------------------------------------------------------------------
// Filter forms

namespace {

Netlist start_filter(const FilterSpec& spec, Bus& x) {
    spec.validate();
    Netlist nl(spec.name);
    x = nl.add_input_bus("X", static_cast<std::size_t>(spec.ibw), true);
    return nl;
}

} // namespace

Netlist gen_direct(const FilterSpec& spec, const BlockRealizer& block) {
    Bus x;
    Netlist nl = start_filter(spec, x);
    LogicBuilder b(nl);
    std::vector<Bus> taps{x};
    for (std::size_t i = 1; i < spec.n(); ++i) taps.push_back(register_bus(b, taps.back()));
    Bus y = block.cavm(b, taps, spec.output_width());
    nl.add_output_bus("Y", signed_resize(b, y, spec.output_width()));
    nl.validate();
    return nl;
}

Netlist gen_transposed(const FilterSpec& spec, const BlockRealizer& block) {
    Bus x;
    Netlist nl = start_filter(spec, x);
    LogicBuilder b(nl);
    const std::size_t w = spec.output_width();
    std::vector<Bus> products = block.mcm(b, x, w);
    Bus s = signed_resize(b, products.back(), w);
    for (std::size_t i = spec.n() - 1; i-- > 0;) {
        Bus r = register_bus(b, s);
        s = signed_resize(b, adder(b, products[i], r), w);
    }
    nl.add_output_bus("Y", s);
    nl.validate();
    return nl;
}

Netlist gen_folded(const FilterSpec& spec, const BlockRealizer& block) {
    Bus x;
    Netlist nl = start_filter(spec, x);
    LogicBuilder b(nl);
    const std::size_t n = spec.n();
    const std::size_t w = spec.output_width();
    if (n == 1) {
        Bus sel;
        nl.add_output_bus("Y", signed_resize(b, block.tmcm(b, x, sel, w), w));
        nl.add_output_bus("valid", Bus{{b.one()}, false});
        nl.validate();
        return nl;
    }

    const std::size_t cw = static_cast<std::size_t>(select_width(n));
    // Registers are created on placeholder nets and closed once the next
    // state logic exists.
    auto make_register = [&](std::size_t width, bool is_signed) {
        Bus q;
        q.is_signed = is_signed;
        for (std::size_t i = 0; i < width; ++i) q.bits.push_back(nl.add_net());
        return q;
    };
    auto close_register = [&](const Bus& q, const Bus& d) {
        for (std::size_t i = 0; i < q.width(); ++i) {
            NetId data = d[i];
            nl.add_gate_driving(GateKind::Dff, std::span<const NetId>(&data, 1), q[i]);
        }
    };

    Bus cnt = make_register(cw, false);
    NetId first = equals_const(b, cnt, 0);
    NetId last = equals_const(b, cnt, n - 1);

    std::vector<Bus> history{x};
    for (std::size_t i = 1; i < n; ++i) history.push_back(make_register(x.width(), true));
    Bus current = mux_tree(b, cnt, history);

    Bus product = signed_resize(b, block.tmcm(b, current, cnt, w), w);
    Bus acc = make_register(w, true);
    Bus acc_in;
    acc_in.is_signed = true;
    for (NetId bit : acc.bits) acc_in.bits.push_back(b.and2(b.not1(first), bit));
    Bus acc_next = signed_resize(b, adder(b, acc_in, product), w);

    Bus cnt_inc = resize(b, adder(b, cnt, constant_bus(b, 1, 1, false)), cw);
    Bus cnt_next;
    for (std::size_t i = 0; i < cw; ++i) cnt_next.bits.push_back(b.and2(b.not1(last), cnt_inc[i]));
    close_register(cnt, cnt_next);
    for (std::size_t i = 1; i < n; ++i) {
        Bus d;
        for (std::size_t k = 0; k < x.width(); ++k) d.bits.push_back(b.mux2(last, history[i][k], history[i - 1][k]));
        close_register(history[i], d);
    }
    close_register(acc, acc_next);

    nl.add_output_bus("Y", acc_next);
    nl.add_output_bus("valid", Bus{{last}, false});
    nl.validate();
    return nl;
}

Netlist gen_filter(const FilterSpec& spec, const BlockRealizer& block) {
    switch (spec.form) {
    case FilterForm::Direct: return gen_direct(spec, block);
    case FilterForm::Transposed: return gen_transposed(spec, block);
    case FilterForm::Folded: return gen_folded(spec, block);
    }
    throw SpecError("unknown form");
}

Netlist gen_filter(const FilterSpec& spec) {
    return gen_filter(spec, plain_realizer(spec.coefficients, spec.style));
}

Netlist gen_block(BlockKind kind, std::size_t n, int ibw, int mbw, const BlockRealizer& block) {
    if (n == 0) throw SpecError("block needs at least one constant");
    Netlist nl(to_string(kind));
    LogicBuilder b(nl);
    const std::size_t ib = static_cast<std::size_t>(ibw);
    const std::size_t w = block_output_width(kind, n, ibw, mbw);
    switch (kind) {
    case BlockKind::Cavm: {
        std::vector<Bus> xs;
        for (std::size_t i = 0; i < n; ++i) xs.push_back(nl.add_input_bus("X" + std::to_string(i + 1), ib, true));
        nl.add_output_bus("Y", signed_resize(b, block.cavm(b, xs, w), w));
        break;
    }
    case BlockKind::Mcm: {
        Bus x = nl.add_input_bus("X", ib, true);
        auto ys = block.mcm(b, x, w);
        for (std::size_t i = 0; i < n; ++i) nl.add_output_bus("Y" + std::to_string(i + 1), signed_resize(b, ys.at(i), w));
        break;
    }
    case BlockKind::Tmcm: {
        Bus x = nl.add_input_bus("X", ib, true);
        Bus sel;
        if (n > 1) sel = nl.add_input_bus("SEL", static_cast<std::size_t>(select_width(n)), false);
        nl.add_output_bus("Y", signed_resize(b, block.tmcm(b, x, sel, w), w));
        break;
    }
    }
    nl.validate();
    return nl;
}

// ---------------------------------------------------------------------------
// Simulation helpers and oracles

std::vector<std::int64_t> run_filter(const Netlist& netlist, FilterForm form, std::size_t n,
                                     const std::vector<std::int64_t>& samples, const std::vector<bool>& key) {
    const PortGroup* xbus = netlist.find_input_bus("X");
    const PortGroup* ybus = netlist.find_output_bus("Y");
    if (!xbus || !ybus) throw SpecError("filter netlist needs ports X and Y");
    if (key.size() != netlist.key_inputs().size()) throw KeyLengthError("key length does not match key inputs");

    Simulator sim(netlist);
    std::vector<std::uint64_t> state(sim.state_size(), 0);
    std::vector<std::uint64_t> keys(key.begin(), key.end());
    std::vector<std::uint64_t> in(netlist.input_width(), 0);
    const std::size_t frame = form == FilterForm::Folded ? n : 1;

    std::vector<std::int64_t> out;
    out.reserve(samples.size());
    for (std::int64_t s : samples) {
        auto bits = int_to_bits(s, xbus->bus.width());
        for (std::size_t i = 0; i < bits.size(); ++i) in[i] = bits[i];
        std::vector<std::uint64_t> y;
        for (std::size_t c = 0; c < frame; ++c) y = sim.step(in, keys, state);
        std::vector<bool> ybits;
        for (std::size_t i = 0; i < ybus->bus.width(); ++i) ybits.push_back(y[i] & 1U);
        out.push_back(bits_to_int(ybits, true));
    }
    return out;
}

std::vector<std::int64_t> golden_convolution(const std::vector<std::int64_t>& c, const std::vector<std::int64_t>& xs) {
    std::vector<std::int64_t> y(xs.size(), 0);
    for (std::size_t j = 0; j < xs.size(); ++j)
        for (std::size_t i = 0; i < c.size() && i <= j; ++i) y[j] += c[i] * xs[j - i];
    return y;
}

Symmetry classify_symmetry(const std::vector<std::int64_t>& c) {
    const std::size_t n = c.size();
    bool sym = true, anti = true;
    for (std::size_t i = 0; i < n; ++i) {
        sym = sym && c[i] == c[n - 1 - i];
        anti = anti && c[i] == -c[n - 1 - i];
    }
    if (sym) return Symmetry::Symmetric;
    if (anti) return Symmetry::Antisymmetric;
    return Symmetry::Asymmetric;
}

FrequencyResponse zpfr(const std::vector<std::int64_t>& c, int grid_points) {
    if (grid_points < 2) throw SpecError("zpfr needs at least 2 grid points");
    FrequencyResponse r;
    r.symmetry = classify_symmetry(c);
    const double mid = (static_cast<double>(c.size()) - 1.0) / 2.0;
    for (int k = 0; k < grid_points; ++k) {
        double w = std::numbers::pi * k / (grid_points - 1);
        double a = 0.0;
        if (r.symmetry == Symmetry::Symmetric) {
            for (std::size_t i = 0; i < c.size(); ++i) a += static_cast<double>(c[i]) * std::cos(w * (static_cast<double>(i) - mid));
        } else if (r.symmetry == Symmetry::Antisymmetric) {
            for (std::size_t i = 0; i < c.size(); ++i) a += static_cast<double>(c[i]) * std::sin(w * (mid - static_cast<double>(i)));
        } else {
            double re = 0.0, im = 0.0;
            for (std::size_t i = 0; i < c.size(); ++i) {
                re += static_cast<double>(c[i]) * std::cos(w * static_cast<double>(i));
                im -= static_cast<double>(c[i]) * std::sin(w * static_cast<double>(i));
            }
            a = std::hypot(re, im);
        }
        r.omega.push_back(w);
        r.amplitude.push_back(a);
    }
    return r;
}

std::string frequency_response_csv(const FrequencyResponse& r) {
    std::ostringstream os;
    os.precision(17);
    os << "omega,amplitude\n";
    for (std::size_t i = 0; i < r.omega.size(); ++i) os << r.omega[i] << ',' << r.amplitude[i] << '\n';
    return os.str();
}

} // namespace firlock
