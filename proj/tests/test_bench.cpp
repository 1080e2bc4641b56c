#include <doctest.h>

#include <map>
#include <random>
#include <regex>
#include <sstream>

#include "firlock/bench.hpp"
#include "firlock/eval.hpp"
#include "firlock/filters.hpp"
#include "fixtures.hpp"

using namespace firlock;

namespace {

// Straight-line interpreter for the emitted combinational Verilog subset.
class MiniVerilog {
public:
    explicit MiniVerilog(const std::string& text) {
        std::istringstream in(text);
        std::string line;
        static const std::regex decl(R"(^\s*input\s+(?:signed\s+)?(?:\[(\d+):0\]\s+)?(\w+);)");
        while (std::getline(in, line)) {
            std::smatch m;
            if (std::regex_search(line, m, decl)) {
                int w = m[1].matched ? std::stoi(m[1].str()) + 1 : 1;
                inputs_.emplace_back(m[2].str(), w);
            } else if (line.find("assign") != std::string::npos || line.find(" g") != std::string::npos) {
                body_.push_back(line);
            }
        }
    }

    // values keyed by port name, LSB-first bits
    std::map<std::string, bool> run(const std::map<std::string, std::vector<bool>>& ports) const {
        std::map<std::string, bool> v;
        for (const auto& [name, w] : inputs_) {
            const auto& bits = ports.at(name);
            for (int i = 0; i < w; ++i) v[w == 1 ? name : name + "[" + std::to_string(i) + "]"] = bits.at(i);
        }
        static const std::regex assign_const(R"(^\s*assign\s+(\S+)\s*=\s*1'b([01]);)");
        static const std::regex assign_mux(R"(^\s*assign\s+(\S+)\s*=\s*(\S+)\s*\?\s*(\S+)\s*:\s*(\S+);)");
        static const std::regex assign_ref(R"(^\s*assign\s+(\S+)\s*=\s*(\S+);)");
        static const std::regex prim(R"(^\s*(\w+)\s+g\d+\s*\(([^)]*)\);)");
        for (const auto& line : body_) {
            std::smatch m;
            if (std::regex_search(line, m, assign_const)) {
                v[m[1]] = m[2] == "1";
            } else if (std::regex_search(line, m, assign_mux)) {
                v[m[1]] = v.at(m[2]) ? v.at(m[3]) : v.at(m[4]);
            } else if (std::regex_search(line, m, assign_ref)) {
                v[m[1]] = v.at(m[2]);
            } else if (std::regex_search(line, m, prim)) {
                std::vector<std::string> args;
                std::stringstream ss(m[2].str());
                for (std::string a; std::getline(ss, a, ',');) {
                    a.erase(0, a.find_first_not_of(' '));
                    args.push_back(a);
                }
                std::string op = m[1];
                bool a = v.at(args[1]);
                bool r = false;
                if (op == "not") r = !a;
                else if (op == "buf") r = a;
                else {
                    bool b = v.at(args[2]);
                    if (op == "and") r = a && b;
                    else if (op == "or") r = a || b;
                    else if (op == "nand") r = !(a && b);
                    else if (op == "nor") r = !(a || b);
                    else if (op == "xor") r = a != b;
                    else if (op == "xnor") r = a == b;
                    else FAIL("unknown primitive " << op);
                }
                v[args[0]] = r;
            }
        }
        return v;
    }

private:
    std::vector<std::pair<std::string, int>> inputs_;
    std::vector<std::string> body_;
};

std::vector<std::vector<bool>> random_vectors(std::mt19937_64& rng, std::size_t width, int count) {
    std::vector<std::vector<bool>> out;
    for (int i = 0; i < count; ++i) {
        std::vector<bool> v(width);
        for (std::size_t b = 0; b < width; ++b) v[b] = rng() & 1U;
        out.push_back(v);
    }
    return out;
}

// Compares two netlists with identical port shapes on random vectors.
void check_same_function(const Netlist& a, const Netlist& b, std::mt19937_64& rng, int count) {
    REQUIRE(a.input_width() == b.input_width());
    REQUIRE(a.output_width() == b.output_width());
    REQUIRE(a.key_inputs().size() == b.key_inputs().size());
    Simulator sa(a), sb(b);
    for (int round = 0; round < (count + 63) / 64; ++round) {
        std::vector<std::uint64_t> in(a.input_width()), key(a.key_inputs().size());
        for (auto& w : in) w = rng();
        for (auto& w : key) w = rng();
        std::vector<std::uint64_t> st_a(sa.state_size()), st_b(sb.state_size());
        REQUIRE(sa.eval(in, key, st_a) == sb.eval(in, key, st_b));
    }
}

} // namespace

TEST_CASE("bench round trip of a small file") {
    const std::string text = "INPUT(a)\nINPUT(b)\nOUTPUT(y)\nt = AND(a, b)\nu = NOT(t)\ny = OR(u, a)\n";
    auto nl = parse_bench(text);
    CHECK(nl.logic_gate_count() == 3);
    auto again = parse_bench(emit_bench(nl));
    CHECK(again.logic_gate_count() == 3);
    std::mt19937_64 rng(1);
    check_same_function(nl, again, rng, 64);
    // Gate lines survive verbatim up to whitespace.
    auto emitted = emit_bench(nl);
    CHECK(emitted.find("y = OR(") != std::string::npos);
    CHECK(emitted.find("= AND(a, b)") != std::string::npos);
}

TEST_CASE("bench parser errors") {
    try {
        parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a, ghost)\nz = NOT(other)\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = FOO(a)\n"), UnsupportedGate);
    CHECK_THROWS_AS(parse_bench("INPUT(a)\nOUTPUT(y)\ny = AND(a\n"), ParseError);
}

TEST_CASE("locked majority emits two key inputs") {
    auto nl = fixtures::majority_locked_b();
    auto text = emit_bench(nl);
    CHECK(text.find("INPUT(keyinput0)") != std::string::npos);
    CHECK(text.find("INPUT(keyinput1)") != std::string::npos);
    auto back = parse_bench(text);
    CHECK(back.key_inputs().size() == 2);
    CHECK(back.input_width() == 3);
    std::mt19937_64 rng(2);
    check_same_function(nl, back, rng, 256);
}

TEST_CASE("bench keeps buses, signedness, MUX and registers") {
    FilterSpec spec;
    spec.coefficients = {3, -5, 7};
    spec.mbw = 4;
    spec.ibw = 4;
    std::mt19937_64 rng(3);
    for (auto form : {FilterForm::Direct, FilterForm::Transposed, FilterForm::Folded}) {
        spec.form = form;
        auto nl = gen_filter(spec);
        auto back = parse_bench(emit_bench(nl));
        REQUIRE(back.find_input_bus("X") != nullptr);
        CHECK(back.find_input_bus("X")->bus.is_signed);
        CHECK(back.find_output_bus("Y")->bus.width() == spec.output_width());
        CHECK(back.state_elements().size() == nl.state_elements().size());
        std::vector<std::int64_t> xs;
        for (int i = 0; i < 40; ++i) xs.push_back(fixtures::random_signed(rng, 4));
        CHECK(run_filter(back, form, 3, xs) == golden_convolution(spec.coefficients, xs));
    }
    Netlist m;
    auto s = m.add_input_bus("s", 3);
    m.add_output_bus("o", Bus{{m.add_gate(GateKind::Mux2, {s[0], s[1], s[2]})}, false});
    auto back = parse_bench(emit_bench(m));
    check_same_function(m, back, rng, 64);
    auto direct = parse_bench("INPUT(s)\nINPUT(a)\nINPUT(b)\nOUTPUT(o)\no = MUX(s, a, b)\n");
    CHECK(direct.gate(0).kind == GateKind::Mux2);
}

TEST_CASE("property: parse(emit) preserves function on random netlists") {
    std::mt19937_64 rng(4);
    for (int t = 0; t < 30; ++t) {
        auto nl = fixtures::random_netlist(rng, 6, 4, 60, 4);
        auto back = parse_bench(emit_bench(nl));
        check_same_function(nl, back, rng, 1000);
    }
}

TEST_CASE("structural HDL cross-simulation") {
    std::mt19937_64 rng(5);
    auto check = [&](const Netlist& nl) {
        MiniVerilog hdl(emit_structural_hdl(nl));
        BusEvaluator ev(nl);
        for (int t = 0; t < 100; ++t) {
            std::map<std::string, std::vector<bool>> ports;
            std::vector<std::int64_t> ins;
            for (const auto& g : nl.input_buses()) {
                auto v = random_vectors(rng, g.bus.width(), 1)[0];
                ports[g.name] = v;
                ins.push_back(bits_to_int(v, g.bus.is_signed));
            }
            auto key = random_vectors(rng, nl.key_inputs().size(), 1)[0];
            if (!key.empty()) ports["keyinput"] = key;
            auto values = hdl.run(ports);
            auto want = ev.eval(ins, key);
            for (std::size_t o = 0; o < nl.output_buses().size(); ++o) {
                const auto& g = nl.output_buses()[o];
                std::vector<bool> bits;
                for (std::size_t i = 0; i < g.bus.width(); ++i)
                    bits.push_back(values.at(g.bus.width() == 1 ? g.name : g.name + "[" + std::to_string(i) + "]"));
                REQUIRE(bits_to_int(bits, g.bus.is_signed) == want[o]);
            }
        }
    };
    check(fixtures::majority_locked_b());
    check(fixtures::random_netlist(rng, 5, 3, 50, 3));
    auto trivial = parse_bench("INPUT(a)\nOUTPUT(y)\ny = NOT(a)\n");
    check(trivial);
    auto text = emit_structural_hdl(fixtures::majority_locked_b());
    CHECK(text.find("input [1:0] keyinput;") != std::string::npos);
}
