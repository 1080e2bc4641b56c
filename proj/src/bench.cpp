#include "firlock/bench.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace firlock {

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

struct BusRef {
    std::string base;
    long index = -1; // -1 for a scalar
};

BusRef split_bus_name(const std::string& name) {
    static const std::regex re(R"(^(.+)\[(\d+)\]$)");
    std::smatch m;
    if (std::regex_match(name, m, re)) return {m[1].str(), std::stol(m[2].str())};
    return {name, -1};
}

std::optional<long> key_index(const std::string& name) {
    static const std::regex re(R"(^keyinput(\d+)$)");
    std::smatch m;
    if (std::regex_match(name, m, re)) return std::stol(m[1].str());
    return std::nullopt;
}

// Groups port names into ordered buses; returns (base, nets sorted by index).
std::vector<std::pair<std::string, std::vector<NetId>>>
group_ports(const std::vector<std::pair<std::string, NetId>>& ports, int line_hint) {
    std::vector<std::string> order;
    std::map<std::string, std::map<long, NetId>> groups;
    for (const auto& [name, net] : ports) {
        BusRef ref = split_bus_name(name);
        if (!groups.count(ref.base)) order.push_back(ref.base);
        auto& g = groups[ref.base];
        long idx = ref.index < 0 ? 0 : ref.index;
        if (g.count(idx)) throw ParseError(line_hint, "duplicate port bit " + name);
        g[idx] = net;
    }
    std::vector<std::pair<std::string, std::vector<NetId>>> out;
    for (const auto& base : order) {
        std::vector<NetId> nets;
        long expect = 0;
        for (const auto& [idx, net] : groups[base]) {
            if (idx != expect) throw ParseError(line_hint, "bus " + base + " has a gap at bit " + std::to_string(expect));
            nets.push_back(net);
            ++expect;
        }
        out.emplace_back(base, std::move(nets));
    }
    return out;
}

} // namespace

Netlist parse_bench(std::string_view text) {
    Netlist nl;
    std::unordered_map<std::string, NetId> nets;
    std::unordered_map<NetId, int> first_use;
    std::unordered_set<NetId> defined;
    std::vector<std::pair<std::string, NetId>> inputs, keys, outputs;
    std::set<std::string> signed_buses;
    int last_line = 0;

    auto net_of = [&](const std::string& name, int line) {
        auto it = nets.find(name);
        if (it != nets.end()) return it->second;
        NetId n = nl.add_net(name);
        nets.emplace(name, n);
        first_use.emplace(n, line);
        return n;
    };

    struct PendingGate {
        int line;
        std::string op;
        std::vector<NetId> args;
        NetId out;
    };
    std::vector<PendingGate> pending;

    static const std::regex port_re(R"(^(INPUT|OUTPUT)\s*\(\s*([^\s()]+)\s*\)$)", std::regex::icase);
    static const std::regex gate_re(R"(^([^\s=()]+)\s*=\s*([A-Za-z0-9_]+)\s*\((.*)\)$)");
    static const std::regex signed_re(R"(^#\s*bus\s+(\S+)\s+signed\s*$)");
    static const std::regex name_re(R"(^#\s*(\S+)\s*$)");

    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        last_line = line_no;
        std::string line = trim(raw);
        if (line.empty()) continue;
        std::smatch m;
        if (line[0] == '#') {
            if (std::regex_match(line, m, signed_re))
                signed_buses.insert(m[1].str());
            else if (line_no == 1 && std::regex_match(line, m, name_re))
                nl.set_name(m[1].str());
            continue;
        }
        if (auto hash = line.find('#'); hash != std::string::npos) line = trim(line.substr(0, hash));
        if (std::regex_match(line, m, port_re)) {
            std::string kind = upper(m[1].str());
            std::string name = m[2].str();
            NetId n = net_of(name, line_no);
            if (kind == "INPUT") {
                if (defined.count(n)) throw ParseError(line_no, "net " + name + " defined twice");
                defined.insert(n);
                if (key_index(name))
                    keys.emplace_back(name, n);
                else
                    inputs.emplace_back(name, n);
            } else {
                outputs.emplace_back(name, n);
            }
            continue;
        }
        if (std::regex_match(line, m, gate_re)) {
            std::string lhs = m[1].str();
            std::string op = upper(m[2].str());
            std::vector<NetId> args;
            std::string arglist = m[3].str();
            std::stringstream ss(arglist);
            std::string tok;
            while (std::getline(ss, tok, ',')) {
                std::string a = trim(tok);
                if (a.empty()) {
                    if (arglist.find_first_not_of(" \t") == std::string::npos) break;
                    throw ParseError(line_no, "empty gate argument");
                }
                args.push_back(net_of(a, line_no));
            }
            NetId out = net_of(lhs, line_no);
            if (defined.count(out)) throw ParseError(line_no, "net " + lhs + " defined twice");
            defined.insert(out);
            pending.push_back({line_no, op, std::move(args), out});
            continue;
        }
        throw ParseError(line_no, "cannot parse '" + line + "'");
    }

    {
        const std::string* worst = nullptr;
        int worst_line = 0;
        for (const auto& [name, n] : nets) {
            if (defined.count(n)) continue;
            int line = first_use.at(n);
            if (!worst || line < worst_line || (line == worst_line && name < *worst)) {
                worst = &name;
                worst_line = line;
            }
        }
        if (worst) throw ParseError(worst_line, "net '" + *worst + "' is used but never driven");
    }

    for (const auto& [base, bits] : group_ports(inputs, last_line)) {
        Bus bus;
        bus.bits = bits;
        bus.is_signed = signed_buses.count(base) != 0;
        nl.adopt_input_bus(base, bus);
    }
    std::sort(keys.begin(), keys.end(),
              [](const auto& a, const auto& b) { return *key_index(a.first) < *key_index(b.first); });
    for (const auto& k : keys) nl.adopt_key_input(k.second);

    for (const auto& g : pending) {
        auto need = [&](std::size_t lo, std::size_t hi) {
            if (g.args.size() < lo || g.args.size() > hi)
                throw ParseError(g.line, g.op + " has " + std::to_string(g.args.size()) + " inputs");
        };
        auto chain = [&](GateKind pairwise, GateKind last) {
            need(1, 1000000);
            if (g.args.size() == 1) {
                GateKind k = (last == GateKind::Nand || last == GateKind::Nor || last == GateKind::Xnor) ? GateKind::Not
                                                                                                          : GateKind::Buf;
                nl.add_gate_driving(k, std::span<const NetId>(&g.args[0], 1), g.out);
                return;
            }
            NetId acc = g.args[0];
            for (std::size_t i = 1; i + 1 < g.args.size(); ++i) acc = nl.add_gate(pairwise, {acc, g.args[i]});
            std::array<NetId, 2> last_in{acc, g.args.back()};
            nl.add_gate_driving(last, last_in, g.out);
        };
        if (g.op == "AND") chain(GateKind::And, GateKind::And);
        else if (g.op == "OR") chain(GateKind::Or, GateKind::Or);
        else if (g.op == "NAND") chain(GateKind::And, GateKind::Nand);
        else if (g.op == "NOR") chain(GateKind::Or, GateKind::Nor);
        else if (g.op == "XOR") chain(GateKind::Xor, GateKind::Xor);
        else if (g.op == "XNOR") chain(GateKind::Xor, GateKind::Xnor);
        else if (g.op == "NOT" || g.op == "INV") {
            need(1, 1);
            nl.add_gate_driving(GateKind::Not, g.args, g.out);
        } else if (g.op == "BUF" || g.op == "BUFF") {
            need(1, 1);
            nl.add_gate_driving(GateKind::Buf, g.args, g.out);
        } else if (g.op == "DFF") {
            need(1, 1);
            nl.add_gate_driving(GateKind::Dff, g.args, g.out);
        } else if (g.op == "MUX") {
            need(3, 3);
            nl.add_gate_driving(GateKind::Mux2, g.args, g.out);
        } else if (g.op == "CONST0" || g.op == "GND") {
            need(0, 0);
            nl.add_gate_driving(GateKind::Const0, {}, g.out);
        } else if (g.op == "CONST1" || g.op == "VDD") {
            need(0, 0);
            nl.add_gate_driving(GateKind::Const1, {}, g.out);
        } else {
            throw UnsupportedGate("line " + std::to_string(g.line) + ": unsupported gate " + g.op);
        }
    }

    for (const auto& [base, bits] : group_ports(outputs, last_line)) {
        Bus bus;
        bus.bits = bits;
        bus.is_signed = signed_buses.count(base) != 0;
        nl.add_output_bus(base, bus);
    }
    nl.validate();
    return nl;
}

namespace {

bool valid_bench_name(const std::string& s) {
    if (s.empty()) return false;
    return std::none_of(s.begin(), s.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' || c == '=' ||
               c == '#';
    });
}

std::string bit_name(const std::string& base, std::size_t width, std::size_t i) {
    return width == 1 ? base : base + "[" + std::to_string(i) + "]";
}

class NameTable {
public:
    bool taken(const std::string& s) const { return used_.count(s) != 0; }
    std::string claim(std::string wanted, NetId id) {
        if (!valid_bench_name(wanted)) wanted = "n" + std::to_string(id);
        std::string name = wanted;
        for (int k = 1; used_.count(name); ++k) name = wanted + "_" + std::to_string(k);
        used_.insert(name);
        return name;
    }

private:
    std::unordered_set<std::string> used_;
};

} // namespace

std::string emit_bench(const Netlist& netlist) {
    std::vector<std::string> name(netlist.net_count());
    NameTable table;

    for (const auto& g : netlist.input_buses())
        for (std::size_t i = 0; i < g.bus.width(); ++i)
            name[g.bus[i]] = table.claim(bit_name(g.name, g.bus.width(), i), g.bus[i]);
    for (std::size_t i = 0; i < netlist.key_inputs().size(); ++i)
        name[netlist.key_inputs()[i]] = table.claim("keyinput" + std::to_string(i), netlist.key_inputs()[i]);

    // Output bits take their port name when they own a gate-driven net.
    std::vector<std::string> output_names;
    std::vector<std::pair<std::string, NetId>> aliases;
    std::vector<char> owns(netlist.net_count(), 0);
    for (const auto& g : netlist.output_buses()) {
        for (std::size_t i = 0; i < g.bus.width(); ++i) {
            NetId n = g.bus[i];
            std::string want = bit_name(g.name, g.bus.width(), i);
            if (netlist.driver(n) >= 0 && !owns[n]) {
                owns[n] = 1;
                name[n] = table.claim(want, n);
                output_names.push_back(name[n]);
            } else {
                std::string alias = table.claim(want, n);
                output_names.push_back(alias);
                aliases.emplace_back(alias, n);
            }
        }
    }
    for (NetId n = 0; n < netlist.net_count(); ++n)
        if (name[n].empty() && netlist.driver(n) != Netlist::kUndriven) name[n] = table.claim(netlist.net_name(n), n);

    std::ostringstream os;
    os << "# " << netlist.name() << "\n";
    os << "# " << netlist.input_width() << " inputs, " << netlist.key_inputs().size() << " key inputs, "
       << netlist.output_width() << " outputs, " << netlist.gate_count() << " gates\n";
    for (const auto& g : netlist.input_buses())
        if (g.bus.is_signed) os << "# bus " << g.name << " signed\n";
    for (const auto& g : netlist.output_buses())
        if (g.bus.is_signed) os << "# bus " << g.name << " signed\n";
    for (const auto& g : netlist.input_buses())
        for (NetId n : g.bus.bits) os << "INPUT(" << name[n] << ")\n";
    for (NetId k : netlist.key_inputs()) os << "INPUT(" << name[k] << ")\n";
    for (const auto& o : output_names) os << "OUTPUT(" << o << ")\n";

    for (std::size_t gi : topological_order(netlist)) {
        const Gate& g = netlist.gate(gi);
        const std::string& out = name[g.out];
        switch (g.kind) {
        case GateKind::Mux2: {
            std::string ns = table.claim(out + "_ns", g.out);
            std::string a = table.claim(out + "_m0", g.out);
            std::string b = table.claim(out + "_m1", g.out);
            os << ns << " = NOT(" << name[g.in[0]] << ")\n";
            os << a << " = AND(" << ns << ", " << name[g.in[1]] << ")\n";
            os << b << " = AND(" << name[g.in[0]] << ", " << name[g.in[2]] << ")\n";
            os << out << " = OR(" << a << ", " << b << ")\n";
            break;
        }
        case GateKind::Const0: os << out << " = CONST0()\n"; break;
        case GateKind::Const1: os << out << " = CONST1()\n"; break;
        case GateKind::Buf: os << out << " = BUFF(" << name[g.in[0]] << ")\n"; break;
        default: {
            os << out << " = " << gate_kind_name(g.kind) << "(";
            auto ins = g.inputs();
            for (std::size_t i = 0; i < ins.size(); ++i) os << (i ? ", " : "") << name[ins[i]];
            os << ")\n";
        }
        }
    }
    for (const auto& [alias, n] : aliases) os << alias << " = BUFF(" << name[n] << ")\n";
    return os.str();
}

namespace {

std::string verilog_ident(const std::string& s) {
    std::string r;
    for (char c : s) r.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ? c : '_');
    if (r.empty() || std::isdigit(static_cast<unsigned char>(r[0]))) r = "p_" + r;
    return r;
}

} // namespace

std::string emit_structural_hdl(const Netlist& netlist) {
    std::vector<std::string> ref(netlist.net_count());
    std::vector<std::string> ports;
    std::ostringstream decl;
    const bool sequential = !netlist.is_combinational();
    std::unordered_set<std::string> port_names{"clk", "keyinput"};

    if (sequential) {
        ports.push_back("clk");
        decl << "  input clk;\n";
    }
    auto range = [](std::size_t w) { return w == 1 ? std::string() : "[" + std::to_string(w - 1) + ":0] "; };
    for (const auto& g : netlist.input_buses()) {
        std::string id = verilog_ident(g.name);
        while (port_names.count(id)) id += "_i";
        port_names.insert(id);
        ports.push_back(id);
        decl << "  input " << (g.bus.is_signed ? "signed " : "") << range(g.bus.width()) << id << ";\n";
        for (std::size_t i = 0; i < g.bus.width(); ++i)
            ref[g.bus[i]] = g.bus.width() == 1 ? id : id + "[" + std::to_string(i) + "]";
    }
    if (!netlist.key_inputs().empty()) {
        ports.push_back("keyinput");
        decl << "  input " << range(netlist.key_inputs().size()) << "keyinput;\n";
        for (std::size_t i = 0; i < netlist.key_inputs().size(); ++i)
            ref[netlist.key_inputs()[i]] =
                netlist.key_inputs().size() == 1 ? "keyinput" : "keyinput[" + std::to_string(i) + "]";
    }
    std::vector<std::string> out_ids;
    for (const auto& g : netlist.output_buses()) {
        std::string id = verilog_ident(g.name);
        while (port_names.count(id)) id += "_o";
        port_names.insert(id);
        ports.push_back(id);
        out_ids.push_back(id);
        decl << "  output " << (g.bus.is_signed ? "signed " : "") << range(g.bus.width()) << id << ";\n";
    }
    for (const auto& g : netlist.gates()) ref[g.out] = "n" + std::to_string(g.out);

    std::ostringstream body;
    for (const auto& g : netlist.gates()) {
        if (g.kind == GateKind::Dff)
            body << "  reg " << ref[g.out] << " = 1'b0;\n";
        else
            body << "  wire " << ref[g.out] << ";\n";
    }
    for (std::size_t gi : topological_order(netlist)) {
        const Gate& g = netlist.gate(gi);
        const std::string& o = ref[g.out];
        switch (g.kind) {
        case GateKind::Const0: body << "  assign " << o << " = 1'b0;\n"; break;
        case GateKind::Const1: body << "  assign " << o << " = 1'b1;\n"; break;
        case GateKind::Mux2:
            body << "  assign " << o << " = " << ref[g.in[0]] << " ? " << ref[g.in[2]] << " : " << ref[g.in[1]]
                 << ";\n";
            break;
        case GateKind::Dff:
            body << "  always @(posedge clk) " << o << " <= " << ref[g.in[0]] << ";\n";
            break;
        default: {
            std::string prim(gate_kind_name(g.kind));
            for (char& c : prim) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            body << "  " << prim << " g" << gi << " (" << o;
            for (NetId n : g.inputs()) body << ", " << ref[n];
            body << ");\n";
        }
        }
    }
    std::size_t k = 0;
    for (const auto& g : netlist.output_buses()) {
        for (std::size_t i = 0; i < g.bus.width(); ++i)
            body << "  assign " << (g.bus.width() == 1 ? out_ids[k] : out_ids[k] + "[" + std::to_string(i) + "]")
                 << " = " << ref[g.bus[i]] << ";\n";
        ++k;
    }

    std::ostringstream os;
    os << "module " << verilog_ident(netlist.name()) << " (";
    for (std::size_t i = 0; i < ports.size(); ++i) os << (i ? ", " : "") << ports[i];
    os << ");\n" << decl.str() << body.str() << "endmodule\n";
    return os.str();
}

} // namespace firlock
