#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "firlock/error.hpp"
#include "firlock/sat.hpp"

namespace firlock {

void CnfFormula::add_clause(std::vector<int> clause) {
    for (int l : clause)
        if (l == 0 || std::abs(l) > num_vars) throw Error("clause literal " + std::to_string(l) + " out of range");
    clauses.push_back(std::move(clause));
}

CircuitCopy encode_circuit(CnfFormula& f, const Netlist& nl, std::span<const int> input_vars,
                           std::span<const int> key_vars) {
    if (!nl.is_combinational()) throw HasStateError("CNF encoding needs a combinational netlist");
    CircuitCopy c;
    c.net_var.assign(nl.net_count(), 0);
    auto ins = nl.input_nets();
    if (!input_vars.empty() && input_vars.size() != ins.size()) throw WidthError("input variable count mismatch");
    for (std::size_t i = 0; i < ins.size(); ++i) {
        int v = input_vars.empty() ? f.new_var() : input_vars[i];
        c.net_var[ins[i]] = v;
        c.inputs.push_back(v);
    }
    const auto& keys = nl.key_inputs();
    if (!key_vars.empty() && key_vars.size() != keys.size()) throw WidthError("key variable count mismatch");
    for (std::size_t i = 0; i < keys.size(); ++i) {
        int v = key_vars.empty() ? f.new_var() : key_vars[i];
        c.net_var[keys[i]] = v;
        c.keys.push_back(v);
    }
    for (std::size_t gi : topological_order(nl)) {
        const Gate& g = nl.gate(gi);
        auto in = [&](int s) { return c.net_var[g.in[static_cast<std::size_t>(s)]]; };
        const int o = f.new_var();
        c.net_var[g.out] = o;
        switch (g.kind) {
        case GateKind::And:
            f.add_clause({-o, in(0)});
            f.add_clause({-o, in(1)});
            f.add_clause({o, -in(0), -in(1)});
            break;
        case GateKind::Nand:
            f.add_clause({o, in(0)});
            f.add_clause({o, in(1)});
            f.add_clause({-o, -in(0), -in(1)});
            break;
        case GateKind::Or:
            f.add_clause({o, -in(0)});
            f.add_clause({o, -in(1)});
            f.add_clause({-o, in(0), in(1)});
            break;
        case GateKind::Nor:
            f.add_clause({-o, -in(0)});
            f.add_clause({-o, -in(1)});
            f.add_clause({o, in(0), in(1)});
            break;
        case GateKind::Xor:
            f.add_clause({-o, in(0), in(1)});
            f.add_clause({-o, -in(0), -in(1)});
            f.add_clause({o, -in(0), in(1)});
            f.add_clause({o, in(0), -in(1)});
            break;
        case GateKind::Xnor:
            f.add_clause({o, in(0), in(1)});
            f.add_clause({o, -in(0), -in(1)});
            f.add_clause({-o, -in(0), in(1)});
            f.add_clause({-o, in(0), -in(1)});
            break;
        case GateKind::Not:
            f.add_clause({o, in(0)});
            f.add_clause({-o, -in(0)});
            break;
        case GateKind::Buf:
            f.add_clause({-o, in(0)});
            f.add_clause({o, -in(0)});
            break;
        case GateKind::Mux2: {
            int s = in(0), a = in(1), b = in(2);
            f.add_clause({s, -a, o});
            f.add_clause({s, a, -o});
            f.add_clause({-s, -b, o});
            f.add_clause({-s, b, -o});
            f.add_clause({-a, -b, o});
            f.add_clause({a, b, -o});
            break;
        }
        case GateKind::Const0: f.add_clause({-o}); break;
        case GateKind::Const1: f.add_clause({o}); break;
        case GateKind::Dff: throw HasStateError("unexpected DFF");
        }
    }
    for (NetId n : nl.output_nets()) {
        if (c.net_var[n] == 0) throw Error("output " + nl.net_name(n) + " is undriven");
        c.outputs.push_back(c.net_var[n]);
    }
    return c;
}

EncodedCircuit tseitin_encode(const Netlist& nl) {
    EncodedCircuit e;
    e.copy = encode_circuit(e.cnf, nl);
    e.cnf.tags["x"] = e.copy.inputs;
    e.cnf.tags["key"] = e.copy.keys;
    e.cnf.tags["y"] = e.copy.outputs;
    return e;
}

int add_difference(CnfFormula& f, std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw WidthError("difference over buses of different width");
    std::vector<int> any;
    for (std::size_t i = 0; i < a.size(); ++i) {
        int d = f.new_var();
        f.add_clause({-d, a[i], b[i]});
        f.add_clause({-d, -a[i], -b[i]});
        f.add_clause({d, -a[i], b[i]});
        f.add_clause({d, a[i], -b[i]});
        any.push_back(d);
    }
    int act = f.new_var();
    any.push_back(-act);
    f.add_clause(any);
    return act;
}

AttackMiter build_attack_miter(const Netlist& lc) {
    AttackMiter m;
    auto c1 = encode_circuit(m.cnf, lc);
    auto c2 = encode_circuit(m.cnf, lc, c1.inputs);
    m.x = c1.inputs;
    m.k1 = c1.keys;
    m.k2 = c2.keys;
    m.y1 = c1.outputs;
    m.y2 = c2.outputs;
    m.diff = add_difference(m.cnf, m.y1, m.y2);
    m.cnf.tags["x"] = m.x;
    m.cnf.tags["k1"] = m.k1;
    m.cnf.tags["k2"] = m.k2;
    m.cnf.tags["y1"] = m.y1;
    m.cnf.tags["y2"] = m.y2;
    m.cnf.tags["diff"] = {m.diff};
    return m;
}

void add_io_constraint(CnfFormula& f, const Netlist& lc, std::span<const std::vector<int>> key_sets,
                       const std::vector<bool>& x, const std::vector<bool>& y) {
    auto ins = lc.input_nets();
    auto outs = lc.output_nets();
    if (x.size() != ins.size()) throw WidthError("I/O constraint: expected " + std::to_string(ins.size()) + " input bits");
    if (y.size() != outs.size()) throw WidthError("I/O constraint: expected " + std::to_string(outs.size()) + " output bits");
    Assignment partial;
    partial.set_bits(ins, x);
    // an output net listed twice must agree with itself
    for (std::size_t i = 0; i < outs.size(); ++i) {
        auto prev = partial.get(outs[i]);
        if (prev && *prev != y[i]) {
            f.add_clause(std::vector<int>{});
            return;
        }
        partial.set(outs[i], y[i]);
    }
    PropagationResult r;
    try {
        r = propagate_constants(lc, partial);
    } catch (const ConflictError&) {
        f.add_clause(std::vector<int>{});
        return;
    }
    for (const auto& keys : key_sets) {
        auto c = encode_circuit(f, r.netlist, {}, keys);
        for (const auto& req : r.required) {
            int v = c.outputs.at(req.output_index);
            f.add_clause({req.value ? v : -v});
        }
    }
}

std::string export_dimacs(const CnfFormula& f) {
    std::ostringstream os;
    for (const auto& [tag, vars] : f.tags)
        for (std::size_t i = 0; i < vars.size(); ++i) os << "c " << tag << ' ' << i << ' ' << vars[i] << '\n';
    os << "p cnf " << f.num_vars << ' ' << f.clauses.size() << '\n';
    for (const auto& c : f.clauses) {
        for (int l : c) os << l << ' ';
        os << "0\n";
    }
    return os.str();
}

CnfFormula parse_dimacs(const std::string& text) {
    CnfFormula f;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    bool header = false;
    std::size_t expected = 0;
    std::vector<int> current;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == 'c') {
            std::string c, tag;
            std::size_t index;
            int var;
            if (ls >> c >> tag >> index >> var) {
                auto& vars = f.tags[tag];
                if (vars.size() <= index) vars.resize(index + 1, 0);
                vars[index] = var;
            }
            continue;
        }
        if (line[0] == 'p') {
            std::string p, fmt;
            if (!(ls >> p >> fmt >> f.num_vars >> expected) || fmt != "cnf") throw ParseError(line_no, "bad problem line");
            header = true;
            continue;
        }
        if (!header) throw ParseError(line_no, "clause before problem line");
        int lit;
        while (ls >> lit) {
            if (lit == 0) {
                try {
                    f.add_clause(current);
                } catch (const Error& e) {
                    throw ParseError(line_no, e.what());
                }
                current.clear();
            } else {
                current.push_back(lit);
            }
        }
        if (!ls.eof()) throw ParseError(line_no, "bad literal");
    }
    if (!current.empty()) throw ParseError(line_no, "unterminated clause");
    if (header && f.clauses.size() != expected)
        throw ParseError(line_no, "expected " + std::to_string(expected) + " clauses, found " + std::to_string(f.clauses.size()));
    return f;
}

std::string to_string(SolveStatus s) {
    switch (s) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::Timeout: return "TIMEOUT";
    }
    return "?";
}

SolveLimits SolveLimits::tighter(std::optional<Clock::time_point> other) const {
    SolveLimits l = *this;
    if (other && (!l.deadline || *other < *l.deadline)) l.deadline = other;
    return l;
}

std::vector<bool> SolveResult::values(std::span<const int> lits) const {
    std::vector<bool> out;
    out.reserve(lits.size());
    for (int l : lits) out.push_back(value(l));
    return out;
}

void SatBackend::add_formula(const CnfFormula& f, std::size_t from) {
    while (num_vars() < f.num_vars) new_var();
    for (std::size_t i = from; i < f.clauses.size(); ++i) add_clause(f.clauses[i]);
}

ExternalSolver::ExternalSolver(std::string command) : command_(std::move(command)) {}

void ExternalSolver::add_clause(std::span<const int> lits) {
    cnf_.add_clause(std::vector<int>(lits.begin(), lits.end()));
}

SolveResult ExternalSolver::solve(std::span<const int> assumptions, const SolveLimits& limits) {
    SolveResult res;
    CnfFormula f;
    f.num_vars = cnf_.num_vars;
    f.clauses = cnf_.clauses;
    for (int a : assumptions) f.add_clause({a});

    std::string cmd = command_;
    if (limits.deadline) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(*limits.deadline - Clock::now()).count();
        if (left <= 0) return res;
        cmd = "timeout " + std::to_string(static_cast<double>(left) / 1000.0) + " " + cmd;
    }
    auto dir = std::filesystem::temp_directory_path();
    auto path = dir / ("firlock_" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "_" +
                       std::to_string(Clock::now().time_since_epoch().count()) + ".cnf");
    {
        std::ofstream out(path);
        out << export_dimacs(f);
    }
    cmd += " " + path.string();
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw Error("cannot run external solver '" + command_ + "'");
    std::string output;
    char buf[4096];
    while (std::fgets(buf, sizeof buf, pipe)) output += buf;
    ::pclose(pipe);
    std::filesystem::remove(path);

    std::istringstream in(output);
    std::string line;
    res.model.assign(static_cast<std::size_t>(cnf_.num_vars) + 1, false);
    bool have_status = false;
    while (std::getline(in, line)) {
        if (line.rfind("s ", 0) == 0) {
            have_status = true;
            if (line.find("UNSATISFIABLE") != std::string::npos) res.status = SolveStatus::Unsat;
            else if (line.find("SATISFIABLE") != std::string::npos) res.status = SolveStatus::Sat;
            else res.status = SolveStatus::Timeout;
        } else if (line.rfind("v ", 0) == 0) {
            std::istringstream ls(line.substr(2));
            int l;
            while (ls >> l)
                if (l != 0 && std::abs(l) <= cnf_.num_vars) res.model[static_cast<std::size_t>(std::abs(l))] = l > 0;
        }
    }
    if (!have_status) res.status = SolveStatus::Timeout;
    if (res.status != SolveStatus::Sat) res.model.clear();
    return res;
}

std::unique_ptr<SatBackend> make_backend(std::uint64_t seed) {
    if (const char* ext = std::getenv("FIRLOCK_SOLVER"); ext && *ext) return std::make_unique<ExternalSolver>(ext);
    return std::make_unique<Solver>(seed);
}

void SatSession::sync() {
    backend_->add_formula(cnf_, synced_);
    synced_ = cnf_.clauses.size();
}

} // namespace firlock
