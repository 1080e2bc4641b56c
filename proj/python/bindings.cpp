#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "firlock/attacks.hpp"
#include "firlock/bench.hpp"
#include "firlock/cli.hpp"
#include "firlock/error.hpp"
#include "firlock/eval.hpp"
#include "firlock/filters.hpp"
#include "firlock/lock.hpp"
#include "firlock/obfuscate.hpp"

namespace py = pybind11;
using namespace firlock;

namespace {

FilterSpec make_spec(std::vector<std::int64_t> coeffs, const std::string& form, int ibw, int mbw) {
    FilterSpec s;
    s.coefficients = std::move(coeffs);
    s.form = parse_filter_form(form);
    s.ibw = ibw;
    s.mbw = mbw;
    s.validate();
    return s;
}

PointFunctionConfig point_config(std::size_t w, std::int64_t cv, std::uint64_t seed) {
    PointFunctionConfig cfg;
    cfg.w = w;
    cfg.cv = cv;
    if (w >= 1 && w <= 62) cfg.secret = random_key(w, seed);
    return cfg;
}

Budget budget(std::int64_t timeout_ms, std::int64_t solve_timeout_ms) {
    Budget b;
    b.total = std::chrono::milliseconds(timeout_ms);
    b.per_solve = std::chrono::milliseconds(std::min(timeout_ms, solve_timeout_ms));
    return b;
}

} // namespace

PYBIND11_MODULE(_firlock, m) {
    m.doc() = "FIR filter obfuscation, point-function locking and oracle-guided attacks";

    py::register_exception<Error>(m, "FirlockError", PyExc_ValueError);

    py::class_<Netlist>(m, "Netlist")
        .def_property_readonly("name", &Netlist::name)
        .def_property_readonly("input_width", &Netlist::input_width)
        .def_property_readonly("output_width", &Netlist::output_width)
        .def_property_readonly("key_count", [](const Netlist& n) { return n.key_inputs().size(); })
        .def_property_readonly("gate_count", &Netlist::logic_gate_count)
        .def("to_bench", [](const Netlist& n) { return emit_bench(n); })
        .def("to_verilog", [](const Netlist& n) { return emit_structural_hdl(n); })
        .def(
            "evaluate",
            [](const Netlist& n, const std::vector<std::int64_t>& inputs, const std::vector<bool>& key) {
                BusEvaluator ev(n);
                return ev.eval(inputs, key);
            },
            py::arg("inputs"), py::arg("key") = std::vector<bool>{},
            "One integer per input bus in, one per output bus out.");

    py::class_<ProtectedDesign>(m, "ProtectedDesign")
        .def_readonly("netlist", &ProtectedDesign::netlist)
        .def_property_readonly("secret_key", [](const ProtectedDesign& d) { return d.keys.secret_key(); })
        .def_property_readonly("v", [](const ProtectedDesign& d) { return d.keys.v(); })
        .def_property_readonly("w", [](const ProtectedDesign& d) { return d.keys.w(); })
        .def("keymap_json", [](const ProtectedDesign& d) { return d.keys.to_json(); });

    py::class_<AttackReport>(m, "AttackReport")
        .def_readonly("attack", &AttackReport::attack)
        .def_readonly("key", &AttackReport::key)
        .def_readonly("proven", &AttackReport::proven)
        .def_readonly("iterations", &AttackReport::iterations)
        .def_readonly("queries", &AttackReport::queries)
        .def_readonly("time_ms", &AttackReport::time_ms)
        .def_property_readonly("proven_count", &AttackReport::proven_count)
        .def_property_readonly("outcome", [](const AttackReport& r) { return to_string(r.outcome); })
        .def_property_readonly("relations",
                               [](const AttackReport& r) {
                                   std::vector<std::tuple<std::size_t, std::size_t, bool>> out;
                                   for (const auto& rel : r.relations) out.emplace_back(rel.a, rel.b, rel.opposite);
                                   return out;
                               })
        .def("to_json", &AttackReport::to_json)
        .def("csv_row", &AttackReport::csv_row);

    m.def("parse_bench", [](const std::string& text) { return parse_bench(text); });

    m.def(
        "gen_filter",
        [](std::vector<std::int64_t> coeffs, const std::string& form, int ibw, int mbw) {
            return gen_filter(make_spec(std::move(coeffs), form, ibw, mbw));
        },
        py::arg("coeffs"), py::arg("form") = "direct", py::arg("ibw") = 8, py::arg("mbw") = 8);

    m.def(
        "plain_block",
        [](std::vector<std::int64_t> coeffs, const std::string& form, int ibw, int mbw) {
            auto spec = make_spec(std::move(coeffs), form, ibw, mbw);
            return plain_block(block_kind_of(spec.form), spec);
        },
        py::arg("coeffs"), py::arg("form") = "direct", py::arg("ibw") = 8, py::arg("mbw") = 8,
        "Constant block of the form: direct -> CAVM, transposed -> MCM, folded -> TMCM.");

    m.def(
        "obfuscate",
        [](std::vector<std::int64_t> coeffs, int v, const std::string& arch, const std::string& criterion,
           const std::string& form, int ibw, int mbw, std::uint64_t seed) {
            auto spec = make_spec(std::move(coeffs), form, ibw, mbw);
            const Architecture a = parse_architecture(arch);
            if (a == Architecture::Crk) return obfuscate_crk(spec, block_kind_of(spec.form), static_cast<std::size_t>(v));
            const Criterion c = parse_criterion(criterion);
            auto plan = build_plan(spec.coefficients, select_decoys(spec.coefficients, v, c, mbw, seed), mbw, seed, c);
            return obfuscate_block(block_kind_of(spec.form), spec, plan, a);
        },
        py::arg("coeffs"), py::arg("v"), py::arg("arch") = "mul", py::arg("criterion") = "hc",
        py::arg("form") = "direct", py::arg("ibw") = 8, py::arg("mbw") = 8, py::arg("seed") = 1);

    m.def(
        "lock_point",
        [](const Netlist& nl, std::size_t w, std::int64_t cv, std::uint64_t seed) {
            return lock_relaxed(nl, point_config(w, cv, seed));
        },
        py::arg("netlist"), py::arg("w"), py::arg("cv") = 0, py::arg("seed") = 1);

    m.def(
        "hybridize",
        [](const ProtectedDesign& d, std::size_t w, std::int64_t cv, std::uint64_t seed) {
            return hybridize(d, point_config(w, cv, seed), seed);
        },
        py::arg("design"), py::arg("w"), py::arg("cv") = 0, py::arg("seed") = 1);

    m.def(
        "sat_attack",
        [](const Netlist& lc, const std::vector<bool>& secret, std::int64_t timeout_ms, std::int64_t solve_timeout_ms) {
            Oracle oracle(lc, secret);
            py::gil_scoped_release release;
            return sat_attack(lc, oracle, budget(timeout_ms, solve_timeout_ms));
        },
        py::arg("netlist"), py::arg("secret"), py::arg("timeout_ms") = 60'000, py::arg("solve_timeout_ms") = 10'000);

    m.def(
        "query_attack",
        [](const Netlist& lc, const std::vector<bool>& secret, std::int64_t timeout_ms, std::int64_t solve_timeout_ms) {
            Oracle oracle(lc, secret);
            py::gil_scoped_release release;
            return query_attack(lc, oracle, budget(timeout_ms, solve_timeout_ms));
        },
        py::arg("netlist"), py::arg("secret"), py::arg("timeout_ms") = 60'000, py::arg("solve_timeout_ms") = 10'000);

    m.def(
        "verify_key",
        [](const Netlist& lc, const std::vector<bool>& key, const Netlist& reference, std::uint64_t seed) {
            Oracle oracle(reference);
            return verify_key(lc, key, oracle, VerifyMode::Auto, seed).equivalent;
        },
        py::arg("netlist"), py::arg("key"), py::arg("reference"), py::arg("seed") = 0);

    m.def("golden_convolution", &golden_convolution, py::arg("coeffs"), py::arg("samples"));

    m.def(
        "zpfr",
        [](const std::vector<std::int64_t>& c, int grid) {
            auto r = zpfr(c, grid);
            return std::make_pair(r.omega, r.amplitude);
        },
        py::arg("coeffs"), py::arg("grid") = 512);

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = cli::run(args, out, err);
            return std::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the firlock command line in-process; returns (exit code, stdout, stderr).");
}
