#include "firlock/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "firlock/arith.hpp"
#include "firlock/attacks.hpp"
#include "firlock/bench.hpp"
#include "firlock/error.hpp"
#include "firlock/filters.hpp"
#include "firlock/lock.hpp"
#include "firlock/obfuscate.hpp"
#include "firlock/rng.hpp"
#include "firlock/sat.hpp"

namespace firlock::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

constexpr const char* kVersion = "0.1.0";

struct Options {
    std::string coeffs;
    std::string form = "direct";
    std::string scope;
    std::string arch = "mul";
    std::string criterion = "hc";
    std::string design, keymap, reference, key, plan, block = "tmcm";
    std::string attack = "sat";
    std::string format = "bench";
    std::string tmpl = "adder", vary = "w", range;
    std::string out;
    int v = 0, ibw = 0, mbw = 0, grid = 512, n = 4;
    std::size_t w = 0, width = 8, vectors = 10'000;
    std::int64_t cv = 0;
    std::uint64_t seed = 1;
    std::int64_t timeout_ms = 600'000, solve_timeout_ms = 10'000;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(std::string s) {
    auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
    return s;
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return trim(s);
}

FilterSpec load_spec(const Options& o) {
    const std::string text = trim(o.coeffs);
    FilterSpec spec;
    if (text.empty()) throw UsageError("--coeffs is required");
    if (text[0] == '[')
        spec = parse_filter_spec_json(json{{"coefficients", json::parse(text)}}.dump());
    else if (text[0] == '{')
        spec = parse_filter_spec_json(text);
    else
        spec = load_filter_spec(text);
    if (o.ibw) spec.ibw = o.ibw;
    if (o.mbw) spec.mbw = o.mbw;
    spec.form = parse_filter_form(o.form);
    spec.validate();
    return spec;
}

Netlist load_design(const std::string& path) {
    Netlist nl = parse_bench(read_file(path));
    if (nl.name().empty()) nl.set_name(fs::path(path).stem().string());
    return nl;
}

std::vector<bool> parse_key(const std::string& text, std::size_t width) {
    if (text.rfind("0x", 0) == 0) return key_from_hex(text.substr(2), width);
    auto key = key_from_string(text);
    if (key.size() != width)
        throw KeyLengthError("key has " + std::to_string(key.size()) + " bits, expected " + std::to_string(width));
    return key;
}

/// Output directory plus the manifest that fingerprints every file written.
class Bundle {
public:
    Bundle(const std::string& dir, const std::string& command, const std::vector<std::string>& args,
           std::uint64_t seed)
        : dir_(dir) {
        if (dir.empty()) throw UsageError("--out is required");
        fs::create_directories(dir_);
        manifest_["tool"] = "firlock";
        manifest_["version"] = kVersion;
        manifest_["command"] = command;
        manifest_["argv"] = args;
        manifest_["seed"] = seed;
        manifest_["outputs"] = ordered_json::object();
    }

    void put(const std::string& name, const std::string& content) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw Error("cannot write " + (dir_ / name).string());
        f << content;
        manifest_["outputs"][name] = fingerprint(content);
    }

    void put_design(const Netlist& nl) {
        put("design.bench", emit_bench(nl));
        put("design.v", emit_structural_hdl(nl));
    }

    void finish() {
        std::ofstream f(dir_ / "manifest.json", std::ios::binary);
        f << manifest_.dump(2) << "\n";
    }

private:
    fs::path dir_;
    ordered_json manifest_;
};

void add_spec_options(CLI::App* c, Options& o) {
    c->add_option("--coeffs", o.coeffs, "coefficients: JSON array, JSON spec object or spec file path")->required();
    c->add_option("--form", o.form, "filter form")->check(CLI::IsMember({"direct", "transposed", "folded"}));
    c->add_option("--ibw", o.ibw, "input bit-width (overrides the spec)");
    c->add_option("--mbw", o.mbw, "coefficient bit-width (overrides the spec)");
}

void add_protect_options(CLI::App* c, Options& o) {
    c->add_option("--arch", o.arch, "architecture")->check(CLI::IsMember({"straightforward", "mul", "sa", "crk"}));
    c->add_option("--criterion", o.criterion, "decoy criterion")->check(CLI::IsMember({"hc", "oc", "fb"}));
    c->add_option("--v", o.v, "obfuscation key bits (default n)");
    c->add_option("--scope", o.scope, "protect the constant block or the whole filter")
        ->check(CLI::IsMember({"block", "filter"}));
}

void add_budget_options(CLI::App* c, Options& o) {
    c->add_option("--timeout-ms", o.timeout_ms, "total attack budget");
    c->add_option("--solve-timeout-ms", o.solve_timeout_ms, "budget of a single SAT call");
}

Budget budget_of(const Options& o) {
    if (o.timeout_ms <= 0 || o.solve_timeout_ms <= 0) throw UsageError("budgets must be positive");
    Budget b;
    b.total = std::chrono::milliseconds(o.timeout_ms);
    b.per_solve = std::chrono::milliseconds(std::min(o.solve_timeout_ms, o.timeout_ms));
    return b;
}

PointFunctionConfig point_config(const Options& o) {
    PointFunctionConfig cfg;
    cfg.w = o.w;
    cfg.cv = o.cv;
    if (o.w >= 1 && o.w <= 62) cfg.secret = random_key(o.w, o.seed);
    return cfg;
}

ProtectedDesign point_lock(const ProtectedDesign& d, const PointFunctionConfig& cfg) {
    return cfg.cv == 0 ? lock_one_point(d, cfg) : lock_relaxed(d, cfg);
}

struct Obfuscated {
    ProtectedDesign design;
    std::optional<DecoyPlan> plan;
};

Obfuscated obfuscate_spec(const FilterSpec& spec, const Options& o, bool whole_filter) {
    const int v = o.v > 0 ? o.v : static_cast<int>(spec.n());
    const Architecture arch = parse_architecture(o.arch);
    const BlockKind kind = block_kind_of(spec.form);
    if (arch == Architecture::Crk) {
        const auto p = static_cast<std::size_t>(v);
        if (!whole_filter) return {obfuscate_crk(spec, kind, p), std::nullopt};
        Netlist nl = gen_filter(spec, crk_realizer(spec.coefficients, spec.mbw, p));
        KeyMap km;
        for (bool s : crk_secret(spec.coefficients, spec.mbw, p)) km.ports.push_back({KeyRole::Obf, s, std::nullopt});
        return {{std::move(nl), std::move(km)}, std::nullopt};
    }
    const Criterion crit = parse_criterion(o.criterion);
    auto d = select_decoys(spec.coefficients, v, crit, spec.mbw, o.seed);
    DecoyPlan plan = build_plan(spec.coefficients, d, spec.mbw, o.seed, crit);
    ProtectedDesign pd = whole_filter ? obfuscate_filter(spec, plan, arch) : obfuscate_block(kind, spec, plan, arch);
    return {std::move(pd), std::move(plan)};
}

void write_protected(Bundle& b, const FilterSpec* spec, const Obfuscated& o) {
    b.put_design(o.design.netlist);
    b.put("keymap.json", o.design.keys.to_json());
    if (o.plan) b.put("plan.json", o.plan->to_json());
    if (spec) b.put("spec.json", filter_spec_json(*spec));
}

std::string summary(const Netlist& nl, const KeyMap& km) {
    std::ostringstream os;
    os << nl.name() << ": " << nl.input_width() << " inputs, " << nl.output_width() << " outputs, "
       << nl.logic_gate_count() << " gates, p=" << km.p() << " (v=" << km.v() << ", w=" << km.w() << ")";
    if (km.p()) os << ", secret " << key_to_hex(km.secret_key());
    return os.str();
}

int cmd_gen(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
    FilterSpec spec = load_spec(o);
    Netlist nl;
    if (o.scope == "block") {
        const BlockKind kind = block_kind_of(spec.form);
        nl = gen_block(kind, spec.n(), spec.ibw, spec.mbw, plain_realizer(spec.coefficients, spec.style));
        nl.set_name(spec.name + "_" + to_string(kind));
    } else {
        nl = gen_filter(spec);
        nl.set_name(spec.name + "_" + to_string(spec.form));
    }
    Bundle b(o.out, "gen", args, o.seed);
    b.put_design(nl);
    b.put("spec.json", filter_spec_json(spec));
    b.finish();
    out << summary(nl, {}) << "\n";
    return kOk;
}

int cmd_obfuscate(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
    FilterSpec spec = load_spec(o);
    auto ob = obfuscate_spec(spec, o, o.scope == "filter");
    Bundle b(o.out, "obfuscate", args, o.seed);
    write_protected(b, &spec, ob);
    b.finish();
    out << summary(ob.design.netlist, ob.design.keys) << "\n";
    return kOk;
}

int cmd_hybrid(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
    FilterSpec spec = load_spec(o);
    auto ob = obfuscate_spec(spec, o, o.scope == "filter");
    ob.design = hybridize(ob.design, point_config(o), o.seed);
    Bundle b(o.out, "hybrid", args, o.seed);
    write_protected(b, &spec, ob);
    b.finish();
    out << summary(ob.design.netlist, ob.design.keys) << "\n";
    return kOk;
}

int cmd_lock(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
    Netlist nl = load_design(o.design);
    ProtectedDesign base{nl, {}};
    if (!o.keymap.empty()) {
        base.keys = KeyMap::from_json(read_file(o.keymap));
    } else if (!nl.key_inputs().empty()) {
        throw UsageError("design has key inputs; pass its --keymap");
    }
    Obfuscated locked{point_lock(base, point_config(o)), std::nullopt};
    Bundle b(o.out, "lock", args, o.seed);
    write_protected(b, nullptr, locked);
    b.finish();
    out << summary(locked.design.netlist, locked.design.keys) << "\n";
    return kOk;
}

int outcome_code(Outcome oc) {
    switch (oc) {
    case Outcome::KeyFound: return kOk;
    case Outcome::ProvenPartial: return kProvenPartial;
    case Outcome::Timeout: return kTimeout;
    }
    return kFailure;
}

int cmd_attack(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
    if (o.keymap.empty() == o.reference.empty()) throw UsageError("attack needs exactly one of --keymap or --reference");
    Netlist lc = load_design(o.design);
    std::optional<KeyMap> km;
    std::optional<Oracle> oracle;
    if (!o.keymap.empty()) {
        km = KeyMap::from_json(read_file(o.keymap));
        oracle.emplace(lc, km->secret_key());
    } else {
        oracle.emplace(load_design(o.reference));
    }
    const Budget budget = budget_of(o);
    AttackReport rep = o.attack == "sat" ? sat_attack(lc, *oracle, budget, o.seed) : query_attack(lc, *oracle, budget, o.seed);
    if (km) {
        rep.v = km->v();
        rep.w = km->w();
    }
    rep.cv = o.cv;
    if (o.out.empty()) {
        out << rep.to_json();
    } else {
        Bundle b(o.out, "attack", args, o.seed);
        b.put("report.json", rep.to_json());
        b.put("report.csv", AttackReport::csv_header() + "\n" + rep.csv_row() + "\n");
        b.finish();
        out << rep.csv_row() << "\n";
    }
    return outcome_code(rep.outcome);
}

int cmd_verify(const Options& o, std::ostream& out) {
    Netlist lc = load_design(o.design);
    const std::size_t p = lc.key_inputs().size();
    std::vector<bool> key;
    if (!o.key.empty())
        key = parse_key(o.key, p);
    else if (!o.keymap.empty())
        key = KeyMap::from_json(read_file(o.keymap)).secret_key();
    else if (p > 0)
        throw UsageError("verify needs --key or --keymap");
    Netlist ref;
    if (!o.reference.empty()) {
        ref = load_design(o.reference);
    } else if (!o.coeffs.empty()) {
        ref = plain_block(parse_block_kind(o.block), load_spec(o));
    } else {
        throw UsageError("verify needs --reference or --coeffs");
    }
    Oracle oracle(ref);
    Verdict v = verify_key(lc, key, oracle, VerifyMode::Auto, o.seed, o.vectors);
    ordered_json j;
    j["equivalent"] = v.equivalent;
    j["vectors"] = v.vectors;
    if (v.counterexample) j["counterexample"] = key_to_string(*v.counterexample);
    out << j.dump() << "\n";
    return v.equivalent ? kOk : kMismatch;
}

int cmd_zpfr(const Options& o, std::ostream& out) {
    std::vector<std::int64_t> c;
    if (!o.plan.empty()) {
        DecoyPlan plan = DecoyPlan::from_json(read_file(o.plan));
        const auto key = o.key.empty() ? plan.secret_key() : parse_key(o.key, plan.v());
        c = plan.effective_coefficients(key);
    } else {
        if (!o.key.empty()) throw UsageError("--key needs --plan");
        c = load_spec(o).coefficients;
    }
    if (o.grid < 2) throw UsageError("--grid must be at least 2");
    const std::string csv = frequency_response_csv(zpfr(c, o.grid));
    if (o.out.empty()) {
        out << csv;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw Error("cannot write " + o.out);
        f << csv;
    }
    return kOk;
}

int cmd_export(const Options& o, std::ostream& out) {
    Netlist nl = load_design(o.design);
    std::string text;
    if (o.format == "bench")
        text = emit_bench(nl);
    else if (o.format == "verilog")
        text = emit_structural_hdl(nl);
    else if (o.format == "dimacs")
        text = export_dimacs(tseitin_encode(nl).cnf);
    else
        text = export_dimacs(build_attack_miter(nl).cnf);
    if (o.out.empty()) {
        out << text;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw Error("cannot write " + o.out);
        f << text;
    }
    return kOk;
}

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted = true; }

std::vector<std::int64_t> random_coefficients(std::size_t n, int mbw, std::uint64_t seed) {
    Rng rng(seed);
    const std::int64_t hi = (std::int64_t{1} << (mbw - 1)) - 1;
    std::vector<std::int64_t> c;
    while (c.size() < n) {
        std::int64_t x = rng.between(-hi, hi);
        if (x != 0) c.push_back(x);
    }
    return c;
}

struct SweepPoint {
    std::string name;
    ProtectedDesign design;
    std::int64_t cv = 0;
};

SweepPoint sweep_point(const Options& o, std::int64_t value) {
    Options q = o;
    if (o.vary == "w") {
        if (value < 1) throw UsageError("w values must be positive");
        q.w = static_cast<std::size_t>(value);
    } else if (o.vary == "cv") {
        q.cv = value;
    } else {
        if (value < 1) throw UsageError("n values must be positive");
        q.n = static_cast<int>(value);
    }
    if (o.tmpl == "adder") {
        auto d = point_lock(ProtectedDesign{adder_template(o.width), {}}, point_config(q));
        std::string name = "adder" + std::to_string(o.width) + "_w" + std::to_string(q.w) + "_cv" + std::to_string(q.cv);
        return {name, std::move(d), q.cv};
    }
    FilterSpec spec;
    spec.coefficients = random_coefficients(static_cast<std::size_t>(q.n), 8, o.seed);
    spec.ibw = o.ibw ? o.ibw : 8;
    spec.form = FilterForm::Folded;
    auto ob = obfuscate_spec(spec, q, false);
    std::string name = "tmcm_n" + std::to_string(q.n);
    if (q.w > 0) {
        ob.design = hybridize(ob.design, point_config(q), o.seed);
        name += "_w" + std::to_string(q.w) + "_cv" + std::to_string(q.cv);
    }
    return {name, std::move(ob.design), q.cv};
}

int cmd_sweep(const Options& o, const std::vector<std::string>& args, std::ostream& out) {
    std::vector<std::int64_t> values;
    try {
        values = parse_range(o.range);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    if (o.tmpl == "adder" && o.vary == "n") throw UsageError("the adder template has no n to vary");
    if (o.tmpl == "adder" && o.vary == "cv" && o.w == 0) throw UsageError("--vary cv needs --w");
    std::vector<std::string> attacks;
    if (o.attack == "both")
        attacks = {"query", "sat"};
    else
        attacks = {o.attack};
    const Budget budget = budget_of(o);

    std::optional<Bundle> bundle;
    if (!o.out.empty()) bundle.emplace(o.out, "sweep", args, o.seed);
    std::string csv = AttackReport::csv_header() + "\n";
    out << AttackReport::csv_header() << "\n" << std::flush;

    g_interrupted = false;
    auto previous = std::signal(SIGINT, on_sigint);
    bool complete = true;
    for (std::int64_t value : values) {
        if (g_interrupted) {
            complete = false;
            break;
        }
        SweepPoint pt = sweep_point(o, value);
        pt.design.netlist.set_name(pt.name);
        for (const auto& a : attacks) {
            Oracle oracle(pt.design.netlist, pt.design.keys.secret_key());
            AttackReport rep = a == "sat" ? sat_attack(pt.design.netlist, oracle, budget, o.seed)
                                          : query_attack(pt.design.netlist, oracle, budget, o.seed);
            rep.v = pt.design.keys.v();
            rep.w = pt.design.keys.w();
            rep.cv = pt.cv;
            csv += rep.csv_row() + "\n";
            out << rep.csv_row() << "\n" << std::flush;
        }
    }
    if (g_interrupted) complete = false;
    std::signal(SIGINT, previous);
    if (!complete) {
        csv += "# incomplete\n";
        out << "# incomplete\n";
    }
    if (bundle) {
        bundle->put("sweep.csv", csv);
        bundle->finish();
    }
    return complete ? kOk : kInterrupted;
}

} // namespace

Netlist adder_template(std::size_t width) {
    Netlist nl("adder" + std::to_string(width));
    LogicBuilder b(nl);
    Bus x = nl.add_input_bus("A", width);
    Bus y = nl.add_input_bus("B", width);
    nl.add_output_bus("S", adder(b, x, y));
    return nl;
}

std::vector<std::int64_t> parse_range(const std::string& text) {
    const std::string t = trim(text);
    std::vector<std::int64_t> values;
    try {
        if (auto dots = t.find(".."); dots != std::string::npos) {
            const std::int64_t lo = std::stoll(t.substr(0, dots));
            const std::int64_t hi = std::stoll(t.substr(dots + 2));
            for (std::int64_t v = lo; v <= hi; ++v) values.push_back(v);
        } else {
            std::stringstream ss(t);
            std::string item;
            while (std::getline(ss, item, ','))
                if (!trim(item).empty()) values.push_back(std::stoll(trim(item)));
        }
    } catch (const std::logic_error&) {
        throw ConfigError("bad range '" + text + "'");
    }
    if (values.empty()) throw ConfigError("empty range '" + text + "'");
    return values;
}

std::string fingerprint(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Decoy obfuscation, point-function locking and oracle-guided attacks on FIR filter hardware",
                 "firlock"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    auto* gen = app.add_subcommand("gen", "generate a plain filter or constant block");
    add_spec_options(gen, o);
    gen->add_option("--scope", o.scope, "whole filter or its constant block")->check(CLI::IsMember({"block", "filter"}));
    gen->add_option("--out", o.out, "output directory")->required();

    auto* obf = app.add_subcommand("obfuscate", "hide the coefficients behind decoys or key bits");
    add_spec_options(obf, o);
    add_protect_options(obf, o);
    obf->add_option("--seed", o.seed);
    obf->add_option("--out", o.out, "output directory")->required();

    auto* lock = app.add_subcommand("lock", "add a point function to a BENCH design");
    lock->add_option("--design", o.design, "BENCH netlist")->required()->check(CLI::ExistingFile);
    lock->add_option("--keymap", o.keymap, "key map of an already protected design")->check(CLI::ExistingFile);
    lock->add_option("--w", o.w, "point-function key bits")->required();
    lock->add_option("--cv", o.cv, "corruption value");
    lock->add_option("--seed", o.seed);
    lock->add_option("--out", o.out, "output directory")->required();

    auto* hyb = app.add_subcommand("hybrid", "obfuscate, lock with a point function and hide the keys");
    add_spec_options(hyb, o);
    add_protect_options(hyb, o);
    hyb->add_option("--w", o.w, "point-function key bits")->required();
    hyb->add_option("--cv", o.cv, "corruption value");
    hyb->add_option("--seed", o.seed);
    hyb->add_option("--out", o.out, "output directory")->required();

    auto* atk = app.add_subcommand("attack", "run the SAT or query attack against a protected design");
    atk->add_option("--design", o.design, "locked BENCH netlist")->required()->check(CLI::ExistingFile);
    atk->add_option("--keymap", o.keymap, "oracle: the design under its secret key")->check(CLI::ExistingFile);
    atk->add_option("--reference", o.reference, "oracle: a plain BENCH netlist")->check(CLI::ExistingFile);
    atk->add_option("--attack", o.attack)->check(CLI::IsMember({"sat", "query"}));
    atk->add_option("--cv", o.cv, "recorded in the report");
    add_budget_options(atk, o);
    atk->add_option("--seed", o.seed);
    atk->add_option("--out", o.out, "output directory (report to stdout when absent)");

    auto* ver = app.add_subcommand("verify", "check a key against a reference");
    ver->add_option("--design", o.design)->required()->check(CLI::ExistingFile);
    ver->add_option("--key", o.key, "0x<hex> or a k_{p-1}..k_0 bit string");
    ver->add_option("--keymap", o.keymap)->check(CLI::ExistingFile);
    ver->add_option("--reference", o.reference)->check(CLI::ExistingFile);
    ver->add_option("--coeffs", o.coeffs, "build the plain block as reference");
    ver->add_option("--block", o.block)->check(CLI::IsMember({"cavm", "mcm", "tmcm"}));
    ver->add_option("--ibw", o.ibw);
    ver->add_option("--mbw", o.mbw);
    ver->add_option("--vectors", o.vectors, "random vectors when the input is wider than 20 bits");
    ver->add_option("--seed", o.seed);

    auto* zp = app.add_subcommand("zpfr", "zero-phase frequency response as CSV");
    zp->add_option("--coeffs", o.coeffs);
    zp->add_option("--plan", o.plan, "decoy plan; the key selects the coefficients")->check(CLI::ExistingFile);
    zp->add_option("--key", o.key, "0x<hex> or a bit string (default: the plan's secret)");
    zp->add_option("--grid", o.grid, "grid points over [0, pi]");
    zp->add_option("--out", o.out, "CSV file (stdout when absent)");

    auto* sw = app.add_subcommand("sweep", "attack a family of designs and write one CSV row per run");
    sw->add_option("--template", o.tmpl)->check(CLI::IsMember({"adder", "tmcm"}));
    sw->add_option("--vary", o.vary)->check(CLI::IsMember({"w", "cv", "n"}));
    sw->add_option("--range", o.range, "a..b or a comma list")->required();
    sw->add_option("--attack", o.attack)->check(CLI::IsMember({"sat", "query", "both"}));
    sw->add_option("--w", o.w);
    sw->add_option("--cv", o.cv);
    sw->add_option("--v", o.v);
    sw->add_option("--n", o.n, "coefficients of the tmcm template");
    sw->add_option("--width", o.width, "adder width");
    sw->add_option("--ibw", o.ibw);
    sw->add_option("--arch", o.arch)->check(CLI::IsMember({"straightforward", "mul", "sa", "crk"}));
    sw->add_option("--criterion", o.criterion)->check(CLI::IsMember({"hc", "oc", "fb"}));
    add_budget_options(sw, o);
    sw->add_option("--seed", o.seed);
    sw->add_option("--out", o.out, "output directory");

    auto* ex = app.add_subcommand("export", "convert a BENCH design");
    ex->add_option("--design", o.design)->required()->check(CLI::ExistingFile);
    ex->add_option("--format", o.format)->check(CLI::IsMember({"bench", "verilog", "dimacs", "miter"}));
    ex->add_option("--out", o.out, "file (stdout when absent)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        err << "firlock: " << one_line(e.what()) << "\n";
        return kUsage;
    }

    try {
        if (*gen) return cmd_gen(o, args, out);
        if (*obf) return cmd_obfuscate(o, args, out);
        if (*lock) return cmd_lock(o, args, out);
        if (*hyb) return cmd_hybrid(o, args, out);
        if (*atk) return cmd_attack(o, args, out);
        if (*ver) return cmd_verify(o, out);
        if (*zp) return cmd_zpfr(o, out);
        if (*sw) return cmd_sweep(o, args, out);
        return cmd_export(o, out);
    } catch (const UsageError& e) {
        err << "firlock: " << one_line(e.what()) << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "firlock: " << one_line(e.what()) << "\n";
        return kFailure;
    }
}

} // namespace firlock::cli
