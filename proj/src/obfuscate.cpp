#include "firlock/obfuscate.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include <json.hpp>

#include "firlock/rng.hpp"

namespace firlock {

std::string to_string(Criterion c) {
    switch (c) {
    case Criterion::HardwareComplexity: return "hc";
    case Criterion::OutputCorruption: return "oc";
    case Criterion::FilterBehavior: return "fb";
    }
    return "?";
}

std::string to_string(Architecture a) {
    switch (a) {
    case Architecture::Straightforward: return "straightforward";
    case Architecture::Mul: return "mul";
    case Architecture::ShiftAdds: return "sa";
    case Architecture::Crk: return "crk";
    }
    return "?";
}

Criterion parse_criterion(const std::string& s) {
    if (s == "hc") return Criterion::HardwareComplexity;
    if (s == "oc") return Criterion::OutputCorruption;
    if (s == "fb") return Criterion::FilterBehavior;
    throw ConfigError("unknown criterion '" + s + "' (expected hc, oc or fb)");
}

Architecture parse_architecture(const std::string& s) {
    if (s == "straightforward") return Architecture::Straightforward;
    if (s == "mul") return Architecture::Mul;
    if (s == "sa") return Architecture::ShiftAdds;
    if (s == "crk") return Architecture::Crk;
    throw ConfigError("unknown architecture '" + s + "' (expected straightforward, mul, sa or crk)");
}

// ---------------------------------------------------------------------------
// Decoy selection

namespace {

struct DecoyUniverse {
    std::int64_t lo, hi;
    explicit DecoyUniverse(int mbw)
        : lo(-(std::int64_t{1} << (mbw - 1))), hi((std::int64_t{1} << (mbw - 1)) - 1) {}
    bool contains(std::int64_t v) const { return v >= lo && v <= hi; }
};

// Hamming-distance neighbours of |c| with the sign of c, nearest first.
void assign_low_hamming(std::vector<std::int64_t>& d, std::int64_t c, std::size_t count, int mbw) {
    const DecoyUniverse u(mbw);
    const std::int64_t sign = c < 0 ? -1 : 1;
    const std::uint64_t mag = static_cast<std::uint64_t>(std::llabs(c));
    std::set<std::int64_t> used(d.begin(), d.end());
    used.insert(c);
    for (int hd = 1; hd <= mbw && count > 0; ++hd) {
        std::vector<std::int64_t> found;
        // Enumerate every hd-subset of the mbw bit positions.
        std::vector<int> pos(static_cast<std::size_t>(hd));
        for (int i = 0; i < hd; ++i) pos[static_cast<std::size_t>(i)] = i;
        while (true) {
            std::uint64_t mask = 0;
            for (int p : pos) mask |= std::uint64_t{1} << p;
            std::int64_t cand = sign * static_cast<std::int64_t>(mag ^ mask);
            if (u.contains(cand) && !used.count(cand)) found.push_back(cand);
            int i = hd - 1;
            while (i >= 0 && pos[static_cast<std::size_t>(i)] == mbw - hd + i) --i;
            if (i < 0) break;
            ++pos[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < hd; ++j) pos[static_cast<std::size_t>(j)] = pos[static_cast<std::size_t>(j - 1)] + 1;
        }
        std::sort(found.begin(), found.end(), [c](std::int64_t a, std::int64_t b) {
            auto da = std::llabs(a - c), db = std::llabs(b - c);
            return da != db ? da < db : a < b;
        });
        found.erase(std::unique(found.begin(), found.end()), found.end());
        for (std::size_t k = 0; k < found.size() && count > 0; ++k, --count) {
            d.push_back(found[k]);
            used.insert(found[k]);
        }
    }
    if (count > 0) throw ExhaustedError("not enough decoys near " + std::to_string(c) + " in " + std::to_string(mbw) + " bits");
}

void assign_random(std::vector<std::int64_t>& d, std::int64_t c, std::size_t count, int mbw, std::int64_t delta,
                   Rng& rng) {
    const DecoyUniverse u(mbw);
    std::set<std::int64_t> used(d.begin(), d.end());
    used.insert(c);
    auto ok = [&](std::int64_t x) { return !used.count(x) && std::llabs(x - c) > delta; };
    if (mbw <= 20) {
        std::vector<std::int64_t> pool;
        for (std::int64_t x = u.lo; x <= u.hi; ++x)
            if (ok(x)) pool.push_back(x);
        if (pool.size() < count)
            throw ExhaustedError("not enough decoys for " + std::to_string(c) + " in " + std::to_string(mbw) + " bits");
        for (std::size_t k = 0; k < count; ++k) {
            std::size_t j = k + rng.below(pool.size() - k);
            std::swap(pool[k], pool[j]);
            d.push_back(pool[k]);
        }
        return;
    }
    for (std::size_t attempts = 0; count > 0; ++attempts) {
        if (attempts > 1000000) throw ExhaustedError("decoy sampling did not converge");
        std::int64_t x = rng.between(u.lo, u.hi);
        if (!ok(x)) continue;
        d.push_back(x);
        used.insert(x);
        --count;
    }
}

} // namespace

std::vector<std::vector<std::int64_t>> select_decoys(const std::vector<std::int64_t>& c, int v, Criterion criterion,
                                                     int mbw, std::uint64_t seed) {
    if (v < 1) throw ConfigError("decoy selection needs v >= 1");
    if (c.empty()) throw ConfigError("no constants to obfuscate");
    if (mbw < 2 || mbw > 40) throw ConfigError("mbw must lie in [2, 40]");
    for (std::int64_t ci : c)
        if (signed_width(ci) > mbw) throw ConfigError("constant " + std::to_string(ci) + " exceeds mbw");
    Rng rng(seed);
    const std::int64_t delta = mbw >= 3 ? (std::int64_t{1} << (mbw - 3)) : 0;
    std::vector<std::vector<std::int64_t>> d(c.size());
    int noi = 0, nok = 0;
    while (nok < v) {
        const std::size_t nod = std::size_t{1} << noi;
        for (std::size_t i = 0; i < c.size(); ++i) {
            switch (criterion) {
            case Criterion::HardwareComplexity: assign_low_hamming(d[i], c[i], nod, mbw); break;
            case Criterion::OutputCorruption: assign_random(d[i], c[i], nod, mbw, 0, rng); break;
            case Criterion::FilterBehavior: assign_random(d[i], c[i], nod, mbw, delta, rng); break;
            }
            ++nok;
            if (nok == v) break;
        }
        ++noi;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Plans

std::size_t DecoyPlan::key_width(std::size_t i) const { return static_cast<std::size_t>(select_width(r.at(i).size())); }

std::size_t DecoyPlan::key_offset(std::size_t i) const {
    std::size_t off = 0;
    for (std::size_t j = 0; j < i; ++j) off += key_width(j);
    return off;
}

std::size_t DecoyPlan::v() const { return key_offset(r.size()); }

std::vector<bool> DecoyPlan::secret_key() const {
    std::vector<bool> key;
    for (std::size_t i = 0; i < r.size(); ++i)
        for (std::size_t b = 0; b < key_width(i); ++b) key.push_back((secret_pos[i] >> b) & 1U);
    return key;
}

std::vector<std::int64_t> DecoyPlan::effective_coefficients(const std::vector<bool>& key) const {
    if (key.size() != v())
        throw KeyLengthError("key has " + std::to_string(key.size()) + " bits, plan needs " + std::to_string(v()));
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < r.size(); ++i) {
        std::size_t sel = 0;
        for (std::size_t b = 0; b < key_width(i); ++b)
            if (key[key_offset(i) + b]) sel |= std::size_t{1} << b;
        out.push_back(r[i][std::min(sel, r[i].size() - 1)]);
    }
    return out;
}

std::string DecoyPlan::to_json() const {
    nlohmann::json j;
    j["C"] = c;
    j["D"] = d;
    j["R"] = r;
    j["secret_positions"] = secret_pos;
    j["S"] = s;
    j["T"] = t;
    j["mbw"] = mbw;
    j["v"] = v();
    j["criterion"] = to_string(criterion);
    j["seed"] = seed;
    j["secret_key"] = key_to_hex(secret_key());
    j["secret_bits"] = key_to_string(secret_key());
    return j.dump(2) + "\n";
}

DecoyPlan DecoyPlan::from_json(const std::string& text) {
    DecoyPlan p;
    try {
        auto j = nlohmann::json::parse(text);
        p.c = j.at("C").get<std::vector<std::int64_t>>();
        p.d = j.at("D").get<std::vector<std::vector<std::int64_t>>>();
        p.r = j.at("R").get<std::vector<std::vector<std::int64_t>>>();
        p.secret_pos = j.at("secret_positions").get<std::vector<std::size_t>>();
        p.s = j.at("S").get<std::vector<std::int64_t>>();
        p.t = j.at("T").get<std::vector<std::vector<std::int64_t>>>();
        p.mbw = j.at("mbw").get<int>();
        p.criterion = parse_criterion(j.at("criterion").get<std::string>());
        p.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("decoy plan: ") + e.what());
    }
    return p;
}

std::int64_t choose_base(const std::vector<std::int64_t>& r) {
    std::int64_t best = r.at(0);
    int best_width = 1 << 30;
    for (std::int64_t s : r) {
        std::vector<std::int64_t> t;
        for (std::int64_t x : r) t.push_back(x - s);
        bool is_signed = false;
        int w = representation_width(t, is_signed);
        if (w < best_width || (w == best_width && std::llabs(s) < std::llabs(best)) ||
            (w == best_width && std::llabs(s) == std::llabs(best) && s < best)) {
            best = s;
            best_width = w;
        }
    }
    return best;
}

namespace {

void finish_plan(DecoyPlan& p) {
    p.s.clear();
    p.t.clear();
    for (const auto& ri : p.r) {
        std::int64_t s = choose_base(ri);
        std::vector<std::int64_t> ti;
        for (std::int64_t x : ri) ti.push_back(x - s);
        p.s.push_back(s);
        p.t.push_back(ti);
    }
}

} // namespace

DecoyPlan build_plan(const std::vector<std::int64_t>& c, const std::vector<std::vector<std::int64_t>>& d, int mbw,
                     std::uint64_t seed, Criterion criterion) {
    if (c.size() != d.size()) throw ConfigError("one decoy array per constant expected");
    DecoyPlan p;
    p.c = c;
    p.d = d;
    p.mbw = mbw;
    p.seed = seed;
    p.criterion = criterion;
    Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < c.size(); ++i) {
        std::set<std::int64_t> seen{c[i]};
        for (std::int64_t x : d[i])
            if (!seen.insert(x).second) throw ConfigError("decoys must be unique and differ from the constant");
        std::vector<std::size_t> order(d[i].size() + 1);
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        rng.shuffle(order);
        std::vector<std::int64_t> ri;
        for (std::size_t k = 0; k < order.size(); ++k) {
            ri.push_back(order[k] == 0 ? c[i] : d[i][order[k] - 1]);
            if (order[k] == 0) p.secret_pos.push_back(k);
        }
        p.r.push_back(ri);
    }
    finish_plan(p);
    return p;
}

DecoyPlan build_plan_from_r(const std::vector<std::vector<std::int64_t>>& r, const std::vector<std::size_t>& secret_pos,
                            int mbw) {
    if (r.size() != secret_pos.size()) throw ConfigError("one secret position per R array expected");
    DecoyPlan p;
    p.r = r;
    p.secret_pos = secret_pos;
    p.mbw = mbw;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (secret_pos[i] >= r[i].size()) throw ConfigError("secret position out of range");
        p.c.push_back(r[i][secret_pos[i]]);
        std::vector<std::int64_t> di;
        for (std::size_t k = 0; k < r[i].size(); ++k)
            if (k != secret_pos[i]) di.push_back(r[i][k]);
        p.d.push_back(di);
    }
    finish_plan(p);
    return p;
}

// ---------------------------------------------------------------------------
// Realizations

namespace {

Bus fit(LogicBuilder& b, const Bus& a, std::size_t width) {
    Bus r = resize(b, a, width);
    r.is_signed = true;
    return r;
}

Bus const_mux(LogicBuilder& b, const Bus& sel, const std::vector<std::int64_t>& values) {
    bool is_signed = false;
    int w = representation_width(values, is_signed);
    return mux_tree_consts(b, sel, values, static_cast<std::size_t>(w));
}

std::vector<Bus> make_keys(LogicBuilder& b, const DecoyPlan& plan) {
    std::vector<Bus> keys;
    for (std::size_t i = 0; i < plan.n(); ++i) {
        Bus k;
        for (std::size_t j = 0; j < plan.key_width(i); ++j) k.bits.push_back(b.netlist().add_key_input());
        keys.push_back(k);
    }
    return keys;
}

// Selectable product r_{i,sel}*x realized from DBR products of every entry.
Bus selectable_dbr(LogicBuilder& b, const Bus& sel, const std::vector<std::int64_t>& values, const Bus& x,
                   std::size_t width) {
    std::vector<Bus> products;
    for (std::int64_t v : values) products.push_back(fit(b, dbr_const_mul(b, v, x), width));
    return mux_tree(b, sel, products);
}

// c_i' * x for one constant position under the chosen architecture.
Bus keyed_product(LogicBuilder& b, const DecoyPlan& plan, Architecture arch, std::size_t i, const Bus& key,
                  const Bus& x, std::size_t width) {
    switch (arch) {
    case Architecture::Straightforward: return fit(b, array_multiplier(b, x, const_mux(b, key, plan.r[i])), width);
    case Architecture::Mul: {
        Bus base = fit(b, dbr_const_mul(b, plan.s[i], x), width);
        Bus offset = fit(b, array_multiplier(b, x, const_mux(b, key, plan.t[i])), width);
        return fit(b, adder(b, base, offset), width);
    }
    case Architecture::ShiftAdds: {
        Bus base = fit(b, dbr_const_mul(b, plan.s[i], x), width);
        Bus offset = selectable_dbr(b, key, plan.t[i], x, width);
        return fit(b, adder(b, base, offset), width);
    }
    case Architecture::Crk: break;
    }
    throw ArchMismatch("constant replacement is not a decoy architecture");
}

Bus sum_fit(LogicBuilder& b, const std::vector<Bus>& terms, std::size_t width) {
    Bus acc = fit(b, terms.at(0), width);
    for (std::size_t i = 1; i < terms.size(); ++i) acc = fit(b, adder(b, acc, terms[i]), width);
    return acc;
}

} // namespace

BlockRealizer decoy_realizer(const DecoyPlan& plan, Architecture arch) {
    if (arch == Architecture::Crk) throw ArchMismatch("use crk_realizer for constant replacement");
    if (plan.r.empty()) throw ArchMismatch("empty decoy plan");
    BlockRealizer r;
    r.cavm = [plan, arch](LogicBuilder& b, const std::vector<Bus>& xs, std::size_t width) {
        auto keys = make_keys(b, plan);
        std::vector<Bus> terms;
        if (arch == Architecture::Straightforward) {
            for (std::size_t i = 0; i < plan.n(); ++i) terms.push_back(keyed_product(b, plan, arch, i, keys[i], xs.at(i), width));
            return sum_fit(b, terms, width);
        }
        // Fixed CAVM over S plus one selectable offset product per tap.
        std::vector<SignedTerm> base;
        for (std::size_t i = 0; i < plan.n(); ++i)
            if (plan.s[i] != 0) base.push_back(dbr_product(b, plan.s[i], xs.at(i)));
        if (!base.empty()) terms.push_back(fit(b, sum_terms(b, base), width));
        for (std::size_t i = 0; i < plan.n(); ++i) {
            if (arch == Architecture::Mul)
                terms.push_back(fit(b, array_multiplier(b, xs.at(i), const_mux(b, keys[i], plan.t[i])), width));
            else
                terms.push_back(selectable_dbr(b, keys[i], plan.t[i], xs.at(i), width));
        }
        return sum_fit(b, terms, width);
    };
    r.mcm = [plan, arch](LogicBuilder& b, const Bus& x, std::size_t width) {
        auto keys = make_keys(b, plan);
        std::vector<Bus> ys;
        for (std::size_t i = 0; i < plan.n(); ++i) ys.push_back(keyed_product(b, plan, arch, i, keys[i], x, width));
        return ys;
    };
    r.tmcm = [plan, arch](LogicBuilder& b, const Bus& x, const Bus& sel, std::size_t width) {
        auto keys = make_keys(b, plan);
        if (arch == Architecture::Straightforward) {
            std::vector<Bus> consts;
            std::vector<std::int64_t> all;
            for (const auto& ri : plan.r) all.insert(all.end(), ri.begin(), ri.end());
            bool is_signed = false;
            auto cw = static_cast<std::size_t>(representation_width(all, is_signed));
            for (std::size_t i = 0; i < plan.n(); ++i) {
                Bus c = mux_tree_consts(b, keys[i], plan.r[i], cw);
                c.is_signed = is_signed;
                consts.push_back(c);
            }
            return fit(b, array_multiplier(b, x, mux_tree(b, sel, consts)), width);
        }
        std::vector<Bus> base;
        for (std::int64_t s : plan.s) base.push_back(fit(b, dbr_const_mul(b, s, x), width));
        Bus base_sel = mux_tree(b, sel, base);
        Bus offset;
        if (arch == Architecture::Mul) {
            std::vector<std::int64_t> all;
            for (const auto& ti : plan.t) all.insert(all.end(), ti.begin(), ti.end());
            bool is_signed = false;
            auto cw = static_cast<std::size_t>(representation_width(all, is_signed));
            std::vector<Bus> consts;
            for (std::size_t i = 0; i < plan.n(); ++i) {
                Bus c = mux_tree_consts(b, keys[i], plan.t[i], cw);
                c.is_signed = is_signed;
                consts.push_back(c);
            }
            offset = fit(b, array_multiplier(b, x, mux_tree(b, sel, consts)), width);
        } else {
            std::vector<Bus> offsets;
            for (std::size_t i = 0; i < plan.n(); ++i) offsets.push_back(selectable_dbr(b, keys[i], plan.t[i], x, width));
            offset = mux_tree(b, sel, offsets);
        }
        return fit(b, adder(b, base_sel, offset), width);
    };
    return r;
}

namespace {

// Constant buses with the selected bits replaced by fresh key inputs.
std::vector<Bus> crk_constants(LogicBuilder& b, const std::vector<std::int64_t>& c, int mbw, std::size_t p_bits) {
    const std::size_t w = static_cast<std::size_t>(mbw);
    std::vector<Bus> buses;
    for (std::int64_t ci : c) buses.push_back(constant_bus(b, ci, w, true));
    std::size_t used = 0;
    for (std::size_t bit = 0; bit < w && used < p_bits; ++bit)
        for (std::size_t i = 0; i < c.size() && used < p_bits; ++i, ++used)
            buses[i].bits[bit] = b.netlist().add_key_input();
    return buses;
}

} // namespace

std::vector<bool> crk_secret(const std::vector<std::int64_t>& c, int mbw, std::size_t p_bits) {
    if (p_bits > c.size() * static_cast<std::size_t>(mbw)) throw ConfigError("more replaced bits than constant bits");
    std::vector<bool> key;
    for (std::size_t bit = 0; bit < static_cast<std::size_t>(mbw) && key.size() < p_bits; ++bit)
        for (std::size_t i = 0; i < c.size() && key.size() < p_bits; ++i)
            key.push_back((static_cast<std::uint64_t>(c[i]) >> bit) & 1U);
    return key;
}

BlockRealizer crk_realizer(const std::vector<std::int64_t>& c, int mbw, std::size_t p_bits) {
    (void)crk_secret(c, mbw, p_bits);
    BlockRealizer r;
    r.cavm = [c, mbw, p_bits](LogicBuilder& b, const std::vector<Bus>& xs, std::size_t width) {
        auto consts = crk_constants(b, c, mbw, p_bits);
        std::vector<Bus> terms;
        for (std::size_t i = 0; i < c.size(); ++i) terms.push_back(fit(b, array_multiplier(b, xs.at(i), consts[i]), width));
        return sum_fit(b, terms, width);
    };
    r.mcm = [c, mbw, p_bits](LogicBuilder& b, const Bus& x, std::size_t width) {
        auto consts = crk_constants(b, c, mbw, p_bits);
        std::vector<Bus> ys;
        for (const auto& k : consts) ys.push_back(fit(b, array_multiplier(b, x, k), width));
        return ys;
    };
    r.tmcm = [c, mbw, p_bits](LogicBuilder& b, const Bus& x, const Bus& sel, std::size_t width) {
        auto consts = crk_constants(b, c, mbw, p_bits);
        return fit(b, array_multiplier(b, x, mux_tree(b, sel, consts)), width);
    };
    return r;
}

namespace {

KeyMap obf_keymap(const std::vector<bool>& secret) {
    KeyMap km;
    for (bool bit : secret) km.ports.push_back({KeyRole::Obf, bit, std::nullopt});
    return km;
}

void check_plan(const FilterSpec& spec, const DecoyPlan& plan) {
    if (plan.c != spec.coefficients) throw ArchMismatch("plan constants differ from the filter coefficients");
    if (plan.mbw > spec.mbw) throw ArchMismatch("plan decoys are wider than the filter mbw");
}

} // namespace

ProtectedDesign obfuscate_crk(const FilterSpec& spec, BlockKind kind, std::size_t p_bits) {
    spec.validate();
    auto secret = crk_secret(spec.coefficients, spec.mbw, p_bits);
    Netlist nl = gen_block(kind, spec.n(), spec.ibw, spec.mbw, crk_realizer(spec.coefficients, spec.mbw, p_bits));
    nl.set_name(to_string(kind) + "_crk");
    return {std::move(nl), obf_keymap(secret)};
}

ProtectedDesign obfuscate_block(BlockKind kind, const FilterSpec& spec, const DecoyPlan& plan, Architecture arch) {
    spec.validate();
    check_plan(spec, plan);
    if (arch == Architecture::Crk) return obfuscate_crk(spec, kind, plan.v());
    Netlist nl = gen_block(kind, spec.n(), spec.ibw, spec.mbw, decoy_realizer(plan, arch));
    nl.set_name(to_string(kind) + "_" + to_string(arch));
    return {std::move(nl), obf_keymap(plan.secret_key())};
}

ProtectedDesign obfuscate_cavm(const FilterSpec& spec, const DecoyPlan& plan, Architecture arch) {
    return obfuscate_block(BlockKind::Cavm, spec, plan, arch);
}

ProtectedDesign obfuscate_mcm(const FilterSpec& spec, const DecoyPlan& plan, Architecture arch) {
    return obfuscate_block(BlockKind::Mcm, spec, plan, arch);
}

ProtectedDesign obfuscate_tmcm(const FilterSpec& spec, const DecoyPlan& plan, Architecture arch) {
    return obfuscate_block(BlockKind::Tmcm, spec, plan, arch);
}

BlockKind block_kind_of(FilterForm form) {
    switch (form) {
    case FilterForm::Direct: return BlockKind::Cavm;
    case FilterForm::Transposed: return BlockKind::Mcm;
    case FilterForm::Folded: return BlockKind::Tmcm;
    }
    return BlockKind::Cavm;
}

ProtectedDesign obfuscate_filter(const FilterSpec& spec, const DecoyPlan& plan, Architecture arch) {
    spec.validate();
    check_plan(spec, plan);
    if (arch == Architecture::Crk) {
        auto secret = crk_secret(spec.coefficients, spec.mbw, plan.v());
        return {gen_filter(spec, crk_realizer(spec.coefficients, spec.mbw, plan.v())), obf_keymap(secret)};
    }
    return {gen_filter(spec, decoy_realizer(plan, arch)), obf_keymap(plan.secret_key())};
}

Netlist plain_block(BlockKind kind, const FilterSpec& spec) {
    spec.validate();
    return gen_block(kind, spec.n(), spec.ibw, spec.mbw, plain_realizer(spec.coefficients, BlockStyle::Multiplier));
}

} // namespace firlock
