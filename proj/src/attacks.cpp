#include "firlock/attacks.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

#include <json.hpp>

#include "firlock/keymap.hpp"
#include "firlock/rng.hpp"
#include "firlock/sat.hpp"

namespace firlock {

namespace {

std::vector<std::uint64_t> broadcast(const std::vector<bool>& bits) {
    std::vector<std::uint64_t> w;
    for (bool b : bits) w.push_back(b ? ~std::uint64_t{0} : 0);
    return w;
}

double elapsed_ms(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<bool> random_vector(Rng& rng, std::size_t n) {
    std::vector<bool> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = rng.coin();
    return v;
}

int lit_of(int var, bool value) { return value ? var : -var; }

constexpr std::int64_t kQuickConflicts = 200;
constexpr int kSensitizationRounds = 64;

} // namespace

Oracle::Oracle(const Netlist& reference)
    : netlist_(std::make_shared<const Netlist>(reference)), sim_(*netlist_) {
    if (!netlist_->key_inputs().empty()) throw ConfigError("reference netlist has key inputs; pass its secret key");
    if (!netlist_->is_combinational()) throw HasStateError("oracle needs a combinational netlist");
}

Oracle::Oracle(const Netlist& locked, std::vector<bool> secret)
    : netlist_(std::make_shared<const Netlist>(locked)), key_words_(broadcast(secret)), sim_(*netlist_) {
    if (secret.size() != netlist_->key_inputs().size())
        throw KeyLengthError("oracle key has " + std::to_string(secret.size()) + " bits, netlist has " +
                             std::to_string(netlist_->key_inputs().size()));
    if (!netlist_->is_combinational()) throw HasStateError("oracle needs a combinational netlist");
}

std::vector<bool> Oracle::query(const std::vector<bool>& x) {
    if (x.size() != input_width()) throw WidthError("oracle query has the wrong width");
    ++queries_;
    auto y = sim_.eval(broadcast(x), key_words_);
    std::vector<bool> out;
    for (auto w : y) out.push_back(w & 1U);
    return out;
}

std::vector<std::uint64_t> Oracle::evaluate_words(std::span<const std::uint64_t> x) {
    if (x.size() != input_width()) throw WidthError("oracle query has the wrong width");
    return sim_.eval(x, key_words_);
}

std::string to_string(Outcome o) {
    switch (o) {
    case Outcome::KeyFound: return "key-found";
    case Outcome::ProvenPartial: return "proven-partial";
    case Outcome::Timeout: return "timeout";
    }
    return "?";
}

std::size_t AttackReport::proven_count() const {
    std::size_t n = 0;
    for (bool b : proven) n += b;
    return n;
}

std::string AttackReport::to_json() const {
    nlohmann::json j;
    j["attack"] = attack;
    j["design"] = design;
    j["solver"] = solver;
    j["p"] = p;
    j["v"] = v;
    j["w"] = w;
    j["cv"] = cv;
    j["key"] = key_to_string(key);
    j["key_hex"] = key_to_hex(key);
    nlohmann::json bits = nlohmann::json::array();
    for (std::size_t i = 0; i < proven.size(); ++i)
        bits.push_back({{"bit", i}, {"value", key.size() > i && key[i] ? 1 : 0}, {"status", proven[i] ? "proven" : "unproven"}});
    j["bits"] = bits;
    j["proven"] = proven_count();
    nlohmann::json rel = nlohmann::json::array();
    for (const auto& r : relations) rel.push_back({{"a", r.a}, {"b", r.b}, {"relation", r.opposite ? "opposite" : "equal"}});
    j["relations"] = rel;
    j["iterations"] = iterations;
    j["queries"] = queries;
    j["sensitization_fallbacks"] = sensitization_fallbacks;
    j["time_ms"] = time_ms;
    j["budget_ms"] = budget_ms;
    j["outcome"] = to_string(outcome);
    return j.dump(2) + "\n";
}

std::string AttackReport::csv_header() { return "design,p,v,w,cv,attack,iterations,proven,time_ms,outcome"; }

std::string AttackReport::csv_row() const {
    std::ostringstream os;
    os << design << ',' << p << ',' << v << ',' << w << ',' << cv << ',' << attack << ',' << iterations << ','
       << proven_count() << ',' << static_cast<std::int64_t>(time_ms + 0.5) << ',' << to_string(outcome);
    return os.str();
}

AttackReport sat_attack(const Netlist& lc, Oracle& oracle, const Budget& budget, std::uint64_t seed) {
    const auto t0 = Clock::now();
    const auto deadline = t0 + budget.total;
    AttackReport rep;
    rep.attack = "sat";
    rep.design = lc.name();
    rep.p = lc.key_inputs().size();
    rep.budget_ms = budget.total.count();
    const std::size_t q0 = oracle.queries();
    auto finish = [&](Outcome o) {
        rep.outcome = o;
        rep.queries = oracle.queries() - q0;
        rep.time_ms = elapsed_ms(t0);
        return rep;
    };
    if (lc.input_width() != oracle.input_width() || lc.output_width() != oracle.output_width())
        throw WidthError("locked netlist and oracle ports differ");
    if (rep.p == 0) return finish(Outcome::KeyFound);

    SatSession session(make_backend(seed));
    rep.solver = session.backend().name();
    AttackMiter m = build_attack_miter(lc);
    session.cnf() = m.cnf;
    const std::vector<std::vector<int>> both{m.k1, m.k2};
    const std::vector<int> act{m.diff};
    for (;;) {
        auto limits = SolveLimits::within(budget.per_solve).tighter(deadline);
        auto r = session.solve(act, limits);
        if (r.status == SolveStatus::Timeout) return finish(Outcome::Timeout);
        if (r.status == SolveStatus::Unsat) break;
        auto x = r.values(m.x);
        auto y = oracle.query(x);
        add_io_constraint(session.cnf(), lc, both, x, y);
        ++rep.iterations;
        rep.key = r.values(m.k1);
    }
    auto r = session.solve({}, SolveLimits::within(budget.per_solve).tighter(deadline));
    if (r.status == SolveStatus::Timeout) return finish(Outcome::Timeout);
    if (r.status == SolveStatus::Unsat) throw InconsistentOracle("no key is consistent with the oracle answers");
    rep.key = r.values(m.k1);
    auto verdict = verify_key(lc, rep.key, oracle, VerifyMode::Auto, seed);
    if (!verdict.equivalent) throw OracleMismatch("recovered key disagrees with the oracle");
    return finish(Outcome::KeyFound);
}

QuerySet find_queries(const Netlist& lc, std::uint64_t seed, const Budget& budget) {
    const std::size_t p = lc.key_inputs().size();
    if (p == 0) throw ConfigError("query generation needs key inputs");
    const auto deadline = Clock::now() + budget.total;
    QuerySet qs;
    Rng rng(seed);

    SatSession session(make_backend(seed));
    CnfFormula& f = session.cnf();
    auto a = encode_circuit(f, lc);
    auto b = encode_circuit(f, lc, a.inputs);
    int diff = add_difference(f, a.outputs, b.outputs);
    std::vector<int> tie(p);
    for (std::size_t j = 0; j < p; ++j) {
        tie[j] = f.new_var();
        f.add_clause({-tie[j], -a.keys[j], b.keys[j]});
        f.add_clause({-tie[j], a.keys[j], -b.keys[j]});
    }
    Simulator sim(lc);
    const std::size_t n = lc.input_width();
    // Random lanes where flipping key bit i changes some output.
    auto simulate_search = [&](std::size_t i) -> std::optional<std::vector<bool>> {
        for (int round = 0; round < kSensitizationRounds; ++round) {
            std::vector<std::uint64_t> x(n), k(p);
            for (auto& w : x) w = rng.next();
            for (auto& w : k) w = rng.next();
            k[i] = 0;
            auto y0 = sim.eval(x, k);
            k[i] = ~std::uint64_t{0};
            auto y1 = sim.eval(x, k);
            std::uint64_t hit = 0;
            for (std::size_t o = 0; o < y0.size(); ++o) hit |= y0[o] ^ y1[o];
            if (hit) {
                const int lane = std::countr_zero(hit);
                std::vector<bool> pattern(n);
                for (std::size_t b = 0; b < n; ++b) pattern[b] = (x[b] >> lane) & 1U;
                return pattern;
            }
        }
        return std::nullopt;
    };
    for (std::size_t i = 0; i < p; ++i) {
        std::vector<int> as{diff, -a.keys[i], b.keys[i]};
        for (std::size_t j = 0; j < p; ++j)
            if (j != i) as.push_back(tie[j]);
        SolveLimits quick = SolveLimits::within(budget.per_solve).tighter(deadline);
        quick.conflict_budget = kQuickConflicts;
        auto r = session.solve(as, quick);
        if (r.status == SolveStatus::Timeout) {
            if (auto pattern = simulate_search(i)) {
                qs.patterns.push_back(*pattern);
                qs.sensitized.push_back(true);
                continue;
            }
            r = session.solve(as, SolveLimits::within(budget.per_solve).tighter(deadline));
        }
        if (r.status == SolveStatus::Sat) {
            qs.patterns.push_back(r.values(a.inputs));
            qs.sensitized.push_back(true);
        } else {
            qs.patterns.push_back(random_vector(rng, lc.input_width()));
            qs.sensitized.push_back(false);
            ++qs.fallbacks;
        }
    }
    for (std::size_t i = 0; i < p; ++i) qs.patterns.push_back(random_vector(rng, lc.input_width()));
    return qs;
}

AttackReport query_attack(const Netlist& lc, Oracle& oracle, const Budget& budget, std::uint64_t seed) {
    const auto t0 = Clock::now();
    const auto deadline = t0 + budget.total;
    AttackReport rep;
    rep.attack = "query";
    rep.design = lc.name();
    rep.p = lc.key_inputs().size();
    rep.budget_ms = budget.total.count();
    const std::size_t q0 = oracle.queries();
    auto finish = [&](Outcome o) {
        rep.outcome = o;
        rep.queries = oracle.queries() - q0;
        rep.time_ms = elapsed_ms(t0);
        return rep;
    };
    if (lc.input_width() != oracle.input_width() || lc.output_width() != oracle.output_width())
        throw WidthError("locked netlist and oracle ports differ");
    const std::size_t p = rep.p;
    rep.proven.assign(p, false);
    if (p == 0) return finish(Outcome::KeyFound);

    QuerySet qs = find_queries(lc, seed, budget);
    rep.sensitization_fallbacks = qs.fallbacks;
    if (Clock::now() >= deadline) return finish(Outcome::Timeout);

    SatSession session(make_backend(seed));
    rep.solver = session.backend().name();
    CnfFormula& f = session.cnf();
    std::vector<int> k(p);
    for (auto& v : k) v = f.new_var();
    f.tags["key"] = k;
    const std::vector<std::vector<int>> sets{k};
    for (const auto& x : qs.patterns) add_io_constraint(f, lc, sets, x, oracle.query(x));

    auto limits = [&] { return SolveLimits::within(budget.per_solve).tighter(deadline); };
    auto r = session.solve({}, limits());
    if (r.status == SolveStatus::Timeout) return finish(Outcome::Timeout);
    if (r.status == SolveStatus::Unsat) throw InconsistentOracle("the oracle answers admit no key");
    rep.key = r.values(k);
    std::vector<std::vector<bool>> models{rep.key};

    for (std::size_t i = 0; i < p; ++i) {
        auto ri = session.solve(std::vector<int>{lit_of(k[i], !rep.key[i])}, limits());
        if (ri.status == SolveStatus::Timeout) return finish(Outcome::Timeout);
        if (ri.status == SolveStatus::Unsat) rep.proven[i] = true;
        else models.push_back(ri.values(k));
    }

    for (std::size_t i = 0; i < p; ++i) {
        if (rep.proven[i]) continue;
        for (std::size_t j = i + 1; j < p; ++j) {
            if (rep.proven[j]) continue;
            bool seen_equal = false, seen_diff = false;
            for (const auto& m : models) (m[i] == m[j] ? seen_equal : seen_diff) = true;
            if (seen_equal && seen_diff) continue;
            // A pair only ever seen equal may be forced equal; try to separate it, and vice versa.
            const bool try_unequal = !seen_diff;
            int act = f.new_var();
            if (try_unequal) {
                f.add_clause({-act, k[i], k[j]});
                f.add_clause({-act, -k[i], -k[j]});
            } else {
                f.add_clause({-act, k[i], -k[j]});
                f.add_clause({-act, -k[i], k[j]});
            }
            auto rr = session.solve(std::vector<int>{act}, limits());
            f.add_clause({-act});
            if (rr.status == SolveStatus::Timeout) return finish(Outcome::Timeout);
            if (rr.status == SolveStatus::Unsat)
                rep.relations.push_back({i, j, !try_unequal});
            else
                models.push_back(rr.values(k));
        }
    }
    return finish(rep.proven_count() == p ? Outcome::KeyFound : Outcome::ProvenPartial);
}

Verdict verify_key(const Netlist& lc, const std::vector<bool>& key, Oracle& reference, VerifyMode mode,
                   std::uint64_t seed, std::size_t random_vectors) {
    if (key.size() != lc.key_inputs().size())
        throw KeyLengthError("key has " + std::to_string(key.size()) + " bits, netlist has " +
                             std::to_string(lc.key_inputs().size()));
    const std::size_t n = lc.input_width();
    if (n != reference.input_width() || lc.output_width() != reference.output_width())
        throw WidthError("netlist and reference ports differ");
    const bool exhaustive = mode == VerifyMode::Exhaustive || (mode == VerifyMode::Auto && n <= 20);
    if (exhaustive && n > 40) throw ConfigError("exhaustive verification limited to 40 input bits");
    Simulator sim(lc);
    auto kw = broadcast(key);
    Rng rng(seed);
    Verdict v;
    const std::uint64_t total = exhaustive ? (std::uint64_t{1} << n) : random_vectors;
    std::vector<std::uint64_t> x(n);
    for (std::uint64_t base = 0; base < total; base += 64) {
        const std::uint64_t lanes = std::min<std::uint64_t>(64, total - base);
        for (std::size_t i = 0; i < n; ++i) {
            if (exhaustive) {
                std::uint64_t w = 0;
                for (std::uint64_t l = 0; l < lanes; ++l)
                    if (((base + l) >> i) & 1U) w |= std::uint64_t{1} << l;
                x[i] = w;
            } else {
                x[i] = rng.next();
            }
        }
        auto a = sim.eval(x, kw);
        auto b = reference.evaluate_words(x);
        const std::uint64_t mask = lanes == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << lanes) - 1);
        std::uint64_t bad = 0;
        for (std::size_t o = 0; o < a.size(); ++o) bad |= (a[o] ^ b[o]) & mask;
        v.vectors += lanes;
        if (bad) {
            const int lane = std::countr_zero(bad);
            std::vector<bool> cx(n);
            for (std::size_t i = 0; i < n; ++i) cx[i] = (x[i] >> lane) & 1U;
            v.equivalent = false;
            v.counterexample = cx;
            return v;
        }
    }
    return v;
}

} // namespace firlock
