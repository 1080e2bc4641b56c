#include <doctest.h>

#include <random>

#include "firlock/arith.hpp"
#include "firlock/attacks.hpp"
#include "firlock/lock.hpp"
#include "firlock/obfuscate.hpp"
#include "fixtures.hpp"

using namespace firlock;

namespace {

// Unsigned a + b over `width` bits.
Netlist adder_circuit(std::size_t width) {
    Netlist nl("adder" + std::to_string(width));
    LogicBuilder b(nl);
    Bus x = nl.add_input_bus("A", width);
    Bus y = nl.add_input_bus("B", width);
    nl.add_output_bus("S", adder(b, x, y));
    return nl;
}

ProtectedDesign point_locked_adder(std::size_t w, std::int64_t cv, std::uint64_t seed) {
    PointFunctionConfig cfg;
    cfg.w = w;
    cfg.cv = cv;
    cfg.secret = random_key(w, seed);
    return lock_relaxed(adder_circuit(8), cfg);
}

FilterSpec tmcm_spec(std::vector<std::int64_t> c, int ibw) {
    FilterSpec s;
    s.name = "tmcm";
    s.coefficients = std::move(c);
    s.mbw = 8;
    s.ibw = ibw;
    return s;
}

ProtectedDesign small_tmcm(Architecture arch) {
    auto spec = tmcm_spec({23, -41, 77, 6}, 6);
    auto d = select_decoys(spec.coefficients, 8, Criterion::HardwareComplexity, spec.mbw, 3);
    auto plan = build_plan(spec.coefficients, d, spec.mbw, 3);
    return obfuscate_tmcm(spec, plan, arch);
}

void check_sound(const AttackReport& r, const std::vector<bool>& secret) {
    REQUIRE(r.key.size() == secret.size());
    for (std::size_t i = 0; i < r.proven.size(); ++i)
        if (r.proven[i]) CHECK(r.key[i] == secret[i]);
}

} // namespace

TEST_CASE("oracle answers are functional and counted") {
    Oracle o(fixtures::majority_locked_b(), fixtures::kMajoritySecret);
    auto a = o.query({true, false, true});
    CHECK(a == std::vector<bool>{true});
    CHECK(o.query({true, false, true}) == a);
    CHECK(o.query({false, false, true}) == std::vector<bool>{false});
    CHECK(o.queries() == 3);
    CHECK_THROWS_AS(o.query({true}), WidthError);
    CHECK_THROWS_AS(Oracle(fixtures::majority_locked_b(), {true}), KeyLengthError);
    CHECK_THROWS_AS(Oracle(fixtures::majority_locked_b()), ConfigError);
}

TEST_CASE("SAT attack recovers a working key for the locked majority circuits") {
    for (auto lc : {fixtures::majority_locked_b(), fixtures::majority_locked_d()}) {
        Oracle oracle(lc, fixtures::kMajoritySecret);
        auto rep = sat_attack(lc, oracle);
        CHECK(rep.outcome == Outcome::KeyFound);
        CHECK(rep.iterations >= 1);
        CHECK(rep.queries == rep.iterations);
        Oracle ref(fixtures::majority_plain());
        CHECK(verify_key(lc, rep.key, ref).equivalent);
    }
    Netlist b = fixtures::majority_locked_b();
    Oracle oracle(b, fixtures::kMajoritySecret);
    CHECK(sat_attack(b, oracle).key == fixtures::kMajoritySecret);
}

TEST_CASE("SAT attack on an unkeyed circuit finishes at once") {
    auto nl = fixtures::majority_plain();
    Oracle oracle(nl);
    auto rep = sat_attack(nl, oracle);
    CHECK(rep.outcome == Outcome::KeyFound);
    CHECK(rep.iterations == 0);
    CHECK(rep.key.empty());
}

TEST_CASE("one-point lock forces 2^w - 1 distinguishing inputs") {
    for (std::size_t w : {3U, 4U, 6U}) {
        auto d = point_locked_adder(w, 0, w);
        Oracle oracle(d.netlist, d.keys.secret_key());
        auto rep = sat_attack(d.netlist, oracle);
        CHECK(rep.outcome == Outcome::KeyFound);
        CHECK(rep.iterations == (std::size_t{1} << w) - 1);
        CHECK(rep.key == d.keys.secret_key());
    }
}

TEST_CASE("relaxed lock needs at least ceil((2^w - 1)/(cv + 1)) iterations") {
    for (std::int64_t cv : {1, 2, 3}) {
        auto d = point_locked_adder(6, cv, 40 + static_cast<std::uint64_t>(cv));
        Oracle oracle(d.netlist, d.keys.secret_key());
        auto rep = sat_attack(d.netlist, oracle);
        CHECK(rep.outcome == Outcome::KeyFound);
        const std::size_t lower = (63 + static_cast<std::size_t>(cv)) / static_cast<std::size_t>(cv + 1);
        CHECK(rep.iterations >= lower);
        CHECK(rep.iterations <= 63);
    }
}

TEST_CASE("SAT attack budget yields a timeout report") {
    auto d = point_locked_adder(8, 0, 1);
    Oracle oracle(d.netlist, d.keys.secret_key());
    Budget tiny{std::chrono::milliseconds(50), std::chrono::milliseconds(50)};
    auto rep = sat_attack(d.netlist, oracle, tiny);
    CHECK(rep.outcome == Outcome::Timeout);
    CHECK(rep.iterations < 255);
    CHECK(rep.budget_ms == 50);
}

TEST_CASE("query generation returns 2p patterns") {
    auto lc = fixtures::majority_locked_b();
    auto qs = find_queries(lc, 1);
    CHECK(qs.patterns.size() == 4);
    CHECK(qs.fallbacks == 0);
    CHECK(qs.sensitized == std::vector<bool>{true, true});

    // X = 000 sensitizes both key bits: some key value makes the output depend on each bit
    Simulator sim(lc);
    for (int bit = 0; bit < 2; ++bit) {
        bool sensitized = false;
        for (std::uint64_t other = 0; other < 2; ++other) {
            std::vector<std::uint64_t> k0(2), k1(2);
            k0[static_cast<std::size_t>(1 - bit)] = k1[static_cast<std::size_t>(1 - bit)] = other;
            k1[static_cast<std::size_t>(bit)] = 1;
            std::vector<std::uint64_t> x(3, 0);
            sensitized = sensitized || sim.eval(x, k0) != sim.eval(x, k1);
        }
        CHECK(sensitized);
    }

    // a key bit XORed straight onto an output is sensitized by anything
    Netlist t;
    auto x = t.add_input_bus("x", 2);
    auto k = t.add_key_input();
    t.add_output_bus("y", Bus{{t.add_gate(GateKind::Xor, {t.add_gate(GateKind::And, {x[0], x[1]}), k})}, false});
    auto tq = find_queries(t, 9);
    CHECK(tq.patterns.size() == 2);
    CHECK(tq.sensitized == std::vector<bool>{true});

    CHECK_THROWS_AS(find_queries(fixtures::majority_plain(), 1), ConfigError);
}

TEST_CASE("query attack on the majority worked examples") {
    {
        auto lc = fixtures::majority_locked_b();
        Oracle oracle(lc, fixtures::kMajoritySecret);
        auto rep = query_attack(lc, oracle);
        CHECK(rep.outcome == Outcome::KeyFound);
        CHECK(rep.proven == std::vector<bool>{true, true});
        CHECK(rep.key == fixtures::kMajoritySecret);
        CHECK(rep.queries == 4);
    }
    {
        auto lc = fixtures::majority_locked_d();
        Oracle oracle(lc, fixtures::kMajoritySecret);
        auto rep = query_attack(lc, oracle);
        CHECK(rep.outcome == Outcome::ProvenPartial);
        CHECK(rep.proven_count() == 0);
        REQUIRE(rep.relations.size() == 1);
        CHECK(rep.relations[0] == KeyRelation{0, 1, true});
    }
}

TEST_CASE("query attack proves every bit of a decoy-obfuscated TMCM") {
    for (auto arch : {Architecture::Mul, Architecture::ShiftAdds, Architecture::Straightforward}) {
        auto d = small_tmcm(arch);
        REQUIRE(d.keys.p() == 8);
        Oracle oracle(d.netlist, d.keys.secret_key());
        auto rep = query_attack(d.netlist, oracle);
        CHECK(rep.outcome == Outcome::KeyFound);
        CHECK(rep.proven_count() == 8);
        check_sound(rep, d.keys.secret_key());
    }
}

TEST_CASE("query attack proves nothing on a hybrid TMCM") {
    auto obf = small_tmcm(Architecture::Mul);
    PointFunctionConfig cfg;
    cfg.w = 6;
    cfg.secret = random_key(6, 12);
    auto h = hybridize(obf, cfg, 4);
    Oracle oracle(h.netlist, h.keys.secret_key());
    auto rep = query_attack(h.netlist, oracle, {std::chrono::milliseconds(10'000), std::chrono::milliseconds(60'000)});
    CHECK(rep.proven_count() == 0);
    check_sound(rep, h.keys.secret_key());
}

TEST_CASE("proven bits are always the secret bits on random RLL circuits") {
    std::mt19937_64 rng(77);
    int proofs = 0;
    for (int trial = 0; trial < 25; ++trial) {
        auto base = fixtures::random_netlist(rng, 6, 0, 40, 3);
        ProtectedDesign d;
        try {
            d = lock_rll(base, 4, rng());
        } catch (const TooManyKeys&) {
            continue;
        }
        Oracle oracle(d.netlist, d.keys.secret_key());
        auto rep = query_attack(d.netlist, oracle, {}, static_cast<std::uint64_t>(trial));
        check_sound(rep, d.keys.secret_key());
        for (const auto& r : rep.relations) {
            auto s = d.keys.secret_key();
            CHECK((s[r.a] != s[r.b]) == r.opposite);
            CHECK_FALSE(rep.proven[r.a]);
            CHECK_FALSE(rep.proven[r.b]);
        }
        proofs += static_cast<int>(rep.proven_count());
    }
    CHECK(proofs > 0);
}

TEST_CASE("inconsistent oracle is reported") {
    // y0 = x ^ k and y1 = !(x ^ k) can never both be 1
    Netlist lc("pair");
    auto x = lc.add_input_bus("x", 1)[0];
    auto k = lc.add_key_input();
    auto y0 = lc.add_gate(GateKind::Xor, {x, k});
    lc.add_output_bus("y", Bus{{y0, lc.add_gate(GateKind::Not, {y0})}, false});
    Netlist ones("ones");
    ones.add_input_bus("x", 1);
    ones.add_output_bus("y", Bus{{ones.const1(), ones.const1()}, false});
    Oracle o1(ones);
    CHECK_THROWS_AS(query_attack(lc, o1), InconsistentOracle);
    Oracle o2(ones);
    CHECK_THROWS_AS(sat_attack(lc, o2), InconsistentOracle);
}

TEST_CASE("verify_key") {
    auto d = small_tmcm(Architecture::ShiftAdds);
    auto plain = plain_block(BlockKind::Tmcm, tmcm_spec({23, -41, 77, 6}, 6));
    Oracle ref(plain);
    auto good = verify_key(d.netlist, d.keys.secret_key(), ref);
    CHECK(good.equivalent);
    CHECK(good.vectors == (std::size_t{1} << plain.input_width()));
    auto wrong = d.keys.secret_key();
    wrong[0] = !wrong[0];
    auto bad = verify_key(d.netlist, wrong, ref);
    CHECK_FALSE(bad.equivalent);
    REQUIRE(bad.counterexample.has_value());
    CHECK(bad.counterexample->size() == plain.input_width());

    auto add = adder_circuit(4);
    Oracle ra(add);
    CHECK(verify_key(add, {}, ra, VerifyMode::Exhaustive).vectors == 256);
    CHECK(verify_key(add, {}, ra, VerifyMode::Random, 1, 1000).vectors == 1000);
    CHECK_THROWS_AS(verify_key(d.netlist, {true}, ref), KeyLengthError);
}

TEST_CASE("attack report serialization") {
    auto lc = fixtures::majority_locked_d();
    Oracle oracle(lc, fixtures::kMajoritySecret);
    auto rep = query_attack(lc, oracle);
    rep.design = "maj_d";
    rep.v = 2;
    CHECK(AttackReport::csv_header() == "design,p,v,w,cv,attack,iterations,proven,time_ms,outcome");
    auto row = rep.csv_row();
    CHECK(row.rfind("maj_d,2,2,0,0,query,0,0,", 0) == 0);
    CHECK(row.substr(row.rfind(',') + 1) == "proven-partial");
    auto json = rep.to_json();
    CHECK(json.find("\"relation\": \"opposite\"") != std::string::npos);
    CHECK(json.find("\"outcome\": \"proven-partial\"") != std::string::npos);
}
