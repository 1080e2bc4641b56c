#include <doctest.h>

#include <random>

#include "firlock/eval.hpp"
#include "firlock/lock.hpp"
#include "fixtures.hpp"

using namespace firlock;

namespace {

// y = majority of the three bits of X.
Netlist majority_bus() {
    Netlist nl("maj3");
    Bus x = nl.add_input_bus("X", 3);
    NetId a = nl.add_gate(GateKind::And, {x[0], x[1]});
    NetId b = nl.add_gate(GateKind::And, {x[0], x[2]});
    NetId c = nl.add_gate(GateKind::And, {x[1], x[2]});
    NetId ab = nl.add_gate(GateKind::Or, {a, b});
    nl.add_output_bus("y", Bus{{nl.add_gate(GateKind::Or, {ab, c})}, false});
    return nl;
}

// Unsigned q-bit identity with one output bit per input bit.
Netlist passthrough(std::size_t q) {
    Netlist nl("pass");
    Bus x = nl.add_input_bus("X", q);
    Bus y;
    for (std::size_t i = 0; i < q; ++i) y.bits.push_back(nl.add_gate(GateKind::Buf, {x[i]}));
    nl.add_output_bus("Y", y);
    return nl;
}

std::vector<bool> concat(std::vector<bool> a, const std::vector<bool>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace

TEST_CASE("one-point function corrupts exactly X == K for every wrong key") {
    Netlist f = majority_bus();
    PointFunctionConfig cfg;
    cfg.w = 3;
    cfg.secret = key_from_string("011");
    auto d = lock_one_point(f, cfg);
    CHECK(d.keys.p() == 3);
    CHECK(d.keys.w() == 3);
    CHECK(d.keys.secret_key() == cfg.secret);
    BusEvaluator ref(f), locked(d.netlist);
    for (std::uint64_t k = 0; k < 8; ++k) {
        for (std::int64_t x = 0; x < 8; ++x) {
            std::vector<std::int64_t> in{x};
            bool corrupt = locked.eval(in, key_from_uint(k, 3)) != ref.eval(in);
            CHECK(corrupt == (k != 3 && static_cast<std::uint64_t>(x) == k));
        }
    }
}

TEST_CASE("relaxed point function with cv 1 corrupts a window of two inputs") {
    Netlist f = majority_bus();
    PointFunctionConfig cfg;
    cfg.w = 3;
    cfg.cv = 1;
    cfg.secret = key_from_string("011");
    auto d = lock_relaxed(f, cfg);
    BusEvaluator ref(f), locked(d.netlist);
    std::vector<std::int64_t> bad;
    for (std::int64_t x = 0; x < 8; ++x) {
        std::vector<std::int64_t> in{x};
        if (locked.eval(in, key_from_string("010")) != ref.eval(in)) bad.push_back(x);
    }
    CHECK(bad == std::vector<std::int64_t>{2, 3});
    for (std::int64_t x = 0; x < 8; ++x) {
        std::vector<std::int64_t> in{x};
        CHECK(locked.eval(in, cfg.secret) == ref.eval(in));
    }
}

TEST_CASE("corruption census matches (2^w - 1)(cv + 1) 2^(q - w)") {
    std::mt19937_64 rng(11);
    for (std::size_t q = 1; q <= 8; ++q) {
        for (std::size_t w = 1; w <= q; ++w) {
            PointFunctionConfig cfg;
            cfg.w = w;
            cfg.cv = static_cast<std::int64_t>(rng() % (std::uint64_t{1} << w));
            cfg.secret = random_key(w, rng());
            auto f = passthrough(q);
            auto d = lock_relaxed(f, cfg);
            BusEvaluator locked(d.netlist);
            std::uint64_t count = 0;
            for (std::uint64_t k = 0; k < (std::uint64_t{1} << w); ++k) {
                auto key = key_from_uint(k, w);
                std::vector<std::vector<std::int64_t>> batch;
                auto flush = [&] {
                    auto ys = locked.eval_batch(batch, key);
                    for (std::size_t i = 0; i < ys.size(); ++i) count += ys[i][0] != batch[i][0];
                    batch.clear();
                };
                for (std::int64_t x = 0; x < (std::int64_t{1} << q); ++x) {
                    batch.push_back({x});
                    if (batch.size() == 64) flush();
                }
                if (!batch.empty()) flush();
            }
            const std::uint64_t expect = ((std::uint64_t{1} << w) - 1) * static_cast<std::uint64_t>(cfg.cv + 1) << (q - w);
            CHECK_MESSAGE(count == expect, "q=" << q << " w=" << w << " cv=" << cfg.cv);
        }
    }
}

TEST_CASE("point function honours slice and target output") {
    auto f = passthrough(6);
    PointFunctionConfig cfg;
    cfg.w = 2;
    cfg.secret = key_from_string("10");
    cfg.slice_bits = {4, 5};
    cfg.target_output = 1;
    auto d = lock_one_point(f, cfg);
    BusEvaluator locked(d.netlist);
    for (std::int64_t x = 0; x < 64; ++x) {
        std::vector<std::int64_t> in{x};
        std::int64_t y = locked.eval(in, key_from_string("01"))[0];
        std::int64_t expect = (x >> 4) == 1 ? x ^ 2 : x;
        CHECK(y == expect);
    }
}

TEST_CASE("point function rejects bad configurations") {
    auto f = passthrough(4);
    PointFunctionConfig cfg;
    cfg.w = 0;
    CHECK_THROWS_AS(lock_one_point(f, cfg), ConfigError);
    cfg.w = 5;
    cfg.secret.assign(5, false);
    CHECK_THROWS_AS(lock_one_point(f, cfg), ConfigError);
    cfg.w = 3;
    cfg.secret.assign(2, false);
    CHECK_THROWS_AS(lock_one_point(f, cfg), ConfigError);
    cfg.secret.assign(3, false);
    cfg.cv = 8;
    CHECK_THROWS_AS(lock_relaxed(f, cfg), ConfigError);
    cfg.cv = 0;
    cfg.comparand_bus = "nope";
    CHECK_THROWS_AS(lock_one_point(f, cfg), ConfigError);
}

TEST_CASE("random logic locking on majority") {
    auto f = fixtures::majority_plain();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto d = lock_rll(f, 2, seed);
        CHECK(d.keys.p() == 2);
        CHECK(d.keys.v() == 2);
        BusEvaluator ref(f), locked(d.netlist);
        auto secret = d.keys.secret_key();
        bool some_wrong_corrupts = false;
        for (std::uint64_t k = 0; k < 4; ++k) {
            auto key = key_from_uint(k, 2);
            bool differs = false;
            for (std::int64_t x = 0; x < 8; ++x) {
                std::vector<std::int64_t> in{x & 1, (x >> 1) & 1, (x >> 2) & 1};
                differs = differs || locked.eval(in, key) != ref.eval(in);
            }
            if (key == secret) CHECK_FALSE(differs);
            else some_wrong_corrupts = some_wrong_corrupts || differs;
        }
        CHECK(some_wrong_corrupts);
    }
    CHECK_THROWS_AS(lock_rll(f, 99, 1), TooManyKeys);
}

TEST_CASE("hybrid design: secret key restores function and hiding gates follow partner secrets") {
    FilterSpec spec;
    spec.coefficients = {56, 81};
    spec.mbw = 8;
    spec.ibw = 4;
    DecoyPlan plan = build_plan_from_r({{61, 59, 56, 57}, {81, 80}}, {2, 0}, 8);
    auto obf = obfuscate_cavm(spec, plan, Architecture::ShiftAdds);
    REQUIRE(obf.keys.v() == 3);

    PointFunctionConfig cfg;
    cfg.w = 4;
    cfg.cv = 2;
    cfg.secret = key_from_string("1010");
    auto pre = lock_relaxed(obf, cfg);
    auto hyb = hybridize(obf, cfg, 5);
    REQUIRE(hyb.keys.p() == 7);
    CHECK(hyb.keys.v() == 3);
    CHECK(hyb.keys.w() == 4);
    CHECK(hyb.keys.secret_key() == concat(obf.keys.secret_key(), cfg.secret));

    const auto& ports = hyb.keys.ports;
    for (std::size_t i = 0; i < ports.size(); ++i) {
        REQUIRE(ports[i].hiding.has_value());
        std::size_t j = ports[i].hiding->partner;
        CHECK(ports[j].role == KeyRole::Obf);
        CHECK(j != i);
        CHECK(ports[i].hiding->kind == (ports[j].secret ? HideKind::Xnor : HideKind::Xor));
    }
    // every obf port feeds its own hiding gate and at least one other
    auto fo = hyb.netlist.fanouts();
    for (std::size_t i = 0; i < ports.size(); ++i)
        if (ports[i].role == KeyRole::Obf) CHECK(fo[hyb.netlist.key_inputs()[i]].size() >= 2);

    // Under key K the hybrid equals the unhidden lock under the key seen by the hidden nets.
    Netlist plain = plain_block(BlockKind::Cavm, spec);
    BusEvaluator ev_hyb(hyb.netlist), ev_pre(pre.netlist), ev_plain(plain);
    for (std::uint64_t k = 0; k < 128; ++k) {
        auto key = key_from_uint(k, 7);
        std::vector<bool> seen(7);
        for (std::size_t i = 0; i < 7; ++i) {
            std::size_t j = ports[i].hiding->partner;
            seen[i] = key[i] ^ key[j] ^ ports[j].secret;
        }
        std::vector<std::vector<std::int64_t>> batch;
        for (std::int64_t a = -8; a < 8; ++a) {
            for (std::int64_t b = -8; b < 8; ++b) batch.push_back({a, b});
            if (batch.size() == 64) {
                CHECK(ev_hyb.eval_batch(batch, key) == ev_pre.eval_batch(batch, seen));
                if (key == hyb.keys.secret_key()) CHECK(ev_hyb.eval_batch(batch, key) == ev_plain.eval_batch(batch));
                batch.clear();
            }
        }
    }
}

TEST_CASE("hybridize needs two obfuscation bits") {
    FilterSpec spec;
    spec.coefficients = {56};
    spec.mbw = 8;
    spec.ibw = 4;
    DecoyPlan plan = build_plan_from_r({{61, 56}}, {1}, 8);
    auto obf = obfuscate_cavm(spec, plan, Architecture::Mul);
    REQUIRE(obf.keys.v() == 1);
    PointFunctionConfig cfg;
    cfg.w = 2;
    cfg.secret = {true, false};
    CHECK_THROWS_AS(hybridize(obf, cfg, 1), ConfigError);
}
