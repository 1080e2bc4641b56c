#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "firlock/netlist.hpp"

namespace firlock {

/// Functional instance an attacker may query: a reference netlist, or a
/// locked netlist together with its secret key.
class Oracle {
public:
    explicit Oracle(const Netlist& reference);
    Oracle(const Netlist& locked, std::vector<bool> secret);

    /// One input vector (flattened input bits, LSB first per bus). Counted.
    std::vector<bool> query(const std::vector<bool>& x);
    /// Up to 64 vectors at once, one word per input bit. Not counted.
    std::vector<std::uint64_t> evaluate_words(std::span<const std::uint64_t> x);

    std::size_t queries() const { return queries_; }
    std::size_t input_width() const { return netlist_->input_width(); }
    std::size_t output_width() const { return netlist_->output_width(); }

private:
    std::shared_ptr<const Netlist> netlist_;
    std::vector<std::uint64_t> key_words_;
    Simulator sim_;
    std::size_t queries_ = 0;
};

struct Budget {
    std::chrono::milliseconds per_solve{10'000};
    std::chrono::milliseconds total{600'000};
};

enum class Outcome { KeyFound, ProvenPartial, Timeout };
std::string to_string(Outcome o);

struct KeyRelation {
    std::size_t a = 0, b = 0;
    bool opposite = false; // k_a = not k_b, otherwise k_a = k_b
    bool operator==(const KeyRelation&) const = default;
};

struct AttackReport {
    std::string attack; // "sat" or "query"
    std::string design;
    std::string solver;
    std::size_t p = 0, v = 0, w = 0;
    std::int64_t cv = 0;
    std::vector<bool> key;    // candidate key
    std::vector<bool> proven; // per key bit (query attack)
    std::vector<KeyRelation> relations;
    std::size_t iterations = 0; // DIPs for the SAT attack
    std::size_t queries = 0;
    std::size_t sensitization_fallbacks = 0;
    double time_ms = 0;
    std::int64_t budget_ms = 0;
    Outcome outcome = Outcome::Timeout;

    std::size_t proven_count() const;
    std::string to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

/// Oracle-guided DIP loop over a two-copy miter.
AttackReport sat_attack(const Netlist& lc, Oracle& oracle, const Budget& budget = {}, std::uint64_t seed = 0);

struct QuerySet {
    std::vector<std::vector<bool>> patterns; // 2p input vectors
    std::vector<bool> sensitized;            // per key bit: pattern came from a sensitization solve
    std::size_t fallbacks = 0;
};
/// One sensitizing pattern per key bit (SAT search for X, K with the outputs
/// depending on that bit), then p seeded random patterns.
QuerySet find_queries(const Netlist& lc, std::uint64_t seed, const Budget& budget = {});

/// Constrains the key with the oracle answers to the queries, then proves
/// bits by contradiction and derives equal/opposite relations between the rest.
AttackReport query_attack(const Netlist& lc, Oracle& oracle, const Budget& budget = {}, std::uint64_t seed = 0);

enum class VerifyMode { Auto, Exhaustive, Random };

struct Verdict {
    bool equivalent = true;
    std::size_t vectors = 0;
    std::optional<std::vector<bool>> counterexample;
};

/// Compares lc under `key` with the oracle: every input vector when the
/// input width is at most 20 bits (Auto), otherwise `random_vectors` seeded vectors.
Verdict verify_key(const Netlist& lc, const std::vector<bool>& key, Oracle& reference,
                   VerifyMode mode = VerifyMode::Auto, std::uint64_t seed = 0, std::size_t random_vectors = 10'000);

} // namespace firlock
