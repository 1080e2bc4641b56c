#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "firlock/netlist.hpp"

namespace firlock {

/// Clause set over variables 1..num_vars; literals are DIMACS-style signed ints.
struct CnfFormula {
    int num_vars = 0;
    std::vector<std::vector<int>> clauses;
    /// Named variable groups ("x", "k1", "y2", ...), exported as DIMACS comments.
    std::map<std::string, std::vector<int>> tags;

    int new_var() { return ++num_vars; }
    /// Throws Error on a zero literal or an unknown variable. Empty clauses are allowed.
    void add_clause(std::vector<int> clause);
    void add_clause(std::initializer_list<int> clause) { add_clause(std::vector<int>(clause)); }
};

/// Variables of one encoded copy of a netlist. net_var is 0 for nets the copy does not use.
struct CircuitCopy {
    std::vector<int> net_var;
    std::vector<int> inputs;  // flattened primary inputs
    std::vector<int> keys;
    std::vector<int> outputs; // flattened primary outputs
};

/// Appends one copy of a combinational netlist. Inputs and keys reuse the given
/// variables when the spans are non-empty, otherwise they get fresh ones.
CircuitCopy encode_circuit(CnfFormula& f, const Netlist& nl, std::span<const int> input_vars = {},
                           std::span<const int> key_vars = {});

struct EncodedCircuit {
    CnfFormula cnf;
    CircuitCopy copy;
};
EncodedCircuit tseitin_encode(const Netlist& nl);

/// New variable `act` with act -> (a != b) for some bit pair; returns act.
int add_difference(CnfFormula& f, std::span<const int> a, std::span<const int> b);

/// Two copies sharing X, with separate key and output variables, and the
/// activation variable of Y1 != Y2.
struct AttackMiter {
    CnfFormula cnf;
    std::vector<int> x, k1, k2, y1, y2;
    int diff = 0;
};
AttackMiter build_attack_miter(const Netlist& lc);

/// For each key variable set, appends a copy of lc with X fixed to `x` and
/// the outputs required to equal `y` (constants folded first).
void add_io_constraint(CnfFormula& f, const Netlist& lc, std::span<const std::vector<int>> key_sets,
                       const std::vector<bool>& x, const std::vector<bool>& y);

std::string export_dimacs(const CnfFormula& f);
CnfFormula parse_dimacs(const std::string& text);

enum class SolveStatus { Sat, Unsat, Timeout };
std::string to_string(SolveStatus s);

using Clock = std::chrono::steady_clock;

struct SolveLimits {
    std::optional<Clock::time_point> deadline;
    std::int64_t conflict_budget = -1; // negative: unlimited
    const std::atomic<bool>* stop = nullptr;

    static SolveLimits within(std::chrono::milliseconds ms) { return {Clock::now() + ms, -1, nullptr}; }
    SolveLimits tighter(std::optional<Clock::time_point> other) const;
};

struct SolveStats {
    std::uint64_t decisions = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t propagations = 0;
};

struct SolveResult {
    SolveStatus status = SolveStatus::Timeout;
    std::vector<bool> model; // indexed by variable, entry 0 unused
    SolveStats stats;

    bool value(int lit) const { return lit > 0 ? model.at(static_cast<std::size_t>(lit)) : !model.at(static_cast<std::size_t>(-lit)); }
    std::vector<bool> values(std::span<const int> lits) const;
};

/// Incremental solving contract shared by the embedded and external solvers.
class SatBackend {
public:
    virtual ~SatBackend() = default;
    virtual int new_var() = 0;
    virtual int num_vars() const = 0;
    virtual void add_clause(std::span<const int> lits) = 0;
    virtual SolveResult solve(std::span<const int> assumptions = {}, const SolveLimits& limits = {}) = 0;
    virtual std::string name() const = 0;

    /// Pushes the variables and the clauses of f from index `from` on.
    void add_formula(const CnfFormula& f, std::size_t from = 0);
};

/// Conflict-driven clause-learning solver with assumptions.
class Solver final : public SatBackend {
public:
    explicit Solver(std::uint64_t seed = 0);
    ~Solver() override;
    Solver(const Solver&) = delete;
    Solver& operator=(const Solver&) = delete;

    int new_var() override;
    int num_vars() const override;
    void add_clause(std::span<const int> lits) override;
    SolveResult solve(std::span<const int> assumptions = {}, const SolveLimits& limits = {}) override;
    std::string name() const override { return "internal-cdcl"; }

    /// Unit propagation of the assumptions only. Values per variable
    /// (-1 unassigned, 0, 1; entry 0 unused), or nullopt on a conflict.
    std::optional<std::vector<std::int8_t>> propagate_only(std::span<const int> assumptions);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Runs an executable on a DIMACS file per solve call; assumptions become unit clauses.
class ExternalSolver final : public SatBackend {
public:
    explicit ExternalSolver(std::string command);
    int new_var() override { return cnf_.new_var(); }
    int num_vars() const override { return cnf_.num_vars; }
    void add_clause(std::span<const int> lits) override;
    SolveResult solve(std::span<const int> assumptions = {}, const SolveLimits& limits = {}) override;
    std::string name() const override { return "external:" + command_; }

private:
    std::string command_;
    CnfFormula cnf_;
};

/// ExternalSolver when FIRLOCK_SOLVER is set, otherwise the embedded solver.
std::unique_ptr<SatBackend> make_backend(std::uint64_t seed = 0);

/// A formula mirrored incrementally into a backend.
class SatSession {
public:
    explicit SatSession(std::unique_ptr<SatBackend> backend) : backend_(std::move(backend)) {}
    CnfFormula& cnf() { return cnf_; }
    SatBackend& backend() { return *backend_; }
    /// Forwards everything added to cnf() since the last call.
    void sync();
    SolveResult solve(std::span<const int> assumptions = {}, const SolveLimits& limits = {}) {
        sync();
        return backend_->solve(assumptions, limits);
    }

private:
    CnfFormula cnf_;
    std::unique_ptr<SatBackend> backend_;
    std::size_t synced_ = 0;
};

} // namespace firlock
