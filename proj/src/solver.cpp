#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <random>

#include "firlock/error.hpp"
#include "firlock/sat.hpp"

namespace firlock {

namespace {

using Lit = std::uint32_t;
using CRef = std::uint32_t;

constexpr CRef kNoRef = ~CRef{0};
constexpr Lit kNoLit = ~Lit{0};
constexpr std::int8_t kFalse = 0;
constexpr std::int8_t kTrue = 1;
constexpr std::int8_t kUndef = 2;

inline std::uint32_t var_of(Lit l) { return l >> 1; }
inline bool sign_of(Lit l) { return l & 1U; }
inline Lit make_lit(std::uint32_t v, bool neg) { return (v << 1) | (neg ? 1U : 0U); }
inline Lit from_dimacs(int d) { return make_lit(static_cast<std::uint32_t>(std::abs(d) - 1), d < 0); }

double luby(double y, int x) {
    int size = 1, seq = 0;
    while (size < x + 1) {
        ++seq;
        size = 2 * size + 1;
    }
    while (size - 1 != x) {
        size = (size - 1) >> 1;
        --seq;
        x = x % size;
    }
    return std::pow(y, seq);
}

} // namespace

struct Solver::Impl {
    // Clause arena: [size][flags | lbd << 2][activity bits or forward ref][lits...]
    std::vector<std::uint32_t> mem;
    std::vector<CRef> originals, learnts;

    struct Watch {
        CRef cref;
        Lit blocker;
    };

    std::vector<std::int8_t> assigns;
    std::vector<int> level;
    std::vector<CRef> reason;
    std::vector<bool> polarity;
    std::vector<double> activity;
    std::vector<std::uint8_t> seen;
    std::vector<std::vector<Watch>> watches;

    std::vector<Lit> trail;
    std::vector<int> trail_lim;
    std::size_t qhead = 0;

    // Max-heap of variables by activity.
    std::vector<std::uint32_t> heap;
    std::vector<int> heap_pos;

    double var_inc = 1.0, var_decay = 0.95;
    double cla_inc = 1.0, cla_decay = 0.999;
    bool ok = true;
    std::mt19937_64 rng;
    SolveStats stats;
    std::uint64_t next_reduce = 2000;
    std::uint64_t reduce_step = 300;

    std::vector<Lit> assumptions;
    std::vector<Lit> analyze_stack, analyze_toclear, add_tmp;

    explicit Impl(std::uint64_t seed) : rng(seed), seed_(seed) {}
    std::uint64_t seed_;

    // clause access
    std::uint32_t csize(CRef c) const { return mem[c]; }
    bool clearnt(CRef c) const { return mem[c + 1] & 1U; }
    bool cdeleted(CRef c) const { return mem[c + 1] & 2U; }
    void cmark_deleted(CRef c) { mem[c + 1] |= 2U; }
    std::uint32_t clbd(CRef c) const { return mem[c + 1] >> 2; }
    float cact(CRef c) const { return std::bit_cast<float>(mem[c + 2]); }
    void set_cact(CRef c, float a) { mem[c + 2] = std::bit_cast<std::uint32_t>(a); }
    Lit* clits(CRef c) { return reinterpret_cast<Lit*>(&mem[c + 3]); }

    std::int8_t value(Lit l) const {
        std::int8_t a = assigns[var_of(l)];
        return a == kUndef ? kUndef : static_cast<std::int8_t>(a ^ static_cast<std::int8_t>(sign_of(l)));
    }
    int decision_level() const { return static_cast<int>(trail_lim.size()); }
    std::uint32_t nvars() const { return static_cast<std::uint32_t>(assigns.size()); }

    int new_var() {
        std::uint32_t v = nvars();
        assigns.push_back(kUndef);
        level.push_back(0);
        reason.push_back(kNoRef);
        polarity.push_back(true);
        // seed 0 keeps creation order (circuit inputs first); other seeds jitter ties
        activity.push_back(seed_ == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, 1e-5)(rng));
        seen.push_back(0);
        watches.emplace_back();
        watches.emplace_back();
        heap_pos.push_back(-1);
        heap_insert(v);
        return static_cast<int>(v) + 1;
    }

    // heap
    bool heap_less(std::uint32_t a, std::uint32_t b) const { return activity[a] > activity[b]; }
    void heap_up(std::size_t i) {
        std::uint32_t v = heap[i];
        while (i > 0) {
            std::size_t parent = (i - 1) >> 1;
            if (!heap_less(v, heap[parent])) break;
            heap[i] = heap[parent];
            heap_pos[heap[i]] = static_cast<int>(i);
            i = parent;
        }
        heap[i] = v;
        heap_pos[v] = static_cast<int>(i);
    }
    void heap_down(std::size_t i) {
        std::uint32_t v = heap[i];
        for (;;) {
            std::size_t child = 2 * i + 1;
            if (child >= heap.size()) break;
            if (child + 1 < heap.size() && heap_less(heap[child + 1], heap[child])) ++child;
            if (!heap_less(heap[child], v)) break;
            heap[i] = heap[child];
            heap_pos[heap[i]] = static_cast<int>(i);
            i = child;
        }
        heap[i] = v;
        heap_pos[v] = static_cast<int>(i);
    }
    void heap_insert(std::uint32_t v) {
        if (heap_pos[v] >= 0) return;
        heap.push_back(v);
        heap_up(heap.size() - 1);
    }
    std::uint32_t heap_pop() {
        std::uint32_t top = heap.front();
        heap_pos[top] = -1;
        heap.front() = heap.back();
        heap.pop_back();
        if (!heap.empty()) {
            heap_pos[heap.front()] = 0;
            heap_down(0);
        }
        return top;
    }

    void bump_var(std::uint32_t v) {
        if ((activity[v] += var_inc) > 1e100) {
            for (auto& a : activity) a *= 1e-100;
            var_inc *= 1e-100;
        }
        if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
    }
    void bump_clause(CRef c) {
        float a = cact(c) + static_cast<float>(cla_inc);
        set_cact(c, a);
        if (a > 1e20F) {
            for (CRef l : learnts) set_cact(l, cact(l) * 1e-20F);
            cla_inc *= 1e-20;
        }
    }

    CRef alloc(const std::vector<Lit>& lits, bool learnt, std::uint32_t lbd) {
        CRef c = static_cast<CRef>(mem.size());
        mem.push_back(static_cast<std::uint32_t>(lits.size()));
        mem.push_back((learnt ? 1U : 0U) | (lbd << 2));
        mem.push_back(std::bit_cast<std::uint32_t>(0.0F));
        for (Lit l : lits) mem.push_back(l);
        (learnt ? learnts : originals).push_back(c);
        return c;
    }
    void attach(CRef c) {
        Lit* l = clits(c);
        watches[l[0]].push_back({c, l[1]});
        watches[l[1]].push_back({c, l[0]});
    }

    void enqueue(Lit l, CRef from) {
        std::uint32_t v = var_of(l);
        assigns[v] = static_cast<std::int8_t>(!sign_of(l));
        level[v] = decision_level();
        reason[v] = from;
        trail.push_back(l);
    }

    CRef propagate() {
        CRef confl = kNoRef;
        while (qhead < trail.size()) {
            Lit p = trail[qhead++];
            Lit false_lit = p ^ 1U;
            auto& ws = watches[false_lit];
            ++stats.propagations;
            Watch* i = ws.data();
            Watch* j = i;
            Watch* end = i + ws.size();
            while (i != end) {
                if (value(i->blocker) == kTrue) {
                    *j++ = *i++;
                    continue;
                }
                CRef c = i->cref;
                Lit* lits = clits(c);
                if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
                ++i;
                Lit first = lits[0];
                Watch w{c, first};
                if (value(first) == kTrue) {
                    *j++ = w;
                    continue;
                }
                bool moved = false;
                std::uint32_t n = csize(c);
                for (std::uint32_t k = 2; k < n; ++k) {
                    if (value(lits[k]) != kFalse) {
                        lits[1] = lits[k];
                        lits[k] = false_lit;
                        watches[lits[1]].push_back(w);
                        moved = true;
                        break;
                    }
                }
                if (moved) continue;
                *j++ = w;
                if (value(first) == kFalse) {
                    confl = c;
                    qhead = trail.size();
                    while (i != end) *j++ = *i++;
                } else {
                    enqueue(first, c);
                }
            }
            ws.resize(static_cast<std::size_t>(j - ws.data()));
            if (confl != kNoRef) break;
        }
        return confl;
    }

    void cancel_until(int lvl) {
        if (decision_level() <= lvl) return;
        for (std::size_t c = trail.size(); c-- > static_cast<std::size_t>(trail_lim[static_cast<std::size_t>(lvl)]);) {
            std::uint32_t v = var_of(trail[c]);
            assigns[v] = kUndef;
            reason[v] = kNoRef;
            polarity[v] = sign_of(trail[c]);
            heap_insert(v);
        }
        qhead = static_cast<std::size_t>(trail_lim[static_cast<std::size_t>(lvl)]);
        trail.resize(qhead);
        trail_lim.resize(static_cast<std::size_t>(lvl));
    }

    std::uint32_t abstract_level(std::uint32_t v) const { return 1U << (static_cast<std::uint32_t>(level[v]) & 31U); }

    bool lit_redundant(Lit p, std::uint32_t abstract) {
        analyze_stack.clear();
        analyze_stack.push_back(p);
        std::size_t top = analyze_toclear.size();
        while (!analyze_stack.empty()) {
            Lit q = analyze_stack.back();
            analyze_stack.pop_back();
            CRef c = reason[var_of(q)];
            Lit* lits = clits(c);
            for (std::uint32_t i = 1; i < csize(c); ++i) {
                Lit l = lits[i];
                std::uint32_t v = var_of(l);
                if (seen[v] || level[v] == 0) continue;
                if (reason[v] != kNoRef && (abstract_level(v) & abstract)) {
                    seen[v] = 1;
                    analyze_stack.push_back(l);
                    analyze_toclear.push_back(l);
                } else {
                    for (std::size_t k = top; k < analyze_toclear.size(); ++k) seen[var_of(analyze_toclear[k])] = 0;
                    analyze_toclear.resize(top);
                    return false;
                }
            }
        }
        return true;
    }

    void analyze(CRef confl, std::vector<Lit>& out, int& bt_level, std::uint32_t& lbd) {
        out.clear();
        out.push_back(kNoLit);
        int path = 0;
        Lit p = kNoLit;
        std::size_t index = trail.size();
        do {
            if (clearnt(confl)) bump_clause(confl);
            Lit* lits = clits(confl);
            for (std::uint32_t i = (p == kNoLit ? 0 : 1); i < csize(confl); ++i) {
                Lit q = lits[i];
                std::uint32_t v = var_of(q);
                if (seen[v] || level[v] == 0) continue;
                bump_var(v);
                seen[v] = 1;
                if (level[v] >= decision_level())
                    ++path;
                else
                    out.push_back(q);
            }
            while (!seen[var_of(trail[--index])]) {}
            p = trail[index];
            confl = reason[var_of(p)];
            seen[var_of(p)] = 0;
            --path;
        } while (path > 0);
        out[0] = p ^ 1U;

        analyze_toclear.assign(out.begin(), out.end());
        std::uint32_t abstract = 0;
        for (std::size_t i = 1; i < out.size(); ++i) abstract |= abstract_level(var_of(out[i]));
        std::size_t j = 1;
        for (std::size_t i = 1; i < out.size(); ++i)
            if (reason[var_of(out[i])] == kNoRef || !lit_redundant(out[i], abstract)) out[j++] = out[i];
        out.resize(j);

        bt_level = 0;
        if (out.size() > 1) {
            std::size_t max_i = 1;
            for (std::size_t i = 2; i < out.size(); ++i)
                if (level[var_of(out[i])] > level[var_of(out[max_i])]) max_i = i;
            std::swap(out[1], out[max_i]);
            bt_level = level[var_of(out[1])];
        }
        for (Lit l : analyze_toclear) seen[var_of(l)] = 0;

        std::vector<int>& levels = scratch_levels;
        levels.clear();
        for (Lit l : out) levels.push_back(level[var_of(l)]);
        std::sort(levels.begin(), levels.end());
        lbd = static_cast<std::uint32_t>(std::unique(levels.begin(), levels.end()) - levels.begin());
    }
    std::vector<int> scratch_levels;

    bool locked(CRef c) {
        Lit l0 = clits(c)[0];
        return reason[var_of(l0)] == c && value(l0) == kTrue;
    }

    void reduce_db() {
        std::vector<CRef> cand;
        for (CRef c : learnts)
            if (clbd(c) > 2 && !locked(c)) cand.push_back(c);
        std::sort(cand.begin(), cand.end(), [&](CRef a, CRef b) {
            if (clbd(a) != clbd(b)) return clbd(a) > clbd(b);
            return cact(a) < cact(b);
        });
        for (std::size_t i = 0; i < cand.size() / 2; ++i) cmark_deleted(cand[i]);
        collect_garbage();
    }

    void collect_garbage() {
        std::vector<std::uint32_t> fresh;
        fresh.reserve(mem.size());
        auto move_list = [&](std::vector<CRef>& list) {
            std::vector<CRef> kept;
            for (CRef c : list) {
                if (cdeleted(c)) continue;
                CRef n = static_cast<CRef>(fresh.size());
                fresh.insert(fresh.end(), mem.begin() + c, mem.begin() + c + 3 + csize(c));
                mem[c + 2] = n; // forward
                kept.push_back(n);
            }
            list = std::move(kept);
        };
        move_list(originals);
        move_list(learnts);
        for (Lit l : trail) {
            std::uint32_t v = var_of(l);
            if (reason[v] != kNoRef) reason[v] = mem[reason[v] + 2];
        }
        mem = std::move(fresh);
        for (auto& ws : watches) ws.clear();
        for (CRef c : originals) attach(c);
        for (CRef c : learnts) attach(c);
    }

    bool add_clause(std::span<const int> in) {
        if (!ok) return false;
        cancel_until(0);
        add_tmp.clear();
        for (int d : in) {
            if (d == 0 || static_cast<std::uint32_t>(std::abs(d)) > nvars()) throw Error("clause literal out of range");
            add_tmp.push_back(from_dimacs(d));
        }
        std::sort(add_tmp.begin(), add_tmp.end());
        std::vector<Lit> lits;
        Lit prev = kNoLit;
        for (Lit l : add_tmp) {
            if (value(l) == kTrue || l == (prev ^ 1U)) return true;
            if (l != prev && value(l) != kFalse) lits.push_back(l);
            prev = l;
        }
        if (lits.empty()) return ok = false;
        if (lits.size() == 1) {
            enqueue(lits[0], kNoRef);
            return ok = (propagate() == kNoRef);
        }
        attach(alloc(lits, false, 0));
        return true;
    }

    bool limits_hit(const SolveLimits& lim, std::uint64_t conflicts_at_start) const {
        if (lim.stop && lim.stop->load(std::memory_order_relaxed)) return true;
        if (lim.conflict_budget >= 0 && stats.conflicts - conflicts_at_start >= static_cast<std::uint64_t>(lim.conflict_budget))
            return true;
        return lim.deadline && Clock::now() >= *lim.deadline;
    }

    // kTrue: model, kFalse: unsat, kUndef: restart or limit (see `stopped`)
    std::int8_t search(std::int64_t nof_conflicts, const SolveLimits& lim, std::uint64_t c0, bool& stopped) {
        std::int64_t local = 0;
        std::vector<Lit> learnt;
        std::uint64_t ticks = 0;
        for (;;) {
            CRef confl = propagate();
            if (confl != kNoRef) {
                ++stats.conflicts;
                ++local;
                if (decision_level() == 0) {
                    ok = false;
                    return kFalse;
                }
                int bt;
                std::uint32_t lbd;
                analyze(confl, learnt, bt, lbd);
                cancel_until(bt);
                if (learnt.size() == 1) {
                    enqueue(learnt[0], kNoRef);
                } else {
                    CRef c = alloc(learnt, true, lbd);
                    attach(c);
                    bump_clause(c);
                    enqueue(learnt[0], c);
                }
                var_inc /= var_decay;
                cla_inc /= cla_decay;
                if ((stats.conflicts & 63U) == 0 && limits_hit(lim, c0)) {
                    stopped = true;
                    return kUndef;
                }
                continue;
            }
            if (nof_conflicts >= 0 && local >= nof_conflicts) {
                cancel_until(0);
                return kUndef;
            }
            if (stats.conflicts >= next_reduce) {
                next_reduce = stats.conflicts + 2000 + reduce_step;
                reduce_step += 300;
                reduce_db();
            }
            if ((++ticks & 1023U) == 0 && limits_hit(lim, c0)) {
                stopped = true;
                return kUndef;
            }
            Lit next = kNoLit;
            while (decision_level() < static_cast<int>(assumptions.size())) {
                Lit p = assumptions[static_cast<std::size_t>(decision_level())];
                if (value(p) == kTrue) {
                    trail_lim.push_back(static_cast<int>(trail.size()));
                } else if (value(p) == kFalse) {
                    return kFalse;
                } else {
                    next = p;
                    break;
                }
            }
            if (next == kNoLit) {
                ++stats.decisions;
                while (!heap.empty()) {
                    std::uint32_t v = heap_pop();
                    if (assigns[v] == kUndef) {
                        next = make_lit(v, polarity[v]);
                        break;
                    }
                }
                if (next == kNoLit) return kTrue;
            }
            trail_lim.push_back(static_cast<int>(trail.size()));
            enqueue(next, kNoRef);
        }
    }

    SolveResult solve(std::span<const int> assume, const SolveLimits& lim) {
        SolveResult res;
        const SolveStats before = stats;
        assumptions.clear();
        for (int d : assume) {
            if (d == 0 || static_cast<std::uint32_t>(std::abs(d)) > nvars()) throw Error("assumption out of range");
            assumptions.push_back(from_dimacs(d));
        }
        auto finish = [&](SolveStatus s) {
            res.status = s;
            res.stats = {stats.decisions - before.decisions, stats.conflicts - before.conflicts,
                         stats.propagations - before.propagations};
            cancel_until(0);
            return res;
        };
        if (!ok) return finish(SolveStatus::Unsat);
        if (lim.deadline && Clock::now() >= *lim.deadline) return finish(SolveStatus::Timeout);
        std::uint64_t c0 = stats.conflicts;
        for (int round = 0;; ++round) {
            bool stopped = false;
            std::int8_t r = search(static_cast<std::int64_t>(luby(2.0, round) * 100), lim, c0, stopped);
            if (r == kTrue) {
                res.model.assign(nvars() + 1, false);
                for (std::uint32_t v = 0; v < nvars(); ++v) res.model[v + 1] = assigns[v] == kTrue;
                return finish(SolveStatus::Sat);
            }
            if (r == kFalse) return finish(SolveStatus::Unsat);
            if (stopped) return finish(SolveStatus::Timeout);
        }
    }

    std::optional<std::vector<std::int8_t>> propagate_only(std::span<const int> assume) {
        if (!ok) return std::nullopt;
        cancel_until(0);
        trail_lim.push_back(static_cast<int>(trail.size()));
        bool conflict = false;
        for (int d : assume) {
            if (d == 0 || static_cast<std::uint32_t>(std::abs(d)) > nvars()) throw Error("assumption out of range");
            Lit l = from_dimacs(d);
            if (value(l) == kFalse) {
                conflict = true;
                break;
            }
            if (value(l) == kUndef) enqueue(l, kNoRef);
        }
        if (!conflict) conflict = propagate() != kNoRef;
        std::optional<std::vector<std::int8_t>> out;
        if (!conflict) {
            std::vector<std::int8_t> vals(nvars() + 1, -1);
            for (std::uint32_t v = 0; v < nvars(); ++v)
                if (assigns[v] != kUndef) vals[v + 1] = assigns[v];
            out = std::move(vals);
        }
        cancel_until(0);
        return out;
    }
};

Solver::Solver(std::uint64_t seed) : impl_(std::make_unique<Impl>(seed)) {}
Solver::~Solver() = default;
int Solver::new_var() { return impl_->new_var(); }
int Solver::num_vars() const { return static_cast<int>(impl_->nvars()); }
void Solver::add_clause(std::span<const int> lits) { impl_->add_clause(lits); }
SolveResult Solver::solve(std::span<const int> assumptions, const SolveLimits& limits) {
    return impl_->solve(assumptions, limits);
}
std::optional<std::vector<std::int8_t>> Solver::propagate_only(std::span<const int> assumptions) {
    return impl_->propagate_only(assumptions);
}

} // namespace firlock
