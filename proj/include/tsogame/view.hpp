#pragma once

#include <map>

#include "tsogame/arena.hpp"

// What a single process can observe of a configuration: its control state, the
// value each variable would read as, and whether a fence could complete right
// now. Committing buffered writes never changes the observed values (the newest
// buffered write keeps winning until it lands in memory, at which point memory
// agrees), it can only turn the fence bit on. Configurations with equal views
// enable the same instructions, so for one-process programs the quotient by
// views is a finite game equivalent to the unbounded store-buffer game.

namespace tsogame {

struct View {
    StateId state = 0;
    std::vector<Val> vals; // per variable: newest buffered write, else memory
    bool fenced = true;    // buffer empty
    auto operator<=>(const View&) const = default;
};

inline View view_of(const TsoConfig& c, Pid pid) {
    View w;
    w.state = c.states[pid];
    w.vals.resize(c.memory.size());
    for (VarId x = 0; x < c.memory.size(); ++x) w.vals[x] = visible_value(c, pid, x);
    w.fenced = c.buffers[pid].empty();
    return w;
}

inline std::string view_to_string(const Program& p, const View& w) {
    std::string out = p.procs[0].states[w.state];
    out += " |";
    for (VarId x = 0; x < w.vals.size(); ++x) {
        out += ' ';
        out += p.vars[x].name;
        out += '=';
        out += p.domain[w.vals[x]];
    }
    out += w.fenced ? " | fenced" : " | pending";
    return out;
}

using ViewArena = Arena<View>;

/// The quotient game for a one-process program, built directly on views.
/// A moves: read observes vals, write overwrites one entry and clears the
/// fence bit, fence requires it, skip is free. B moves: keep the view, or set
/// the fence bit (committing everything); partial commits change nothing a
/// view can see, so those two edges cover the whole update closure.
inline ViewArena build_view_game(const Program& p) {
    if (p.procs.size() != 1)
        throw std::invalid_argument("view games are defined for one-process programs");

    GameGraphBuilder b;
    std::map<std::pair<View, Turn>, uint32_t> ids;
    std::vector<View> keys;

    auto is_target = [&](const View& w) {
        for (auto& [pid, s] : p.objective.targets)
            if (pid == 0 && s == w.state) return true;
        return false;
    };
    auto intern = [&](View w, Turn turn) {
        auto it = ids.find({w, turn});
        if (it != ids.end()) return it->second;
        uint32_t v = b.add_node(turn, 0, is_target(w));
        ids.emplace(std::pair{w, turn}, v);
        keys.push_back(std::move(w));
        return v;
    };

    View init;
    init.state = p.procs[0].initial;
    for (auto& var : p.vars) init.vals.push_back(var.init);
    uint32_t root = intern(init, Turn::A);

    for (uint32_t v = 0; v < keys.size(); ++v) {
        const View cur = keys[v];
        if (b.turn_of(v) == Turn::A) {
            for (auto& t : p.procs[0].transitions) {
                if (t.from != cur.state) continue;
                View next = cur;
                next.state = t.to;
                switch (t.instr.op) {
                case Op::Read:
                    if (cur.vals[t.instr.var] != t.instr.val) continue;
                    break;
                case Op::Write:
                    next.vals[t.instr.var] = t.instr.val;
                    next.fenced = false;
                    break;
                case Op::Skip: break;
                case Op::Fence:
                    if (!cur.fenced) continue;
                    break;
                }
                b.add_edge(v, intern(std::move(next), Turn::B), EdgeLabel::move(0, t.instr));
            }
        } else {
            b.add_edge(v, intern(cur, Turn::A), EdgeLabel::update());
            if (!cur.fenced) {
                View flushed = cur;
                flushed.fenced = true;
                b.add_edge(v, intern(std::move(flushed), Turn::A), EdgeLabel::update());
            }
        }
    }

    ViewArena arena;
    arena.graph = b.finish(root, p.objective.kind, p.objective.fairness);
    arena.graph.num_procs = 1;
    arena.configs = std::move(keys);
    arena.program = p;
    return arena;
}

struct ViewSolveResult {
    ViewArena arena;
    GameSolution solution;
    bool a_wins() const { return solution.initial_won_by_a(arena.graph); }
};

inline ViewSolveResult solve_view_program(const Program& single) {
    ViewSolveResult r;
    r.arena = build_view_game(single);
    r.solution = solve_game(r.arena.graph);
    return r;
}

/// Turns a winning view strategy back into a strategy on a concrete arena of
/// the same one-process program: at each A node, play the transition the view
/// strategy picks for that node's view. Chosen writes beyond the arena's bound
/// stay undefined.
inline PositionalStrategy strategy_from_views(const ViewArena& vg, const PositionalStrategy& vs,
                                              const SbArena& single) {
    if (vs.owner != Turn::A) throw std::invalid_argument("only A strategies concretise");
    std::map<View, uint32_t> abst; // A views
    for (uint32_t u = 0; u < vg.graph.node_count(); ++u)
        if (vg.graph.nodes[u].turn == Turn::A) abst.emplace(vg.configs[u], u);

    const GameGraph& g = single.graph;
    PositionalStrategy s{Turn::A, std::vector<int32_t>(g.node_count(), -1)};
    for (uint32_t v = 0; v < g.node_count(); ++v) {
        if (g.nodes[v].turn != Turn::A) continue;
        auto it = abst.find(view_of(single.configs[v], 0));
        if (it == abst.end()) continue;
        int32_t cu = vs.choice[it->second];
        if (cu < 0) continue;
        const Instruction& instr = vg.graph.edge_label[cu].instr;
        StateId succ = vg.configs[vg.graph.edge_to[cu]].state;
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e) {
            const EdgeLabel& l = g.edge_label[e];
            if (l.env || l.instr != instr) continue;
            if (single.configs[g.edge_to[e]].states[0] != succ) continue;
            s.choice[v] = static_cast<int32_t>(e);
            break;
        }
    }
    return s;
}

/// Verdict for the whole program under no fairness. The process player wins
/// iff it wins some process's one-process view game: it can stick to one
/// process, and buffer updates neither unlock nor block anything that process
/// does (a commit keeps every observed value, so skipping all updates is an
/// optimal B line). The one exception is a safety objective already violated
/// at the initial configuration, where B wins before A chooses anything.
struct ConcurrentSolution {
    bool a_wins = false;
    std::optional<Pid> witness;      // process whose view game A wins
    bool initially_bad = false;      // safety lost at the initial configuration
    std::vector<char> process_wins;  // per process: does A win its view game
    std::vector<ViewSolveResult> games;
};

inline ConcurrentSolution solve_concurrent(const Program& p) {
    if (p.objective.fairness != Fairness::None)
        throw std::invalid_argument("exact unbounded solving covers only unconstrained objectives");
    ConcurrentSolution out;
    if (p.objective.kind == ObjectiveKind::Safety) {
        std::vector<StateId> init;
        for (auto& pr : p.procs) init.push_back(pr.initial);
        if (hits_objective_states(p, init)) {
            out.initially_bad = true;
            out.process_wins.assign(p.procs.size(), 0);
            return out;
        }
    }
    for (Pid i = 0; i < p.procs.size(); ++i) {
        out.games.push_back(solve_view_program(restrict_program(p, i)));
        bool w = out.games.back().a_wins();
        out.process_wins.push_back(w ? 1 : 0);
        if (w && !out.witness) out.witness = i;
    }
    out.a_wins = out.witness.has_value();
    return out;
}

/// Bounded bisimulation check between the concrete bounded arena and the view
/// game: for every reachable concrete node whose buffer is shorter than the
/// bound, the matching view node must exist, agree on the target flag, and
/// simulate moves both ways (zig: every concrete move has an abstract match,
/// zag: every abstract move a concrete one). The view game is a parameter so
/// a deliberately corrupted abstraction can be fed in.
struct BisimReport {
    bool ok = true;
    std::string violation;
};

inline BisimReport check_bisimulation_fragment(const Program& p, int cap, const ViewArena& vg) {
    if (p.procs.size() != 1)
        throw std::invalid_argument("the fragment check compares one-process games");
    SbArena ca = build_bounded_arena(p, cap);

    std::map<std::pair<View, Turn>, uint32_t> abst;
    for (uint32_t u = 0; u < vg.graph.node_count(); ++u)
        abst.emplace(std::pair{vg.configs[u], vg.graph.nodes[u].turn}, u);

    auto fail = [&](std::string what, uint32_t v) {
        return BisimReport{false, what + " at " + config_to_string(p, ca.configs[v])};
    };
    auto match = [](const EdgeLabel& a, const EdgeLabel& b) {
        if (a.env != b.env) return false;
        return a.env || a.instr == b.instr;
    };

    if (view_of(ca.configs[ca.graph.initial], 0) != vg.configs[vg.graph.initial])
        return {false, "initial views differ"};

    for (uint32_t v = 0; v < ca.graph.node_count(); ++v) {
        if (ca.configs[v].buffers[0].size() >= static_cast<size_t>(cap)) continue;
        Turn t = ca.graph.nodes[v].turn;
        auto it = abst.find({view_of(ca.configs[v], 0), t});
        if (it == abst.end()) return fail("reachable view missing", v);
        uint32_t u = it->second;
        if (vg.graph.nodes[u].target != ca.graph.nodes[v].target)
            return fail("target flags disagree", v);

        for (uint32_t e = ca.graph.edge_start[v]; e < ca.graph.edge_start[v + 1]; ++e) {
            uint32_t w = ca.graph.edge_to[e];
            auto jt = abst.find({view_of(ca.configs[w], 0), ca.graph.nodes[w].turn});
            bool found = false;
            for (uint32_t f = vg.graph.edge_start[u]; !found && f < vg.graph.edge_start[u + 1]; ++f)
                found = jt != abst.end() && vg.graph.edge_to[f] == jt->second &&
                        match(ca.graph.edge_label[e], vg.graph.edge_label[f]);
            if (!found)
                return fail("concrete move without abstract match (" +
                                (ca.graph.edge_label[e].env
                                     ? std::string("update")
                                     : instr_to_string(p, ca.graph.edge_label[e].instr)) +
                                ")",
                            v);
        }
        for (uint32_t f = vg.graph.edge_start[u]; f < vg.graph.edge_start[u + 1]; ++f) {
            uint32_t x = vg.graph.edge_to[f];
            bool found = false;
            for (uint32_t e = ca.graph.edge_start[v]; !found && e < ca.graph.edge_start[v + 1]; ++e) {
                uint32_t w = ca.graph.edge_to[e];
                found = ca.graph.nodes[w].turn == vg.graph.nodes[x].turn &&
                        view_of(ca.configs[w], 0) == vg.configs[x] &&
                        match(ca.graph.edge_label[e], vg.graph.edge_label[f]);
            }
            if (!found)
                return fail("abstract move without concrete match (" +
                                (vg.graph.edge_label[f].env
                                     ? std::string("update")
                                     : instr_to_string(p, vg.graph.edge_label[f].instr)) +
                                ")",
                            v);
        }
    }
    return {};
}

inline BisimReport check_bisimulation_fragment(const Program& p, int cap) {
    return check_bisimulation_fragment(p, cap, build_view_game(p));
}

} // namespace tsogame
