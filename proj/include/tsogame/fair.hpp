#pragma once

#include <map>

#include "tsogame/arena.hpp"

// Fairness-aware solving on bounded arenas. Update fairness folds into plain
// reachability with an extended target set: a play that strands the process
// player with pending buffers is already won by her. Process fairness is a
// Streett condition (infinitely often enabled implies infinitely often moved,
// per process) solved through an index-appearance-record reduction to parity.
// Both verdicts are bounded verdicts; the arena carries cap and truncation.

namespace tsogame {

// ---------------------------------------------------------------------------
// Update fairness

/// Target states plus deadlocked A-configs that still hold buffered writes.
/// Deadlock means no instruction is enabled, not merely no arena edge: a
/// write that fell over the bound must not count as a win for A.
inline std::vector<char> update_fair_targets(const SbArena& a) {
    std::vector<char> t(a.graph.node_count(), 0);
    for (uint32_t v = 0; v < a.graph.node_count(); ++v) {
        if (a.graph.nodes[v].target) {
            t[v] = 1;
            continue;
        }
        if (a.graph.nodes[v].turn != Turn::A) continue;
        const TsoConfig& c = a.configs[v];
        bool pending = false;
        for (auto& buf : c.buffers) pending |= !buf.empty();
        if (!pending) continue;
        bool stuck = true;
        for (Pid pid = 0; pid < a.program.procs.size() && stuck; ++pid)
            stuck = enabled_transitions(a.program, c, pid).empty();
        if (stuck) t[v] = 1;
    }
    return t;
}

inline GameSolution solve_update_fair_reachability(const SbArena& a, const std::vector<char>& targets) {
    GameGraph g = a.graph;
    g.objective = ObjectiveKind::Reachability;
    for (uint32_t v = 0; v < g.node_count(); ++v) g.nodes[v].target = targets[v];
    return solve_game(g);
}

inline GameSolution solve_update_fair_reachability(const SbArena& a) {
    return solve_update_fair_reachability(a, update_fair_targets(a));
}

// ---------------------------------------------------------------------------
// Process fairness as a Streett objective

/// One pair per process: request = A-configs offering one of its moves,
/// grant = B-configs it has just moved into.
struct StreettPair {
    std::vector<char> request, grant;
};

inline std::vector<StreettPair> streett_pairs(const GameGraph& g) {
    std::vector<StreettPair> pairs(g.num_procs);
    for (Pid i = 0; i < g.num_procs; ++i) {
        pairs[i].request.assign(g.node_count(), 0);
        pairs[i].grant.assign(g.node_count(), 0);
    }
    for (uint32_t v = 0; v < g.node_count(); ++v) {
        if (g.nodes[v].turn == Turn::A) {
            for (Pid i = 0; i < g.num_procs; ++i)
                if (g.enables_process(v, i)) pairs[i].request[v] = 1;
        } else {
            pairs[g.nodes[v].last_mover].grant[v] = 1;
        }
    }
    return pairs;
}

struct ParityGame {
    GameGraph graph;                // owner in turn; flags unused
    std::vector<uint32_t> prio;     // per node; winner = parity of the maximum seen forever
    std::vector<uint32_t> source;   // product node -> arena node (sink maps to itself)
};

/// Index appearance record: a permutation of the pairs ordered by grant
/// recency, plus the positions (in the record before the step) of the highest
/// granted and highest requested pair. Grants emit even 2b, starved requests
/// odd 2g-1; a pair requested forever without grants stabilises at a position
/// above every recurring grant, so the dominant recurring priority is even
/// exactly when every persistent request is served. Bad configs become
/// absorbing with odd priority before the product; deadlocks divert to an
/// even sink, a finite play being safe and vacuously fair.
inline ParityGame streett_to_parity(const GameGraph& arena, const std::vector<StreettPair>& pairs,
                                    const std::vector<char>& bad) {
    const size_t k = pairs.size();
    if (k > 16) throw std::invalid_argument("too many fairness pairs for the record encoding");

    // per arena node: bitmask of granted / requested pair indices
    std::vector<uint32_t> grants(arena.node_count(), 0), requests(arena.node_count(), 0);
    for (size_t j = 0; j < k; ++j)
        for (uint32_t v = 0; v < arena.node_count(); ++v) {
            if (pairs[j].grant[v]) grants[v] |= 1u << j;
            if (pairs[j].request[v]) requests[v] |= 1u << j;
        }

    struct Key {
        uint32_t v = 0;
        uint64_t record = 0; // permutation, 4 bits per slot
        uint8_t b = 0, g = 0;
        auto operator<=>(const Key&) const = default;
    };
    auto slot = [](uint64_t rec, size_t i) { return static_cast<size_t>((rec >> (4 * i)) & 0xf); };

    // entering w with record rec: positions are 1-based in the old record
    auto step = [&](Key from, uint32_t w) {
        Key to;
        to.v = w;
        uint32_t gr = grants[w], rq = requests[w];
        for (size_t i = 0; i < k; ++i) {
            size_t j = slot(from.record, i);
            if (gr >> j & 1) to.b = static_cast<uint8_t>(i + 1);
            if (rq >> j & 1) to.g = static_cast<uint8_t>(i + 1);
        }
        size_t at = 0;
        for (size_t i = 0; i < k; ++i) { // granted indices first, order kept
            size_t j = slot(from.record, i);
            if (gr >> j & 1) to.record |= static_cast<uint64_t>(j) << (4 * at++);
        }
        for (size_t i = 0; i < k; ++i) {
            size_t j = slot(from.record, i);
            if (!(gr >> j & 1)) to.record |= static_cast<uint64_t>(j) << (4 * at++);
        }
        return to;
    };
    auto priority = [](const Key& s) -> uint32_t {
        return s.b >= s.g ? 2u * s.b : 2u * s.g - 1u;
    };

    GameGraphBuilder b;
    ParityGame pg;
    std::map<Key, uint32_t> ids;
    std::vector<Key> keys;          // worklist; the sink makes node ids run ahead
    std::vector<uint32_t> node_of;
    auto intern = [&](const Key& key) {
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        uint32_t n = b.add_node(arena.nodes[key.v].turn, arena.nodes[key.v].last_mover);
        ids.emplace(key, n);
        keys.push_back(key);
        node_of.push_back(n);
        pg.prio.push_back(bad[key.v] ? 1 : priority(key));
        pg.source.push_back(key.v);
        return n;
    };

    Key init;
    init.v = arena.initial;
    for (size_t i = 0; i < k; ++i) init.record |= static_cast<uint64_t>(i) << (4 * i);
    uint32_t root = intern(init);
    std::optional<uint32_t> sink;

    for (uint32_t i = 0; i < keys.size(); ++i) {
        const Key cur = keys[i];
        uint32_t n = node_of[i];
        if (bad[cur.v]) {
            b.add_edge(n, n, EdgeLabel::update()); // absorbing, odd forever
            continue;
        }
        if (arena.out_degree(cur.v) == 0) {
            if (!sink) {
                sink = b.add_node(Turn::B, 0);
                pg.prio.push_back(0);
                pg.source.push_back(UINT32_MAX); // no arena counterpart
                b.add_edge(*sink, *sink, EdgeLabel::update());
            }
            b.add_edge(n, *sink, EdgeLabel::update());
            continue;
        }
        for (uint32_t e = arena.edge_start[cur.v]; e < arena.edge_start[cur.v + 1]; ++e)
            b.add_edge(n, intern(step(cur, arena.edge_to[e])), arena.edge_label[e]);
    }

    pg.graph = b.finish(root, ObjectiveKind::Safety, Fairness::None);
    pg.graph.num_procs = arena.num_procs;
    return pg;
}

struct ParityRegions {
    std::vector<char> win_even;
    PositionalStrategy strategy_even{Turn::A, {}};
    PositionalStrategy strategy_odd{Turn::B, {}};
};

/// Zielonka's recursion. The game must be total (every node has a successor);
/// subgames then stay total because removed regions are attractor-closed.
/// The even player is A.
inline ParityRegions solve_parity(const ParityGame& pg) {
    const GameGraph& g = pg.graph;
    const uint32_t n = g.node_count();
    for (uint32_t v = 0; v < n; ++v)
        if (g.out_degree(v) == 0) throw std::invalid_argument("parity game has a dead end");

    ParityRegions out;
    out.win_even.assign(n, 0);
    out.strategy_even.choice.assign(n, -1);
    out.strategy_odd.choice.assign(n, -1);
    ReverseEdges rev = reverse_edges(g);

    // any edge staying inside the given region
    auto edge_within = [&](uint32_t v, const std::vector<char>& region) -> int32_t {
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e)
            if (region[g.edge_to[e]]) return static_cast<int32_t>(e);
        return -1;
    };

    auto recurse = [&](auto&& self, std::vector<char> alive) -> void {
        uint32_t top = 0;
        bool any = false;
        for (uint32_t v = 0; v < n; ++v)
            if (alive[v]) {
                any = true;
                top = std::max(top, pg.prio[v]);
            }
        if (!any) return;

        Turn us = top % 2 ? Turn::B : Turn::A;
        PositionalStrategy& ours = us == Turn::A ? out.strategy_even : out.strategy_odd;

        std::vector<char> base(n, 0);
        for (uint32_t v = 0; v < n; ++v) base[v] = alive[v] && pg.prio[v] == top;
        Attractor to_top = attract(g, rev, base, us, &alive);

        std::vector<char> sub = alive;
        for (uint32_t v = 0; v < n; ++v) sub[v] = sub[v] && !to_top.in[v];
        self(self, sub);

        bool opponent_present = false;
        for (uint32_t v = 0; v < n; ++v)
            if (sub[v] && out.win_even[v] == (us == Turn::B)) opponent_present = true;

        if (!opponent_present) {
            // everything alive is ours: attractor edges outside the top set,
            // any alive edge on it, deeper results kept on the rest
            for (uint32_t v = 0; v < n; ++v) {
                if (!alive[v]) continue;
                if (to_top.in[v]) {
                    out.win_even[v] = us == Turn::A;
                    if (g.nodes[v].turn != us) continue;
                    ours.choice[v] = base[v] ? edge_within(v, alive) : to_top.edge_choice[v];
                }
            }
            return;
        }

        std::vector<char> lost(n, 0);
        for (uint32_t v = 0; v < n; ++v)
            lost[v] = sub[v] && out.win_even[v] == (us == Turn::B);
        Attractor to_lost = attract(g, rev, lost, opponent(us), &alive);
        PositionalStrategy& theirs = us == Turn::A ? out.strategy_odd : out.strategy_even;
        for (uint32_t v = 0; v < n; ++v) {
            if (!alive[v] || !to_lost.in[v]) continue;
            out.win_even[v] = us == Turn::B;
            if (g.nodes[v].turn == opponent(us) && !lost[v])
                theirs.choice[v] = to_lost.edge_choice[v];
            // strategies inside the lost core were set by the recursion
        }
        std::vector<char> rest = alive;
        for (uint32_t v = 0; v < n; ++v) rest[v] = rest[v] && !to_lost.in[v];
        self(self, rest);
    };
    recurse(recurse, std::vector<char>(n, 1));
    return out;
}

// ---------------------------------------------------------------------------
// The full process-fair pipeline

struct ProcessFairResult {
    std::vector<StreettPair> pairs;
    ParityGame product;
    ParityRegions regions;
    bool a_wins = false; // from the arena's initial configuration

    uint32_t count_a() const {
        return static_cast<uint32_t>(std::count(regions.win_even.begin(), regions.win_even.end(), 1));
    }
};

inline ProcessFairResult solve_process_fair_safety(const GameGraph& g) {
    std::vector<char> bad(g.node_count(), 0);
    for (uint32_t v = 0; v < g.node_count(); ++v) bad[v] = g.nodes[v].target;
    ProcessFairResult r;
    r.pairs = streett_pairs(g);
    r.product = streett_to_parity(g, r.pairs, bad);
    r.regions = solve_parity(r.product);
    r.a_wins = r.regions.win_even[r.product.graph.initial];
    return r;
}

template <class Config>
ProcessFairResult solve_process_fair_safety(const Arena<Config>& a) {
    return solve_process_fair_safety(a.graph);
}

} // namespace tsogame
