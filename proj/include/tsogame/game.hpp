#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "tsogame/program.hpp"

// Two-player game graphs. Player A picks process instructions, player B
// commits store buffers to memory. Nodes carry whose turn it is; a node with
// no outgoing edges loses the play for whoever must move there.

namespace tsogame {

enum class Turn : uint8_t { A, B };

inline Turn opponent(Turn t) { return t == Turn::A ? Turn::B : Turn::A; }

struct EdgeLabel {
    bool env = true; // B edge: some sequence of buffer commits
    Pid pid = 0;
    Instruction instr{};
    static EdgeLabel update() { return {}; }
    static EdgeLabel move(Pid p, Instruction in) { return {false, p, in}; }
    friend bool operator==(const EdgeLabel&, const EdgeLabel&) = default;
};

struct GameGraph {
    struct Node {
        Turn turn = Turn::A;
        Pid last_mover = 0; // process whose move created this node; meaningful on B nodes
        bool target = false; // reach set or bad set, depending on the objective
    };
    std::vector<Node> nodes;
    std::vector<uint32_t> edge_start; // CSR, size node_count()+1
    std::vector<uint32_t> edge_to;
    std::vector<EdgeLabel> edge_label;
    uint32_t initial = 0;
    ObjectiveKind objective = ObjectiveKind::Reachability;
    Fairness fairness = Fairness::None;
    Pid num_procs = 0;
    int cap = -1; // buffer bound the graph was built with, -1 if none applied
    bool truncated = false; // the bound cut off at least one write edge

    uint32_t node_count() const { return static_cast<uint32_t>(nodes.size()); }
    uint32_t edge_count() const { return static_cast<uint32_t>(edge_to.size()); }
    uint32_t out_degree(uint32_t v) const { return edge_start[v + 1] - edge_start[v]; }

    /// True if some outgoing edge of v is an instruction of process pid.
    bool enables_process(uint32_t v, Pid pid) const {
        for (uint32_t e = edge_start[v]; e < edge_start[v + 1]; ++e)
            if (!edge_label[e].env && edge_label[e].pid == pid) return true;
        return false;
    }
};

class GameGraphBuilder {
public:
    uint32_t add_node(Turn t, Pid last_mover = 0, bool target = false) {
        g_.nodes.push_back({t, last_mover, target});
        return static_cast<uint32_t>(g_.nodes.size() - 1);
    }
    void add_edge(uint32_t from, uint32_t to, EdgeLabel label) {
        edges_.emplace_back(from, to, label);
    }
    void set_target(uint32_t v, bool t = true) { g_.nodes[v].target = t; }
    uint32_t node_count() const { return static_cast<uint32_t>(g_.nodes.size()); }
    Turn turn_of(uint32_t v) const { return g_.nodes[v].turn; }

    GameGraph finish(uint32_t initial, ObjectiveKind kind, Fairness fairness = Fairness::None) {
        uint32_t n = node_count();
        g_.initial = initial;
        g_.objective = kind;
        g_.fairness = fairness;
        g_.edge_start.assign(n + 1, 0);
        for (auto& [from, to, label] : edges_) g_.edge_start[from + 1]++;
        for (uint32_t v = 0; v < n; ++v) g_.edge_start[v + 1] += g_.edge_start[v];
        g_.edge_to.resize(edges_.size());
        g_.edge_label.resize(edges_.size());
        std::vector<uint32_t> fill(g_.edge_start.begin(), g_.edge_start.end() - 1);
        for (auto& [from, to, label] : edges_) {
            uint32_t e = fill[from]++;
            g_.edge_to[e] = to;
            g_.edge_label[e] = label;
        }
        for (auto& l : g_.edge_label)
            if (!l.env) g_.num_procs = std::max<Pid>(g_.num_procs, static_cast<Pid>(l.pid + 1));
        return std::move(g_);
    }

private:
    GameGraph g_;
    std::vector<std::tuple<uint32_t, uint32_t, EdgeLabel>> edges_;
};

/// Incoming (source node, edge index) pairs grouped per target node.
struct ReverseEdges {
    std::vector<uint32_t> start;
    std::vector<std::pair<uint32_t, uint32_t>> pred;
};

inline ReverseEdges reverse_edges(const GameGraph& g) {
    ReverseEdges r;
    uint32_t n = g.node_count();
    r.start.assign(n + 1, 0);
    for (uint32_t e = 0; e < g.edge_count(); ++e) r.start[g.edge_to[e] + 1]++;
    for (uint32_t v = 0; v < n; ++v) r.start[v + 1] += r.start[v];
    r.pred.resize(g.edge_count());
    std::vector<uint32_t> fill(r.start.begin(), r.start.end() - 1);
    for (uint32_t v = 0; v < n; ++v)
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e)
            r.pred[fill[g.edge_to[e]]++] = {v, e};
    return r;
}

struct Attractor {
    std::vector<char> in;
    // for player nodes pulled in through an edge: an edge into the previous layer
    std::vector<int32_t> edge_choice;
};

/// Nodes from which `player` can force the play into `base`. A node whose
/// mover has no remaining move loses, so opponent dead ends are absorbed and
/// player dead ends never are. `alive` restricts the game to a subset.
inline Attractor attract(const GameGraph& g, const ReverseEdges& rev, const std::vector<char>& base,
                         Turn player, const std::vector<char>* alive = nullptr) {
    uint32_t n = g.node_count();
    Attractor res{std::vector<char>(n, 0), std::vector<int32_t>(n, -1)};
    std::vector<uint32_t> pending(n, 0);
    std::vector<uint32_t> queue;
    auto is_alive = [&](uint32_t v) { return !alive || (*alive)[v]; };
    for (uint32_t v = 0; v < n; ++v) {
        if (!is_alive(v)) continue;
        uint32_t deg = 0;
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e)
            if (is_alive(g.edge_to[e])) ++deg;
        pending[v] = deg;
        if (base[v] || (g.nodes[v].turn != player && deg == 0)) {
            res.in[v] = 1;
            queue.push_back(v);
        }
    }
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        uint32_t u = queue[qi];
        for (uint32_t i = rev.start[u]; i < rev.start[u + 1]; ++i) {
            auto [v, e] = rev.pred[i];
            if (!is_alive(v) || res.in[v]) continue;
            if (g.nodes[v].turn == player) {
                res.in[v] = 1;
                res.edge_choice[v] = static_cast<int32_t>(e);
                queue.push_back(v);
            } else if (--pending[v] == 0) {
                res.in[v] = 1;
                queue.push_back(v);
            }
        }
    }
    return res;
}

struct PositionalStrategy {
    Turn owner = Turn::A;
    std::vector<int32_t> choice; // per node: outgoing edge index, -1 where undefined
};

struct GameSolution {
    std::vector<char> win_a;
    PositionalStrategy strategy_a; // defined on A nodes where A wins
    PositionalStrategy strategy_b; // defined on B nodes where B wins

    uint32_t count_a() const {
        return static_cast<uint32_t>(std::count(win_a.begin(), win_a.end(), 1));
    }
    bool initial_won_by_a(const GameGraph& g) const { return win_a[g.initial]; }
};

/// Decides the plain game: reachability or safety on the flagged nodes, no
/// fairness. Both winners get positional strategies on their regions.
inline GameSolution solve_game(const GameGraph& g) {
    uint32_t n = g.node_count();
    ReverseEdges rev = reverse_edges(g);
    std::vector<char> flagged(n, 0);
    for (uint32_t v = 0; v < n; ++v) flagged[v] = g.nodes[v].target;

    GameSolution sol;
    sol.strategy_a = {Turn::A, std::vector<int32_t>(n, -1)};
    sol.strategy_b = {Turn::B, std::vector<int32_t>(n, -1)};
    // the attacker tries to reach the flagged set, the defender avoids it
    Turn attacker = g.objective == ObjectiveKind::Reachability ? Turn::A : Turn::B;
    Attractor att = attract(g, rev, flagged, attacker);
    sol.win_a.assign(n, 0);
    for (uint32_t v = 0; v < n; ++v)
        sol.win_a[v] = g.objective == ObjectiveKind::Reachability ? att.in[v] : !att.in[v];

    auto& attacker_strategy = attacker == Turn::A ? sol.strategy_a : sol.strategy_b;
    auto& defender_strategy = attacker == Turn::A ? sol.strategy_b : sol.strategy_a;
    attacker_strategy.choice = att.edge_choice;
    // the defender stays outside the attractor; such an edge exists at every
    // defender node that was not absorbed
    for (uint32_t v = 0; v < n; ++v) {
        if (att.in[v] || g.nodes[v].turn == attacker) continue;
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e)
            if (!att.in[g.edge_to[e]]) {
                defender_strategy.choice[v] = static_cast<int32_t>(e);
                break;
            }
    }
    return sol;
}

struct Play {
    std::vector<uint32_t> nodes;
    std::vector<uint32_t> edges; // edges[i] connects nodes[i] to nodes[i+1]
    // lasso: the suffix starting here repeats forever; nodes[*cycle_start] == nodes.back()
    std::optional<uint32_t> cycle_start;
};

struct VerifyResult {
    bool ok = true;
    std::string reason;
    Play counterexample;
};

/// Replays a positional strategy against every opponent behaviour, starting
/// from the initial node (or the given one). The owner is attacking if it
/// wants the flagged set (A under reachability, B under safety) and must then
/// stop every play there; otherwise the flagged set is forbidden. Either way a
/// node whose mover is stuck loses, so owner-turn dead ends refute the
/// strategy.
inline VerifyResult verify_strategy(const GameGraph& g, const PositionalStrategy& s,
                                    std::optional<uint32_t> start = std::nullopt) {
    VerifyResult res;
    uint32_t n = g.node_count();
    if (s.choice.size() != n) return {false, "strategy size does not match the graph", {}};
    const bool attacking = (s.owner == Turn::A) == (g.objective == ObjectiveKind::Reachability);

    std::vector<uint8_t> color(n, 0); // 0 unseen, 1 on the dfs path, 2 done
    std::vector<int64_t> parent_edge(n, -1);
    std::vector<uint32_t> parent(n, 0);

    auto path_to = [&](uint32_t v) {
        Play play;
        std::vector<uint32_t> rn{v};
        std::vector<uint32_t> re;
        for (uint32_t cur = v; parent_edge[cur] >= 0; cur = parent[cur]) {
            re.push_back(static_cast<uint32_t>(parent_edge[cur]));
            rn.push_back(parent[cur]);
        }
        play.nodes.assign(rn.rbegin(), rn.rend());
        play.edges.assign(re.rbegin(), re.rend());
        return play;
    };
    auto fail = [&](uint32_t v, std::string why) {
        res.ok = false;
        res.reason = std::move(why);
        res.counterexample = path_to(v);
        return res;
    };

    struct Frame {
        uint32_t v;
        uint32_t next;
        uint32_t end;
    };
    std::vector<Frame> stack;

    // Examines a node first reached through edge pe from pv; pushes a frame
    // unless the play provably stops at v. Returns a failure verdict if v
    // refutes the strategy.
    auto enter = [&](uint32_t v, int64_t pe, uint32_t pv) -> std::optional<VerifyResult> {
        parent_edge[v] = pe;
        parent[v] = pv;
        if (g.nodes[v].target) {
            if (attacking) {
                color[v] = 2;
                return std::nullopt;
            }
            return fail(v, g.objective == ObjectiveKind::Safety
                               ? "a play reaches a bad configuration"
                               : "a play reaches the target set");
        }
        uint32_t beg = g.edge_start[v], end = g.edge_start[v + 1];
        if (beg == end) {
            if (g.nodes[v].turn == s.owner)
                return fail(v, "a play dead-ends where the strategy owner must move");
            color[v] = 2; // opponent stuck, owner wins this play
            return std::nullopt;
        }
        if (g.nodes[v].turn == s.owner) {
            int32_t c = s.choice[v];
            if (c < 0) return fail(v, "strategy undefined at a reachable node");
            if (static_cast<uint32_t>(c) < beg || static_cast<uint32_t>(c) >= end)
                return fail(v, "strategy picks an edge of a different node");
            beg = static_cast<uint32_t>(c);
            end = beg + 1;
        }
        color[v] = 1;
        stack.push_back({v, beg, end});
        return std::nullopt;
    };

    if (auto r = enter(start.value_or(g.initial), -1, 0)) return *r;
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next == f.end) {
            color[f.v] = 2;
            stack.pop_back();
            continue;
        }
        uint32_t e = f.next++;
        uint32_t w = g.edge_to[e];
        if (color[w] == 0) {
            if (auto r = enter(w, static_cast<int64_t>(e), f.v)) return *r;
        } else if (color[w] == 1 && attacking) {
            // a loop lets the opponent dodge the flagged set forever
            Play play = path_to(f.v);
            play.edges.push_back(e);
            play.nodes.push_back(w);
            auto it = std::find(play.nodes.begin(), play.nodes.end(), w);
            play.cycle_start = static_cast<uint32_t>(it - play.nodes.begin());
            res.ok = false;
            res.reason = "a play can loop forever without reaching the objective";
            res.counterexample = std::move(play);
            return res;
        }
    }
    return res;
}

/// Determinacy, made checkable: the stored regions partition the nodes by
/// construction, so what is left to confirm is that each player's positional
/// strategy wins from every node of its own region.
inline VerifyResult verify_solution(const GameGraph& g, const GameSolution& sol) {
    for (uint32_t v = 0; v < g.node_count(); ++v) {
        VerifyResult r = verify_strategy(g, sol.win_a[v] ? sol.strategy_a : sol.strategy_b, v);
        if (!r.ok) return r;
    }
    return {};
}

/// For a lasso play: a process that is enabled somewhere on the cycle but
/// never moves on it, violating process fairness. Finite plays are fair.
inline std::optional<Pid> process_fairness_violation(const GameGraph& g, const Play& play) {
    if (!play.cycle_start) return std::nullopt;
    uint32_t cs = *play.cycle_start;
    std::vector<char> moved(g.num_procs, 0), enabled(g.num_procs, 0);
    for (size_t i = cs; i < play.edges.size(); ++i) {
        const EdgeLabel& l = g.edge_label[play.edges[i]];
        if (!l.env) moved[l.pid] = 1;
    }
    for (size_t i = cs; i + 1 < play.nodes.size(); ++i) {
        uint32_t v = play.nodes[i];
        if (g.nodes[v].turn != Turn::A) continue;
        for (Pid p = 0; p < g.num_procs; ++p)
            if (!enabled[p] && g.enables_process(v, p)) enabled[p] = 1;
    }
    for (Pid p = 0; p < g.num_procs; ++p)
        if (enabled[p] && !moved[p]) return p;
    return std::nullopt;
}

/// Winner of a maximal finite play: whoever is to move at the stuck end loses.
inline Turn winner_of_finite_play(const GameGraph& g, const Play& play) {
    if (play.cycle_start) throw std::invalid_argument("play is infinite, not a finite maximal play");
    if (play.nodes.empty()) throw std::invalid_argument("empty play");
    uint32_t last = play.nodes.back();
    if (g.out_degree(last) != 0) throw std::invalid_argument("play does not end in a deadlocked node");
    return opponent(g.nodes[last].turn);
}

} // namespace tsogame
