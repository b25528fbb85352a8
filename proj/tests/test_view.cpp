#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>

#include "tsogame/loadbuffer.hpp"
#include "tsogame/parser.hpp"
#include "tsogame/view.hpp"

#include "support.hpp"

using namespace tsogame;
using testsupport::random_program;

namespace {

Program single_write() {
    return parse_program("domain 0 1 ;\n"
                         "var x = 0 ;\n"
                         "process P1 { init q0 ; q0 -> q1 : write x 1 ; }\n"
                         "reach P1.q1 ;\n");
}

Program fig6_unfair() {
    Program p = fig6_program();
    p.objective.fairness = Fairness::None;
    return p;
}

TsoConfig random_single_config(std::mt19937& rng, const Program& p, int max_buf) {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint32_t>(n)); };
    TsoConfig c;
    c.states = {static_cast<StateId>(pick(static_cast<int>(p.procs[0].states.size())))};
    c.buffers.resize(1);
    int len = pick(max_buf + 1);
    for (int i = 0; i < len; ++i)
        c.buffers[0].push_back({static_cast<VarId>(pick(static_cast<int>(p.vars.size()))),
                                static_cast<Val>(pick(static_cast<int>(p.domain.size())))});
    for (size_t x = 0; x < p.vars.size(); ++x)
        c.memory.push_back(static_cast<Val>(pick(static_cast<int>(p.domain.size()))));
    return c;
}

// Rebuilds a view game with one edge dropped and/or one edge added, keeping
// nodes and flags; lets the fragment checker be fed a corrupted abstraction.
ViewArena rebuilt(const ViewArena& vg, std::optional<uint32_t> drop,
                  std::optional<std::tuple<uint32_t, uint32_t, EdgeLabel>> add) {
    const GameGraph& g = vg.graph;
    GameGraphBuilder b;
    for (auto& n : g.nodes) b.add_node(n.turn, n.last_mover, n.target);
    for (uint32_t v = 0; v < g.node_count(); ++v)
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e)
            if (!drop || *drop != e) b.add_edge(v, g.edge_to[e], g.edge_label[e]);
    if (add) b.add_edge(std::get<0>(*add), std::get<1>(*add), std::get<2>(*add));
    ViewArena out;
    out.graph = b.finish(g.initial, g.objective, g.fairness);
    out.graph.num_procs = g.num_procs;
    out.configs = vg.configs;
    out.program = vg.program;
    return out;
}

// Walks every play an A strategy allows on a reachability arena. Plays must
// end at a target, at a stuck B node, or where the strategy is undefined
// (the exploration boundary); a cycle would mean the lift went wrong.
void require_lifted_plays_terminate(const GameGraph& g, const PositionalStrategy& s) {
    std::vector<uint8_t> color(g.node_count(), 0);
    struct Frame {
        uint32_t v, next, end;
    };
    std::vector<Frame> stack;
    auto enter = [&](uint32_t v) {
        if (g.nodes[v].target) {
            color[v] = 2;
            return;
        }
        uint32_t beg = g.edge_start[v], end = g.edge_start[v + 1];
        if (g.nodes[v].turn == Turn::A) {
            int32_t c = s.choice[v];
            if (c < 0) {
                color[v] = 2; // boundary
                return;
            }
            REQUIRE(static_cast<uint32_t>(c) >= beg);
            REQUIRE(static_cast<uint32_t>(c) < end);
            beg = static_cast<uint32_t>(c);
            end = beg + 1;
        }
        color[v] = 1;
        stack.push_back({v, beg, end});
    };
    enter(g.initial);
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next == f.end) {
            color[f.v] = 2;
            stack.pop_back();
            continue;
        }
        uint32_t w = g.edge_to[f.next++];
        REQUIRE(color[w] != 1); // no cycle may survive the lift of a winning strategy
        if (color[w] == 0) enter(w);
    }
}

TEST_CASE("view of a configuration") {
    Program p = restrict_program(single_write(), 0);
    TsoConfig c = initial_config(p);

    SECTION("empty buffer observes memory and may fence") {
        View w = view_of(c, 0);
        REQUIRE(w.fenced);
        REQUIRE(w.vals == std::vector<Val>{0});
        REQUIRE(w.state == 0);
    }
    SECTION("buffered write shadows memory and blocks fences") {
        c.buffers[0].push_back({0, 1});
        View w = view_of(c, 0);
        REQUIRE_FALSE(w.fenced);
        REQUIRE(w.vals == std::vector<Val>{1});
    }
}

TEST_CASE("write example view game, pinned") {
    ViewArena vg = build_view_game(restrict_program(single_write(), 0));
    const GameGraph& g = vg.graph;

    REQUIRE(g.node_count() == 4);
    REQUIRE(g.edge_count() == 3);

    std::multiset<std::tuple<StateId, Val, bool>> a_views, b_views;
    int flagged = 0;
    for (uint32_t v = 0; v < g.node_count(); ++v) {
        auto& w = vg.configs[v];
        (g.nodes[v].turn == Turn::A ? a_views : b_views).insert({w.state, w.vals[0], w.fenced});
        flagged += g.nodes[v].target;
    }
    REQUIRE(a_views == std::multiset<std::tuple<StateId, Val, bool>>{
                           {0, 0, true}, {1, 1, false}, {1, 1, true}});
    REQUIRE(b_views == std::multiset<std::tuple<StateId, Val, bool>>{{1, 1, false}});
    REQUIRE(flagged == 3);

    GameSolution sol = solve_game(g);
    REQUIRE(sol.initial_won_by_a(g));
    REQUIRE(verify_strategy(g, sol.strategy_a).ok);
    REQUIRE(verify_solution(g, sol).ok);
}

TEST_CASE("skip-only programs keep the fence bit set") {
    Program p = parse_program("domain 0 ;\n"
                              "var x = 0 ;\n"
                              "process P { init a ; a -> b : skip ; b -> a : skip ; }\n"
                              "reach P.b ;\n");
    ViewArena vg = build_view_game(p);
    REQUIRE(vg.graph.node_count() == 4); // two states, each as an A and a B view
    for (auto& w : vg.configs) REQUIRE(w.fenced);
    for (uint32_t v = 0; v < vg.graph.node_count(); ++v)
        if (vg.graph.nodes[v].turn == Turn::B)
            REQUIRE(vg.graph.out_degree(v) == 1); // identity only, nothing to flush
}

TEST_CASE("build_view_game rejects concurrent programs") {
    REQUIRE_THROWS_AS(build_view_game(fig6_unfair()), std::invalid_argument);
    REQUIRE_THROWS_AS(check_bisimulation_fragment(fig6_unfair(), 2), std::invalid_argument);
}

TEST_CASE("view values survive updates, the fence bit only gains") {
    std::mt19937 rng(411);
    Program p = restrict_program(random_program(rng), 0);
    for (int i = 0; i < 300; ++i) {
        TsoConfig c = random_single_config(rng, p, 4);
        auto next = update_once(c, 0);
        if (c.buffers[0].empty()) {
            REQUIRE_FALSE(next.has_value());
            continue;
        }
        View before = view_of(c, 0), after = view_of(*next, 0);
        REQUIRE(before.vals == after.vals);
        REQUIRE(before.state == after.state);
        if (before.fenced) REQUIRE(after.fenced); // can only flip false -> true
    }
}

TEST_CASE("equal views enable equal instruction sets") {
    std::mt19937 rng(412);
    for (int rep = 0; rep < 12; ++rep) {
        Program p = restrict_program(random_program(rng, {.procs = 1}), 0);
        std::map<View, std::set<std::string>> buckets;
        for (int i = 0; i < 200; ++i) {
            TsoConfig c = random_single_config(rng, p, 3);
            std::set<std::string> enabled;
            for (auto& t : enabled_transitions(p, c, 0)) enabled.insert(instr_to_string(p, t.instr));
            auto [it, fresh] = buckets.emplace(view_of(c, 0), enabled);
            if (!fresh) REQUIRE(it->second == enabled);
        }
    }
}

TEST_CASE("view game size respects the quotient bound") {
    std::mt19937 rng(413);
    for (int rep = 0; rep < 20; ++rep) {
        Program full = random_program(rng);
        for (Pid i = 0; i < full.procs.size(); ++i) {
            Program p = restrict_program(full, i);
            size_t bound = p.procs[0].states.size() * 2; // |Q| * |D|^|V| * 2, per tag
            for (size_t v = 0; v < p.vars.size(); ++v) bound *= p.domain.size();
            ViewArena vg = build_view_game(p);
            size_t a = 0, b = 0;
            for (auto& n : vg.graph.nodes) (n.turn == Turn::A ? a : b)++;
            REQUIRE(a <= bound);
            REQUIRE(b <= bound);
        }
    }
}

TEST_CASE("concurrent verdicts: witness strategies check out") {
    std::mt19937 rng(414);
    int a_wins = 0, b_wins = 0;
    for (int rep = 0; rep < 40; ++rep) {
        Program p = random_program(rng);
        ConcurrentSolution cs = solve_concurrent(p);

        bool any = false;
        for (Pid i = 0; i < p.procs.size(); ++i) {
            ViewSolveResult fresh = solve_view_program(restrict_program(p, i));
            REQUIRE(fresh.a_wins() == static_cast<bool>(cs.process_wins[i]));
            any = any || fresh.a_wins();
        }
        REQUIRE(cs.a_wins == any);

        if (cs.a_wins) {
            ++a_wins;
            REQUIRE(cs.witness.has_value());
            REQUIRE(cs.process_wins[*cs.witness] == 1);
            const ViewSolveResult& w = cs.games[*cs.witness];
            REQUIRE(verify_strategy(w.arena.graph, w.solution.strategy_a).ok);
        } else {
            ++b_wins;
            // the exact unbounded B witness: never commit anything
            for (auto& gi : cs.games) {
                REQUIRE_FALSE(gi.a_wins());
                REQUIRE(verify_strategy(gi.arena.graph, never_update_strategy(gi.arena)).ok);
            }
        }
        for (auto& gi : cs.games) REQUIRE(verify_solution(gi.arena.graph, gi.solution).ok);
    }
    REQUIRE(a_wins >= 5); // the corpus must exercise both outcomes
    REQUIRE(b_wins >= 5);
}

TEST_CASE("bounded arenas never contradict the view verdict") {
    std::mt19937 rng(415);
    for (int rep = 0; rep < 25; ++rep) {
        Program p = restrict_program(random_program(rng), 0);
        bool view_a = solve_view_program(p).a_wins();
        SbArena ba = build_bounded_arena(p, 3);
        bool bounded_a = solve_game(ba.graph).initial_won_by_a(ba.graph);
        // a bounded A win uses no more buffer than the bound, so it is real
        if (bounded_a) REQUIRE(view_a);
    }
}

TEST_CASE("winning view strategies replay concretely at small bounds") {
    std::mt19937 rng(416);
    int replayed = 0;
    for (int rep = 0; rep < 60 && replayed < 8; ++rep) {
        Program p = restrict_program(random_program(rng), 0);
        if (p.objective.kind != ObjectiveKind::Reachability) continue;
        ViewSolveResult vs = solve_view_program(p);
        if (!vs.a_wins()) continue;
        ++replayed;
        bool ok = false;
        for (int cap = 1; cap <= 6 && !ok; ++cap) {
            SbArena ba = build_bounded_arena(p, cap);
            PositionalStrategy s = strategy_from_views(vs.arena, vs.solution.strategy_a, ba);
            ok = verify_strategy(ba.graph, s).ok;
        }
        REQUIRE(ok);
    }
    REQUIRE(replayed == 8);
}

TEST_CASE("bisimulation fragment holds on the corpus") {
    std::mt19937 rng(417);
    for (int rep = 0; rep < 20; ++rep) {
        Program full = random_program(rng);
        for (Pid i = 0; i < full.procs.size(); ++i) {
            Program p = restrict_program(full, i);
            BisimReport r = check_bisimulation_fragment(p, 3);
            INFO(r.violation);
            REQUIRE(r.ok);
            REQUIRE(check_bisimulation_fragment(p, 1).ok);
        }
    }
}

TEST_CASE("corrupted view games are caught") {
    Program p = restrict_program(single_write(), 0);
    ViewArena vg = build_view_game(p);
    const GameGraph& g = vg.graph;

    uint32_t bnode = 0;
    for (uint32_t v = 0; v < g.node_count(); ++v)
        if (g.nodes[v].turn == Turn::B) bnode = v;
    REQUIRE(g.out_degree(bnode) == 2);

    SECTION("a dropped flush edge breaks the concrete-to-abstract direction") {
        uint32_t flush = g.edge_start[bnode];
        // of the two B edges, drop the one that changes the view (the flush)
        if (vg.configs[g.edge_to[flush]] == vg.configs[bnode]) ++flush;
        REQUIRE(vg.configs[g.edge_to[flush]].fenced);
        BisimReport r = check_bisimulation_fragment(p, 3, rebuilt(vg, flush, std::nullopt));
        REQUIRE_FALSE(r.ok);
        REQUIRE(r.violation.find("without abstract match") != std::string::npos);
    }
    SECTION("a spurious read edge breaks the abstract-to-concrete direction") {
        // claim the initial view could read x as 1
        ViewArena bad = rebuilt(vg, std::nullopt,
                                std::tuple{g.initial, bnode, EdgeLabel::move(0, Instruction::read(0, 1))});
        BisimReport r = check_bisimulation_fragment(p, 3, bad);
        REQUIRE_FALSE(r.ok);
        REQUIRE(r.violation.find("without concrete match") != std::string::npos);
    }
    SECTION("a wrong target flag is a colour violation") {
        ViewArena bad = vg;
        bad.graph.nodes[bad.graph.initial].target = true;
        BisimReport r = check_bisimulation_fragment(p, 3, bad);
        REQUIRE_FALSE(r.ok);
        REQUIRE(r.violation.find("target flags disagree") != std::string::npos);
    }
}

TEST_CASE("three racing processes: only the reader can keep itself safe") {
    Program p = fig6_unfair();
    ConcurrentSolution cs = solve_concurrent(p);
    REQUIRE(cs.process_wins == std::vector<char>{0, 0, 1});
    REQUIRE(cs.a_wins);
    REQUIRE(cs.witness == Pid{2});

    // the writers lose alone: their only move dead-ends and moving is forced
    REQUIRE_FALSE(cs.games[0].a_wins());
    REQUIRE(verify_strategy(cs.games[0].arena.graph,
                            never_update_strategy(cs.games[0].arena)).ok);

    // with fairness the exact procedure refuses; the fair solvers own that case
    REQUIRE_THROWS_AS(solve_concurrent(fig6_program()), std::invalid_argument);
}

TEST_CASE("finite plays are lost by whoever is stuck") {
    SbArena a = build_bounded_arena(single_write(), 2);
    const GameGraph& g = a.graph;
    // drive: initial -write-> B -identity-> A (deadlocked: q1 has no moves)
    uint32_t e1 = g.edge_start[g.initial];
    uint32_t b = g.edge_to[e1];
    uint32_t e2 = 0;
    for (uint32_t e = g.edge_start[b]; e < g.edge_start[b + 1]; ++e)
        if (a.configs[g.edge_to[e]] == a.configs[b]) e2 = e;
    Play play{{g.initial, b, g.edge_to[e2]}, {e1, e2}, std::nullopt};

    REQUIRE(winner_of_finite_play(g, play) == Turn::B); // A is to move and cannot

    Play lasso = play;
    lasso.cycle_start = 0;
    REQUIRE_THROWS_AS(winner_of_finite_play(g, lasso), std::invalid_argument);
    Play unfinished{{g.initial}, {}, std::nullopt};
    REQUIRE_THROWS_AS(winner_of_finite_play(g, unfinished), std::invalid_argument);

    // and the buffer is still pending there, so update fairness was denied
    REQUIRE(check_update_fairness(a, play) == 2);
    Play start_only{{g.initial}, {}, std::nullopt};
    REQUIRE(check_update_fairness(a, start_only) == std::nullopt);
}

TEST_CASE("restrict and extend are inverse against a background") {
    std::mt19937 rng(418);
    Program p = random_program(rng, {.procs = 3});
    for (int i = 0; i < 50; ++i) {
        TsoConfig c;
        auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint32_t>(n)); };
        for (auto& proc : p.procs)
            c.states.push_back(static_cast<StateId>(pick(static_cast<int>(proc.states.size()))));
        c.buffers.resize(p.procs.size());
        for (auto& buf : c.buffers)
            for (int k = pick(3); k > 0; --k)
                buf.push_back({static_cast<VarId>(pick(static_cast<int>(p.vars.size()))),
                               static_cast<Val>(pick(static_cast<int>(p.domain.size())))});
        for (size_t x = 0; x < p.vars.size(); ++x)
            c.memory.push_back(static_cast<Val>(pick(static_cast<int>(p.domain.size()))));

        Pid iota = static_cast<Pid>(pick(static_cast<int>(p.procs.size())));
        TsoConfig r = restrict_config(c, iota);
        REQUIRE(extend_config(r, c, iota) == c);
        REQUIRE(restrict_config(extend_config(r, c, iota), iota) == r);
    }
    REQUIRE_THROWS_AS(restrict_config(initial_config(p), 7), std::invalid_argument);
    REQUIRE_THROWS_AS(extend_config(initial_config(p), initial_config(p), 0),
                      std::invalid_argument);
}

TEST_CASE("lifted witness strategies terminate on the bounded full arena") {
    std::mt19937 rng(419);
    int lifted = 0;
    for (int rep = 0; rep < 80 && lifted < 6; ++rep) {
        Program p = random_program(rng);
        if (p.objective.kind != ObjectiveKind::Reachability) continue;
        ConcurrentSolution cs = solve_concurrent(p);
        if (!cs.a_wins) continue;
        ++lifted;
        Pid iota = *cs.witness;
        Program rp = restrict_program(p, iota);
        SbArena single = build_bounded_arena(rp, 2);
        SbArena full = build_bounded_arena(p, 2);
        const ViewSolveResult& w = cs.games[iota];
        PositionalStrategy on_single = strategy_from_views(w.arena, w.solution.strategy_a, single);
        PositionalStrategy on_full = lift_strategy(full, single, on_single, iota);
        require_lifted_plays_terminate(full.graph, on_full);
    }
    REQUIRE(lifted == 6);
}

TEST_CASE("a lift that picks a disabled instruction is refused") {
    // doctor a one-node single arena into choosing read x 1 at memory x=0
    Program rp = restrict_program(single_write(), 0);
    rp.procs[0].transitions[0].instr = Instruction::read(0, 0); // q0 -read x 0-> q1
    SbArena single = build_bounded_arena(rp, 1);
    GameSolution sol = solve_game(single.graph);

    SbArena full = build_bounded_arena(single_write(), 1);
    PositionalStrategy doctored = sol.strategy_a;
    // the full program cannot read at q0, so the matching choice is a lie
    for (uint32_t e = 0; e < single.graph.edge_count(); ++e)
        if (!single.graph.edge_label[e].env)
            single.graph.edge_label[e].instr = Instruction::read(0, 1);
    REQUIRE_THROWS_AS(lift_strategy(full, single, doctored, 0), std::runtime_error);
}

} // namespace
