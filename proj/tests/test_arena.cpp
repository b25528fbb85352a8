#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tsogame/arena.hpp"
#include "tsogame/parser.hpp"

using namespace tsogame;

namespace {

Program parse(const std::string& src) { return parse_program(src); }

} // namespace

TEST_CASE("arena of a single write") {
    Program p = parse("domain 0 1 ; var x = 0 ;"
                      "process P1 { init q0 ; q0 -> q1 : write x 1 ; }"
                      "reach P1.q1 ;");
    SbArena a = build_bounded_arena(p, 1);
    const GameGraph& g = a.graph;

    // configurations: (q0,e,0)A, (q1,(x 1),0)B, (q1,(x 1),0)A, (q1,e,1)A
    REQUIRE(g.node_count() == 4);
    int as = 0, bs = 0;
    for (auto& n : g.nodes) (n.turn == Turn::A ? as : bs)++;
    CHECK(as == 3);
    CHECK(bs == 1);
    CHECK(g.edge_count() == 3);
    CHECK_FALSE(g.truncated);

    // the three q1 configurations are flagged
    int flagged = 0;
    for (auto& n : g.nodes) flagged += n.target;
    CHECK(flagged == 3);

    GameSolution sol = solve_game(g);
    CHECK(sol.initial_won_by_a(g));
    CHECK(verify_strategy(g, sol.strategy_a).ok);
}

TEST_CASE("arena alternates strictly between A and B nodes") {
    Program p = parse("domain 0 1 ; var x = 0 ; var y = 0 ;"
                      "process P1 { init q0 ; q0 -> q1 : write x 1 ; q1 -> q0 : write y 1 ; }"
                      "process P2 { init s0 ; s0 -> s1 : read x 1 ; s1 -> s0 : read y 1 ; }"
                      "reach P2.s1 ;");
    SbArena a = build_bounded_arena(p, 2);
    const GameGraph& g = a.graph;
    for (uint32_t v = 0; v < g.node_count(); ++v)
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e) {
            CHECK(g.nodes[v].turn != g.nodes[g.edge_to[e]].turn);
            CHECK(g.edge_label[e].env == (g.nodes[v].turn == Turn::B));
        }
}

TEST_CASE("every B node keeps a zero-commit edge to its own configuration") {
    Program p = parse("domain 0 1 ; var x = 0 ;"
                      "process P1 { init q0 ; q0 -> q1 : write x 1 ; q1 -> q2 : write x 0 ; }"
                      "process P2 { init s0 ; s0 -> s0 : read x 1 ; }"
                      "reach P1.q2 ;");
    SbArena a = build_bounded_arena(p, 2);
    PositionalStrategy nu = never_update_strategy(a);
    for (uint32_t v = 0; v < a.graph.node_count(); ++v) {
        if (a.graph.nodes[v].turn != Turn::B) continue;
        REQUIRE(nu.choice[v] >= 0);
        uint32_t w = a.graph.edge_to[nu.choice[v]];
        CHECK(a.configs[w] == a.configs[v]);
        CHECK(a.graph.nodes[w].turn == Turn::A);
    }
}

TEST_CASE("the bound drops writes and reports truncation") {
    Program p = parse("domain 0 1 ; var x = 0 ;"
                      "process P1 { init q0 ; q0 -> q1 : write x 1 ; q1 -> q2 : write x 1 ; }"
                      "reach P1.q2 ;");
    SbArena tight = build_bounded_arena(p, 1);
    CHECK(tight.graph.truncated);
    for (auto& c : tight.configs)
        for (auto& buf : c.buffers) CHECK(buf.size() <= 1);

    SbArena wide = build_bounded_arena(p, 2);
    CHECK_FALSE(wide.graph.truncated);
    // with room for both writes A reaches q2 unconditionally
    CHECK(solve_game(wide.graph).initial_won_by_a(wide.graph));
}

TEST_CASE("the update player can starve cross-process communication") {
    // P2 only reaches its target after P1's write hits memory; B just never
    // commits it, and P1's dead end hands the finite play to B.
    Program p = parse("domain 0 1 ; var x = 0 ;"
                      "process P1 { init q0 ; q0 -> q1 : write x 1 ; }"
                      "process P2 { init s0 ; s0 -> s1 : read x 1 ; }"
                      "reach P2.s1 ;");
    SbArena a = build_bounded_arena(p, 2);
    GameSolution sol = solve_game(a.graph);
    CHECK_FALSE(sol.initial_won_by_a(a.graph));
    CHECK(verify_strategy(a.graph, sol.strategy_b).ok);

    // the never-commit strategy is itself a witness for B here
    PositionalStrategy nu = never_update_strategy(a);
    CHECK(verify_strategy(a.graph, nu).ok);
}

TEST_CASE("a process reading its own write does not need the update player") {
    Program p = parse("domain 0 1 ; var x = 0 ;"
                      "process P1 { init q0 ; q0 -> q1 : write x 1 ; q1 -> q2 : read x 1 ; }"
                      "reach P1.q2 ;");
    SbArena a = build_bounded_arena(p, 1);
    GameSolution sol = solve_game(a.graph);
    CHECK(sol.initial_won_by_a(a.graph));
    CHECK(verify_strategy(a.graph, sol.strategy_a).ok);
}

TEST_CASE("fences wait for the buffer to drain") {
    // after the fence P1 knows x is in memory, so P2... there is no P2: the
    // point is that A cannot pass the fence unless B commits, and B will not.
    Program p = parse("domain 0 1 ; var x = 0 ;"
                      "process P1 { init q0 ; q0 -> q1 : write x 1 ; q1 -> q2 : fence ; }"
                      "reach P1.q2 ;");
    SbArena a = build_bounded_arena(p, 1);
    GameSolution sol = solve_game(a.graph);
    CHECK_FALSE(sol.initial_won_by_a(a.graph));
    CHECK(verify_strategy(a.graph, never_update_strategy(a)).ok);
}

TEST_CASE("only_process_strategy prefers the chosen process") {
    Program p = parse("domain 0 1 ; var x = 0 ;"
                      "process P1 { init q0 ; q0 -> q0 : skip ; }"
                      "process P2 { init s0 ; s0 -> s0 : skip ; }"
                      "avoid P1.nowhere ;");
    SbArena a = build_bounded_arena(p, 1);
    PositionalStrategy s1 = only_process_strategy(a, 1);
    for (uint32_t v = 0; v < a.graph.node_count(); ++v) {
        if (a.graph.nodes[v].turn != Turn::A) continue;
        REQUIRE(s1.choice[v] >= 0);
        CHECK(a.graph.edge_label[s1.choice[v]].pid == 1);
    }
    // and the safety game is won by A: skipping forever never goes bad
    GameSolution sol = solve_game(a.graph);
    CHECK(sol.initial_won_by_a(a.graph));
}

TEST_CASE("arena node identity splits B nodes by the process that moved") {
    // both processes can reach the same configuration; the B nodes remember who
    // moved last and stay distinct
    Program p = parse("domain 0 ; var x = 0 ;"
                      "process P1 { init q0 ; q0 -> q0 : skip ; }"
                      "process P2 { init s0 ; s0 -> s0 : skip ; }"
                      "avoid P1.nowhere ;");
    SbArena a = build_bounded_arena(p, 1);
    const GameGraph& g = a.graph;
    // nodes: initial A node, one B node per mover
    REQUIRE(g.node_count() == 3);
    std::vector<Pid> movers;
    for (uint32_t v = 0; v < g.node_count(); ++v)
        if (g.nodes[v].turn == Turn::B) movers.push_back(g.nodes[v].last_mover);
    std::sort(movers.begin(), movers.end());
    CHECK(movers == std::vector<Pid>{0, 1});
}

TEST_CASE("arenas are deterministic") {
    Program p = parse("domain 0 1 ; var x = 0 ; var y = 1 ;"
                      "process P1 { init q0 ; q0 -> q1 : write x 1 ; q1 -> q0 : read y 1 ; }"
                      "process P2 { init s0 ; s0 -> s1 : write y 0 ; s1 -> s0 : read x 1 ; }"
                      "reach P1.q1 P2.s1 ;");
    SbArena a1 = build_bounded_arena(p, 2);
    SbArena a2 = build_bounded_arena(p, 2);
    CHECK(a1.configs == a2.configs);
    CHECK(a1.graph.edge_to == a2.graph.edge_to);
    CHECK(a1.graph.edge_start == a2.graph.edge_start);
}
