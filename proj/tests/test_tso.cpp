#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "tsogame/tso.hpp"

using namespace tsogame;

namespace {

// Two processes, two variables, domain {0,1,2}.
TsoConfig base_config() {
    TsoConfig c;
    c.states = {0, 0};
    c.buffers = {{}, {}};
    c.memory = {0, 0};
    return c;
}

} // namespace

TEST_CASE("initial_config starts with empty buffers and declared values") {
    Program p;
    p.domain = {"0", "1"};
    p.vars = {{"x", 1}, {"y", 0}};
    Process a;
    a.id = "P1";
    a.states = {"q0", "q1"};
    a.initial = 1;
    p.procs = {a};
    TsoConfig c = initial_config(p);
    CHECK(c.states == std::vector<StateId>{1});
    CHECK(c.buffers == std::vector<Buffer>{{}});
    CHECK(c.memory == std::vector<Val>{1, 0});
}

TEST_CASE("reads see the newest buffered write, then memory") {
    TsoConfig c = base_config();
    c.memory = {5, 7};
    CHECK(visible_value(c, 0, 0) == 5);
    c.buffers[0] = {{0, 1}, {1, 2}, {0, 3}};
    CHECK(visible_value(c, 0, 0) == 3); // newest x message wins
    CHECK(visible_value(c, 0, 1) == 2);
    CHECK(visible_value(c, 1, 0) == 5); // other process's buffer does not help
    CHECK(instruction_enabled(c, 0, Instruction::read(0, 3)));
    CHECK_FALSE(instruction_enabled(c, 0, Instruction::read(0, 1)));
    CHECK(instruction_enabled(c, 1, Instruction::read(0, 5)));
}

TEST_CASE("writes and skips are always enabled, fences need an empty buffer") {
    TsoConfig c = base_config();
    CHECK(instruction_enabled(c, 0, Instruction::write(0, 2)));
    CHECK(instruction_enabled(c, 0, Instruction::skip()));
    CHECK(instruction_enabled(c, 0, Instruction::fence()));
    c.buffers[0] = {{0, 1}};
    CHECK(instruction_enabled(c, 0, Instruction::write(0, 2)));
    CHECK_FALSE(instruction_enabled(c, 0, Instruction::fence()));
    CHECK(instruction_enabled(c, 1, Instruction::fence()));
}

TEST_CASE("apply_transition appends writes at the buffer tail") {
    TsoConfig c = base_config();
    c.buffers[0] = {{0, 1}};
    TsoConfig n = apply_transition(c, 0, {0, Instruction::write(1, 2), 3});
    CHECK(n.states == std::vector<StateId>{3, 0});
    CHECK(n.buffers[0] == Buffer{{0, 1}, {1, 2}});
    CHECK(n.memory == c.memory);

    TsoConfig m = apply_transition(c, 1, {0, Instruction::skip(), 2});
    CHECK(m.states == std::vector<StateId>{0, 2});
    CHECK(m.buffers == c.buffers);
}

TEST_CASE("update_once commits the oldest message") {
    TsoConfig c = base_config();
    CHECK_FALSE(update_once(c, 0).has_value());
    c.buffers[0] = {{0, 1}, {0, 2}};
    auto n = update_once(c, 0);
    REQUIRE(n);
    CHECK(n->buffers[0] == Buffer{{0, 2}});
    CHECK(n->memory == std::vector<Val>{1, 0});
    auto n2 = update_once(*n, 0);
    REQUIRE(n2);
    CHECK(n2->buffers[0].empty());
    CHECK(n2->memory == std::vector<Val>{2, 0});
}

TEST_CASE("update_closure of one buffer walks its prefixes") {
    TsoConfig c = base_config();
    c.buffers[0] = {{0, 1}, {0, 2}}; // oldest (x,1), newest (x,2)
    auto cl = update_closure(c);
    REQUIRE(cl.size() == 3);
    // members: untouched, after one commit, after both
    TsoConfig one = c;
    one.buffers[0] = {{0, 2}};
    one.memory = {1, 0};
    TsoConfig two = c;
    two.buffers[0] = {};
    two.memory = {2, 0};
    CHECK(std::count(cl.begin(), cl.end(), c) == 1);
    CHECK(std::count(cl.begin(), cl.end(), one) == 1);
    CHECK(std::count(cl.begin(), cl.end(), two) == 1);
    CHECK(std::is_sorted(cl.begin(), cl.end()));
}

TEST_CASE("update_closure interleaves distinct buffers") {
    TsoConfig c = base_config();
    SECTION("disjoint variables: one config per pair of prefixes") {
        c.buffers = {{{0, 1}}, {{1, 2}}};
        CHECK(update_closure(c).size() == 4);
    }
    SECTION("same variable: final memory depends on commit order") {
        c.buffers = {{{0, 1}}, {{0, 2}}};
        auto cl = update_closure(c);
        CHECK(cl.size() == 5); // both-empty appears with memory x=1 and x=2
        int both_empty = 0;
        for (auto& n : cl)
            if (n.buffers[0].empty() && n.buffers[1].empty()) ++both_empty;
        CHECK(both_empty == 2);
    }
}

TEST_CASE("update_closure is closed under further updates") {
    std::mt19937 rng(7);
    auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    for (int iter = 0; iter < 50; ++iter) {
        TsoConfig c = base_config();
        for (Pid pid = 0; pid < 2; ++pid) {
            int len = pick(4);
            for (int i = 0; i < len; ++i)
                c.buffers[pid].push_back({static_cast<VarId>(pick(2)), static_cast<Val>(pick(3))});
        }
        c.memory = {static_cast<Val>(pick(3)), static_cast<Val>(pick(3))};
        auto cl = update_closure(c);
        for (auto& n : cl)
            for (Pid pid = 0; pid < 2; ++pid)
                if (auto m = update_once(n, pid))
                    CHECK(std::binary_search(cl.begin(), cl.end(), *m));
    }
}

TEST_CASE("UpdateClosureCache agrees with update_closure across state changes") {
    UpdateClosureCache cache;
    TsoConfig c = base_config();
    c.buffers = {{{0, 1}, {1, 1}}, {{0, 2}}};
    CHECK(cache.closure(c) == update_closure(c));
    c.states = {4, 9}; // same buffers and memory, different local states
    CHECK(cache.closure(c) == update_closure(c));
    c.memory = {2, 2};
    CHECK(cache.closure(c) == update_closure(c));
}
