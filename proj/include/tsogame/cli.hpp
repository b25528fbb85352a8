#pragma once

#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "tsogame/fair.hpp"
#include "tsogame/parser.hpp"
#include "tsogame/reduction.hpp"
#include "tsogame/report.hpp"
#include "tsogame/simulate.hpp"
#include "tsogame/view.hpp"

// Command line driver. Everything lives behind cli_main so the test suite can
// call it in process with captured streams; tools/main.cpp is a two-line shim.
//
// Exit codes: 0 the process player wins (or the command succeeded),
// 1 the update player wins, 2 any error.

namespace tsogame {

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

// Positional strategies are tied to one concrete graph, so the file records
// enough of the build recipe to refuse replay on anything else.
struct StrategyFile {
    std::string kind;      // "arena", "view" or "product"
    std::string semantics; // "sb" or "lb"
    std::string fairness;
    int cap = -1;
    uint32_t nodes = 0;
    int process = -1; // view strategies: index of the projected process
    PositionalStrategy strategy;
};

inline std::string strategy_to_text(const StrategyFile& s) {
    std::ostringstream o;
    o << "tsogame-strategy v1\n"
      << "kind " << s.kind << "\n"
      << "owner " << (s.strategy.owner == Turn::A ? 'A' : 'B') << "\n"
      << "semantics " << s.semantics << "\n"
      << "fairness " << s.fairness << "\n"
      << "cap " << s.cap << "\n"
      << "nodes " << s.nodes << "\n";
    if (s.process >= 0) o << "process " << s.process << "\n";
    o << "choices\n";
    for (uint32_t v = 0; v < s.strategy.choice.size(); ++v)
        if (s.strategy.choice[v] >= 0) o << v << " " << s.strategy.choice[v] << "\n";
    return o.str();
}

inline StrategyFile parse_strategy(const std::string& text) {
    std::istringstream in(text);
    std::string header;
    std::getline(in, header);
    if (header != "tsogame-strategy v1") throw std::runtime_error("not a tsogame strategy file");
    StrategyFile s;
    std::string key;
    while (in >> key) {
        if (key == "choices") break;
        if (key == "kind") in >> s.kind;
        else if (key == "owner") {
            std::string o;
            in >> o;
            s.strategy.owner = o == "B" ? Turn::B : Turn::A;
        } else if (key == "semantics") in >> s.semantics;
        else if (key == "fairness") in >> s.fairness;
        else if (key == "cap") in >> s.cap;
        else if (key == "nodes") in >> s.nodes;
        else if (key == "process") in >> s.process;
        else throw std::runtime_error("unknown strategy header field " + key);
    }
    s.strategy.choice.assign(s.nodes, -1);
    uint32_t v;
    int32_t e;
    while (in >> v >> e) {
        if (v >= s.nodes) throw std::runtime_error("strategy entry outside the node range");
        s.strategy.choice[v] = e;
    }
    return s;
}

namespace cli_detail {

inline const char* fairness_name(Fairness f) {
    switch (f) {
    case Fairness::None: return "none";
    case Fairness::Update: return "update";
    case Fairness::Process: return "process";
    }
    return "?";
}

inline Fairness fairness_of(const std::string& s) {
    if (s == "none") return Fairness::None;
    if (s == "update") return Fairness::Update;
    return Fairness::Process;
}

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

/// Parse, apply the --fairness override, then validate. Diagnostics that are
/// mere warnings go to `err` and do not stop the run.
inline Program load_program(const std::string& path, const std::string& fairness_flag,
                            std::ostream& err) {
    Program p = parse_program(read_text_file(path));
    if (!fairness_flag.empty()) p.objective.fairness = fairness_of(fairness_flag);
    auto ds = validate_program(p);
    std::string bad;
    for (auto& d : ds) {
        if (d.level == Diagnostic::Level::Error) bad += "\n  " + d.message;
        else err << "warning: " << d.message << "\n";
    }
    if (!bad.empty()) throw std::runtime_error("invalid program:" + bad);
    return p;
}

inline std::string tso_printer(const Program& p, const TsoConfig& c) {
    return config_to_string(p, c);
}
inline std::string lb_printer(const Program& p, const LbConfig& c) {
    return lb_config_to_string(p, c);
}

inline void finish_report(RunReport& r, const std::string& json_path) {
    if (!json_path.empty()) write_text_file(json_path, report_to_json(r).dump(2) + "\n");
}

struct SolveArgs {
    std::string file, semantics, fairness_flag, json, dot, emit;
    int cap = 4;
    bool cap_given = false;
};

inline int run_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    Program p = load_program(a.file, a.fairness_flag, err);
    RunReport r;
    r.command = "solve";
    r.file = a.file;
    r.semantics = a.semantics;
    r.fairness = fairness_name(p.objective.fairness);
    r.cap = a.cap;

    auto emit_strategy = [&](StrategyFile s) {
        s.semantics = r.semantics;
        s.fairness = r.fairness;
        s.cap = r.cap;
        write_text_file(a.emit, strategy_to_text(s));
        r.strategy_path = a.emit;
        r.strategy_kind = s.kind;
        out << "strategy (" << s.kind << ", "
            << (s.strategy.owner == Turn::A ? "process player" : "update player") << ") written to "
            << a.emit << "\n";
    };

    if (p.objective.fairness == Fairness::None && a.semantics == "sb") {
        // exact, unbounded: one view game per process, the process player wins
        // the whole game iff she wins some projection
        r.cap = -1;
        if (a.cap_given) r.notes.push_back("--cap ignored: fairness none is solved exactly");
        out << "semantics sb, fairness none, exact view solving\n";
        auto t0 = std::chrono::steady_clock::now();
        ConcurrentSolution s = solve_concurrent(p);
        r.solve_ms = ms_since(t0);
        if (s.initially_bad)
            out << "the initial configuration already hits a bad state\n";
        for (Pid i = 0; i < s.games.size(); ++i) {
            const ViewSolveResult& g = s.games[i];
            r.nodes += g.arena.graph.node_count();
            r.process_region += g.solution.count_a();
            out << "view game " << p.procs[i].id << ": " << g.arena.graph.node_count()
                << " nodes, " << g.solution.count_a() << " won by the process player\n";
        }
        r.winner = s.a_wins ? "process" : "update";
        if (s.witness) r.witness_process = static_cast<int>(*s.witness);
        out << "winner: " << r.winner << " player";
        if (s.witness) out << " (witness " << p.procs[*s.witness].id << ")";
        out << "\n";
        if (!a.emit.empty() && !s.games.empty()) {
            Pid pid = s.witness.value_or(0);
            const ViewSolveResult& g = s.games[pid];
            StrategyFile sf;
            sf.kind = "view";
            sf.process = static_cast<int>(pid);
            sf.nodes = g.arena.graph.node_count();
            sf.strategy = s.a_wins ? g.solution.strategy_a : g.solution.strategy_b;
            emit_strategy(std::move(sf));
        }
        if (!a.dot.empty() && !s.games.empty()) {
            Pid pid = s.witness.value_or(0);
            write_text_file(a.dot, arena_to_dot(s.games[pid].arena, view_to_string));
            r.notes.push_back("dot shows the view game of " + p.procs[pid].id);
        }
        finish_report(r, a.json);
        return s.a_wins ? 0 : 1;
    }

    if (a.semantics == "lb" && p.objective.fairness == Fairness::Update)
        throw std::runtime_error(
            "update fairness constrains the store-buffer player; use --semantics sb");

    auto describe_arena = [&](const GameGraph& g) {
        r.truncated = g.truncated;
        out << "semantics " << r.semantics << ", fairness " << r.fairness << ", cap " << r.cap
            << "\n";
        out << "arena: " << g.node_count() << " nodes, " << g.edge_count() << " edges";
        if (g.truncated) out << " (bounded: writes over the cap were dropped)";
        out << "\n";
    };
    auto report_plain = [&](const GameGraph& g, const GameSolution& sol) {
        r.nodes = g.node_count();
        r.process_region = sol.count_a();
        r.winner = sol.win_a[g.initial] ? "process" : "update";
        out << "regions: " << r.process_region << " of " << r.nodes
            << " nodes won by the process player\n";
        out << "winner: " << r.winner << " player\n";
    };

    bool a_wins;
    if (p.objective.fairness == Fairness::Process) {
        // Streett product: verdict and regions live on the product graph
        ProcessFairResult res;
        if (a.semantics == "sb") {
            auto t0 = std::chrono::steady_clock::now();
            SbArena arena = build_bounded_arena(p, a.cap);
            r.build_ms = ms_since(t0);
            describe_arena(arena.graph);
            t0 = std::chrono::steady_clock::now();
            res = solve_process_fair_safety(arena);
            r.solve_ms = ms_since(t0);
            if (!a.dot.empty()) write_text_file(a.dot, arena_to_dot(arena, tso_printer));
        } else {
            auto t0 = std::chrono::steady_clock::now();
            LbArena arena = build_lb_arena(p, a.cap);
            r.build_ms = ms_since(t0);
            describe_arena(arena.graph);
            t0 = std::chrono::steady_clock::now();
            res = solve_process_fair_safety(arena);
            r.solve_ms = ms_since(t0);
            if (!a.dot.empty()) write_text_file(a.dot, arena_to_dot(arena, lb_printer));
        }
        r.nodes = res.product.graph.node_count();
        r.process_region = res.count_a();
        r.winner = res.a_wins ? "process" : "update";
        a_wins = res.a_wins;
        out << "fairness product: " << r.nodes << " nodes, " << r.process_region
            << " won by the process player\n";
        out << "winner: " << r.winner << " player\n";
        if (!a.emit.empty()) {
            StrategyFile sf;
            sf.kind = "product";
            sf.nodes = res.product.graph.node_count();
            sf.strategy = res.a_wins ? res.regions.strategy_even : res.regions.strategy_odd;
            emit_strategy(std::move(sf));
        }
    } else if (a.semantics == "sb") { // update fairness
        auto t0 = std::chrono::steady_clock::now();
        SbArena arena = build_bounded_arena(p, a.cap);
        r.build_ms = ms_since(t0);
        describe_arena(arena.graph);
        t0 = std::chrono::steady_clock::now();
        GameSolution sol = solve_update_fair_reachability(arena);
        r.solve_ms = ms_since(t0);
        report_plain(arena.graph, sol);
        a_wins = sol.win_a[arena.graph.initial];
        if (!a.emit.empty()) {
            StrategyFile sf;
            sf.kind = "arena";
            sf.nodes = arena.graph.node_count();
            sf.strategy = a_wins ? sol.strategy_a : sol.strategy_b;
            emit_strategy(std::move(sf));
        }
        if (!a.dot.empty()) write_text_file(a.dot, arena_to_dot(arena, tso_printer));
    } else { // lb, fairness none
        auto t0 = std::chrono::steady_clock::now();
        LbArena arena = build_lb_arena(p, a.cap);
        r.build_ms = ms_since(t0);
        describe_arena(arena.graph);
        t0 = std::chrono::steady_clock::now();
        GameSolution sol = solve_game(arena.graph);
        r.solve_ms = ms_since(t0);
        report_plain(arena.graph, sol);
        a_wins = sol.win_a[arena.graph.initial];
        if (!a.emit.empty()) {
            StrategyFile sf;
            sf.kind = "arena";
            sf.nodes = arena.graph.node_count();
            sf.strategy = a_wins ? sol.strategy_a : sol.strategy_b;
            emit_strategy(std::move(sf));
        }
        if (!a.dot.empty()) write_text_file(a.dot, arena_to_dot(arena, lb_printer));
    }
    finish_report(r, a.json);
    return a_wins ? 0 : 1;
}

struct SimulateArgs {
    std::string file, semantics, fairness_flag, json, strategy;
    int cap = 4;
    uint64_t seed = 0;
    int steps = 60;
    bool passive_b = false;
};

inline int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
    Program p = load_program(a.file, a.fairness_flag, err);
    RunReport r;
    r.command = "simulate";
    r.file = a.file;
    r.semantics = a.semantics;
    r.fairness = fairness_name(p.objective.fairness);
    r.cap = a.cap;
    r.seed = a.seed;

    SimulationOptions opt;
    opt.seed = a.seed;
    opt.max_steps = a.steps;
    opt.passive_b = a.passive_b;

    StrategyFile sf;
    auto attach_strategy = [&](const GameGraph& g) {
        if (a.strategy.empty()) return;
        sf = parse_strategy(read_text_file(a.strategy));
        if (sf.kind != "arena")
            throw std::runtime_error("incompatible strategy file: kind " + sf.kind +
                                     " does not replay on a concrete arena");
        if (sf.semantics != a.semantics || sf.cap != a.cap || sf.nodes != g.node_count())
            throw std::runtime_error("incompatible strategy file: built for semantics " +
                                     sf.semantics + ", cap " + std::to_string(sf.cap) + ", " +
                                     std::to_string(sf.nodes) + " nodes");
        for (uint32_t v = 0; v < g.node_count(); ++v) {
            int32_t e = sf.strategy.choice[v];
            if (e >= 0 && (static_cast<uint32_t>(e) < g.edge_start[v] ||
                           static_cast<uint32_t>(e) >= g.edge_start[v + 1]))
                throw std::runtime_error("corrupt strategy file: choice at node " +
                                         std::to_string(v) + " is not one of its edges");
        }
        if (sf.strategy.owner == Turn::A) opt.follow_a = &sf.strategy;
        else opt.follow_b = &sf.strategy;
        r.strategy_path = a.strategy;
        r.strategy_kind = sf.kind;
    };

    Simulation sim;
    auto t0 = std::chrono::steady_clock::now();
    if (a.semantics == "sb") {
        SbArena arena = build_bounded_arena(p, a.cap);
        r.build_ms = ms_since(t0);
        r.truncated = arena.graph.truncated;
        attach_strategy(arena.graph);
        sim = simulate_arena(arena, opt, tso_printer);
    } else {
        LbArena arena = build_lb_arena(p, a.cap);
        r.build_ms = ms_since(t0);
        r.truncated = arena.graph.truncated;
        attach_strategy(arena.graph);
        sim = simulate_arena(arena, opt, lb_printer);
    }

    out << "semantics " << a.semantics << ", fairness " << r.fairness << ", cap " << a.cap
        << ", seed " << a.seed << (a.passive_b ? ", passive update player" : "") << "\n";
    for (auto& line : sim.transcript) out << line << "\n";
    for (auto& note : sim.notes) out << "-- " << note << "\n";
    r.transcript = sim.transcript;
    r.notes.insert(r.notes.end(), sim.notes.begin(), sim.notes.end());
    finish_report(r, a.json);
    return 0;
}

struct ReduceArgs {
    std::string file, fairness_flag, output, json;
};

inline int run_reduce(const ReduceArgs& a, std::ostream& out, std::ostream&) {
    if (a.fairness_flag != "update" && a.fairness_flag != "process")
        throw std::runtime_error("reduce needs --fairness update or --fairness process");
    Pcs s = parse_pcs(read_text_file(a.file));
    Program p = a.fairness_flag == "process" ? gen_process_fair_program(s)
                                             : gen_update_fair_program(s);
    std::string dsl = print_program(p);

    RunReport r;
    r.command = "reduce";
    r.file = a.file;
    r.semantics = "sb";
    r.fairness = a.fairness_flag;
    r.cap = -1;
    size_t states = 0, transitions = 0;
    for (auto& proc : p.procs) {
        states += proc.states.size();
        transitions += proc.transitions.size();
    }
    r.notes.push_back(std::to_string(p.procs.size()) + " processes, " + std::to_string(states) +
                      " states, " + std::to_string(transitions) + " transitions");
    r.notes.push_back("solve with --fairness " + a.fairness_flag +
                      " and --cap of at least the channel bound plus two");
    if (a.output.empty()) {
        out << dsl;
    } else {
        write_text_file(a.output, dsl);
        out << "wrote " << a.output << " (" << r.notes[0] << ")\n";
    }
    finish_report(r, a.json);
    return 0;
}

struct ExportArgs {
    std::string file, what, semantics, fairness_flag, dot, json;
    int cap = 4;
    int process = 0;
};

inline int run_export(const ExportArgs& a, std::ostream& out, std::ostream& err) {
    Program p = load_program(a.file, a.fairness_flag, err);
    RunReport r;
    r.command = "export";
    r.file = a.file;
    r.semantics = a.semantics;
    r.fairness = fairness_name(p.objective.fairness);
    r.cap = a.cap;

    std::string dot;
    if (a.what == "viewgame") {
        if (a.semantics == "lb")
            throw std::runtime_error("view games abstract store buffers; use --semantics sb");
        r.cap = -1;
        if (a.process < 0 || static_cast<size_t>(a.process) >= p.procs.size())
            throw std::runtime_error("--process out of range");
        Program single =
            p.procs.size() == 1 ? p : restrict_program(p, static_cast<Pid>(a.process));
        ViewArena vg = build_view_game(single);
        r.nodes = vg.graph.node_count();
        dot = arena_to_dot(vg, view_to_string);
    } else if (a.semantics == "sb") {
        SbArena arena = build_bounded_arena(p, a.cap);
        r.nodes = arena.graph.node_count();
        r.truncated = arena.graph.truncated;
        dot = arena_to_dot(arena, tso_printer);
    } else {
        LbArena arena = build_lb_arena(p, a.cap);
        r.nodes = arena.graph.node_count();
        r.truncated = arena.graph.truncated;
        dot = arena_to_dot(arena, lb_printer);
    }
    if (a.dot.empty()) out << dot;
    else {
        write_text_file(a.dot, dot);
        out << "wrote " << a.dot << " (" << r.nodes << " nodes)\n";
    }
    finish_report(r, a.json);
    return 0;
}

struct CheckArgs {
    std::string file, json;
    int cap = 3;
};

inline int run_check(const CheckArgs& a, std::ostream& out, std::ostream&) {
    Program p = parse_program(read_text_file(a.file));
    RunReport r;
    r.command = "check";
    r.file = a.file;
    r.semantics = "sb";
    r.fairness = fairness_name(p.objective.fairness);
    r.cap = a.cap;

    auto ds = validate_program(p);
    size_t errors = 0;
    for (auto& d : ds) {
        bool is_err = d.level == Diagnostic::Level::Error;
        errors += is_err;
        out << (is_err ? "error: " : "warning: ") << d.message << "\n";
        r.notes.push_back((is_err ? "error: " : "warning: ") + d.message);
    }
    if (errors) {
        out << "validation: failed\n";
        finish_report(r, a.json);
        return 2;
    }
    out << "validation: ok\n";

    // the abstraction check runs per process: each projection's view game is
    // compared against its concrete bounded arena
    bool all_ok = true;
    for (Pid i = 0; i < p.procs.size(); ++i) {
        BisimReport b = check_bisimulation_fragment(restrict_program(p, i), a.cap);
        all_ok = all_ok && b.ok;
        std::string line = "bisimulation (cap " + std::to_string(a.cap) + ") " + p.procs[i].id +
                           ": " + (b.ok ? "ok" : "violated, " + b.violation);
        out << line << "\n";
        r.notes.push_back(line);
    }
    finish_report(r, a.json);
    return all_ok ? 0 : 2;
}

} // namespace cli_detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    CLI::App app{"reachability and safety games on programs under weak memory"};
    app.require_subcommand(1);

    cli_detail::SolveArgs so;
    cli_detail::SimulateArgs si;
    cli_detail::ReduceArgs re;
    cli_detail::ExportArgs ex;
    cli_detail::CheckArgs ch;

    auto* solve = app.add_subcommand("solve", "decide who wins the game of a program file");
    solve->add_option("file", so.file, "program in the tsogame dsl")->required();
    solve->add_option("--semantics", so.semantics, "memory semantics")
        ->check(CLI::IsMember({"sb", "lb"}))
        ->default_val("sb");
    solve->add_option("--cap", so.cap, "buffer bound of the arena")->check(CLI::NonNegativeNumber);
    solve->add_option("--fairness", so.fairness_flag, "override the program's fairness clause")
        ->check(CLI::IsMember({"none", "update", "process"}));
    solve->add_option("--json", so.json, "write a machine readable report");
    solve->add_option("--dot", so.dot, "write the solved arena as graphviz");
    solve->add_option("--emit-strategy", so.emit, "write the initial winner's strategy");

    auto* simulate = app.add_subcommand("simulate", "play a seeded random run of the game");
    simulate->add_option("file", si.file, "program in the tsogame dsl")->required();
    simulate->add_option("--semantics", si.semantics, "memory semantics")
        ->check(CLI::IsMember({"sb", "lb"}))
        ->default_val("sb");
    simulate->add_option("--cap", si.cap, "buffer bound of the arena")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--fairness", si.fairness_flag, "override the program's fairness clause")
        ->check(CLI::IsMember({"none", "update", "process"}));
    simulate->add_option("--seed", si.seed, "rng seed; equal seeds give equal runs");
    simulate->add_option("--steps", si.steps, "step budget")->check(CLI::PositiveNumber);
    simulate->add_flag("--passive-b", si.passive_b, "the update player never commits anything");
    simulate->add_option("--strategy", si.strategy, "replay choices from an emitted strategy");
    simulate->add_option("--json", si.json, "write a machine readable report");

    auto* reduce = app.add_subcommand("reduce", "compile a channel system into a program");
    reduce->add_option("file", re.file, "channel system (.pcs)")->required();
    reduce->add_option("--fairness", re.fairness_flag, "which reduction to emit")
        ->check(CLI::IsMember({"update", "process"}))
        ->default_val("update");
    reduce->add_option("-o,--output", re.output, "write the program here instead of stdout");
    reduce->add_option("--json", re.json, "write a machine readable report");

    auto* exp = app.add_subcommand("export", "write an arena or view game as graphviz");
    exp->add_option("file", ex.file, "program in the tsogame dsl")->required();
    exp->add_option("--what", ex.what, "which graph to export")
        ->check(CLI::IsMember({"arena", "viewgame"}))
        ->default_val("arena");
    exp->add_option("--semantics", ex.semantics, "memory semantics")
        ->check(CLI::IsMember({"sb", "lb"}))
        ->default_val("sb");
    exp->add_option("--cap", ex.cap, "buffer bound of the arena")->check(CLI::NonNegativeNumber);
    exp->add_option("--fairness", ex.fairness_flag, "override the program's fairness clause")
        ->check(CLI::IsMember({"none", "update", "process"}));
    exp->add_option("--process", ex.process, "process index for viewgame export (0 based)");
    exp->add_option("--dot", ex.dot, "output path; stdout when omitted");
    exp->add_option("--json", ex.json, "write a machine readable report");

    auto* check = app.add_subcommand("check", "validate a program and its view abstraction");
    check->add_option("file", ch.file, "program in the tsogame dsl")->required();
    check->add_option("--cap", ch.cap, "buffer bound of the concrete side")
        ->check(CLI::NonNegativeNumber);
    check->add_option("--json", ch.json, "write a machine readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) {
            so.cap_given = solve->count("--cap") > 0;
            return cli_detail::run_solve(so, out, err);
        }
        if (simulate->parsed()) return cli_detail::run_simulate(si, out, err);
        if (reduce->parsed()) return cli_detail::run_reduce(re, out, err);
        if (exp->parsed()) return cli_detail::run_export(ex, out, err);
        return cli_detail::run_check(ch, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace tsogame
