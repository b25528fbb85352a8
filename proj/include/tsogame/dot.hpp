#pragma once

#include <sstream>
#include <string>

#include "tsogame/arena.hpp"

// Graphviz export. Process-player nodes draw as boxes, update-player nodes
// as circles, objective states with a double border. Nodes are emitted in id
// order and edges in storage order, so the output is stable across runs.

namespace tsogame {

inline std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out;
}

inline std::string edge_label_to_string(const Program& p, const EdgeLabel& l) {
    if (l.env) return "up*";
    return p.procs[l.pid].id + ":" + instr_to_string(p, l.instr);
}

template <class NodeLabel>
std::string graph_to_dot(const GameGraph& g, const Program& p, NodeLabel&& label) {
    std::ostringstream out;
    out << "digraph game {\n";
    out << "  rankdir=LR;\n";
    out << "  init [shape=point];\n";
    out << "  init -> n" << g.initial << ";\n";
    for (uint32_t v = 0; v < g.node_count(); ++v) {
        out << "  n" << v << " [shape=" << (g.nodes[v].turn == Turn::A ? "box" : "circle");
        if (g.nodes[v].target) out << ", peripheries=2";
        out << ", label=\"" << dot_escape(label(v)) << "\"];\n";
    }
    for (uint32_t v = 0; v < g.node_count(); ++v)
        for (uint32_t e = g.edge_start[v]; e < g.edge_start[v + 1]; ++e)
            out << "  n" << v << " -> n" << g.edge_to[e] << " [label=\""
                << dot_escape(edge_label_to_string(p, g.edge_label[e])) << "\"];\n";
    out << "}\n";
    return out.str();
}

template <class Config, class ConfigLabel>
std::string arena_to_dot(const Arena<Config>& a, ConfigLabel&& cfg) {
    return graph_to_dot(a.graph, a.program,
                        [&](uint32_t v) { return cfg(a.program, a.configs[v]); });
}

} // namespace tsogame
