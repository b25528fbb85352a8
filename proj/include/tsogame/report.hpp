#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

// Machine-readable run summary. Everything except the timings is a pure
// function of the inputs (and the seed, for simulations); consumers who diff
// reports should ignore the timings block.

namespace tsogame {

struct RunReport {
    std::string command;
    std::string file;
    std::string semantics; // "sb" or "lb"
    std::string fairness;  // "none", "update" or "process"
    int cap = -1;          // -1 when no bound applies (exact view solving)
    uint64_t seed = 0;
    bool truncated = false;
    std::string winner; // "process" or "update"
    std::optional<int> witness_process;
    uint32_t nodes = 0;
    uint32_t process_region = 0; // nodes won by the process player
    std::string strategy_path;
    std::string strategy_kind; // "arena", "view" or "product"
    std::vector<std::string> transcript;
    std::vector<std::string> notes;
    double build_ms = 0;
    double solve_ms = 0;
};

inline nlohmann::json report_to_json(const RunReport& r) {
    nlohmann::json j;
    j["command"] = r.command;
    j["file"] = r.file;
    j["semantics"] = r.semantics;
    j["fairness"] = r.fairness;
    if (r.cap >= 0) j["cap"] = r.cap;
    j["seed"] = r.seed;
    j["truncated"] = r.truncated;
    if (!r.winner.empty()) {
        j["winner"] = r.winner;
        j["regions"] = {{"total", r.nodes}, {"process", r.process_region},
                        {"update", r.nodes - r.process_region}};
    }
    if (r.witness_process) j["witnessProcess"] = *r.witness_process;
    if (!r.strategy_path.empty())
        j["strategy"] = {{"path", r.strategy_path}, {"kind", r.strategy_kind}};
    if (!r.transcript.empty()) j["transcript"] = r.transcript;
    if (!r.notes.empty()) j["notes"] = r.notes;
    j["timings"] = {{"buildMs", r.build_ms}, {"solveMs", r.solve_ms}};
    return j;
}

} // namespace tsogame
