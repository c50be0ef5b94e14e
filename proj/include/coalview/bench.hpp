#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coalview/exact.hpp"
#include "coalview/heuristics.hpp"

namespace coalview {

/// Replayable summary of a multi-restart run; `default_crossings` is the
/// first run, which starts from the input rotations.
inline nlohmann::ordered_json restart_report(const MSCInstance& inst, const RestartResult& r, HeuristicMode mode,
                                             std::size_t restarts, std::uint64_t seed) {
    nlohmann::ordered_json j;
    j["seed"] = seed;
    j["mode"] = mode_tag(mode);
    j["restarts"] = restarts;
    j["default_crossings"] = r.runs.front().crossings;
    j["best_crossings"] = r.best_crossings;
    j["best_mode"] = r.best_mode;
    j["best_restart"] = r.best_restart;
    auto runs = nlohmann::ordered_json::array();
    for (const auto& run : r.runs) runs.push_back({{"restart", run.restart}, {"mode", run.mode}, {"crossings", run.crossings}});
    j["per_restart"] = runs;
    auto species = nlohmann::ordered_json::array(), genes = nlohmann::ordered_json::array();
    for (NodeId s : r.best.species_order) species.push_back(inst.species().label(s));
    for (NodeId g : r.best.gene_order) genes.push_back(inst.gene().label(g));
    j["best_embedding"] = {{"species_order", species}, {"gene_order", genes}};
    return j;
}

struct BenchRow {
    std::string instance;
    std::size_t species = 0;
    std::size_t genes = 0;
    std::size_t default_crossings = 0;
    std::size_t heuristic_best = 0;
    std::optional<std::size_t> exact;  // set only when certified
    std::uint64_t nodes = 0;
};

inline BenchRow bench_instance(const std::string& name, const MSCInstance& inst, std::size_t restarts, std::uint64_t seed,
                               std::uint64_t budget) {
    BenchRow row;
    row.instance = name;
    row.species = inst.species().leaves().size();
    row.genes = inst.gene().leaves().size();
    const auto h = multi_restart(inst, HeuristicMode::Both, restarts, seed);
    row.default_crossings = h.runs.front().crossings;
    row.heuristic_best = h.best_crossings;
    const auto ex = solve_exact(inst, std::nullopt, budget);
    row.nodes = ex.nodes;
    if (ex.certified) row.exact = ex.crossings;
    return row;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::ostringstream out;
    out << "instance,species,genes,default,heuristic_best,exact,gap\n";
    for (const auto& r : rows) {
        out << r.instance << ',' << r.species << ',' << r.genes << ',' << r.default_crossings << ',' << r.heuristic_best << ',';
        if (r.exact)
            out << *r.exact << ',' << static_cast<long long>(r.heuristic_best) - static_cast<long long>(*r.exact);
        else out << ',';
        out << '\n';
    }
    return out.str();
}

/// Mean of heuristic_best - exact over the certified rows.
inline std::optional<double> mean_gap(const std::vector<BenchRow>& rows) {
    double sum = 0;
    std::size_t n = 0;
    for (const auto& r : rows)
        if (r.exact) {
            sum += static_cast<double>(r.heuristic_best) - static_cast<double>(*r.exact);
            ++n;
        }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
}

}  // namespace coalview
