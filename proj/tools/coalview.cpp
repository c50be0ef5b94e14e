#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coalview/bench.hpp"
#include "coalview/exact.hpp"
#include "coalview/heuristics.hpp"
#include "coalview/io.hpp"
#include "coalview/layout.hpp"
#include "coalview/planarity.hpp"
#include "coalview/reductions.hpp"
#include "coalview/render.hpp"

namespace fs = std::filesystem;
using namespace coalview;

namespace {

enum Exit { Ok = 0, Usage = 1, Invalid = 2, NoCertificate = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw UsageError("cannot write " + path);
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("COALVIEW_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("COALVIEW_SEED is not an unsigned integer: ") + env);
        }
    }
    return 1;
}

HeuristicMode parse_mode(const std::string& m) {
    if (m == "ftt") return HeuristicMode::Ftt;
    if (m == "vtt") return HeuristicMode::Vtt;
    return HeuristicMode::Both;
}

std::optional<std::vector<NodeId>> fixed_order(const MSCInstance& inst, bool fixed) {
    if (!fixed) return std::nullopt;
    return inst.species().clade(inst.species().root());
}

int cmd_validate(const std::string& path) {
    const auto inst = load_instance(path);
    std::cout << "ok: " << inst.species().leaves().size() << " species, " << inst.gene().leaves().size() << " gene leaves\n";
    return Ok;
}

struct DrawArgs {
    std::string bundle, style = "rect", order = "given", out;
    bool no_labels = false, gradient = false;
    std::string palette = "blues";
};

int cmd_draw(const DrawArgs& a) {
    const auto inst = load_instance(a.bundle);
    const auto& S = inst.species();
    Embedding e;
    if (a.order == "ftt") e = ftt_heuristic(inst, S.clade(S.root()));
    else if (a.order == "vtt") e = vtt_heuristic(inst, Rotations(S.size(), false));
    else e = input_embedding(inst);
    const auto layout = a.style == "prop" ? layout_proportional(inst, e) : layout_rectangular(inst, e);
    RenderOptions opt;
    opt.show_labels = !a.no_labels;
    opt.population_gradient = a.gradient;
    opt.palette = a.palette;
    write_file(a.out, render_svg(layout, opt));
    std::cout << "crossings: " << count_crossings(inst, e).count << '\n';
    return Ok;
}

struct MinimizeArgs {
    std::string bundle, mode = "both", report;
    std::size_t restarts = 10;
    std::optional<std::uint64_t> seed;
};

int cmd_minimize(const MinimizeArgs& a) {
    const auto inst = load_instance(a.bundle);
    const std::uint64_t seed = a.seed ? *a.seed : default_seed();
    const auto mode = parse_mode(a.mode);
    const auto r = multi_restart(inst, mode, a.restarts, seed);
    const auto j = restart_report(inst, r, mode, a.restarts, seed);
    if (!a.report.empty()) write_file(a.report, j.dump(2) + "\n");
    std::cout << "default " << r.runs.front().crossings << ", best " << r.best_crossings << " (" << r.best_mode << ", restart "
              << r.best_restart << ", seed " << seed << ")\n";
    return Ok;
}

struct ExactArgs {
    std::string bundle, lp;
    bool fixed = false;
    std::uint64_t budget = 50'000'000;
};

int cmd_exact(const ExactArgs& a) {
    const auto inst = load_instance(a.bundle);
    const auto order = fixed_order(inst, a.fixed);
    if (!a.lp.empty()) write_file(a.lp, emit_lp(build_ilp(inst, order)));
    const auto r = solve_exact(inst, order, a.budget);
    std::cout << (r.certified ? "optimum " : "best found ") << r.crossings << " (" << r.nodes << " nodes)\n";
    if (!r.certified) {
        std::cerr << "node budget exhausted before optimality was proved\n";
        return NoCertificate;
    }
    return Ok;
}

struct PlanarArgs {
    std::string bundle, dot;
    bool fixed = false;
};

int cmd_planar(const PlanarArgs& a) {
    const auto inst = load_instance(a.bundle);
    const auto order = fixed_order(inst, a.fixed);
    if (!a.dot.empty()) write_file(a.dot, planarity_dot(inst, build_planarity_digraph(inst, order)));
    const auto r = planarity(inst, order);
    std::cout << (r.planar ? "planar" : "not planar") << (r.via_exact ? " (exact)" : " (heuristic witness)") << '\n';
    if (!r.certified) {
        std::cerr << "node budget exhausted before planarity was decided\n";
        return NoCertificate;
    }
    return Ok;
}

struct ReduceArgs {
    std::string kind, edgelist, scale = "default", out, report, partition;
    std::size_t cut = 0;
};

int cmd_reduce(const ReduceArgs& a) {
    const auto g = Graph::parse(read_text_file(a.edgelist));
    GadgetScale scale;
    try {
        scale = GadgetScale::parse(a.scale);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    const auto r = a.kind == "ftt" ? reduce_maxcut_ftt(g, a.cut, scale) : reduce_maxcut_vtt(g, a.cut, scale);
    if (!a.out.empty()) write_file(a.out, emit_instance(r.instance));

    nlohmann::ordered_json j;
    j["problem"] = a.kind;
    j["vertices"] = g.labels;
    j["edges"] = g.m();
    j["cut_target"] = a.cut;
    j["scale"] = {scale.e3, scale.e4, scale.e5, scale.e7, scale.e8, scale.e10};
    j["species"] = r.instance.species().leaves().size();
    j["gene_leaves"] = r.instance.gene().leaves().size();
    j["budget"] = r.budget;
    j["fixed_cost"] = r.fixed_cost;
    j["slack"] = r.slack;
    if (r.fixed_order) {
        auto order = nlohmann::ordered_json::array();
        for (NodeId s : r.species_order) order.push_back(r.instance.species().label(s));
        j["species_order"] = order;
    }
    if (!a.partition.empty()) {
        if (a.partition.size() != g.n() || a.partition.find_first_not_of("01") != std::string::npos)
            throw UsageError("--partition needs one 0/1 digit per vertex");
        std::vector<bool> side;
        for (char c : a.partition) side.push_back(c == '1');
        const auto au = audit_reduction(r, embedding_from_cut(r, side), side);
        j["audit"] = {{"partition", a.partition}, {"cut", au.cut},          {"crossings", au.total},
                      {"edge_penalty", au.edge_penalty}, {"thick_penalty", au.thick_penalty}, {"residual", au.residual}};
    }
    if (!a.report.empty()) write_file(a.report, j.dump(2) + "\n");
    else std::cout << j.dump(2) << '\n';
    return Ok;
}

struct BenchArgs {
    std::string dir, out;
    std::size_t restarts = 10;
    std::optional<std::uint64_t> seed;
    std::uint64_t budget = 1'000'000;
};

int cmd_bench(const BenchArgs& a) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(a.dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    std::sort(files.begin(), files.end(), [](const fs::path& x, const fs::path& y) { return x.filename() < y.filename(); });
    const std::uint64_t seed = a.seed ? *a.seed : default_seed();
    std::vector<BenchRow> rows;
    for (const auto& f : files) rows.push_back(bench_instance(f.filename().string(), load_instance(f.string()), a.restarts, seed, a.budget));
    const auto csv = bench_csv(rows);
    if (!a.out.empty()) write_file(a.out, csv);
    else std::cout << csv;
    const auto gap = mean_gap(rows);
    std::cerr << rows.size() << " instances, seed " << seed;
    if (gap) std::cerr << ", mean gap " << *gap;
    std::cerr << '\n';
    return Ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coalview: drawings of gene trees inside species trees"};
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Parse and validate an instance bundle");
    validate->add_option("bundle", validate_path)->required();

    DrawArgs da;
    auto* draw = app.add_subcommand("draw", "Render a drawing to SVG");
    draw->add_option("bundle", da.bundle)->required();
    draw->add_option("--style", da.style)->check(CLI::IsMember({"rect", "prop"}));
    draw->add_option("--order", da.order)->check(CLI::IsMember({"given", "ftt", "vtt"}));
    draw->add_option("-o,--output", da.out)->required();
    draw->add_flag("--no-labels", da.no_labels);
    draw->add_flag("--gradient", da.gradient, "Fill branches by population size");
    draw->add_option("--palette", da.palette)->check(CLI::IsMember({"blues", "greens", "reds", "greys"}));

    MinimizeArgs ma;
    auto* minimize = app.add_subcommand("minimize", "Multi-restart heuristic crossing minimization");
    minimize->add_option("bundle", ma.bundle)->required();
    minimize->add_option("--mode", ma.mode)->check(CLI::IsMember({"ftt", "vtt", "both"}));
    minimize->add_option("--restarts", ma.restarts)->check(CLI::PositiveNumber);
    minimize->add_option("--seed", ma.seed, "Defaults to $COALVIEW_SEED, then 1");
    minimize->add_option("--report", ma.report, "Write stats JSON here");

    ExactArgs ea;
    auto* exact = app.add_subcommand("exact", "Exact minimum by branch and bound");
    exact->add_option("bundle", ea.bundle)->required();
    exact->add_flag("--fixed", ea.fixed, "Keep the species order of the input");
    exact->add_option("--emit-lp", ea.lp, "Write the integer program in LP format");
    exact->add_option("--budget", ea.budget, "Search node budget");

    PlanarArgs pa;
    auto* planar = app.add_subcommand("planar", "Decide whether a crossing-free drawing exists");
    planar->add_option("bundle", pa.bundle)->required();
    planar->add_flag("--fixed", pa.fixed, "Keep the species order of the input");
    planar->add_option("--emit-dot", pa.dot, "Write the single-source digraph in DOT");

    ReduceArgs ra;
    auto* reduce = app.add_subcommand("reduce", "Build a Max-Cut reduction instance");
    reduce->add_option("kind", ra.kind)->required()->check(CLI::IsMember({"vtt", "ftt"}));
    reduce->add_option("edgelist", ra.edgelist)->required();
    reduce->add_option("--cut", ra.cut)->required();
    reduce->add_option("--scale", ra.scale, "default, reduced, powers:N or e3,e4,e5,e7,e8,e10");
    reduce->add_option("-o,--output", ra.out, "Write the instance bundle here");
    reduce->add_option("--report", ra.report, "Write the budget report here instead of stdout");
    reduce->add_option("--partition", ra.partition, "Audit the drawing of this cut, e.g. 0110");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Heuristics and exact solver over a directory of bundles");
    bench->add_option("dir", ba.dir)->required()->check(CLI::ExistingDirectory);
    bench->add_option("--restarts", ba.restarts)->check(CLI::PositiveNumber);
    bench->add_option("--seed", ba.seed);
    bench->add_option("--budget", ba.budget, "Exact search node budget per instance");
    bench->add_option("-o,--output", ba.out, "Write the CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? Ok : Usage;
    }

    try {
        if (*validate) return cmd_validate(validate_path);
        if (*draw) return cmd_draw(da);
        if (*minimize) return cmd_minimize(ma);
        if (*exact) return cmd_exact(ea);
        if (*planar) return cmd_planar(pa);
        if (*reduce) return cmd_reduce(ra);
        if (*bench) return cmd_bench(ba);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Invalid;
    }
    return Usage;
}
