// Acceptance run: one PASS/FAIL line per criterion. Arguments: path to the
// coalview CLI and to the data directory.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "coalview/bench.hpp"
#include "coalview/exact.hpp"
#include "coalview/generate.hpp"
#include "coalview/heuristics.hpp"
#include "coalview/io.hpp"
#include "coalview/layout.hpp"
#include "coalview/planarity.hpp"
#include "coalview/reductions.hpp"
#include "coalview/render.hpp"

namespace fs = std::filesystem;
using namespace coalview;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    std::cout << "criterion " << id << " [" << name << "]: " << (ok ? "PASS" : "FAIL") << "  " << detail << std::endl;
    if (!ok) ++failures;
}

std::vector<std::pair<std::string, MSCInstance>> load_corpus(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<std::pair<std::string, MSCInstance>> out;
    for (const auto& f : files) out.emplace_back(f.filename().string(), load_instance(f.string()));
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 1 -------------------------------------------------------------------------
void oracle_equivalence() {
    const auto t0 = Clock::now();
    std::size_t instances = 0, checks = 0, mismatches = 0, uncertified = 0;
    for (std::uint64_t seed = 1; seed <= 220; ++seed) {
        const std::size_t species = 1 + seed % 4;
        const std::size_t genes = std::max<std::size_t>(species, 3 + seed % 6);
        const auto inst = random_instance({species, genes, 10'000 + seed, seed % 3 == 0 ? 3 : 1000});
        ++instances;
        const auto S = inst.species();
        for (bool fixed : {false, true}) {
            std::optional<std::vector<NodeId>> order;
            if (fixed) order = S.clade(S.root());
            const auto ex = solve_exact(inst, order);
            const auto oracle = brute_force_oracle(inst, order);
            ++checks;
            if (!ex.certified) ++uncertified;
            if (ex.crossings != oracle || count_crossings(inst, ex.embedding).count != ex.crossings) ++mismatches;
        }
    }
    const double t = seconds_since(t0);
    std::ostringstream d;
    d << instances << " instances (|L(T)|<=8, |L(S)|<=4), " << checks << " solves, " << mismatches << " mismatches, "
      << uncertified << " uncertified, " << t << " s (limit 120 s)";
    report(1, "oracle equivalence", mismatches == 0 && uncertified == 0 && instances >= 200 && t < 120, d.str());
}

// 2 -------------------------------------------------------------------------
void ilp_fidelity() {
    std::mt19937_64 g(2024);
    std::size_t instances = 0, embeddings = 0, mismatches = 0, infeasible = 0;
    for (std::uint64_t seed = 1; seed <= 60; ++seed) {
        const auto inst = random_instance({2 + seed % 3, 4 + seed % 5, 20'000 + seed, seed % 2 ? 1000 : 3});
        const auto m = build_ilp(inst);
        ++instances;
        for (int k = 0; k < 6; ++k) {
            const auto e = random_embedding(inst, g);
            const auto ev = evaluate_model(m, e);
            ++embeddings;
            if (!ev.feasible) ++infeasible;
            if (ev.objective != Rational(static_cast<std::int64_t>(count_crossings(inst, e).count))) ++mismatches;
        }
    }
    std::ostringstream d;
    d << instances << " instances x 6 embeddings = " << embeddings << ", " << mismatches << " objective mismatches, " << infeasible
      << " infeasible";
    report(2, "ILP fidelity", instances >= 50 && mismatches == 0 && infeasible == 0, d.str());
}

// 3 -------------------------------------------------------------------------
void planar_recovery(const fs::path& data, const fs::path& artifacts) {
    std::size_t n = 0, ftt_miss = 0, vtt_miss = 0, planar_wrong = 0, via_exact = 0;
    fs::create_directories(artifacts);
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        const auto p = planar_instance({2 + seed % 4, 4 + seed % 4 + seed % 5, 30'000 + seed});
        ++n;
        const auto& inst = p.instance;
        const bool f_ok = count_crossings(inst, ftt_heuristic(inst, p.drawing.species_order)).count == 0;
        const bool v_ok = count_crossings(inst, vtt_heuristic(inst, Rotations(inst.species().size(), false))).count == 0;
        if (!f_ok) ++ftt_miss;
        if (!v_ok) ++vtt_miss;
        if (!f_ok || !v_ok) std::ofstream(artifacts / ("planar_miss_" + std::to_string(seed) + ".json")) << emit_instance(inst);
        const auto pr = planarity(inst);
        if (!pr.planar || !planarity(inst, p.drawing.species_order).planar) ++planar_wrong;
        if (pr.via_exact) ++via_exact;
    }
    // instances on which a heuristic is known to miss a plane drawing
    bool counterexample_ok = true;
    const fs::path ce = data / "counterexamples" / "planarity";
    std::size_t ce_count = 0;
    if (fs::exists(ce))
        for (const auto& e : fs::directory_iterator(ce)) {
            if (e.path().extension() != ".json") continue;
            const auto inst = load_instance(e.path().string());
            ++ce_count;
            const auto order = inst.species().clade(inst.species().root());
            counterexample_ok = counterexample_ok && is_planar(inst) == (brute_force_oracle(inst) == 0) &&
                                is_planar(inst, order) == (brute_force_oracle(inst, order) == 0);
        }
    std::ostringstream d;
    d << n << " constructed planar instances: ftt misses " << ftt_miss << ", vtt misses " << vtt_miss << ", is_planar wrong "
      << planar_wrong << " (" << via_exact << " decided by the exact fallback); " << ce_count
      << " stored counterexamples decided " << (counterexample_ok ? "correctly" : "INCORRECTLY");
    report(3, "planar recovery", n >= 100 && ftt_miss == 0 && vtt_miss == 0 && planar_wrong == 0 && counterexample_ok, d.str());
}

// 4 -------------------------------------------------------------------------
void heuristic_dominance(const std::vector<std::pair<std::string, MSCInstance>>& corpus) {
    std::vector<BenchRow> rows;
    std::size_t violations = 0, uncertified = 0;
    for (const auto& [name, inst] : corpus) {
        const auto r = bench_instance(name, inst, 10, 7, 5'000'000);
        if (!r.exact) {
            ++uncertified;
        } else if (*r.exact > r.heuristic_best) {
            ++violations;
        }
        if (r.heuristic_best > r.default_crossings) ++violations;
        rows.push_back(r);
    }
    const auto gap = mean_gap(rows);
    std::size_t gapped = 0;
    for (const auto& r : rows) gapped += r.exact && *r.exact < r.heuristic_best;
    std::ostringstream d;
    d << corpus.size() << " corpus instances, " << violations << " ordering violations, " << uncertified << " uncertified, mean gap "
      << (gap ? *gap : -1.0) << " over certified rows (" << gapped << " instances above optimum)";
    report(4, "heuristic dominance", violations == 0 && uncertified == 0, d.str());
}

// 5 -------------------------------------------------------------------------
void geometric_consistency(const std::vector<std::pair<std::string, MSCInstance>>& corpus) {
    std::mt19937_64 g(5);
    std::size_t layouts = 0, mismatches = 0, shifted = 0;
    auto check = [&](const MSCInstance& inst, const Embedding& e) {
        const auto lay = layout_rectangular(inst, e);
        ++layouts;
        shifted += !lay.shift_log.empty();
        if (count_crossings_geometric(lay).count != count_crossings(inst, e).count) ++mismatches;
    };
    for (const auto& [name, inst] : corpus) {
        const auto& S = inst.species();
        check(inst, input_embedding(inst));
        check(inst, ftt_heuristic(inst, S.clade(S.root())));
        check(inst, vtt_heuristic(inst, Rotations(S.size(), false)));
        for (int k = 0; k < 5; ++k) check(inst, random_embedding(inst, g));
    }
    // engineered coincidences: heights on a grid of 1/2
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const auto inst = random_instance({2 + seed % 3, 5 + seed % 5, 40'000 + seed, 2});
        for (int k = 0; k < 3; ++k) check(inst, random_embedding(inst, g));
    }
    std::ostringstream d;
    d << layouts << " layouts (" << shifted << " with coincident verticals separated), " << mismatches << " mismatches";
    report(5, "geometric = combinatorial", mismatches == 0 && shifted > 0, d.str());
}

// 6 -------------------------------------------------------------------------
std::optional<Rational> polyline_x(const std::vector<Point>& poly, const Rational& y) {
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const auto& a = poly[i];
        const auto& b = poly[i + 1];
        if (a.y < b.y && a.y <= y && y <= b.y) return a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
    }
    return std::nullopt;
}

struct PropStats {
    std::size_t layouts = 0, mirror_bad = 0, width_bad = 0, slope_bad = 0, segments = 0;
};

void check_proportional(const MSCInstance& inst, const Embedding& e, PropStats& st) {
    const auto& S = inst.species();
    const auto lay = layout_proportional(inst, e);
    ++st.layouts;
    const auto mir = layout_proportional(inst, mirrored(e));
    for (NodeId v = 0; v < inst.gene().size(); ++v)
        if (mir.vertex[v].x != lay.width - lay.vertex[v].x || mir.vertex[v].y != lay.vertex[v].y) {
            ++st.mirror_bad;
            break;
        }

    std::vector<Rational> ys{0, lay.height};
    for (NodeId s = 0; s < S.size(); ++s) ys.push_back(S.height(s));
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
    auto pop_at = [&](const SpeciesShape& sh, const Rational& y) {
        const auto& p = *sh.population;
        const auto parent = S.parent(sh.node);
        const Rational hi = parent ? S.height(*parent) : sh.top;
        if (!(sh.bottom < hi) || y >= hi) return p.top;
        return p.bottom + (p.top - p.bottom) * (y - sh.bottom) / (hi - sh.bottom);
    };
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
        for (const Rational y : {ys[j] + (ys[j + 1] - ys[j]) / 3, (ys[j] + ys[j + 1]) / 2}) {
            std::optional<double> ratio;
            for (const auto& sh : lay.species) {
                if (!(sh.bottom < y && y < sh.top)) continue;
                const auto l = polyline_x(sh.left, y), r = polyline_x(sh.right, y);
                if (!l || !r) {
                    ++st.width_bad;
                    continue;
                }
                const double q = (*r - *l).to_double() / pop_at(sh, y).to_double();
                if (!ratio) ratio = q;
                else if (std::abs(q - *ratio) > 1e-9 * std::abs(*ratio)) ++st.width_bad;
            }
        }
    }

    // every segment inside a branch keeps its relative position
    auto delimiter_x = [](const std::vector<Point>& poly, const Rational& lo, const Rational& hi,
                          const Rational& y) -> std::optional<Rational> {
        for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
            const auto& a = poly[i];
            const auto& b = poly[i + 1];
            if (a.y < b.y && a.y <= lo && hi <= b.y) return a.x + (b.x - a.x) * (y - a.y) / (b.y - a.y);
        }
        return std::nullopt;
    };
    for (const auto& edge : lay.edges)
        for (std::size_t i = 0; i + 1 < edge.path.size(); ++i) {
            if (!edge.branch[i]) continue;
            const auto& a = edge.path[i];
            const auto& b = edge.path[i + 1];
            const SpeciesShape* sh = nullptr;
            for (const auto& s : lay.species)
                if (s.node == *edge.branch[i]) sh = &s;
            ++st.segments;
            const auto la = delimiter_x(sh->left, a.y, b.y, a.y), ra = delimiter_x(sh->right, a.y, b.y, a.y);
            const auto lb = delimiter_x(sh->left, a.y, b.y, b.y), rb = delimiter_x(sh->right, a.y, b.y, b.y);
            if (!la || !ra || !lb || !rb || (a.x - *la) / (*ra - *la) != (b.x - *lb) / (*rb - *lb)) ++st.slope_bad;
        }
}

void proportional_invariants(const fs::path& data, const std::vector<std::pair<std::string, MSCInstance>>& corpus) {
    std::mt19937_64 g(6);
    PropStats st;
    std::size_t equal_pairs = 0, equal_bad = 0;
    for (const auto& [name, inst] : corpus) {
        if (!has_population_sizes(inst.species())) continue;
        check_proportional(inst, input_embedding(inst), st);
        check_proportional(inst, random_embedding(inst, g), st);
    }
    for (std::uint64_t seed = 1; seed <= 120; ++seed) {
        const auto inst = random_instance({2 + seed % 4, 4 + seed % 6, 60'000 + seed, 1000, 1 + static_cast<std::int64_t>(seed % 4)});
        const auto e = random_embedding(inst, g);
        check_proportional(inst, e, st);
        if (seed % 4 == 0) {
            // spread 1: every population equal, piecewise constant
            ++equal_pairs;
            if (count_crossings_geometric(layout_proportional(inst, e)).count != count_crossings(inst, e).count) ++equal_bad;
        }
    }
    for (const auto& e : fs::directory_iterator(data / "counterexamples" / "proportional")) {
        const auto inst = load_instance(e.path().string());
        const auto emb = input_embedding(inst);
        ++equal_pairs;
        if (count_crossings_geometric(layout_proportional(inst, emb)).count != count_crossings(inst, emb).count) ++equal_bad;
    }
    std::ostringstream d;
    d << st.layouts << " layouts: mirror failures " << st.mirror_bad << ", width/population mismatches " << st.width_bad
      << ", ratio-rule failures " << st.slope_bad << " of " << st.segments << " segments; equal populations: proportional count != "
      << "rectangular count on " << equal_bad << " of " << equal_pairs << " instances";
    report(6, "proportional invariants", st.mirror_bad == 0 && st.width_bad == 0 && st.slope_bad == 0 && equal_bad == 0, d.str());
}

// 7 -------------------------------------------------------------------------
void reduction_audit() {
    const auto t0 = Clock::now();
    std::ostringstream d;
    bool ok = true;
    std::size_t partitions = 0;
    for (bool fixed : {false, true}) {
        for (const auto& [gname, g] : {std::pair{"K3", Graph::complete(3)}, std::pair{"P4", Graph::path(4)}}) {
            const auto r = fixed ? reduce_maxcut_ftt(g, 0, GadgetScale::reduced()) : reduce_maxcut_vtt(g, 0, GadgetScale::reduced());
            ok = ok && validate_msc(r.instance).ok;
            std::int64_t worst = 0;
            for (unsigned mask = 0; mask < (1u << g.n()); ++mask) {
                std::vector<bool> side(g.n());
                for (std::size_t i = 0; i < g.n(); ++i) side[i] = (mask >> i) & 1u;
                const auto a = audit_reduction(r, embedding_from_cut(r, side), side);
                ++partitions;
                const auto expected = static_cast<std::size_t>((g.m() - a.cut) * static_cast<std::size_t>(r.edge_penalty()));
                const bool within = fixed ? std::abs(a.residual) <= r.slack : (a.residual >= 0 && a.residual <= r.slack);
                ok = ok && a.edge_penalty == expected && within && a.thick_penalty == 0;
                worst = std::max(worst, std::abs(a.residual));
            }
            // the thick leaf must show up exactly when a vertex gadget is drawn wrongly
            std::vector<bool> side(g.n(), false);
            side[0] = true;
            for (std::size_t i = 0; i < g.n(); ++i) {
                Embedding e;
                if (fixed) {
                    std::vector<PartitionerPlacement> place;
                    for (bool b : side) place.push_back(b ? PartitionerPlacement::Right : PartitionerPlacement::Left);
                    if (g.m() && std::any_of(g.edges.begin(), g.edges.end(), [&](auto& ed) { return ed.first == i || ed.second == i; }))
                        place[i] = PartitionerPlacement::Center;
                    else
                        continue;
                    e = ftt_embedding(r, place);
                } else {
                    std::vector<bool> prime(g.n());
                    for (std::size_t j = 0; j < g.n(); ++j) prime[j] = j == i ? side[j] : !side[j];
                    e = vtt_embedding(r, side, prime);
                }
                ok = ok && audit_reduction(r, e, side).thick_penalty == static_cast<std::size_t>(r.thick_penalty());
            }
            d << (fixed ? "FTT " : "VTT ") << gname << " |res|<=" << worst << " (slack " << r.slack << "); ";
        }
    }
    const double t = seconds_since(t0);
    d << partitions << " partitions, " << t << " s";
    report(7, "reduction audit", ok && t < 60, d.str());
}

// 8 -------------------------------------------------------------------------
void determinism(const std::string& cli, const fs::path& data, const fs::path& work) {
    fs::create_directories(work);
    const std::string bundle = (data / "corpus" / "i1.json").string();
    const std::string big = (data / "corpus" / "medium_02.json").string();
    auto run_all = [&](const std::string& tag) {
        const fs::path dir = work / tag;
        fs::create_directories(dir);
        const std::vector<std::string> cmds{
            cli + " minimize " + big + " --mode both --restarts 10 --seed 7 --report " + (dir / "stats.json").string(),
            cli + " exact " + bundle + " --fixed --emit-lp " + (dir / "i1.lp").string(),
            cli + " planar " + big + " --emit-dot " + (dir / "planar.dot").string(),
            cli + " draw " + big + " --style prop --order vtt --gradient -o " + (dir / "draw.svg").string(),
        };
        int bad = 0;
        for (const auto& c : cmds) bad += std::system((c + " > /dev/null 2>&1").c_str()) != 0;
        return bad;
    };
    const int bad = run_all("run1") + run_all("run2");
    std::size_t same = 0;
    for (const char* f : {"stats.json", "i1.lp", "planar.dot", "draw.svg"}) {
        const auto a = slurp(work / "run1" / f), b = slurp(work / "run2" / f);
        same += !a.empty() && a == b;
    }
    std::ostringstream d;
    d << same << "/4 outputs byte-identical across two runs, " << bad << " failed invocations";
    report(8, "determinism", same == 4 && bad == 0, d.str());
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 3) {
        std::cerr << "usage: acceptance <coalview-cli> <data-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path data = argv[2];
    const fs::path work = fs::temp_directory_path() / "coalview-acceptance";
    const auto corpus = load_corpus(data / "corpus");

    oracle_equivalence();
    ilp_fidelity();
    planar_recovery(data, work / "artifacts");
    heuristic_dominance(corpus);
    geometric_consistency(corpus);
    proportional_invariants(data, corpus);
    reduction_audit();
    determinism(cli, data, work);
    std::cout << (failures ? std::to_string(failures) + " criteria failed" : std::string("all criteria passed")) << std::endl;
    return failures ? 1 : 0;
}
