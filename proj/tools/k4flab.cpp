#include "k4f/errors.hpp"
#include "k4f/graph.hpp"
#include "k4f/harness.hpp"
#include "k4f/ramsey.hpp"
#include "k4f/staged.hpp"
#include "k4f/survival.hpp"
#include "k4f/trajectory.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using nlohmann::json;
using namespace k4f;

namespace {

int code(ExitCode c)
{
    return static_cast<int>(c);
}

int finish(const ExperimentSummary& s, const ExperimentConfig& cfg)
{
    std::cerr << "cells " << s.cells << " computed " << s.computed << " skipped " << s.skipped << " failed "
              << s.failed << "\nmanifest " << (cfg.out_dir / "manifest.json").string() << '\n';
    return code(s.complete() ? ExitCode::success : ExitCode::partial_results);
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream os(path);
    if (!os)
        throw ConfigError("cannot write " + path);
    os.precision(15);
    return os;
}

std::ifstream open_in(const std::string& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read " + path);
    return is;
}

void write_curve(std::ostream& os, const SurvivalCurve& c)
{
    os << "t,p,P\n";
    const auto p = c.p_values();
    const auto P = c.P_values();
    for (std::size_t k = 0; k < c.size(); ++k)
        os << c.step() * double(k) << ',' << p[k] << ',' << P[k] << '\n';
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"K4-free random greedy process laboratory"};
    app.require_subcommand(1);

    std::vector<std::size_t> n_grid;
    std::string seeds = "0..9";
    std::string out;
    unsigned jobs = 0;
    std::uint64_t master_seed = default_master_seed;
    bool timing = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--n", n_grid, "vertex counts (comma separated, ascending)")->required()->delimiter(',');
        sub->add_option("--seeds", seeds, "inclusive seed range a..b");
        sub->add_option("--out", out, "result directory")->required();
        sub->add_option("--jobs", jobs, "worker threads, 0 = all cores");
        sub->add_option("--master-seed", master_seed);
        sub->add_flag("--timing", timing, "record wall-clock columns in cell CSVs");
    };

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the greedy process");
    add_common(sim);
    std::string checkpoints;
    std::uint32_t sample_size = 200;
    double stop_mr = -1;
    bool save_graph = false;
    sim->add_option("--checkpoints", checkpoints, "t:<steps>, m:<edges>, mr:<ratio>, comma separated");
    sim->add_option("--sample-size", sample_size);
    sim->add_option("--stop-mr", stop_mr, "stop once m reaches ratio * n^1.6");
    sim->add_flag("--save-graph", save_graph);

    // staged
    auto* stg = app.add_subcommand("staged", "run the staged bite process");
    add_common(stg);
    std::string profile = "desk", rounds = "auto", variant = "nested";
    double C = 1.0;
    stg->add_option("--profile", profile)->check(CLI::IsMember({"desk", "paper"}));
    stg->add_option("--rounds", rounds, "integer or auto");
    stg->add_option("--variant", variant)->check(CLI::IsMember({"nested", "oneshot"}));
    stg->add_option("--sample-size", sample_size);
    stg->add_option("--C", C);

    // trajectory
    auto* trj = app.add_subcommand("trajectory", "trajectory table and predictions");
    double xmax = 10, step = 1e-3;
    std::string traj_out;
    trj->add_option("--xmax", xmax);
    trj->add_option("--step", step);
    trj->add_option("--out", traj_out);
    auto* pred = trj->add_subcommand("predict", "tracked forms at (n, m) as JSON");
    double pn = 0, pm = 0;
    pred->add_option("--n", pn)->required();
    pred->add_option("--m", pm)->required();

    // survival
    auto* srv = app.add_subcommand("survival", "survival probabilities on alternating trees");
    srv->require_subcommand(1);
    std::string tree_file, curve_out;
    double grid_step = 1e-3, t = 0.5, k = 100;
    std::uint64_t trials = 100000, mc_seed = 0;
    auto* sdp = srv->add_subcommand("dp", "quadrature DP over a tree file");
    sdp->add_option("--tree", tree_file)->required();
    sdp->add_option("--step", grid_step);
    sdp->add_option("--out", curve_out)->required();
    auto* smc = srv->add_subcommand("mc", "Monte Carlo survival at one root birthtime");
    smc->add_option("--tree", tree_file)->required();
    smc->add_option("--t", t)->required();
    smc->add_option("--trials", trials);
    smc->add_option("--seed", mc_seed);
    auto* st4 = srv->add_subcommand("t4", "infinite-tree fixed point in rescaled units");
    double t4_xmax = 3, t4_step = 1e-4;
    st4->add_option("--k", k)->required();
    st4->add_option("--xmax", t4_xmax);
    st4->add_option("--step", t4_step);
    st4->add_option("--out", curve_out)->required();

    // ramsey
    auto* rms = app.add_subcommand("ramsey", "triangle coverage checks");
    rms->require_subcommand(1);
    std::string graph_file, mode = "exact";
    std::uint64_t budget = 2000, samples = 10000;
    auto* f3 = rms->add_subcommand("f3", "largest triangle-free vertex subset");
    f3->add_option("--graph", graph_file)->required();
    f3->add_option("--mode", mode)->check(CLI::IsMember({"exact", "heuristic"}));
    f3->add_option("--budget", budget);
    f3->add_option("--seed", mc_seed);
    auto* cov = rms->add_subcommand("cover", "sample s-subsets of greedy graphs");
    std::size_t cover_n = 0;
    cov->add_option("--n", cover_n)->required();
    cov->add_option("--seeds", seeds);
    cov->add_option("--C", C);
    cov->add_option("--samples", samples);
    cov->add_option("--budget", budget);
    cov->add_option("--master-seed", master_seed);

    // report
    auto* rep = app.add_subcommand("report", "summary CSVs from a result tree");
    std::string in_dir, rep_out;
    rep->add_option("--in", in_dir)->required();
    rep->add_option("--out", rep_out)->required();

    // run
    auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
    std::string config_file;
    run->add_option("--config", config_file)->required();
    run->add_option("--out", out, "overrides the config's output directory");
    run->add_option("--jobs", jobs);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : code(ExitCode::config_error);
    }

    try {
        if (*sim || *stg) {
            ExperimentConfig cfg;
            cfg.kind = *sim ? ExperimentKind::greedy : ExperimentKind::staged;
            cfg.n_grid = n_grid;
            cfg.seeds = parse_seed_range(seeds);
            cfg.master_seed = master_seed;
            cfg.out_dir = out;
            cfg.jobs = jobs;
            cfg.record_timing = timing;
            cfg.params["sample_size"] = sample_size;
            if (*sim) {
                cfg.params["checkpoints"] = checkpoints;
                if (stop_mr > 0)
                    cfg.params["stop_mr"] = stop_mr;
                if (save_graph)
                    cfg.params["save_graph"] = true;
            } else {
                cfg.params["profile"] = profile;
                cfg.params["variant"] = variant;
                cfg.params["C"] = C;
                if (rounds != "auto") {
                    try {
                        cfg.params["rounds"] = std::stol(rounds);
                    } catch (const std::exception&) {
                        throw ConfigError("--rounds: expected an integer or auto");
                    }
                }
            }
            return finish(run_experiment(cfg), cfg);
        }
        if (*pred) {
            if (pn < 4 || pm < 0)
                throw ConfigError("predict: need n >= 4 and m >= 0");
            json j{{"n", pn}, {"m", pm}, {"ratio", pm * std::pow(pn, -1.6)}, {"open", bohman_open(pn, pm)}};
            for (int q = 1; q <= 5; ++q)
                j["x" + std::to_string(q)] = bohman_x(pn, pm, q);
            std::cout << j.dump(2) << '\n';
            return 0;
        }
        if (*trj) {
            if (traj_out.empty())
                throw ConfigError("trajectory: --out required");
            const auto table = solve_ode(xmax, step);
            auto os = open_out(traj_out);
            os << "x,phi_upper,phi_lower\n";
            for (std::size_t q = 0; q < table.size(); ++q)
                os << table.x_at(q) << ',' << table.Phi_values()[q] << ',' << table.phi_values()[q] << '\n';
            return 0;
        }
        if (*sdp) {
            auto is = open_in(tree_file);
            const auto tree = TreeSpec::parse(is);
            auto os = open_out(curve_out);
            write_curve(os, survival_dp(tree, grid_step));
            return 0;
        }
        if (*smc) {
            auto is = open_in(tree_file);
            const auto tree = TreeSpec::parse(is);
            const auto est = survival_mc(tree, t, trials, mc_seed);
            std::cout << json{{"t", t}, {"mean", est.mean}, {"standard_error", est.standard_error}, {"trials", est.trials}}
                             .dump(2)
                      << '\n';
            return 0;
        }
        if (*st4) {
            const auto curve = t4_fixed_point(k, t4_xmax, t4_step);
            const auto table = solve_ode(t4_xmax, t4_step);
            auto os = open_out(curve_out);
            os << "x,P_hat,Phi,abs_err\n";
            const auto P = curve.P_hat_values();
            const auto Phi = table.Phi_values();
            for (std::size_t q = 0; q < std::min(P.size(), Phi.size()); ++q)
                os << curve.step() * double(q) << ',' << P[q] << ',' << Phi[q] << ',' << std::abs(P[q] - Phi[q])
                   << '\n';
            return 0;
        }
        if (*f3) {
            auto is = open_in(graph_file);
            const auto g = read_edge_list(is);
            F3Options opts;
            opts.mode = mode == "exact" ? F3Mode::exact : F3Mode::heuristic;
            opts.budget = budget;
            opts.seed = mc_seed;
            const auto r = max_triangle_free_subset(g, opts);
            std::cout << json{{"n", g.n()}, {"m", g.edge_count()}, {"size", r.subset.size()},
                              {"exact", r.exact}, {"nodes", r.nodes}, {"subset", r.subset}}
                             .dump(2)
                      << '\n';
            return 0;
        }
        if (*cov) {
            ExperimentConfig cfg;
            cfg.kind = ExperimentKind::ramsey;
            cfg.n_grid = {cover_n};
            cfg.seeds = parse_seed_range(seeds);
            cfg.master_seed = master_seed;
            cfg.out_dir = ".";
            cfg.params = {{"C", C}, {"samples", samples}, {"budget", budget}};
            cfg.validate();
            bool first = true;
            for (auto s : cfg.seeds) {
                const auto text = run_cell(cfg, cover_n, s);
                std::istringstream ls(text);
                std::string header, row;
                std::getline(ls, header);
                std::getline(ls, row);
                if (first)
                    std::cout << header << '\n';
                first = false;
                std::cout << row << '\n';
            }
            return 0;
        }
        if (*rep) {
            const auto r = write_report(in_dir, rep_out);
            for (const auto& f : r.written)
                std::cout << (std::filesystem::path(rep_out) / f).string() << '\n';
            return 0;
        }
        if (*run) {
            auto is = open_in(config_file);
            json j;
            try {
                is >> j;
            } catch (const json::exception& e) {
                throw ConfigError(std::string("config: ") + e.what());
            }
            auto cfg = ExperimentConfig::from_json(j);
            if (!out.empty())
                cfg.out_dir = out;
            if (jobs)
                cfg.jobs = jobs;
            return finish(run_experiment(cfg), cfg);
        }
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return code(ExitCode::numeric_error);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return code(ExitCode::config_error);
    }
    return 0;
}
