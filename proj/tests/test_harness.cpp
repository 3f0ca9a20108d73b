#include "doctest.h"

#include "k4f/errors.hpp"
#include "k4f/harness.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace k4f;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("k4f_harness_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

nlohmann::json manifest(const fs::path& out)
{
    std::ifstream in(out / "manifest.json");
    return nlohmann::json::parse(in);
}

ExperimentConfig greedy_config(const fs::path& out, std::vector<std::size_t> ns, std::vector<std::uint64_t> seeds)
{
    ExperimentConfig c;
    c.kind = ExperimentKind::greedy;
    c.n_grid = std::move(ns);
    c.seeds = std::move(seeds);
    c.out_dir = out;
    c.jobs = 1;
    c.params = {{"checkpoints", "mr:0.1,mr:0.2"}, {"sample_size", 30}};
    return c;
}

} // namespace

TEST_CASE("seed ranges")
{
    CHECK(parse_seed_range("3..6") == std::vector<std::uint64_t>{3, 4, 5, 6});
    CHECK(parse_seed_range("7") == std::vector<std::uint64_t>{7});
    CHECK(parse_seed_range("5..4").empty());
    CHECK_THROWS_AS(parse_seed_range("a..4"), ConfigError);
    CHECK_THROWS_AS(parse_seed_range(""), ConfigError);
    CHECK_THROWS_AS(parse_seed_range("1..-2"), ConfigError);
}

TEST_CASE("validation lists every problem")
{
    ExperimentConfig c;
    c.kind = ExperimentKind::greedy;
    c.n_grid = {100, 3, 50};
    c.seeds = {1, 1};
    c.params = {{"checkpoints", "q:5"}};
    try {
        c.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("ascending") != std::string::npos);
        CHECK(msg.find("distinct") != std::string::npos);
        CHECK(msg.find("out") != std::string::npos);
        CHECK(msg.find("n = 3") != std::string::npos);
        CHECK(msg.find("checkpoint kind 'q'") != std::string::npos);
    }

    ExperimentConfig r;
    r.kind = ExperimentKind::ramsey;
    r.n_grid = {50};
    r.seeds = {0};
    r.out_dir = "x";
    r.params = {{"C", -1.0}};
    CHECK_THROWS_AS(r.validate(), ConfigError);

    ExperimentConfig s;
    s.kind = ExperimentKind::survival;
    s.n_grid = {0};
    s.seeds = {0};
    s.out_dir = "x";
    CHECK_THROWS_AS(s.validate(), ConfigError);

    CHECK_THROWS_AS(parse_kind("nope"), ConfigError);
    for (auto k : {ExperimentKind::greedy, ExperimentKind::staged, ExperimentKind::survival, ExperimentKind::ramsey,
                   ExperimentKind::trajectory})
        CHECK(parse_kind(to_string(k)) == k);
}

TEST_CASE("config json round trip and hash")
{
    auto c = greedy_config("o", {100, 200}, {1, 2, 3});
    c.master_seed = 99;
    const auto back = ExperimentConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(back.hash() == c.hash());
    auto d = c;
    d.master_seed = 100;
    CHECK(d.hash() != c.hash());

    const auto j = nlohmann::json::parse(R"({"kind":"staged","n":[500],"seeds":"0..4","out":"r","jobs":2})");
    const auto e = ExperimentConfig::from_json(j);
    CHECK(e.kind == ExperimentKind::staged);
    CHECK(e.seeds.size() == 5);
    CHECK(e.out_dir == fs::path("r"));
    CHECK(e.jobs == 2);
    CHECK(e.master_seed == default_master_seed);
    CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::parse(R"({"kind":"greedy"})")), ConfigError);
}

TEST_CASE("cell seeds separate streams")
{
    const auto a = cell_seed(1, ExperimentKind::greedy, 100, 0);
    CHECK(a == cell_seed(1, ExperimentKind::greedy, 100, 0));
    CHECK(a != cell_seed(2, ExperimentKind::greedy, 100, 0));
    CHECK(a != cell_seed(1, ExperimentKind::staged, 100, 0));
    CHECK(a != cell_seed(1, ExperimentKind::greedy, 101, 0));
    CHECK(a != cell_seed(1, ExperimentKind::greedy, 100, 1));
    CHECK(cell_path("out", 12, 3) == fs::path("out/cells/n12_seed3.csv"));
}

TEST_CASE("empty seed range gives an empty complete manifest")
{
    const auto out = scratch("empty");
    auto c = greedy_config(out, {100}, parse_seed_range("5..4"));
    const auto s = run_experiment(c);
    CHECK(s.cells == 0);
    CHECK(s.complete());
    const auto m = manifest(out);
    CHECK(m["status"] == "complete");
    CHECK(m["cells"].empty());
    CHECK(m["config_hash"] == c.hash());
    fs::remove_all(out);
}

TEST_CASE("rerun skips finished cells and leaves outputs unchanged")
{
    const auto out = scratch("resume");
    auto c = greedy_config(out, {60, 80}, {0, 1});
    const auto first = run_experiment(c);
    CHECK(first.computed == 4);
    const auto before = slurp(cell_path(out, 80, 1));
    const auto t0 = fs::last_write_time(cell_path(out, 80, 1));
    const auto second = run_experiment(c);
    CHECK(second.computed == 0);
    CHECK(second.skipped == 4);
    CHECK(fs::last_write_time(cell_path(out, 80, 1)) == t0);
    CHECK(slurp(cell_path(out, 80, 1)) == before);

    // a cell without its marker is recomputed
    auto marker = cell_path(out, 60, 0);
    marker += ".done";
    fs::remove(marker);
    const auto third = run_experiment(c);
    CHECK(third.computed == 1);
    CHECK(third.skipped == 3);
    fs::remove_all(out);
}

TEST_CASE("multi-cell runs equal single-cell runs byte for byte")
{
    const auto both = scratch("both"), a = scratch("a"), b = scratch("b");
    auto c = greedy_config(both, {70}, {3, 4});
    c.jobs = 2;
    run_experiment(c);
    run_experiment(greedy_config(a, {70}, {3}));
    run_experiment(greedy_config(b, {70}, {4}));
    CHECK(slurp(cell_path(both, 70, 3)) == slurp(cell_path(a, 70, 3)));
    CHECK(slurp(cell_path(both, 70, 4)) == slurp(cell_path(b, 70, 4)));
    CHECK(slurp(cell_path(both, 70, 3)) != slurp(cell_path(both, 70, 4)));
    CHECK(run_cell(c, 70, 3) == slurp(cell_path(a, 70, 3)));
    for (const auto& p : {both, a, b})
        fs::remove_all(p);
}

TEST_CASE("failed cells mark the run partial")
{
    const auto out = scratch("partial");
    auto c = greedy_config(out, {60}, {0, 1});
    fs::create_directories(cell_path(out, 60, 1));
    fs::create_directories(cell_path(out, 60, 1) / "blocker");
    const auto s = run_experiment(c);
    CHECK(s.failed == 1);
    CHECK(s.computed == 1);
    CHECK_FALSE(s.complete());
    const auto m = manifest(out);
    CHECK(m["status"] == "partial");
    int failed = 0;
    for (const auto& cell : m["cells"])
        if (cell["status"] == "failed") {
            ++failed;
            CHECK(cell.contains("error"));
        }
    CHECK(failed == 1);
    fs::remove_all(out);
}

TEST_CASE("atomic writes replace whole files")
{
    const auto dir = scratch("atomic");
    fs::create_directories(dir);
    write_file_atomic(dir / "f.txt", "first version\n");
    write_file_atomic(dir / "f.txt", "second\n");
    CHECK(slurp(dir / "f.txt") == "second\n");
    CHECK_FALSE(fs::exists(dir / "f.txt.tmp"));
    fs::remove_all(dir);
}

TEST_CASE("scaling fit recovers a planted constant")
{
    std::vector<ScalingPoint> pts;
    for (std::size_t n : {256, 512, 1024, 2048})
        for (int s = 0; s < 5; ++s)
            pts.push_back({n, 0.4 * std::pow(double(n), 1.6) * std::pow(std::log(double(n)), 0.2)});
    const auto fit = fit_scaling(pts, 0.2);
    CHECK(std::abs(fit.c - 0.4) < 1e-12);
    CHECK(std::abs(fit.dispersion - 1) < 1e-12);
    CHECK(fit.rows.size() == 4);
    CHECK(fit.rows[0].samples == 5);

    std::vector<ScalingPoint> bare;
    for (const auto& p : pts)
        bare.push_back({p.n, std::pow(double(p.n), 1.6)});
    const auto wrong = fit_scaling(bare, 0.2);
    CHECK(wrong.dispersion > 1.05);
    CHECK(wrong.monotone_trend);
    const auto right = fit_scaling(bare, 0.0);
    CHECK(std::abs(right.dispersion - 1) < 1e-12);

    pts.resize(10);
    CHECK_THROWS_AS(fit_scaling(pts, 0.2), ConfigError);
    CHECK_THROWS_AS(fit_scaling({{100, 0.0}}, 0.2), ConfigError);
}

TEST_CASE("greedy report schemas")
{
    const auto in = scratch("rep_in"), out = scratch("rep_out");
    run_experiment(greedy_config(in, {40, 50, 60}, {0, 1, 2, 3, 4}));
    const auto r = write_report(in, out);
    CHECK(first_line(out / "e6.csv") ==
          "n,seed,step,m,open,open_pred,open_dev,xbar1,xbar2,xbar3,xbar4,xbar5,xpred1,xpred2,xpred3,xpred4,xpred5,"
          "xdev1,xdev2,xdev3,xdev4,xdev5");
    CHECK(first_line(out / "scaling.csv") == "n,seeds,mean_m,ratio_log,ratio_nolog,fit_c_log,fit_c_nolog");
    const auto sj = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(sj["kind"] == "greedy");
    CHECK(sj["scaling"].contains("dispersion_log"));
    CHECK(r.written.size() == 3);

    // a two-size grid is too small for a fit; the report says so
    const auto in2 = scratch("rep_in2"), out2 = scratch("rep_out2");
    run_experiment(greedy_config(in2, {40, 50}, {0}));
    write_report(in2, out2);
    CHECK_FALSE(fs::exists(out2 / "scaling.csv"));
    CHECK(nlohmann::json::parse(slurp(out2 / "summary.json"))["scaling"].contains("skipped"));
    CHECK_THROWS_AS(write_report(scratch("missing"), out2), ConfigError);
    for (const auto& p : {in, out, in2, out2})
        fs::remove_all(p);
}

TEST_CASE("staged, survival, ramsey and trajectory report schemas")
{
    const auto in = scratch("kinds_in"), out = scratch("kinds_out");

    ExperimentConfig st;
    st.kind = ExperimentKind::staged;
    st.n_grid = {200};
    st.seeds = {0};
    st.out_dir = in / "staged";
    st.jobs = 1;
    st.params = {{"table_xmax", 3.0}};
    REQUIRE(run_experiment(st).complete());
    write_report(st.out_dir, out / "staged");
    CHECK(first_line(out / "staged" / "eventA.csv").rfind("n,seed,", 0) == 0);

    ExperimentConfig sv;
    sv.kind = ExperimentKind::survival;
    sv.n_grid = {100};
    sv.seeds = {0};
    sv.out_dir = in / "survival";
    sv.jobs = 1;
    sv.params = {{"x_max", 1.0}, {"step", 1e-3}, {"stride", 10}};
    REQUIRE(run_experiment(sv).complete());
    write_report(sv.out_dir, out / "survival");
    CHECK(first_line(out / "survival" / "survival.csv") == "k,x,P_hat,Phi,abs_err");
    CHECK(nlohmann::json::parse(slurp(out / "survival" / "summary.json"))["survival_sup_error"].contains("100"));

    ExperimentConfig ra;
    ra.kind = ExperimentKind::ramsey;
    ra.n_grid = {60};
    ra.seeds = {0};
    ra.out_dir = in / "ramsey";
    ra.jobs = 1;
    ra.params = {{"samples", 50}, {"budget", 100}};
    REQUIRE(run_experiment(ra).complete());
    write_report(ra.out_dir, out / "ramsey");
    CHECK(first_line(out / "ramsey" / "ramsey.csv") == "n,seed,m,C,s,samples,violations,best_adversarial,scale");

    ExperimentConfig tr;
    tr.kind = ExperimentKind::trajectory;
    tr.n_grid = {1000};
    tr.seeds = {0};
    tr.out_dir = in / "trajectory";
    tr.jobs = 1;
    REQUIRE(run_experiment(tr).complete());
    write_report(tr.out_dir, out / "trajectory");
    CHECK(first_line(out / "trajectory" / "trajectory.csv") == "n,i,x,Phi,phi,m_pred,open_pred,x1,x2,x3,x4,x5,log_Gamma");

    fs::remove_all(in);
    fs::remove_all(out);
}
