#include "k4f/harness.hpp"

#include "k4f/errors.hpp"
#include "k4f/greedy.hpp"
#include "k4f/ramsey.hpp"
#include "k4f/rng.hpp"
#include "k4f/staged.hpp"
#include "k4f/survival.hpp"
#include "k4f/trajectory.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using nlohmann::json;

namespace k4f {

ExperimentKind parse_kind(std::string_view s)
{
    if (s == "greedy")
        return ExperimentKind::greedy;
    if (s == "staged")
        return ExperimentKind::staged;
    if (s == "survival")
        return ExperimentKind::survival;
    if (s == "ramsey")
        return ExperimentKind::ramsey;
    if (s == "trajectory")
        return ExperimentKind::trajectory;
    throw ConfigError("unknown experiment kind '" + std::string(s) + "'");
}

const char* to_string(ExperimentKind k) noexcept
{
    switch (k) {
    case ExperimentKind::greedy:
        return "greedy";
    case ExperimentKind::staged:
        return "staged";
    case ExperimentKind::survival:
        return "survival";
    case ExperimentKind::ramsey:
        return "ramsey";
    case ExperimentKind::trajectory:
        return "trajectory";
    }
    return "?";
}

std::vector<std::uint64_t> parse_seed_range(std::string_view spec)
{
    auto parse = [&](std::string_view t) {
        if (t.empty() || t.find_first_not_of("0123456789") != std::string_view::npos)
            throw ConfigError("seed range '" + std::string(spec) + "': expected a..b");
        return std::stoull(std::string(t));
    };
    std::vector<std::uint64_t> out;
    const auto dots = spec.find("..");
    if (dots == std::string_view::npos) {
        out.push_back(parse(spec));
        return out;
    }
    const auto a = parse(spec.substr(0, dots));
    const auto b = parse(spec.substr(dots + 2));
    for (auto s = a; s <= b; ++s)
        out.push_back(s);
    return out;
}

void ExperimentConfig::validate() const
{
    std::vector<std::string> problems;
    if (!std::is_sorted(n_grid.begin(), n_grid.end()) ||
        std::adjacent_find(n_grid.begin(), n_grid.end()) != n_grid.end())
        problems.emplace_back("n grid must be strictly ascending");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size())
        problems.emplace_back("seeds must be distinct");
    if (out_dir.empty())
        problems.emplace_back("output directory required");
    if (!params.is_object())
        problems.emplace_back("params must be an object");
    for (auto n : n_grid) {
        switch (kind) {
        case ExperimentKind::greedy:
        case ExperimentKind::ramsey:
            if (n < 4)
                problems.push_back("n = " + std::to_string(n) + " below 4");
            if (n > params.value("max_vertices", default_max_vertices))
                problems.push_back("n = " + std::to_string(n) + " exceeds max_vertices");
            if (kind == ExperimentKind::greedy) {
                try {
                    CheckpointSchedule::parse(params.value("checkpoints", std::string()), n);
                } catch (const ConfigError& e) {
                    problems.emplace_back(e.what());
                }
            }
            break;
        case ExperimentKind::staged:
        case ExperimentKind::trajectory: {
            auto p = ProcessParams::for_profile(parse_profile(params.value("profile", std::string("desk"))), n);
            p.eps1 = params.value("eps1", p.eps1);
            p.eps2 = params.value("eps2", p.eps2);
            p.eps3 = params.value("eps3", p.eps3);
            if (params.contains("rounds") && params["rounds"].is_number_integer())
                p.rounds = params["rounds"].get<long>();
            else
                p.rounds = ProcessParams::default_rounds(n, p.eps1);
            try {
                p.validate();
            } catch (const ConfigError& e) {
                problems.push_back("n = " + std::to_string(n) + ": " + e.what());
            }
            break;
        }
        case ExperimentKind::survival:
            if (n < 1)
                problems.emplace_back("survival k must be at least 1");
            break;
        }
    }
    if (kind == ExperimentKind::ramsey && params.value("C", 1.0) <= 0)
        problems.emplace_back("C must be positive");
    if (!problems.empty()) {
        std::string msg = "invalid experiment config:";
        for (const auto& p : problems)
            msg += "\n  - " + p;
        throw ConfigError(msg);
    }
}

json ExperimentConfig::to_json() const
{
    return json{{"kind", to_string(kind)}, {"n", n_grid},     {"seeds", seeds},
                {"master_seed", master_seed}, {"params", params}, {"record_timing", record_timing}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j)
{
    ExperimentConfig c;
    try {
        c.kind = parse_kind(j.at("kind").get<std::string>());
        c.n_grid = j.at("n").get<std::vector<std::size_t>>();
        if (j.at("seeds").is_string())
            c.seeds = parse_seed_range(j.at("seeds").get<std::string>());
        else
            c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        c.master_seed = j.value("master_seed", default_master_seed);
        c.params = j.value("params", json::object());
        c.out_dir = j.value("out", std::string());
        c.jobs = j.value("jobs", 0U);
        c.record_timing = j.value("record_timing", false);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

std::string ExperimentConfig::hash() const
{
    const auto text = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text)
        h = (h ^ ch) * 0x100000001b3ULL;
    std::ostringstream os;
    os << std::hex << mix64(h);
    return os.str();
}

std::uint64_t cell_seed(std::uint64_t master_seed, ExperimentKind kind, std::size_t n, std::uint64_t seed)
{
    return derive_key({master_seed, static_cast<std::uint64_t>(kind) + 1, n, seed});
}

fs::path cell_path(const fs::path& out_dir, std::size_t n, std::uint64_t seed)
{
    return out_dir / "cells" / ("n" + std::to_string(n) + "_seed" + std::to_string(seed) + ".csv");
}

void write_file_atomic(const fs::path& path, std::string_view content)
{
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os)
            throw ConfigError("cannot write " + tmp.string());
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!os)
            throw ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

namespace {

std::string greedy_cell(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed)
{
    const auto& p = cfg.params;
    GreedyConfig gc;
    gc.n = n;
    gc.seed = cell_seed(cfg.master_seed, cfg.kind, n, seed);
    gc.checkpoints = CheckpointSchedule::parse(p.value("checkpoints", std::string()), n);
    gc.sample_size = p.value("sample_size", 200U);
    if (p.contains("stop_mr"))
        gc.stop_at_m = static_cast<std::uint64_t>(std::ceil(p["stop_mr"].get<double>() * std::pow(double(n), 1.6)));
    if (p.contains("stop_m"))
        gc.stop_at_m = p["stop_m"].get<std::uint64_t>();
    gc.record_timing = cfg.record_timing;
    gc.max_vertices = p.value("max_vertices", default_max_vertices);
    const auto run = run_greedy(gc);
    std::ostringstream os;
    os << run_record_header() << '\n';
    for (const auto& r : run.records)
        os << to_csv_row(r) << '\n';
    if (p.value("save_graph", false)) {
        std::ostringstream gs;
        write_edge_list(gs, run.graph);
        auto gp = cell_path(cfg.out_dir, n, seed);
        gp.replace_extension(".graph");
        write_file_atomic(gp, gs.str());
    }
    return os.str();
}

ProcessParams staged_params(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed)
{
    const auto& p = cfg.params;
    auto pp = ProcessParams::for_profile(parse_profile(p.value("profile", std::string("desk"))), n,
                                         cell_seed(cfg.master_seed, cfg.kind, n, seed));
    pp.eps1 = p.value("eps1", pp.eps1);
    pp.eps2 = p.value("eps2", pp.eps2);
    pp.eps3 = p.value("eps3", pp.eps3);
    pp.C = p.value("C", pp.C);
    pp.rounds = (p.contains("rounds") && p["rounds"].is_number_integer()) ? p["rounds"].get<long>()
                                                                           : ProcessParams::default_rounds(n, pp.eps1);
    pp.s = ProcessParams::default_s(n, pp.C);
    pp.validate();
    return pp;
}

std::string staged_cell(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed)
{
    const auto& p = cfg.params;
    const auto pp = staged_params(cfg, n, seed);
    const auto variant = p.value("variant", std::string("nested")) == "oneshot" ? StageVariant::oneshot
                                                                                : StageVariant::nested;
    std::optional<TrajectoryTable> table;
    if (p.value("measure", true))
        table = solve_ode(p.value("table_xmax", 10.0), p.value("table_step", 1e-3));
    const auto run = run_staged(pp, variant, table ? &*table : nullptr, p.value("sample_size", 200U));
    std::ostringstream os;
    os << round_record_header() << '\n';
    for (const auto& r : run.rounds)
        os << to_csv_row(r) << '\n';
    return os.str();
}

std::string survival_cell(const ExperimentConfig& cfg, std::size_t k, std::uint64_t)
{
    const auto& p = cfg.params;
    const double x_max = p.value("x_max", 3.0);
    const double h = p.value("step", 1e-4);
    const auto stride = std::max<std::size_t>(1, p.value("stride", std::size_t{100}));
    const auto curve = t4_fixed_point(static_cast<double>(k), x_max, h);
    const auto table = solve_ode(x_max, h);
    std::ostringstream os;
    os.precision(12);
    os << "x,P_hat,Phi,abs_err\n";
    const auto P = curve.P_hat_values();
    const auto Phi = table.Phi_values();
    for (std::size_t q = 0; q < std::min(P.size(), Phi.size()); q += stride)
        os << curve.step() * double(q) << ',' << P[q] << ',' << Phi[q] << ',' << std::abs(P[q] - Phi[q]) << '\n';
    return os.str();
}

std::string ramsey_cell(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed)
{
    const auto& p = cfg.params;
    GreedyConfig gc;
    gc.n = n;
    gc.seed = cell_seed(cfg.master_seed, ExperimentKind::greedy, n, seed);
    gc.sample_size = 0;
    const auto run = run_greedy(gc);
    const double C = p.value("C", 1.0);
    const auto s = std::min<std::size_t>(n, ProcessParams::default_s(n, C));
    const auto rep = check_s_subsets(run.graph, std::max<std::size_t>(3, s), p.value("samples", std::uint64_t{10000}),
                                     cell_seed(cfg.master_seed, cfg.kind, n, seed),
                                     p.value("budget", std::uint64_t{2000}));
    std::ostringstream os;
    os.precision(10);
    os << "n,seed,m,C,s,samples,violations,best_adversarial\n";
    os << n << ',' << seed << ',' << run.graph.edge_count() << ',' << C << ',' << rep.s << ',' << rep.samples << ','
       << rep.violations << ',' << rep.best_adversarial << '\n';
    return os.str();
}

std::string trajectory_cell(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed)
{
    const auto pp = staged_params(cfg, n, seed);
    const auto& p = cfg.params;
    const auto table = solve_ode(p.value("table_xmax", 10.0), p.value("table_step", 1e-3));
    const TrajectoryModel model(double(n), pp.eps1, pp.eps2, table);
    const auto log_gamma = model.log_Gamma_series(pp.rounds);
    std::ostringstream os;
    os.precision(12);
    os << "i,x,Phi,phi,m_pred,open_pred,x1,x2,x3,x4,x5,log_Gamma\n";
    const double nn = double(n);
    for (long i = 0; i <= pp.rounds; ++i) {
        const double Phi = model.Phi_at(i);
        const double phi = phi_of(Phi);
        os << i << ',' << model.scaled_time(i) << ',' << Phi << ',' << phi << ',' << 0.5 * std::pow(nn, 1.6) * Phi
           << ',' << 0.5 * nn * nn * phi;
        for (int j = 1; j <= 5; ++j)
            os << ',' << x_formula(nn, j, Phi, phi);
        os << ',' << log_gamma[static_cast<std::size_t>(i)] << '\n';
    }
    return os.str();
}

std::string timestamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path marker_path(const fs::path& csv)
{
    auto m = csv;
    m += ".done";
    return m;
}

} // namespace

std::string run_cell(const ExperimentConfig& config, std::size_t n, std::uint64_t seed)
{
    switch (config.kind) {
    case ExperimentKind::greedy:
        return greedy_cell(config, n, seed);
    case ExperimentKind::staged:
        return staged_cell(config, n, seed);
    case ExperimentKind::survival:
        return survival_cell(config, n, seed);
    case ExperimentKind::ramsey:
        return ramsey_cell(config, n, seed);
    case ExperimentKind::trajectory:
        return trajectory_cell(config, n, seed);
    }
    throw ConfigError("unhandled experiment kind");
}

ExperimentSummary run_experiment(const ExperimentConfig& config)
{
    config.validate();
    fs::create_directories(config.out_dir / "cells");
    const std::string started = timestamp();

    struct Cell {
        std::size_t n;
        std::uint64_t seed;
        std::string status;
        double wall_ms = 0;
        std::string error;
    };
    std::vector<Cell> cells;
    for (auto n : config.n_grid)
        for (auto s : config.seeds)
            cells.push_back({n, s, "pending", 0.0, {}});

    ExperimentSummary summary;
    summary.cells = cells.size();
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= cells.size())
                return;
            auto& cell = cells[idx];
            const auto path = cell_path(config.out_dir, cell.n, cell.seed);
            if (fs::exists(marker_path(path)) && fs::exists(path)) {
                cell.status = "complete";
                std::lock_guard lock(mu);
                ++summary.skipped;
                continue;
            }
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto text = run_cell(config, cell.n, cell.seed);
                write_file_atomic(path, text);
                write_file_atomic(marker_path(path), "");
                cell.status = "complete";
                cell.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
                std::lock_guard lock(mu);
                ++summary.computed;
            } catch (const std::exception& e) {
                cell.status = "failed";
                cell.error = e.what();
                std::lock_guard lock(mu);
                ++summary.failed;
            }
        }
    };
    unsigned jobs = config.jobs ? config.jobs : std::max(1U, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(1, cells.size())));
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back(worker);
    }

    json manifest;
    manifest["artifact"] = "k4flab";
    manifest["version"] = artifact_version;
    manifest["config"] = config.to_json();
    manifest["config_hash"] = config.hash();
    manifest["master_seed"] = config.master_seed;
    manifest["started"] = started;
    manifest["finished"] = timestamp();
    manifest["status"] = summary.complete() ? "complete" : "partial";
    manifest["cells"] = json::array();
    for (const auto& c : cells) {
        json jc{{"n", c.n},
                {"seed", c.seed},
                {"status", c.status},
                {"file", cell_path(fs::path("."), c.n, c.seed).lexically_normal().string()},
                {"wall_ms", c.wall_ms}};
        if (!c.error.empty())
            jc["error"] = c.error;
        manifest["cells"].push_back(jc);
    }
    write_file_atomic(config.out_dir / "manifest.json", manifest.dump(2) + "\n");
    return summary;
}

ScalingFit fit_scaling(const std::vector<ScalingPoint>& records, double log_exponent)
{
    std::map<std::size_t, std::vector<double>> by_n;
    for (const auto& r : records) {
        if (!(r.m > 0) || r.n < 2)
            throw ConfigError("fit_scaling: records need n >= 2 and m > 0");
        by_n[r.n].push_back(r.m);
    }
    if (by_n.size() < 3)
        throw ConfigError("fit_scaling: need at least 3 distinct n");
    for (const auto& [n, ms] : by_n)
        if (ms.size() < 5)
            throw ConfigError("fit_scaling: n = " + std::to_string(n) + " has fewer than 5 records");

    auto model = [&](double n) { return std::pow(n, 1.6) * std::pow(std::log(n), log_exponent); };
    ScalingFit fit;
    fit.log_exponent = log_exponent;
    double acc = 0;
    for (const auto& r : records)
        acc += std::log(r.m) - std::log(model(double(r.n)));
    fit.c = std::exp(acc / double(records.size()));

    for (const auto& [n, ms] : by_n) {
        ScalingRow row;
        row.n = n;
        row.samples = ms.size();
        row.mean_m = std::accumulate(ms.begin(), ms.end(), 0.0) / double(ms.size());
        row.ratio = row.mean_m / model(double(n));
        fit.rows.push_back(row);
    }
    double lo = fit.rows.front().ratio, hi = lo;
    bool up = true, down = true;
    for (std::size_t k = 0; k < fit.rows.size(); ++k) {
        lo = std::min(lo, fit.rows[k].ratio);
        hi = std::max(hi, fit.rows[k].ratio);
        if (k > 0) {
            up = up && fit.rows[k].ratio > fit.rows[k - 1].ratio;
            down = down && fit.rows[k].ratio < fit.rows[k - 1].ratio;
        }
    }
    fit.dispersion = hi / lo;
    fit.monotone_trend = up || down;
    return fit;
}

namespace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const
    {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw ConfigError("csv: missing column " + name);
        return static_cast<std::size_t>(it - header.begin());
    }
    double num(std::size_t row, const std::string& name) const { return std::stod(rows[row][column(name)]); }
};

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream ls(line);
    while (std::getline(ls, cur, ','))
        out.push_back(cur);
    return out;
}

Csv read_csv(const fs::path& path)
{
    std::ifstream is(path);
    if (!is)
        throw ConfigError("cannot read " + path.string());
    Csv csv;
    std::string line;
    if (std::getline(is, line))
        csv.header = split(line);
    while (std::getline(is, line))
        if (!line.empty())
            csv.rows.push_back(split(line));
    return csv;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

double rel_dev(double empirical, double predicted)
{
    if (predicted == 0)
        return empirical == 0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (empirical - predicted) / predicted;
}

} // namespace

ReportSummary write_report(const fs::path& in_dir, const fs::path& out_dir)
{
    std::ifstream ms(in_dir / "manifest.json");
    if (!ms)
        throw ConfigError("no manifest.json in " + in_dir.string());
    json manifest;
    try {
        ms >> manifest;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
    const auto cfg = ExperimentConfig::from_json(manifest.at("config"));
    fs::create_directories(out_dir);
    ReportSummary summary;
    json sj;
    sj["kind"] = to_string(cfg.kind);
    sj["source_status"] = manifest.value("status", std::string("unknown"));

    std::vector<std::pair<std::size_t, std::uint64_t>> done;
    for (const auto& c : manifest.at("cells"))
        if (c.at("status") == "complete")
            done.emplace_back(c.at("n").get<std::size_t>(), c.at("seed").get<std::uint64_t>());

    auto emit = [&](const std::string& name, const std::string& text) {
        write_file_atomic(out_dir / name, text);
        summary.written.push_back(name);
    };

    switch (cfg.kind) {
    case ExperimentKind::greedy: {
        std::ostringstream e6;
        e6 << "n,seed,step,m,open,open_pred,open_dev";
        for (int j = 1; j <= 5; ++j)
            e6 << ",xbar" << j;
        for (int j = 1; j <= 5; ++j)
            e6 << ",xpred" << j;
        for (int j = 1; j <= 5; ++j)
            e6 << ",xdev" << j;
        e6 << '\n';
        std::vector<ScalingPoint> finals;
        for (const auto& [n, seed] : done) {
            const auto csv = read_csv(cell_path(in_dir, n, seed));
            for (std::size_t r = 0; r < csv.rows.size(); ++r) {
                const double m = csv.num(r, "m"), open = csv.num(r, "open");
                const double open_pred = bohman_open(double(n), m);
                e6 << n << ',' << seed << ',' << csv.rows[r][csv.column("step")] << ',' << fmt(m) << ','
                   << fmt(open) << ',' << fmt(open_pred) << ',' << fmt(rel_dev(open, open_pred));
                std::array<double, 5> xb{}, xp{};
                for (int j = 1; j <= 5; ++j) {
                    xb[j - 1] = csv.num(r, "xbar" + std::to_string(j));
                    xp[j - 1] = bohman_x(double(n), m, j);
                }
                for (double v : xb)
                    e6 << ',' << fmt(v);
                for (double v : xp)
                    e6 << ',' << fmt(v);
                for (int j = 0; j < 5; ++j)
                    e6 << ',' << fmt(rel_dev(xb[j], xp[j]));
                e6 << '\n';
            }
            if (!csv.rows.empty())
                finals.push_back({n, csv.num(csv.rows.size() - 1, "m")});
        }
        emit("e6.csv", e6.str());
        try {
            const auto fit_log = fit_scaling(finals, 0.2);
            const auto fit_plain = fit_scaling(finals, 0.0);
            std::ostringstream sc;
            sc << "n,seeds,mean_m,ratio_log,ratio_nolog,fit_c_log,fit_c_nolog\n";
            for (std::size_t k = 0; k < fit_log.rows.size(); ++k)
                sc << fit_log.rows[k].n << ',' << fit_log.rows[k].samples << ',' << fmt(fit_log.rows[k].mean_m) << ','
                   << fmt(fit_log.rows[k].ratio) << ',' << fmt(fit_plain.rows[k].ratio) << ',' << fmt(fit_log.c) << ','
                   << fmt(fit_plain.c) << '\n';
            emit("scaling.csv", sc.str());
            sj["scaling"] = {{"c_log", fit_log.c},
                             {"dispersion_log", fit_log.dispersion},
                             {"trend_log", fit_log.monotone_trend},
                             {"c_nolog", fit_plain.c},
                             {"dispersion_nolog", fit_plain.dispersion},
                             {"trend_nolog", fit_plain.monotone_trend}};
        } catch (const ConfigError& e) {
            sj["scaling"] = {{"skipped", e.what()}};
        }
        break;
    }
    case ExperimentKind::staged: {
        std::ostringstream ea;
        ea << "n,seed," << round_record_header() << '\n';
        for (const auto& [n, seed] : done) {
            const auto csv = read_csv(cell_path(in_dir, n, seed));
            for (const auto& row : csv.rows) {
                ea << n << ',' << seed;
                for (const auto& v : row)
                    ea << ',' << v;
                ea << '\n';
            }
        }
        emit("eventA.csv", ea.str());
        break;
    }
    case ExperimentKind::survival: {
        std::ostringstream sv;
        sv << "k,x,P_hat,Phi,abs_err\n";
        json sups = json::object();
        std::set<std::size_t> seen;
        for (const auto& [k, seed] : done) {
            if (!seen.insert(k).second)
                continue;
            const auto csv = read_csv(cell_path(in_dir, k, seed));
            double sup = 0;
            for (std::size_t r = 0; r < csv.rows.size(); ++r) {
                sv << k;
                for (const auto& v : csv.rows[r])
                    sv << ',' << v;
                sv << '\n';
                sup = std::max(sup, csv.num(r, "abs_err"));
            }
            sups[std::to_string(k)] = sup;
        }
        emit("survival.csv", sv.str());
        sj["survival_sup_error"] = sups;
        break;
    }
    case ExperimentKind::ramsey: {
        std::ostringstream rc;
        bool header = false;
        for (const auto& [n, seed] : done) {
            const auto csv = read_csv(cell_path(in_dir, n, seed));
            if (!header) {
                for (std::size_t c = 0; c < csv.header.size(); ++c)
                    rc << (c ? "," : "") << csv.header[c];
                rc << ",scale\n";
                header = true;
            }
            for (const auto& row : csv.rows) {
                for (std::size_t c = 0; c < row.size(); ++c)
                    rc << (c ? "," : "") << row[c];
                rc << ',' << fmt(cover_scale(double(n))) << '\n';
            }
        }
        emit("ramsey.csv", rc.str());
        break;
    }
    case ExperimentKind::trajectory: {
        std::ostringstream tr;
        bool header = false;
        for (const auto& [n, seed] : done) {
            const auto csv = read_csv(cell_path(in_dir, n, seed));
            if (!header) {
                tr << "n";
                for (const auto& h : csv.header)
                    tr << ',' << h;
                tr << '\n';
                header = true;
            }
            for (const auto& row : csv.rows) {
                tr << n;
                for (const auto& v : row)
                    tr << ',' << v;
                tr << '\n';
            }
        }
        emit("trajectory.csv", tr.str());
        break;
    }
    }
    emit("summary.json", sj.dump(2) + "\n");
    return summary;
}

} // namespace k4f
