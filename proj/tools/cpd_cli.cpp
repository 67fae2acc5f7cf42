// Command-line front end: relief pools, detection on CSV series, simulation,
// and the benchmark harness.  Exit codes: 0 success, 2 invalid usage or
// parameters, 3 runtime failure.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "cpd/cpd.hpp"

namespace {

std::ostream& open_or_stdout(std::optional<std::ofstream>& file, const std::string& path) {
    if (path.empty() || path == "-") return std::cout;
    file.emplace(path, std::ios::binary);
    if (!*file) throw std::runtime_error("cannot write " + path);
    return *file;
}

struct IntervalsArgs {
    int n = 0;
    int delta_m = 0;
    double r = -1.0;
    double w = -1.0;
    double b = -1.0;
    std::string emit = "csv";
    std::string out;
};

int run_intervals(const IntervalsArgs& a) {
    const bool have_r = a.r >= 0.0;
    const bool have_wb = a.w >= 0.0 || a.b >= 0.0;
    if (have_r == have_wb)
        throw std::invalid_argument("intervals: give either --r or both --w and --b");
    if (have_wb && (a.w < 0.0 || a.b < 0.0))
        throw std::invalid_argument("intervals: --w and --b go together");

    const cpd::ReliefPool pool = have_r ? cpd::ReliefPool::from_coverage(a.n, a.delta_m, a.r)
                                        : cpd::ReliefPool::build(a.n, a.delta_m, a.w, a.b);

    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, a.out);
    if (a.emit == "csv") {
        cpd::write_pool_csv(os, pool);
    } else {
        os << cpd::pool_to_json(pool, have_r ? std::optional<double>(a.r) : std::nullopt)
                  .dump(2)
           << '\n';
    }
    std::cerr << "intervals: " << pool.size() << '\n';
    return 0;
}

struct DetectArgs {
    std::string data_path;
    std::string kind;
    std::string algo;
    std::string oracle = "direct";
    double r = 0.9;
    int delta_m = 30;
    double gamma = 0.0;
    int K = 1;
    double lambda = 0.1;
    int M = 100;
    double decay_a = 0.7071067811865476;
    std::uint64_t seed = 0;
    int grid_points = 0;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    double prune_margin = 0.0;
    bool no_pruning = false;
    std::string out;
};

template <cpd::ModelFamily F>
cpd::Segmentation detect_with(const cpd::SeriesData& data, F family, const DetectArgs& a,
                              const cpd::SearchConfig& scfg) {
    std::unique_ptr<cpd::CostOracle> oracle;
    if (a.oracle == "direct") {
        oracle = std::make_unique<cpd::DirectOracle<F>>(data, std::move(family));
    } else if (a.oracle == "reliever") {
        auto pool = std::make_shared<const cpd::ReliefPool>(
            cpd::ReliefPool::from_coverage(data.n(), a.delta_m, a.r));
        oracle = std::make_unique<cpd::RelieverOracle<F>>(data, std::move(family),
                                                          std::move(pool), a.delta_m);
    } else {
        throw std::invalid_argument("detect: unknown oracle " + a.oracle);
    }

    if (a.algo == "sn") {
        auto all = cpd::sn_search(*oracle, data.n(), scfg.K, scfg);
        return all[static_cast<std::size_t>(scfg.K)];
    }
    if (a.algo == "op") return cpd::op_search(*oracle, data.n(), scfg);
    if (a.algo == "pelt") return cpd::pelt_search(*oracle, data.n(), scfg);
    if (a.algo == "bs") return cpd::bs_search(*oracle, data.n(), scfg);
    if (a.algo == "wbs") return cpd::wbs_search(*oracle, data.n(), scfg);
    if (a.algo == "seedbs") return cpd::seedbs_search(*oracle, data.n(), scfg);
    throw std::invalid_argument("detect: unknown algorithm " + a.algo);
}

int run_detect(const DetectArgs& a) {
    std::ifstream in(a.data_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + a.data_path);
    const cpd::SeriesData data = cpd::read_series_csv(in);

    cpd::SearchConfig scfg;
    scfg.delta_m = a.delta_m;
    scfg.gamma = a.gamma;
    scfg.K = a.K;
    scfg.M = a.M;
    scfg.decay_a = a.decay_a;
    scfg.seed = a.seed;
    scfg.prune_margin = a.prune_margin;
    scfg.pruning_enabled = !a.no_pruning;
    if (!std::isnan(a.threshold)) scfg.threshold = a.threshold;

    cpd::Segmentation seg;
    if (a.kind == "mean") {
        if (data.kind != cpd::SeriesData::Kind::univariate)
            throw std::invalid_argument("detect: mean family needs univariate data (index,z)");
        seg = detect_with(data, cpd::MeanFamily{}, a, scfg);
    } else if (a.kind == "nmcd") {
        if (data.kind != cpd::SeriesData::Kind::univariate)
            throw std::invalid_argument("detect: nmcd family needs univariate data (index,z)");
        const int g = a.grid_points > 0 ? a.grid_points : cpd::default_nmcd_grid_size(data.n());
        seg = detect_with(data, cpd::NmcdFamily{cpd::make_nmcd_grid(data, g)}, a, scfg);
    } else if (a.kind == "lasso") {
        if (data.kind != cpd::SeriesData::Kind::regression)
            throw std::invalid_argument("detect: lasso family needs regression data (index,y,x_*)");
        seg = detect_with(data, cpd::LassoFamily{a.lambda, {}}, a, scfg);
    } else {
        throw std::invalid_argument("detect: unknown kind " + a.kind);
    }

    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, a.out);
    os << cpd::detection_to_json(seg).dump(2) << '\n';
    std::cerr << "detect: " << seg.changepoints.size() << " changepoint(s), " << seg.diag.fits
              << " fits, " << seg.diag.evals << " evals\n";
    return 0;
}

struct SimulateArgs {
    std::string kind;
    int n = 0;
    int p = 100;
    std::uint64_t seed = 1;
    std::string out;
    std::string truth;
};

int run_simulate(const SimulateArgs& a) {
    cpd::SeriesData data;
    cpd::SimScenario sc;
    if (a.kind == "hd_linear")
        std::tie(data, sc) = cpd::gen_hd_linear(a.n, a.p, a.seed);
    else if (a.kind == "nonparam")
        std::tie(data, sc) = cpd::gen_nonparam(a.n, a.seed);
    else if (a.kind == "single_cp")
        std::tie(data, sc) = cpd::gen_single_cp(a.n, a.p, a.seed);
    else
        throw std::invalid_argument("simulate: unknown kind " + a.kind);

    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, a.out);
    cpd::write_series_csv(os, data);
    if (!a.truth.empty())
        cpd::write_file(a.truth, cpd::truth_to_json(sc).dump(2) + "\n");
    std::cerr << "simulate: n=" << sc.n << " true changepoints:";
    for (int c : sc.true_changepoints) std::cerr << ' ' << c;
    std::cerr << '\n';
    return 0;
}

struct BenchArgs {
    std::string config_path;
    std::string out;
    std::string summary;
    int jobs = 0;
};

int run_bench(const BenchArgs& a) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(cpd::read_file(a.config_path));
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument(std::string("bench: bad config JSON: ") + e.what());
    }
    cpd::BenchConfig cfg = cpd::parse_bench_config(j);
    if (a.jobs > 0) cfg.jobs = a.jobs;

    const auto records = cpd::run_benchmark(cfg);
    {
        std::optional<std::ofstream> file;
        std::ostream& os = open_or_stdout(file, a.out);
        cpd::write_records_csv(os, records);
    }
    if (!a.summary.empty()) {
        const auto best = cpd::best_lambda_rows(records);
        std::ofstream sf(a.summary, std::ios::binary);
        if (!sf) throw std::runtime_error("cannot write " + a.summary);
        cpd::write_summary_csv(sf, cpd::summarize(best));
    }
    std::size_t failed = 0;
    for (const auto& r : records)
        if (!r.error.empty()) ++failed;
    std::cerr << "bench: " << records.size() << " rows, " << failed << " failed\n";
    return 0;
}

struct SummaryArgs {
    std::string records_path;
    std::string out;
};

int run_summary(const SummaryArgs& a) {
    std::ifstream in(a.records_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + a.records_path);
    const auto records = cpd::read_records_csv(in);
    const auto best = cpd::best_lambda_rows(records);
    std::optional<std::ofstream> file;
    std::ostream& os = open_or_stdout(file, a.out);
    cpd::write_summary_csv(os, cpd::summarize(best));
    std::cerr << "summary: " << best.size() << " best-lambda rows\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"changepoint detection with relief-interval acceleration"};
    app.require_subcommand(1);

    IntervalsArgs ia;
    auto* intervals = app.add_subcommand("intervals", "emit a relief pool");
    intervals->add_option("--n", ia.n, "series length")->required();
    intervals->add_option("--delta-m", ia.delta_m, "minimum segment length")->required();
    intervals->add_option("--r", ia.r, "coverage target in (0,1)");
    intervals->add_option("--w", ia.w, "shift fraction");
    intervals->add_option("--b", ia.b, "layer growth factor");
    intervals->add_option("--emit", ia.emit, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    intervals->add_option("--out", ia.out, "output path (default stdout)");

    DetectArgs da;
    auto* detect = app.add_subcommand("detect", "detect changepoints in a CSV series");
    detect->add_option("--data", da.data_path, "input series CSV")->required();
    detect->add_option("--kind", da.kind, "segment model: mean, lasso, nmcd")->required();
    detect->add_option("--algo", da.algo, "sn, op, pelt, bs, wbs, seedbs")->required();
    detect->add_option("--oracle", da.oracle, "direct or reliever");
    detect->add_option("--r", da.r, "reliever coverage target");
    detect->add_option("--delta-m", da.delta_m, "minimum segment length");
    detect->add_option("--gamma", da.gamma, "op/pelt penalty per changepoint");
    detect->add_option("--K", da.K, "changepoint count (sn) or split budget (bs family)");
    detect->add_option("--lambda", da.lambda, "lasso lambda_base");
    detect->add_option("--M", da.M, "wbs random interval count");
    detect->add_option("--decay-a", da.decay_a, "seedbs layer decay");
    detect->add_option("--seed", da.seed, "wbs seed");
    detect->add_option("--grid-points", da.grid_points, "nmcd grid size (0 = default)");
    detect->add_option("--threshold", da.threshold, "bs-family gain threshold");
    detect->add_option("--prune-margin", da.prune_margin, "pelt pruning slack");
    detect->add_flag("--no-pruning", da.no_pruning, "run pelt without pruning");
    detect->add_option("--out", da.out, "output JSON path (default stdout)");

    SimulateArgs sa;
    auto* simulate = app.add_subcommand("simulate", "generate a benchmark scenario");
    simulate->add_option("--kind", sa.kind, "hd_linear, nonparam, single_cp")->required();
    simulate->add_option("--n", sa.n, "series length")->required();
    simulate->add_option("--p", sa.p, "covariate dimension (regression kinds)");
    simulate->add_option("--seed", sa.seed, "rng seed");
    simulate->add_option("--out", sa.out, "output CSV path (default stdout)");
    simulate->add_option("--truth", sa.truth, "write ground-truth JSON here");

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "run a benchmark config");
    bench->add_option("--config", ba.config_path, "JSON config")->required();
    bench->add_option("--out", ba.out, "records CSV path (default stdout)");
    bench->add_option("--summary", ba.summary, "also write best-lambda summary CSV here");
    bench->add_option("--jobs", ba.jobs, "worker threads (overrides config)");

    SummaryArgs su;
    auto* summary = app.add_subcommand("summary", "aggregate a records CSV");
    summary->add_option("--records", su.records_path, "records CSV from bench")->required();
    summary->add_option("--out", su.out, "summary CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(intervals)) return run_intervals(ia);
        if (app.got_subcommand(detect)) return run_detect(da);
        if (app.got_subcommand(simulate)) return run_simulate(sa);
        if (app.got_subcommand(bench)) return run_bench(ba);
        if (app.got_subcommand(summary)) return run_summary(su);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
