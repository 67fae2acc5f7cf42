#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "cpd/baselines.hpp"
#include "cpd/models/mean.hpp"
#include "cpd/models/nmcd.hpp"
#include "cpd/oracle.hpp"
#include "cpd/search/binseg.hpp"
#include "cpd/search/dp.hpp"
#include "cpd/simdata.hpp"

namespace cpd {

struct HausdorffResult {
    int value = 0;
    bool empty_convention = false;  // one side was empty, boundary set {0, n} used
};

// Two-sided Hausdorff distance between changepoint sets.  An empty set on one
// side is replaced by the boundary {0, n} and the result flagged; two empty
// sets are distance 0.
inline HausdorffResult hausdorff(const std::vector<int>& est, const std::vector<int>& truth,
                                 int n) {
    const auto directed = [](const std::vector<int>& from, const std::vector<int>& to) {
        int worst = 0;
        for (int a : from) {
            int best = std::numeric_limits<int>::max();
            for (int b : to) best = std::min(best, std::abs(a - b));
            worst = std::max(worst, best);
        }
        return worst;
    };
    if (est.empty() && truth.empty()) return {0, false};
    if (est.empty() || truth.empty()) {
        const std::vector<int> boundary{0, n};
        const auto& present = est.empty() ? truth : est;
        return {std::max(directed(present, boundary), directed(boundary, present)), true};
    }
    return {std::max(directed(est, truth), directed(truth, est)), false};
}

// ---- benchmark harness

struct OracleSpec {
    enum class Kind { direct, reliever, twostep };
    Kind kind = Kind::direct;
    double r = 0.9;   // reliever coverage
    int guesses = 3;  // twostep pilot guesses

    std::string label() const {
        switch (kind) {
            case Kind::direct: return "direct";
            case Kind::reliever: {
                char buf[32];
                std::snprintf(buf, sizeof buf, "reliever_r%g", r);
                return buf;
            }
            case Kind::twostep: return "twostep_m" + std::to_string(guesses);
        }
        return "?";
    }
};

struct BenchConfig {
    std::string scenario = "hd_linear";  // hd_linear | nonparam | single_cp
    int n = 600;
    int p = 100;
    std::string family = "lasso";        // mean | lasso | nmcd
    std::vector<std::string> algorithms{"sn"};
    std::vector<OracleSpec> oracles{{}};
    std::vector<double> lambda_grid;     // lasso families only
    int replications = 10;
    std::uint64_t seed = 1;
    int jobs = 1;
    SearchConfig search;
    int nmcd_grid_points = 0;            // 0 = ceil(4 log n)
    CdOptions cd{};
};

struct BenchRecord {
    std::string scenario;
    std::string algorithm;
    std::string oracle;
    double lambda = 0.0;
    int rep = 0;
    std::uint64_t seed = 0;
    int hausdorff = 0;
    bool hausdorff_flagged = false;
    int k_hat = 0;
    std::uint64_t fits = 0;
    std::uint64_t evals = 0;
    double wall_ms = 0.0;
    std::string error;

    auto sort_key() const {
        return std::tie(scenario, algorithm, oracle, rep, lambda);
    }
};

namespace detail {

inline void validate_bench(const BenchConfig& cfg) {
    const bool regression = cfg.scenario == "hd_linear" || cfg.scenario == "single_cp";
    if (!regression && cfg.scenario != "nonparam")
        throw std::invalid_argument("bench: unknown scenario " + cfg.scenario);
    if (regression && cfg.family != "lasso")
        throw std::invalid_argument("bench: scenario " + cfg.scenario + " needs family lasso");
    if (!regression && cfg.family != "mean" && cfg.family != "nmcd")
        throw std::invalid_argument("bench: scenario nonparam needs family mean or nmcd");
    if (cfg.family == "lasso" && cfg.lambda_grid.empty())
        throw std::invalid_argument("bench: lasso family needs a lambda grid");
    if (cfg.replications < 1) throw std::invalid_argument("bench: replications must be >= 1");
    if (cfg.jobs < 1) throw std::invalid_argument("bench: jobs must be >= 1");
    for (const auto& a : cfg.algorithms) {
        if (a != "sn" && a != "op" && a != "pelt" && a != "bs" && a != "wbs" && a != "seedbs")
            throw std::invalid_argument("bench: unknown algorithm " + a);
    }
    for (const auto& o : cfg.oracles) {
        if (o.kind == OracleSpec::Kind::twostep) {
            if (cfg.family != "lasso")
                throw std::invalid_argument("bench: twostep oracle needs family lasso");
            for (const auto& a : cfg.algorithms)
                if (a != "bs" && a != "wbs" && a != "seedbs")
                    throw std::invalid_argument(
                        "bench: twostep oracle only pairs with bs/wbs/seedbs");
        }
        if (o.kind == OracleSpec::Kind::reliever && !(o.r > 0.0 && o.r < 1.0))
            throw std::invalid_argument("bench: reliever coverage must lie in (0,1)");
    }
}

inline Segmentation run_with_oracle(CostOracle& oracle, const std::string& algo, int n,
                                    const SearchConfig& scfg) {
    if (algo == "sn") {
        auto all = sn_search(oracle, n, scfg.K, scfg);
        return all[static_cast<std::size_t>(scfg.K)];
    }
    if (algo == "op") return op_search(oracle, n, scfg);
    if (algo == "pelt") return pelt_search(oracle, n, scfg);
    if (algo == "bs") return bs_search(oracle, n, scfg);
    if (algo == "wbs") return wbs_search(oracle, n, scfg);
    if (algo == "seedbs") return seedbs_search(oracle, n, scfg);
    throw std::invalid_argument("bench: unknown algorithm " + algo);
}

template <ModelFamily F>
Segmentation run_family(const BenchConfig& cfg, const SeriesData& data, F family,
                        const OracleSpec& spec, const std::string& algo,
                        const SearchConfig& scfg,
                        const std::shared_ptr<const ReliefPool>& pool) {
    if (spec.kind == OracleSpec::Kind::direct) {
        DirectOracle<F> oracle(data, std::move(family));
        return run_with_oracle(oracle, algo, data.n(), scfg);
    }
    RelieverOracle<F> oracle(data, std::move(family), pool, scfg.delta_m,
                             /*validate_coverage=*/false);
    return run_with_oracle(oracle, algo, data.n(), scfg);
}

inline Segmentation run_twostep(const BenchConfig& cfg, const SeriesData& data,
                                const OracleSpec& spec, const std::string& algo,
                                double lambda, const SearchConfig& scfg) {
    TwoStepSearchConfig ts;
    ts.K = scfg.K;
    ts.guesses_m = spec.guesses;
    ts.lambda_base = lambda;
    ts.delta_m = scfg.delta_m;
    ts.cd = cfg.cd;
    ts.M = scfg.M;
    ts.seed = scfg.seed;
    ts.decay_a = scfg.decay_a;
    if (algo == "bs") return twostep_bs_search(data, ts);
    if (algo == "wbs") return twostep_wbs_search(data, ts);
    return twostep_seedbs_search(data, ts);
}

}  // namespace detail

// All raw rows: replications x algorithms x oracles x lambda grid.  Failures
// of individual runs land in the `error` column instead of aborting the
// sweep.  Rows come back sorted by (scenario, algorithm, oracle, rep, lambda).
inline std::vector<BenchRecord> run_benchmark(const BenchConfig& cfg) {
    detail::validate_bench(cfg);

    // shared, immutable pools: one per requested coverage level
    std::map<double, std::shared_ptr<const ReliefPool>> pools;
    for (const auto& o : cfg.oracles) {
        if (o.kind != OracleSpec::Kind::reliever || pools.count(o.r)) continue;
        auto pool = std::make_shared<const ReliefPool>(
            ReliefPool::from_coverage(cfg.n, cfg.search.delta_m, o.r));
        if (const auto gap = pool->first_uncovered(cfg.search.delta_m))
            throw NoReliefError(*gap);
        pools.emplace(o.r, std::move(pool));
    }

    const std::vector<double> lambdas =
        cfg.family == "lasso" ? cfg.lambda_grid : std::vector<double>{0.0};

    const auto run_rep = [&](int rep) {
        std::vector<BenchRecord> rows;
        const std::uint64_t rep_seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(rep));

        SeriesData data;
        SimScenario truth;
        if (cfg.scenario == "hd_linear")
            std::tie(data, truth) = gen_hd_linear(cfg.n, cfg.p, rep_seed);
        else if (cfg.scenario == "nonparam")
            std::tie(data, truth) = gen_nonparam(cfg.n, rep_seed);
        else
            std::tie(data, truth) = gen_single_cp(cfg.n, cfg.p, rep_seed);

        NmcdGrid grid;
        if (cfg.family == "nmcd")
            grid = make_nmcd_grid(data, cfg.nmcd_grid_points > 0
                                            ? cfg.nmcd_grid_points
                                            : default_nmcd_grid_size(cfg.n));

        for (const auto& algo : cfg.algorithms) {
            for (const auto& spec : cfg.oracles) {
                for (const double lambda : lambdas) {
                    BenchRecord rec;
                    rec.scenario = cfg.scenario;
                    rec.algorithm = algo;
                    rec.oracle = spec.label();
                    rec.lambda = lambda;
                    rec.rep = rep;
                    rec.seed = rep_seed;
                    try {
                        SearchConfig scfg = cfg.search;
                        scfg.seed = derive_seed(rep_seed, 0x5eedu);
                        Segmentation seg;
                        const auto pool = spec.kind == OracleSpec::Kind::reliever
                                              ? pools.at(spec.r)
                                              : nullptr;
                        if (spec.kind == OracleSpec::Kind::twostep) {
                            seg = detail::run_twostep(cfg, data, spec, algo, lambda, scfg);
                        } else if (cfg.family == "mean") {
                            seg = detail::run_family(cfg, data, MeanFamily{}, spec, algo,
                                                     scfg, pool);
                        } else if (cfg.family == "nmcd") {
                            seg = detail::run_family(cfg, data, NmcdFamily{grid}, spec, algo,
                                                     scfg, pool);
                        } else {
                            seg = detail::run_family(cfg, data,
                                                     LassoFamily{lambda, cfg.cd}, spec, algo,
                                                     scfg, pool);
                        }
                        const auto h =
                            hausdorff(seg.changepoints, truth.true_changepoints, cfg.n);
                        rec.hausdorff = h.value;
                        rec.hausdorff_flagged = h.empty_convention;
                        rec.k_hat = static_cast<int>(seg.changepoints.size());
                        rec.fits = seg.diag.fits;
                        rec.evals = seg.diag.evals;
                        rec.wall_ms = seg.diag.wall_ms;
                    } catch (const std::exception& e) {
                        rec.error = e.what();
                    }
                    rows.push_back(std::move(rec));
                }
            }
        }
        return rows;
    };

    std::vector<BenchRecord> all;
    if (cfg.jobs == 1) {
        for (int rep = 0; rep < cfg.replications; ++rep) {
            auto rows = run_rep(rep);
            all.insert(all.end(), std::make_move_iterator(rows.begin()),
                       std::make_move_iterator(rows.end()));
        }
    } else {
        std::vector<std::future<std::vector<BenchRecord>>> futures;
        std::atomic<int> next{0};
        const int workers = std::min(cfg.jobs, cfg.replications);
        for (int w = 0; w < workers; ++w) {
            futures.push_back(std::async(std::launch::async, [&]() {
                std::vector<BenchRecord> mine;
                for (int rep = next.fetch_add(1); rep < cfg.replications;
                     rep = next.fetch_add(1)) {
                    auto rows = run_rep(rep);
                    mine.insert(mine.end(), std::make_move_iterator(rows.begin()),
                                std::make_move_iterator(rows.end()));
                }
                return mine;
            }));
        }
        for (auto& f : futures) {
            auto rows = f.get();
            all.insert(all.end(), std::make_move_iterator(rows.begin()),
                       std::make_move_iterator(rows.end()));
        }
    }
    std::sort(all.begin(), all.end(),
              [](const BenchRecord& a, const BenchRecord& b) { return a.sort_key() < b.sort_key(); });
    return all;
}

// Per (scenario, algorithm, oracle, rep): the row with the smallest error over
// the lambda grid, ties to the smaller lambda.  Error rows only survive when a
// group has nothing else.
inline std::vector<BenchRecord> best_lambda_rows(const std::vector<BenchRecord>& rows) {
    std::map<std::tuple<std::string, std::string, std::string, int>, BenchRecord> best;
    for (const auto& r : rows) {
        const auto key = std::make_tuple(r.scenario, r.algorithm, r.oracle, r.rep);
        const auto it = best.find(key);
        if (it == best.end()) {
            best.emplace(key, r);
            continue;
        }
        BenchRecord& cur = it->second;
        const bool cur_err = !cur.error.empty(), new_err = !r.error.empty();
        if (cur_err && !new_err)
            cur = r;
        else if (!cur_err && !new_err &&
                 (r.hausdorff < cur.hausdorff ||
                  (r.hausdorff == cur.hausdorff && r.lambda < cur.lambda)))
            cur = r;
    }
    std::vector<BenchRecord> out;
    out.reserve(best.size());
    for (auto& [k, v] : best) out.push_back(std::move(v));
    std::sort(out.begin(), out.end(),
              [](const BenchRecord& a, const BenchRecord& b) { return a.sort_key() < b.sort_key(); });
    return out;
}

struct SummaryRow {
    std::string scenario;
    std::string algorithm;
    std::string oracle;
    int reps = 0;
    int errors = 0;
    double mean_hausdorff = 0.0;
    double se_hausdorff = 0.0;
    double median_hausdorff = 0.0;
    double mean_wall_ms = 0.0;
    double median_wall_ms = 0.0;
    double mean_fits = 0.0;
};

inline std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& rows) {
    const auto median = [](std::vector<double> v) {
        if (v.empty()) return 0.0;
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        return v.size() % 2 ? v[m] : (v[m - 1] + v[m]) / 2.0;
    };

    std::map<std::tuple<std::string, std::string, std::string>, std::vector<const BenchRecord*>>
        groups;
    for (const auto& r : rows)
        groups[std::make_tuple(r.scenario, r.algorithm, r.oracle)].push_back(&r);

    std::vector<SummaryRow> out;
    for (const auto& [key, members] : groups) {
        SummaryRow s;
        std::tie(s.scenario, s.algorithm, s.oracle) = key;
        std::vector<double> hs, ts, fs;
        for (const auto* r : members) {
            if (!r->error.empty()) {
                ++s.errors;
                continue;
            }
            hs.push_back(r->hausdorff);
            ts.push_back(r->wall_ms);
            fs.push_back(static_cast<double>(r->fits));
        }
        s.reps = static_cast<int>(hs.size());
        if (s.reps > 0) {
            double sum = 0.0;
            for (double h : hs) sum += h;
            s.mean_hausdorff = sum / s.reps;
            double ss = 0.0;
            for (double h : hs) ss += (h - s.mean_hausdorff) * (h - s.mean_hausdorff);
            s.se_hausdorff = s.reps > 1 ? std::sqrt(ss / (s.reps - 1) / s.reps) : 0.0;
            s.median_hausdorff = median(hs);
            double tsum = 0.0;
            for (double t : ts) tsum += t;
            s.mean_wall_ms = tsum / s.reps;
            s.median_wall_ms = median(ts);
            double fsum = 0.0;
            for (double f : fs) fsum += f;
            s.mean_fits = fsum / s.reps;
        }
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace cpd
