#pragma once

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cpd/data.hpp"
#include "cpd/metrics.hpp"
#include "cpd/relief.hpp"
#include "cpd/search/common.hpp"
#include "cpd/simdata.hpp"

namespace cpd {

namespace io_detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline void reject_unknown_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                                const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

}  // namespace io_detail

// ---- series data

inline void write_series_csv(std::ostream& os, const SeriesData& data) {
    if (data.kind == SeriesData::Kind::univariate) {
        os << "index,z\n";
        for (int i = 0; i < data.n(); ++i)
            os << (i + 1) << ',' << io_detail::fmt_double(data.z[static_cast<std::size_t>(i)])
               << '\n';
        return;
    }
    os << "index,y";
    for (int j = 1; j <= data.p(); ++j) os << ",x_" << j;
    os << '\n';
    for (int i = 0; i < data.n(); ++i) {
        os << (i + 1) << ',' << io_detail::fmt_double(data.y[i]);
        for (int j = 0; j < data.p(); ++j) os << ',' << io_detail::fmt_double(data.X(i, j));
        os << '\n';
    }
}

inline SeriesData read_series_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("csv: empty input");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    const auto cols = io_detail::csv_split(header);
    if (cols.size() < 2 || cols[0] != "index")
        throw std::runtime_error("csv: expected header starting with 'index,'");

    const bool univariate = cols[1] == "z";
    if (!univariate && cols[1] != "y")
        throw std::runtime_error("csv: second column must be 'z' or 'y'");
    const int p = univariate ? 0 : static_cast<int>(cols.size()) - 2;

    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = io_detail::csv_split(line);
        if (static_cast<int>(fields.size()) != static_cast<int>(cols.size()))
            throw std::runtime_error("csv: ragged row '" + line + "'");
        std::vector<double> vals;
        for (std::size_t j = 1; j < fields.size(); ++j) vals.push_back(std::stod(fields[j]));
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw std::runtime_error("csv: no data rows");

    if (univariate) {
        std::vector<double> z;
        for (const auto& r : rows) z.push_back(r[0]);
        return SeriesData::univariate(std::move(z));
    }
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd X(n, p);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = rows[static_cast<std::size_t>(i)][0];
        for (int j = 0; j < p; ++j) X(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j) + 1];
    }
    return SeriesData::regression(std::move(X), std::move(y));
}

// ---- simulation truth sidecar

inline nlohmann::json truth_to_json(const SimScenario& sc) {
    nlohmann::json j;
    j["schema"] = 1;
    j["kind"] = sc.kind;
    j["n"] = sc.n;
    j["p"] = sc.p;
    j["seed"] = sc.seed;
    j["rng"] = sc.rng;
    j["true_changepoints"] = sc.true_changepoints;
    if (!sc.coefs.empty()) {
        nlohmann::json coefs = nlohmann::json::array();
        for (const auto& c : sc.coefs) {
            std::vector<double> v(c.data(), c.data() + c.size());
            coefs.push_back(v);
        }
        j["segment_coefs"] = std::move(coefs);
    }
    if (!sc.segment_dists.empty()) j["segment_dists"] = sc.segment_dists;
    return j;
}

// ---- detection result

inline nlohmann::json detection_to_json(const Segmentation& seg) {
    nlohmann::json j;
    j["schema"] = 1;
    j["changepoints"] = seg.changepoints;
    j["total_cost"] = seg.total_cost;
    j["fits"] = seg.diag.fits;
    j["evals"] = seg.diag.evals;
    j["time_ms"] = seg.diag.wall_ms;
    return j;
}

// ---- relief pool emission

inline void write_pool_csv(std::ostream& os, const ReliefPool& pool) {
    os << "layer,k,lo,hi\n";
    int cur_layer = -1;
    int ordinal = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const int layer = pool.layer_of(i);
        if (layer != cur_layer) {
            cur_layer = layer;
            ordinal = 0;
        }
        const Interval& iv = pool.intervals()[i];
        os << layer << ',' << ordinal++ << ',' << iv.lo << ',' << iv.hi << '\n';
    }
}

inline nlohmann::json pool_to_json(const ReliefPool& pool,
                                   std::optional<double> coverage_r = std::nullopt) {
    nlohmann::json j;
    j["schema"] = 1;
    j["n"] = pool.n();
    j["delta_m"] = pool.delta_m();
    j["w"] = pool.w();
    j["b"] = pool.b();
    if (coverage_r) j["coverage_r"] = *coverage_r;
    j["count"] = pool.size();
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : pool.layers()) {
        layers.push_back({{"k", layer.k},
                          {"length", layer.length},
                          {"shift", layer.shift},
                          {"offset", layer.offset},
                          {"count", layer.count}});
    }
    j["layers"] = std::move(layers);
    nlohmann::json ivs = nlohmann::json::array();
    int cur_layer = -1, ordinal = 0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (pool.layer_of(i) != cur_layer) {
            cur_layer = pool.layer_of(i);
            ordinal = 0;
        }
        const Interval& iv = pool.intervals()[i];
        ivs.push_back({{"layer", cur_layer}, {"k", ordinal++}, {"lo", iv.lo}, {"hi", iv.hi}});
    }
    j["intervals"] = std::move(ivs);
    return j;
}

// ---- benchmark records

inline void write_records_csv(std::ostream& os, const std::vector<BenchRecord>& rows) {
    os << "scenario,algorithm,oracle,lambda,rep,seed,hausdorff,hausdorff_flagged,k_hat,fits,"
          "evals,wall_ms,error\n";
    for (const auto& r : rows) {
        os << io_detail::csv_escape(r.scenario) << ',' << io_detail::csv_escape(r.algorithm)
           << ',' << io_detail::csv_escape(r.oracle) << ',' << io_detail::fmt_double(r.lambda)
           << ',' << r.rep << ',' << r.seed << ',' << r.hausdorff << ','
           << (r.hausdorff_flagged ? 1 : 0) << ',' << r.k_hat << ',' << r.fits << ','
           << r.evals << ',' << io_detail::fmt_double(r.wall_ms) << ','
           << io_detail::csv_escape(r.error) << '\n';
    }
}

inline std::vector<BenchRecord> read_records_csv(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw std::runtime_error("records: empty input");
    std::vector<BenchRecord> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = io_detail::csv_split(line);
        if (f.size() != 13) throw std::runtime_error("records: expected 13 columns");
        BenchRecord r;
        r.scenario = f[0];
        r.algorithm = f[1];
        r.oracle = f[2];
        r.lambda = std::stod(f[3]);
        r.rep = std::stoi(f[4]);
        r.seed = std::stoull(f[5]);
        r.hausdorff = std::stoi(f[6]);
        r.hausdorff_flagged = f[7] == "1";
        r.k_hat = std::stoi(f[8]);
        r.fits = std::stoull(f[9]);
        r.evals = std::stoull(f[10]);
        r.wall_ms = std::stod(f[11]);
        r.error = f[12];
        rows.push_back(std::move(r));
    }
    return rows;
}

inline void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "scenario,algorithm,oracle,reps,errors,mean_hausdorff,se_hausdorff,"
          "median_hausdorff,mean_wall_ms,median_wall_ms,mean_fits\n";
    for (const auto& s : rows) {
        os << io_detail::csv_escape(s.scenario) << ',' << io_detail::csv_escape(s.algorithm)
           << ',' << io_detail::csv_escape(s.oracle) << ',' << s.reps << ',' << s.errors << ','
           << io_detail::fmt_double(s.mean_hausdorff) << ','
           << io_detail::fmt_double(s.se_hausdorff) << ','
           << io_detail::fmt_double(s.median_hausdorff) << ','
           << io_detail::fmt_double(s.mean_wall_ms) << ','
           << io_detail::fmt_double(s.median_wall_ms) << ','
           << io_detail::fmt_double(s.mean_fits) << '\n';
    }
}

// ---- bench config (strict: unknown keys are rejected)

inline nlohmann::json bench_config_to_json(const BenchConfig& cfg) {
    nlohmann::json j;
    j["schema"] = 1;
    j["scenario"] = cfg.scenario;
    j["n"] = cfg.n;
    j["p"] = cfg.p;
    j["family"] = cfg.family;
    j["algorithms"] = cfg.algorithms;
    nlohmann::json oracles = nlohmann::json::array();
    for (const auto& o : cfg.oracles) {
        nlohmann::json jo;
        switch (o.kind) {
            case OracleSpec::Kind::direct: jo["kind"] = "direct"; break;
            case OracleSpec::Kind::reliever:
                jo["kind"] = "reliever";
                jo["r"] = o.r;
                break;
            case OracleSpec::Kind::twostep:
                jo["kind"] = "twostep";
                jo["guesses"] = o.guesses;
                break;
        }
        oracles.push_back(std::move(jo));
    }
    j["oracles"] = std::move(oracles);
    j["lambda_grid"] = cfg.lambda_grid;
    j["replications"] = cfg.replications;
    j["seed"] = cfg.seed;
    j["jobs"] = cfg.jobs;
    nlohmann::json s;
    s["delta_m"] = cfg.search.delta_m;
    s["gamma"] = cfg.search.gamma;
    s["K"] = cfg.search.K;
    s["M"] = cfg.search.M;
    s["decay_a"] = cfg.search.decay_a;
    s["prune_margin"] = cfg.search.prune_margin;
    s["pruning_enabled"] = cfg.search.pruning_enabled;
    if (cfg.search.threshold) s["threshold"] = *cfg.search.threshold;
    j["search"] = std::move(s);
    j["nmcd_grid_points"] = cfg.nmcd_grid_points;
    nlohmann::json cd;
    cd["max_iter"] = cfg.cd.max_iter;
    cd["tol"] = cfg.cd.tol;
    j["cd"] = std::move(cd);
    return j;
}

inline BenchConfig parse_bench_config(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
    io_detail::reject_unknown_keys(
        j,
        {"schema", "scenario", "n", "p", "family", "algorithms", "oracles", "lambda_grid",
         "replications", "seed", "jobs", "search", "nmcd_grid_points", "cd"},
        "top level");

    BenchConfig cfg;
    if (j.contains("schema") && j.at("schema").get<int>() != 1)
        throw std::invalid_argument("config: unsupported schema version");
    if (j.contains("scenario")) cfg.scenario = j.at("scenario").get<std::string>();
    if (j.contains("n")) cfg.n = j.at("n").get<int>();
    if (j.contains("p")) cfg.p = j.at("p").get<int>();
    if (j.contains("family")) cfg.family = j.at("family").get<std::string>();
    if (j.contains("algorithms"))
        cfg.algorithms = j.at("algorithms").get<std::vector<std::string>>();
    if (j.contains("oracles")) {
        cfg.oracles.clear();
        for (const auto& jo : j.at("oracles")) {
            io_detail::reject_unknown_keys(jo, {"kind", "r", "guesses"}, "oracles[]");
            OracleSpec spec;
            const std::string kind = jo.at("kind").get<std::string>();
            if (kind == "direct") {
                spec.kind = OracleSpec::Kind::direct;
            } else if (kind == "reliever") {
                spec.kind = OracleSpec::Kind::reliever;
                spec.r = jo.at("r").get<double>();
            } else if (kind == "twostep") {
                spec.kind = OracleSpec::Kind::twostep;
                if (jo.contains("guesses")) spec.guesses = jo.at("guesses").get<int>();
            } else {
                throw std::invalid_argument("config: unknown oracle kind '" + kind + "'");
            }
            cfg.oracles.push_back(spec);
        }
    }
    if (j.contains("lambda_grid")) {
        const auto& g = j.at("lambda_grid");
        if (g.is_array()) {
            cfg.lambda_grid = g.get<std::vector<double>>();
        } else if (g.is_object()) {
            io_detail::reject_unknown_keys(g, {"count", "lo_frac", "hi_frac"}, "lambda_grid");
            const int count = g.at("count").get<int>();
            const double lo = g.contains("lo_frac") ? g.at("lo_frac").get<double>() : 1e-3;
            const double hi = g.contains("hi_frac") ? g.at("hi_frac").get<double>() : 1.0;
            cfg.lambda_grid = make_lambda_grid(count, cfg.p, lo, hi);
        } else {
            throw std::invalid_argument("config: lambda_grid must be array or object");
        }
    }
    if (j.contains("replications")) cfg.replications = j.at("replications").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
    if (j.contains("search")) {
        const auto& s = j.at("search");
        io_detail::reject_unknown_keys(s,
                                       {"delta_m", "gamma", "K", "M", "decay_a", "prune_margin",
                                        "pruning_enabled", "threshold"},
                                       "search");
        if (s.contains("delta_m")) cfg.search.delta_m = s.at("delta_m").get<int>();
        if (s.contains("gamma")) cfg.search.gamma = s.at("gamma").get<double>();
        if (s.contains("K")) cfg.search.K = s.at("K").get<int>();
        if (s.contains("M")) cfg.search.M = s.at("M").get<int>();
        if (s.contains("decay_a")) cfg.search.decay_a = s.at("decay_a").get<double>();
        if (s.contains("prune_margin"))
            cfg.search.prune_margin = s.at("prune_margin").get<double>();
        if (s.contains("pruning_enabled"))
            cfg.search.pruning_enabled = s.at("pruning_enabled").get<bool>();
        if (s.contains("threshold") && !s.at("threshold").is_null())
            cfg.search.threshold = s.at("threshold").get<double>();
    }
    if (j.contains("nmcd_grid_points")) cfg.nmcd_grid_points = j.at("nmcd_grid_points").get<int>();
    if (j.contains("cd")) {
        const auto& c = j.at("cd");
        io_detail::reject_unknown_keys(c, {"max_iter", "tol"}, "cd");
        if (c.contains("max_iter")) cfg.cd.max_iter = c.at("max_iter").get<int>();
        if (c.contains("tol")) cfg.cd.tol = c.at("tol").get<double>();
    }
    return cfg;
}

// ---- small file helpers

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << content;
}

}  // namespace cpd
