#include "lrsr/io.hpp"

#include "lrsr/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace lrsr::io {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line,
                             const std::string& what) {
    throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    return out;
}

double parse_double(const std::string& path, int line, const std::string& tok) {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        parse_fail(path, line, "bad number '" + tok + "'");
    return v;
}

long parse_long(const std::string& path, int line, const std::string& tok) {
    long v = 0;
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        parse_fail(path, line, "bad integer '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

void infer_dims(Dataset& d) {
    for (size_t k = 0; k < d.values.size(); ++k) {
        d.d1 = std::max(d.d1, d.rows[k] + 1);
        d.d2 = std::max(d.d2, d.cols[k] + 1);
    }
}

} // namespace

std::string format_double(double x) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, ptr);
}

Dataset read_matrix_market(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    int lineno = 0;

    if (!std::getline(in, line))
        parse_fail(path, 1, "empty file");
    ++lineno;
    {
        std::istringstream hs(line);
        std::string banner, object, fmt, field, symmetry;
        hs >> banner >> object >> fmt >> field >> symmetry;
        if (banner != "%%MatrixMarket" || object != "matrix" ||
            fmt != "coordinate" || field != "real" || symmetry != "general")
            parse_fail(path, lineno,
                       "expected '%%MatrixMarket matrix coordinate real "
                       "general'");
    }

    Dataset d;
    long nnz = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '%')
            continue;
        std::istringstream ls(line);
        if (nnz < 0) {
            long d1 = 0, d2 = 0;
            if (!(ls >> d1 >> d2 >> nnz) || d1 < 1 || d2 < 1 || nnz < 0)
                parse_fail(path, lineno, "bad size line");
            d.d1 = static_cast<int>(d1);
            d.d2 = static_cast<int>(d2);
            continue;
        }
        long i = 0, j = 0;
        double v = 0.0;
        if (!(ls >> i >> j >> v))
            parse_fail(path, lineno, "expected 'row col value'");
        if (i < 1 || i > d.d1 || j < 1 || j > d.d2)
            parse_fail(path, lineno, "index out of range");
        d.rows.push_back(static_cast<int>(i - 1));
        d.cols.push_back(static_cast<int>(j - 1));
        d.values.push_back(v);
    }
    if (nnz < 0)
        parse_fail(path, lineno, "missing size line");
    if (static_cast<long>(d.values.size()) != nnz)
        parse_fail(path, lineno,
                   "entry count does not match the declared nnz");
    return d;
}

void write_matrix_market(const std::string& path, const Dataset& data) {
    std::ofstream out = open_out(path);
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << data.d1 << ' ' << data.d2 << ' ' << data.nnz() << '\n';
    for (int k = 0; k < data.nnz(); ++k)
        out << data.rows[k] + 1 << ' ' << data.cols[k] + 1 << ' '
            << format_double(data.values[k]) << '\n';
}

Dataset read_triplet_csv(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    if (!std::getline(in, line))
        parse_fail(path, 1, "empty file");
    if (line == "row,col,value\r")
        line.pop_back();
    if (line != "row,col,value")
        parse_fail(path, 1, "expected header 'row,col,value'");
    Dataset d;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto tok = split(line, ',');
        if (tok.size() != 3)
            parse_fail(path, lineno, "expected three comma-separated fields");
        const long i = parse_long(path, lineno, tok[0]);
        const long j = parse_long(path, lineno, tok[1]);
        if (i < 0 || j < 0)
            parse_fail(path, lineno, "negative index");
        d.rows.push_back(static_cast<int>(i));
        d.cols.push_back(static_cast<int>(j));
        d.values.push_back(parse_double(path, lineno, tok[2]));
    }
    infer_dims(d);
    return d;
}

void write_triplet_csv(const std::string& path, const Dataset& data) {
    std::ofstream out = open_out(path);
    out << "row,col,value\n";
    for (int k = 0; k < data.nnz(); ++k)
        out << data.rows[k] << ',' << data.cols[k] << ','
            << format_double(data.values[k]) << '\n';
}

Dataset read_movielens(const std::string& path) {
    std::ifstream in = open_in(path);
    std::string line;
    Dataset d;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        std::vector<std::string> tok;
        size_t pos = 0;
        while (true) {
            const size_t next = line.find("::", pos);
            if (next == std::string::npos) {
                tok.push_back(line.substr(pos));
                break;
            }
            tok.push_back(line.substr(pos, next - pos));
            pos = next + 2;
        }
        if (tok.size() != 3)
            parse_fail(path, lineno, "expected 'user::item::rating'");
        const long u = parse_long(path, lineno, tok[0]);
        const long m = parse_long(path, lineno, tok[1]);
        if (u < 1 || m < 1)
            parse_fail(path, lineno, "ids are one-based");
        d.rows.push_back(static_cast<int>(u - 1));
        d.cols.push_back(static_cast<int>(m - 1));
        d.values.push_back(parse_double(path, lineno, tok[2]));
    }
    infer_dims(d);
    return d;
}

void write_movielens(const std::string& path, const Dataset& data) {
    std::ofstream out = open_out(path);
    for (int k = 0; k < data.nnz(); ++k)
        out << data.rows[k] + 1 << "::" << data.cols[k] + 1
            << "::" << format_double(data.values[k]) << '\n';
}

Dataset read_dataset(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".mtx")
        return read_matrix_market(path);
    if (ext == ".csv")
        return read_triplet_csv(path);
    if (ext == ".dat")
        return read_movielens(path);
    throw ConfigError("unrecognized dataset extension '" + ext +
                      "' (expected .mtx, .csv, or .dat)");
}

ObservationSet to_observations(const Dataset& data) {
    Eigen::VectorXd b(data.nnz());
    for (int k = 0; k < data.nnz(); ++k)
        b[k] = data.values[k];
    return ObservationSet::entry_sampling(data.d1, data.d2, data.rows,
                                          data.cols, std::move(b));
}

namespace {

void reject_unknown(const nlohmann::json& j,
                    std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (const auto& item : j.items()) {
        if (std::find_if(allowed.begin(), allowed.end(), [&](const char* k) {
                return item.key() == k;
            }) == allowed.end())
            throw ConfigError("unknown config key '" + item.key() + "' in " +
                              where);
    }
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out,
           const std::string& where) {
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError("config key '" + std::string(key) + "' in " + where +
                          " has the wrong type");
    }
}

RegularizerSpec reg_from_json(const nlohmann::json& j,
                              const std::string& where) {
    if (!j.is_object())
        throw ConfigError(where + " must be an object");
    reject_unknown(j, {"family", "gamma", "weight"}, where);
    RegularizerSpec spec;
    std::string family = to_string(spec.family);
    maybe(j, "family", family, where);
    spec.family = penalty_family_from_string(family);
    maybe(j, "gamma", spec.gamma, where);
    maybe(j, "weight", spec.weight, where);
    return spec;
}

nlohmann::ordered_json reg_to_json(const RegularizerSpec& spec) {
    nlohmann::ordered_json j;
    j["family"] = to_string(spec.family);
    j["gamma"] = spec.gamma;
    j["weight"] = spec.weight;
    return j;
}

} // namespace

SolverConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object())
        throw ConfigError("config root must be an object");
    reject_unknown(j,
                   {"lambda_l", "lambda_s", "tau_l", "tau_s", "reg_l", "reg_s",
                    "rank_cap", "max_iter", "tol", "continuation", "seed",
                    "lrssvd_inner", "lrssvd_tol", "backtracking"},
                   "config");
    SolverConfig cfg;
    maybe(j, "lambda_l", cfg.lambda_l, "config");
    maybe(j, "lambda_s", cfg.lambda_s, "config");
    maybe(j, "tau_l", cfg.tau_l, "config");
    maybe(j, "tau_s", cfg.tau_s, "config");
    if (j.contains("reg_l"))
        cfg.reg_l = reg_from_json(j.at("reg_l"), "reg_l");
    if (j.contains("reg_s"))
        cfg.reg_s = reg_from_json(j.at("reg_s"), "reg_s");
    maybe(j, "rank_cap", cfg.rank_cap, "config");
    maybe(j, "max_iter", cfg.max_iter, "config");
    maybe(j, "tol", cfg.tol, "config");
    maybe(j, "seed", cfg.seed, "config");
    maybe(j, "lrssvd_inner", cfg.lrssvd_inner, "config");
    maybe(j, "lrssvd_tol", cfg.lrssvd_tol, "config");
    maybe(j, "backtracking", cfg.backtracking, "config");
    if (j.contains("continuation") && !j.at("continuation").is_null()) {
        const auto& c = j.at("continuation");
        reject_unknown(c, {"start_mult", "decay", "floor_mult"},
                       "continuation");
        ContinuationConfig cc;
        maybe(c, "start_mult", cc.start_mult, "continuation");
        maybe(c, "decay", cc.decay, "continuation");
        maybe(c, "floor_mult", cc.floor_mult, "continuation");
        cfg.continuation = cc;
    }
    return cfg;
}

nlohmann::ordered_json config_to_json(const SolverConfig& cfg) {
    nlohmann::ordered_json j;
    j["lambda_l"] = cfg.lambda_l;
    j["lambda_s"] = cfg.lambda_s;
    j["tau_l"] = cfg.tau_l;
    j["tau_s"] = cfg.tau_s;
    j["reg_l"] = reg_to_json(cfg.reg_l);
    j["reg_s"] = reg_to_json(cfg.reg_s);
    j["rank_cap"] = cfg.rank_cap;
    j["max_iter"] = cfg.max_iter;
    j["tol"] = cfg.tol;
    if (cfg.continuation) {
        nlohmann::ordered_json c;
        c["start_mult"] = cfg.continuation->start_mult;
        c["decay"] = cfg.continuation->decay;
        c["floor_mult"] = cfg.continuation->floor_mult;
        j["continuation"] = c;
    } else {
        j["continuation"] = nullptr;
    }
    j["seed"] = cfg.seed;
    j["lrssvd_inner"] = cfg.lrssvd_inner;
    j["lrssvd_tol"] = cfg.lrssvd_tol;
    j["backtracking"] = cfg.backtracking;
    return j;
}

SolverConfig read_config(const std::string& path) {
    std::ifstream in = open_in(path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return config_from_json(j);
}

std::string canonical_config_dump(const SolverConfig& cfg) {
    return config_to_json(cfg).dump();
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_trace_csv(const std::string& path, const SolveTrace& trace) {
    std::ofstream out = open_out(path);
    out << "iter,objective,residual,rank,nnz,err_L,err_s,seconds\n";
    for (const TraceRecord& r : trace.records) {
        out << r.iter << ',' << format_double(r.objective) << ','
            << format_double(r.residual) << ',' << r.rank << ',' << r.nnz
            << ',';
        if (!std::isnan(r.err_l))
            out << format_double(r.err_l);
        out << ',';
        if (!std::isnan(r.err_s))
            out << format_double(r.err_s);
        out << ',' << format_double(r.seconds) << '\n';
    }
}

void write_factors(const std::string& dir, const Solution& sol,
                   const SolverConfig& cfg) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const auto base = fs::path(dir);

    auto write_matrix = [](const fs::path& p, const Eigen::MatrixXd& m) {
        std::ofstream out = open_out(p.string());
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (j)
                    out << ',';
                out << format_double(m(i, j));
            }
            out << '\n';
        }
    };
    write_matrix(base / "U.csv", sol.l.U);
    write_matrix(base / "V.csv", sol.l.V);
    {
        std::ofstream out = open_out((base / "S.csv").string());
        for (Eigen::Index k = 0; k < sol.l.S.size(); ++k)
            out << format_double(sol.l.S[k]) << '\n';
    }

    nlohmann::ordered_json m;
    m["d1"] = sol.l.rows();
    m["d2"] = sol.l.cols();
    m["rank"] = sol.l.rank();
    m["sparse_dim"] = static_cast<int>(sol.s.size());
    m["iterations"] = sol.iterations;
    m["converged"] = sol.converged;
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(
                          fnv1a(canonical_config_dump(cfg))));
        m["config_hash"] = buf;
    }
    m["config"] = config_to_json(cfg);
    m["files"] = {{"u", "U.csv"}, {"s", "S.csv"}, {"v", "V.csv"}};
    std::ofstream out = open_out((base / "manifest.json").string());
    out << m.dump(2) << '\n';
}

LowRankFactors read_factors(const std::string& dir) {
    namespace fs = std::filesystem;
    auto read_matrix = [](const std::string& p) {
        std::ifstream in = open_in(p);
        std::vector<std::vector<double>> rows;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            if (line.empty())
                continue;
            std::vector<double> row;
            for (const std::string& tok : split(line, ','))
                row.push_back(parse_double(p, lineno, tok));
            if (!rows.empty() && row.size() != rows.front().size())
                parse_fail(p, lineno, "ragged row");
            rows.push_back(std::move(row));
        }
        Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t j = 0; j < rows[i].size(); ++j)
                m(i, j) = rows[i][j];
        return m;
    };
    LowRankFactors l;
    l.U = read_matrix((fs::path(dir) / "U.csv").string());
    l.V = read_matrix((fs::path(dir) / "V.csv").string());
    const Eigen::MatrixXd s = read_matrix((fs::path(dir) / "S.csv").string());
    l.S = s.rows() > 0 ? Eigen::VectorXd(s.col(0)) : Eigen::VectorXd(0);
    l.validate();
    return l;
}

namespace {

nlohmann::ordered_json inst_to_json(const InstanceSpec& inst) {
    nlohmann::ordered_json j;
    switch (inst.kind) {
    case InstanceKind::Completion: j["kind"] = "completion"; break;
    case InstanceKind::Rpca: j["kind"] = "rpca"; break;
    case InstanceKind::General: j["kind"] = "general"; break;
    }
    j["d1"] = inst.d1;
    j["d2"] = inst.d2;
    j["r"] = inst.r;
    j["p"] = inst.p;
    j["alpha"] = inst.alpha;
    j["noise_rel"] = inst.noise_rel;
    return j;
}

} // namespace

nlohmann::ordered_json suite_report_json(const SuiteReport& rep) {
    nlohmann::ordered_json j;
    j["suite"] = rep.suite;
    j["seed"] = rep.seed;
    j["pass"] = rep.pass;
    nlohmann::ordered_json summary = nlohmann::ordered_json::object();
    for (const auto& [key, value] : rep.summary)
        summary[key] = value;
    j["summary"] = summary;
    j["cells"] = nlohmann::ordered_json::array();
    for (const CellResult& cell : rep.cells) {
        nlohmann::ordered_json c;
        c["name"] = cell.name;
        c["pass"] = cell.pass;
        c["median_rfne"] = cell.median_rfne;
        c["median_rfne_sq"] = cell.median_rfne * cell.median_rfne;
        c["instance"] = inst_to_json(cell.inst);
        c["runs"] = nlohmann::ordered_json::array();
        for (const CellRun& run : cell.runs) {
            nlohmann::ordered_json r;
            r["seed"] = run.seed;
            r["rfne"] = run.metrics.rfne;
            if (run.metrics.nmae)
                r["nmae"] = *run.metrics.nmae;
            r["support_precision"] = run.metrics.support_precision;
            r["support_recall"] = run.metrics.support_recall;
            r["oracle_rate"] = run.metrics.oracle_rate;
            r["iterations"] = run.iterations;
            r["converged"] = run.converged;
            r["exact_support"] = run.exact_support;
            r["min_slack_l"] = run.min_slack_l;
            r["min_slack_s"] = run.min_slack_s;
            r["audited_l"] = run.audited_l;
            r["audited_s"] = run.audited_s;
            r["max_prox_err"] = run.max_prox_err;
            r["rfne_alt"] = run.rfne_alt;
            r["seconds"] = run.seconds;
            c["runs"].push_back(r);
        }
        j["cells"].push_back(c);
    }
    return j;
}

void write_suite_report(const std::string& path, const SuiteReport& rep) {
    std::ofstream out = open_out(path);
    out << suite_report_json(rep).dump(2) << '\n';
}

void write_suite_csv(const std::string& path, const SuiteReport& rep) {
    std::ofstream out = open_out(path);
    out << "suite,cell,seed,rfne,rfne_alt,support_precision,support_recall,"
           "iterations,converged,exact_support,min_slack_l,min_slack_s,"
           "median_rfne,cell_pass,suite_pass\n";
    for (const CellResult& cell : rep.cells)
        for (const CellRun& run : cell.runs)
            out << rep.suite << ',' << cell.name << ',' << run.seed << ','
                << format_double(run.metrics.rfne) << ','
                << format_double(run.rfne_alt) << ','
                << format_double(run.metrics.support_precision) << ','
                << format_double(run.metrics.support_recall) << ','
                << run.iterations << ',' << int(run.converged) << ','
                << int(run.exact_support) << ','
                << format_double(run.min_slack_l) << ','
                << format_double(run.min_slack_s) << ','
                << format_double(cell.median_rfne) << ',' << int(cell.pass)
                << ',' << int(rep.pass) << '\n';
}

} // namespace lrsr::io
