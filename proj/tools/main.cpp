// lrsr: low-rank + sparse recovery from the command line.
//
// Subcommands: complete (matrix completion), rpca (low-rank + sparse
// separation), diagnose (instance diagnostics), bench (experiment suites).

#include "lrsr/errors.hpp"
#include "lrsr/harness.hpp"
#include "lrsr/io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace lrsr;
namespace fs = std::filesystem;

int env_threads() {
    if (const char* v = std::getenv("LRSR_THREADS")) {
        const int t = std::atoi(v);
        if (t > 0)
            return t;
    }
    return 1;
}

Preset preset_by_name(const std::string& name) {
    if (name == "completion_noiseless") return preset_completion_noiseless();
    if (name == "completion_noisy") return preset_completion_noisy(0.1);
    if (name == "table2_row1") return preset_table2_row(1);
    if (name == "table2_row2") return preset_table2_row(2);
    if (name == "table2_row3") return preset_table2_row(3);
    if (name == "table2_row4") return preset_table2_row(4);
    if (name == "rpca_noiseless") return preset_rpca_noiseless();
    if (name == "rpca_noisy") return preset_rpca_noisy();
    if (name == "bias_mcp") return preset_bias_comparison(PenaltyFamily::Mcp);
    if (name == "bias_l1") return preset_bias_comparison(PenaltyFamily::L1);
    if (name == "general_small") return preset_general_small();
    throw ConfigError("unknown preset '" + name + "'");
}

struct SolveArgs {
    std::string data;
    std::string synth;
    std::string config_path;
    std::string out_dir = "out";
    std::string holdout_path;
    std::uint64_t seed = 1;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<int> rank_cap;
    std::optional<double> lambda_l;
    std::optional<double> lambda_s;
    std::string reg;
};

void add_solve_flags(CLI::App* cmd, SolveArgs& a) {
    auto* data = cmd->add_option("--data", a.data,
                                 "observations file (.mtx, .csv, or .dat)");
    auto* synth =
        cmd->add_option("--synth", a.synth, "synthetic preset instance");
    data->excludes(synth);
    synth->excludes(data);
    cmd->add_option("--config", a.config_path, "solver config JSON");
    cmd->add_option("--out", a.out_dir, "output directory");
    cmd->add_option("--seed", a.seed, "RNG seed");
    cmd->add_option("--tol", a.tol, "relative-change stopping tolerance");
    cmd->add_option("--max-iter", a.max_iter, "iteration cap");
    cmd->add_option("--rank-cap", a.rank_cap, "rank cap (0 = auto)");
    cmd->add_option("--lambda-l", a.lambda_l, "low-rank penalty weight");
    cmd->add_option("--lambda-s", a.lambda_s, "sparse penalty weight");
    cmd->add_option("--reg", a.reg, "penalty family: l1|capped|scad|mcp")
        ->check(CLI::IsMember({"l1", "capped", "scad", "mcp"}));
    cmd->add_option("--holdout", a.holdout_path,
                    "held-out ratings for NMAE (.csv or .dat)");
}

void apply_overrides(SolverConfig& cfg, const SolveArgs& a) {
    cfg.seed = a.seed;
    if (a.tol)
        cfg.tol = *a.tol;
    if (a.max_iter)
        cfg.max_iter = *a.max_iter;
    if (a.rank_cap)
        cfg.rank_cap = *a.rank_cap;
    if (a.lambda_l)
        cfg.lambda_l = *a.lambda_l;
    if (a.lambda_s)
        cfg.lambda_s = *a.lambda_s;
    if (!a.reg.empty()) {
        cfg.reg_l.family = penalty_family_from_string(a.reg);
        cfg.reg_s.family = cfg.reg_l.family;
    }
}

Holdout load_holdout(const std::string& path) {
    const io::Dataset d = io::read_dataset(path);
    Holdout h;
    h.rows = d.rows;
    h.cols = d.cols;
    h.values = d.values;
    return h;
}

// Shared by `complete` and `rpca`; they differ only in the observation kind
// and in writing the sparse component back out.
int run_solve(const SolveArgs& a, bool rpca) {
    ObservationSet obs;
    SolverConfig cfg;
    std::optional<GroundTruth> gt;
    std::optional<ProblemInstance> inst;

    if (!a.config_path.empty())
        cfg = io::read_config(a.config_path);

    if (!a.synth.empty()) {
        Preset preset = preset_by_name(a.synth);
        if (a.config_path.empty())
            cfg = preset.cfg;
        inst = make_instance(preset.inst, a.seed);
        obs = inst->obs;
        gt = GroundTruth{inst->l_star, inst->s_star};
    } else if (!a.data.empty()) {
        const io::Dataset d = io::read_dataset(a.data);
        obs = io::to_observations(d);
        if (rpca) {
            obs.kind = ObservationKind::Identity;
            obs.sparse_dim = obs.n();
        }
    } else {
        throw ConfigError("one of --data or --synth is required");
    }

    apply_overrides(cfg, a);
    resolve_config(cfg, obs, inst ? inst->params.noise_std : 0.0);
    if (cfg.lambda_l <= 0.0 ||
        (obs.sparse_dim > 0 && cfg.lambda_s <= 0.0))
        throw ConfigError(
            "lambda unresolved; pass --lambda-l (and --lambda-s) or a config "
            "file with positive values");

    const Solution sol = solve(obs, cfg, gt ? &*gt : nullptr);

    fs::create_directories(a.out_dir);
    io::write_factors(a.out_dir, sol, cfg);
    io::write_trace_csv((fs::path(a.out_dir) / "trace.csv").string(),
                        sol.trace);
    if (rpca || obs.sparse_dim > 0) {
        io::Dataset s_out;
        s_out.d1 = obs.d1;
        s_out.d2 = obs.d2;
        if (obs.kind == ObservationKind::Identity) {
            for (int k = 0; k < obs.n(); ++k)
                if (sol.s[k] != 0.0) {
                    s_out.rows.push_back(obs.rows[k]);
                    s_out.cols.push_back(obs.cols[k]);
                    s_out.values.push_back(sol.s[k]);
                }
        } else {
            for (Eigen::Index k = 0; k < sol.s.size(); ++k)
                if (sol.s[k] != 0.0) {
                    s_out.rows.push_back(0);
                    s_out.cols.push_back(static_cast<int>(k));
                    s_out.values.push_back(sol.s[k]);
                }
        }
        io::write_triplet_csv((fs::path(a.out_dir) / "s.csv").string(), s_out);
    }

    nlohmann::ordered_json m;
    m["converged"] = sol.converged;
    m["iterations"] = sol.iterations;
    m["rank"] = sol.l.rank();
    m["objective"] = sol.trace.records.back().objective;
    m["residual"] = sol.trace.records.back().residual;
    if (inst) {
        const MetricsReport rep = metrics(sol, *inst);
        m["rfne"] = rep.rfne;
        m["support_precision"] = rep.support_precision;
        m["support_recall"] = rep.support_recall;
        m["oracle_rate"] = rep.oracle_rate;
    }
    if (!a.holdout_path.empty()) {
        const Holdout h = load_holdout(a.holdout_path);
        double lo = h.values[0], hi = h.values[0];
        for (double v : h.values) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        m["nmae"] = nmae_against_holdout(sol.l, h, lo, hi);
    }
    std::ofstream mj((fs::path(a.out_dir) / "metrics.json").string());
    mj << m.dump(2) << '\n';

    std::cout << m.dump(2) << std::endl;
    return 0;
}

int run_diagnose(const SolveArgs& a, const std::string& factors_dir,
                 int probe_rank) {
    ObservationSet obs;
    LowRankFactors anchor;
    std::vector<int> omega;

    if (!a.synth.empty()) {
        const Preset preset = preset_by_name(a.synth);
        const ProblemInstance inst = make_instance(preset.inst, a.seed);
        obs = inst.obs;
        anchor = inst.l_star;
        for (Eigen::Index k = 0; k < inst.s_star.size(); ++k)
            if (inst.s_star[k] != 0.0)
                omega.push_back(static_cast<int>(k));
    } else if (!a.data.empty()) {
        obs = io::to_observations(io::read_dataset(a.data));
        if (!factors_dir.empty()) {
            anchor = io::read_factors(factors_dir);
        } else {
            // No anchor supplied: factor the observed data directly.
            SparsePerturbation scatter;
            scatter.d1 = obs.d1;
            scatter.d2 = obs.d2;
            scatter.rows = obs.rows;
            scatter.cols = obs.cols;
            scatter.vals.assign(obs.b.data(), obs.b.data() + obs.b.size());
            const int r0 =
                std::min({probe_rank, obs.d1, obs.d2});
            anchor = lrssvd(LowRankFactors::zero(obs.d1, obs.d2), scatter, r0,
                            6, 1e-10, a.seed)
                         .factors;
        }
    } else {
        throw ConfigError("one of --data or --synth is required");
    }

    const DiagnosticsReport rep = diagnose(obs, anchor, omega);
    nlohmann::ordered_json j;
    j["mu"] = rep.mu;
    j["kappa_l"] = rep.kappa_l;
    j["kappa_s"] = rep.kappa_s;
    j["kappa_cross"] = rep.kappa_cross;
    j["alpha"] = rep.alpha;
    std::cout << j.dump(2) << std::endl;
    fs::create_directories(a.out_dir);
    std::ofstream f(fs::path(a.out_dir) / "diagnostics.json");
    f << j.dump(2) << "\n";
    return 0;
}

int run_bench(const std::string& suite_name, const SuiteConfig& sc,
              const std::string& out_dir) {
    const SuiteKind kind = suite_from_string(suite_name);
    const SuiteReport rep = run_suite(kind, sc);

    fs::create_directories(out_dir);
    io::write_suite_report((fs::path(out_dir) / "report.json").string(), rep);
    io::write_suite_csv((fs::path(out_dir) / "report.csv").string(), rep);

    for (const CellResult& cell : rep.cells)
        std::cout << (cell.pass ? "PASS " : "FAIL ") << cell.name
                  << "  median_rfne=" << io::format_double(cell.median_rfne)
                  << "  runs=" << cell.runs.size() << '\n';
    for (const auto& [key, value] : rep.summary)
        std::cout << "  " << key << " = " << io::format_double(value) << '\n';
    std::cout << (rep.pass ? "PASS" : "FAIL") << " suite " << rep.suite
              << std::endl;
    return rep.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"low-rank + sparse recovery toolkit"};
    app.require_subcommand(1);

    SolveArgs complete_args, rpca_args, diag_args;
    std::string factors_dir;
    int probe_rank = 10;

    CLI::App* complete =
        app.add_subcommand("complete", "matrix completion from observations");
    add_solve_flags(complete, complete_args);

    CLI::App* rpca = app.add_subcommand(
        "rpca", "split observations into low-rank plus sparse");
    add_solve_flags(rpca, rpca_args);

    CLI::App* diag = app.add_subcommand(
        "diagnose", "incoherence / isometry / sparsity diagnostics");
    add_solve_flags(diag, diag_args);
    diag->add_option("--factors", factors_dir,
                     "factor directory to anchor the tangent space");
    diag->add_option("--rank", probe_rank,
                     "probe rank when no factors are given");

    std::string suite_name;
    SuiteConfig sc;
    sc.threads = env_threads();
    std::string bench_out = "bench_out";
    CLI::App* bench = app.add_subcommand("bench", "run an experiment suite");
    bench->add_option("suite", suite_name,
                      "completion_noiseless|completion_noisy|table2|"
                      "rpca_noiseless|rpca_noisy|bias_comparison|theory_audit")
        ->required();
    bench->add_option("--seed", sc.seed, "base RNG seed")->required();
    bench->add_option("--seeds", sc.seeds_per_cell, "runs per cell");
    bench->add_option("--row", sc.table2_row, "benchmark table row (1-4)");
    bench->add_option("--threads", sc.threads, "parallel runs per cell");
    bench->add_option("--out", bench_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (complete->parsed())
            return run_solve(complete_args, false);
        if (rpca->parsed())
            return run_solve(rpca_args, true);
        if (diag->parsed())
            return run_diagnose(diag_args, factors_dir, probe_rank);
        if (bench->parsed())
            return run_bench(suite_name, sc, bench_out);
    } catch (const lrsr::ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return 2;
    } catch (const lrsr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
