#pragma once

#include "lrsr/observe.hpp"
#include "lrsr/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace lrsr {

struct InstanceParams {
    int d1 = 0;
    int d2 = 0;
    int r = 0;
    double p = 1.0;         // observed fraction
    double alpha = 0.0;     // sparse corruption level
    double noise_std = 0.0; // absolute per-measurement noise std
    double mu_measured = 0.0;
    int d_s = 0;
};

struct ProblemInstance {
    LowRankFactors l_star;
    Eigen::VectorXd s_star; // length d_s (empty for plain completion)
    Eigen::VectorXd noise;  // length n
    ObservationSet obs;
    InstanceParams params;
};

/// Ground-truth low-rank matrix: orthonormalized Gaussian factors, singular
/// values uniform in [1, 2] rescaled so ||L||_F = sqrt(d1 d2) (unit RMS
/// entries).
LowRankFactors gen_low_rank(int d1, int d2, int r, std::uint64_t seed);

/// Sparse corruption with per-row cap alpha*d2 and per-column cap alpha*d1
/// nonzeros, magnitudes uniform in [lo, hi] with random signs. Support target
/// is round(alpha d1 d2) entries; caps are enforced exactly, so a crowded
/// tail can leave the count slightly short. Throws if the result violates
/// `inf_cap` when one is given.
SparsePerturbation gen_sparse_corruption(
    int d1, int d2, double alpha, double lo, double hi, std::uint64_t seed,
    std::optional<double> inf_cap = std::nullopt);

enum class InstanceKind { Completion, Rpca, General };

struct InstanceSpec {
    InstanceKind kind = InstanceKind::Completion;
    int d1 = 200;
    int d2 = 100;
    int r = 3;
    double p = 0.3;          // observation density (sampled w/o replacement)
    double alpha = 0.05;     // rpca only
    double noise_rel = 0.0;  // noise std relative to mean |L*| entry
    double s_lo = 1.5;       // corruption magnitude range, absolute
    double s_hi = 3.0;
    double l_scale = 1.0;    // extra scaling applied to L*
    int d_s = 0;             // general kind only
};

ProblemInstance make_instance(const InstanceSpec& spec, std::uint64_t seed);

struct Holdout {
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<double> values;
};

struct MetricsReport {
    double rfne = 0.0; // ||Lhat - L*||_F / ||L*||_F
    std::optional<double> nmae;
    double support_precision = 1.0;
    double support_recall = 1.0;
    double oracle_rate = 0.0; // (d1 d2/n) r nu^2 d log d, reference value
};

MetricsReport metrics(const Solution& sol, const ProblemInstance& inst,
                      const Holdout* holdout = nullptr);

/// NMAE of predictions against a holdout, normalized by the rating range.
double nmae_against_holdout(const LowRankFactors& l, const Holdout& holdout,
                            double r_min, double r_max);

/// Tuned solver configs for the synthetic instances above.
struct Preset {
    std::string name;
    InstanceSpec inst;
    SolverConfig cfg;
};

/// Fill the preset auto-markers in a config: nonpositive lambdas from the
/// noise-level default rule, nonpositive gammas from the resolved combined
/// step (MCP/capped knee at 3x the threshold, SCAD knot at its textbook 3.7
/// or wider when the threshold demands it).
void resolve_config(SolverConfig& cfg, const ObservationSet& obs,
                    double noise_hat);

Preset preset_completion_noiseless();
Preset preset_completion_noisy(double noise_rel); // table-style geometry
Preset preset_table2_row(int row);                // 1..4
Preset preset_rpca_noiseless();
Preset preset_rpca_noisy();
Preset preset_bias_comparison(PenaltyFamily family);
Preset preset_general_small();

enum class SuiteKind {
    CompletionNoiseless,
    CompletionNoisy,
    RpcaNoiseless,
    RpcaNoisy,
    BiasComparison,
    TheoryAudit,
};

SuiteKind suite_from_string(const std::string& name);
std::string to_string(SuiteKind kind);

struct SuiteConfig {
    std::uint64_t seed = 1;
    int seeds_per_cell = 0; // 0 = suite default
    int table2_row = 0;     // completion_noisy: restrict to one row
    int threads = 1;
};

struct CellRun {
    std::uint64_t seed = 0;
    MetricsReport metrics;
    int iterations = 0;
    bool converged = false;
    double seconds = 0.0;
    bool exact_support = false;
    double min_slack_l = 0.0;
    double min_slack_s = 0.0;
    int audited_l = 0; // iterations whose lambda hypothesis held
    int audited_s = 0;
    double max_prox_err = 0.0;
    double rfne_alt = 0.0; // second-config rfne (bias comparison)
};

struct CellResult {
    std::string name;
    InstanceSpec inst;
    std::vector<CellRun> runs;
    double median_rfne = 0.0;
    bool pass = true;
};

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CellResult> cells;
    // Named scalars worth surfacing (fit slopes, win counts, ...).
    std::vector<std::pair<std::string, double>> summary;
    bool pass = true;
};

SuiteReport run_suite(SuiteKind kind, const SuiteConfig& sc);

double median(std::vector<double> v);

} // namespace lrsr
