#pragma once

#include "lrsr/harness.hpp"
#include "lrsr/solver.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace lrsr::io {

/// Observed entries of a partially known matrix, zero-based indices.
struct Dataset {
    int d1 = 0;
    int d2 = 0;
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<double> values;

    int nnz() const { return static_cast<int>(values.size()); }
};

/// Shortest decimal string that parses back to the same double.
std::string format_double(double x);

/// MatrixMarket coordinate format, "real general", one-based indices.
Dataset read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const Dataset& data);

/// "row,col,value" CSV with that exact header, zero-based indices.
/// Dimensions are taken from the largest index seen.
Dataset read_triplet_csv(const std::string& path);
void write_triplet_csv(const std::string& path, const Dataset& data);

/// MovieLens-style "user::item::rating" lines, one-based ids.
Dataset read_movielens(const std::string& path);
void write_movielens(const std::string& path, const Dataset& data);

/// Dispatch on extension: .mtx, .csv, or .dat (MovieLens).
Dataset read_dataset(const std::string& path);

ObservationSet to_observations(const Dataset& data);

/// Solver configuration as JSON. Unknown keys are rejected with ConfigError;
/// absent keys keep their defaults. Regularizers nest as
/// {"family": "mcp", "gamma": 3.0, "weight": 1.0}.
SolverConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const SolverConfig& cfg);
SolverConfig read_config(const std::string& path);

/// Stable key-ordered dump of the config and its FNV-1a hash, used to stamp
/// output manifests so runs can be traced back to their settings.
std::string canonical_config_dump(const SolverConfig& cfg);
std::uint64_t fnv1a(const std::string& text);

/// Per-iteration trace. err columns are blank when no ground truth was
/// attached to the solve.
void write_trace_csv(const std::string& path, const SolveTrace& trace);

/// U.csv / S.csv / V.csv plus manifest.json under `dir` (created if needed).
void write_factors(const std::string& dir, const Solution& sol,
                   const SolverConfig& cfg);

/// Reads the three factor CSVs back; validates the result.
LowRankFactors read_factors(const std::string& dir);

nlohmann::ordered_json suite_report_json(const SuiteReport& rep);
void write_suite_report(const std::string& path, const SuiteReport& rep);

/// Flat per-run table of the suite results. Deliberately excludes wall-clock
/// columns so identical seeds reproduce identical bytes.
void write_suite_csv(const std::string& path, const SuiteReport& rep);

} // namespace lrsr::io
