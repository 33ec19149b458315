#pragma once

#include "lrsr/low_rank.hpp"

#include <cstdint>
#include <vector>

namespace lrsr {

/// What the sparse component's forward map A_s looks like. The low-rank part
/// is always sampled entrywise at the stored (row, col) index list.
///   - EntrySampling: no sparse component (A_s = 0, sparse_dim = 0).
///   - Identity:      A_s = I_n, one sparse coordinate per measurement.
///   - GenericDense:  A_s is an explicit dense n x d_s matrix (small scale).
enum class ObservationKind { EntrySampling, Identity, GenericDense };

struct ObservationSet {
    ObservationKind kind = ObservationKind::EntrySampling;
    std::vector<int> rows; // sample k reads matrix entry (rows[k], cols[k])
    std::vector<int> cols;
    Eigen::VectorXd b;
    int d1 = 0;
    int d2 = 0;
    int sparse_dim = 0;    // d_s; zero means no sparse component
    Eigen::MatrixXd dense_as; // n x d_s, GenericDense only

    int n() const { return static_cast<int>(rows.size()); }

    /// Throws ConfigError when the shape bookkeeping is inconsistent
    /// (e.g. Identity with sparse_dim != n, index out of range).
    void validate() const;

    static ObservationSet entry_sampling(int d1, int d2, std::vector<int> rows,
                                         std::vector<int> cols,
                                         Eigen::VectorXd b);
    static ObservationSet identity(int d1, int d2, std::vector<int> rows,
                                   std::vector<int> cols, Eigen::VectorXd b);
    static ObservationSet generic_dense(int d1, int d2, std::vector<int> rows,
                                        std::vector<int> cols,
                                        Eigen::VectorXd b,
                                        Eigen::MatrixXd dense_as);
};

/// Forward model A_L(L) + A_s(s). `s` must be empty when sparse_dim == 0.
/// Costs O(n r) plus the A_s product.
Eigen::VectorXd apply_model(const ObservationSet& obs, const LowRankFactors& l,
                            const Eigen::VectorXd& s);
Eigen::VectorXd apply_model(const ObservationSet& obs, const Eigen::MatrixXd& l,
                            const Eigen::VectorXd& s);

struct AdjointResult {
    SparsePerturbation low_rank_part; // A_L^*(residual), scattered
    Eigen::VectorXd sparse_part;      // A_s^T residual (empty if d_s == 0)
};

AdjointResult adjoint(const ObservationSet& obs,
                      const Eigen::VectorXd& residual);

/// Tangent space of the fixed-rank manifold at U diag(S) V^T, carried by the
/// orthonormal column spans of U and V.
struct TangentSpace {
    Eigen::MatrixXd U;
    Eigen::MatrixXd V;

    static TangentSpace of(const LowRankFactors& lr) { return {lr.U, lr.V}; }
};

/// P_T(X) = U U^T X + X V V^T - U U^T X V V^T.
Eigen::MatrixXd project_tangent(const TangentSpace& t, const Eigen::MatrixXd& x);

/// Zero everything outside the index set; idempotent.
Eigen::VectorXd project_support(const std::vector<int>& omega,
                                const Eigen::VectorXd& x);

/// mu = max(d1/r * max_i ||U_i.||^2, d2/r * max_j ||V_j.||^2); 0 for rank 0.
double incoherence(const LowRankFactors& lr);
double incoherence(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

/// Restricted-isometry deviation of the scaled sampling operator on T:
/// operator norm of (d1 d2 / n) P_T A_L^* A_L P_T - P_T, estimated by power
/// iteration (200 rounds or relative change < 1e-9) over `trials` restarts.
/// Full sampling gives exactly zero.
double estimate_rip(const ObservationSet& obs, const TangentSpace& t,
                    int trials = 3, std::uint64_t seed = 12345);

/// Same deviation for the sparse side on the support set omega:
/// norm of (d_s / n) P_Omega A_s^T A_s P_Omega - P_Omega. Identity maps give
/// exactly zero.
double estimate_rip_sparse(const ObservationSet& obs,
                           const std::vector<int>& omega, int trials = 3,
                           std::uint64_t seed = 12345);

/// Scaled operator norm of the cross term P_T A_L^* A_s P_Omega (the larger
/// of the two scale conventions); for full-observation identity A_s this is
/// exactly ||P_T P_Omega||. The squared value plays the role of the
/// cross-coherence constant in the contraction recursions.
double estimate_rop(const ObservationSet& obs, const TangentSpace& t,
                    const std::vector<int>& omega, int trials = 3,
                    std::uint64_t seed = 12345);

/// ||P_T P_Omega|| for a sparse support pattern in matrix space.
double tangent_support_norm(const TangentSpace& t,
                            const std::vector<int>& rows,
                            const std::vector<int>& cols, int trials = 3,
                            std::uint64_t seed = 12345);

/// max over rows of nnz/d2 and over columns of nnz/d1.
double alpha_sparsity(const SparsePerturbation& s);

struct DiagnosticsReport {
    double mu = 0.0;
    double kappa_l = 0.0;
    double kappa_s = 0.0;
    double kappa_cross = 0.0;
    double alpha = 0.0;
};

/// Instance-level constants around a low-rank anchor and a sparse support.
DiagnosticsReport diagnose(const ObservationSet& obs, const LowRankFactors& lr,
                           const std::vector<int>& omega);

} // namespace lrsr
