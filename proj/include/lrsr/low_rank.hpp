#pragma once

#include <Eigen/Core>

#include <vector>

namespace lrsr {

/// Thin SVD-style representation L = U * diag(S) * V^T. U and V have
/// orthonormal columns, S is nonnegative and nonincreasing. Rank zero is a
/// legal state (empty factors) and stands for the zero matrix.
struct LowRankFactors {
    Eigen::MatrixXd U; // d1 x r
    Eigen::VectorXd S; // r
    Eigen::MatrixXd V; // d2 x r

    static LowRankFactors zero(int d1, int d2);

    int rows() const { return static_cast<int>(U.rows()); }
    int cols() const { return static_cast<int>(V.rows()); }
    int rank() const { return static_cast<int>(S.size()); }

    double entry(int i, int j) const;
    Eigen::MatrixXd dense() const;

    double frob_norm() const { return S.norm(); }
    double spectral_norm() const { return rank() > 0 ? S[0] : 0.0; }

    /// Throws ConfigError if the orthonormality / ordering invariants fail.
    void validate(double tol = 1e-10) const;
};

double inner(const LowRankFactors& a, const LowRankFactors& b);
double frob_distance(const LowRankFactors& a, const LowRankFactors& b);

/// Sparse matrix in coordinate form; entries are unique (i, j) pairs.
struct SparsePerturbation {
    std::vector<int> rows;
    std::vector<int> cols;
    std::vector<double> vals;
    int d1 = 0;
    int d2 = 0;

    int nnz() const { return static_cast<int>(vals.size()); }

    /// out += Y * X and out += Y^T * X without materializing Y densely.
    void add_apply(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const;
    void add_apply_transpose(const Eigen::MatrixXd& x, Eigen::MatrixXd& out) const;

    Eigen::MatrixXd dense() const;

    /// Throws ConfigError on shape mismatch, out-of-range indices, or
    /// duplicate coordinates.
    void validate() const;
};

} // namespace lrsr
