#include "lrsr/low_rank.hpp"

#include "lrsr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lrsr {

LowRankFactors LowRankFactors::zero(int d1, int d2) {
    if (d1 < 1 || d2 < 1)
        throw ConfigError("matrix dimensions must be positive");
    LowRankFactors f;
    f.U = Eigen::MatrixXd::Zero(d1, 0);
    f.S = Eigen::VectorXd::Zero(0);
    f.V = Eigen::MatrixXd::Zero(d2, 0);
    return f;
}

double LowRankFactors::entry(int i, int j) const {
    double v = 0.0;
    for (int k = 0; k < rank(); ++k)
        v += U(i, k) * S[k] * V(j, k);
    return v;
}

Eigen::MatrixXd LowRankFactors::dense() const {
    if (rank() == 0)
        return Eigen::MatrixXd::Zero(rows(), cols());
    return U * S.asDiagonal() * V.transpose();
}

void LowRankFactors::validate(double tol) const {
    if (U.cols() != S.size() || V.cols() != S.size())
        throw ConfigError("factor rank mismatch between U, S, V");
    const int r = rank();
    if (r == 0)
        return;
    for (int k = 0; k < r; ++k) {
        if (!(S[k] >= 0.0) || !std::isfinite(S[k]))
            throw ConfigError("singular values must be finite and nonnegative");
        if (k > 0 && S[k] > S[k - 1] + tol)
            throw ConfigError("singular values must be nonincreasing");
    }
    const Eigen::MatrixXd iu =
        U.transpose() * U - Eigen::MatrixXd::Identity(r, r);
    const Eigen::MatrixXd iv =
        V.transpose() * V - Eigen::MatrixXd::Identity(r, r);
    if (iu.norm() > tol || iv.norm() > tol)
        throw ConfigError("factor columns are not orthonormal");
}

double inner(const LowRankFactors& a, const LowRankFactors& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ConfigError("inner: shape mismatch");
    if (a.rank() == 0 || b.rank() == 0)
        return 0.0;
    const Eigen::MatrixXd mu = a.U.transpose() * b.U; // ra x rb
    const Eigen::MatrixXd mv = a.V.transpose() * b.V; // ra x rb
    return (mu * b.S.asDiagonal() * mv.transpose() * a.S.asDiagonal()).trace();
}

double frob_distance(const LowRankFactors& a, const LowRankFactors& b) {
    const double sq = a.S.squaredNorm() + b.S.squaredNorm() - 2.0 * inner(a, b);
    return std::sqrt(std::max(sq, 0.0));
}

void SparsePerturbation::add_apply(const Eigen::MatrixXd& x,
                                   Eigen::MatrixXd& out) const {
    for (int k = 0; k < nnz(); ++k)
        out.row(rows[k]) += vals[k] * x.row(cols[k]);
}

void SparsePerturbation::add_apply_transpose(const Eigen::MatrixXd& x,
                                             Eigen::MatrixXd& out) const {
    for (int k = 0; k < nnz(); ++k)
        out.row(cols[k]) += vals[k] * x.row(rows[k]);
}

Eigen::MatrixXd SparsePerturbation::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(d1, d2);
    for (int k = 0; k < nnz(); ++k)
        m(rows[k], cols[k]) += vals[k];
    return m;
}

void SparsePerturbation::validate() const {
    if (rows.size() != vals.size() || cols.size() != vals.size())
        throw ConfigError("sparse perturbation: index/value length mismatch");
    if (d1 < 1 || d2 < 1)
        throw ConfigError("sparse perturbation: invalid shape");
    for (int k = 0; k < nnz(); ++k) {
        if (rows[k] < 0 || rows[k] >= d1 || cols[k] < 0 || cols[k] >= d2)
            throw ConfigError("sparse perturbation: index out of range");
        if (!std::isfinite(vals[k]))
            throw ConfigError("sparse perturbation: non-finite value");
    }
    std::vector<std::pair<int, int>> seen;
    seen.reserve(vals.size());
    for (int k = 0; k < nnz(); ++k)
        seen.emplace_back(rows[k], cols[k]);
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw ConfigError("sparse perturbation: duplicate coordinate");
}

} // namespace lrsr
