#pragma once

#include "lrsr/low_rank.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace testutil {

inline Eigen::MatrixXd random_orthonormal(int n, int r, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd g(n, r);
    for (Eigen::Index i = 0; i < g.size(); ++i)
        g.data()[i] = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
}

inline lrsr::LowRankFactors make_factors(int d1, int d2,
                                         std::vector<double> values,
                                         std::uint64_t seed) {
    std::sort(values.begin(), values.end(), std::greater<>());
    std::mt19937_64 rng(seed);
    lrsr::LowRankFactors lr;
    const int r = static_cast<int>(values.size());
    lr.U = random_orthonormal(d1, r, rng);
    lr.V = random_orthonormal(d2, r, rng);
    lr.S = Eigen::Map<Eigen::VectorXd>(values.data(), r);
    return lr;
}

inline lrsr::SparsePerturbation random_sparse(int d1, int d2, int nnz,
                                              double scale,
                                              std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    std::vector<int> flat(static_cast<size_t>(d1) * d2);
    std::iota(flat.begin(), flat.end(), 0);
    std::shuffle(flat.begin(), flat.end(), rng);
    lrsr::SparsePerturbation y;
    y.d1 = d1;
    y.d2 = d2;
    for (int k = 0; k < nnz; ++k) {
        y.rows.push_back(flat[k] / d2);
        y.cols.push_back(flat[k] % d2);
        y.vals.push_back(gauss(rng));
    }
    return y;
}

inline lrsr::LowRankFactors factors_from_dense(const Eigen::MatrixXd& m,
                                               int r) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU |
                                              Eigen::ComputeThinV);
    lrsr::LowRankFactors lr;
    lr.U = svd.matrixU().leftCols(r);
    lr.S = svd.singularValues().head(r);
    lr.V = svd.matrixV().leftCols(r);
    return lr;
}

inline Eigen::MatrixXd random_dense(int d1, int d2, double scale,
                                    std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    Eigen::MatrixXd m(d1, d2);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = gauss(rng);
    return m;
}

} // namespace testutil
