#include "lrsr/spectral.hpp"

#include "lrsr/errors.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>

namespace lrsr {

namespace {

Eigen::MatrixXd thin_q(const Eigen::MatrixXd& a) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return qr.householderQ() *
           Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

void fix_signs(Eigen::MatrixXd& u, Eigen::MatrixXd& v) {
    for (Eigen::Index k = 0; k < u.cols(); ++k) {
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            if (u(i, k) != 0.0) {
                if (u(i, k) < 0.0) {
                    u.col(k) = -u.col(k);
                    v.col(k) = -v.col(k);
                }
                break;
            }
        }
    }
}

} // namespace

LrssvdResult lrssvd(const LowRankFactors& lr, const SparsePerturbation& y,
                    int r0, int inner_iters, double tol, std::uint64_t seed,
                    double value_floor) {
    const int d1 = lr.rows();
    const int d2 = lr.cols();
    if (y.nnz() > 0 || y.d1 > 0) {
        if (y.d1 != d1 || y.d2 != d2)
            throw ConfigError("lrssvd: perturbation shape mismatch");
    }
    if (r0 < 1)
        throw ConfigError("lrssvd: rank cap must be at least 1");
    if (inner_iters < 1)
        throw ConfigError("lrssvd: need at least one sweep");
    r0 = std::min(r0, std::min(d1, d2));

    LrssvdResult out;
    if (lr.rank() == 0 && y.nnz() == 0) {
        out.factors = LowRankFactors::zero(d1, d2);
        out.converged = true;
        return out;
    }

    const int r = lr.rank();
    auto mul = [&](const Eigen::MatrixXd& x) {
        Eigen::MatrixXd prod = Eigen::MatrixXd::Zero(d1, x.cols());
        if (r > 0)
            prod.noalias() =
                lr.U * (lr.S.asDiagonal() * (lr.V.transpose() * x));
        y.add_apply(x, prod);
        return prod;
    };
    auto mul_t = [&](const Eigen::MatrixXd& x) {
        Eigen::MatrixXd prod = Eigen::MatrixXd::Zero(d2, x.cols());
        if (r > 0)
            prod.noalias() =
                lr.V * (lr.S.asDiagonal() * (lr.U.transpose() * x));
        y.add_apply_transpose(x, prod);
        return prod;
    };

    // Warm start from the previous right factor, padding to r0 with seeded
    // Gaussian columns when the incoming rank is short.
    Eigen::MatrixXd vt(d2, r0);
    const int have = std::min(r, r0);
    if (have > 0)
        vt.leftCols(have) = lr.V.leftCols(have);
    if (have < r0) {
        std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
        std::normal_distribution<double> gauss(0.0, 1.0);
        for (int j = have; j < r0; ++j)
            for (int i = 0; i < d2; ++i)
                vt(i, j) = gauss(rng);
    }
    vt = thin_q(vt);

    LowRankFactors best;
    double best_res = std::numeric_limits<double>::infinity();
    bool converged = false;
    int sweeps = 0;
    const int budget = 12 * inner_iters + 24;

    Eigen::MatrixXd mu = mul(vt);
    for (int sweep = 1; sweep <= budget; ++sweep) {
        sweeps = sweep;
        if (mu.norm() == 0.0) {
            best = LowRankFactors::zero(d1, d2);
            best_res = 0.0;
            converged = true;
            break;
        }
        const Eigen::MatrixXd qu = thin_q(mu);
        const Eigen::MatrixXd z = mul_t(qu);
        Eigen::HouseholderQR<Eigen::MatrixXd> qrz(z);
        const Eigen::MatrixXd qv =
            qrz.householderQ() * Eigen::MatrixXd::Identity(d2, r0);
        const Eigen::MatrixXd rv = qrz.matrixQR()
                                       .topRows(r0)
                                       .triangularView<Eigen::Upper>();

        // Q_U^T M Q_V = R_V^T, so the small SVD finishes the factorization
        // with M^T U = V diag(S) holding exactly. The honest certificate is
        // the other side, M V = U diag(S), and the multiply it needs doubles
        // as the next sweep's input.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(
            rv.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd s = svd.singularValues();
        Eigen::MatrixXd u_full = qu * svd.matrixU();
        Eigen::MatrixXd v_full = qv * svd.matrixV();
        Eigen::MatrixXd mu_next = mul(v_full);

        // Columns destined to be zeroed by a downstream threshold do not
        // need to converge; value_floor == 0 keeps every column live.
        int live = r0;
        if (value_floor > 0.0) {
            live = 0;
            while (live < r0 && s(live) >= value_floor)
                ++live;
        }
        double res = 0.0;
        if (live > 0) {
            const double snorm = s.head(live).norm();
            if (snorm > 0.0)
                res = (mu_next.leftCols(live) -
                       u_full.leftCols(live) * s.head(live).asDiagonal())
                          .norm() /
                      snorm;
        }

        if (res < best_res) {
            best_res = res;
            best.U = std::move(u_full);
            best.S = s;
            best.V = std::move(v_full);
        }
        if (res <= tol && sweep >= inner_iters) {
            converged = true;
            break;
        }
        mu = std::move(mu_next);
    }

    if (best.rank() > 0)
        fix_signs(best.U, best.V);
    out.factors = std::move(best);
    out.converged = converged;
    out.sweeps = sweeps;
    out.residual = best_res;
    return out;
}

LowRankFactors spectral_prox(const LowRankFactors& lr,
                             const RegularizerSpec& spec, double tau_lambda) {
    spec.validate();
    if (!std::isfinite(tau_lambda) || tau_lambda <= 0.0)
        throw ConfigError("spectral_prox: step must be positive");
    if (weak_convexity(spec) * tau_lambda >= 1.0)
        throw ConfigError("spectral_prox: step too large for strong convexity");

    const int r = lr.rank();
    Eigen::VectorXd s(r);
    int keep = 0;
    for (int k = 0; k < r; ++k) {
        const ProxResult p = prox(spec, lr.S[k], tau_lambda);
        s[k] = p.value;
        if (!p.is_zero)
            keep = k + 1; // prox is monotone, zeros form the tail
    }
    LowRankFactors out;
    out.U = lr.U.leftCols(keep);
    out.S = s.head(keep);
    out.V = lr.V.leftCols(keep);
    return out;
}

int lazy_rank_truncation(std::span<const double> singular_values,
                         double threshold) {
    int count = 0;
    for (double v : singular_values) {
        if (v >= threshold)
            ++count;
        else
            break;
    }
    return count;
}

} // namespace lrsr
