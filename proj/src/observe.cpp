#include "lrsr/observe.hpp"

#include "lrsr/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lrsr {

void ObservationSet::validate() const {
    if (d1 < 1 || d2 < 1)
        throw ConfigError("observation set: invalid shape");
    if (rows.size() != cols.size())
        throw ConfigError("observation set: row/col length mismatch");
    if (b.size() != static_cast<Eigen::Index>(rows.size()))
        throw ConfigError("observation set: measurement length mismatch");
    for (size_t k = 0; k < rows.size(); ++k) {
        if (rows[k] < 0 || rows[k] >= d1 || cols[k] < 0 || cols[k] >= d2)
            throw ConfigError("observation set: index out of range");
    }
    switch (kind) {
    case ObservationKind::EntrySampling:
        if (sparse_dim != 0)
            throw ConfigError("entry sampling carries no sparse component");
        break;
    case ObservationKind::Identity:
        if (sparse_dim != n())
            throw ConfigError("identity sparse map requires d_s = n");
        break;
    case ObservationKind::GenericDense:
        if (sparse_dim < 1)
            throw ConfigError("dense sparse map requires d_s >= 1");
        if (dense_as.rows() != n() || dense_as.cols() != sparse_dim)
            throw ConfigError("dense sparse map has wrong shape");
        break;
    }
}

ObservationSet ObservationSet::entry_sampling(int d1, int d2,
                                              std::vector<int> rows,
                                              std::vector<int> cols,
                                              Eigen::VectorXd b) {
    ObservationSet o;
    o.kind = ObservationKind::EntrySampling;
    o.d1 = d1;
    o.d2 = d2;
    o.rows = std::move(rows);
    o.cols = std::move(cols);
    o.b = std::move(b);
    o.sparse_dim = 0;
    o.validate();
    return o;
}

ObservationSet ObservationSet::identity(int d1, int d2, std::vector<int> rows,
                                        std::vector<int> cols,
                                        Eigen::VectorXd b) {
    ObservationSet o;
    o.kind = ObservationKind::Identity;
    o.d1 = d1;
    o.d2 = d2;
    o.rows = std::move(rows);
    o.cols = std::move(cols);
    o.b = std::move(b);
    o.sparse_dim = o.n();
    o.validate();
    return o;
}

ObservationSet ObservationSet::generic_dense(int d1, int d2,
                                             std::vector<int> rows,
                                             std::vector<int> cols,
                                             Eigen::VectorXd b,
                                             Eigen::MatrixXd dense_as) {
    ObservationSet o;
    o.kind = ObservationKind::GenericDense;
    o.d1 = d1;
    o.d2 = d2;
    o.rows = std::move(rows);
    o.cols = std::move(cols);
    o.b = std::move(b);
    o.sparse_dim = static_cast<int>(dense_as.cols());
    o.dense_as = std::move(dense_as);
    o.validate();
    return o;
}

namespace {

void check_sparse_arg(const ObservationSet& obs, const Eigen::VectorXd& s) {
    if (s.size() != obs.sparse_dim)
        throw ConfigError("sparse component has wrong dimension");
}

void add_sparse_forward(const ObservationSet& obs, const Eigen::VectorXd& s,
                        Eigen::VectorXd& out) {
    switch (obs.kind) {
    case ObservationKind::EntrySampling:
        break;
    case ObservationKind::Identity:
        out += s;
        break;
    case ObservationKind::GenericDense:
        out.noalias() += obs.dense_as * s;
        break;
    }
}

} // namespace

Eigen::VectorXd apply_model(const ObservationSet& obs, const LowRankFactors& l,
                            const Eigen::VectorXd& s) {
    if (l.rows() != obs.d1 || l.cols() != obs.d2)
        throw ConfigError("apply_model: factor shape mismatch");
    check_sparse_arg(obs, s);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(obs.n());
    if (l.rank() > 0) {
        const Eigen::MatrixXd us = l.U * l.S.asDiagonal();
        for (int k = 0; k < obs.n(); ++k)
            out[k] = us.row(obs.rows[k]).dot(l.V.row(obs.cols[k]));
    }
    add_sparse_forward(obs, s, out);
    return out;
}

Eigen::VectorXd apply_model(const ObservationSet& obs, const Eigen::MatrixXd& l,
                            const Eigen::VectorXd& s) {
    if (l.rows() != obs.d1 || l.cols() != obs.d2)
        throw ConfigError("apply_model: matrix shape mismatch");
    check_sparse_arg(obs, s);
    Eigen::VectorXd out(obs.n());
    for (int k = 0; k < obs.n(); ++k)
        out[k] = l(obs.rows[k], obs.cols[k]);
    add_sparse_forward(obs, s, out);
    return out;
}

AdjointResult adjoint(const ObservationSet& obs,
                      const Eigen::VectorXd& residual) {
    if (residual.size() != obs.n())
        throw ConfigError("adjoint: residual length mismatch");
    AdjointResult out;
    out.low_rank_part.rows = obs.rows;
    out.low_rank_part.cols = obs.cols;
    out.low_rank_part.vals.assign(residual.data(),
                                  residual.data() + residual.size());
    out.low_rank_part.d1 = obs.d1;
    out.low_rank_part.d2 = obs.d2;
    switch (obs.kind) {
    case ObservationKind::EntrySampling:
        out.sparse_part = Eigen::VectorXd::Zero(0);
        break;
    case ObservationKind::Identity:
        out.sparse_part = residual;
        break;
    case ObservationKind::GenericDense:
        out.sparse_part = obs.dense_as.transpose() * residual;
        break;
    }
    return out;
}

Eigen::MatrixXd project_tangent(const TangentSpace& t,
                                const Eigen::MatrixXd& x) {
    if (t.U.rows() != x.rows() || t.V.rows() != x.cols())
        throw ConfigError("project_tangent: shape mismatch");
    if (t.U.cols() == 0 && t.V.cols() == 0)
        return Eigen::MatrixXd::Zero(x.rows(), x.cols());
    Eigen::MatrixXd out = t.U * (t.U.transpose() * x);
    const Eigen::MatrixXd rest = x - out;
    out.noalias() += (rest * t.V) * t.V.transpose();
    return out;
}

Eigen::VectorXd project_support(const std::vector<int>& omega,
                                const Eigen::VectorXd& x) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
    for (int i : omega) {
        if (i < 0 || i >= x.size())
            throw ConfigError("project_support: index out of range");
        out[i] = x[i];
    }
    return out;
}

double incoherence(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
    const int r = static_cast<int>(u.cols());
    if (r == 0)
        return 0.0;
    if (v.cols() != r)
        throw ConfigError("incoherence: rank mismatch");
    const double mu_u =
        u.rowwise().squaredNorm().maxCoeff() * static_cast<double>(u.rows()) / r;
    const double mu_v =
        v.rowwise().squaredNorm().maxCoeff() * static_cast<double>(v.rows()) / r;
    return std::max(mu_u, mu_v);
}

double incoherence(const LowRankFactors& lr) { return incoherence(lr.U, lr.V); }

namespace {

constexpr int kPowerIters = 200;
constexpr double kPowerTol = 1e-9;

// Power iteration for a self-adjoint PSD-or-indefinite operator given as a
// callback on a flat coefficient vector; returns |lambda|_max.
template <typename Op>
double operator_norm(Op&& op, int dim, int trials, std::uint64_t seed) {
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        std::mt19937_64 rng(seed + 0x1000193u * static_cast<std::uint64_t>(t));
        std::normal_distribution<double> gauss(0.0, 1.0);
        Eigen::VectorXd x(dim);
        for (int i = 0; i < dim; ++i)
            x[i] = gauss(rng);
        const double nx = x.norm();
        if (nx == 0.0)
            continue;
        x /= nx;
        double prev = 0.0;
        for (int it = 0; it < kPowerIters; ++it) {
            Eigen::VectorXd w = op(x);
            const double nw = w.norm();
            if (nw < 1e-300) {
                prev = 0.0;
                break;
            }
            x = w / nw;
            if (std::abs(nw - prev) <= kPowerTol * std::max(nw, 1.0)) {
                prev = nw;
                break;
            }
            prev = nw;
        }
        best = std::max(best, prev);
    }
    return best;
}

} // namespace

double estimate_rip(const ObservationSet& obs, const TangentSpace& t,
                    int trials, std::uint64_t seed) {
    obs.validate();
    if (obs.n() == 0)
        throw ConfigError("estimate_rip: empty observation set");
    const int d1 = obs.d1;
    const int d2 = obs.d2;
    const double scale = static_cast<double>(d1) * d2 / obs.n();
    auto op = [&](const Eigen::VectorXd& flat) {
        const Eigen::Map<const Eigen::MatrixXd> x(flat.data(), d1, d2);
        const Eigen::MatrixXd px = project_tangent(t, x);
        Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(d1, d2);
        for (int k = 0; k < obs.n(); ++k) {
            const auto i = obs.rows[k];
            const auto j = obs.cols[k];
            masked(i, j) += px(i, j);
        }
        Eigen::MatrixXd out = scale * project_tangent(t, masked) - px;
        return Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(out.data(), d1 * d2));
    };
    return operator_norm(op, d1 * d2, trials, seed);
}

double estimate_rip_sparse(const ObservationSet& obs,
                           const std::vector<int>& omega, int trials,
                           std::uint64_t seed) {
    obs.validate();
    if (obs.sparse_dim == 0)
        return 0.0;
    const double scale = static_cast<double>(obs.sparse_dim) / obs.n();
    auto op = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd px = project_support(omega, x);
        Eigen::VectorXd asx(obs.n());
        if (obs.kind == ObservationKind::Identity)
            asx = px;
        else
            asx.noalias() = obs.dense_as * px;
        Eigen::VectorXd back(obs.sparse_dim);
        if (obs.kind == ObservationKind::Identity)
            back = asx;
        else
            back.noalias() = obs.dense_as.transpose() * asx;
        return Eigen::VectorXd(scale * project_support(omega, back) - px);
    };
    return operator_norm(op, obs.sparse_dim, trials, seed);
}

double estimate_rop(const ObservationSet& obs, const TangentSpace& t,
                    const std::vector<int>& omega, int trials,
                    std::uint64_t seed) {
    obs.validate();
    if (obs.sparse_dim == 0)
        return 0.0;
    const int d1 = obs.d1;
    const int d2 = obs.d2;
    // Norm of B: s -> P_T(scatter(A_s P_Omega s)) via power iteration on B*B.
    auto op = [&](const Eigen::VectorXd& x) {
        const Eigen::VectorXd px = project_support(omega, x);
        Eigen::VectorXd asx(obs.n());
        if (obs.kind == ObservationKind::Identity)
            asx = px;
        else
            asx.noalias() = obs.dense_as * px;
        Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d1, d2);
        for (int k = 0; k < obs.n(); ++k)
            scatter(obs.rows[k], obs.cols[k]) += asx[k];
        const Eigen::MatrixXd pt = project_tangent(t, scatter);
        Eigen::VectorXd gathered(obs.n());
        for (int k = 0; k < obs.n(); ++k)
            gathered[k] = pt(obs.rows[k], obs.cols[k]);
        Eigen::VectorXd back(obs.sparse_dim);
        if (obs.kind == ObservationKind::Identity)
            back = gathered;
        else
            back.noalias() = obs.dense_as.transpose() * gathered;
        return Eigen::VectorXd(project_support(omega, back));
    };
    const double sq = operator_norm(op, obs.sparse_dim, trials, seed);
    const double opnorm = std::sqrt(std::max(sq, 0.0));
    const double scale_l = std::sqrt(static_cast<double>(d1) * d2 / obs.n());
    const double scale_s = std::sqrt(static_cast<double>(obs.sparse_dim) / obs.n());
    return std::max(scale_l, scale_s) * opnorm;
}

double tangent_support_norm(const TangentSpace& t, const std::vector<int>& rows,
                            const std::vector<int>& cols, int trials,
                            std::uint64_t seed) {
    if (rows.size() != cols.size())
        throw ConfigError("tangent_support_norm: index length mismatch");
    const int d1 = static_cast<int>(t.U.rows());
    const int d2 = static_cast<int>(t.V.rows());
    const int m = static_cast<int>(rows.size());
    if (m == 0)
        return 0.0;
    // Coefficients live on the support cells; apply P_Omega P_T P_Omega.
    auto op = [&](const Eigen::VectorXd& x) {
        Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d1, d2);
        for (int k = 0; k < m; ++k)
            scatter(rows[k], cols[k]) += x[k];
        const Eigen::MatrixXd pt = project_tangent(t, scatter);
        Eigen::VectorXd out(m);
        for (int k = 0; k < m; ++k)
            out[k] = pt(rows[k], cols[k]);
        return out;
    };
    const double sq = operator_norm(op, m, trials, seed);
    return std::sqrt(std::max(sq, 0.0));
}

double alpha_sparsity(const SparsePerturbation& s) {
    s.validate();
    if (s.nnz() == 0)
        return 0.0;
    std::vector<int> row_counts(s.d1, 0);
    std::vector<int> col_counts(s.d2, 0);
    for (int k = 0; k < s.nnz(); ++k) {
        ++row_counts[s.rows[k]];
        ++col_counts[s.cols[k]];
    }
    const double row_max = *std::max_element(row_counts.begin(), row_counts.end());
    const double col_max = *std::max_element(col_counts.begin(), col_counts.end());
    return std::max(row_max / s.d2, col_max / s.d1);
}

DiagnosticsReport diagnose(const ObservationSet& obs, const LowRankFactors& lr,
                           const std::vector<int>& omega) {
    DiagnosticsReport rep;
    const TangentSpace t = TangentSpace::of(lr);
    rep.mu = incoherence(lr);
    rep.kappa_l = estimate_rip(obs, t);
    rep.kappa_s = estimate_rip_sparse(obs, omega);
    rep.kappa_cross = estimate_rop(obs, t, omega);
    SparsePerturbation pattern;
    pattern.d1 = obs.d1;
    pattern.d2 = obs.d2;
    for (int k : omega) {
        if (k < 0 || k >= obs.sparse_dim)
            throw ConfigError("diagnose: support index out of range");
        if (obs.kind == ObservationKind::Identity) {
            pattern.rows.push_back(obs.rows[k]);
            pattern.cols.push_back(obs.cols[k]);
            pattern.vals.push_back(1.0);
        }
    }
    rep.alpha = pattern.nnz() > 0 ? alpha_sparsity(pattern) : 0.0;
    return rep;
}

} // namespace lrsr
