#pragma once

#include "lrsr/low_rank.hpp"
#include "lrsr/regularizers.hpp"

#include <cstdint>
#include <span>

namespace lrsr {

struct LrssvdResult {
    LowRankFactors factors;
    bool converged = false;
    int sweeps = 0;
    double residual = 0.0; // ||M V - U diag(S)||_F / ||S||, floor-restricted
};

/// Rank-r0 truncated SVD of M = U diag(S) V^T + Y without forming M densely.
/// Block power sweeps warm-started from the previous V, finished by a small
/// QR + SVD step; each sweep costs O((d1 + d2) r0^2 + nnz(Y) r0). Columns are
/// sign-fixed so the first nonzero entry of each left singular vector is
/// nonnegative.
///
/// Runs at least `inner_iters` sweeps and keeps sweeping (up to a budget of
/// 12 * inner_iters + 24) until the residual ||M V - U diag(S)||_F / ||S||
/// drops below `tol`. The other certificate, M^T U = V diag(S), holds by
/// construction of the finishing step. With `value_floor > 0` the residual
/// only counts columns whose singular value reaches the floor; callers that
/// threshold the spectrum afterwards can ignore the flat tail this way.
/// Non-convergence within the budget is reported, not thrown; the best
/// iterate is returned either way.
LrssvdResult lrssvd(const LowRankFactors& lr, const SparsePerturbation& y,
                    int r0, int inner_iters = 3, double tol = 1e-10,
                    std::uint64_t seed = 0, double value_floor = 0.0);

/// Prox of the spectrum-summed penalty at the given combined step: keeps the
/// singular vectors, runs the scalar prox over each singular value, and drops
/// the zeros. Requires weak_convexity(spec) * tau_lambda < 1.
LowRankFactors spectral_prox(const LowRankFactors& lr,
                             const RegularizerSpec& spec, double tau_lambda);

/// Count of leading values >= threshold in a nonincreasing stream; downstream
/// prox work can skip everything past the returned prefix.
int lazy_rank_truncation(std::span<const double> singular_values,
                         double threshold);

} // namespace lrsr
