#pragma once

#include <Eigen/Core>

#include <span>
#include <string>
#include <vector>

namespace lrsr {

enum class PenaltyFamily { L1, CappedL1, Scad, Mcp };

PenaltyFamily penalty_family_from_string(const std::string& name);
std::string to_string(PenaltyFamily family);

/// A scalar sparsity penalty, stored unit-normalized: phi(0) = 0, phi is
/// nondecreasing on [0, inf), phi(t)/t is nonincreasing, and the slope at 0+
/// is exactly 1. Nonconvex members flatten past a shape parameter, which is
/// what removes the shrinkage bias of plain l1.
///
/// `gamma` is the family's shape parameter:
///   - Mcp:      the knee; phi(t) = t - t^2/(2 gamma) below it, gamma/2 above.
///   - Scad:     the outer knot alpha (> 2); the penalty is linear on [0,1],
///               quadratic on [1, alpha], constant (alpha+1)/2 beyond.
///   - CappedL1: the cap c; phi(t) = min(t, c/2).
///   - L1:       unused.
/// `weight` is the lambda multiplier applied outside the unit penalty.
struct RegularizerSpec {
    PenaltyFamily family = PenaltyFamily::L1;
    double gamma = 1.0;
    double weight = 1.0;

    /// Throws ConfigError on out-of-range parameters (e.g. SCAD knot <= 2).
    void validate() const;
};

struct ProxResult {
    double value = 0.0;
    bool is_zero = true; // true iff value is exactly +0.0
};

struct ProxVectorResult {
    Eigen::VectorXd values;
    std::vector<int> support; // indices of nonzero outputs, ascending
};

/// Penalty value weight * phi_gamma(t); requires t >= 0.
double phi(const RegularizerSpec& spec, double t);

/// One-sided derivative weight * phi_gamma'(t) for t > 0. Exactly zero past
/// the flat region of MCP/SCAD/capped-l1; throws std::domain_error for t <= 0.
double phi_derivative(const RegularizerSpec& spec, double t);

/// Weak-convexity constant of the weighted penalty: the smallest nu with
/// weight*phi_gamma(t) + (nu/2) t^2 convex. L1 gives 0, MCP weight/knee,
/// SCAD weight/(alpha - 1). Capped-l1 has a genuine kink; the effective
/// constant weight/c is what the prox precondition checks.
double weak_convexity(const RegularizerSpec& spec);

/// Inputs with |y| at or below this threshold prox to exactly zero.
double prox_threshold(const RegularizerSpec& spec, double step);

/// Minimizer of weight*phi_gamma(|x|) + (x - y)^2 / (2 step). `step` is the
/// combined tau*lambda step of the solver updates; requires
/// weak_convexity(spec) * step < 1 so the objective is strongly convex.
/// Odd in y; ties (capped-l1 only) resolve to the smaller magnitude.
ProxResult prox(const RegularizerSpec& spec, double y, double step);

/// Elementwise prox over a vector, reporting the output support.
ProxVectorResult prox_vector(const RegularizerSpec& spec,
                             const Eigen::VectorXd& y, double step);

} // namespace lrsr
