#include "lrsr/regularizers.hpp"

#include "lrsr/errors.hpp"

#include <algorithm>
#include <cmath>

namespace lrsr {

PenaltyFamily penalty_family_from_string(const std::string& name) {
    if (name == "l1") return PenaltyFamily::L1;
    if (name == "capped" || name == "capped_l1") return PenaltyFamily::CappedL1;
    if (name == "scad") return PenaltyFamily::Scad;
    if (name == "mcp") return PenaltyFamily::Mcp;
    throw ConfigError("unknown penalty family: " + name);
}

std::string to_string(PenaltyFamily family) {
    switch (family) {
    case PenaltyFamily::L1: return "l1";
    case PenaltyFamily::CappedL1: return "capped_l1";
    case PenaltyFamily::Scad: return "scad";
    case PenaltyFamily::Mcp: return "mcp";
    }
    throw ConfigError("invalid penalty family");
}

void RegularizerSpec::validate() const {
    if (!std::isfinite(weight) || weight <= 0.0)
        throw ConfigError("regularizer weight must be positive and finite");
    switch (family) {
    case PenaltyFamily::L1:
        break; // gamma unused
    case PenaltyFamily::CappedL1:
        if (!std::isfinite(gamma) || gamma <= 0.0)
            throw ConfigError("capped-l1 cap must be positive");
        break;
    case PenaltyFamily::Scad:
        if (!std::isfinite(gamma) || gamma <= 2.0)
            throw ConfigError("scad knot must exceed 2");
        break;
    case PenaltyFamily::Mcp:
        if (!std::isfinite(gamma) || gamma <= 0.0)
            throw ConfigError("mcp knee must be positive");
        break;
    }
}

double phi(const RegularizerSpec& spec, double t) {
    spec.validate();
    if (!(t >= 0.0))
        throw std::domain_error("phi expects t >= 0");
    const double g = spec.gamma;
    double v = 0.0;
    switch (spec.family) {
    case PenaltyFamily::L1:
        v = t;
        break;
    case PenaltyFamily::CappedL1:
        v = std::min(t, 0.5 * g);
        break;
    case PenaltyFamily::Scad:
        if (t <= 1.0)
            v = t;
        else if (t <= g)
            v = (2.0 * g * t - t * t - 1.0) / (2.0 * (g - 1.0));
        else
            v = 0.5 * (g + 1.0);
        break;
    case PenaltyFamily::Mcp:
        v = t <= g ? t - t * t / (2.0 * g) : 0.5 * g;
        break;
    }
    return spec.weight * v;
}

double phi_derivative(const RegularizerSpec& spec, double t) {
    spec.validate();
    if (!(t > 0.0))
        throw std::domain_error("phi_derivative expects t > 0");
    const double g = spec.gamma;
    double d = 0.0;
    switch (spec.family) {
    case PenaltyFamily::L1:
        d = 1.0;
        break;
    case PenaltyFamily::CappedL1:
        d = t < 0.5 * g ? 1.0 : 0.0;
        break;
    case PenaltyFamily::Scad:
        if (t <= 1.0)
            d = 1.0;
        else if (t < g)
            d = (g - t) / (g - 1.0);
        else
            d = 0.0;
        break;
    case PenaltyFamily::Mcp:
        d = t < g ? 1.0 - t / g : 0.0;
        break;
    }
    return spec.weight * d;
}

double weak_convexity(const RegularizerSpec& spec) {
    spec.validate();
    switch (spec.family) {
    case PenaltyFamily::L1: return 0.0;
    case PenaltyFamily::CappedL1: return spec.weight / spec.gamma;
    case PenaltyFamily::Scad: return spec.weight / (spec.gamma - 1.0);
    case PenaltyFamily::Mcp: return spec.weight / spec.gamma;
    }
    throw ConfigError("invalid penalty family");
}

double prox_threshold(const RegularizerSpec& spec, double step) {
    spec.validate();
    if (!std::isfinite(step) || step <= 0.0)
        throw ConfigError("prox step must be positive and finite");
    return spec.weight * step;
}

namespace {

void check_prox_preconditions(const RegularizerSpec& spec, double step) {
    spec.validate();
    if (!std::isfinite(step) || step <= 0.0)
        throw ConfigError("prox step must be positive and finite");
    if (weak_convexity(spec) * step >= 1.0)
        throw ConfigError("prox step too large: objective loses strong convexity");
}

// Scalar prox for y >= 0 given the effective threshold tstar = weight * step.
// The branch formulas come from the stationarity conditions on each piece of
// the penalty; strong convexity (checked above) makes them globally valid.
double prox_nonneg(PenaltyFamily family, double gamma, double tstar, double y) {
    switch (family) {
    case PenaltyFamily::L1:
        return std::max(y - tstar, 0.0);
    case PenaltyFamily::Mcp:
        if (y <= tstar) return 0.0;
        if (y >= gamma) return y;
        return (y - tstar) * gamma / (gamma - tstar);
    case PenaltyFamily::Scad:
        if (y <= tstar) return 0.0;
        if (y <= 1.0 + tstar) return y - tstar;
        if (y < gamma)
            return ((gamma - 1.0) * y - tstar * gamma) / (gamma - 1.0 - tstar);
        return y;
    case PenaltyFamily::CappedL1: {
        const double half_cap = 0.5 * gamma;
        const double x2 = std::min(std::max(y - tstar, 0.0), half_cap);
        const double x1 = std::max(y, half_cap);
        // Compare f(x) = tstar*min(x, c/2) + (x - y)^2/2 at both branch
        // minimizers; exact ties go to the smaller magnitude x2.
        const double fdiff =
            tstar * (half_cap - x2) + 0.5 * (x1 + x2 - 2.0 * y) * (x1 - x2);
        return fdiff < 0.0 ? x1 : x2;
    }
    }
    throw ConfigError("invalid penalty family");
}

} // namespace

ProxResult prox(const RegularizerSpec& spec, double y, double step) {
    check_prox_preconditions(spec, step);
    const double tstar = spec.weight * step;
    const double mag = prox_nonneg(spec.family, spec.gamma, tstar, std::abs(y));
    ProxResult out;
    if (mag == 0.0) {
        out.value = 0.0;
        out.is_zero = true;
    } else {
        out.value = y < 0.0 ? -mag : mag;
        out.is_zero = false;
    }
    return out;
}

ProxVectorResult prox_vector(const RegularizerSpec& spec,
                             const Eigen::VectorXd& y, double step) {
    check_prox_preconditions(spec, step);
    const double tstar = spec.weight * step;
    ProxVectorResult out;
    out.values.resize(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double mag =
            prox_nonneg(spec.family, spec.gamma, tstar, std::abs(y[i]));
        if (mag == 0.0) {
            out.values[i] = 0.0;
        } else {
            out.values[i] = y[i] < 0.0 ? -mag : mag;
            out.support.push_back(static_cast<int>(i));
        }
    }
    return out;
}

} // namespace lrsr
