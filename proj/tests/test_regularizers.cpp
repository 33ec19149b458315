#include <doctest.h>

#include "lrsr/errors.hpp"
#include "lrsr/regularizers.hpp"
#include "oracles.hpp"

#include <cmath>
#include <random>

using namespace lrsr;

namespace {

RegularizerSpec make(PenaltyFamily f, double gamma, double weight) {
    RegularizerSpec s;
    s.family = f;
    s.gamma = gamma;
    s.weight = weight;
    return s;
}

oracle::Family mirror(PenaltyFamily f) {
    switch (f) {
    case PenaltyFamily::L1: return oracle::Family::L1;
    case PenaltyFamily::CappedL1: return oracle::Family::CappedL1;
    case PenaltyFamily::Scad: return oracle::Family::Scad;
    case PenaltyFamily::Mcp: return oracle::Family::Mcp;
    }
    return oracle::Family::L1;
}

const PenaltyFamily kFamilies[] = {PenaltyFamily::L1, PenaltyFamily::CappedL1,
                                   PenaltyFamily::Scad, PenaltyFamily::Mcp};

// A representative spec per family for the grid-property checks.
RegularizerSpec canonical(PenaltyFamily f) {
    switch (f) {
    case PenaltyFamily::L1: return make(f, 1.0, 1.0);
    case PenaltyFamily::CappedL1: return make(f, 3.0, 1.0);
    case PenaltyFamily::Scad: return make(f, 3.7, 1.0);
    case PenaltyFamily::Mcp: return make(f, 2.0, 1.0);
    }
    return make(f, 1.0, 1.0);
}

} // namespace

TEST_CASE("penalty values at pinned points") {
    CHECK(phi(make(PenaltyFamily::L1, 1.0, 1.0), 0.7) == doctest::Approx(0.7));
    CHECK(phi(make(PenaltyFamily::Mcp, 1.0, 1.0), 2.0) == doctest::Approx(0.5));
    CHECK(phi(make(PenaltyFamily::CappedL1, 1.0, 1.0), 0.3) ==
          doctest::Approx(0.3));
    CHECK(phi(make(PenaltyFamily::CappedL1, 1.0, 1.0), 5.0) ==
          doctest::Approx(0.5));
    // Weight scales the whole penalty.
    CHECK(phi(make(PenaltyFamily::Mcp, 1.0, 2.5), 2.0) ==
          doctest::Approx(1.25));
}

TEST_CASE("penalty derivatives at pinned points") {
    CHECK(phi_derivative(make(PenaltyFamily::L1, 1.0, 1.0), 3.2) == 1.0);
    CHECK(phi_derivative(make(PenaltyFamily::Mcp, 1.0, 1.0), 2.0) == 0.0);

    const RegularizerSpec scad = make(PenaltyFamily::Scad, 3.7, 1.0);
    for (double t : {1.2, 2.0, 3.0, 3.5}) {
        CAPTURE(t);
        CHECK(std::abs(phi_derivative(scad, t) - (3.7 - t) / 2.7) < 1e-12);
    }

    CHECK_THROWS_AS(phi_derivative(scad, 0.0), std::domain_error);
    CHECK_THROWS_AS(phi_derivative(scad, -1.0), std::domain_error);
}

TEST_CASE("spec validation rejects out-of-range shapes") {
    CHECK_THROWS_AS(make(PenaltyFamily::Scad, 2.0, 1.0).validate(),
                    ConfigError);
    CHECK_THROWS_AS(make(PenaltyFamily::Mcp, 0.0, 1.0).validate(), ConfigError);
    CHECK_THROWS_AS(make(PenaltyFamily::Mcp, 1.0, -1.0).validate(),
                    ConfigError);
    CHECK_NOTHROW(make(PenaltyFamily::Scad, 2.1, 1.0).validate());
}

TEST_CASE("penalty axioms on a log grid") {
    // t = 0 anchor, monotone growth, nonincreasing phi(t)/t, unit slope at 0+.
    for (PenaltyFamily f : kFamilies) {
        const RegularizerSpec spec = canonical(f);
        CAPTURE(to_string(f));
        CHECK(phi(spec, 0.0) == 0.0);
        double prev_t = 0.0;
        double prev_phi = 0.0;
        double prev_ratio = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 240; ++i) {
            const double t = std::pow(10.0, -8.0 + 12.0 * i / 240.0);
            const double v = phi(spec, t);
            CAPTURE(t);
            CHECK(v >= prev_phi - 1e-15);
            const double ratio = v / t;
            CHECK(ratio <= prev_ratio * (1.0 + 1e-12));
            prev_t = t;
            prev_phi = v;
            prev_ratio = ratio;
        }
        (void)prev_t;
        CHECK(phi(spec, 1e-8) / 1e-8 == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("derivative matches finite differences away from kinks") {
    for (PenaltyFamily f : kFamilies) {
        const RegularizerSpec spec = canonical(f);
        std::vector<double> kinks;
        switch (f) {
        case PenaltyFamily::L1: break;
        case PenaltyFamily::CappedL1: kinks = {spec.gamma / 2.0}; break;
        case PenaltyFamily::Scad: kinks = {1.0, spec.gamma}; break;
        case PenaltyFamily::Mcp: kinks = {spec.gamma}; break;
        }
        for (int i = 0; i <= 240; ++i) {
            const double t = std::pow(10.0, -8.0 + 12.0 * i / 240.0);
            bool near_kink = false;
            for (double k : kinks)
                near_kink = near_kink || std::abs(t - k) < 1e-3 * k;
            if (near_kink)
                continue;
            const double h = 1e-6 * t;
            const double fd = (phi(spec, t + h) - phi(spec, t - h)) / (2.0 * h);
            const double d = phi_derivative(spec, t);
            CAPTURE(to_string(f));
            CAPTURE(t);
            CHECK(std::abs(fd - d) <= 1e-5 * std::max(std::abs(d), 1e-8));
        }
    }
}

TEST_CASE("weak convexity constants") {
    CHECK(weak_convexity(make(PenaltyFamily::L1, 1.0, 1.0)) == 0.0);
    CHECK(weak_convexity(make(PenaltyFamily::Mcp, 2.0, 3.0)) ==
          doctest::Approx(1.5));
    CHECK(weak_convexity(make(PenaltyFamily::Scad, 3.7, 1.0)) ==
          doctest::Approx(1.0 / 2.7));
    CHECK(weak_convexity(make(PenaltyFamily::CappedL1, 4.0, 2.0)) ==
          doctest::Approx(0.5));
}

TEST_CASE("prox at pinned points") {
    const RegularizerSpec l1 = make(PenaltyFamily::L1, 1.0, 1.0);
    ProxResult r = prox(l1, 1.5, 0.5);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK_FALSE(r.is_zero);
    r = prox(l1, 0.3, 0.5);
    CHECK(r.value == 0.0);
    CHECK(r.is_zero);

    const RegularizerSpec mcp = make(PenaltyFamily::Mcp, 1.0, 1.0);
    CHECK(prox(mcp, 0.0, 0.5).is_zero);
    // Firm-threshold interior point, the dead zone, and the identity region,
    // each pinned by the 1D search oracle.
    for (double y : {0.75, 0.4, 2.0}) {
        const double want =
            oracle::prox_1d(oracle::Family::Mcp, 1.0, 1.0, y, 0.5);
        CAPTURE(y);
        CHECK(std::abs(prox(mcp, y, 0.5).value - want) <= 1e-8);
    }
    CHECK(prox(mcp, 0.75, 0.5).value == doctest::Approx(0.5));
    CHECK(prox(mcp, 0.4, 0.5).is_zero);
    CHECK(prox(mcp, 2.0, 0.5).value == 2.0);
}

TEST_CASE("prox rejects a non-strongly-convex subproblem") {
    const RegularizerSpec mcp = make(PenaltyFamily::Mcp, 1.0, 1.0);
    CHECK_THROWS_AS(prox(mcp, 0.5, 1.0), ConfigError);
    CHECK_THROWS_AS(prox(mcp, 0.5, 2.0), ConfigError);
    CHECK_NOTHROW(prox(mcp, 0.5, 0.99));
}

TEST_CASE("prox matches the search oracle on random tuples") {
    std::mt19937_64 rng(20240811);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    while (checked < 1000) {
        const PenaltyFamily f = kFamilies[rng() % 4];
        double gamma = 1.0;
        switch (f) {
        case PenaltyFamily::L1: break;
        case PenaltyFamily::CappedL1:
            gamma = std::exp(std::log(0.2) + unit(rng) * std::log(100.0));
            break;
        case PenaltyFamily::Scad: gamma = 2.05 + 10.0 * unit(rng); break;
        case PenaltyFamily::Mcp:
            gamma = std::exp(std::log(0.3) + unit(rng) * std::log(100.0));
            break;
        }
        const double weight =
            std::exp(std::log(0.05) + unit(rng) * std::log(160.0));
        const RegularizerSpec spec = make(f, gamma, weight);
        const double nu = weak_convexity(spec);
        const double step = nu > 0.0 ? (0.05 + 0.90 * unit(rng)) / nu
                                     : 0.01 + 5.0 * unit(rng);
        const double span = f == PenaltyFamily::L1
                                ? 4.0 * step * weight + 1.0
                                : 2.0 * gamma + 4.0 * step * weight + 1.0;
        const double y = (2.0 * unit(rng) - 1.0) * span;

        const ProxResult got = prox(spec, y, step);
        const double want =
            oracle::prox_1d(mirror(f), gamma, weight, y, step);
        CAPTURE(to_string(f));
        CAPTURE(gamma);
        CAPTURE(weight);
        CAPTURE(step);
        CAPTURE(y);
        REQUIRE(std::abs(got.value - want) <= 1e-6);
        CHECK(got.is_zero == (got.value == 0.0));
        CHECK(std::abs(got.value) <= std::abs(y) + 1e-15);
        CHECK(got.value * y >= 0.0);
        if (std::abs(y) <= prox_threshold(spec, step))
            CHECK(got.is_zero);
        ++checked;
    }
}

TEST_CASE("prox is odd and monotone") {
    for (PenaltyFamily f : kFamilies) {
        RegularizerSpec spec = canonical(f);
        spec.weight = 1.3;
        const double step = 0.5 / std::max(weak_convexity(spec), 0.5);
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = -600; i <= 600; ++i) {
            const double y = i * 0.01;
            const double v = prox(spec, y, step).value;
            const double neg = prox(spec, -y, step).value;
            CAPTURE(to_string(f));
            CAPTURE(y);
            CHECK(neg == -v);
            CHECK(v >= prev);
            prev = v;
        }
    }
}

TEST_CASE("firm shrinkage sits between soft thresholding and identity") {
    const double step = 0.8;
    const RegularizerSpec mcp = make(PenaltyFamily::Mcp, 3.0, 1.0);
    for (int i = 0; i <= 600; ++i) {
        const double y = i * 0.01;
        const double soft = std::max(0.0, y - step);
        const double v = prox(mcp, y, step).value;
        CAPTURE(y);
        CHECK(v >= soft - 1e-12);
        CHECK(v <= y + 1e-12);
    }
}

TEST_CASE("capped-l1 tie resolves to the smaller magnitude") {
    // c = 1, weight 1, step 1/2: the two global minimizers at y = 3/4 are
    // x = 1/4 and x = 3/4, with equal objective 1/2. All quantities are
    // dyadic, so the tie is exact in floating point.
    const RegularizerSpec spec = make(PenaltyFamily::CappedL1, 1.0, 1.0);
    const double step = 0.5;
    const double y = 0.75;
    const double g_small = oracle::prox_objective(oracle::Family::CappedL1,
                                                  1.0, 1.0, y, step, 0.25);
    const double g_big = oracle::prox_objective(oracle::Family::CappedL1, 1.0,
                                                1.0, y, step, 0.75);
    REQUIRE(g_small == g_big);
    CHECK(prox(spec, y, step).value == doctest::Approx(0.25));
    CHECK(prox(spec, -y, step).value == doctest::Approx(-0.25));
    // Off the tie the branches separate.
    CHECK(prox(spec, y + 1e-3, step).value == doctest::Approx(y + 1e-3));
    CHECK(prox(spec, y - 1e-3, step).value == doctest::Approx(0.25 - 1e-3));
}

TEST_CASE("vector prox applies the scalar rule entrywise") {
    const RegularizerSpec l1 = make(PenaltyFamily::L1, 1.0, 1.0);
    Eigen::VectorXd y(2);
    y << 1.5, -1.5;
    ProxVectorResult r = prox_vector(l1, y, 0.5);
    CHECK(r.values[0] == doctest::Approx(1.0));
    CHECK(r.values[1] == doctest::Approx(-1.0));
    REQUIRE(r.support.size() == 2);
    CHECK(r.support[0] == 0);
    CHECK(r.support[1] == 1);

    ProxVectorResult z = prox_vector(l1, Eigen::VectorXd::Zero(5), 0.5);
    CHECK(z.values.norm() == 0.0);
    CHECK(z.support.empty());

    std::mt19937_64 rng(7);
    std::normal_distribution<double> gauss(0.0, 2.0);
    Eigen::VectorXd big(100);
    for (int i = 0; i < 100; ++i)
        big[i] = gauss(rng);
    const RegularizerSpec mcp = make(PenaltyFamily::Mcp, 2.0, 1.0);
    ProxVectorResult pv = prox_vector(mcp, big, 0.9);
    std::vector<int> nz;
    for (int i = 0; i < 100; ++i) {
        CHECK(pv.values[i] == prox(mcp, big[i], 0.9).value);
        if (pv.values[i] != 0.0)
            nz.push_back(i);
    }
    CHECK(pv.support == nz);
}
