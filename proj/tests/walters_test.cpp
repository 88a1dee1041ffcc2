#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zerotemp/appendix.hpp"
#include "zerotemp/detail/logsum.hpp"
#include "zerotemp/verify/oracles.hpp"
#include "zerotemp/verify/suites.hpp"
#include "zerotemp/walters.hpp"

using namespace zerotemp;
namespace ex = zerotemp::verify::examples;

namespace {

WaltersPotential degenerate_tails(double b, double d) {
    return {b, d, GeometricTailSequence::geometric(-1e-12, 0.01), GeometricTailSequence::geometric(-1e-12, 0.01), 0.5,
            false};
}

std::vector<WaltersPotential> regimes_and_mirrors() {
    std::vector<WaltersPotential> out;
    for (const auto& [name, w] : ex::regimes()) {
        out.push_back(w);
        out.push_back(w.mirrored());
    }
    return out;
}

}  // namespace

TEST(WaltersPotential, Validation) {
    auto w = ex::w_symmetric();
    EXPECT_NO_THROW(w.validate());
    w.a_seq.alpha = 0.5;
    EXPECT_THROW(w.validate(), InvalidArgument);
    w = ex::w_symmetric();
    w.c_seq.rho = 0.7;
    EXPECT_THROW(w.validate(), InvalidArgument);
    w = ex::w_symmetric();
    w.b = 0.0;
    EXPECT_THROW(w.validate(), InvalidArgument);
    w.relaxed = true;
    EXPECT_NO_THROW(w.validate());
    w.a_seq.head = {-1.0, 0.0};
    EXPECT_NO_THROW(w.validate());
    w.relaxed = false;
    w.b = -1.0;
    EXPECT_THROW(w.validate(), InvalidArgument);
}

TEST(WaltersPotential, TailSums) {
    EXPECT_DOUBLE_EQ(GeometricTailSequence::geometric(-1.0, 0.5).sum(), -1.0);
    const GeometricTailSequence s{{-0.5, -0.25}, -2.0, 0.25};
    EXPECT_DOUBLE_EQ(s.term(2), -0.5);
    EXPECT_DOUBLE_EQ(s.term(4), -2.0 * std::pow(0.25, 3));
    double direct = 0.0;
    for (std::size_t n = 2; n < 200; ++n) direct += s.term(n);
    EXPECT_NEAR(s.sum(), direct, 1e-15);
}

TEST(WaltersGamma, DegenerateTails) { EXPECT_NEAR(walters_gamma(degenerate_tails(-1, -1)), -1.0, 1e-11); }

TEST(WaltersGamma, BoundaryCaseAllBranchesChecked) { EXPECT_DOUBLE_EQ(walters_gamma(ex::w_boundary()), -3.0); }

TEST(WaltersGamma, SymmetricCase) {
    // max{a+b+d, c+b+d, (a+c+b+d)/2} = max{-3, -3, -2}
    EXPECT_DOUBLE_EQ(walters_gamma(ex::w_symmetric()), -2.0);
}

TEST(WaltersGamma, IsTheCostMatrixEigenvalue) {
    std::mt19937_64 rng(67);
    std::uniform_real_distribution<double> u(-4.0, -0.1);
    for (int t = 0; t < 200; ++t) {
        const auto w = ex::walters(u(rng), u(rng), u(rng), u(rng));
        EXPECT_NEAR(walters_gamma(w), mp_eigenvalue(walters_cost_matrix(w)), 1e-12);
    }
}

TEST(WaltersPressure, DegenerateTailsReproduceTwoSymbolClosedForm) {
    const auto w = degenerate_tails(-1, -1);
    for (double beta : {0.5, 1.0, 5.0, 10.0, 20.0})
        EXPECT_NEAR(walters_pressure(w, beta) / std::log1p(std::exp(-beta)), 1.0, 1e-8) << beta;
}

TEST(WaltersPressure, MatchesRunLengthChain) {
    for (const auto& [name, w] : ex::regimes())
        for (const auto& [beta, a_beta] : {std::pair{0.5, 0.02}, std::pair{3.0, -0.3}, std::pair{8.0, 0.0},
                                           std::pair{8.0, 0.02}}) {
            const auto root = walters_pressure_root(w, beta, a_beta);
            const auto oracle = verify::walters_run_length_oracle(w, beta, a_beta, 100);
            EXPECT_NEAR(root.pressure / oracle.pressure, 1.0, 1e-10) << name << ' ' << beta << ' ' << a_beta;
            EXPECT_NEAR(walters_cylinder_ratio(w, beta, root).mu0, oracle.mu0, 1e-10);
            EXPECT_NEAR(walters_log_h_ratio(w, beta, root), oracle.log_h_ratio, 1e-9);
        }
}

TEST(WaltersPressure, RateMatchesGamma) {
    const auto w = ex::w_boundary();
    EXPECT_NEAR(std::log(walters_pressure(w, 100.0)) / 100.0, -3.0, 0.05);
    for (const auto& v : regimes_and_mirrors())
        EXPECT_NEAR(std::log(walters_pressure(v, 150.0)) / 150.0, walters_gamma(v), 0.05);
}

TEST(WaltersPressure, GoldenPrefactor) {
    const auto w = ex::w_boundary();
    const double l = walters_pressure(w, 150.0) / std::exp(150.0 * walters_gamma(w));
    EXPECT_NEAR(l, golden_ratio, 0.02);
}

TEST(WaltersPressure, MirrorInvariant) {
    for (const auto& [name, w] : ex::regimes())
        for (double beta : {1.0, 30.0, 150.0})
            EXPECT_NEAR(walters_pressure(w.mirrored(), beta) / walters_pressure(w, beta), 1.0, 1e-12);
}

TEST(WaltersPressure, SandwichUnderFirstCoordinatePerturbation) {
    for (const auto& [name, w] : ex::regimes())
        for (double beta : {1.0, 5.0, 20.0}) {
            const double p = walters_pressure(w, beta);
            for (double size : {1e-6 * p, 0.1 * p, 0.5 * p})
                for (double sign : {1.0, -1.0}) {
                    const double q = walters_pressure(w, beta, sign * size);
                    EXPECT_TRUE(pressure_bounds_under_perturbation(p, size).contains(q, 1e-13 * p)) << name;
                }
        }
}

TEST(CylinderRatio, SymmetricUnperturbedIsOne) {
    const auto w = ex::w_symmetric();
    for (double beta : {1.0, 50.0, 150.0}) {
        const auto r = walters_cylinder_ratio(w, 0.0, beta, walters_pressure(w, beta));
        EXPECT_DOUBLE_EQ(r.ratio, 1.0);
        EXPECT_DOUBLE_EQ(r.mu0, 0.5);
    }
}

TEST(CylinderRatio, ZeroDominantSelectsZero) {
    const auto w = ex::w_zero_dominant();
    const auto r = walters_cylinder_ratio(w, 0.0, 150.0, walters_pressure(w, 150.0));
    EXPECT_GT(r.ratio, 100.0);
    EXPECT_GT(r.mu0, 0.99);
}

TEST(CylinderRatio, BoundaryGoldenSplit) {
    const auto w = ex::w_boundary();
    const double p = walters_pressure(w, 150.0);
    const auto r = walters_cylinder_ratio(w, 0.0, 150.0, p);
    EXPECT_NEAR(r.ratio / ((3 + std::sqrt(5.0)) / 2), 1.0, 0.02);
    EXPECT_NEAR(r.mu0, 0.7236068, 0.02);
    EXPECT_NEAR(r.ratio / walters_asymptotic_ratio(w, p, 150.0), 1.0, 0.02);
}

TEST(CylinderRatio, DivergentSeriesThrows) {
    const auto w = ex::w_symmetric();
    const double p = walters_pressure(w, 2.0);
    EXPECT_THROW(walters_cylinder_ratio(w, 2 * p, 2.0, p), NumericalError);
}

TEST(AsymptoticRatio, SymmetricIsExactlyOne) {
    for (double p : {1e-80, 0.3, 2.0}) EXPECT_DOUBLE_EQ(walters_asymptotic_ratio(ex::w_symmetric(), p, 150.0), 1.0);
    EXPECT_THROW(walters_asymptotic_ratio(ex::w_symmetric(), 0.0, 1.0), InvalidArgument);
}

TEST(AsymptoticRatio, GoldenLimit) {
    const auto w = ex::w_boundary();
    for (double beta : {100.0, 150.0, 200.0}) {
        const double p = golden_ratio * std::exp(beta * walters_gamma(w));
        EXPECT_NEAR(walters_asymptotic_ratio(w, p, beta), (3 + std::sqrt(5.0)) / 2, 1e-9);
    }
}

TEST(ClassifyRegime, Examples) {
    const auto s = classify_regime(ex::w_symmetric());
    EXPECT_EQ(s.regime, WaltersRegime::symmetric);
    EXPECT_EQ(s.limit_mass_0, 0.5);
    EXPECT_FALSE(s.l_limit);
    const auto g = classify_regime(ex::w_boundary());
    EXPECT_EQ(g.regime, WaltersRegime::boundary_golden);
    EXPECT_DOUBLE_EQ(g.limit_mass_0, (10 + 2 * std::sqrt(5.0)) / 20);
    ASSERT_TRUE(g.l_limit);
    EXPECT_DOUBLE_EQ(*g.l_limit, (1 + std::sqrt(5.0)) / 2);
    const auto z = classify_regime(ex::walters(-0.5, -0.5, -1.0, -3.0));
    EXPECT_EQ(z.regime, WaltersRegime::zero_dominant);
    EXPECT_EQ(z.limit_mass_0, 1.0);
    EXPECT_EQ(classify_regime(ex::w_two_cycle()).regime, WaltersRegime::two_cycle_dominant);
    EXPECT_EQ(g.tag(), "boundary-golden");
}

TEST(ClassifyRegime, MirrorsSwapTheMass) {
    for (const auto& [name, w] : ex::regimes()) {
        const auto r = classify_regime(w);
        const auto m = classify_regime(w.mirrored());
        EXPECT_EQ(m.regime, r.regime);
        EXPECT_NEAR(m.limit_mass_0, 1.0 - r.limit_mass_0, 1e-15);
        if (r.regime != WaltersRegime::symmetric) {
            EXPECT_TRUE(m.mirrored);
            EXPECT_EQ(m.tag(), r.tag() + " (mirrored)");
        }
    }
}

TEST(ClassifyRegime, PredictionsMatchSeriesAtLargeBeta) {
    for (const auto& w : regimes_and_mirrors()) {
        const auto r = walters_cylinder_ratio(w, 0.0, 150.0, walters_pressure(w, 150.0));
        EXPECT_NEAR(r.mu0, classify_regime(w).limit_mass_0, 0.02);
    }
}

TEST(Stability, BoundaryCaseGapIsSmall) {
    const auto w = ex::w_boundary();
    const auto rep = perturbation_stability_experiment(w, walters_gamma(w) - 0.5, PerturbationKind::first_coord, {150.0});
    EXPECT_LE(rep.rows[0].mu_gap(), 0.02);
    EXPECT_LE(rep.rows[0].v1_gap(), 0.02);
    EXPECT_TRUE(rep.sandwich_ok);
}

TEST(Stability, SymmetricCaseStaysAtHalf) {
    const auto w = ex::w_symmetric();
    const auto rep = perturbation_stability_experiment(w, walters_gamma(w) - 0.5, PerturbationKind::first_coord, {150.0});
    const auto& r = rep.rows[0];
    for (double m : {r.mu0, r.mu0_plus, r.mu0_minus}) EXPECT_NEAR(m, 0.5, 0.02);
}

TEST(Stability, ZeroPerturbationGivesZeroGap) {
    const auto w = ex::w_boundary();
    const auto rep = perturbation_stability_experiment(w, -std::numeric_limits<double>::infinity(),
                                                       PerturbationKind::first_coord, {5.0, 50.0});
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.mu_gap(), 0.0);
        EXPECT_EQ(r.v1_gap(), 0.0);
    }
}

TEST(Stability, GapsShrinkAlongTheGrid) {
    for (const auto& [name, w] : ex::regimes()) {
        const auto rep = perturbation_stability_experiment(w, walters_gamma(w) - 0.5, PerturbationKind::first_coord,
                                                           {2.0, 4.0, 8.0, 16.0, 32.0});
        EXPECT_TRUE(rep.gap_shrinks) << name;
        EXPECT_TRUE(rep.sandwich_ok) << name;
        for (std::size_t i = 1; i < rep.rows.size(); ++i) EXPECT_LE(rep.rows[i].mu_gap(), rep.rows[i - 1].mu_gap() + 1e-15);
    }
}

TEST(Stability, CylinderIndicatorOnOneMirrors) {
    const auto w = ex::w_boundary();
    const auto on_one = perturbation_stability_experiment(w, -4.0, PerturbationKind::cylinder_indicator, {5.0, 10.0}, 1);
    const auto mirrored = perturbation_stability_experiment(w.mirrored(), -4.0, PerturbationKind::cylinder_indicator, {5.0, 10.0}, 0);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_NEAR(on_one.rows[i].mu0_plus, 1.0 - mirrored.rows[i].mu0_plus, 1e-14);
        EXPECT_NEAR(on_one.rows[i].pressure_minus, mirrored.rows[i].pressure_minus, 1e-14 * mirrored.rows[i].pressure);
    }
    EXPECT_THROW(perturbation_stability_experiment(w, -4.0, PerturbationKind::first_coord, {5.0}, 1), InvalidArgument);
}

TEST(RunSeries, SmallRunsAreNegligible) {
    for (const auto& [name, w] : ex::regimes()) {
        const double beta = 150.0, p = walters_pressure(w, beta);
        detail::LogSum s;
        double partial = 0.0;
        for (std::size_t j = 1; j < 150; ++j) {
            partial += w.a_seq.term(j + 1);
            s.add(std::log(j + 1.0) + beta * partial - static_cast<double>(j) * p);
        }
        EXPECT_LT(std::exp(s.log_value()), 1e-8) << name;
    }
}

TEST(RunSeries, PartialSumsWithinTailBound) {
    for (const auto& seq : {GeometricTailSequence::geometric(-1.0, 0.5), GeometricTailSequence::geometric(-3.0, 0.3),
                            GeometricTailSequence{{-0.7, -0.1}, -2.0, 0.25}}) {
        const double theta = 0.5;
        const double k = seq.lipschitz_constant(theta);
        double partial = 0.0;
        for (std::size_t j = 1; j <= 60; ++j) {
            partial += seq.term(j + 1);
            EXPECT_LE(seq.sum(), partial + 1e-15);
            EXPECT_LE(partial, seq.sum() + k * std::pow(theta, j + 2.0) / (1 - theta) + 1e-15);
        }
    }
}

TEST(RunSeries, LongRunTailsScaleLikeInversePressure) {
    for (const auto& [name, w] : ex::regimes()) {
        const double beta = 150.0, gamma = walters_gamma(w);
        const double p = walters_pressure(w, beta);
        for (double sign : {1.0, -1.0}) {
            const double z = p - sign * std::exp(beta * (gamma - 0.5));
            const double k = beta;
            const double log_plain = -k * z - detail::log_one_minus_exp_neg(z);
            const double log_weighted = log_plain + detail::log_add_exp(std::log(k), -detail::log_one_minus_exp_neg(z));
            EXPECT_NEAR(std::exp(log_plain + std::log(p)), 1.0, 0.05) << name;
            EXPECT_NEAR(std::exp(log_weighted + 2 * std::log(p)), 1.0, 0.05) << name;
        }
    }
}

TEST(TwoLoopExample, ClosedFormValues) {
    const auto r = appendix_example(-2.0, -1.0, 10.0);
    EXPECT_NEAR(r.p0 / 2.06115e-9, 1.0, 1e-5);
    EXPECT_NEAR(r.p0, 0.5 - 1.0 / (2 * std::sqrt(1 + 4 * std::exp(-20.0))), 1e-15);
    EXPECT_NEAR(r.lambda_tilde, 1 + (std::exp(-10.0) + std::sqrt(std::exp(-20.0) + 4 * std::exp(-40.0))) / 2, 1e-15);
    EXPECT_THROW(appendix_example(-1.0, -2.0, 1.0), InvalidArgument);
    EXPECT_THROW(appendix_example(-2.0, 0.5, 1.0), InvalidArgument);
}

TEST(TwoLoopExample, NumericMatchesClosedForms) {
    for (double beta : {1.0, 5.0, 10.0, 20.0, 40.0}) {
        const auto c = appendix_example(-2.0, -1.0, beta);
        const auto n = appendix_numeric(-2.0, -1.0, beta);
        EXPECT_NEAR(n.lambda_tilde / c.lambda_tilde, 1.0, 1e-10);
        EXPECT_NEAR(n.log_H1_pert, c.log_H1_pert, 1e-10);
        EXPECT_NEAR(n.p0 / c.p0, 1.0, 1e-10);
        EXPECT_NEAR(n.H1_unpert / c.H1_unpert, 1.0, 1e-10);
        EXPECT_NEAR(n.mu0_unpert, 0.5, 1e-10);
    }
}

TEST(TwoLoopExample, SelectionFlips) {
    EXPECT_LE(appendix_example(-2.0, -1.0, 20.0).p0, 1e-8);
    EXPECT_NEAR(appendix_example(-2.0, -1.0, 50.0).log_H1_pert / 50.0, 1.0, 0.02);
    EXPECT_NEAR(std::log(appendix_example(-2.0, -1.0, 50.0).H1_unpert) / 50.0, 0.0, 0.02);
}
