// Analytic state construction, overlaps, series, normalisation constants,
// convolution quantities and window masses.

#include <gtest/gtest.h>

#include <random>

#include "frozen_values.hpp"
#include "gkp/quadrature.hpp"
#include "gkp/states.hpp"

using namespace gkp;

TEST(GaussianTerm, ZeroOutsideTruncation) {
    GaussianTerm t = chi_eps_term(0.1, 0.2, 0.0);
    EXPECT_EQ(t(0.21), cplx(0.0));
    EXPECT_EQ(t(-0.3), cplx(0.0));
    EXPECT_NE(t(0.1), cplx(0.0));
}

TEST(BuildState, CombTwoPeaks) {
    auto s = build_state(spec::Comb{2, 0.1});
    ASSERT_EQ(s.terms.size(), 2u);
    EXPECT_DOUBLE_EQ(s.terms[0].mu, -1.0);
    EXPECT_DOUBLE_EQ(s.terms[1].mu, 0.0);
    EXPECT_NEAR(std::abs(s.terms[0].amp - s.terms[1].amp), 0.0, 1e-15);
    EXPECT_NEAR(norm_sq(s), 1.0, 1e-12);
}

TEST(BuildState, SqueezedVacuumAtOneIsVacuum) {
    auto s = build_state(spec::SqueezedVacuum{1.0});
    ASSERT_EQ(s.terms.size(), 1u);
    EXPECT_DOUBLE_EQ(s.terms[0].a, 1.0);
    EXPECT_NEAR(norm_sq(s), 1.0, 1e-14);
}

TEST(BuildState, GkpCutoffIsMinimal) {
    // Direct check of the envelope cutoff: the discarded weight is below the
    // tolerance, and dropping one more index would exceed it.
    const double k = 0.2, tol = 1e-12;
    auto s = build_state(spec::GkpPeakwise{k, 0.05}, tol);
    const long zm = (static_cast<long>(s.terms.size()) - 1) / 2;
    double full = 0.0, kept = 0.0, kept_less = 0.0;
    for (long z = -4 * zm; z <= 4 * zm; ++z) {
        double w = std::exp(-k * k * double(z * z));
        full += w;
        if (std::abs(z) <= zm) kept += w;
        if (std::abs(z) <= zm - 1) kept_less += w;
    }
    EXPECT_LT((full - kept) / full, tol);
    EXPECT_GE((full - kept_less) / full, tol);
}

TEST(BuildState, AllSpecsNormalised) {
    std::vector<StateSpec> specs{spec::Vacuum{},
                                 spec::SqueezedVacuum{0.3},
                                 spec::TruncatedGaussian{0.05, 0.2},
                                 spec::Comb{8, 0.05},
                                 spec::TruncatedComb{8, 0.05, 0.2},
                                 spec::GkpPeakwise{0.2, 0.05},
                                 spec::GkpPointwise{0.2, 0.05},
                                 spec::GkpTruncated{0.2, 0.05, 0.2},
                                 spec::GkpTruncatedBounded{8, 0.2, 0.05, 0.2},
                                 spec::GkpPointwiseTruncatedBounded{8, 0.2, 0.05, 0.2},
                                 spec::GkpMomentumTruncated{0.2, 0.05, 0.2}};
    for (const auto& sp : specs) EXPECT_NEAR(norm_sq(build_state(sp)), 1.0, 1e-10);
}

TEST(BuildState, RejectsBadParameters) {
    EXPECT_THROW(build_state(spec::Comb{3, 0.1}), Error);
    EXPECT_THROW(build_state(spec::SqueezedVacuum{-1.0}), Error);
    EXPECT_THROW(build_state(spec::TruncatedGaussian{0.1, 0.6}), Error);
    EXPECT_THROW(build_state(spec::Vacuum{}, 1e-3), Error);
}

TEST(EvalAmplitude, GkpSymmetricAndMatchesOracle) {
    auto g = build_state(spec::GkpPeakwise{0.2, 0.05});
    for (double x : {0.1, 0.37, 1.02, 3.5}) EXPECT_NEAR(std::abs(eval_amplitude(g, {x}) - eval_amplitude(g, {-x})), 0.0, 1e-14);
    EXPECT_NEAR(eval_amplitude(g, {0.0}).real(), frozen::gkp_02_005_at_0, 1e-12);
    EXPECT_NEAR(eval_amplitude(g, {0.3}).real(), frozen::gkp_02_005_at_03, 1e-18);
}

TEST(EvalAmplitude, TruncatedVanishesBeyondEps) {
    auto s = build_state(spec::TruncatedGaussian{0.05, 0.1});
    EXPECT_EQ(eval_amplitude(s, {0.2}), cplx(0.0));
}

TEST(Overlap, PeakOverlapLemma) {
    GaussianSum a, b;
    a.terms = {psi_term(0.5, 0.0)};
    b.terms = {psi_term(0.5, 1.0)};
    EXPECT_NEAR(overlap(a, b).real(), std::exp(-1.0), 1e-14);
    EXPECT_NEAR(term_overlap(psi_term(0.1, 2.0), psi_term(0.1, 2.0)).real(), 1.0, 1e-14);
}

TEST(Overlap, PeakOverlapAgainstQuadratureGrid) {
    for (double D : {0.05, 0.1, 0.5})
        for (int z = -5; z <= 5; ++z)
            for (int w = -5; w <= 5; ++w) {
                auto a = psi_term(D, z), b = psi_term(D, w);
                auto f = [&](double x) { return a(x).real() * b(x).real(); };
                double mid = 0.5 * (z + w), r = 0.5 * std::abs(z - w) + 20.0 * D;
                double q = integrate(f, mid - r, mid, 1e-15) + integrate(f, mid, mid + r, 1e-15);
                EXPECT_NEAR(q, std::exp(-double((z - w) * (z - w)) / (4 * D * D)), 1e-10);
            }
}

TEST(Overlap, DisjointTruncatedPeaksAreOrthogonal) {
    for (int z = -3; z <= 3; ++z)
        for (int w = -3; w <= 3; ++w)
            if (z != w) {
                EXPECT_EQ(term_overlap(chi_eps_term(0.3, 0.4, z), chi_eps_term(0.3, 0.4, w)), cplx(0.0));
            }
}

TEST(Overlap, PeakwiseVsPointwiseGkp) {
    auto G = build_state(spec::GkpPeakwise{0.2, 0.05});
    auto g = build_state(spec::GkpPointwise{0.2, 0.05});
    cplx o = overlap(G, g);
    EXPECT_NEAR(o.real(), frozen::overlap_GKP_gkp_02_005, 1e-8);
    EXPECT_NEAR(o.imag(), 0.0, 1e-12);
}

TEST(PureTraceDistance, Values) {
    EXPECT_DOUBLE_EQ(pure_trace_distance(1.0), 0.0);
    EXPECT_DOUBLE_EQ(pure_trace_distance(0.0), 2.0);
    EXPECT_NEAR(pure_trace_distance(0.75), 1.0, 1e-15);
    EXPECT_THROW(pure_trace_distance(1.1), Error);
}

TEST(MomentumRep, PeakSpacingTwoPi) {
    // The finite peak width pulls the centres in: spacing 2 pi / (1 + kappa^2 Delta^2).
    const double k = 0.2, D = 0.05;
    auto m = momentum_rep(spec::GkpPeakwise{k, D});
    for (std::size_t i = 1; i < m.terms.size(); ++i) EXPECT_NEAR(m.terms[i].mu - m.terms[i - 1].mu, two_pi / (1.0 + k * k * D * D), 1e-12);
}

TEST(MomentumRep, MatchesFourierOfPositionState) {
    auto g = build_state(spec::GkpPeakwise{0.2, 0.05});
    auto m = momentum_rep(spec::GkpPeakwise{0.2, 0.05});
    auto f = fourier(g);
    EXPECT_GE(std::norm(overlap(m, f)), 1.0 - 1e-10);
}

TEST(MomentumRep, KappaEqualsDeltaSwapsWidths) {
    // With kappa = Delta the momentum peaks have the position peaks' width
    // scaled by the lattice ratio: position width Delta, momentum width kappa.
    auto m = momentum_rep(spec::GkpPeakwise{0.1, 0.1});
    auto g = build_state(spec::GkpPeakwise{0.1, 0.1});
    EXPECT_NEAR(g.terms[0].a, 1.0 / 0.01, 1e-9);
    // Momentum peaks: Psi_kappa times the envelope eta_Delta(p).
    EXPECT_NEAR(m.terms[0].a, 1.0 / 0.01 + 0.01, 1e-9);
}

TEST(Series, CenteredAtOneMatchesOracle) {
    auto r = gaussian_series(1.0, SeriesMode::centered);
    EXPECT_NEAR(r.value, frozen::series_c1_centered, 1e-15);
    EXPECT_NEAR(r.lower_bound, std::sqrt(pi) - 1.0, 1e-15);
    EXPECT_NEAR(r.upper_bound, std::sqrt(pi) + 1.0, 1e-15);
}

TEST(Series, LargeCLimit) { EXPECT_NEAR(gaussian_series(100.0, SeriesMode::centered).value, 1.0, 1e-40); }

TEST(Series, HalfShiftLowerBound) {
    auto r = gaussian_series(0.25, SeriesMode::half_shift);
    EXPECT_GE(r.value, std::sqrt(pi / 0.25) - 1.0);
}

TEST(Series, BracketingOnLogGrid) {
    for (int i = 0; i < 50; ++i) {
        double c = std::pow(10.0, -4.0 + 6.0 * i / 49.0);
        for (auto m : {SeriesMode::centered, SeriesMode::half_shift, SeriesMode::abs_plus_eps, SeriesMode::abs_minus_eps_nonzero})
            for (double e : {0.1, 0.3, 0.49}) {
                auto r = gaussian_series(c, m, e);
                EXPECT_GE(r.value, r.lower_bound - 1e-12 * r.value);
                EXPECT_LE(r.value, r.upper_bound + 1e-12 * r.value);
            }
    }
}

TEST(Normalization, SandwichAndRatio) {
    auto nb = normalization_bounds(0.1, 0.05, 8);
    EXPECT_GE(nb.C_k_inv_sq, 1.0 - 0.1 / std::sqrt(pi));
    EXPECT_LE(nb.C_k_inv_sq, 1.0 + 0.1 / std::sqrt(pi));
    EXPECT_LE(nb.ratio, 1.0);
    EXPECT_LE(nb.C_kD_inv_sq, nb.C_kD_inv_sq_ub);
}

TEST(Normalization, LargeKappaDirectSum) { EXPECT_NEAR(normalization_bounds(10.0, 0.05, 8).C_k_inv_sq, frozen::Ck_inv_sq_kappa10, 1e-6); }

TEST(Normalization, SandwichGrid) {
    for (double k : {0.01, 0.05, 0.1, 0.2})
        for (double D : {0.01, 0.05, 0.1, 0.2}) {
            auto nb = normalization_bounds(k, D, 8);
            EXPECT_GE(nb.C_k_inv_sq, nb.C_k_inv_sq_lb);
            EXPECT_LE(nb.C_k_inv_sq, nb.C_k_inv_sq_ub);
            EXPECT_LE(nb.ratio, 1.0 + 1e-14);
        }
}

TEST(ConvQuantities, MatchOracle) {
    auto q = conv_quantities(3, 0.2, 0.1, 0.05, 0.2);
    EXPECT_NEAR(q.I_k, frozen::I_3_at_02, 1e-12);
    auto q0 = conv_quantities(3, 0.0, 0.1, 0.05, 0.2);
    EXPECT_NEAR(q0.I_k_prime, frozen::I_prime_3, 1e-12);
}

TEST(ConvQuantities, IntegerShiftIdentity) {
    // I_k(m + delta) = I_{k-m}(delta)
    auto a = conv_quantities(3, 1.2, 0.1, 0.05, 0.2);
    auto b = conv_quantities(2, 0.2, 0.1, 0.05, 0.2);
    EXPECT_NEAR(a.I_k, b.I_k, 1e-14);
}

TEST(ConvQuantities, NonNegativeAndSumLemma) {
    const double k = 0.1, D = 0.05, e = 0.2;
    const int L = 8;
    double sp = 0.0, s0 = 0.0;
    for (int j = -L / 2; j <= L / 2 - 1; ++j) {
        auto q = conv_quantities(j, 0.0, k, D, e);
        EXPECT_GE(q.I_k, 0.0);
        sp += q.I_k_prime;
        s0 += q.I_k;
    }
    EXPECT_GE(sp, (1.0 - k * k * e * L / 2.0) * s0);
}

TEST(TailMass, VacuumErf) { EXPECT_NEAR(tail_mass(build_state(spec::Vacuum{}), 1.0, Domain::position), frozen::vacuum_mass_R1, 1e-12); }

TEST(TailMass, LargeWindowCapturesComb) {
    auto c = build_state(spec::Comb{8, 0.05});
    EXPECT_GE(tail_mass(c, 10.0 * (1.0 / 0.2 + 8.0), Domain::position), 1.0 - 1e-8);
}

TEST(TailMass, GkpBelowBound) {
    auto g = build_state(spec::GkpPeakwise{0.1, 0.04});
    EXPECT_LE(tail_mass(g, 2.0, Domain::position), 4 * 0.1 * 2 + 5 * std::sqrt(0.1) + 7 * std::sqrt(0.04));
}

TEST(TailMass, BoundsOnPreconditionGrid) {
    for (double k : {0.01, 0.05, 0.1, 0.2})
        for (double D : {0.002, 0.005, 0.009}) {
            auto g = build_state(spec::GkpPeakwise{k, D});
            auto m = momentum_rep(spec::GkpPeakwise{k, D});
            for (double R : {1.0, 2.0, 5.0, 10.0}) {
                EXPECT_LE(tail_mass(g, R, Domain::position), 4 * k * R + 5 * std::sqrt(k) + 7 * std::sqrt(D));
                EXPECT_LE(tail_mass(m, R, Domain::momentum), 2 * D * R + 5 * std::sqrt(k) + 7 * std::sqrt(D));
            }
        }
}

TEST(TraceDistanceCorollaries, TruncationCosts) {
    for (double D : {0.0025, 0.01, 0.04}) {
        const double e = std::sqrt(D);
        for (int L : {8, 32}) {
            auto sha = build_state(spec::Comb{L, D});
            auto she = build_state(spec::TruncatedComb{L, D, e});
            EXPECT_LE(pure_trace_distance(std::norm(overlap(sha, she))), 5.0 * std::sqrt(D));
        }
        auto G = build_state(spec::GkpPeakwise{0.2, D});
        auto Ge = build_state(spec::GkpTruncated{0.2, D, e});
        EXPECT_LE(pure_trace_distance(std::norm(overlap(G, Ge))), 6.0 * std::sqrt(D));
    }
}
