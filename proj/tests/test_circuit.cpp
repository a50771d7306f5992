// Gate IR, bounded-strength validation, symplectic bookkeeping, compilers,
// operation counting and the text format.

#include <gtest/gtest.h>

#include <random>

#include "gkp/circuit.hpp"
#include "gkp/protocols.hpp"
#include "gkp/sim.hpp"

using namespace gkp;

TEST(Validate, EdgeCases) {
    EXPECT_TRUE(validate_bounded(gates::squeeze(0, two_pi)).ok);
    EXPECT_FALSE(validate_bounded(gates::squeeze(0, two_pi + 1e-6)).ok);
    EXPECT_FALSE(validate_bounded(gates::displacement(0, {7.0, 0.0})).ok);
    EXPECT_TRUE(validate_bounded(gates::beamsplitter(0, 1, 1.0)).ok);
}

TEST(Validate, StrictCircuitRejectsOversizedGate) {
    Circuit c(1, 0, true);
    EXPECT_THROW(c.add(gates::displacement(0, {7.0, 0.0})), Error);
    Circuit loose(1, 0, false);
    EXPECT_NO_THROW(loose.add(gates::displacement(0, {7.0, 0.0})));
}

TEST(Validate, RegisterBounds) {
    Circuit c(1, 0);
    EXPECT_THROW(c.add(gates::squeeze(1, 0.1)), Error);
    EXPECT_THROW(c.add(gates::hadamard(0)), Error);
}

TEST(Symplectic, EmptyCircuitIsIdentity) {
    auto act = symplectic_of(Circuit(2, 0));
    EXPECT_NEAR((act.S - Eigen::MatrixXd::Identity(4, 4)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(act.displacement.norm(), 0.0, 1e-15);
}

TEST(Symplectic, SqueezeMatrix) {
    Circuit c(1, 0);
    c.add(gates::squeeze(0, 0.7));
    auto S = symplectic_of(c).S;
    EXPECT_NEAR(S(0, 0), std::exp(-0.7), 1e-12);
    EXPECT_NEAR(S(1, 1), std::exp(0.7), 1e-12);
    EXPECT_NEAR(std::abs(S(0, 1)) + std::abs(S(1, 0)), 0.0, 1e-12);
}

TEST(Symplectic, SqueezeMatchesGridVarianceScaling) {
    // S(z): Var(Q) scales by e^{-2z}.
    Circuit c(1, 0);
    c.add(gates::prep_vacuum(0));
    c.add(gates::squeeze(0, 0.5));
    auto st = run_circuit(c, {GridAxis::centered(16.0, 1.0 / 64.0)});
    EXPECT_NEAR(expectation(st, Observable::Q2).real(), 0.5 * std::exp(-1.0), 1e-9);
    EXPECT_NEAR(expectation(st, Observable::P2).real(), 0.5 * std::exp(1.0), 1e-9);
}

TEST(Symplectic, QuarterRotation) {
    Circuit c(1, 0);
    c.add(gates::rotation(0, pi / 2));
    auto S = symplectic_of(c).S;
    EXPECT_NEAR(std::abs(S(0, 1)), 1.0, 1e-12);
    EXPECT_NEAR(S(0, 1), -S(1, 0), 1e-12);
    EXPECT_NEAR(std::abs(S(0, 0)) + std::abs(S(1, 1)), 0.0, 1e-12);
    Circuit d(1, 0);
    d.add(gates::phase_shift(0, pi / 2));
    EXPECT_NEAR((symplectic_of(d).S - S.transpose()).norm(), 0.0, 1e-12);
}

TEST(Symplectic, RandomCircuitsPreserveForm) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 4), len(1, 20);
    for (int t = 0; t < 200; ++t) {
        Circuit c(2, 0);
        for (int i = len(rng); i > 0; --i) {
            switch (pick(rng)) {
                case 0: c.add(gates::squeeze(t % 2, 2.0 * u(rng))); break;
                case 1: c.add(gates::rotation((t + i) % 2, pi * u(rng))); break;
                case 2: c.add(gates::beamsplitter(0, 1, pi * u(rng))); break;
                case 3: c.add(gates::shear(i % 2, 1 - i % 2)); break;
                default: {
                    Eigen::MatrixXd A(4, 4);
                    Eigen::MatrixXd B = Eigen::MatrixXd::NullaryExpr(4, 4, [&] { return u(rng); });
                    A = 0.5 * (B + B.transpose());
                    c.add(gates::gaussian({0, 1}, A));
                }
            }
        }
        EXPECT_LT(symplectic_of(c).symplectic_defect(), 1e-10);
    }
}

TEST(CompileDisplacement, UnitNormIsSingleGate) {
    auto c = compile_displacement({0.6, 0.8});
    EXPECT_LE(c.count, 3);
    EXPECT_EQ(c.count, 1);
}

TEST(CompileDisplacement, ExpFiveCount) {
    auto c = compile_displacement({0.0, -std::exp(5.0)});
    EXPECT_EQ(c.count, 2 * 5 + 1 + (c.circuit.gates.front().name == "ROT" ? 2 : 0));
    EXPECT_LE(c.count, 13);
    for (const auto& g : c.circuit.gates)
        if (g.name == "SQUEEZE") {
            EXPECT_NEAR(std::abs(g.param), 1.0, 1e-12);
        }
}

TEST(CompileDisplacement, SandwichAndSymplecticIdentity) {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> lr(0.0, std::log(1e6)), ang(0.0, two_pi);
    for (int t = 0; t < 100; ++t) {
        const double r = std::exp(lr(rng)), th = ang(rng);
        const Vec2 d{r * std::cos(th), r * std::sin(th)};
        auto c = compile_displacement(d);
        EXPECT_LE(c.count, displacement_count_bound(r));
        EXPECT_GE(double(c.count), displacement_complexity_lower(d).f);
        EXPECT_GE(double(c.count), displacement_complexity_lower(d).simplified);
        for (const auto& g : c.circuit.gates) EXPECT_TRUE(validate_bounded(g).ok);
        auto act = symplectic_of(c.circuit);
        EXPECT_LT((act.S - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LT(std::abs(act.displacement(0) - d[0]), 1e-9 * r);
        EXPECT_LT(std::abs(act.displacement(1) - d[1]), 1e-9 * r);
    }
}

TEST(CompileDisplacement, ReproducesCoherentStateOnGrid) {
    for (Vec2 d : {Vec2{3.0, 4.0}, Vec2{-12.0, 5.0}, Vec2{0.0, 19.5}}) {
        Circuit c(1, 0);
        c.add(gates::prep_vacuum(0));
        c.append(compile_displacement(d).circuit);
        auto st = run_circuit(c, {GridAxis::centered(32.0, 1.0 / 512.0)});
        GaussianSum coh = build_state(spec::Vacuum{});
        coh.terms[0] = phased(translated(coh.terms[0], d[1]), d[0]);
        EXPECT_GE(reduce_fidelity(st, coh), 1.0 - 1e-8);
    }
}

TEST(CompileSqueeze, ZeroIsEmpty) {
    auto c = compile_squeeze(0.0);
    EXPECT_EQ(c.count, 0);
    EXPECT_EQ(c.circuit.size(), 0u);
}

TEST(CompileSqueeze, SplitCount) {
    auto c = compile_squeeze_split(3, 1.0 / 32.0);
    EXPECT_EQ(c.count, 3 + 4);
    for (const auto& g : c.circuit.gates) EXPECT_LE(std::abs(g.param), 1.0 + 1e-15);
}

TEST(LowerBound, Values) {
    EXPECT_NEAR(displacement_complexity_lower({1.0, 0.0}).f, std::log(2.0) / (8 * pi), 1e-15);
    const double r = std::exp(4 * pi);
    EXPECT_NEAR(displacement_complexity_lower({r, 0.0}).simplified, 0.0, 1e-12);
    for (double n : {2.0, 10.0, 1e3, 1e6}) EXPECT_LE(displacement_complexity_lower({n, 0.0}).f, compile_displacement({n, 0.0}).count);
}

TEST(OpCount, CombCircuit) {
    for (double D : {0.01, 0.04, 1.0 / 32.0})
        for (int n : {1, 2, 3, 4}) {
            auto r = op_count(comb_circuit(D, n));
            EXPECT_EQ(r.total, 5 * n + static_cast<int>(std::ceil(std::log(1.0 / D))) + 4);
            EXPECT_EQ(r.unitaries + r.preps, r.total);
        }
}

TEST(OpCount, EmptyCircuitCountsPrep) {
    Circuit c(1, 0);
    c.add(gates::prep_vacuum(0));
    EXPECT_EQ(op_count(c).total, 1);
}

TEST(OpCount, HeraldedFormula) {
    auto c = gkp_circuit(0.2, 0.01);
    EXPECT_EQ(T2_formula(8), 5);
    auto r = op_count(c, true, T2_formula(8));
    EXPECT_EQ(r.total, r.unitaries + 5 + 2 * (c.n_modes - 1) + 1 + 2 * c.n_qubits);
    EXPECT_EQ(r.total, 35);
}

TEST(BuildV, FourGates) { EXPECT_EQ(build_V().size(), 4u); }

TEST(TextFormat, RoundTrip) {
    Circuit c(2, 1);
    c.add(gates::prep_vacuum(0));
    c.add(gates::prep_vacuum(1));
    c.add(gates::prep_qubit0(0));
    c.add(gates::squeeze(0, -0.6931471805599453));
    c.add(gates::ctrl_displacement(0, 1, {pi, 0.0}));
    c.add(gates::hadamard(0));
    c.add(gates::shear(0, 1));
    c.add(gates::beamsplitter(0, 1, 0.3));
    c.add(gates::rotation(1, 1.1));
    c.add(gates::homodyne(0));
    const std::string text = to_text(c);
    Circuit d = from_text(text);
    EXPECT_EQ(to_text(d), text);
    ASSERT_EQ(d.size(), c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        EXPECT_EQ(d.gates[i].kind, c.gates[i].kind);
        EXPECT_NEAR((d.gates[i].A - c.gates[i].A).norm(), 0.0, 1e-15);
    }
}

TEST(TextFormat, RejectsGarbage) {
    EXPECT_THROW(from_text("CIRCUIT modes=1 qubits=0\nFROB m0 1\n"), Error);
    EXPECT_THROW(from_text("CIRCUIT modes=1 qubits=0\nDISP m0 9 0\n"), Error);
}
