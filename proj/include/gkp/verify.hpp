#pragma once
// Invariant suites shared by the command-line `verify` command and the tests:
// closed-form formulas, window (tail) masses, per-gate moment limits and
// heralding stability.  Each suite yields flat rows for CSV output.

#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "circuit.hpp"
#include "protocols.hpp"
#include "quadrature.hpp"
#include "sim.hpp"
#include "states.hpp"

namespace gkp {

struct VerifyRow {
    std::string suite;
    std::vector<std::pair<std::string, double>> params;
    double measured = 0.0;
    double paper_rhs = 0.0;
    Verdict verdict = Verdict::holds;
    std::string name;
};

inline VerifyRow row_of(const std::string& suite, const BoundReport& r) {
    return {suite, r.params, r.lhs.value_or(std::nan("")), r.rhs, r.verdict, r.name};
}

inline std::string params_text(const std::vector<std::pair<std::string, double>>& p) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ";" : "") << p[i].first << "=" << p[i].second;
    return os.str();
}

inline bool all_ok(const std::vector<VerifyRow>& rows) {
    for (const auto& r : rows)
        if (r.verdict == Verdict::violated) return false;
    return true;
}

// ----- formulas -----------------------------------------------------------------

// <chi_Delta(z), chi_Delta(z')> by adaptive quadrature vs e^{-(z-z')^2/(4 Delta^2)}.
inline std::vector<VerifyRow> verify_overlap_lemma(std::vector<double> deltas = {0.05, 0.1, 0.5}, int zmax = 5) {
    std::vector<VerifyRow> rows;
    for (double D : deltas)
        for (int z = -zmax; z <= zmax; ++z)
            for (int w = -zmax; w <= zmax; ++w) {
                const GaussianTerm a = psi_term(D, z), b = psi_term(D, w);
                auto f = [&](double x) { return (std::conj(a(x)) * b(x)).real(); };
                // Integrate over the product's support, split at the midpoint.
                const double mid = 0.5 * (z + w), half = 0.5 * std::abs(z - w) + 12.0 * D;
                const double quad = integrate(f, mid - half - 8.0 * D, mid, 1e-14) + integrate(f, mid, mid + half + 8.0 * D, 1e-14);
                const double closed = std::exp(-sq(double(z - w)) / (4.0 * D * D));
                rows.push_back(row_of("formulas", check_le("overlap_lemma", std::abs(quad - closed), 1e-10, 0.0, true,
                                                            std::numeric_limits<double>::infinity(), {{"Delta", D}, {"z", z}, {"z'", w}})));
            }
    return rows;
}

inline std::vector<VerifyRow> verify_series(int count = 50, double eps = 0.25) {
    std::vector<VerifyRow> rows;
    const SeriesMode modes[] = {SeriesMode::centered, SeriesMode::half_shift, SeriesMode::abs_plus_eps, SeriesMode::abs_minus_eps_nonzero};
    const char* names[] = {"series_centered", "series_half_shift", "series_abs_plus_eps", "series_abs_minus_eps"};
    for (int i = 0; i < count; ++i) {
        const double c = std::pow(10.0, -4.0 + 6.0 * double(i) / double(count - 1));
        for (int m = 0; m < 4; ++m) {
            const auto s = gaussian_series(c, modes[m], eps);
            std::vector<std::pair<std::string, double>> prm{{"c", c}, {"eps", eps}};
            const double tol = 1e-12 * std::max(1.0, s.value);
            if (std::isfinite(s.lower_bound))
                rows.push_back(row_of("formulas", check_ge(std::string(names[m]) + "_lower", s.value, s.lower_bound, tol, true, -1e300, prm)));
            if (std::isfinite(s.upper_bound))
                rows.push_back(row_of("formulas", check_le(std::string(names[m]) + "_upper", s.value, s.upper_bound, tol, true, 1e300, prm)));
        }
    }
    return rows;
}

inline std::vector<VerifyRow> verify_normalization(std::vector<double> grid = {0.01, 0.05, 0.1, 0.2}) {
    std::vector<VerifyRow> rows;
    for (double k : grid)
        for (double D : grid) {
            const auto nb = normalization_bounds(k, D, 8);
            std::vector<std::pair<std::string, double>> prm{{"kappa", k}, {"Delta", D}};
            rows.push_back(row_of("formulas", check_ge("norm_C_kappa_lower", nb.C_k_inv_sq, nb.C_k_inv_sq_lb, 1e-14, true, -1e300, prm)));
            rows.push_back(row_of("formulas", check_le("norm_C_kappa_upper", nb.C_k_inv_sq, nb.C_k_inv_sq_ub, 1e-14, true, 1e300, prm)));
            rows.push_back(row_of("formulas", check_le("norm_ratio", nb.ratio, 1.0, 1e-14, true, 1e300, prm)));
        }
    return rows;
}

inline std::vector<VerifyRow> verify_formulas() {
    auto rows = verify_overlap_lemma();
    for (auto& r : verify_series()) rows.push_back(std::move(r));
    for (auto& r : verify_normalization()) rows.push_back(std::move(r));
    return rows;
}

// ----- window masses ----------------------------------------------------------------

// Most of the grid is vacuous at desk scale (5 sqrt(kappa) + 7 sqrt(Delta) >= 1);
// the smallest kappa and Delta give binding rows.
inline std::vector<VerifyRow> verify_tails(std::vector<double> kappas = {0.002, 0.01, 0.05, 0.2}, std::vector<double> deltas = {0.001, 0.004, 0.009},
                                           std::vector<double> radii = {1, 2, 5, 10}) {
    std::vector<VerifyRow> rows;
    for (double k : kappas)
        for (double D : deltas) {
            const GaussianSum g = normalized(build_state(spec::GkpPeakwise{k, D}));
            const GaussianSum gp = normalized(momentum_rep(spec::GkpPeakwise{k, D}));
            const bool pre = tail_preconditions(k, D);
            for (double R : radii) {
                std::vector<std::pair<std::string, double>> prm{{"kappa", k}, {"Delta", D}, {"R", R}};
                const double mp = overlap(g, g, Interval{-R, R}).real();
                const double mm = overlap(gp, gp, Interval{-R, R}).real();
                rows.push_back(row_of("tails", check_le("tail_position", mp, tail_bound_position(k, D, R), 1e-10, pre, 1.0, prm)));
                rows.push_back(row_of("tails", check_le("tail_momentum", mm, tail_bound_momentum(k, D, R), 1e-10, pre, 1.0, prm)));
            }
        }
    return rows;
}

// ----- moment limits -------------------------------------------------------------------

inline MomentVector measure_moments(const HybridGridState& st) {
    MomentVector m;
    m.s = Eigen::VectorXd(2);
    m.s << expectation(st, Observable::Q).real(), expectation(st, Observable::P).real();
    m.energy = expectation(st, Observable::H).real();
    return m;
}

// Random strict gate on one mode and one qubit, drawn from the displacement,
// controlled displacement, squeeze, phase-shift, qubit and Gaussian families
// with strengths small enough for the moment grid.
inline Gate random_strict_gate(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> pick(0, 5);
    auto vec = [&](double r) {
        const double ang = pi * u(rng), rad = r * 0.5 * (1.0 + u(rng));
        return Vec2{rad * std::cos(ang), rad * std::sin(ang)};
    };
    switch (pick(rng)) {
        case 0: return gates::displacement(0, vec(1.5));
        case 1: return gates::ctrl_displacement(0, 0, vec(1.5));
        case 2: return gates::squeeze(0, 0.25 * u(rng));
        case 3: return gates::rotation(0, pi * u(rng));
        case 4: {
            const double t = pi * u(rng), p = pi * u(rng);
            Eigen::Matrix2cd U;
            U << std::cos(t), -std::exp(cplx(0, p)) * std::sin(t), std::exp(cplx(0, -p)) * std::sin(t), std::cos(t);
            return gates::qubit_unitary(0, U);
        }
        default: {
            Eigen::MatrixXd A(2, 2);
            const double a = 0.2 * u(rng), b = 0.2 * u(rng), c = 0.2 * u(rng);
            A << a, b, b, c;
            return gates::gaussian({0}, A);
        }
    }
}

inline GridAxis moment_axis() { return GridAxis::centered(64.0, 1.0 / 32.0); }

// Runs `trials` random circuits of `max_gates` gates (1 mode + 1 qubit) on the
// grid, checking every step and the final energy against e^{8 pi T} (m + 2), m = 1.
inline std::vector<VerifyRow> verify_moments(int max_gates = 8, int trials = 50, std::uint64_t seed = 1) {
    std::vector<VerifyRow> rows;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> len(1, max_gates);
    for (int t = 0; t < trials; ++t) {
        const int T = len(rng);
        Circuit c(1, 1);
        c.add(gates::prep_vacuum(0));
        c.add(gates::prep_qubit0(0));
        HybridGridState st = run_circuit(c, {moment_axis()});  // vacuum (x) |0>
        for (int g = 0; g < T; ++g) c.add(random_strict_gate(rng));
        MomentVector before = measure_moments(st);
        bool step_ok = true;
        double worst = 0.0;
        for (std::size_t i = 2; i < c.gates.size(); ++i) {
            apply_inplace(st, c.gates[i]);
            MomentVector after = measure_moments(st);
            MomentCheck mc = gate_moment_check(c.gates[i], before, after);
            if (!mc.ok()) step_ok = false;
            worst = std::max(worst, after.energy / (std::exp(2.0 * two_pi) * before.energy + 2.0 * two_pi * before.s.norm() + sq(two_pi)));
            before = after;
        }
        std::vector<std::pair<std::string, double>> prm{{"trial", t}, {"T", T}};
        BoundReport steps{"moment_steps", prm, 1.0, worst, step_ok ? Verdict::holds : Verdict::violated, "max energy ratio to generic limit"};
        rows.push_back(row_of("moments", steps));
        rows.push_back(row_of("moments", check_le("moment_energy_limit", before.energy, energy_limit(T, 1), 0.0, true, 1e300, prm)));
    }
    return rows;
}

// ----- heralding stability ------------------------------------------------------------------

struct StabilityCase {
    std::string name;
    StabilityReport report;
};

// Reference input: exact comb Sha_{8, Delta}; target the GKP state at kappa.
inline std::vector<StabilityCase> stability_cases(double kappa = 0.2, double Delta = 0.01, int L = 8) {
    const GaussianSum comb = build_state(spec::Comb{L, Delta});
    const GaussHybridState a = gauss_state(comb);
    const GaussianSum target = normalized(build_state(spec::GkpPeakwise{kappa, Delta}));
    std::vector<StabilityCase> out;
    {
        GaussianSum s = comb;
        for (auto& t : s.terms) t = translated(t, 0.05);
        out.push_back({"shift_0.05", stability_audit(a, gauss_state(s), target, kappa, L, Delta)});
    }
    out.push_back({"delta_x1.2", stability_audit(a, gauss_state(build_state(spec::Comb{L, 1.2 * Delta})), target, kappa, L, Delta)});
    {
        GaussHybridState b;
        b.modes = 1;
        b.qubits = 1;
        GaussianSum flipped = comb;
        for (auto& t : flipped.terms) t = phased(t, pi);
        b.branches = {scaled(comb, std::sqrt(0.99)), scaled(flipped, std::sqrt(0.01))};
        out.push_back({"leakage_0.01", stability_audit(a, b, target, kappa, L, Delta)});
    }
    return out;
}

inline std::vector<VerifyRow> verify_stability(double kappa = 0.2, double Delta = 0.01, int L = 8) {
    std::vector<VerifyRow> rows;
    for (const auto& c : stability_cases(kappa, Delta, L)) {
        VerifyRow a = row_of("stability", c.report.acceptance), b = row_of("stability", c.report.closeness);
        a.name += ":" + c.name;
        b.name += ":" + c.name;
        rows.push_back(a);
        rows.push_back(b);
    }
    return rows;
}

}  // namespace gkp
