#pragma once
// Closed-form evaluators for the fidelity, probability and complexity bounds,
// the per-gate moment-limit checker, and the BoundReport verdict record.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "circuit.hpp"
#include "core.hpp"

namespace gkp {

enum class Verdict { holds, violated, vacuous, precondition_unmet };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::holds: return "holds";
        case Verdict::violated: return "violated";
        case Verdict::vacuous: return "vacuous";
        case Verdict::precondition_unmet: return "precondition_unmet";
    }
    return "unknown";
}

struct BoundReport {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    double rhs = 0.0;
    std::optional<double> lhs;
    Verdict verdict = Verdict::holds;
    std::string note;

    bool ok() const { return verdict != Verdict::violated; }
};

// Verdict for a claim "lhs <= rhs".  vacuous: the rhs is no constraint
// (rhs >= trivial_max); violated only if the preconditions hold and lhs
// exceeds rhs by more than tol.
inline BoundReport check_le(std::string name, double lhs, double rhs, double tol = 0.0, bool preconditions = true,
                            double trivial_max = std::numeric_limits<double>::infinity(),
                            std::vector<std::pair<std::string, double>> params = {}) {
    BoundReport r{std::move(name), std::move(params), rhs, lhs, Verdict::holds, ""};
    if (!preconditions) r.verdict = Verdict::precondition_unmet;
    else if (rhs >= trivial_max) r.verdict = Verdict::vacuous;
    else if (lhs > rhs + tol) r.verdict = Verdict::violated;
    return r;
}

// Verdict for a claim "lhs >= rhs"; vacuous when rhs <= trivial_min.
inline BoundReport check_ge(std::string name, double lhs, double rhs, double tol = 0.0, bool preconditions = true,
                            double trivial_min = -std::numeric_limits<double>::infinity(),
                            std::vector<std::pair<std::string, double>> params = {}) {
    BoundReport r{std::move(name), std::move(params), rhs, lhs, Verdict::holds, ""};
    if (!preconditions) r.verdict = Verdict::precondition_unmet;
    else if (rhs <= trivial_min) r.verdict = Verdict::vacuous;
    else if (lhs < rhs - tol) r.verdict = Verdict::violated;
    return r;
}

// ----- moment limits ----------------------------------------------------------

struct MomentVector {
    Eigen::VectorXd s;  // (<Q_1>, <P_1>, ...)
    double energy = 0.0;  // tr(H rho), H = sum_j Q_j^2 + P_j^2
};

// E_m(T) = e^{8 pi T} (m + 2)
inline double energy_limit(int T, int m) { return std::exp(8.0 * pi * T) * (m + 2); }

struct MomentCheck {
    BoundReport displacement;  // generic: ||s'|| <= e^{2pi}||s|| + 2pi
    BoundReport energy;        // generic: E' <= e^{4pi} E + 4pi ||s|| + (2pi)^2
    std::optional<BoundReport> specific;  // per-family tighter statement
    bool ok() const { return displacement.ok() && energy.ok() && (!specific || specific->ok()); }
};

// Relative tolerance for numerically measured moments.
inline MomentCheck gate_moment_check(const Gate& g, const MomentVector& before, const MomentVector& after, double rel_tol = 1e-7) {
    const double s0 = before.s.norm(), s1 = after.s.norm();
    MomentCheck c;
    double rhs_s = std::exp(two_pi) * s0 + two_pi;
    c.displacement = check_le("moment_displacement", s1, rhs_s, rel_tol * (1.0 + rhs_s));
    double rhs_e = std::exp(2.0 * two_pi) * before.energy + 2.0 * two_pi * s0 + sq(two_pi);
    c.energy = check_le("moment_energy", after.energy, rhs_e, rel_tol * (1.0 + rhs_e));
    if (g.kind == GateKind::Displacement || g.kind == GateKind::CtrlDisplacement) {
        double rhs = s0 + std::hypot(g.d[0], g.d[1]);
        c.specific = check_le("moment_displacement_gate", s1, rhs, rel_tol * (1.0 + rhs));
    } else if (g.kind == GateKind::GaussianUnitary && (g.name == "PHASE" || g.name == "ROT")) {
        BoundReport r{"moment_phase_shift_energy", {}, before.energy, after.energy, Verdict::holds, "energy preserved"};
        if (std::abs(after.energy - before.energy) > 1e-8 * (1.0 + before.energy)) r.verdict = Verdict::violated;
        c.specific = r;
    } else if (g.kind == GateKind::GaussianUnitary) {
        double rhs = std::exp(2.0 * operator_norm_sym(g.A)) * before.energy;
        c.specific = check_le("moment_gaussian_energy", after.energy, rhs, rel_tol * (1.0 + rhs));
    } else if (g.kind == GateKind::QubitUnitary) {
        // Qubit gates leave the oscillator marginal unchanged.
        BoundReport r{"moment_qubit_gate", {}, before.energy, after.energy, Verdict::holds, "oscillator moments unchanged"};
        if (std::abs(after.energy - before.energy) > 1e-8 * (1.0 + before.energy) || (after.s - before.s).norm() > 1e-8 * (1.0 + s0))
            r.verdict = Verdict::violated;
        c.specific = r;
    }
    return c;
}

// ----- protocol bounds --------------------------------------------------------

inline double comb_error_bound(double Delta) { return 17.0 * std::sqrt(Delta); }

struct GaussBounds {
    double p_lb;            // 1/8 (1 - 2e^{-k^2L^2/256}) - 5/2 sqrt(D) - xi/2
    double p_lb_alt;        // same with 1/4 (1 - 2e^{-k^2L^2/16})
    double p_lb_exact;      // 1/8 (1 - 2e^{-k^2L^2/256}): exact comb input
    double err_ub;          // (5 sqrt(D) + xi) / (1/4 (1 - 2e^{-k^2L^2/16})) + 6 sqrt(D) + 6 k sqrt(L) + 7 e^{-k^2L^2/128}
    double err_ub_proof;    // (5 sqrt(D) + xi) / (1/8 (1 - 2e^{-k^2L^2/256})) + 6 k sqrt(L) + 6 sqrt(D) + 7 e^{-k^2L^2/64}
    bool preconditions;     // kappa, Delta in (0, 1/4), L in 8N, xi > 0
};

inline GaussBounds gauss_bounds(double kappa, double Delta, int L, double xi) {
    const double kl = sq(kappa * L);
    const double d8 = 0.125 * (1.0 - 2.0 * std::exp(-kl / 256.0));
    const double d4 = 0.25 * (1.0 - 2.0 * std::exp(-kl / 16.0));
    const double sd = std::sqrt(Delta);
    GaussBounds b{};
    b.p_lb_exact = d8;
    b.p_lb = d8 - 2.5 * sd - 0.5 * xi;
    b.p_lb_alt = d4 - 2.5 * sd - 0.5 * xi;
    b.err_ub = (5.0 * sd + xi) / d4 + 6.0 * sd + 6.0 * kappa * std::sqrt(double(L)) + 7.0 * std::exp(-kl / 128.0);
    b.err_ub_proof = (5.0 * sd + xi) / d8 + 6.0 * kappa * std::sqrt(double(L)) + 6.0 * sd + 7.0 * std::exp(-kl / 64.0);
    b.preconditions = kappa > 0 && kappa < 0.25 && Delta > 0 && Delta < 0.25 && L > 0 && L % 8 == 0 && xi >= 0;
    return b;
}

// Conditional-overlap lower bound of the exact-comb instrument lemma.
inline double conditional_overlap_lb(double kappa, int L) {
    return 1.0 - 1.5 * sq(kappa) * L - 4.0 * std::exp(-sq(kappa * L) / 32.0);
}

struct GkpBounds {
    double p_lb = 0.1;
    double err_ub;
    bool preconditions;  // kappa, Delta in (0, 1e-6)
};
inline GkpBounds gkp_bounds(double kappa, double Delta) {
    return {0.1, 190.0 * std::sqrt(Delta) + 24.0 * std::cbrt(kappa), kappa > 0 && kappa < 1e-6 && Delta > 0 && Delta < 1e-6};
}

// ----- effective squeezing --------------------------------------------------------

// Delta = sqrt(log 1/|tr S rho|^2); infinite when the trace vanishes.
inline double effective_squeezing(cplx trS) {
    double m = std::abs(trS);
    require(m <= 1.0 + 1e-9, ErrorKind::numeric, "|tr S rho| exceeds 1");
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::max(0.0, -std::log(std::min(1.0, m * m))));
}
inline double squeezing_bound_P(double kappa, double Delta) { return 39.0 * std::pow(Delta, 0.25) + 16.0 * std::pow(kappa, 1.0 / 6.0); }
inline double squeezing_bound_Q(double kappa, double Delta) { return 41.0 * std::pow(Delta, 0.25) + 16.0 * std::pow(kappa, 1.0 / 6.0); }

// ----- tails and distance lower bound -----------------------------------------------

inline double tail_bound_position(double kappa, double Delta, double R) { return 4.0 * kappa * R + 5.0 * std::sqrt(kappa) + 7.0 * std::sqrt(Delta); }
inline double tail_bound_momentum(double kappa, double Delta, double R) { return 2.0 * Delta * R + 5.0 * std::sqrt(kappa) + 7.0 * std::sqrt(Delta); }
inline bool tail_preconditions(double kappa, double Delta) { return kappa > 0 && kappa < 0.25 && Delta > 0 && Delta < 0.01; }

// ||rho - GKP||_1 >= 2 (tr(Pi rho) - tr(Pi GKP)) for the window projector Pi.
inline double gkp_distance_lower(double tail_pos, double tail_mom, double kappa, double Delta, double R) {
    double a = 2.0 * (tail_pos - tail_bound_position(kappa, Delta, R));
    double b = 2.0 * (tail_mom - tail_bound_momentum(kappa, Delta, R));
    return std::max({0.0, a, b});
}

// ----- complexity lower bounds ---------------------------------------------------------

struct LowerBounds {
    double unitary_lb;            // (1/8pi)(log 1/k + log 1/D) - 1
    double heralded_lb;           // (1/200)(log 1/k + log 1/D) - 1
    double heralded_lb_presimp;   // max over k, D of (1/4pi) log 1/x + (3/8pi) log p - 1
    bool unitary_preconditions;   // 20 sqrt(k) + 28 sqrt(D) <= 1
    bool heralded_preconditions;  // 20 sqrt(k) + 28 sqrt(D) <= p and eps <= p
};

inline LowerBounds lower_bounds(double kappa, double Delta, double p, double eps) {
    const double lk = std::log(1.0 / kappa), ld = std::log(1.0 / Delta);
    LowerBounds b{};
    b.unitary_lb = (lk + ld) / (8.0 * pi) - 1.0;
    b.heralded_lb = (lk + ld) / 200.0 - 1.0;
    b.heralded_lb_presimp = std::max(lk, ld) / (4.0 * pi) + 3.0 * std::log(p) / (8.0 * pi) - 1.0;
    const double c = 20.0 * std::sqrt(kappa) + 28.0 * std::sqrt(Delta);
    b.unitary_preconditions = c <= 1.0;
    b.heralded_preconditions = c <= p && eps <= p && p > 0.0 && p <= 1.0;
    return b;
}

}  // namespace gkp
