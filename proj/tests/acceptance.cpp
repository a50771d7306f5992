// Acceptance suite: one [PASS]/[FAIL] line per criterion, with the measured
// quantities and wall time.  Exit status is nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "frozen_values.hpp"
#include "gkp/bounds.hpp"
#include "gkp/circuit.hpp"
#include "gkp/protocols.hpp"
#include "gkp/sim.hpp"
#include "gkp/verify.hpp"

using namespace gkp;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
    std::vector<double> numbers;  // every reported number, for the determinism rerun
};

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

void count_verdicts(const std::vector<VerifyRow>& rows, Outcome& o) {
    int holds = 0, vacuous = 0, unmet = 0, violated = 0;
    for (const auto& r : rows) {
        switch (r.verdict) {
            case Verdict::holds: ++holds; break;
            case Verdict::vacuous: ++vacuous; break;
            case Verdict::precondition_unmet: ++unmet; break;
            case Verdict::violated: ++violated; break;
        }
    }
    o.pass = o.pass && violated == 0 && !rows.empty();
    o.detail += std::to_string(rows.size()) + " rows: " + std::to_string(holds) + " holds, " + std::to_string(vacuous) + " vacuous, " +
                std::to_string(unmet) + " precondition_unmet, " + std::to_string(violated) + " violated";
}

const BoundReport& verdict(const ProtocolReport& r, const std::string& name) {
    for (const auto& v : r.verdicts)
        if (v.name == name) return v;
    throw std::runtime_error("missing verdict " + name);
}

// ----- criteria ---------------------------------------------------------------------

Outcome overlap_lemma() {
    Outcome o;
    count_verdicts(verify_overlap_lemma({0.05, 0.1, 0.5}, 5), o);
    return o;
}

Outcome series_bracketing() {
    Outcome o;
    count_verdicts(verify_series(50), o);
    return o;
}

Outcome normalization_sandwich() {
    Outcome o;
    count_verdicts(verify_normalization({0.01, 0.05, 0.1, 0.2}), o);
    return o;
}

Outcome window_masses() {
    Outcome o;
    count_verdicts(verify_tails({0.002, 0.01, 0.05, 0.2}, {0.001, 0.004, 0.009}, {1, 2, 5, 10}), o);
    return o;
}

Outcome comb_preparation() {
    Outcome o;
    double worst_overlap = 1.0, worst_oracle = 0.0, worst_frozen = 0.0;
    int vacuous = 0, holds = 0;
    const double deltas[] = {0.01, 0.04};
    for (int di = 0; di < 2; ++di)
        for (int n = 1; n <= 4; ++n) {
            const double D = deltas[di];
            auto g = run_comb(D, n, Backend::gauss);
            auto r = run_comb(D, n, Backend::grid);
            auto fine = run_comb(D, n, Backend::grid, 2.0);
            const int expected_ops = 5 * n + static_cast<int>(std::ceil(std::log(1.0 / D))) + 4;
            if (g.report.ops.total != expected_ops || r.report.ops.total != expected_ops) o.pass = false;
            const double F = g.report.fidelity;
            if (F < 1.0 - 17.0 * std::sqrt(D) / 2.0) o.pass = false;
            const auto& v = verdict(g.report, "comb_fidelity");
            if (!v.ok()) o.pass = false;
            (v.verdict == Verdict::vacuous ? vacuous : holds)++;
            const double ov = std::norm(inner(to_grid(*g.gauss, r.grid->axes), *r.grid));
            worst_overlap = std::min(worst_overlap, ov);
            worst_oracle = std::max({worst_oracle, std::abs(F - fine.report.fidelity), std::abs(r.report.fidelity - fine.report.fidelity)});
            worst_frozen = std::max(worst_frozen, std::abs(F - frozen::comb_F[di][n - 1]));
            o.numbers.insert(o.numbers.end(), {F, r.report.fidelity, fine.report.fidelity, ov, double(g.report.ops.total)});
        }
    if (worst_overlap < 1.0 - 1e-6 || worst_oracle > 1e-4 || worst_frozen > 1e-4) o.pass = false;
    o.detail = "ops exact; F bound " + std::to_string(holds) + " holds/" + std::to_string(vacuous) + " vacuous; min backend overlap " +
               fmt("%.3e", 1.0 - worst_overlap) + " below 1; |F - F_fine| " + fmt("%.2e", worst_oracle) + "; |F - oracle| " + fmt("%.2e", worst_frozen);
    return o;
}

Outcome instrument_equivalence() {
    Outcome o;
    const double kappa = 0.3, D = 0.05;
    const int L = 8;
    const Interval A{-L / 8.0 - 0.5, L / 8.0 + 0.5};
    const GaussianSum sha = build_state(spec::Comb{L, D});
    const GaussianSum eta = eta_state(kappa);
    const GridAxis in_axis = GridAxis::centered(6.0, 1.0 / 128.0), meter_axis = GridAxis::centered(24.0, 1.0 / 16.0);
    auto h = gaussify_two_mode_grid(prepare(sha, in_axis), kappa, meter_axis, A);
    double sup = 0.0;
    for (long r = 0; r < h.outcome_axis.n; ++r) sup = std::max(sup, std::abs(h.pdf[r] - instrument_p(eta, sha, h.outcome_axis.x(r))));

    // Grid ensemble: shift each conditional state by its rounded outcome and
    // overlap it with the normalised pointwise product, integrating per cell.
    const GaussianSum ideal = pointwise_product(eta, sha);
    const GridAxis& ax = h.other_axis;
    std::vector<cplx> ideal_grid(ax.n);
    double in2 = 0.0;
    for (long j = 0; j < ax.n; ++j) in2 += std::norm(ideal_grid[j] = ideal.eval(ax.x(j)));
    for (auto& v : ideal_grid) v /= std::sqrt(in2 * ax.dx);
    const long per_unit = std::lround(1.0 / ax.dx);
    double num = 0.0, den = 0.0;
    for (const auto& c : cells_of(A))
        for (long r = h.first; r < h.first + h.count; ++r) {
            const double x = h.outcome_axis.x(r);
            if (x < c.lo - 1e-12 || x > c.hi + 1e-12) continue;
            const bool edge = std::abs(x - c.lo) < 1e-12 || std::abs(x - c.hi) < 1e-12;
            const double w = (edge ? 0.5 : 1.0) * h.outcome_axis.dx * h.pdf[r];
            double m2 = 0.0;
            for (const auto& b : h.cond) {
                cplx s = 0.0;
                for (long j = 0; j < ax.n; ++j) {
                    const long src = j + c.k * per_unit;  // psi(y + k)
                    if (src >= 0 && src < ax.n) s += std::conj(ideal_grid[j]) * b[(r - h.first) * ax.n + src];
                }
                m2 += std::norm(s * ax.dx);
            }
            num += w * m2;
            den += w;
        }
    const double grid_overlap = num / den;
    const auto prof = instrument_profile(eta, sha, A);
    const double diff = std::abs(grid_overlap - prof.conditional_overlap);
    o.pass = sup <= 1e-6 && diff <= 1e-4;
    o.detail = "pdf sup-norm " + fmt("%.2e", sup) + "; conditional overlap formula " + fmt("%.8f", prof.conditional_overlap) + " vs grid " +
               fmt("%.8f", grid_overlap) + " (diff " + fmt("%.2e", diff) + ")";
    o.numbers = {sup, prof.conditional_overlap, grid_overlap, prof.pA, den};
    return o;
}

Outcome gaussification_acceptance() {
    Outcome o;
    const double kappa = 0.2, D = 0.01, eps = std::sqrt(D);
    int holds = 0, vacuous = 0;
    for (int L : {8, 64, 128}) {
        const GaussianSum in = normalized(build_state(spec::TruncatedComb{L, D, eps}));
        GaussifyOptions opt;
        opt.Delta = D;
        auto res = run_gaussification(in, kappa, L, opt);
        const double p = res.report.p_acc;
        const double p_rhs = 0.125 * (1.0 - 2.0 * std::exp(-kappa * kappa * L * L / 256.0));
        const auto pv = check_ge("p_acc_exact_input", p, p_rhs, 1e-12, true, 0.0);
        const auto prof = instrument_profile(eta_state(kappa), in, res.ensemble.omega);
        const double co_rhs = conditional_overlap_lb(kappa, L);
        const auto cv = check_ge("conditional_overlap", prof.conditional_overlap, co_rhs, 1e-12, true, 0.0);
        for (const auto* v : {&pv, &cv}) {
            if (!v->ok()) o.pass = false;
            (v->verdict == Verdict::vacuous ? vacuous : holds)++;
        }
        o.detail += "L=" + std::to_string(L) + ": p_acc " + fmt("%.4f", p) + " vs " + fmt("%.4f", p_rhs) + " (" + to_string(pv.verdict) +
                    "), overlap " + fmt("%.4f", prof.conditional_overlap) + " vs " + fmt("%.3g", co_rhs) + " (" + to_string(cv.verdict) + "); ";
        o.numbers.insert(o.numbers.end(), {p, prof.conditional_overlap, prof.pA});
    }
    o.detail += std::to_string(holds) + " holds, " + std::to_string(vacuous) + " vacuous";
    return o;
}

Outcome gkp_end_to_end() {
    Outcome o;
    struct Case {
        double kappa, Delta, p_oracle, F_oracle;
    };
    const Case cases[] = {{0.2, 0.01, frozen::gkp_p_02_001, frozen::gkp_F_02_001}, {0.1, 0.0025, frozen::gkp_p_01_00025, frozen::gkp_F_01_00025}};
    const char* names[] = {"gkp_fidelity", "gkp_Delta_P", "gkp_Delta_Q", "gkp_p_acc", "gkp_p_acc_gaussify_statement", "gkp_p_acc_gaussify_alt_constants"};
    for (const auto& c : cases) {
        auto r = run_gkp(c.kappa, c.Delta).report;
        const double dp = std::abs(r.p_acc - c.p_oracle), dF = std::abs(r.fidelity - c.F_oracle);
        if (dp > 1e-3 || dF > 1e-3) o.pass = false;
        o.detail += "(" + fmt("%g", c.kappa) + "," + fmt("%g", c.Delta) + "): p_acc " + fmt("%.6f", r.p_acc) + " F " + fmt("%.6f", r.fidelity) +
                    " Delta_P " + fmt("%.4f", r.Delta_P) + " Delta_Q " + fmt("%.4f", r.Delta_Q) + " oracle diff " + fmt("%.1e", std::max(dp, dF)) + " [";
        for (const char* n : names) {
            const auto& v = verdict(r, n);
            if (!v.ok()) o.pass = false;
            o.detail += std::string(n).substr(4) + "=" + to_string(v.verdict) + (std::string(n) == names[5] ? "" : " ");
        }
        o.detail += "]; ";
        o.numbers.insert(o.numbers.end(), {r.p_acc, r.fidelity, r.Delta_P, r.Delta_Q, r.xi, r.td_upper, double(r.ops.total)});
    }
    return o;
}

Outcome compiler() {
    Outcome o;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> lr(0.0, std::log(1e6)), ang(0.0, two_pi);
    int grid_checked = 0, worst_slack = 1 << 30;
    double worst_disp = 0.0, worst_fid = 1.0;
    const GridAxis axis = GridAxis::centered(32.0, 1.0 / 512.0);
    for (int t = 0; t < 100; ++t) {
        const double r = std::exp(lr(rng)), th = ang(rng);
        const Vec2 d{r * std::cos(th), r * std::sin(th)};
        const auto c = compile_displacement(d);
        const auto lo = displacement_complexity_lower(d);
        if (c.count > displacement_count_bound(r) || double(c.count) < lo.simplified) o.pass = false;
        worst_slack = std::min(worst_slack, displacement_count_bound(r) - c.count);
        const auto act = symplectic_of(c.circuit);
        const double s_err = (act.S - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff();
        const double d_err = std::max(std::abs(act.displacement(0) - d[0]), std::abs(act.displacement(1) - d[1])) / std::max(1.0, r);
        worst_disp = std::max({worst_disp, s_err, d_err});
        if (r <= 20.0) {
            Circuit full(1, 0);
            full.add(gates::prep_vacuum(0));
            full.append(c.circuit);
            auto st = run_circuit(full, {axis});
            GaussianSum coh = build_state(spec::Vacuum{});
            coh.terms[0] = phased(translated(coh.terms[0], d[1]), d[0]);
            worst_fid = std::min(worst_fid, reduce_fidelity(st, coh));
            ++grid_checked;
        }
    }
    if (worst_disp > 1e-9 || worst_fid < 1.0 - 1e-8) o.pass = false;
    o.detail = "100 vectors; min upper-bound slack " + std::to_string(worst_slack) + "; symplectic defect " + fmt("%.1e", worst_disp) + "; " +
               std::to_string(grid_checked) + " grid runs, min fidelity 1 - " + fmt("%.1e", 1.0 - worst_fid);
    return o;
}

Outcome moment_limits() {
    Outcome o;
    count_verdicts(verify_moments(8, 50, 1), o);
    return o;
}

Outcome heralding_stability() {
    Outcome o;
    const auto cases = stability_cases();
    for (const auto& c : cases) {
        const auto& s = c.report;
        if (!s.acceptance.ok() || !s.closeness.ok()) o.pass = false;
        o.detail += c.name + ": delta " + fmt("%.4f", s.delta) + " gamma " + fmt("%.4f", s.gamma) + " (" + to_string(s.acceptance.verdict) + "/" +
                    to_string(s.closeness.verdict) + "); ";
    }
    return o;
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"overlap_lemma", overlap_lemma},
        {"gaussian_series_bracketing", series_bracketing},
        {"normalization_sandwich", normalization_sandwich},
        {"window_mass_bounds", window_masses},
        {"comb_preparation", comb_preparation},
        {"instrument_equivalence", instrument_equivalence},
        {"gaussification_acceptance", gaussification_acceptance},
        {"gkp_end_to_end", gkp_end_to_end},
        {"displacement_compiler", compiler},
        {"moment_limits", moment_limits},
        {"heralding_stability", heralding_stability},
    };
    int failures = 0;
    std::vector<std::vector<double>> first_numbers;
    auto report = [&](const char* name, const Outcome& o, double seconds) {
        std::printf("[%s] %s  (%.1f s) %s\n", o.pass ? "PASS" : "FAIL", name, seconds, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    };
    auto timed = [](const std::function<Outcome()>& f, double& seconds) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return o;
    };
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        double s = 0.0;
        Outcome o = timed(criteria[i].run, s);
        if (i >= 4 && i <= 7) first_numbers.push_back(o.numbers);
        report(criteria[i].name, o, s);
    }
    // Rerun the protocol criteria and compare every number.
    double s = 0.0;
    Outcome det = timed(
        [&] {
            Outcome o;
            double worst = 0.0;
            std::size_t count = 0;
            for (std::size_t i = 4; i <= 7; ++i) {
                const auto again = criteria[i].run().numbers;
                const auto& before = first_numbers[i - 4];
                if (again.size() != before.size() || before.empty()) {
                    o.pass = false;
                    continue;
                }
                for (std::size_t j = 0; j < again.size(); ++j) worst = std::max(worst, std::abs(again[j] - before[j]));
                count += again.size();
            }
            if (worst > 1e-12) o.pass = false;
            o.detail = std::to_string(count) + " numbers from criteria 5-8, max difference " + fmt("%.1e", worst);
            return o;
        },
        s);
    report("determinism", det, s);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
