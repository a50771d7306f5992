#pragma once
// Analytic state library: squeezed vacua, combs, approximate GKP states in
// their peak-wise, point-wise, truncated and momentum-space forms, together
// with the scalar quantities (normalisation sums, Gaussian series, tail masses,
// convolution integrals) that the protocol analysis is built from.

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"
#include "gaussian.hpp"
#include "quadrature.hpp"

namespace gkp {

namespace spec {
struct Vacuum {};
struct SqueezedVacuum { double delta; };
struct TruncatedGaussian { double delta, eps; };
struct Comb { int L; double delta; };
struct TruncatedComb { int L; double delta, eps; };
struct GkpPeakwise { double kappa, delta; };
struct GkpPointwise { double kappa, delta; };
struct GkpTruncated { double kappa, delta, eps; };
// Peak-wise envelope, truncated peaks, envelope restricted to L peaks.
struct GkpTruncatedBounded { int L; double kappa, delta, eps; };
// Point-wise envelope times the truncated comb: the ideal Protocol-2 output.
struct GkpPointwiseTruncatedBounded { int L; double kappa, delta, eps; };
// Momentum-space projection of GkpPeakwise onto 2*pi*Z + [-eps, eps].
struct GkpMomentumTruncated { double kappa, delta, eps; };
}  // namespace spec

using StateSpec =
    std::variant<spec::Vacuum, spec::SqueezedVacuum, spec::TruncatedGaussian, spec::Comb, spec::TruncatedComb,
                 spec::GkpPeakwise, spec::GkpPointwise, spec::GkpTruncated, spec::GkpTruncatedBounded,
                 spec::GkpPointwiseTruncatedBounded, spec::GkpMomentumTruncated>;

inline constexpr double default_tol = 1e-12;

// ----- elementary profiles ------------------------------------------------

// eta_kappa(z) = sqrt(kappa) pi^{-1/4} exp(-kappa^2 z^2 / 2)
inline double eta(double kappa, double z) { return std::sqrt(kappa) * std::pow(pi, -0.25) * std::exp(-0.5 * sq(kappa * z)); }

// Psi_Delta(x - z) as a Gaussian term.
inline GaussianTerm psi_term(double delta, double center = 0.0) {
    GaussianTerm t;
    t.amp = std::pow(pi * delta * delta, -0.25);
    t.mu = center;
    t.a = 1.0 / (delta * delta);
    return t;
}

// chi^eps_Delta(z): Psi_Delta restricted to [-eps, eps], renormalised, then
// translated to z.  ||Pi_[-eps,eps] Psi_Delta||^2 = erf(eps / Delta).
inline GaussianTerm chi_eps_term(double delta, double eps, double center) {
    GaussianTerm t = psi_term(delta, center);
    t.amp /= std::sqrt(std::erf(eps / delta));
    t.trunc = Interval{center - eps, center + eps};
    return t;
}

// eta_kappa(x) as a Gaussian term (a = kappa^2).
inline GaussianTerm eta_term(double kappa) {
    GaussianTerm t;
    t.amp = std::sqrt(kappa) * std::pow(pi, -0.25);
    t.a = kappa * kappa;
    return t;
}

// Smallest zmax such that the discarded part of sum_z exp(-c z^2) is below
// tol relative to the full sum.
inline long envelope_cutoff(double c, double tol) {
    require(c > 0.0, ErrorKind::parameter, "envelope exponent must be positive");
    // Full sum, summed outward until terms underflow the running total.
    double total = 1.0;
    long z = 1;
    for (;; ++z) {
        double w = 2.0 * std::exp(-c * double(z) * double(z));
        total += w;
        if (w < 1e-18 * total) break;
    }
    // Accumulate the tail from the outside in.
    double tail = 0.0;
    for (long k = z; k >= 1; --k) {
        double w = 2.0 * std::exp(-c * double(k) * double(k));
        if (tail + w >= tol * total) return k;
        tail += w;
    }
    return 0;
}

// ----- parameter validation -------------------------------------------------

namespace detail {
inline void check_pos(double v, const char* name) {
    require(v > 0.0 && std::isfinite(v), ErrorKind::parameter, std::string(name) + " must be positive and finite");
}
inline void check_eps(double eps) {
    require(eps > 0.0 && eps < 0.5, ErrorKind::parameter, "epsilon must lie in (0, 1/2)");
}
inline void check_L(int L) {
    require(L > 0 && L % 2 == 0, ErrorKind::parameter, "L must be an even positive integer");
}
}  // namespace detail

// ----- state construction ----------------------------------------------------

inline GaussianSum build_state(const StateSpec& spec, double tol = default_tol) {
    require(tol > 0.0 && tol <= 1e-6, ErrorKind::parameter, "tol must lie in (0, 1e-6]");
    using namespace detail;
    GaussianSum s;
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, spec::Vacuum>) {
                s.terms.push_back(psi_term(1.0));
            } else if constexpr (std::is_same_v<T, spec::SqueezedVacuum>) {
                check_pos(v.delta, "Delta");
                s.terms.push_back(psi_term(v.delta));
            } else if constexpr (std::is_same_v<T, spec::TruncatedGaussian>) {
                check_pos(v.delta, "Delta");
                check_eps(v.eps);
                s.terms.push_back(chi_eps_term(v.delta, v.eps, 0.0));
            } else if constexpr (std::is_same_v<T, spec::Comb>) {
                check_L(v.L);
                check_pos(v.delta, "Delta");
                for (int z = -v.L / 2; z <= v.L / 2 - 1; ++z) s.terms.push_back(psi_term(v.delta, z));
            } else if constexpr (std::is_same_v<T, spec::TruncatedComb>) {
                check_L(v.L);
                check_pos(v.delta, "Delta");
                check_eps(v.eps);
                for (int z = -v.L / 2; z <= v.L / 2 - 1; ++z) s.terms.push_back(chi_eps_term(v.delta, v.eps, z));
            } else if constexpr (std::is_same_v<T, spec::GkpPeakwise>) {
                check_pos(v.kappa, "kappa");
                check_pos(v.delta, "Delta");
                long zm = envelope_cutoff(v.kappa * v.kappa, tol);
                for (long z = -zm; z <= zm; ++z) {
                    GaussianTerm t = psi_term(v.delta, double(z));
                    t.amp *= eta(v.kappa, double(z));
                    s.terms.push_back(t);
                }
            } else if constexpr (std::is_same_v<T, spec::GkpPointwise>) {
                check_pos(v.kappa, "kappa");
                check_pos(v.delta, "Delta");
                long zm = envelope_cutoff(v.kappa * v.kappa, tol);
                for (long z = -zm; z <= zm; ++z) s.terms.push_back(*product(eta_term(v.kappa), psi_term(v.delta, double(z))));
            } else if constexpr (std::is_same_v<T, spec::GkpTruncated>) {
                check_pos(v.kappa, "kappa");
                check_pos(v.delta, "Delta");
                check_eps(v.eps);
                long zm = envelope_cutoff(v.kappa * v.kappa, tol);
                for (long z = -zm; z <= zm; ++z) {
                    GaussianTerm t = chi_eps_term(v.delta, v.eps, double(z));
                    t.amp *= eta(v.kappa, double(z));
                    s.terms.push_back(t);
                }
            } else if constexpr (std::is_same_v<T, spec::GkpTruncatedBounded>) {
                check_L(v.L);
                check_pos(v.kappa, "kappa");
                check_pos(v.delta, "Delta");
                check_eps(v.eps);
                for (int z = -v.L / 2; z <= v.L / 2 - 1; ++z) {
                    GaussianTerm t = chi_eps_term(v.delta, v.eps, double(z));
                    t.amp *= eta(v.kappa, double(z));
                    s.terms.push_back(t);
                }
            } else if constexpr (std::is_same_v<T, spec::GkpPointwiseTruncatedBounded>) {
                check_L(v.L);
                check_pos(v.kappa, "kappa");
                check_pos(v.delta, "Delta");
                check_eps(v.eps);
                for (int z = -v.L / 2; z <= v.L / 2 - 1; ++z)
                    s.terms.push_back(*product(eta_term(v.kappa), chi_eps_term(v.delta, v.eps, double(z))));
            } else if constexpr (std::is_same_v<T, spec::GkpMomentumTruncated>) {
                check_pos(v.kappa, "kappa");
                check_pos(v.delta, "Delta");
                check_eps(v.eps);
                s.rep = Rep::momentum;
                long zm = envelope_cutoff(sq(v.delta * two_pi), tol);
                for (long z = -zm; z <= zm; ++z)
                    s.terms.push_back(*product(eta_term(v.delta), chi_eps_term(v.kappa, v.eps, two_pi * double(z))));
            }
        },
        spec);
    return normalized(std::move(s));
}

// Momentum-space wavefunction of GkpPeakwise(kappa, Delta): peaks Psi_kappa
// at 2 pi Z under the point-wise envelope eta_Delta(p).
inline GaussianSum momentum_rep(const spec::GkpPeakwise& v, double tol = default_tol) {
    detail::check_pos(v.kappa, "kappa");
    detail::check_pos(v.delta, "Delta");
    require(tol > 0.0 && tol <= 1e-6, ErrorKind::parameter, "tol must lie in (0, 1e-6]");
    GaussianSum s;
    s.rep = Rep::momentum;
    long zm = envelope_cutoff(sq(v.delta * two_pi), tol);
    for (long z = -zm; z <= zm; ++z) s.terms.push_back(*product(eta_term(v.delta), psi_term(v.kappa, two_pi * double(z))));
    return normalized(std::move(s));
}

// ----- scalar quantities ---------------------------------------------------

inline cplx eval_amplitude(const GaussianSum& s, const std::vector<double>& point) { return s.eval(point); }

// 2 sqrt(1 - |<psi,phi>|^2), the trace distance of two pure states.
inline double pure_trace_distance(double overlap_mag_sq) {
    require(overlap_mag_sq >= -1e-12 && overlap_mag_sq <= 1.0 + 1e-12, ErrorKind::numeric,
            "squared overlap outside [0, 1]");
    double f = std::clamp(overlap_mag_sq, 0.0, 1.0);
    return 2.0 * std::sqrt(1.0 - f);
}

enum class SeriesMode { centered, half_shift, abs_plus_eps, abs_minus_eps_nonzero };

struct SeriesResult {
    double value;
    double lower_bound;  // -inf when the bracketing lemma states no lower side
    double upper_bound;  // +inf when it states no upper side
};

inline SeriesResult gaussian_series(double c, SeriesMode mode, double eps = 0.0) {
    require(c > 0.0 && std::isfinite(c), ErrorKind::parameter, "c must be positive");
    if (mode == SeriesMode::abs_plus_eps || mode == SeriesMode::abs_minus_eps_nonzero) detail::check_eps(eps);
    // Each series is symmetric, so it is summed as twice the z >= 1 half plus
    // the z = 0 term where present, from the outside in so that small terms
    // are accumulated first. Terms beyond zmax are below e^{-40} relative.
    const long zmax = static_cast<long>(std::ceil(std::sqrt(40.0 / c))) + 2;
    double v = 0.0;
    switch (mode) {
        case SeriesMode::centered:
            for (long z = zmax; z >= 1; --z) v += 2.0 * std::exp(-c * sq(double(z)));
            v += 1.0;
            break;
        case SeriesMode::half_shift:
            for (long z = zmax; z >= 1; --z) v += 2.0 * std::exp(-c * sq(double(z) - 0.5));
            break;
        case SeriesMode::abs_plus_eps:
            for (long z = zmax; z >= 1; --z) v += 2.0 * std::exp(-c * sq(double(z) + eps));
            v += std::exp(-c * eps * eps);
            break;
        case SeriesMode::abs_minus_eps_nonzero:
            for (long z = zmax; z >= 1; --z) v += 2.0 * std::exp(-c * sq(double(z) - eps));
            break;
    }
    const double root = std::sqrt(pi / c);
    const double inf = std::numeric_limits<double>::infinity();
    switch (mode) {
        case SeriesMode::centered: return {v, root - 1.0, root + 1.0};
        case SeriesMode::half_shift: return {v, root - 1.0, inf};
        case SeriesMode::abs_plus_eps: return {v, root - 2.0 * (1.0 + eps), inf};
        case SeriesMode::abs_minus_eps_nonzero: return {v, -inf, root + 2.0};
    }
    return {v, -inf, inf};
}

struct NormalizationBounds {
    double C_k_inv_sq;            // sum_z eta_kappa(z)^2
    double C_kD_inv_sq;           // sum_{z,z'} eta(z) eta(z') <chi(z), chi(z')>
    double C_Lk_inv_sq;           // sum_{k=-L/2}^{L/2-1} eta_kappa(k)^2
    double C_k_inv_sq_lb;         // 1 - kappa/sqrt(pi)
    double C_k_inv_sq_ub;         // 1 + kappa/sqrt(pi)
    double C_kD_inv_sq_ub;        // 1 + kappa/sqrt(pi) + 2 (sqrt(2 pi) + kappa) Delta
    double C_Lk_inv_sq_lb;        // (1 - 2 e^{-(kappa L/2)^2}) (1 + kappa/sqrt(pi)), as stated
    double C_Lk_inv_sq_lb_proof;  // (1 - kappa/sqrt(pi)) - 2 e^{-(kappa L/2)^2} (1 + kappa/sqrt(pi))
    double ratio;                 // C_{kappa,Delta}^2 / C_kappa^2
    double ratio_lb;              // 1 - 2 (sqrt(2 pi) + kappa) Delta / (1 - kappa/sqrt(pi))
};

inline NormalizationBounds normalization_bounds(double kappa, double delta, int L) {
    detail::check_pos(kappa, "kappa");
    detail::check_pos(delta, "Delta");
    detail::check_L(L);
    NormalizationBounds r{};
    long zm = envelope_cutoff(kappa * kappa, 1e-17);
    // Outside-in summation for a clean last digit.
    double s = 0.0;
    for (long z = zm; z >= 1; --z) s += 2.0 * sq(eta(kappa, double(z)));
    r.C_k_inv_sq = s + sq(eta(kappa, 0.0));
    double sl = 0.0;
    for (int k = -L / 2; k <= L / 2 - 1; ++k) sl += sq(eta(kappa, double(k)));
    r.C_Lk_inv_sq = sl;
    // <chi(z), chi(z')> = exp(-(z - z')^2 / (4 Delta^2)); sum by separation d.
    double sd = 0.0;
    long dmax = static_cast<long>(std::ceil(std::sqrt(4.0 * 745.0) * delta)) + 1;
    for (long d = -dmax; d <= dmax; ++d) {
        double g = std::exp(-sq(double(d)) / (4.0 * delta * delta));
        if (g == 0.0) continue;
        double inner = 0.0;
        for (long z = -zm - std::abs(d); z <= zm + std::abs(d); ++z) inner += eta(kappa, double(z)) * eta(kappa, double(z + d));
        sd += g * inner;
    }
    r.C_kD_inv_sq = sd;
    const double q = kappa / std::sqrt(pi);
    r.C_k_inv_sq_lb = 1.0 - q;
    r.C_k_inv_sq_ub = 1.0 + q;
    r.C_kD_inv_sq_ub = 1.0 + q + 2.0 * (std::sqrt(two_pi) + kappa) * delta;
    const double e = std::exp(-sq(kappa * L / 2.0));
    r.C_Lk_inv_sq_lb = (1.0 - 2.0 * e) * (1.0 + q);
    r.C_Lk_inv_sq_lb_proof = (1.0 - q) - 2.0 * e * (1.0 + q);
    r.ratio = r.C_k_inv_sq / r.C_kD_inv_sq;
    r.ratio_lb = 1.0 - 2.0 * (std::sqrt(two_pi) + kappa) * delta / (1.0 - q);
    require(r.C_k_inv_sq >= r.C_k_inv_sq_lb - 1e-15 && r.C_k_inv_sq <= r.C_k_inv_sq_ub + 1e-15, ErrorKind::numeric,
            "normalisation sandwich violated");
    return r;
}

struct ConvQuantities {
    long k;
    double delta;
    double I_k;
    double I_k_prime;
};

// I_k(delta)  = \int chi^eps_Delta(k)(y)^2 eta_kappa(y - delta)^2 dy
// I'_k        = \int eta_kappa(x) eta_kappa(k) chi^eps_Delta(k)(x)^2 dx
inline ConvQuantities conv_quantities(long k, double shift, double kappa, double Delta, double eps) {
    detail::check_pos(kappa, "kappa");
    detail::check_pos(Delta, "Delta");
    detail::check_eps(eps);
    const GaussianTerm chi = chi_eps_term(Delta, eps, double(k));
    const double lo = double(k) - eps, hi = double(k) + eps;
    auto f1 = [&](double y) { return norm2(chi(y)) * sq(eta(kappa, y - shift)); };
    auto f2 = [&](double x) { return eta(kappa, x) * eta(kappa, double(k)) * norm2(chi(x)); };
    std::vector<double> br{double(k)};
    ConvQuantities q{k, shift, 0.0, 0.0};
    q.I_k = integrate(f1, lo, hi, 1e-14, br);
    q.I_k_prime = integrate(f2, lo, hi, 1e-14, br);
    return q;
}

enum class Domain { position, momentum };

// ||Pi_[-R,R] psi||^2 in position or momentum space.
inline double tail_mass(const GaussianSum& s, double R, Domain domain) {
    require(R > 0.0, ErrorKind::parameter, "R must be positive");
    require(s.modes == 1, ErrorKind::usage, "tail mass is defined for one-mode states");
    const Rep want = domain == Domain::position ? Rep::position : Rep::momentum;
    const GaussianSum& src = s;
    GaussianSum tmp;
    const GaussianSum* use = &src;
    if (s.rep != want) {
        tmp = fourier(s);
        use = &tmp;
    }
    return overlap(*use, *use, Interval{-R, R}).real();
}

}  // namespace gkp
