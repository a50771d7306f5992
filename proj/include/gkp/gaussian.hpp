#pragma once
// Exact wavefunction algebra over finite sums of (optionally truncated)
// Gaussians with linear phases:
//
//   term(x) = amp * exp(-a (x - mu)^2 / 2 + i b x)   for x in [lo, hi], else 0.
//
// Two-mode sums carry a common shear s and are evaluated as
//   psi(x, y) = sum_j f_j(x - s y) g_j(y),
// which keeps the class closed under the two-mode gate e^{-i P1 Q2}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "core.hpp"
#include "quadrature.hpp"

namespace gkp {

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool contains(double x) const { return x >= lo && x <= hi; }
    bool empty() const { return !(hi > lo); }
    double width() const { return hi - lo; }
};

inline Interval intersect(const Interval& u, const Interval& v) { return {std::max(u.lo, v.lo), std::min(u.hi, v.hi)}; }

struct GaussianTerm {
    cplx amp{1.0, 0.0};
    double mu = 0.0;
    double a = 1.0;
    double b = 0.0;
    std::optional<Interval> trunc;

    Interval support() const { return trunc ? *trunc : Interval{}; }

    cplx operator()(double x) const {
        if (trunc && !trunc->contains(x)) return 0.0;
        double d = x - mu;
        return amp * std::exp(cplx(-0.5 * a * d * d, b * x));
    }
};

enum class Rep { position, momentum };

struct GaussianSum {
    int modes = 1;
    Rep rep = Rep::position;
    double shear = 0.0;
    std::vector<GaussianTerm> terms;   // mode-1 factors
    std::vector<GaussianTerm> second;  // mode-2 factors (modes == 2 only)

    std::size_t size() const { return terms.size(); }

    cplx eval(double x) const {
        require(modes == 1, ErrorKind::usage, "point dimension 1 does not match a two-mode state");
        cplx s = 0.0;
        for (const auto& t : terms) s += t(x);
        return s;
    }
    cplx eval(double x, double y) const {
        require(modes == 2, ErrorKind::usage, "point dimension 2 does not match a one-mode state");
        cplx s = 0.0;
        for (std::size_t j = 0; j < terms.size(); ++j) s += terms[j](x - shear * y) * second[j](y);
        return s;
    }
    cplx eval(const std::vector<double>& p) const {
        require(static_cast<int>(p.size()) == modes, ErrorKind::usage, "point dimension does not match mode count");
        return modes == 1 ? eval(p[0]) : eval(p[0], p[1]);
    }
};

// ----- single-term transformations --------------------------------------

// psi(x) -> psi(x - t)
inline GaussianTerm translated(GaussianTerm t, double shift) {
    t.amp *= std::exp(cplx(0.0, -t.b * shift));
    t.mu += shift;
    if (t.trunc) t.trunc = Interval{t.trunc->lo + shift, t.trunc->hi + shift};
    return t;
}

// psi(x) -> e^{i k x} psi(x)
inline GaussianTerm phased(GaussianTerm t, double k) {
    t.b += k;
    return t;
}

// psi(x) -> e^{z/2} psi(e^z x)
inline GaussianTerm squeezed(GaussianTerm t, double z) {
    double lam = std::exp(z);
    t.a *= lam * lam;
    t.mu /= lam;
    t.b *= lam;
    t.amp *= std::exp(0.5 * z);
    if (t.trunc) t.trunc = Interval{t.trunc->lo / lam, t.trunc->hi / lam};
    return t;
}

// Pointwise product; returns nullopt when the supports are disjoint.
inline std::optional<GaussianTerm> product(const GaussianTerm& f, const GaussianTerm& g) {
    GaussianTerm r;
    r.a = f.a + g.a;
    r.mu = (f.a * f.mu + g.a * g.mu) / r.a;
    r.b = f.b + g.b;
    r.amp = f.amp * g.amp * std::exp(-0.5 * f.a * g.a * sq(f.mu - g.mu) / r.a);
    if (f.trunc || g.trunc) {
        Interval w = intersect(f.support(), g.support());
        if (w.empty()) return std::nullopt;
        r.trunc = w;
    }
    return r;
}

// Unitary Fourier transform  psi^(p) = (2 pi)^{-1/2} \int psi(x) e^{-i p x} dx.
inline GaussianTerm fourier(const GaussianTerm& t) {
    require(!t.trunc, ErrorKind::capability, "closed-form Fourier transform needs an untruncated term");
    GaussianTerm r;
    r.a = 1.0 / t.a;
    r.mu = t.b;
    r.b = -t.mu;
    r.amp = t.amp * std::exp(cplx(0.0, t.b * t.mu)) / std::sqrt(t.a);
    return r;
}

// ----- integrals ----------------------------------------------------------

// \int_lo^hi exp(-A (x - m)^2 / 2) dx, accurate in the far tails.
inline double gauss_window(double A, double m, double lo, double hi) {
    if (!(hi > lo)) return 0.0;
    const double s = std::sqrt(0.5 * A);
    const double pref = std::sqrt(pi / (2.0 * A));
    double u = s * (lo - m), v = s * (hi - m);
    if (std::isinf(lo) && std::isinf(hi)) return 2.0 * pref;
    if (u >= 0.0) return pref * (std::erfc(u) - std::erfc(v));
    if (v <= 0.0) return pref * (std::erfc(-v) - std::erfc(-u));
    return pref * (std::erf(v) - std::erf(u));
}

namespace detail {
// \int_W exp(-A (x-m)^2/2 + i beta x) dx by adaptive quadrature, restricted to
// the region where the Gaussian is not negligible.
inline cplx gauss_phase_window(double A, double m, double beta, Interval w, double abs_tol) {
    const double reach = std::sqrt(2.0 * 80.0 / A);
    Interval eff = intersect(w, Interval{m - reach, m + reach});
    if (eff.empty()) return 0.0;
    // Quadrature of the real and imaginary parts, centred at the peak so that
    // the rapidly decaying ends are resolved by bisection.
    std::vector<double> br;
    if (m > eff.lo && m < eff.hi) br.push_back(m);
    double re = integrate([&](double x) { return std::exp(-0.5 * A * sq(x - m)) * std::cos(beta * x); }, eff.lo, eff.hi,
                          abs_tol, br);
    double im = integrate([&](double x) { return std::exp(-0.5 * A * sq(x - m)) * std::sin(beta * x); }, eff.lo, eff.hi,
                          abs_tol, br);
    return {re, im};
}
}  // namespace detail

// \int_W conj(f(x)) g(x) dx over window W (default: the real line).
inline cplx term_overlap(const GaussianTerm& f, const GaussianTerm& g, Interval window = {}) {
    const double A = f.a + g.a;
    const double m = (f.a * f.mu + g.a * g.mu) / A;
    const double expo = -0.5 * f.a * g.a * sq(f.mu - g.mu) / A;
    if (expo < -700.0) return 0.0;
    const cplx pref = std::conj(f.amp) * g.amp * std::exp(expo);
    const double beta = g.b - f.b;
    Interval w = intersect(window, intersect(f.support(), g.support()));
    if (w.empty()) return 0.0;
    const bool unbounded = std::isinf(w.lo) && std::isinf(w.hi);
    if (unbounded) return pref * std::sqrt(two_pi / A) * std::exp(cplx(-0.5 * beta * beta / A, beta * m));
    if (beta == 0.0) return pref * gauss_window(A, m, w.lo, w.hi);
    // With a residual phase the window integral has no real closed form; the
    // quadrature tolerance is scaled so the absolute error on the result is ~1e-13.
    const double scale = std::abs(pref);
    return pref * detail::gauss_phase_window(A, m, beta, w, 1e-14 / std::max(scale, 1e-300));
}

// ----- sums ---------------------------------------------------------------

inline cplx overlap(const GaussianSum& u, const GaussianSum& v, Interval window = {}) {
    require(u.modes == v.modes, ErrorKind::usage, "overlap of states with different mode counts");
    require(u.rep == v.rep, ErrorKind::usage, "overlap of states in different representations");
    cplx s = 0.0;
    if (u.modes == 1) {
        if (u.terms.size() * v.terms.size() <= 4096) {
            for (const auto& f : u.terms)
                for (const auto& g : v.terms) s += term_overlap(f, g, window);
            return s;
        }
        // Large sums: pairs whose Gaussian cross factor underflows are skipped.
        // With amin the narrowest inverse variance in v, a pair contributes
        // only if |mu_f - mu_g| < sqrt(1400 (a_f + amin) / (a_f amin)).
        std::vector<std::size_t> idx(v.terms.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](auto p, auto q) { return v.terms[p].mu < v.terms[q].mu; });
        std::vector<double> mus(idx.size());
        double amin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < idx.size(); ++i) {
            mus[i] = v.terms[idx[i]].mu;
            amin = std::min(amin, v.terms[idx[i]].a);
        }
        for (const auto& f : u.terms) {
            double reach = std::sqrt(1400.0 * (f.a + amin) / (f.a * amin));
            auto lo = std::lower_bound(mus.begin(), mus.end(), f.mu - reach) - mus.begin();
            auto hi = std::upper_bound(mus.begin(), mus.end(), f.mu + reach) - mus.begin();
            for (auto k = lo; k < hi; ++k) s += term_overlap(f, v.terms[idx[k]], window);
        }
        return s;
    }
    require(u.shear == v.shear, ErrorKind::capability, "two-mode overlap requires matching shear");
    // Substituting w = x - s y makes each product term separable.
    for (std::size_t i = 0; i < u.terms.size(); ++i)
        for (std::size_t j = 0; j < v.terms.size(); ++j) {
            cplx o2 = term_overlap(u.second[i], v.second[j]);
            if (o2 == 0.0) continue;
            s += term_overlap(u.terms[i], v.terms[j]) * o2;
        }
    return s;
}

inline double norm_sq(const GaussianSum& u) { return overlap(u, u).real(); }

inline GaussianSum scaled(GaussianSum u, cplx c) {
    for (auto& t : u.terms) t.amp *= c;
    return u;
}

inline GaussianSum normalized(GaussianSum u) {
    double n = norm_sq(u);
    require(n > 0.0 && std::isfinite(n), ErrorKind::numeric, "cannot normalise a zero or non-finite state");
    return scaled(std::move(u), 1.0 / std::sqrt(n));
}

inline GaussianSum fourier(const GaussianSum& u) {
    require(u.modes == 1, ErrorKind::capability, "Fourier transform implemented for one mode");
    GaussianSum r;
    r.rep = u.rep == Rep::position ? Rep::momentum : Rep::position;
    if (u.rep == Rep::momentum) {
        // Inverse transform: psi(x) = FT[psi^](-x).
        for (const auto& t : u.terms) {
            GaussianTerm f = fourier(t);
            f.mu = -f.mu;
            f.b = -f.b;
            r.terms.push_back(f);
        }
        return r;
    }
    for (const auto& t : u.terms) r.terms.push_back(fourier(t));
    return r;
}

// Sum of two one-mode states (same representation).
inline GaussianSum add(GaussianSum u, const GaussianSum& v) {
    require(u.modes == v.modes && u.rep == v.rep, ErrorKind::usage, "adding incompatible states");
    require(u.modes == 1 || u.shear == v.shear, ErrorKind::capability, "adding two-mode states with different shear");
    u.terms.insert(u.terms.end(), v.terms.begin(), v.terms.end());
    u.second.insert(u.second.end(), v.second.begin(), v.second.end());
    return u;
}

// Tensor product of two one-mode position states.
inline GaussianSum tensor(const GaussianSum& u, const GaussianSum& v) {
    require(u.modes == 1 && v.modes == 1, ErrorKind::usage, "tensor product expects one-mode factors");
    GaussianSum r;
    r.modes = 2;
    for (const auto& f : u.terms)
        for (const auto& g : v.terms) {
            r.terms.push_back(f);
            r.second.push_back(g);
        }
    return r;
}

// Merge terms with identical (mu, a, b, trunc) to curb growth.
inline GaussianSum compress(const GaussianSum& u, double tol = 1e-14) {
    if (u.modes != 1) return u;
    GaussianSum r = u;
    r.terms.clear();
    auto same = [&](const GaussianTerm& p, const GaussianTerm& q) {
        if (std::abs(p.mu - q.mu) > tol * (1 + std::abs(p.mu))) return false;
        if (std::abs(p.a - q.a) > tol * p.a) return false;
        if (std::abs(p.b - q.b) > tol * (1 + std::abs(p.b))) return false;
        if (p.trunc.has_value() != q.trunc.has_value()) return false;
        if (p.trunc && (std::abs(p.trunc->lo - q.trunc->lo) > tol * (1 + std::abs(p.trunc->lo)) ||
                        std::abs(p.trunc->hi - q.trunc->hi) > tol * (1 + std::abs(p.trunc->hi))))
            return false;
        return true;
    };
    for (const auto& t : u.terms) {
        bool merged = false;
        for (auto& s : r.terms)
            if (same(s, t)) {
                s.amp += t.amp;
                merged = true;
                break;
            }
        if (!merged) r.terms.push_back(t);
    }
    std::erase_if(r.terms, [](const GaussianTerm& t) { return std::abs(t.amp) == 0.0; });
    return r;
}

}  // namespace gkp
