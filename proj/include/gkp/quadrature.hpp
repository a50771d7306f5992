#pragma once
// Globally adaptive Gauss-Kronrod integration with an absolute tolerance.
// Boost supplies the 15-point Kronrod rule and its error estimate; this file
// supplies the interval-bisection driver so that termination is controlled
// by an absolute error target rather than a relative one.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <queue>
#include <vector>

#include "core.hpp"

namespace gkp {

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
};

namespace detail {
struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gk_panel(F& f, double a, double b) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}
}  // namespace detail

// Integrate f over [a,b] split first at the given breakpoints, then bisect the
// worst panel until the summed error estimate falls below abs_tol.
template <class F>
QuadResult integrate_abs(F f, double a, double b, double abs_tol, std::vector<double> breaks = {},
                         int max_panels = 4000) {
    if (!(b > a)) return {};
    std::vector<double> cuts{a};
    std::sort(breaks.begin(), breaks.end());
    for (double c : breaks)
        if (c > cuts.back() && c < b) cuts.push_back(c);
    cuts.push_back(b);

    std::priority_queue<detail::Panel> heap;
    double total = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto p = detail::gk_panel(f, cuts[i], cuts[i + 1]);
        total += p.value;
        err += p.error;
        heap.push(p);
    }
    int panels = static_cast<int>(heap.size());
    while (err > abs_tol && panels < max_panels) {
        auto worst = heap.top();
        heap.pop();
        double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) break;  // cannot bisect further
        auto l = detail::gk_panel(f, worst.a, m);
        auto r = detail::gk_panel(f, m, worst.b);
        total += l.value + r.value - worst.value;
        err += l.error + r.error - worst.error;
        heap.push(l);
        heap.push(r);
        ++panels;
    }
    // Recompute the sums from the panels to avoid drift from repeated updates.
    double v = 0.0, e = 0.0;
    while (!heap.empty()) {
        v += heap.top().value;
        e += heap.top().error;
        heap.pop();
    }
    return {v, e};
}

template <class F>
double integrate(F f, double a, double b, double abs_tol = 1e-13, std::vector<double> breaks = {}) {
    return integrate_abs(std::move(f), a, b, abs_tol, std::move(breaks)).value;
}

// Composite Simpson rule on n (even) panels; used by independent oracles.
template <class F>
double simpson(F f, double a, double b, int n) {
    if (n % 2) ++n;
    double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace gkp
