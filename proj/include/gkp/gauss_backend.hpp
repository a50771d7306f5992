#pragma once
// Exact Gaussian-sum backend for the protocol gate subset: displacements
// (including e^{iaQ}, e^{iaP}, e^{i pi Q}), squeezes, qubit unitaries,
// controlled displacements, the shear e^{-i c P_1 Q_2} and homodyne slicing.
// A hybrid state is one GaussianSum per qubit basis state.

#include <cmath>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "core.hpp"
#include "gaussian.hpp"
#include "grid.hpp"

namespace gkp {

inline constexpr std::size_t default_term_cap = 4096;

struct GaussHybridState {
    int modes = 1;
    int qubits = 0;
    std::vector<GaussianSum> branches;  // 2^qubits entries, all with the same shear
    std::size_t term_cap = default_term_cap;

    std::size_t term_count() const {
        std::size_t n = 0;
        for (const auto& b : branches) n += b.terms.size();
        return n;
    }
    double norm_sq() const {
        double s = 0.0;
        for (const auto& b : branches)
            if (!b.terms.empty()) s += gkp::norm_sq(b);
        return s;
    }
    double branch_weight(int b) const { return branches[b].terms.empty() ? 0.0 : gkp::norm_sq(branches[b]); }
};

inline GaussianSum empty_like(const GaussianSum& s) {
    GaussianSum e;
    e.modes = s.modes;
    e.rep = s.rep;
    e.shear = s.shear;
    return e;
}

inline GaussHybridState gauss_state(GaussianSum s, int qubits = 0, bool plus = false) {
    require(s.rep == Rep::position, ErrorKind::capability, "Gaussian backend works in the position representation");
    GaussHybridState st;
    st.modes = s.modes;
    st.qubits = qubits;
    require(qubits == 0 || qubits == 1, ErrorKind::capacity, "at most one qubit is supported");
    if (qubits == 0) {
        st.branches = {std::move(s)};
    } else if (plus) {
        auto h = scaled(std::move(s), 1.0 / std::sqrt(2.0));
        // scaled() only touches first-mode factors, which carries the amplitude.
        st.branches = {h, h};
    } else {
        st.branches = {s, empty_like(s)};
    }
    return st;
}

namespace gauss_detail {

// One-mode term maps applied to the factor that carries mode m.
inline void translate(GaussianSum& s, int m, double t) {
    if (s.modes == 1 || m == 0) {
        for (auto& f : s.terms) f = translated(f, t);
        return;
    }
    // psi(x, y - t) = f(x - s y + s t) g(y - t)
    for (std::size_t j = 0; j < s.terms.size(); ++j) {
        if (s.shear != 0.0) s.terms[j] = translated(s.terms[j], -s.shear * t);
        s.second[j] = translated(s.second[j], t);
    }
}

inline void phase(GaussianSum& s, int m, double k, cplx global = 1.0) {
    for (std::size_t j = 0; j < s.terms.size(); ++j) {
        s.terms[j].amp *= global;
        if (s.modes == 1) {
            s.terms[j] = phased(s.terms[j], k);
        } else if (m == 0) {
            // e^{ikx} = e^{ik(x - s y)} e^{i k s y}
            s.terms[j] = phased(s.terms[j], k);
            if (s.shear != 0.0) s.second[j] = phased(s.second[j], k * s.shear);
        } else {
            s.second[j] = phased(s.second[j], k);
        }
    }
}

inline void squeeze(GaussianSum& s, int m, double z) {
    if (s.modes == 1 || m == 0) {
        for (auto& f : s.terms) f = squeezed(f, z);
        s.shear /= std::exp(z);
    } else {
        for (auto& g : s.second) g = squeezed(g, z);
        s.shear *= std::exp(z);
    }
}

inline void displace(GaussianSum& s, int m, Vec2 d) {
    if (d[1] != 0.0) translate(s, m, d[1]);
    if (d[0] != 0.0 || d[1] != 0.0) phase(s, m, d[0], std::exp(cplx(0.0, -0.5 * d[0] * d[1])));
}

}  // namespace gauss_detail

inline void apply_inplace(GaussHybridState& st, const Gate& g) {
    auto each = [&](auto&& fn) {
        for (auto& b : st.branches) fn(b);
    };
    switch (g.kind) {
        case GateKind::Displacement:
            each([&](GaussianSum& b) { gauss_detail::displace(b, g.modes[0], g.d); });
            break;
        case GateKind::CtrlDisplacement:
            require(st.qubits == 1, ErrorKind::usage, "controlled gate needs a qubit");
            gauss_detail::displace(st.branches[1], g.modes[0], g.d);
            break;
        case GateKind::QubitUnitary: {
            require(st.qubits == 1, ErrorKind::usage, "qubit gate on a state without a qubit");
            const auto& b0 = st.branches[0];
            const auto& b1 = st.branches[1];
            GaussianSum n0 = empty_like(b0), n1 = empty_like(b0);
            auto acc = [](GaussianSum& out, const GaussianSum& in, cplx c) {
                if (c == 0.0) return;
                for (std::size_t j = 0; j < in.terms.size(); ++j) {
                    GaussianTerm t = in.terms[j];
                    t.amp *= c;
                    out.terms.push_back(t);
                    if (in.modes == 2) out.second.push_back(in.second[j]);
                }
            };
            acc(n0, b0, g.U(0, 0));
            acc(n0, b1, g.U(0, 1));
            acc(n1, b0, g.U(1, 0));
            acc(n1, b1, g.U(1, 1));
            st.branches = {compress(n0), compress(n1)};
            break;
        }
        case GateKind::GaussianUnitary: {
            if (g.modes.size() == 1 && g.name == "SQUEEZE") {
                each([&](GaussianSum& b) { gauss_detail::squeeze(b, g.modes[0], g.param); });
                break;
            }
            if (g.modes.size() == 1 && (g.name == "PHASE" || g.name == "ROT")) {
                const double ang = std::remainder(g.param, two_pi);
                if (ang == 0.0) break;
            }
            if (g.modes.size() == 2) {
                int j, k;
                double c;
                if (is_shear_pattern(g.A, j, k, c) && g.modes[j] == 0 && g.modes[k] == 1 && st.modes == 2) {
                    each([&](GaussianSum& b) { b.shear += c; });
                    break;
                }
            }
            fail(ErrorKind::capability, "Gaussian-sum backend does not support gate " + g.name);
        }
        case GateKind::PrepVacuum:
        case GateKind::PrepQubit0: fail(ErrorKind::capability, "preparations are handled by run_gauss_circuit()");
        case GateKind::HomodyneQ:
        case GateKind::QubitMeasure: fail(ErrorKind::capability, "measurements are handled by slice()");
    }
    require(st.term_count() <= st.term_cap, ErrorKind::capacity,
            "Gaussian-sum term count " + std::to_string(st.term_count()) + " exceeds the cap " + std::to_string(st.term_cap));
}

inline GaussHybridState apply(const Gate& g, GaussHybridState st) {
    apply_inplace(st, g);
    return st;
}

// Run a circuit starting with PREP_VAC / PREP_Q0 on the Gaussian-sum backend.
// An explicit input replaces the vacuum of mode 0 (one-mode circuits only).
inline GaussHybridState run_on_gaussian_backend(const Circuit& c, const GaussianSum* input = nullptr,
                                                std::size_t cap = default_term_cap) {
    require(c.n_modes <= 2 && c.n_qubits <= 1, ErrorKind::capacity, "Gaussian backend supports two modes and one qubit");
    std::size_t i = 0;
    bool qubit = false;
    for (; i < c.gates.size() && c.gates[i].is_prep(); ++i)
        if (c.gates[i].kind == GateKind::PrepQubit0) qubit = true;
    require(qubit == (c.n_qubits == 1), ErrorKind::usage, "the qubit must be prepared at the start");
    GaussianSum vac;
    vac.terms.push_back(GaussianTerm{cplx(std::pow(pi, -0.25)), 0.0, 1.0, 0.0, std::nullopt});
    GaussianSum s = input ? *input : vac;
    if (c.n_modes == 2) s = tensor(s, vac);
    GaussHybridState st = gauss_state(s, c.n_qubits, false);
    st.term_cap = cap;
    for (; i < c.gates.size(); ++i) apply_inplace(st, c.gates[i]);
    return st;
}

// f(x0 - s y) as a term in y.
inline GaussianTerm slice_term(const GaussianTerm& f, double x0, double s) {
    GaussianTerm r;
    r.mu = (x0 - f.mu) / s;
    r.a = f.a * s * s;
    r.b = -f.b * s;
    r.amp = f.amp * std::exp(cplx(0.0, f.b * x0));
    if (f.trunc) {
        double u = (x0 - f.trunc->hi) / s, v = (x0 - f.trunc->lo) / s;
        r.trunc = Interval{std::min(u, v), std::max(u, v)};
    }
    return r;
}

// Unnormalised conditional wavefunction of mode 1 after Q_0 = x0.
inline GaussianSum slice(const GaussianSum& s, double x0) {
    require(s.modes == 2, ErrorKind::usage, "slicing needs a two-mode state");
    GaussianSum r;
    for (std::size_t j = 0; j < s.terms.size(); ++j) {
        if (s.shear == 0.0) {
            GaussianTerm g = s.second[j];
            g.amp *= s.terms[j](x0);
            if (g.amp != 0.0) r.terms.push_back(g);
            continue;
        }
        auto p = product(slice_term(s.terms[j], x0, s.shear), s.second[j]);
        if (p) r.terms.push_back(*p);
    }
    return r;
}

// Outcome density of Q on mode 0: sum over branches of the slice norms.
inline double homodyne_pdf(const GaussHybridState& st, double x0) {
    double p = 0.0;
    for (const auto& b : st.branches) {
        auto sl = slice(b, x0);
        if (!sl.terms.empty()) p += norm_sq(sl);
    }
    return p;
}

// Sample a Gaussian-backend state onto grids (for cross-backend comparison).
inline HybridGridState to_grid(const GaussHybridState& st, const std::vector<GridAxis>& axes) {
    require(static_cast<int>(axes.size()) == st.modes, ErrorKind::usage, "one axis per mode is required");
    HybridGridState g;
    g.axes = axes;
    g.qubits = st.qubits;
    for (const auto& b : st.branches) {
        std::vector<cplx> v(g.points(), 0.0);
        if (!b.terms.empty()) {
            if (st.modes == 1)
                for (long j = 0; j < axes[0].n; ++j) v[j] = b.eval(axes[0].x(j));
            else
                for (long i = 0; i < axes[0].n; ++i)
                    for (long j = 0; j < axes[1].n; ++j) v[i * axes[1].n + j] = b.eval(axes[0].x(i), axes[1].x(j));
        }
        g.branches.push_back(std::move(v));
    }
    return g;
}

// Sum over qubit branches of |<target, branch>|^2 (one mode).
inline double reduce_fidelity(const GaussHybridState& st, const GaussianSum& target) {
    require(st.modes == 1 && target.modes == 1, ErrorKind::usage, "reduce_fidelity expects one-mode states");
    double f = 0.0;
    for (const auto& b : st.branches)
        if (!b.terms.empty()) f += std::norm(overlap(target, b));
    return f;
}

}  // namespace gkp
