#pragma once
// Grid/Fourier backend: pure states of one or two oscillators (sampled on
// uniform position grids) tensored with at most one qubit.  Every gate of the
// elementary set is applied exactly on the periodic grid (Fourier phases,
// pointwise phases, band-limited resampling), and boundary leakage is checked
// before/after each gate so that periodic wrap-around never goes unnoticed.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "circuit.hpp"
#include "core.hpp"
#include "fft.hpp"
#include "gaussian.hpp"

namespace gkp {

struct GridAxis {
    double x_min = -8.0;
    double dx = 1.0 / 64;
    long n = 1024;

    double x(long j) const { return x_min + static_cast<double>(j) * dx; }
    double x_max() const { return x(n - 1); }
    double extent() const { return static_cast<double>(n) * dx; }
    // angular frequency of DFT bin k
    double p(long k) const { return two_pi * fft::signed_index(static_cast<int>(k), static_cast<int>(n)) / (static_cast<double>(n) * dx); }
    double p_nyquist() const { return pi / dx; }

    // Power-of-two grid with x_min = -(n/2) dx covering [-half_extent, half_extent].
    static GridAxis centered(double half_extent, double dx) {
        require(dx > 0.0 && half_extent > 0.0, ErrorKind::parameter, "grid needs positive spacing and extent");
        long n = fft::next_pow2(static_cast<long>(std::ceil(2.0 * half_extent / dx)) + 2);
        require(n <= (1L << 26), ErrorKind::capacity, "grid would exceed 2^26 points");
        return {-static_cast<double>(n / 2) * dx, dx, n};
    }
    void validate() const {
        require(fft::is_pow2(n), ErrorKind::parameter, "grid point count must be a power of two");
        require(dx > 0.0, ErrorKind::parameter, "grid spacing must be positive");
        require(x_min < 0.0 && x_max() > 0.0, ErrorKind::parameter, "grid must straddle the origin");
    }
};

// Default grid for protocol-scale states: half extent L/2 + 8 max(1, 1/kappa),
// spacing min(Delta, kappa)/6.
inline GridAxis default_axis(double L, double kappa, double Delta) {
    return GridAxis::centered(L / 2.0 + 8.0 * std::max(1.0, 1.0 / kappa), std::min(Delta, kappa) / 6.0);
}

struct HybridGridState {
    std::vector<GridAxis> axes;                // one per mode
    int qubits = 0;                            // 0 or 1
    std::vector<std::vector<cplx>> branches;   // 2^qubits arrays, row-major over modes

    int modes() const { return static_cast<int>(axes.size()); }
    long points() const {
        long p = 1;
        for (const auto& a : axes) p *= a.n;
        return p;
    }
    double cell() const {
        double c = 1.0;
        for (const auto& a : axes) c *= a.dx;
        return c;
    }
    double norm_sq() const {
        double s = 0.0;
        for (const auto& b : branches)
            for (const auto& v : b) s += std::norm(v);
        return s * cell();
    }
    double branch_weight(int b) const {
        double s = 0.0;
        for (const auto& v : branches[b]) s += std::norm(v);
        return s * cell();
    }
};

namespace grid_detail {

// Layout of mode m's lines inside a branch array: n points, howmany lines,
// stride between consecutive points, distance between line starts.
struct Lines {
    long n, howmany, stride, dist;
};
inline Lines lines(const HybridGridState& s, int m) {
    if (s.modes() == 1) return {s.axes[0].n, 1, 1, s.axes[0].n};
    const long n0 = s.axes[0].n, n1 = s.axes[1].n;
    if (m == 0) return {n0, n1, n1, 1};
    return {n1, n0, 1, n1};
}
// Coordinate index along mode m and along the other mode for flat index i.
inline void split(const HybridGridState& s, long i, long& i0, long& i1) {
    if (s.modes() == 1) {
        i0 = i;
        i1 = 0;
        return;
    }
    i0 = i / s.axes[1].n;
    i1 = i % s.axes[1].n;
}

inline void fft_mode(std::vector<cplx>& v, const HybridGridState& s, int m, int sign) {
    auto L = lines(s, m);
    fft::transform(v.data(), static_cast<int>(L.n), sign, static_cast<int>(L.howmany), static_cast<int>(L.stride), static_cast<int>(L.dist));
}

// Multiply in momentum space along mode m by f(k, j) where k is the DFT bin
// along m and j the coordinate index of the other mode (0 for one mode).
inline void momentum_multiply(HybridGridState& s, int m, const std::function<cplx(long, long)>& f) {
    auto L = lines(s, m);
    const double inv = 1.0 / static_cast<double>(L.n);
    for (auto& b : s.branches) {
        fft_mode(b, s, m, FFTW_FORWARD);
        for (long line = 0; line < L.howmany; ++line)
            for (long k = 0; k < L.n; ++k) b[line * L.dist + k * L.stride] *= f(k, line) * inv;
        fft_mode(b, s, m, FFTW_BACKWARD);
    }
}

// Position-space mass of mode m where pred(x_m, x_other) holds.
inline double mass_where(const HybridGridState& s, int m, const std::function<bool(double, double)>& pred) {
    double tot = 0.0;
    for (const auto& b : s.branches)
        for (long i = 0; i < static_cast<long>(b.size()); ++i) {
            long i0, i1;
            split(s, i, i0, i1);
            double xm = m == 0 ? s.axes[0].x(i0) : s.axes[1].x(i1);
            double xo = s.modes() == 1 ? 0.0 : (m == 0 ? s.axes[1].x(i1) : s.axes[0].x(i0));
            if (pred(xm, xo)) tot += std::norm(b[i]);
        }
    return tot * s.cell();
}

// Momentum-space mass of mode m for bins with |p| >= pcut.
inline double momentum_mass_above(const HybridGridState& s, int m, double pcut) {
    auto L = lines(s, m);
    const GridAxis& ax = s.axes[m];
    double tot = 0.0, all = 0.0;
    for (auto b : s.branches) {
        fft_mode(b, s, m, FFTW_FORWARD);
        for (long line = 0; line < L.howmany; ++line)
            for (long k = 0; k < L.n; ++k) {
                double w = std::norm(b[line * L.dist + k * L.stride]);
                all += w;
                if (std::abs(ax.p(k)) >= pcut) tot += w;
            }
    }
    // Parseval: sum |c_k|^2 = n sum |psi|^2, so normalise by the total.
    return all > 0.0 ? tot / all * s.norm_sq() : 0.0;
}

}  // namespace grid_detail

inline constexpr double boundary_tol = 1e-10;

// Mass in the outermost 1/64 of the position grid and of the momentum band
// of mode m; both must stay below boundary_tol for periodic methods to be exact.
inline double position_edge_mass(const HybridGridState& s, int m) {
    const GridAxis& a = s.axes[m];
    const double band = a.extent() / 64.0;
    return grid_detail::mass_where(s, m, [&](double x, double) { return x < a.x_min + band || x > a.x_max() - band; });
}
inline double momentum_edge_mass(const HybridGridState& s, int m) {
    return grid_detail::momentum_mass_above(s, m, s.axes[m].p_nyquist() * (63.0 / 64.0));
}

inline void check_edges(const HybridGridState& s, int m, const std::string& what) {
    double pm = position_edge_mass(s, m);
    require(pm < boundary_tol, ErrorKind::domain_overflow,
            what + ": position support reaches the grid boundary (edge mass " + std::to_string(pm) + ")");
    double qm = momentum_edge_mass(s, m);
    require(qm < boundary_tol, ErrorKind::domain_overflow,
            what + ": momentum support reaches the band limit (edge mass " + std::to_string(qm) + ")");
}

// ----- preparation ------------------------------------------------------------

inline std::vector<cplx> sample(const GaussianSum& g, const GridAxis& a) {
    require(g.modes == 1 && g.rep == Rep::position, ErrorKind::usage, "sampling expects a one-mode position-space state");
    std::vector<cplx> v(a.n);
    for (long j = 0; j < a.n; ++j) v[j] = g.eval(a.x(j));
    return v;
}

// Sample an analytic state; rejects grids that cannot resolve it.
inline HybridGridState prepare(const GaussianSum& g, const std::vector<GridAxis>& axes) {
    require(static_cast<int>(axes.size()) == g.modes, ErrorKind::usage, "grid count does not match mode count");
    for (const auto& a : axes) a.validate();
    double amax = 0.0;
    for (const auto& t : g.terms) amax = std::max(amax, t.a);
    for (const auto& t : g.second) amax = std::max(amax, t.a);
    const double width_min = 1.0 / std::sqrt(amax);
    HybridGridState s;
    s.axes = axes;
    if (g.modes == 1) {
        require(axes[0].dx <= width_min / 4.0 * (1.0 + 1e-12), ErrorKind::resolution,
                "grid spacing exceeds a quarter of the narrowest peak width");
        s.branches = {sample(g, axes[0])};
    } else {
        double amax1 = 0.0, amax2 = 0.0;
        for (const auto& t : g.terms) amax1 = std::max(amax1, t.a);
        for (const auto& t : g.second) amax2 = std::max(amax2, t.a);
        require(axes[0].dx <= 0.25 / std::sqrt(amax1) * (1.0 + 1e-12) && axes[1].dx <= 0.25 / std::sqrt(amax2) * (1.0 + 1e-12),
                ErrorKind::resolution, "grid spacing exceeds a quarter of the narrowest peak width");
        std::vector<cplx> v(axes[0].n * axes[1].n);
        for (long i = 0; i < axes[0].n; ++i)
            for (long j = 0; j < axes[1].n; ++j) v[i * axes[1].n + j] = g.eval(axes[0].x(i), axes[1].x(j));
        s.branches = {std::move(v)};
    }
    double n = s.norm_sq();
    require(n > 0.0, ErrorKind::resolution, "state vanishes on the grid");
    for (auto& v : s.branches[0]) v /= std::sqrt(n);
    for (int m = 0; m < s.modes(); ++m) {
        double alias = grid_detail::momentum_mass_above(s, m, 0.75 * s.axes[m].p_nyquist());
        require(alias <= 1e-6, ErrorKind::resolution, "estimated aliasing error " + std::to_string(alias) + " exceeds 1e-6");
        double edge = position_edge_mass(s, m);
        require(edge <= boundary_tol, ErrorKind::resolution, "grid extent does not cover the state (edge mass " + std::to_string(edge) + ")");
    }
    return s;
}

inline HybridGridState prepare(const GaussianSum& g, const GridAxis& axis) { return prepare(g, std::vector<GridAxis>{axis}); }

// Tensor a qubit in |0> (plus = false) or |+> (plus = true) onto a qubit-free state.
inline HybridGridState with_qubit(HybridGridState s, bool plus) {
    require(s.qubits == 0, ErrorKind::capacity, "at most one qubit is supported");
    s.qubits = 1;
    if (plus) {
        const double r = 1.0 / std::sqrt(2.0);
        for (auto& v : s.branches[0]) v *= r;
        s.branches.push_back(s.branches[0]);
    } else {
        s.branches.push_back(std::vector<cplx>(s.branches[0].size(), 0.0));
    }
    return s;
}

// Tensor product of two one-mode, qubit-free grid states.
inline HybridGridState tensor(const HybridGridState& a, const HybridGridState& b) {
    require(a.modes() == 1 && b.modes() == 1 && a.qubits == 0 && b.qubits == 0, ErrorKind::usage,
            "tensor expects one-mode qubit-free factors");
    HybridGridState s;
    s.axes = {a.axes[0], b.axes[0]};
    const long n0 = a.axes[0].n, n1 = b.axes[0].n;
    std::vector<cplx> v(n0 * n1);
    for (long i = 0; i < n0; ++i)
        for (long j = 0; j < n1; ++j) v[i * n1 + j] = a.branches[0][i] * b.branches[0][j];
    s.branches = {std::move(v)};
    return s;
}

// ----- elementary grid operations --------------------------------------------------

// psi(x) -> psi(x - t) along mode m.  Integer multiples of dx are exact index
// rolls; other shifts use the Fourier phase e^{-i p t}.
inline void translate(HybridGridState& s, int m, double t, bool force_fourier = false) {
    const GridAxis& a = s.axes[m];
    double leak = grid_detail::mass_where(s, m, [&](double x, double) { return x + t < a.x_min || x + t > a.x_max(); });
    require(leak < boundary_tol, ErrorKind::domain_overflow, "translation would move mass " + std::to_string(leak) + " off the grid");
    const double steps = t / a.dx;
    const double rs = std::round(steps);
    if (!force_fourier && std::abs(steps - rs) < 1e-12 * std::max(1.0, std::abs(steps))) {
        const long r = ((static_cast<long>(rs) % a.n) + a.n) % a.n;
        if (r == 0) return;
        auto L = grid_detail::lines(s, m);
        std::vector<cplx> line(L.n);
        for (auto& b : s.branches)
            for (long l = 0; l < L.howmany; ++l) {
                for (long k = 0; k < L.n; ++k) line[(k + r) % L.n] = b[l * L.dist + k * L.stride];
                for (long k = 0; k < L.n; ++k) b[l * L.dist + k * L.stride] = line[k];
            }
        return;
    }
    grid_detail::momentum_multiply(s, m, [&](long k, long) { return std::exp(cplx(0.0, -a.p(k) * t)); });
}

// psi -> e^{i f(x_m, x_other)} psi
inline void position_phase(HybridGridState& s, int m, const std::function<double(double, double)>& f, int branch = -1) {
    for (int bi = 0; bi < static_cast<int>(s.branches.size()); ++bi) {
        if (branch >= 0 && bi != branch) continue;
        auto& b = s.branches[bi];
        for (long i = 0; i < static_cast<long>(b.size()); ++i) {
            long i0, i1;
            grid_detail::split(s, i, i0, i1);
            double xm = m == 0 ? s.axes[0].x(i0) : s.axes[1].x(i1);
            double xo = s.modes() == 1 ? 0.0 : (m == 0 ? s.axes[1].x(i1) : s.axes[0].x(i0));
            b[i] *= std::exp(cplx(0.0, f(xm, xo)));
        }
    }
}

// D(d) psi(x) = e^{-i dQ dP / 2} e^{i dQ x} psi(x - dP), optionally on one qubit branch.
inline void displace(HybridGridState& s, int m, Vec2 d, int branch = -1) {
    if (branch < 0) {
        if (d[1] != 0.0) translate(s, m, d[1]);
        const double dq = d[0], c = -0.5 * d[0] * d[1];
        if (dq != 0.0 || c != 0.0) position_phase(s, m, [&](double x, double) { return dq * x + c; });
        return;
    }
    // Controlled: act on a single branch through a temporary one-branch state.
    HybridGridState tmp;
    tmp.axes = s.axes;
    tmp.branches = {std::move(s.branches[branch])};
    displace(tmp, m, d, -1);
    s.branches[branch] = std::move(tmp.branches[0]);
}

// S(z): psi(x) -> e^{z/2} psi(e^z x) along mode m by evaluating the
// trigonometric interpolant at e^z x_j (chirp-z); samples mapped outside the
// grid are set to zero after checking they carry no mass.
inline void squeeze(HybridGridState& s, int m, double z) {
    if (z == 0.0) return;
    const GridAxis& a = s.axes[m];
    const double lam = std::exp(z);
    if (lam < 1.0) {
        double lost = grid_detail::mass_where(s, m, [&](double x, double) { return x < lam * a.x_min || x > lam * a.x_max(); });
        require(lost < boundary_tol, ErrorKind::domain_overflow, "anti-squeezing pushes mass " + std::to_string(lost) + " off the grid");
    } else {
        double lost = grid_detail::momentum_mass_above(s, m, a.p_nyquist() / lam);
        require(lost < boundary_tol, ErrorKind::domain_overflow, "squeezing pushes momentum mass " + std::to_string(lost) + " past the band limit");
    }
    auto L = grid_detail::lines(s, m);
    const long n = L.n;
    const double scale = std::exp(0.5 * z) / static_cast<double>(n);
    std::vector<cplx> line(n), A(n);
    for (auto& b : s.branches)
        for (long l = 0; l < L.howmany; ++l) {
            for (long k = 0; k < n; ++k) line[k] = b[l * L.dist + k * L.stride];
            fft::forward(line);
            for (long u = 0; u < n; ++u) {
                long kp = u - n / 2;
                long bin = (kp + n) % n;
                double p = two_pi * static_cast<double>(kp) / (static_cast<double>(n) * a.dx);
                A[u] = line[bin] * std::exp(cplx(0.0, p * (lam - 1.0) * a.x_min)) * scale;
            }
            auto out = fft::chirp_z(A, lam);
            for (long j = 0; j < n; ++j) {
                double y = lam * a.x(j);
                b[l * L.dist + j * L.stride] = (y < a.x_min || y > a.x_max()) ? cplx(0.0) : out[j];
            }
        }
}

// e^{-i t Q^2/2} e^{-i s P^2/2} e^{-i t Q^2/2} = U(theta) up to a global phase,
// with t = tan(theta/2), s = sin(theta); split when |theta| > pi/2.
inline void rotate(HybridGridState& st, int m, double theta) {
    theta = std::remainder(theta, two_pi);
    if (theta == 0.0) return;
    if (std::abs(theta) > pi / 2) {
        rotate(st, m, theta / 2);
        rotate(st, m, theta / 2);
        return;
    }
    const double t = std::tan(theta / 2), s = std::sin(theta);
    const GridAxis& a = st.axes[m];
    position_phase(st, m, [&](double x, double) { return -0.5 * t * x * x; });
    grid_detail::momentum_multiply(st, m, [&](long k, long) { double p = a.p(k); return std::exp(cplx(0.0, -0.5 * s * p * p)); });
    position_phase(st, m, [&](double x, double) { return -0.5 * t * x * x; });
    check_edges(st, m, "rotation");
}

// e^{i omega (Q1 Q2 + P1 P2)} = e^{i t Q1 Q2} e^{i s P1 P2} e^{i t Q1 Q2}, t = tan(omega/2), s = sin(omega).
inline void beamsplit(HybridGridState& st, double omega) {
    require(st.modes() == 2, ErrorKind::usage, "beamsplitter needs two modes");
    omega = std::remainder(omega, two_pi);
    if (omega == 0.0) return;
    if (std::abs(omega) > pi / 2) {
        beamsplit(st, omega / 2);
        beamsplit(st, omega / 2);
        return;
    }
    const double t = std::tan(omega / 2), s = std::sin(omega);
    auto qq = [&](double x, double y) { return t * x * y; };
    position_phase(st, 0, qq);
    for (auto& b : st.branches) {
        grid_detail::fft_mode(b, st, 0, FFTW_FORWARD);
        grid_detail::fft_mode(b, st, 1, FFTW_FORWARD);
        const long n0 = st.axes[0].n, n1 = st.axes[1].n;
        const double inv = 1.0 / static_cast<double>(n0 * n1);
        for (long i = 0; i < n0; ++i)
            for (long j = 0; j < n1; ++j) b[i * n1 + j] *= std::exp(cplx(0.0, s * st.axes[0].p(i) * st.axes[1].p(j))) * inv;
        grid_detail::fft_mode(b, st, 0, FFTW_BACKWARD);
        grid_detail::fft_mode(b, st, 1, FFTW_BACKWARD);
    }
    position_phase(st, 0, qq);
    check_edges(st, 0, "beamsplitter");
    check_edges(st, 1, "beamsplitter");
}

// e^{-i c P_j Q_k}: translate mode j by c times the position of mode k.
inline void shear(HybridGridState& st, int j, int k, double c = 1.0) {
    require(st.modes() == 2 && j != k, ErrorKind::usage, "shear needs two distinct modes");
    const GridAxis& a = st.axes[j];
    double leak = grid_detail::mass_where(st, j, [&](double x, double y) { return x + c * y < a.x_min || x + c * y > a.x_max(); });
    require(leak < boundary_tol, ErrorKind::domain_overflow, "shear would move mass " + std::to_string(leak) + " off the grid");
    const GridAxis& b = st.axes[k];
    grid_detail::momentum_multiply(st, j, [&](long kk, long line) { return std::exp(cplx(0.0, -a.p(kk) * c * b.x(line))); });
}

// General single-mode Gaussian unitary via S = R(alpha) diag(e^{-z}, e^{z}) R(beta):
// apply U(beta), then S(z), then U(alpha) (Heisenberg matrices compose in reverse).
inline void gaussian_1mode(HybridGridState& st, int m, const Eigen::Matrix2d& A) {
    Eigen::Matrix2d J;
    J << 0, 1, -1, 0;
    Eigen::Matrix2d S = (Eigen::Matrix2d(-J * A)).exp();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(S, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix2d U = svd.matrixU(), V = svd.matrixV();
    Eigen::Vector2d sig = svd.singularValues();
    if (U.determinant() < 0) {
        U.col(1) *= -1;
        V.col(1) *= -1;
    }
    // rotation matrix of U(theta) is [[c, s], [-s, c]]
    const double alpha = std::atan2(U(0, 1), U(0, 0));
    const Eigen::Matrix2d Vt = V.transpose();
    const double beta = std::atan2(Vt(0, 1), Vt(0, 0));
    const double z = -std::log(sig(0));
    rotate(st, m, beta);
    squeeze(st, m, z);
    rotate(st, m, alpha);
}

inline void apply_qubit(HybridGridState& st, const Eigen::Matrix2cd& U) {
    require(st.qubits == 1, ErrorKind::usage, "qubit gate on a state without a qubit");
    auto& b0 = st.branches[0];
    auto& b1 = st.branches[1];
    for (std::size_t i = 0; i < b0.size(); ++i) {
        cplx u = b0[i], v = b1[i];
        b0[i] = U(0, 0) * u + U(0, 1) * v;
        b1[i] = U(1, 0) * u + U(1, 1) * v;
    }
}

// ----- gate dispatch --------------------------------------------------------------

inline bool is_shear_pattern(const Eigen::MatrixXd& A, int& j, int& k, double& c) {
    // A(P_j, Q_k) = A(Q_k, P_j) = -c, everything else zero.
    for (int jj = 0; jj < 2; ++jj) {
        int kk = 1 - jj;
        long pj = 2 * jj + 1, qk = 2 * kk;
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(4, 4);
        B(pj, qk) = B(qk, pj) = A(pj, qk);
        if (A(pj, qk) != 0.0 && (A - B).cwiseAbs().maxCoeff() == 0.0) {
            j = jj;
            k = kk;
            c = -A(pj, qk);
            return true;
        }
    }
    return false;
}

inline void apply_inplace(HybridGridState& st, const Gate& g) {
    switch (g.kind) {
        case GateKind::Displacement: displace(st, g.modes[0], g.d); break;
        case GateKind::CtrlDisplacement:
            require(st.qubits == 1, ErrorKind::usage, "controlled gate needs a qubit");
            displace(st, g.modes[0], g.d, 1);
            break;
        case GateKind::QubitUnitary: apply_qubit(st, g.U); break;
        case GateKind::GaussianUnitary: {
            for (int m : g.modes) require(m < st.modes(), ErrorKind::usage, "gate targets a missing mode");
            if (g.modes.size() == 1) {
                if (g.name == "SQUEEZE") squeeze(st, g.modes[0], g.param);
                else if (g.name == "ROT") rotate(st, g.modes[0], g.param);
                else if (g.name == "PHASE") rotate(st, g.modes[0], -g.param);
                else gaussian_1mode(st, g.modes[0], g.A);
                break;
            }
            // Two-mode: local blocks, beamsplitter or shear patterns.
            Eigen::MatrixXd A = g.A;
            const bool local = A.block<2, 2>(0, 2).cwiseAbs().maxCoeff() == 0.0;
            if (local) {
                gaussian_1mode(st, g.modes[0], A.block<2, 2>(0, 0));
                gaussian_1mode(st, g.modes[1], A.block<2, 2>(2, 2));
                break;
            }
            const bool bs = A(0, 2) == A(1, 3) && A(0, 2) == A(2, 0) && A(1, 3) == A(3, 1) && A(0, 3) == 0.0 && A(1, 2) == 0.0 &&
                            A.block<2, 2>(0, 0).cwiseAbs().maxCoeff() == 0.0 && A.block<2, 2>(2, 2).cwiseAbs().maxCoeff() == 0.0;
            if (bs) {
                require(g.modes[0] != g.modes[1], ErrorKind::usage, "beamsplitter needs two distinct modes");
                beamsplit(st, A(0, 2));
                break;
            }
            int j, k;
            double c;
            if (is_shear_pattern(A, j, k, c)) {
                shear(st, g.modes[j], g.modes[k], c);
                break;
            }
            fail(ErrorKind::capability, "grid backend supports two-mode beamsplitters and shears only");
        }
        case GateKind::PrepVacuum:
        case GateKind::PrepQubit0: fail(ErrorKind::capability, "preparations are handled by prepare(), not apply()");
        case GateKind::HomodyneQ:
        case GateKind::QubitMeasure: fail(ErrorKind::capability, "measurements are handled by homodyne_sweep()");
    }
}

inline HybridGridState apply(const Gate& g, HybridGridState st) {
    apply_inplace(st, g);
    return st;
}

// Run a circuit whose leading preparations define the input: PREP_VAC on each
// mode (sampled on the given axes) and PREP_Q0 on the qubit.
inline HybridGridState run_circuit(const Circuit& c, const std::vector<GridAxis>& axes) {
    require(static_cast<int>(axes.size()) == c.n_modes, ErrorKind::usage, "one grid axis per mode is required");
    require(c.n_modes <= 2 && c.n_qubits <= 1, ErrorKind::capacity, "grid backend supports two modes and one qubit");
    std::size_t i = 0;
    std::vector<bool> prepared(c.n_modes, false);
    bool qubit = false;
    for (; i < c.gates.size() && c.gates[i].is_prep(); ++i) {
        if (c.gates[i].kind == GateKind::PrepVacuum) prepared[c.gates[i].modes[0]] = true;
        else qubit = true;
    }
    for (int m = 0; m < c.n_modes; ++m) require(prepared[m], ErrorKind::usage, "every mode must be prepared at the start");
    require(qubit == (c.n_qubits == 1), ErrorKind::usage, "the qubit must be prepared at the start");
    GaussianSum vac;
    vac.terms.push_back(GaussianTerm{cplx(std::pow(pi, -0.25)), 0.0, 1.0, 0.0, std::nullopt});
    HybridGridState st = prepare(vac, axes[0]);
    if (c.n_modes == 2) st = tensor(st, prepare(vac, axes[1]));
    if (c.n_qubits == 1) st = with_qubit(st, false);
    for (; i < c.gates.size(); ++i) apply_inplace(st, c.gates[i]);
    return st;
}

// ----- measurement ---------------------------------------------------------------

struct HomodyneSweep {
    GridAxis outcome_axis;
    std::vector<double> pdf;  // density on outcome_axis
    // Conditional states on the unmeasured mode, one per outcome in the window
    // [first, first + count): cond[b][r * n_other + j] for branch b, row r.
    long first = 0, count = 0;
    GridAxis other_axis;
    std::vector<std::vector<cplx>> cond;
    double pdf_mass() const {
        double s = 0.0;
        for (double p : pdf) s += p;
        return s * outcome_axis.dx;
    }
};

// Deterministic sweep over all outcomes of a Q measurement on `mode` of a
// two-mode state.  Only outcomes in [window_lo, window_hi] keep their
// conditional states (to bound memory); the pdf covers the whole axis.
inline HomodyneSweep homodyne_sweep(const HybridGridState& st, int mode, double window_lo = -INFINITY, double window_hi = INFINITY) {
    require(st.modes() == 2, ErrorKind::usage, "measuring the only register leaves no conditional state");
    require(mode == 0 || mode == 1, ErrorKind::usage, "invalid mode");
    HomodyneSweep h;
    h.outcome_axis = st.axes[mode];
    h.other_axis = st.axes[1 - mode];
    const long nm = st.axes[mode].n, no = st.axes[1 - mode].n, n1 = st.axes[1].n;
    auto at = [&](const std::vector<cplx>& b, long r, long j) { return mode == 0 ? b[r * n1 + j] : b[j * n1 + r]; };
    h.pdf.assign(nm, 0.0);
    for (const auto& b : st.branches)
        for (long r = 0; r < nm; ++r) {
            double s = 0.0;
            for (long j = 0; j < no; ++j) s += std::norm(at(b, r, j));
            h.pdf[r] += s * h.other_axis.dx;
        }
    long lo = 0, hi = nm;
    while (lo < nm && h.outcome_axis.x(lo) < window_lo) ++lo;
    while (hi > lo && h.outcome_axis.x(hi - 1) > window_hi) --hi;
    h.first = lo;
    h.count = hi - lo;
    h.cond.assign(st.branches.size(), std::vector<cplx>(h.count * no));
    for (long r = lo; r < hi; ++r) {
        const double norm = h.pdf[r] > 0.0 ? 1.0 / std::sqrt(h.pdf[r]) : 0.0;
        for (std::size_t b = 0; b < st.branches.size(); ++b)
            for (long j = 0; j < no; ++j) h.cond[b][(r - lo) * no + j] = at(st.branches[b], r, j) * norm;
    }
    return h;
}

// Draw outcome indices from the sweep's pdf with a counter-based generator.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}
inline std::vector<double> sample_outcomes(const HomodyneSweep& h, std::uint64_t seed, int count) {
    std::vector<double> cdf(h.pdf.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < h.pdf.size(); ++i) cdf[i] = (acc += h.pdf[i] * h.outcome_axis.dx);
    std::vector<double> out;
    for (int i = 0; i < count; ++i) {
        double u = static_cast<double>(splitmix64(seed + static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53 * acc;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        out.push_back(h.outcome_axis.x(std::min<long>(it - cdf.begin(), static_cast<long>(cdf.size()) - 1)));
    }
    return out;
}

// ----- functionals ----------------------------------------------------------------

// <target| tr_qubit |psi><psi| |target> = sum_b |<target, psi_b>|^2 (one mode).
inline double reduce_fidelity(const HybridGridState& st, const GaussianSum& target) {
    require(st.modes() == 1 && target.modes == 1, ErrorKind::usage, "reduce_fidelity expects one-mode states");
    auto t = sample(target, st.axes[0]);
    double f = 0.0;
    for (const auto& b : st.branches) {
        cplx s = 0.0;
        for (long j = 0; j < st.axes[0].n; ++j) s += std::conj(t[j]) * b[j];
        f += std::norm(s * st.axes[0].dx);
    }
    return f;
}

// Overlap of two grid states on identical grids, summed over qubit branches
// (the qubit is treated as part of the pure state).
inline cplx inner(const HybridGridState& a, const HybridGridState& b) {
    require(a.points() == b.points() && a.branches.size() == b.branches.size(), ErrorKind::usage, "grid states differ in shape");
    cplx s = 0.0;
    for (std::size_t k = 0; k < a.branches.size(); ++k)
        for (std::size_t i = 0; i < a.branches[k].size(); ++i) s += std::conj(a.branches[k][i]) * b.branches[k][i];
    return s * a.cell();
}

enum class Observable { H, Q, P, Q2, P2, SP, SQ };

// tr(O rho) with rho the state reduced to `mode` (qubit and other mode traced).
inline cplx expectation(const HybridGridState& st, Observable o, int mode = 0) {
    require(mode >= 0 && mode < st.modes(), ErrorKind::usage, "invalid mode");
    const GridAxis& a = st.axes[mode];
    auto pos = [&](const std::function<cplx(double)>& f) {
        cplx s = 0.0;
        for (const auto& b : st.branches)
            for (long i = 0; i < static_cast<long>(b.size()); ++i) {
                long i0, i1;
                grid_detail::split(st, i, i0, i1);
                s += std::norm(b[i]) * f(a.x(mode == 0 ? i0 : i1));
            }
        return s * st.cell();
    };
    auto mom = [&](const std::function<double(double)>& f) {
        double band = momentum_edge_mass(st, mode);
        require(band < 1e-8, ErrorKind::resolution, "momentum content reaches the band limit");
        auto L = grid_detail::lines(st, mode);
        double s = 0.0, tot = 0.0;
        for (auto b : st.branches) {
            grid_detail::fft_mode(b, st, mode, FFTW_FORWARD);
            for (long l = 0; l < L.howmany; ++l)
                for (long k = 0; k < L.n; ++k) {
                    double w = std::norm(b[l * L.dist + k * L.stride]);
                    s += w * f(a.p(k));
                    tot += w;
                }
        }
        return cplx(s / tot * st.norm_sq());
    };
    switch (o) {
        case Observable::Q: return pos([](double x) { return cplx(x); });
        case Observable::Q2: return pos([](double x) { return cplx(x * x); });
        case Observable::P: return mom([](double p) { return p; });
        case Observable::P2: return mom([](double p) { return p * p; });
        case Observable::H: return pos([](double x) { return cplx(x * x); }) + mom([](double p) { return p * p; });
        case Observable::SQ: return pos([](double x) { return std::exp(cplx(0.0, two_pi * x)); });
        case Observable::SP: {
            HybridGridState sh = st;
            translate(sh, mode, 1.0, true);
            return inner(st, sh);
        }
    }
    return 0.0;
}

// ----- state dump ----------------------------------------------------------------
// Text header line, then raw little-endian IEEE-754 doubles (re, im) per
// amplitude, branch-major, row-major over modes:
//   GKPSTATE v1 modes=<m> qubits=<q> n0=<n> x_min0=<x> dx0=<dx> [n1=... x_min1=... dx1=...]\n
inline void dump_state(const HybridGridState& st, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), ErrorKind::usage, "cannot open dump file " + path);
    out << "GKPSTATE v1 modes=" << st.modes() << " qubits=" << st.qubits;
    out.precision(17);
    for (int m = 0; m < st.modes(); ++m) out << " n" << m << "=" << st.axes[m].n << " x_min" << m << "=" << st.axes[m].x_min << " dx" << m << "=" << st.axes[m].dx;
    out << "\n";
    for (const auto& b : st.branches) out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(cplx)));
}

inline HybridGridState load_state(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), ErrorKind::usage, "cannot open state file " + path);
    std::string header;
    std::getline(in, header);
    std::istringstream hs(header);
    std::string magic, ver, tok;
    hs >> magic >> ver;
    require(magic == "GKPSTATE" && ver == "v1", ErrorKind::usage, "not a v1 state dump");
    HybridGridState st;
    int modes = 0;
    std::map<std::string, std::string> kv;
    while (hs >> tok) {
        auto eq = tok.find('=');
        require(eq != std::string::npos, ErrorKind::usage, "bad header token " + tok);
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    modes = std::stoi(kv.at("modes"));
    st.qubits = std::stoi(kv.at("qubits"));
    for (int m = 0; m < modes; ++m) {
        auto s = std::to_string(m);
        st.axes.push_back({std::stod(kv.at("x_min" + s)), std::stod(kv.at("dx" + s)), std::stol(kv.at("n" + s))});
    }
    st.branches.assign(1u << st.qubits, std::vector<cplx>(st.points()));
    for (auto& b : st.branches) in.read(reinterpret_cast<char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(cplx)));
    require(static_cast<bool>(in), ErrorKind::usage, "truncated state dump");
    return st;
}

}  // namespace gkp
