#pragma once
// Gate IR for hybrid qubit-oscillator circuits: the elementary operation set,
// bounded-strength validation, symplectic bookkeeping, displacement/squeeze
// compilation into constant-strength generators and operation counting.
//
// Conventions (one mode, R = (Q, P), J = [[0, 1], [-1, 0]]):
//   Gaussian unitary   U(A) = exp(i R^T A R / 2), Heisenberg action U^† R U = e^{-JA} R
//   displacement       D(d) = exp(i (d_Q Q - d_P P)),  D^† Q D = Q + d_P,  D^† P D = P + d_Q
//   squeeze            S(z) psi(x) = e^{z/2} psi(e^z x),  A = z [[0, 1], [1, 0]]
//   phase shift        e^{i phi (Q^2 + P^2)/2},  A = phi I
//   rotation           U(theta) = e^{-i theta (Q^2 + P^2)/2} = PhaseShift(-theta)
//   shift / pos-phase  e^{i a P} = D(0, -a),  e^{i a Q} = D(a, 0)

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "core.hpp"

namespace gkp {

enum class GateKind { PrepVacuum, PrepQubit0, QubitUnitary, GaussianUnitary, Displacement, CtrlDisplacement, HomodyneQ, QubitMeasure };

using Vec2 = std::array<double, 2>;  // (d_Q, d_P)

struct Gate {
    GateKind kind = GateKind::GaussianUnitary;
    std::vector<int> modes;
    std::vector<int> qubits;
    Eigen::MatrixXd A;   // GaussianUnitary: symmetric, ordering (Q_m0, P_m0, Q_m1, P_m1)
    Eigen::Matrix2cd U;  // QubitUnitary (single qubit)
    Vec2 d{0.0, 0.0};    // (Ctrl)Displacement
    std::string name;    // shorthand used for printing / serialisation
    double param = 0.0;  // shorthand parameter (z, phi, theta, omega, a)

    bool is_unitary() const {
        return kind == GateKind::QubitUnitary || kind == GateKind::GaussianUnitary || kind == GateKind::Displacement ||
               kind == GateKind::CtrlDisplacement;
    }
    bool is_prep() const { return kind == GateKind::PrepVacuum || kind == GateKind::PrepQubit0; }
    bool is_measurement() const { return kind == GateKind::HomodyneQ || kind == GateKind::QubitMeasure; }
};

// ----- gate constructors ----------------------------------------------------

namespace gates {

inline Gate prep_vacuum(int m) {
    Gate g;
    g.kind = GateKind::PrepVacuum;
    g.modes = {m};
    g.name = "PREP_VAC";
    return g;
}
inline Gate prep_qubit0(int q) {
    Gate g;
    g.kind = GateKind::PrepQubit0;
    g.qubits = {q};
    g.name = "PREP_Q0";
    return g;
}
inline Gate qubit_unitary(int q, const Eigen::Matrix2cd& U, std::string name = "QUBIT") {
    Gate g;
    g.kind = GateKind::QubitUnitary;
    g.qubits = {q};
    g.U = U;
    g.name = std::move(name);
    return g;
}
inline Gate hadamard(int q) {
    Eigen::Matrix2cd H;
    const double r = 1.0 / std::sqrt(2.0);
    H << r, r, r, -r;
    return qubit_unitary(q, H, "H");
}
inline Gate gaussian(std::vector<int> modes, Eigen::MatrixXd A, std::string name = "GAUSS", double param = 0.0) {
    Gate g;
    g.kind = GateKind::GaussianUnitary;
    g.modes = std::move(modes);
    g.A = std::move(A);
    g.name = std::move(name);
    g.param = param;
    return g;
}
inline Gate squeeze(int m, double z) {
    Eigen::MatrixXd A(2, 2);
    A << 0, z, z, 0;
    return gaussian({m}, A, "SQUEEZE", z);
}
inline Gate phase_shift(int m, double phi) {
    Eigen::MatrixXd A = phi * Eigen::MatrixXd::Identity(2, 2);
    return gaussian({m}, A, "PHASE", phi);
}
inline Gate rotation(int m, double theta) {
    Gate g = phase_shift(m, -theta);
    g.name = "ROT";
    g.param = theta;
    return g;
}
inline Gate beamsplitter(int j, int k, double omega) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A(0, 2) = A(2, 0) = omega;
    A(1, 3) = A(3, 1) = omega;
    return gaussian({j, k}, A, "BS", omega);
}
// e^{-i P_j Q_k}: translates mode j by the position of mode k.
inline Gate shear(int j, int k) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(4, 4);
    A(1, 2) = A(2, 1) = -1.0;
    return gaussian({j, k}, A, "SHEAR", 0.0);
}
inline Gate displacement(int m, Vec2 d) {
    Gate g;
    g.kind = GateKind::Displacement;
    g.modes = {m};
    g.d = d;
    g.name = "DISP";
    return g;
}
// e^{i a P}
inline Gate shift(int m, double a) {
    Gate g = displacement(m, {0.0, -a});
    g.name = "SHIFT";
    g.param = a;
    return g;
}
// e^{i a Q}
inline Gate pos_phase(int m, double a) {
    Gate g = displacement(m, {a, 0.0});
    g.name = "POSPHASE";
    g.param = a;
    return g;
}
inline Gate ctrl_displacement(int q, int m, Vec2 d) {
    Gate g;
    g.kind = GateKind::CtrlDisplacement;
    g.qubits = {q};
    g.modes = {m};
    g.d = d;
    g.name = "CDISP";
    return g;
}
inline Gate homodyne(int m) {
    Gate g;
    g.kind = GateKind::HomodyneQ;
    g.modes = {m};
    g.name = "HOMODYNE";
    return g;
}
inline Gate measure_qubit(int q) {
    Gate g;
    g.kind = GateKind::QubitMeasure;
    g.qubits = {q};
    g.name = "MEASURE";
    return g;
}

}  // namespace gates

// ----- validation -------------------------------------------------------------

inline constexpr double strength_limit = two_pi;
inline constexpr double strength_slack = 1e-12;

struct BoundVerdict {
    bool ok = true;
    double norm = 0.0;
    double limit = strength_limit;
};

inline double operator_norm_sym(const Eigen::MatrixXd& A) {
    if (A.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline BoundVerdict validate_bounded(const Gate& g) {
    BoundVerdict v;
    if (g.kind == GateKind::GaussianUnitary)
        v.norm = operator_norm_sym(g.A);
    else if (g.kind == GateKind::Displacement || g.kind == GateKind::CtrlDisplacement)
        v.norm = std::hypot(g.d[0], g.d[1]);
    v.ok = v.norm <= v.limit + strength_slack;
    return v;
}

// ----- circuits -------------------------------------------------------------

struct Circuit {
    int n_modes = 1;
    int n_qubits = 0;
    std::vector<Gate> gates;
    std::vector<std::string> labels;
    bool strict = true;

    Circuit() = default;
    Circuit(int modes, int qubits, bool strict_mode = true) : n_modes(modes), n_qubits(qubits), strict(strict_mode) {}

    Circuit& add(Gate g) {
        for (int m : g.modes) require(m >= 0 && m < n_modes, ErrorKind::usage, "gate targets a mode outside the register");
        for (int q : g.qubits) require(q >= 0 && q < n_qubits, ErrorKind::usage, "gate targets a qubit outside the register");
        if (g.kind == GateKind::GaussianUnitary) {
            require(g.A.rows() == 2 * static_cast<long>(g.modes.size()) && g.A.cols() == g.A.rows(), ErrorKind::usage,
                    "Gaussian gate matrix has the wrong size");
            require((g.A - g.A.transpose()).cwiseAbs().maxCoeff() < 1e-12, ErrorKind::usage, "Gaussian gate matrix must be symmetric");
        }
        if (strict) {
            auto v = validate_bounded(g);
            require(v.ok, ErrorKind::parameter,
                    "gate " + g.name + " exceeds the bounded-strength limit (norm " + std::to_string(v.norm) + ")");
        }
        gates.push_back(std::move(g));
        return *this;
    }
    Circuit& append(const Circuit& c) {
        for (const auto& g : c.gates) add(g);
        return *this;
    }
    std::size_t size() const { return gates.size(); }
};

// ----- symplectic bookkeeping -------------------------------------------------

inline Eigen::MatrixXd symplectic_form(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int j = 0; j < n; ++j) {
        J(2 * j, 2 * j + 1) = 1.0;
        J(2 * j + 1, 2 * j) = -1.0;
    }
    return J;
}

struct SymplecticAction {
    Eigen::MatrixXd S;             // U^† R U = S R + shift
    Eigen::VectorXd displacement;  // Weyl vector d per mode (d_Q, d_P); mean shift is (d_P, d_Q)

    Eigen::VectorXd mean_shift() const {
        Eigen::VectorXd s(displacement.size());
        for (long j = 0; j < s.size(); j += 2) {
            s(j) = displacement(j + 1);
            s(j + 1) = displacement(j);
        }
        return s;
    }
    double symplectic_defect() const {
        auto J = symplectic_form(static_cast<int>(S.rows() / 2));
        return (S * J * S.transpose() - J).cwiseAbs().maxCoeff();
    }
};

// Full-register Heisenberg matrix of a Gaussian gate.
inline Eigen::MatrixXd heisenberg_matrix(const Gate& g, int n_modes) {
    const int n = 2 * n_modes;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t i = 0; i < g.modes.size(); ++i)
        for (std::size_t j = 0; j < g.modes.size(); ++j)
            A.block<2, 2>(2 * g.modes[i], 2 * g.modes[j]) += g.A.block<2, 2>(2 * i, 2 * j);
    Eigen::MatrixXd M = -symplectic_form(n_modes) * A;
    return M.exp();
}

inline SymplecticAction symplectic_of(const Circuit& c) {
    const int n = 2 * c.n_modes;
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
    for (const auto& g : c.gates) {
        if (g.kind == GateKind::GaussianUnitary) {
            Eigen::MatrixXd Sk = heisenberg_matrix(g, c.n_modes);
            S = Sk * S;
            s = Sk * s;
        } else if (g.kind == GateKind::Displacement) {
            int m = g.modes[0];
            s(2 * m) += g.d[1];
            s(2 * m + 1) += g.d[0];
        } else {
            fail(ErrorKind::capability, "symplectic action requested for a circuit with non-Gaussian gate " + g.name);
        }
    }
    SymplecticAction act;
    act.S = S;
    act.displacement.resize(n);
    for (int j = 0; j < n; j += 2) {
        act.displacement(j) = s(j + 1);
        act.displacement(j + 1) = s(j);
    }
    return act;
}

// ----- compilation -------------------------------------------------------------

struct Compiled {
    Circuit circuit;
    int count = 0;
};

inline int displacement_count_bound(double norm) { return 2 * static_cast<int>(std::ceil(std::abs(std::log(norm)))) + 3; }

// D(d) on one mode via  U(theta) S(-z)^N e^{-iP} S(z)^N U(-theta)  (rightmost acts first),
// or a single bounded displacement when ||d|| <= 2 pi.
inline Compiled compile_displacement(Vec2 d, bool strict = true, int mode = 0, int n_modes = 1) {
    Compiled out{Circuit(n_modes, 0, strict), 0};
    const double r = std::hypot(d[0], d[1]);
    if (r == 0.0) return out;
    if (r <= strength_limit) {
        out.circuit.add(gates::displacement(mode, d));
        out.count = 1;
        return out;
    }
    const int N = static_cast<int>(std::ceil(std::abs(std::log(r))));
    const double z = std::log(r) / N;
    // e^{-i c (sin t Q + cos t P)} = D(d) needs c sin t = -d_Q and c cos t = d_P.
    double theta = std::atan2(-d[0], d[1]);
    if (theta < 0.0) theta += two_pi;
    if (theta >= two_pi) theta -= two_pi;
    if (theta != 0.0) out.circuit.add(gates::rotation(mode, -theta));
    for (int i = 0; i < N; ++i) out.circuit.add(gates::squeeze(mode, z));
    out.circuit.add(gates::shift(mode, -1.0));
    for (int i = 0; i < N; ++i) out.circuit.add(gates::squeeze(mode, -z));
    if (theta != 0.0) out.circuit.add(gates::rotation(mode, theta));
    out.count = static_cast<int>(out.circuit.size());
    return out;
}

// Controlled displacement by a large vector: the same factorisation with only
// the central generator controlled (conjugation by Gaussian unitaries).
inline Compiled compile_ctrl_displacement(int q, Vec2 d, int mode, int n_modes, int n_qubits) {
    Compiled out{Circuit(n_modes, n_qubits), 0};
    const double r = std::hypot(d[0], d[1]);
    if (r == 0.0) return out;
    if (r <= strength_limit) {
        out.circuit.add(gates::ctrl_displacement(q, mode, d));
        out.count = 1;
        return out;
    }
    auto base = compile_displacement(d, true, mode, n_modes);
    for (auto g : base.circuit.gates) {
        if (g.kind == GateKind::Displacement) {
            g = gates::ctrl_displacement(q, mode, g.d);
        }
        out.circuit.add(g);
    }
    out.count = static_cast<int>(out.circuit.size());
    return out;
}

// S(z_total) as ceil(|z_total|) equal squeezes of strength <= 1.
inline Compiled compile_squeeze(double z_total, int mode = 0, int n_modes = 1) {
    Compiled out{Circuit(n_modes, 0), 0};
    if (z_total == 0.0) return out;
    const int N = static_cast<int>(std::ceil(std::abs(z_total)));
    for (int i = 0; i < N; ++i) out.circuit.add(gates::squeeze(mode, z_total / N));
    out.count = N;
    return out;
}

// Split form used by comb preparation: S(log 2)^n S(z_Delta)^{ceil(log 1/Delta)},
// z_Delta = log(1/Delta) / ceil(log 1/Delta).
inline Compiled compile_squeeze_split(int n, double Delta, int mode = 0, int n_modes = 1) {
    require(Delta > 0.0 && Delta < 1.0, ErrorKind::parameter, "split squeeze needs Delta in (0, 1)");
    Compiled out{Circuit(n_modes, 0), 0};
    for (int i = 0; i < n; ++i) out.circuit.add(gates::squeeze(mode, std::log(2.0)));
    const double L = std::log(1.0 / Delta);
    const int N = static_cast<int>(std::ceil(L));
    for (int i = 0; i < N; ++i) out.circuit.add(gates::squeeze(mode, L / N));
    out.count = n + N;
    return out;
}

// ----- operation counting --------------------------------------------------------

struct OpCountReport {
    int preps = 0;
    int unitaries = 0;  // T (or T1 for heralded protocols)
    int measurements = 0;
    int correction_budget = 0;  // T2
    bool heralded = false;
    int total = 0;
};

// Unitary protocols:  T + (m + 1) + m'.   Heralded:  T1 + T2 + (2m + 1) + 2m'.
// Here m + 1 = number of modes and m' = number of qubits.
inline OpCountReport op_count(const Circuit& c, bool heralded = false, int T2 = 0) {
    OpCountReport r;
    for (const auto& g : c.gates) {
        if (g.is_prep()) ++r.preps;
        else if (g.is_measurement()) ++r.measurements;
        else ++r.unitaries;
    }
    r.heralded = heralded;
    const int m = c.n_modes - 1, mq = c.n_qubits;
    if (heralded) {
        r.correction_budget = T2;
        r.total = r.unitaries + T2 + (2 * m + 1) + 2 * mq;
    } else {
        r.total = r.unitaries + (m + 1) + mq;
    }
    return r;
}

// ----- complexity lower bounds --------------------------------------------------

struct DisplacementLower {
    double f;           // (1/8pi) (2 log||d|| + log(1 + 1/||d||^2))
    double simplified;  // (1/4pi) log||d|| - 1
};

inline DisplacementLower displacement_complexity_lower(Vec2 d) {
    const double r = std::hypot(d[0], d[1]);
    require(r > 0.0, ErrorKind::parameter, "displacement must be nonzero");
    return {(2.0 * std::log(r) + std::log1p(1.0 / (r * r))) / (8.0 * pi), std::log(r) / (4.0 * pi) - 1.0};
}

// ----- text serialisation -------------------------------------------------------
//
//   # comment
//   CIRCUIT modes=<m> qubits=<q>
//   PREP_VAC m<i> | PREP_Q0 q<i> | HOMODYNE m<i> | MEASURE q<i>
//   SQUEEZE m<i> z | PHASE m<i> phi | ROT m<i> theta | SHIFT m<i> a | POSPHASE m<i> a
//   BS m<i> m<j> omega | SHEAR m<i> m<j>
//   DISP m<i> dQ dP | CDISP q<i> m<j> dQ dP
//   GAUSS m<i> [m<j>] : a11 a12 ... (row-major, 2k x 2k)
//   H q<i> | QUBIT q<i> : re00 im00 re01 im01 re10 im10 re11 im11

namespace detail {
inline std::string fmt_num(double v) {
    std::ostringstream o;
    o << std::setprecision(17) << v;
    return o.str();
}
inline int parse_index(const std::string& tok, char prefix) {
    require(tok.size() >= 2 && tok[0] == prefix, ErrorKind::usage, "expected register token '" + std::string(1, prefix) + "<i>', got '" + tok + "'");
    try {
        return std::stoi(tok.substr(1));
    } catch (...) {
        fail(ErrorKind::usage, "bad register index '" + tok + "'");
    }
}
inline double parse_num(std::istream& in, const std::string& what) {
    std::string tok;
    require(static_cast<bool>(in >> tok), ErrorKind::usage, "missing number for " + what);
    try {
        std::size_t pos = 0;
        double v = std::stod(tok, &pos);
        require(pos == tok.size(), ErrorKind::usage, "bad number '" + tok + "'");
        return v;
    } catch (const Error&) {
        throw;
    } catch (...) {
        fail(ErrorKind::usage, "bad number '" + tok + "' for " + what);
    }
}
}  // namespace detail

inline std::string to_text(const Circuit& c) {
    using detail::fmt_num;
    std::ostringstream o;
    o << "CIRCUIT modes=" << c.n_modes << " qubits=" << c.n_qubits << "\n";
    for (const auto& g : c.gates) {
        const std::string& n = g.name;
        if (n == "PREP_VAC" || n == "HOMODYNE") o << n << " m" << g.modes[0];
        else if (n == "PREP_Q0" || n == "MEASURE" || n == "H") o << n << " q" << g.qubits[0];
        else if (n == "SQUEEZE" || n == "PHASE" || n == "ROT" || n == "SHIFT" || n == "POSPHASE")
            o << n << " m" << g.modes[0] << " " << fmt_num(g.param);
        else if (n == "BS") o << n << " m" << g.modes[0] << " m" << g.modes[1] << " " << fmt_num(g.param);
        else if (n == "SHEAR") o << n << " m" << g.modes[0] << " m" << g.modes[1];
        else if (g.kind == GateKind::Displacement) o << "DISP m" << g.modes[0] << " " << fmt_num(g.d[0]) << " " << fmt_num(g.d[1]);
        else if (g.kind == GateKind::CtrlDisplacement)
            o << "CDISP q" << g.qubits[0] << " m" << g.modes[0] << " " << fmt_num(g.d[0]) << " " << fmt_num(g.d[1]);
        else if (g.kind == GateKind::GaussianUnitary) {
            o << "GAUSS";
            for (int m : g.modes) o << " m" << m;
            o << " :";
            for (long i = 0; i < g.A.rows(); ++i)
                for (long j = 0; j < g.A.cols(); ++j) o << " " << fmt_num(g.A(i, j));
        } else if (g.kind == GateKind::QubitUnitary) {
            o << "QUBIT q" << g.qubits[0] << " :";
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) o << " " << fmt_num(g.U(i, j).real()) << " " << fmt_num(g.U(i, j).imag());
        }
        o << "\n";
    }
    return o.str();
}

inline Circuit from_text(const std::string& text, bool strict = true) {
    using namespace detail;
    std::istringstream lines(text);
    std::string line;
    Circuit c;
    bool header = false;
    int lineno = 0;
    while (std::getline(lines, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream in(line);
        std::string op;
        if (!(in >> op)) continue;
        auto ctx = " (line " + std::to_string(lineno) + ")";
        if (op == "CIRCUIT") {
            std::string a, b;
            in >> a >> b;
            require(a.rfind("modes=", 0) == 0 && b.rfind("qubits=", 0) == 0, ErrorKind::usage, "malformed CIRCUIT header" + ctx);
            c = Circuit(std::stoi(a.substr(6)), std::stoi(b.substr(7)), strict);
            header = true;
            continue;
        }
        require(header, ErrorKind::usage, "gate before CIRCUIT header" + ctx);
        std::string t1, t2;
        if (op == "PREP_VAC" || op == "HOMODYNE") {
            in >> t1;
            int m = parse_index(t1, 'm');
            c.add(op == "PREP_VAC" ? gates::prep_vacuum(m) : gates::homodyne(m));
        } else if (op == "PREP_Q0" || op == "MEASURE" || op == "H") {
            in >> t1;
            int q = parse_index(t1, 'q');
            c.add(op == "PREP_Q0" ? gates::prep_qubit0(q) : op == "MEASURE" ? gates::measure_qubit(q) : gates::hadamard(q));
        } else if (op == "SQUEEZE" || op == "PHASE" || op == "ROT" || op == "SHIFT" || op == "POSPHASE") {
            in >> t1;
            int m = parse_index(t1, 'm');
            double v = parse_num(in, op);
            if (op == "SQUEEZE") c.add(gates::squeeze(m, v));
            else if (op == "PHASE") c.add(gates::phase_shift(m, v));
            else if (op == "ROT") c.add(gates::rotation(m, v));
            else if (op == "SHIFT") c.add(gates::shift(m, v));
            else c.add(gates::pos_phase(m, v));
        } else if (op == "BS") {
            in >> t1 >> t2;
            double w = parse_num(in, op);
            c.add(gates::beamsplitter(parse_index(t1, 'm'), parse_index(t2, 'm'), w));
        } else if (op == "SHEAR") {
            in >> t1 >> t2;
            c.add(gates::shear(parse_index(t1, 'm'), parse_index(t2, 'm')));
        } else if (op == "DISP") {
            in >> t1;
            double dq = parse_num(in, op), dp = parse_num(in, op);
            c.add(gates::displacement(parse_index(t1, 'm'), {dq, dp}));
        } else if (op == "CDISP") {
            in >> t1 >> t2;
            double dq = parse_num(in, op), dp = parse_num(in, op);
            c.add(gates::ctrl_displacement(parse_index(t1, 'q'), parse_index(t2, 'm'), {dq, dp}));
        } else if (op == "GAUSS") {
            std::vector<int> ms;
            std::string tok;
            while (in >> tok && tok != ":") ms.push_back(parse_index(tok, 'm'));
            const long k = 2 * static_cast<long>(ms.size());
            require(k > 0, ErrorKind::usage, "GAUSS needs at least one mode" + ctx);
            Eigen::MatrixXd A(k, k);
            for (long i = 0; i < k; ++i)
                for (long j = 0; j < k; ++j) A(i, j) = parse_num(in, "GAUSS matrix");
            c.add(gates::gaussian(ms, A));
        } else if (op == "QUBIT") {
            in >> t1;
            std::string colon;
            in >> colon;
            require(colon == ":", ErrorKind::usage, "QUBIT expects ':' before matrix entries" + ctx);
            Eigen::Matrix2cd U;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    double re = parse_num(in, "QUBIT matrix"), im = parse_num(in, "QUBIT matrix");
                    U(i, j) = cplx(re, im);
                }
            require((U.adjoint() * U - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-9, ErrorKind::usage,
                    "QUBIT matrix is not unitary" + ctx);
            c.add(gates::qubit_unitary(parse_index(t1, 'q'), U));
        } else {
            fail(ErrorKind::usage, "unknown gate '" + op + "'" + ctx);
        }
    }
    require(header, ErrorKind::usage, "missing CIRCUIT header");
    return c;
}

}  // namespace gkp
