// gkpsim: batch runner for the comb, Gaussification and GKP protocols, the
// invariant suites, parameter sweeps, the displacement/squeeze compiler and
// grid simulation of serialized circuits.
//
// Exit status: 0 all verdicts hold or are vacuous; 2 usage; 3 a verdict is
// violated; 4 numerical / capability failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "gkp/bounds.hpp"
#include "gkp/circuit.hpp"
#include "gkp/protocols.hpp"
#include "gkp/sim.hpp"
#include "gkp/states.hpp"
#include "gkp/verify.hpp"

using json = nlohmann::ordered_json;
using namespace gkp;

namespace {

constexpr const char* schema = "gkpsim.report/1";

struct Globals {
    std::string backend = "auto";
    double tol = 1e-9;
    std::uint64_t seed = 1;
    std::string out;
    int workers = 1;
    bool force = false;
};

json params_json(const std::vector<std::pair<std::string, double>>& p) {
    json j = json::object();
    for (const auto& [k, v] : p) j[k] = v;
    return j;
}

json bound_json(const BoundReport& b) {
    return {{"name", b.name},
            {"params", params_json(b.params)},
            {"paper_rhs", b.rhs},
            {"measured_lhs", b.lhs ? json(*b.lhs) : json(nullptr)},
            {"verdict", to_string(b.verdict)},
            {"note", b.note}};
}

json ops_json(const OpCountReport& o) {
    return {{"unitaries", o.unitaries}, {"preparations", o.preps}, {"correction_budget", o.correction_budget}, {"heralded", o.heralded}, {"measurements", o.measurements}, {"total", o.total}};
}

json report_json(const ProtocolReport& r) {
    return {{"protocol", r.protocol},
            {"kappa", r.kappa},
            {"Delta", r.Delta},
            {"n", r.n},
            {"L", r.L},
            {"ops", ops_json(r.ops)},
            {"T2_formula", r.T2_formula},
            {"T2_compiled", r.T2_compiled},
            {"p_acc", r.p_acc},
            {"fidelity", r.fidelity},
            {"trace_distance_lower", r.td_lower},
            {"trace_distance_upper", r.td_upper},
            {"Delta_P", r.Delta_P},
            {"Delta_Q", r.Delta_Q},
            {"xi", r.xi},
            {"qubit_plus_weight", r.qubit_plus_weight},
            {"backend", r.backend}};
}

json verdicts_json(const std::vector<BoundReport>& v) {
    json a = json::array();
    for (const auto& b : v) a.push_back(bound_json(b));
    return a;
}

bool violated(const std::vector<BoundReport>& v) {
    for (const auto& b : v)
        if (b.verdict == Verdict::violated) return true;
    return false;
}

json document(const std::string& command, const json& config, const Globals& g) {
    json d;
    d["schema"] = schema;
    d["command"] = command;
    json c = config;
    c["backend"] = g.backend;
    c["tol"] = g.tol;
    c["seed"] = g.seed;
    c["workers"] = g.workers;
    c["force"] = g.force;
    d["config"] = c;
    return d;
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    require(static_cast<bool>(f), ErrorKind::usage, "cannot write " + path);
    f << text;
}

std::string csv_num(double v) {
    std::ostringstream os;
    os.imbue(std::locale::classic());
    os << std::setprecision(17) << v;
    return os.str();
}

// Weighted draws from the heralded outcome nodes.
json sample_nodes(const HeraldedEnsemble& e, std::uint64_t seed, int count) {
    json a = json::array();
    if (count <= 0 || e.entries.empty()) return a;
    std::vector<double> cdf;
    double acc = 0.0;
    for (const auto& n : e.entries) cdf.push_back(acc += n.weight);
    for (int i = 0; i < count; ++i) {
        double u = static_cast<double>(splitmix64(seed + static_cast<std::uint64_t>(i)) >> 11) * 0x1.0p-53 * acc;
        auto k = std::min<std::size_t>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), cdf.size() - 1);
        a.push_back({{"x", e.entries[k].x}, {"correction", e.entries[k].correction}});
    }
    return a;
}

int finish(json& doc, const std::vector<BoundReport>& verdicts, double runtime, const Globals& g) {
    doc["bounds"] = verdicts_json(verdicts);
    doc["timing"] = {{"runtime_s", runtime}};
    emit(g.out, doc.dump(2) + "\n");
    return violated(verdicts) ? 3 : 0;
}

// ----- commands ----------------------------------------------------------------------

struct CombArgs {
    double delta = 0.0;
    int rounds = 0;
    double refine = 1.0;
    std::string dump;
};

int cmd_comb(const CombArgs& a, const Globals& g) {
    detail::Stopwatch sw;
    auto res = run_comb(a.delta, a.rounds, parse_backend(g.backend), a.refine, g.force, g.tol);
    if (!a.dump.empty()) {
        if (res.grid) dump_state(*res.grid, a.dump);
        else dump_state(to_grid(*res.gauss, {comb_axis(a.delta, a.rounds, a.refine)}), a.dump);
    }
    json doc = document("comb", {{"delta", a.delta}, {"rounds", a.rounds}, {"refine", a.refine}, {"dump_state", a.dump}}, g);
    doc["report"] = report_json(res.report);
    doc["circuit"] = to_text(res.circuit);
    return finish(doc, res.report.verdicts, sw.seconds(), g);
}

struct GaussifyArgs {
    double kappa = 0.0, delta = 0.0, eps = 0.0, resolution = 0.0;
    int L = 0;
    std::string input = "truncated-comb";
    int samples = 0;
};

int cmd_gaussify(const GaussifyArgs& a, const Globals& g) {
    detail::Stopwatch sw;
    require(a.L > 0 && a.L % 8 == 0, ErrorKind::parameter, "L must be a positive multiple of 8");
    require(parse_backend(g.backend) != Backend::grid, ErrorKind::usage,
            "gaussify runs on the semi-analytic path; use --backend gauss or auto");
    const double eps = a.eps > 0.0 ? a.eps : std::sqrt(a.delta);
    GaussianSum in;
    if (a.input == "comb") in = build_state(spec::Comb{a.L, a.delta});
    else if (a.input == "truncated-comb") in = normalized(build_state(spec::TruncatedComb{a.L, a.delta, eps}));
    else fail(ErrorKind::usage, "unknown input '" + a.input + "' (expected comb or truncated-comb)");
    GaussifyOptions opt;
    opt.Delta = a.delta;
    opt.resolution = a.resolution;
    opt.verdict_tol = g.tol;
    auto res = run_gaussification(in, a.kappa, a.L, opt);
    json doc = document("gaussify",
                        {{"kappa", a.kappa}, {"L", a.L}, {"delta", a.delta}, {"eps", eps}, {"input", a.input}, {"resolution", a.resolution},
                         {"samples", a.samples}},
                        g);
    doc["report"] = report_json(res.report);
    const GaussBounds gb = gauss_bounds(a.kappa, a.delta, a.L, res.report.xi);
    doc["report"]["p_acc_exact_input_bound"] = gb.p_lb_exact;
    doc["report"]["conditional_overlap_lower_bound"] = conditional_overlap_lb(a.kappa, a.L);
    if (a.samples > 0) doc["samples"] = sample_nodes(res.ensemble, g.seed, a.samples);
    return finish(doc, res.report.verdicts, sw.seconds(), g);
}

struct GkpArgs {
    double kappa = 0.0, delta = 0.0;
    std::vector<double> tails;
    int samples = 0;
};

json gkp_report(const GkpResult& res) {
    json r = report_json(res.report);
    r["comb_fidelity"] = res.comb.report.fidelity;
    r["comb_ops"] = ops_json(res.comb.report.ops);
    return r;
}

int cmd_gkp(const GkpArgs& a, const Globals& g) {
    detail::Stopwatch sw;
    auto res = run_gkp(a.kappa, a.delta, parse_backend(g.backend), g.force, a.tails, g.tol);
    json doc = document("gkp", {{"kappa", a.kappa}, {"delta", a.delta}, {"tails", a.tails}, {"samples", a.samples}}, g);
    doc["report"] = gkp_report(res);
    std::vector<BoundReport> verdicts = res.report.verdicts;
    if (!a.tails.empty()) {
        json t = json::array();
        for (std::size_t i = 0; i < a.tails.size() && i < res.gauss.tail_pos.size(); ++i) {
            const double R = a.tails[i];
            const double mom = i < res.gauss.tail_mom.size() ? res.gauss.tail_mom[i] : std::nan("");
            t.push_back({{"R", R},
                         {"position_mass", res.gauss.tail_pos[i]},
                         {"momentum_mass", mom},
                         {"distance_lower", gkp_distance_lower(res.gauss.tail_pos[i], std::isnan(mom) ? 0.0 : mom, a.kappa, a.delta, R)}});
        }
        doc["report"]["tails"] = t;
    }
    if (a.samples > 0 && res.comb.gauss) doc["samples"] = sample_nodes(res.gauss.ensemble, g.seed, a.samples);
    return finish(doc, verdicts, sw.seconds(), g);
}

struct VerifyArgs {
    std::string suite;
    std::vector<double> kappa, delta, R;
    int gates = 8, trials = 50;
    std::string csv;
};

int cmd_verify(const VerifyArgs& a, const Globals& g) {
    detail::Stopwatch sw;
    std::vector<VerifyRow> rows;
    auto add = [&](std::vector<VerifyRow> r) {
        for (auto& x : r) rows.push_back(std::move(x));
    };
    const bool all = a.suite == "all";
    if (all || a.suite == "formulas") add(verify_formulas());
    if (all || a.suite == "tails") {
        if (a.kappa.empty() && a.delta.empty() && a.R.empty()) add(verify_tails());
        else
            add(verify_tails(a.kappa.empty() ? std::vector<double>{0.002, 0.01, 0.05, 0.2} : a.kappa,
                             a.delta.empty() ? std::vector<double>{0.001, 0.004, 0.009} : a.delta,
                             a.R.empty() ? std::vector<double>{1, 2, 5, 10} : a.R));
    }
    if (all || a.suite == "moments") add(verify_moments(a.gates, a.trials, g.seed));
    if (all || a.suite == "stability") add(verify_stability());
    std::ostringstream csv;
    csv << "suite,name,params,measured,paper_rhs,verdict\n";
    json jr = json::array();
    std::vector<BoundReport> verdicts;
    std::map<std::string, int> counts;
    for (const auto& r : rows) {
        csv << r.suite << "," << r.name << ",\"" << params_text(r.params) << "\"," << csv_num(r.measured) << "," << csv_num(r.paper_rhs) << ","
            << to_string(r.verdict) << "\n";
        verdicts.push_back(BoundReport{r.name, r.params, r.paper_rhs, r.measured, r.verdict, r.suite});
        counts[to_string(r.verdict)]++;
    }
    if (!a.csv.empty()) emit(a.csv, csv.str());
    json doc = document("verify", {{"suite", a.suite}, {"kappa", a.kappa}, {"delta", a.delta}, {"R", a.R}, {"gates", a.gates}, {"trials", a.trials}}, g);
    doc["summary"] = counts;
    return finish(doc, verdicts, sw.seconds(), g);
}

struct SweepArgs {
    std::string protocol = "gkp";
    std::vector<double> kappa, delta;
    std::vector<int> rounds;
};

int cmd_sweep(const SweepArgs& a, const Globals& g) {
    struct Cell {
        double kappa = std::nan(""), delta = 0.0;
        int rounds = 0;
        ProtocolReport rep;
        std::string error;
        int code = 0;
    };
    std::vector<Cell> cells;
    if (a.protocol == "gkp") {
        require(!a.kappa.empty() && !a.delta.empty(), ErrorKind::usage, "sweep gkp needs --kappa and --delta lists");
        for (double k : a.kappa)
            for (double d : a.delta) cells.push_back({k, d, 0, {}, {}, 0});
    } else if (a.protocol == "comb") {
        require(!a.rounds.empty() && !a.delta.empty(), ErrorKind::usage, "sweep comb needs --rounds and --delta lists");
        for (int n : a.rounds)
            for (double d : a.delta) cells.push_back({std::nan(""), d, n, {}, {}, 0});
    } else {
        fail(ErrorKind::usage, "unknown sweep protocol '" + a.protocol + "'");
    }
    const Backend be = parse_backend(g.backend);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cells.size();) {
            Cell& c = cells[i];
            try {
                c.rep = a.protocol == "gkp" ? run_gkp(c.kappa, c.delta, be, g.force, {}, g.tol).report
                                            : run_comb(c.delta, c.rounds, be, 1.0, g.force, g.tol).report;
            } catch (const Error& e) {
                c.error = e.what();
                c.code = exit_code(e.kind());
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < std::max(1, g.workers); ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    std::ostringstream csv;
    csv << "protocol,kappa,Delta,n,L,p_acc,fidelity,Delta_P,Delta_Q,ops_total,ops_unitaries,verdicts,error\n";
    bool bad = false;
    for (const auto& c : cells) {
        std::string v;
        for (const auto& b : c.rep.verdicts) {
            v += (v.empty() ? "" : ";") + b.name + "=" + to_string(b.verdict);
            if (b.verdict == Verdict::violated) bad = true;
        }
        csv << a.protocol << "," << csv_num(c.kappa) << "," << csv_num(c.delta) << "," << c.rep.n << "," << c.rep.L << "," << csv_num(c.rep.p_acc)
            << "," << csv_num(c.rep.fidelity) << "," << csv_num(c.rep.Delta_P) << "," << csv_num(c.rep.Delta_Q) << "," << c.rep.ops.total << ","
            << c.rep.ops.unitaries << ",\"" << v << "\",\"" << c.error << "\"\n";
    }
    emit(g.out, csv.str());
    int code = 0;
    for (const auto& c : cells) code = std::max(code, c.code);
    return code ? code : (bad ? 3 : 0);
}

struct CompileArgs {
    std::vector<double> displacement;
    std::optional<double> squeeze;
    std::string circuit_out;
};

int cmd_compile(const CompileArgs& a, const Globals& g) {
    require(a.displacement.empty() != !a.squeeze.has_value(), ErrorKind::usage, "give exactly one of --displacement or --squeeze");
    json doc = document("compile", {}, g);
    Compiled c;
    std::vector<BoundReport> verdicts;
    if (!a.displacement.empty()) {
        require(a.displacement.size() == 2, ErrorKind::usage, "--displacement takes dq,dp");
        const Vec2 d{a.displacement[0], a.displacement[1]};
        c = compile_displacement(d, true);
        const double nd = std::hypot(d[0], d[1]);
        doc["config"]["displacement"] = a.displacement;
        if (nd > 0.0) {
            const auto lo = displacement_complexity_lower(d);
            doc["upper_bound"] = displacement_count_bound(nd);
            doc["lower_bound"] = lo.f;
            doc["lower_bound_simplified"] = lo.simplified;
            verdicts.push_back(check_le("compile_count_upper", c.count, displacement_count_bound(nd), 0.0, true, 1e300, {{"norm", nd}}));
            verdicts.push_back(check_ge("compile_count_lower", c.count, lo.f, g.tol, true, 0.0, {{"norm", nd}}));
        }
    } else {
        c = compile_squeeze(*a.squeeze);
        doc["config"]["squeeze"] = *a.squeeze;
    }
    doc["count"] = c.count;
    doc["circuit"] = to_text(c.circuit);
    if (!a.circuit_out.empty()) emit(a.circuit_out, to_text(c.circuit));
    doc["config"]["circuit_out"] = a.circuit_out;
    return finish(doc, verdicts, 0.0, g);
}

struct SimulateArgs {
    std::string circuit;
    double half_extent = 24.0, dx = 1.0 / 64.0;
    std::vector<double> target;
    int samples = 0;
    std::string dump;
};

int cmd_simulate(const SimulateArgs& a, const Globals& g) {
    detail::Stopwatch sw;
    std::ifstream f(a.circuit);
    require(static_cast<bool>(f), ErrorKind::usage, "cannot read circuit " + a.circuit);
    std::stringstream ss;
    ss << f.rdbuf();
    Circuit parsed = from_text(ss.str(), !g.force);
    // Circuits without preparations start from the vacuum (and |0> qubits).
    Circuit c = parsed;
    if (parsed.gates.empty() || !parsed.gates.front().is_prep()) {
        c = Circuit(parsed.n_modes, parsed.n_qubits, !g.force);
        for (int m = 0; m < parsed.n_modes; ++m) c.add(gates::prep_vacuum(m));
        for (int q = 0; q < parsed.n_qubits; ++q) c.add(gates::prep_qubit0(q));
        c.append(parsed);
    }
    const GridAxis ax = GridAxis::centered(a.half_extent, a.dx);
    std::vector<BoundReport> verdicts;
    json doc = document("simulate", {{"circuit", a.circuit}, {"half_extent", a.half_extent}, {"dx", a.dx}, {"target_displacement", a.target},
                                     {"samples", a.samples}, {"dump_state", a.dump}},
                        g);
    json res;
    const Backend be = parse_backend(g.backend);
    if (be == Backend::gauss) {
        auto st = run_on_gaussian_backend(c);
        res["backend"] = "gauss";
        res["norm"] = st.norm_sq();
        if (!a.target.empty()) {
            require(a.target.size() == 2 && st.modes == 1, ErrorKind::usage, "--target-displacement takes dq,dp on one mode");
            GaussianSum coh = build_state(spec::Vacuum{});
            coh.terms[0] = phased(translated(coh.terms[0], a.target[1]), a.target[0]);
            res["fidelity"] = reduce_fidelity(st, coh);
        }
        if (!a.dump.empty()) dump_state(to_grid(st, std::vector<GridAxis>(st.modes, ax)), a.dump);
    } else {
        auto st = run_circuit(c, std::vector<GridAxis>(c.n_modes, ax));
        res["backend"] = "grid";
        res["norm"] = st.norm_sq();
        json modes = json::array();
        for (int m = 0; m < st.modes(); ++m)
            modes.push_back({{"Q", expectation(st, Observable::Q, m).real()},
                             {"P", expectation(st, Observable::P, m).real()},
                             {"energy", expectation(st, Observable::H, m).real()}});
        res["modes"] = modes;
        if (!a.target.empty()) {
            require(a.target.size() == 2 && st.modes() == 1, ErrorKind::usage, "--target-displacement takes dq,dp on one mode");
            GaussianSum coh = build_state(spec::Vacuum{});
            coh.terms[0] = phased(translated(coh.terms[0], a.target[1]), a.target[0]);
            res["fidelity"] = reduce_fidelity(st, coh);
        }
        if (a.samples > 0) {
            require(st.modes() == 1, ErrorKind::usage, "sampling is available for one-mode circuits");
            HomodyneSweep h;
            h.outcome_axis = ax;
            h.pdf.assign(ax.n, 0.0);
            for (const auto& b : st.branches)
                for (long j = 0; j < ax.n; ++j) h.pdf[j] += std::norm(b[j]);
            res["samples"] = sample_outcomes(h, g.seed, a.samples);
        }
        if (!a.dump.empty()) dump_state(st, a.dump);
    }
    doc["report"] = res;
    return finish(doc, verdicts, sw.seconds(), g);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gkpsim: comb, Gaussification and GKP preparation protocols with bound verdicts"};
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.set_config("--config", "", "TOML/INI file mirroring the flags (flags override the file)");
    Globals g;
    app.add_option("--backend", g.backend, "simulation backend")->check(CLI::IsMember({"grid", "gauss", "auto"}))->capture_default_str();
    app.add_option("--tol", g.tol, "verdict tolerance")->capture_default_str();
    app.add_option("--seed", g.seed, "seed for sampling and random suites")->capture_default_str();
    app.add_option("--out", g.out, "report path (default stdout)");
    app.add_option("--workers", g.workers, "concurrent sweep cells")->check(CLI::PositiveNumber)->capture_default_str();
    app.add_flag("--force", g.force, "run outside the protocol ranges (verdicts become precondition_unmet)");

    CombArgs ca;
    auto* comb = app.add_subcommand("comb", "comb-state preparation");
    comb->add_option("--delta", ca.delta, "comb width Delta")->required();
    comb->add_option("--rounds", ca.rounds, "number of rounds n (L = 2^n)")->required();
    comb->add_option("--refine", ca.refine, "grid refinement factor")->capture_default_str();
    comb->add_option("--dump-state", ca.dump, "write the output state to this file");

    GaussifyArgs ga;
    auto* gz = app.add_subcommand("gaussify", "envelope Gaussification of an exact comb input");
    gz->add_option("--kappa", ga.kappa, "envelope parameter")->required();
    gz->add_option("--L", ga.L, "comb length (multiple of 8)")->required();
    gz->add_option("--delta", ga.delta, "comb width Delta")->required();
    gz->add_option("--eps", ga.eps, "peak truncation (default sqrt(Delta))");
    gz->add_option("--input", ga.input, "comb | truncated-comb")->capture_default_str();
    gz->add_option("--resolution", ga.resolution, "outcome step (default min(0.02, kappa/5))");
    gz->add_option("--samples", ga.samples, "draw this many heralded outcomes");

    GkpArgs ka;
    auto* gk = app.add_subcommand("gkp", "approximate GKP-state preparation");
    gk->add_option("--kappa", ka.kappa, "envelope parameter")->required();
    gk->add_option("--delta", ka.delta, "peak width")->required();
    gk->add_option("--tails", ka.tails, "window radii R for tail masses")->delimiter(',');
    gk->add_option("--samples", ka.samples, "draw this many heralded outcomes");

    VerifyArgs va;
    auto* vf = app.add_subcommand("verify", "invariant suites");
    vf->add_option("suite", va.suite, "formulas | tails | moments | stability | all")
        ->required()
        ->check(CLI::IsMember({"formulas", "tails", "moments", "stability", "all"}));
    vf->add_option("--kappa", va.kappa, "kappa grid (tails)")->delimiter(',');
    vf->add_option("--delta", va.delta, "Delta grid (tails)")->delimiter(',');
    vf->add_option("--R", va.R, "window radii (tails)")->delimiter(',');
    vf->add_option("--gates", va.gates, "maximum gates per random circuit (moments)")->capture_default_str();
    vf->add_option("--trials", va.trials, "random circuits (moments)")->capture_default_str();
    vf->add_option("--csv", va.csv, "write rows as CSV");

    SweepArgs sa;
    auto* sw = app.add_subcommand("sweep", "Cartesian parameter sweep (CSV)");
    sw->add_option("--protocol", sa.protocol, "gkp | comb")->capture_default_str();
    sw->add_option("--kappa", sa.kappa, "kappa list")->delimiter(',');
    sw->add_option("--delta", sa.delta, "Delta list")->delimiter(',');
    sw->add_option("--rounds", sa.rounds, "round counts (comb)")->delimiter(',');

    CompileArgs ma;
    auto* cp = app.add_subcommand("compile", "compile a displacement or squeeze into bounded gates");
    auto* od = cp->add_option("--displacement", ma.displacement, "dq,dp")->delimiter(',')->expected(2);
    auto* os = cp->add_option("--squeeze", ma.squeeze, "total squeezing z");
    od->excludes(os);
    cp->add_option("--circuit-out", ma.circuit_out, "write the circuit file here");

    SimulateArgs ia;
    auto* sm = app.add_subcommand("simulate", "simulate a serialized circuit from the vacuum");
    sm->add_option("--circuit", ia.circuit, "circuit file")->required();
    sm->add_option("--half-extent", ia.half_extent, "grid half extent")->capture_default_str();
    sm->add_option("--dx", ia.dx, "grid spacing")->capture_default_str();
    sm->add_option("--target-displacement", ia.target, "report fidelity to the coherent state |dq,dp>")->delimiter(',')->expected(2);
    sm->add_option("--samples", ia.samples, "draw homodyne samples of Q (one mode)");
    sm->add_option("--dump-state", ia.dump, "write the final state to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        if (*comb) return cmd_comb(ca, g);
        if (*gz) return cmd_gaussify(ga, g);
        if (*gk) return cmd_gkp(ka, g);
        if (*vf) return cmd_verify(va, g);
        if (*sw) return cmd_sweep(sa, g);
        if (*cp) return cmd_compile(ma, g);
        if (*sm) return cmd_simulate(ia, g);
    } catch (const Error& e) {
        std::cerr << "gkpsim: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "gkpsim: " << e.what() << "\n";
        return 4;
    }
    return 2;
}
