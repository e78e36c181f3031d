#include "commands.hpp"

#include "cqed/errors.hpp"
#include "cqed/lindblad.hpp"
#include "cqed/meanfield.hpp"
#include "cqed/resfluor.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

namespace cqed::cli {

using nlohmann::json;

void Output::csv(const std::string& name, const CsvTable& table) {
    write_csv(dir_ / name, table);
    files_.push_back(name);
}

void Output::json(const std::string& name, const nlohmann::json& j) {
    std::filesystem::create_directories(dir_);
    std::ofstream f(dir_ / name);
    f << j.dump(2) << '\n';
    if (!f) throw InvalidArgument("failed writing " + (dir_ / name).string());
    files_.push_back(name);
}

void Output::record(const std::string& name, const TrajectoryRecord& rec) {
    std::filesystem::create_directories(dir_);
    write_record(dir_ / name, rec);
    files_.push_back(name);
    files_.push_back(sidecar_path(name).string());
}

namespace {

// Declarations

void declare_params(Settings& s) {
    s.declare("params.g", "0");
    s.declare("params.kappa", "1");
    s.declare("params.gamma", "1");
    s.declare("params.gamma_s", "0");
    s.declare("params.eps_d", "0.1");
    s.declare("params.focusing", "0.5");
    s.declare("params.eta", "1");
    s.declare("params.theta", "0");
    s.declare("output.dir", "cqed-out");
}

void declare_numerics(Settings& s) {
    s.declare("numerics.n_fock", "10");
    s.declare("numerics.rel_tol", "1e-9");
    s.declare("numerics.abs_tol", "1e-12");
    s.declare("numerics.truncation_tol", "1e-6");
}

void declare_spectrum(Settings& s) {
    // Detuning on the 2(w - w_A)/gamma axis; delays in units of 1/gamma.
    s.declare("spectrum.omega_min", "-30");
    s.declare("spectrum.omega_max", "30");
    s.declare("spectrum.omega_points", "241");
    s.declare("spectrum.omega_A", "0");
    s.declare("spectrum.tau_max", "44");
    s.declare("spectrum.tau_points", "4401");
    s.declare("spectrum.method", "both");
}

void declare_g2(Settings& s) {
    s.declare("g2.channel", "forwards");
    s.declare("g2.tau_max", "10");  // gamma tau
    s.declare("g2.tau_points", "1001");
    s.declare("g2.method", "both");
}

void declare_trajectory(Settings& s) {
    const TrajectoryConfig c;
    s.declare("trajectory.scheme", "diffusion");
    s.declare("trajectory.seed", "1");
    s.declare("trajectory.count", "1");
    s.declare("trajectory.t_end", "10");
    s.declare("trajectory.sample_dt", "0.01");
    s.declare("trajectory.tolerance", "1e-3");
    s.declare("trajectory.norm_tolerance", "1e-6");
    s.declare("trajectory.max_refinement", std::to_string(c.max_refinement));
    s.declare("trajectory.initial_fock", "1");
    s.declare("trajectory.initial_s1", "0");
    s.declare("trajectory.initial_s2", "0");
    std::string obs;
    for (const std::string& o : default_observables()) obs += (obs.empty() ? "" : ",") + o;
    s.declare("trajectory.observables", obs);
    s.declare("trajectory.field_average_from", "none");
    s.declare("trajectory.reduced", "false");
}

void declare_bistability(Settings& s) {
    const BistabilityOptions b;
    s.declare("bistability.hysteresis", "0.1");
    s.declare("bistability.smoothing", "1");
    s.declare("bistability.coincidence_window", "2");
    s.declare("bistability.q_points", std::to_string(b.q_points));
    s.declare("bistability.q_extent", "0");
    s.declare("bistability.q_prominence", "0.1");
}

void figure_defaults(Settings& s, const std::string& fig) {
    auto set = [&](const std::string& k, const std::string& v) { s.declare(k, v); };
    set("output.dir", "cqed-" + fig);
    if (fig == "fig2") {
        declare_numerics(s);
        declare_spectrum(s);
        set("params.gamma", "1");
        set("params.kappa", "200");
        set("params.eps_d", "50");
        set("numerics.n_fock", "7");
        set("figure.focusing", "0.05,0.1,0.4,0.8");
    } else if (fig == "fig3") {
        declare_g2(s);
        set("params.gamma", "1");
        set("params.kappa", "1");
        set("params.eps_d", "0.01");
        set("figure.focusing_a", "0.2,0.3,0.4,0.5");
        set("figure.focusing_b", "0.7,0.75,0.8,0.82");
    } else if (fig == "fig4") {
        declare_numerics(s);
        declare_g2(s);
        set("params.kappa", "1");
        set("params.eps_d", "0.1");
        set("params.focusing", "0.7");
        set("numerics.n_fock", "5");
        set("g2.tau_max", "8");
        set("g2.tau_points", "801");
        set("figure.gamma_over_kappa", "0.025,0.01,0.001");
    } else if (fig == "fig5") {
        declare_numerics(s);
        declare_g2(s);
        set("params.kappa", "1");
        set("params.eps_d", "0.04");
        set("params.focusing", "0.9");
        set("params.gamma", "0.000624");
        set("numerics.n_fock", "5");
        set("g2.tau_max", "8");
        set("g2.tau_points", "801");
        set("figure.g_over_eps", "0.05,1,2.5");
    } else if (fig == "fig6") {
        declare_numerics(s);
        declare_trajectory(s);
        set("params.kappa", "1");
        set("params.eps_d", "0.04");
        set("params.g", "0.02");
        set("params.gamma_s", "0.01");
        set("params.focusing", "0.9");
        set("numerics.n_fock", "5");
        set("trajectory.t_end", "20000");
        set("trajectory.sample_dt", "5");
        set("trajectory.observables", "s1z,s2y,s2z,pe");
        set("figure.gamma_over_eps", "0.0156,0.0069");
    } else if (fig == "fig7" || fig == "fig8") {
        declare_numerics(s);
        declare_trajectory(s);
        declare_bistability(s);
        set("params.kappa", "1");
        set("params.g", "100");
        set("numerics.n_fock", "260");
        set("numerics.truncation_tol", "0");
        set("trajectory.t_end", "100");
        set("trajectory.tolerance", "1e-2");
        set("trajectory.observables", "a,n,s1y,s2y,s2z");
        set("trajectory.field_average_from", "10");
        if (fig == "fig7") {
            set("params.gamma", "40");
            set("params.eps_d", "50.1");
            set("figure.focusing", "0.1,0.9");
        } else {
            set("params.gamma", "0.004");
            set("params.focusing", "0.95");
            set("figure.eps_over_g", "0.501,0.495");
            set("bistability.q_points", "81");
        }
    } else {
        throw InvalidArgument("unknown figure '" + fig + "'");
    }
}

// Helpers

PropagationOptions propagation(const Settings& s) {
    PropagationOptions o;
    o.rel_tol = s.num("numerics.rel_tol");
    o.abs_tol = s.num("numerics.abs_tol");
    return o;
}

struct MeState {
    Liouvillian L;
    DensityMatrix rho;
};

MeState solve(const SystemParams& p, const Settings& s) {
    Liouvillian L(p, SpaceLayout(s.integer("numerics.n_fock")));
    SteadyStateOptions o;
    o.truncation_tol = s.num("numerics.truncation_tol");
    DensityMatrix rho = steady_state(L, o);
    return {std::move(L), std::move(rho)};
}

void require_gamma(const SystemParams& p, const char* what) {
    if (!(p.gamma > 0.0)) throw InvalidArgument(std::string(what) + " needs params.gamma > 0 (delays scale with 1/gamma)");
}

bool wants(const Settings& s, const std::string& key, const char* which) {
    const std::string& m = s.str(key);
    if (m != "both" && m != "analytic" && m != "numeric")
        throw InvalidArgument(key + " must be analytic, numeric or both");
    return m == "both" || m == which;
}

std::vector<double> omega_axis(const Settings& s) {
    return linspace(s.num("spectrum.omega_min"), s.num("spectrum.omega_max"), s.integer("spectrum.omega_points"));
}

// Delays in physical units for a gamma-tau grid.
std::vector<double> physical_tau(const std::vector<double>& scaled, double gamma) {
    std::vector<double> t(scaled.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = scaled[i] / gamma;
    return t;
}

std::string tag(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

std::vector<std::uint64_t> seeds_of(const Settings& s) {
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(1, s.integer("trajectory.count"))));
    std::iota(seeds.begin(), seeds.end(), s.uint("trajectory.seed"));
    return seeds;
}

TrajectoryConfig trajectory_config(const Settings& s, const SystemParams& p) {
    TrajectoryConfig c;
    c.params = p;
    c.n_fock = s.integer("numerics.n_fock");
    c.scheme = parse_scheme(s.str("trajectory.scheme"));
    c.seed = s.uint("trajectory.seed");
    c.t_end = s.num("trajectory.t_end");
    c.sample_dt = s.num("trajectory.sample_dt");
    c.initial.fock = s.integer("trajectory.initial_fock");
    c.initial.s1 = s.integer("trajectory.initial_s1");
    c.initial.s2 = s.integer("trajectory.initial_s2");
    c.observables = s.words("trajectory.observables");
    c.tolerance = s.num("trajectory.tolerance");
    c.norm_tolerance = s.num("trajectory.norm_tolerance");
    c.max_refinement = s.integer("trajectory.max_refinement");
    c.truncation_tol = s.num("numerics.truncation_tol");
    if (s.str("trajectory.field_average_from") != "none") c.field_average_from = s.num("trajectory.field_average_from");
    c.validate();
    return c;
}

BistabilityOptions bistability_options(const Settings& s) {
    BistabilityOptions b;
    b.hysteresis = s.num("bistability.hysteresis");
    b.smoothing = s.num("bistability.smoothing");
    b.coincidence_window = s.num("bistability.coincidence_window");
    b.q_points = s.integer("bistability.q_points");
    b.q_extent = s.num("bistability.q_extent");
    b.q_prominence = s.num("bistability.q_prominence");
    return b;
}

// Husimi Q of a time-averaged field state on a square grid, columns x, y, q.
CsvTable q_table(const Matrix& field, int points, double extent) {
    if (extent <= 0.0) {
        double n = 0.0;
        for (int k = 0; k < field.rows(); ++k) n += k * field(k, k).real();
        extent = 1.6 * std::sqrt(std::max(n, 1.0)) + 3.0;
    }
    const std::vector<cplx> grid = complex_grid(-extent, extent, points, -extent, extent, points);
    const HusimiResult q = husimi_q(field, grid);
    CsvTable t{{"x", "y", "q"}, {{}, {}, q.values}};
    for (const cplx& z : grid) {
        t.columns[0].push_back(z.real());
        t.columns[1].push_back(z.imag());
    }
    return t;
}

json peaks_json(const std::vector<QPeak>& peaks) {
    json j = json::array();
    for (const QPeak& p : peaks) j.push_back({{"x", p.alpha.real()}, {"y", p.alpha.imag()}, {"q", p.value}});
    return j;
}

json report_json(const BistabilityReport& r) {
    return {{"threshold", r.threshold},
            {"switches", r.switches},
            {"raw_switches", r.raw_switches},
            {"dwell_times", r.dwell_times},
            {"mean_dwell", r.mean_dwell},
            {"sign_correlation", r.sign_correlation},
            {"coincidence", r.coincidence},
            {"mean_photons", r.mean_photons},
            {"q_peaks", peaks_json(r.q_peaks)},
            {"q_raw_maxima", r.q_raw_maxima},
            {"q_conjugate", r.q_conjugate}};
}

// Commands

CsvTable spectrum_table(const SystemParams& p, const Settings& s, bool squeezing) {
    require_gamma(p, "spectrum");
    const std::vector<double> omega = omega_axis(s);
    const double omega_A = s.num("spectrum.omega_A");
    const bool normalized = squeezing && s.flag("spectrum.normalized");
    CsvTable t{{"omega"}, {omega}};
    if (wants(s, "spectrum.method", "analytic")) {
        if (p.g != 0.0 || p.gamma_s != 0.0)
            throw InvalidArgument("closed-form spectra need params.g = 0 and params.gamma_s = 0; use spectrum.method = numeric");
        t.header.push_back("analytic");
        t.columns.push_back(squeezing ? squeezing_spectrum(p, p.theta, omega, normalized).values
                                      : incoherent_spectrum(p, omega, omega_A).values);
    }
    if (wants(s, "spectrum.method", "numeric")) {
        const MeState me = solve(p, s);
        const std::vector<double> tau =
            physical_tau(linspace(0.0, s.num("spectrum.tau_max"), s.integer("spectrum.tau_points")), p.gamma);
        const ForwardsCorrelators c = forwards_correlators(me.L, me.rho, tau, propagation(s));
        t.header.push_back("numeric");
        t.columns.push_back(squeezing ? squeezing_from_correlators(c, p.gamma / 2, p.eta, p.theta, omega, normalized).values
                                      : numeric_incoherent_spectrum(c.pm, p.gamma / 2, omega, std::nullopt, omega_A).values);
    }
    return t;
}

CsvTable g2_table(const SystemParams& p, const Settings& s, const std::string& channel) {
    require_gamma(p, "g2");
    const std::vector<double> scaled = linspace(0.0, s.num("g2.tau_max"), s.integer("g2.tau_points"));
    const std::vector<double> tau = physical_tau(scaled, p.gamma);
    if (channel != "forwards" && channel != "sideways") throw InvalidArgument("g2.channel must be forwards or sideways");
    const bool fwd = channel == "forwards";
    CsvTable t{{"gamma_tau"}, {scaled}};
    if (wants(s, "g2.method", "analytic")) {
        if (fwd) {
            if (p.g != 0.0 || p.gamma_s != 0.0)
                throw InvalidArgument("closed-form forwards g2 needs params.g = 0 and params.gamma_s = 0");
            t.header.push_back("analytic");
            t.columns.push_back(g2_forwards_badcavity(p, tau));
            t.header.push_back("weak_excitation");
            t.columns.push_back(g2_forwards_weak(p, tau));
        } else {
            // With the internal atom the external drive is the dressed amplitude.
            const double Y = p.g == 0.0 ? derive(p).Y : adiabatic_steady_state(p).Y_pp;
            t.header.push_back("analytic");
            t.columns.push_back(g2_sideways(p.gamma, Y, tau));
        }
    }
    if (wants(s, "g2.method", "numeric")) {
        const MeState me = solve(p, s);
        const SparseOp C = fwd ? forwards_operator(p, me.L.ops()) : sideways_operator(p, me.L.ops());
        t.header.push_back("numeric");
        t.columns.push_back(numeric_g2(me.L, me.rho, C, tau, propagation(s)));
    }
    return t;
}

void steady_state_command(const SystemParams& p, const Settings& s, Output& out) {
    const MeState me = solve(p, s);
    const OperatorSet& o = me.L.ops();
    const SparseOp n(o.ad * o.a);
    auto c = [&](const SparseOp& op) { return json::array({me.rho.expect(op).real(), me.rho.expect(op).imag()}); };
    const Matrix field = partial_trace_field(me.rho);
    json j = {{"a", c(o.a)},
              {"n", me.rho.expect(n).real()},
              {"s1m", c(o.s1m)},
              {"s1z", me.rho.expect(o.s1z).real()},
              {"s2m", c(o.s2m)},
              {"s2z", me.rho.expect(o.s2z).real()},
              {"forwards_flux", forwards_flux(me.rho, p)},
              {"trace", me.rho.trace_real()},
              {"hermiticity_defect", me.rho.hermiticity_defect()},
              {"min_eigenvalue", me.rho.min_eigenvalue()},
              {"stationarity_residual", stationarity_residual(me.L, me.rho)},
              {"top_fock_population", top_fock_population(field)}};
    out.json("steady_state.json", j);
    CsvTable t{{"n", "p"}, {{}, {}}};
    for (int k = 0; k < field.rows(); ++k) {
        t.columns[0].push_back(k);
        t.columns[1].push_back(field(k, k).real());
    }
    out.csv("fock_distribution.csv", t);
}

void meanfield_command(const SystemParams& p, const Settings& s, Output& out) {
    MeanFieldState s0 = MeanFieldState::ground();
    const std::string& start = s.str("meanfield.start");
    if (start == "plus" || start == "minus") s0 = meanfield_branches(p)[start == "plus" ? 0 : 1].state;
    else if (start != "ground") throw InvalidArgument("meanfield.start must be ground, plus or minus");
    const std::vector<double> t = linspace(0.0, s.num("meanfield.t_end"), s.integer("meanfield.points"));
    MeanFieldOptions mo;
    mo.rel_tol = s.num("meanfield.rel_tol");
    mo.abs_tol = s.num("meanfield.abs_tol");
    const auto states = integrate_meanfield(p, s0, t, mo);
    CsvTable tab{{"t", "re_a", "im_a", "re_beta1", "im_beta1", "zeta1", "re_beta2", "im_beta2", "zeta2", "pseudo_spin1"},
                 std::vector<std::vector<double>>(10)};
    for (std::size_t i = 0; i < t.size(); ++i) {
        const MeanFieldState& m = states[i];
        const double row[] = {t[i],          m.alpha.real(), m.alpha.imag(), m.beta1.real(), m.beta1.imag(),
                              m.zeta1,       m.beta2.real(), m.beta2.imag(), m.zeta2,        m.pseudo_spin1()};
        for (int k = 0; k < 10; ++k) tab.columns[k].push_back(row[k]);
    }
    out.csv("meanfield.csv", tab);
    const NeoclassicalField nf = neoclassical_field(p);
    json j = {{"bimodal", nf.bimodal},
              {"alpha_plus", {nf.plus.real(), nf.plus.imag()}},
              {"alpha_minus", {nf.minus.real(), nf.minus.imag()}}};
    if (p.kappa > 0.0) {
        const AdiabaticSteadyState a = adiabatic_steady_state(p);
        j["adiabatic"] = {{"beta1", {a.beta1.real(), a.beta1.imag()}}, {"zeta1", a.zeta1},
                          {"beta2", {a.beta2.real(), a.beta2.imag()}}, {"zeta2", a.zeta2},
                          {"Y_pp", a.Y_pp},                            {"Y_pp_limit", a.Y_pp_limit},
                          {"bad_cavity", a.bad_cavity}};
    }
    out.json("meanfield_summary.json", j);
}

std::vector<TrajectoryRecord> run_records(const Settings& s, const TrajectoryConfig& cfg, bool reduced) {
    const std::vector<std::uint64_t> seeds = seeds_of(s);
    if (!reduced) return run_ensemble(cfg, seeds);
    std::vector<TrajectoryRecord> out;
    for (const std::uint64_t seed : seeds) {
        TrajectoryConfig c = cfg;
        c.seed = seed;
        out.push_back(run_reduced_resfl_trajectory(c));
    }
    return out;
}

void write_records(const std::vector<TrajectoryRecord>& recs, Output& out, const std::string& stem) {
    for (const TrajectoryRecord& r : recs) out.record(stem + "_" + std::to_string(r.config.seed) + ".csv", r);
    if (recs.size() < 2) return;
    CsvTable mean{{"t"}, {recs.front().time}};
    for (std::size_t c = 0; c < recs.front().columns.size(); ++c) {
        std::vector<double> m(recs.front().time.size(), 0.0);
        for (const TrajectoryRecord& r : recs)
            for (std::size_t i = 0; i < m.size(); ++i) m[i] += r.data[c][i] / static_cast<double>(recs.size());
        mean.header.push_back(recs.front().columns[c]);
        mean.columns.push_back(std::move(m));
    }
    out.csv(stem + "_mean.csv", mean);
}

Matrix averaged_field(const std::vector<TrajectoryRecord>& recs) {
    Matrix f;
    int samples = 0;
    for (const TrajectoryRecord& r : recs) {
        if (r.field_samples == 0) continue;
        if (f.size() == 0) f = Matrix::Zero(r.field_average.rows(), r.field_average.cols());
        f += static_cast<double>(r.field_samples) * r.field_average;
        samples += r.field_samples;
    }
    if (samples > 0) f /= static_cast<double>(samples);
    return f;
}

void bistability_command(const SystemParams& p, const Settings& s, Output& out) {
    const TrajectoryConfig cfg = trajectory_config(s, p);
    const auto recs = run_ensemble(cfg, seeds_of(s));
    write_records(recs, out, "trajectory");
    const BistabilityOptions b = bistability_options(s);
    out.json("bistability.json", report_json(bistability_statistics(recs, b)));
    const Matrix f = averaged_field(recs);
    if (f.size() > 0) out.csv("bistability_q.csv", q_table(f, b.q_points, b.q_extent));
}

// Figures

void fig2(const Settings& s, Output& out) {
    const char panel[] = "abcd";
    const std::vector<double> focusing = s.list("figure.focusing");
    for (std::size_t i = 0; i < focusing.size(); ++i) {
        SystemParams p = s.params();
        p.focusing = focusing[i];
        require_gamma(p, "fig2");
        const std::vector<double> omega = omega_axis(s);
        const MeState me = solve(p, s);
        const std::vector<double> tau =
            physical_tau(linspace(0.0, s.num("spectrum.tau_max"), s.integer("spectrum.tau_points")), p.gamma);
        const ForwardsCorrelators c = forwards_correlators(me.L, me.rho, tau, propagation(s));
        CsvTable t{{"omega", "incoherent_analytic", "incoherent_numeric", "squeezing_analytic", "squeezing_numeric"},
                   {omega, incoherent_spectrum(p, omega, s.num("spectrum.omega_A")).values,
                    numeric_incoherent_spectrum(c.pm, p.gamma / 2, omega, std::nullopt, s.num("spectrum.omega_A")).values,
                    squeezing_spectrum(p, 0.0, omega, true).values,
                    squeezing_from_correlators(c, p.gamma / 2, p.eta, 0.0, omega, true).values}};
        const std::string name = i < 4 ? std::string(1, panel[i]) : tag(focusing[i]);
        out.csv("fig2_" + name + ".csv", t);
    }
}

void fig3(const Settings& s, Output& out) {
    const std::vector<double> scaled = linspace(0.0, s.num("g2.tau_max"), s.integer("g2.tau_points"));
    for (const char* panel : {"a", "b"}) {
        CsvTable t{{"gamma_tau"}, {scaled}};
        for (const double f : s.list(std::string("figure.focusing_") + panel)) {
            SystemParams p = s.params();
            p.focusing = f;
            require_gamma(p, "fig3");
            t.header.push_back("Gamma_" + tag(f));
            t.columns.push_back(g2_forwards_weak(p, physical_tau(scaled, p.gamma)));
        }
        out.csv(std::string("fig3_") + panel + ".csv", t);
    }
}

void fig4(const Settings& s, Output& out) {
    const std::vector<double> scaled = linspace(0.0, s.num("g2.tau_max"), s.integer("g2.tau_points"));
    CsvTable fwd{{"gamma_tau"}, {scaled}}, side{{"gamma_tau"}, {scaled}};
    for (const double r : s.list("figure.gamma_over_kappa")) {
        SystemParams p = s.params();
        p.gamma = r * p.kappa;
        const std::vector<double> tau = physical_tau(scaled, p.gamma);
        const MeState me = solve(p, s);
        const std::string k = "_" + tag(r);
        fwd.header.push_back("numeric" + k);
        fwd.columns.push_back(numeric_g2(me.L, me.rho, forwards_operator(p, me.L.ops()), tau, propagation(s)));
        fwd.header.push_back("analytic" + k);
        fwd.columns.push_back(g2_forwards_badcavity(p, tau));
        side.header.push_back("numeric" + k);
        side.columns.push_back(numeric_g2(me.L, me.rho, sideways_operator(p, me.L.ops()), tau, propagation(s)));
        side.header.push_back("analytic" + k);
        side.columns.push_back(g2_sideways(p, tau));
    }
    out.csv("fig4_a.csv", fwd);
    out.csv("fig4_b.csv", side);
}

void fig5(const Settings& s, Output& out) {
    const std::vector<double> scaled = linspace(0.0, s.num("g2.tau_max"), s.integer("g2.tau_points"));
    CsvTable main{{"gamma_tau"}, {scaled}}, inset{{"gamma_tau"}, {scaled}};
    for (const double r : s.list("figure.g_over_eps")) {
        SystemParams p = s.params();
        p.g = r * p.eps_d;
        require_gamma(p, "fig5");
        const std::vector<double> tau = physical_tau(scaled, p.gamma);
        const MeState me = solve(p, s);
        main.header.push_back("g_over_eps_" + tag(r));
        main.columns.push_back(numeric_g2(me.L, me.rho, sideways_operator(p, me.L.ops()), tau, propagation(s)));
        inset.header.push_back("g_over_eps_" + tag(r));
        inset.columns.push_back(g2_sideways(p.gamma, adiabatic_steady_state(p).Y_pp_limit, tau));
    }
    out.csv("fig5_main.csv", main);
    out.csv("fig5_inset.csv", inset);
}

void fig6(const Settings& s, Output& out) {
    const char panel[] = "ab";
    const std::vector<double> ratios = s.list("figure.gamma_over_eps");
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        SystemParams p = s.params();
        p.gamma = ratios[i] * p.eps_d;
        const TrajectoryConfig cfg = trajectory_config(s, p);
        const std::string name = "fig6_" + (i < 2 ? std::string(1, panel[i]) : tag(ratios[i]));
        out.record(name + "_full.csv", run_trajectory(cfg));
        out.record(name + "_reduced.csv", run_reduced_resfl_trajectory(cfg));
    }
}

void bimodal_figure(const Settings& s, Output& out, const std::string& fig) {
    const bool seven = fig == "fig7";
    const std::vector<double> values = s.list(seven ? "figure.focusing" : "figure.eps_over_g");
    const BistabilityOptions b = bistability_options(s);
    json summary = json::object();
    for (std::size_t i = 0; i < values.size(); ++i) {
        SystemParams p = s.params();
        if (seven) p.focusing = values[i];
        else p.eps_d = values[i] * p.g;
        const TrajectoryRecord rec = run_trajectory(trajectory_config(s, p));
        const std::string name = fig + "_" + (i == 0 ? "top" : i == 1 ? "bottom" : tag(values[i]));
        out.record(name + ".csv", rec);
        json entry = {{seven ? "focusing" : "eps_over_g", values[i]}};
        if (rec.field_samples > 0) {
            double n = 0.0;
            for (int k = 0; k < rec.field_average.rows(); ++k) n += k * rec.field_average(k, k).real();
            entry["mean_photons"] = n;
            const CsvTable q = q_table(rec.field_average, b.q_points, b.q_extent);
            out.csv(name + "_q.csv", q);
            std::vector<cplx> grid;
            for (std::size_t k = 0; k < q.columns[0].size(); ++k) grid.emplace_back(q.columns[0][k], q.columns[1][k]);
            entry["q_peaks"] = peaks_json(q_local_maxima(q.columns[2], grid, b.q_points, b.q_points, b.q_prominence));
        }
        summary[name] = entry;
    }
    out.json(fig + "_summary.json", summary);
}

}  // namespace

Settings defaults_for(const std::string& command, const std::string& figure) {
    Settings s;
    declare_params(s);
    if (command == "spectrum" || command == "squeezing") {
        declare_numerics(s);
        declare_spectrum(s);
        if (command == "squeezing") s.declare("spectrum.normalized", "true");
    } else if (command == "g2") {
        declare_numerics(s);
        declare_g2(s);
    } else if (command == "steady-state") {
        declare_numerics(s);
    } else if (command == "meanfield") {
        s.declare("meanfield.start", "ground");
        s.declare("meanfield.t_end", "100");
        s.declare("meanfield.points", "1001");
        s.declare("meanfield.rel_tol", "1e-10");
        s.declare("meanfield.abs_tol", "1e-12");
    } else if (command == "trajectory") {
        declare_numerics(s);
        declare_trajectory(s);
    } else if (command == "bistability") {
        declare_numerics(s);
        declare_trajectory(s);
        declare_bistability(s);
        s.declare("trajectory.field_average_from", "10");
        s.declare("trajectory.observables", "a,n,s1y,s2y");
    } else if (command == "figure") {
        figure_defaults(s, figure);
    } else {
        throw InvalidArgument("unknown command '" + command + "'");
    }
    return s;
}

void run_command(const std::string& command, const std::string& figure, const Settings& s, Output& out) {
    if (command == "figure") {
        if (figure == "fig2") fig2(s, out);
        else if (figure == "fig3") fig3(s, out);
        else if (figure == "fig4") fig4(s, out);
        else if (figure == "fig5") fig5(s, out);
        else if (figure == "fig6") fig6(s, out);
        else bimodal_figure(s, out, figure);
        return;
    }
    const SystemParams p = s.params();
    if (command == "spectrum") out.csv("spectrum.csv", spectrum_table(p, s, false));
    else if (command == "squeezing") out.csv("squeezing.csv", spectrum_table(p, s, true));
    else if (command == "g2") out.csv("g2_" + s.str("g2.channel") + ".csv", g2_table(p, s, s.str("g2.channel")));
    else if (command == "steady-state") steady_state_command(p, s, out);
    else if (command == "meanfield") meanfield_command(p, s, out);
    else if (command == "trajectory") write_records(run_records(s, trajectory_config(s, p), s.flag("trajectory.reduced")), out, "trajectory");
    else if (command == "bistability") bistability_command(p, s, out);
    else throw InvalidArgument("unknown command '" + command + "'");
}

}  // namespace cqed::cli
