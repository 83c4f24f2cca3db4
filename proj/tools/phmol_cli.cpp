// phmol: steady-state photon statistics of a two-cavity Kerr photonic molecule.
//
//   phmol point   [physics flags] [--observable list]
//   phmol sweep   --axis1 name:min:max:count [--axis2 ...] [--observable list]
//   phmol g2tau   [--mode plus|minus] [--tau-max T] [--tau-steps N] [--kappa-hz K]
//   phmol optimal [--j J] [--kappa-a K] [--mode plus|minus]
//   phmol figure  <2|3a|3b|4|5|6|7> [--out DIR] [--resolution N]
//
// Exit status: 0 on success, 2 if any grid point has a non-ok status, 1 on error.

#include "phmol/analytic.hpp"
#include "phmol/figures.hpp"
#include "phmol/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

struct Options {
    double delta = -20;
    std::optional<double> delta_a, delta_b;
    double j = 20;
    double u = 0.0125;
    double epsilon = 0.01;
    double kappa_a = 1;
    double kappa_b = 1;
    int n_max = 5;
    std::string mode = "plus";
    bool mode_given = false;
    double tau_max = 20;
    int tau_steps = 2000;
    double tau = 0;
    std::string out;
    unsigned threads = 1;
    std::optional<double> kappa_hz;
    std::string axis1, axis2;
    std::string observable;
    std::string lock_delta = "none";
    std::string lock_u = "none";
    std::string steady_method = "trace-replaced";
    double time_step = 0.01;
    double rtol = 1e-8;
    double atol = 1e-10;
    std::optional<int> resolution;
    std::string figure_id;

    phmol::Params params() const {
        phmol::Params p;
        p.delta_a = delta_a.value_or(delta);
        p.delta_b = delta_b.value_or(delta);
        p.j_coupling = j;
        p.u_kerr = u;
        p.epsilon = epsilon;
        p.kappa_a = kappa_a;
        p.kappa_b = kappa_b;
        return p;
    }

    phmol::Config solver() const {
        phmol::Config c;
        if (steady_method == "trace-replaced") {
            c.steady_method = phmol::SteadyMethod::trace_replaced;
        } else if (steady_method == "null-space") {
            c.steady_method = phmol::SteadyMethod::null_space;
        } else {
            throw std::invalid_argument("unknown steady method '" + steady_method + "'");
        }
        c.time_step = time_step;
        c.rtol = rtol;
        c.atol = atol;
        return c;
    }

    std::vector<phmol::Observable> observables(std::vector<phmol::Observable> fallback) const {
        if (observable.empty()) return fallback;
        std::vector<phmol::Observable> out;
        std::stringstream ss(observable);
        for (std::string item; std::getline(ss, item, ',');) {
            if (!item.empty()) out.push_back(phmol::parse_observable(item));
        }
        return out;
    }
};

// Writes to --out when given, stdout otherwise.
void emit(const phmol::SweepResult& r, const std::string& out) {
    if (out.empty() || out == "-") {
        phmol::emit_csv(r, std::cout);
    } else {
        phmol::emit_csv(r, std::filesystem::path(out));
    }
}

int status_code(bool all_ok) { return all_ok ? 0 : 2; }

int run_point_cmd(const Options& o) {
    const auto obs = o.observables({phmol::Observable::g2_plus_zero,
                                    phmol::Observable::g2_minus_zero,
                                    phmol::Observable::occupations});
    const auto p = o.params();
    p.validate();
    const auto cfg = o.solver();
    cfg.validate();
    if (o.n_max < 2) throw std::invalid_argument("n_max must be >= 2");
    phmol::SweepResult r;
    for (auto ob : obs)
        for (auto& c : phmol::column_names(ob)) r.value_names.push_back(c);
    r.coords.push_back({});
    r.points.push_back(phmol::run_point(p, o.n_max, obs, cfg, o.tau));
    r.provenance = phmol::base_provenance(p, o.n_max, cfg);
    r.provenance.emplace_back("tau", phmol::format_number(o.tau));
    emit(r, o.out);
    if (!r.all_ok()) std::cerr << "phmol: " << r.points.front().message << '\n';
    return status_code(r.all_ok());
}

int run_sweep_cmd(const Options& o) {
    phmol::SweepSpec spec;
    spec.axis1 = phmol::parse_axis(o.axis1);
    if (!o.axis2.empty()) spec.axis2 = phmol::parse_axis(o.axis2);
    spec.fixed = o.params();
    spec.observables = o.observables({phmol::Observable::g2_plus_zero});
    spec.n_max = o.n_max;
    spec.tau = o.tau;
    spec.delta_lock = phmol::parse_delta_lock(o.lock_delta);
    spec.u_lock = phmol::parse_u_lock(o.lock_u);
    spec.kappa_hz = o.kappa_hz;
    spec.solver = o.solver();
    const auto r = phmol::run_sweep(spec, o.threads);
    emit(r, o.out);
    return status_code(r.all_ok());
}

int run_g2tau_cmd(const Options& o) {
    phmol::G2TauSpec spec;
    spec.params = o.params();
    spec.mode = phmol::parse_mode(o.mode);
    spec.tau_max = o.tau_max;
    spec.tau_steps = o.tau_steps;
    spec.n_max = o.n_max;
    spec.kappa_hz = o.kappa_hz;
    spec.solver = o.solver();
    const auto r = phmol::run_g2tau(spec);
    emit(r, o.out);
    if (!r.all_ok()) std::cerr << "phmol: " << r.points.front().message << '\n';
    return status_code(r.all_ok());
}

int run_optimal_cmd(const Options& o) {
    std::vector<phmol::Mode> modes{phmol::Mode::plus, phmol::Mode::minus};
    if (o.mode_given) modes = {phmol::parse_mode(o.mode)};
    std::ostringstream text;
    text << "# version=" << phmol::version << '\n'
         << "# j=" << phmol::format_number(o.j) << '\n'
         << "# kappa=" << phmol::format_number(o.kappa_a) << '\n'
         << "mode,delta_opt,u_opt\n";
    for (auto m : modes) {
        const auto c = phmol::optimal_conditions(m, o.j, o.kappa_a);
        text << phmol::to_string(m) << ',' << phmol::format_number(c.delta_opt) << ','
             << phmol::format_number(c.u_opt) << '\n';
    }
    if (o.out.empty() || o.out == "-") {
        std::cout << text.str();
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open '" + o.out + "' for writing");
        f << text.str();
    }
    return 0;
}

int run_figure_cmd(const Options& o) {
    const auto fig = phmol::figure(o.figure_id, o.resolution, o.n_max);
    const std::filesystem::path dir = o.out.empty() ? std::filesystem::path(".") : std::filesystem::path(o.out);
    const auto result = phmol::write_figure(fig, dir, o.threads);
    for (const auto& f : result.files) std::cerr << "wrote " << f.string() << '\n';
    return status_code(result.all_ok);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon statistics of the normal modes of a Kerr photonic molecule"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key = value file; command-line flags take precedence");
    app.fallthrough();

    Options o;
    app.add_option("--delta-a", o.delta_a, "Detuning of cavity A (units of kappa)");
    app.add_option("--delta-b", o.delta_b, "Detuning of cavity B");
    app.add_option("--delta", o.delta, "Common detuning delta_a = delta_b")->capture_default_str();
    app.add_option("--j", o.j, "Inter-cavity coupling J")->capture_default_str();
    app.add_option("--u", o.u, "Kerr strength U")->capture_default_str();
    app.add_option("--epsilon", o.epsilon, "Drive amplitude")->capture_default_str();
    app.add_option("--kappa-a", o.kappa_a, "Loss rate of cavity A")->capture_default_str();
    app.add_option("--kappa-b", o.kappa_b, "Loss rate of cavity B")->capture_default_str();
    app.add_option("--n-max", o.n_max, "Maximum total photon number")->capture_default_str();
    auto* mode = app.add_option("--mode", o.mode, "Normal mode: plus or minus")->capture_default_str();
    app.add_option("--tau-max", o.tau_max, "Largest delay (units of 1/kappa)")->capture_default_str();
    app.add_option("--tau-steps", o.tau_steps, "Number of delay intervals")->capture_default_str();
    app.add_option("--tau", o.tau, "Delay for g2_*_tau observables in point/sweep");
    app.add_option("--out", o.out, "Output file (figure: directory); stdout when omitted");
    app.add_option("--threads", o.threads, "Worker threads for sweeps")->capture_default_str();
    app.add_option("--kappa-hz", o.kappa_hz,
                   "Reference rate kappa in s^-1 (e.g. 6.283185307e8 for 2 pi x 100 MHz)");
    app.add_option("--axis1", o.axis1, "Sweep axis name:min:max:count");
    app.add_option("--axis2", o.axis2, "Optional second sweep axis");
    app.add_option("--observable", o.observable,
                   "Comma list of g2_plus_zero, g2_minus_zero, g2_plus_tau, g2_minus_tau, occupations");
    app.add_option("--lock-delta", o.lock_delta, "Tie delta to J: none, -j, +j")->capture_default_str();
    app.add_option("--lock-u", o.lock_u, "Tie U to J: none, opt-plus, opt-minus")->capture_default_str();
    app.add_option("--steady-method", o.steady_method, "trace-replaced or null-space")
        ->capture_default_str();
    app.add_option("--time-step", o.time_step, "Largest integrator step")->capture_default_str();
    app.add_option("--rtol", o.rtol, "Relative tolerance")->capture_default_str();
    app.add_option("--atol", o.atol, "Absolute tolerance")->capture_default_str();
    app.add_option("--resolution", o.resolution, "Override figure grid resolution");

    auto* point = app.add_subcommand("point", "Evaluate observables at one parameter point");
    auto* sweep = app.add_subcommand("sweep", "1D/2D parameter sweep to CSV");
    auto* g2tau = app.add_subcommand("g2tau", "Delay dependence g2(tau) of one normal mode");
    auto* optimal = app.add_subcommand("optimal", "Closed-form optimal (delta, U) for given J");
    auto* figure = app.add_subcommand("figure", "Reproduce the data of a figure");
    figure->add_option("id", o.figure_id, "2, 3a, 3b, 4, 5, 6 or 7")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    o.mode_given = mode->count() > 0;

    try {
        if (*point) return run_point_cmd(o);
        if (*sweep) {
            if (o.axis1.empty()) throw std::invalid_argument("sweep requires --axis1");
            return run_sweep_cmd(o);
        }
        if (*g2tau) return run_g2tau_cmd(o);
        if (*optimal) return run_optimal_cmd(o);
        if (*figure) return run_figure_cmd(o);
    } catch (const std::exception& e) {
        std::cerr << "phmol: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
