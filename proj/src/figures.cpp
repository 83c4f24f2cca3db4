#include "phmol/figures.hpp"

#include "phmol/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace phmol {

void G2TauSpec::validate() const {
    params.validate();
    if (!(tau_max > 0) || tau_steps < 1) {
        throw std::invalid_argument("g2tau: tau_max must be > 0 and tau_steps >= 1");
    }
    if (n_max < 2) throw std::invalid_argument("g2tau: n_max must be >= 2");
    if (kappa_hz && !(*kappa_hz > 0)) throw std::invalid_argument("kappa_hz must be > 0");
    solver.validate();
}

Config delay_scan_config(const Params& p, Config cfg) {
    if (p.j_coupling > 0) {
        const double period = two_pi / (2 * p.j_coupling);
        cfg.time_step = std::min(cfg.time_step, period / 50);
    }
    return cfg;
}

SweepResult run_g2tau(const G2TauSpec& spec) {
    spec.validate();
    const auto grid = uniform_tau_grid(spec.tau_max, spec.tau_steps);
    const Config cfg = delay_scan_config(spec.params, spec.solver);

    SweepResult result;
    result.coord_names.push_back("tau");
    if (spec.kappa_hz) result.coord_names.push_back("tau_s");
    result.value_names.push_back(std::string("g2_") + std::string(to_string(spec.mode)));
    for (double t : grid) {
        std::vector<double> c{t};
        if (spec.kappa_hz) c.push_back(t / *spec.kappa_hz);
        result.coords.push_back(std::move(c));
    }
    result.points.resize(grid.size());

    try {
        const auto basis = build_basis(spec.n_max);
        const auto h = spec.params.delta_a == spec.params.delta_b
                           ? hamiltonian_normal(spec.params, basis)
                           : hamiltonian_local(spec.params, basis);
        const auto lv = build_liouvillian(spec.params, h, basis);
        const auto rho = steady_state(lv, cfg);
        const auto g2 = g2_tau(lv, rho, basis, spec.mode, std::span<const double>(grid), cfg);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            result.points[k].values = {g2.g2_values[k]};
        }
    } catch (const Error& e) {
        const auto status = dynamic_cast<const VacuumOccupation*>(&e) ? PointStatus::vacuum_occupation
                                                                      : PointStatus::solver_failure;
        for (auto& p : result.points) {
            p.values = {std::nullopt};
            p.status = status;
            p.message = e.what();
        }
    }

    result.provenance = base_provenance(spec.params, spec.n_max, cfg);
    result.provenance.emplace_back("mode", std::string(to_string(spec.mode)));
    result.provenance.emplace_back("tau_max", format_number(spec.tau_max));
    result.provenance.emplace_back("tau_steps", std::to_string(spec.tau_steps));
    if (spec.kappa_hz) result.provenance.emplace_back("kappa_hz", format_number(*spec.kappa_hz));
    return result;
}

const std::vector<std::string>& figure_ids() {
    static const std::vector<std::string> ids{"2", "3a", "3b", "4", "5", "6", "7"};
    return ids;
}

namespace {

// kappa = 1, eps = 0.01 kappa throughout.
Params base_params(double delta, double j, double u) {
    return Params::symmetric(delta, j, u, 0.01);
}

SweepSpec make_spec(Params fixed, SweepAxis a1, std::optional<SweepAxis> a2,
                    std::vector<Observable> obs, int n_max) {
    SweepSpec s;
    s.fixed = fixed;
    s.axis1 = std::move(a1);
    s.axis2 = std::move(a2);
    s.observables = std::move(obs);
    s.n_max = n_max;
    return s;
}

} // namespace

FigureSpec figure(std::string_view id, std::optional<int> resolution, int n_max) {
    if (resolution && *resolution < 2) throw std::invalid_argument("resolution must be >= 2");
    auto res = [&](int dflt) { return resolution.value_or(dflt); };
    const std::vector<Observable> both{Observable::g2_plus_zero, Observable::g2_minus_zero};

    FigureSpec fig;
    fig.id = std::string(id);
    if (id == "2") {
        // Detuning x Kerr map at J = 20.
        fig.panels.push_back({"", make_spec(base_params(0, 20, 0), {"delta", -30, 30, res(201)},
                                            SweepAxis{"u", -0.05, 0.05, res(201)}, both, n_max)});
    } else if (id == "3a" || id == "3b") {
        const double u = id == "3a" ? 0.0125 : -0.0125;
        fig.panels.push_back({"", make_spec(base_params(0, 20, u), {"delta", -40, 40, res(801)},
                                            std::nullopt, both, n_max)});
    } else if (id == "4") {
        // U spans [-1, 1] in units of kappa^2 / J with J = 20.
        fig.panels.push_back({"plus", make_spec(base_params(-20, 20, 0), {"u", -0.05, 0.05, res(101)},
                                                std::nullopt, {Observable::g2_plus_zero}, n_max)});
        fig.panels.push_back({"minus", make_spec(base_params(20, 20, 0), {"u", -0.05, 0.05, res(101)},
                                                 std::nullopt, {Observable::g2_minus_zero}, n_max)});
    } else if (id == "5") {
        auto spec = make_spec(base_params(0, 20, 0), {"j", 2, 40, res(201)},
                              SweepAxis{"u", 0, 0.1, res(201)}, {Observable::g2_plus_zero}, n_max);
        spec.delta_lock = DeltaLock::minus_j;
        fig.panels.push_back({"", std::move(spec)});
    } else if (id == "6") {
        auto spec = make_spec(base_params(0, 20, 0), {"j", 10, 30, 3},
                              SweepAxis{"delta", -40, 0, res(401)}, {Observable::g2_plus_zero}, n_max);
        spec.u_lock = ULock::optimal_plus;
        fig.panels.push_back({"", std::move(spec)});
    } else if (id == "7") {
        G2TauSpec tau;
        tau.params = base_params(-5, 5, 0.05);
        tau.mode = Mode::plus;
        tau.tau_max = 20;
        tau.tau_steps = res(2000);
        tau.n_max = n_max;
        tau.kappa_hz = two_pi * 100e6;
        fig.delay_scan = tau;
    } else {
        throw std::invalid_argument("unknown figure '" + std::string(id) +
                                    "' (expected 2, 3a, 3b, 4, 5, 6 or 7)");
    }
    return fig;
}

FigureOutput write_figure(const FigureSpec& fig, const std::filesystem::path& dir,
                          unsigned threads) {
    FigureOutput out;
    std::filesystem::create_directories(dir);
    for (const auto& panel : fig.panels) {
        const auto result = run_sweep(panel.spec, threads);
        const auto name =
            "fig" + fig.id + (panel.suffix.empty() ? std::string() : "_" + panel.suffix) + ".csv";
        emit_csv(result, dir / name);
        out.files.push_back(dir / name);
        out.all_ok = out.all_ok && result.all_ok();
    }
    if (fig.delay_scan) {
        const auto result = run_g2tau(*fig.delay_scan);
        const auto name = "fig" + fig.id + ".csv";
        emit_csv(result, dir / name);
        out.files.push_back(dir / name);
        out.all_ok = out.all_ok && result.all_ok();
    }
    return out;
}

} // namespace phmol
