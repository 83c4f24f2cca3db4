#include "phmol/sweep.hpp"

#include "phmol/analytic.hpp"
#include "phmol/observables.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace phmol {

namespace {

struct NamedObservable {
    Observable value;
    std::string_view name;
};

constexpr NamedObservable observable_names[] = {
    {Observable::g2_plus_zero, "g2_plus_zero"},
    {Observable::g2_minus_zero, "g2_minus_zero"},
    {Observable::g2_plus_tau, "g2_plus_tau"},
    {Observable::g2_minus_tau, "g2_minus_tau"},
    {Observable::occupations, "occupations"},
};

constexpr std::string_view parameter_names[] = {"delta",   "delta_a", "delta_b", "j",
                                                "u",       "epsilon", "kappa_a", "kappa_b"};

double parse_double(std::string_view s, std::string_view what) {
    double v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument(std::string(what) + ": cannot parse number '" + std::string(s) +
                                    "'");
    }
    return v;
}

std::string steady_name(SteadyMethod m) {
    return m == SteadyMethod::trace_replaced ? "trace-replaced" : "null-space";
}

Mode mode_of(Observable o) {
    return (o == Observable::g2_plus_zero || o == Observable::g2_plus_tau) ? Mode::plus
                                                                           : Mode::minus;
}

} // namespace

Observable parse_observable(std::string_view s) {
    for (const auto& o : observable_names)
        if (o.name == s) return o.value;
    throw std::invalid_argument("unknown observable '" + std::string(s) + "'");
}

std::string_view to_string(Observable o) {
    for (const auto& n : observable_names)
        if (n.value == o) return n.name;
    return "?";
}

std::vector<std::string> column_names(Observable o) {
    switch (o) {
    case Observable::g2_plus_zero: return {"g2_plus"};
    case Observable::g2_minus_zero: return {"g2_minus"};
    case Observable::g2_plus_tau: return {"g2_plus_tau"};
    case Observable::g2_minus_tau: return {"g2_minus_tau"};
    case Observable::occupations: return {"n_plus", "n_minus"};
    }
    return {};
}

std::string_view to_string(PointStatus s) {
    switch (s) {
    case PointStatus::ok: return "ok";
    case PointStatus::vacuum_occupation: return "vacuum-occupation";
    case PointStatus::solver_failure: return "solver-failure";
    }
    return "?";
}

DeltaLock parse_delta_lock(std::string_view s) {
    if (s == "none") return DeltaLock::none;
    if (s == "-j" || s == "minus-j") return DeltaLock::minus_j;
    if (s == "+j" || s == "j" || s == "plus-j") return DeltaLock::plus_j;
    throw std::invalid_argument("unknown delta lock '" + std::string(s) + "' (none, -j, +j)");
}

ULock parse_u_lock(std::string_view s) {
    if (s == "none") return ULock::none;
    if (s == "opt-plus") return ULock::optimal_plus;
    if (s == "opt-minus") return ULock::optimal_minus;
    throw std::invalid_argument("unknown U lock '" + std::string(s) +
                                "' (none, opt-plus, opt-minus)");
}

std::string_view to_string(DeltaLock l) {
    switch (l) {
    case DeltaLock::none: return "none";
    case DeltaLock::minus_j: return "-j";
    case DeltaLock::plus_j: return "+j";
    }
    return "?";
}

std::string_view to_string(ULock l) {
    switch (l) {
    case ULock::none: return "none";
    case ULock::optimal_plus: return "opt-plus";
    case ULock::optimal_minus: return "opt-minus";
    }
    return "?";
}

std::vector<double> SweepAxis::values() const {
    std::vector<double> out(static_cast<std::size_t>(count));
    const double last = count - 1;
    for (int i = 0; i < count; ++i) {
        out[static_cast<std::size_t>(i)] = (min * (last - i) + max * i) / last;
    }
    return out;
}

SweepAxis parse_axis(std::string_view text) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto colon = text.find(':', start);
        parts.push_back(text.substr(start, colon - start));
        if (colon == std::string_view::npos) break;
        start = colon + 1;
    }
    if (parts.size() != 4) {
        throw std::invalid_argument("axis '" + std::string(text) + "' must be name:min:max:count");
    }
    SweepAxis axis;
    axis.name = std::string(parts[0]);
    axis.min = parse_double(parts[1], "axis min");
    axis.max = parse_double(parts[2], "axis max");
    const double count = parse_double(parts[3], "axis count");
    if (count != std::floor(count)) throw std::invalid_argument("axis count must be an integer");
    axis.count = static_cast<int>(count);
    return axis;
}

bool is_parameter_name(std::string_view name) {
    for (auto n : parameter_names)
        if (n == name) return true;
    return false;
}

void set_parameter(Params& p, std::string_view name, double value) {
    if (name == "delta") {
        p.delta_a = p.delta_b = value;
    } else if (name == "delta_a") {
        p.delta_a = value;
    } else if (name == "delta_b") {
        p.delta_b = value;
    } else if (name == "j") {
        p.j_coupling = value;
    } else if (name == "u") {
        p.u_kerr = value;
    } else if (name == "epsilon") {
        p.epsilon = value;
    } else if (name == "kappa_a") {
        p.kappa_a = value;
    } else if (name == "kappa_b") {
        p.kappa_b = value;
    } else {
        throw std::invalid_argument("unknown parameter '" + std::string(name) + "'");
    }
}

void SweepSpec::validate() const {
    auto check_axis = [](const SweepAxis& a) {
        if (!is_parameter_name(a.name)) {
            throw std::invalid_argument("axis parameter '" + a.name + "' is not a known parameter");
        }
        if (a.count < 2) throw std::invalid_argument("axis '" + a.name + "' needs count >= 2");
        if (!std::isfinite(a.min) || !std::isfinite(a.max)) {
            throw std::invalid_argument("axis '" + a.name + "' has non-finite bounds");
        }
    };
    check_axis(axis1);
    auto touches_delta = [](const std::string& n) {
        return n == "delta" || n == "delta_a" || n == "delta_b";
    };
    if (axis2) {
        check_axis(*axis2);
        if (axis2->name == axis1.name || (touches_delta(axis1.name) && touches_delta(axis2->name))) {
            throw std::invalid_argument("sweep axes must name distinct parameters");
        }
    }
    if (delta_lock != DeltaLock::none &&
        (touches_delta(axis1.name) || (axis2 && touches_delta(axis2->name)))) {
        throw std::invalid_argument("a delta lock cannot be combined with a detuning axis");
    }
    if (u_lock != ULock::none && (axis1.name == "u" || (axis2 && axis2->name == "u"))) {
        throw std::invalid_argument("a U lock cannot be combined with a U axis");
    }
    if (observables.empty()) throw std::invalid_argument("sweep needs at least one observable");
    if (n_max < 2) throw std::invalid_argument("n_max must be >= 2 for g2 observables");
    if (!(tau >= 0)) throw std::invalid_argument("tau must be >= 0");
    if (kappa_hz && !(*kappa_hz > 0)) throw std::invalid_argument("kappa_hz must be > 0");
    solver.validate();
}

Params SweepSpec::params_at(double v1, std::optional<double> v2) const {
    Params p = fixed;
    set_parameter(p, axis1.name, v1);
    if (axis2 && v2) set_parameter(p, axis2->name, *v2);
    switch (delta_lock) {
    case DeltaLock::none: break;
    case DeltaLock::minus_j: p.delta_a = p.delta_b = -p.j_coupling; break;
    case DeltaLock::plus_j: p.delta_a = p.delta_b = p.j_coupling; break;
    }
    if (u_lock != ULock::none) {
        const auto mode = u_lock == ULock::optimal_plus ? Mode::plus : Mode::minus;
        p.u_kerr = optimal_conditions(mode, p.j_coupling, p.kappa_a).u_opt;
    }
    return p;
}

bool SweepResult::all_ok() const {
    for (const auto& p : points)
        if (p.status != PointStatus::ok) return false;
    return true;
}

PointResult run_point(const Params& params, int n_max, const std::vector<Observable>& observables,
                      const Config& cfg, double tau) {
    PointResult out;
    std::size_t columns = 0;
    for (auto o : observables) columns += column_names(o).size();
    out.values.assign(columns, std::nullopt);

    auto degrade = [&](PointStatus s, const std::string& msg) {
        if (static_cast<int>(s) > static_cast<int>(out.status)) {
            out.status = s;
            out.message = msg;
        }
    };

    try {
        params.validate();
        const auto basis = build_basis(n_max);
        // The normal-mode form needs equal detunings; otherwise build from a, b.
        const auto h = params.delta_a == params.delta_b ? hamiltonian_normal(params, basis)
                                                        : hamiltonian_local(params, basis);
        const auto lv = build_liouvillian(params, h, basis);
        const auto rho = steady_state(lv, cfg);

        std::size_t col = 0;
        for (const auto o : observables) {
            const std::size_t width = column_names(o).size();
            try {
                switch (o) {
                case Observable::g2_plus_zero:
                case Observable::g2_minus_zero:
                    out.values[col] = g2_zero(rho, basis, mode_of(o));
                    break;
                case Observable::g2_plus_tau:
                case Observable::g2_minus_tau: {
                    std::vector<double> grid{0.0};
                    if (tau > 0) grid.push_back(tau);
                    const auto r = g2_tau(lv, rho, basis, mode_of(o), std::span<const double>(grid),
                                          cfg);
                    out.values[col] = r.g2_values.back();
                    break;
                }
                case Observable::occupations: {
                    const auto n = occupations(rho, basis);
                    out.values[col] = n.n_plus;
                    out.values[col + 1] = n.n_minus;
                    break;
                }
                }
            } catch (const VacuumOccupation& e) {
                degrade(PointStatus::vacuum_occupation, e.what());
            }
            col += width;
        }
    } catch (const Error& e) {
        degrade(PointStatus::solver_failure, e.what());
    }

    for (auto& v : out.values) {
        if (v && !std::isfinite(*v)) {
            v.reset();
            degrade(PointStatus::solver_failure, "non-finite observable value");
        }
    }
    if (out.status == PointStatus::solver_failure) {
        for (auto& v : out.values) v.reset();
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> base_provenance(const Params& p, int n_max,
                                                                 const Config& cfg) {
    return {
        {"version", std::string(version)},
        {"n_max", std::to_string(n_max)},
        {"delta_a", format_number(p.delta_a)},
        {"delta_b", format_number(p.delta_b)},
        {"j", format_number(p.j_coupling)},
        {"u", format_number(p.u_kerr)},
        {"epsilon", format_number(p.epsilon)},
        {"kappa_a", format_number(p.kappa_a)},
        {"kappa_b", format_number(p.kappa_b)},
        {"steady_method", steady_name(cfg.steady_method)},
        {"time_step", format_number(cfg.time_step)},
        {"rtol", format_number(cfg.rtol)},
        {"atol", format_number(cfg.atol)},
        {"max_time", format_number(cfg.max_time)},
    };
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
    spec.validate();
    const auto v1 = spec.axis1.values();
    const auto v2 = spec.axis2 ? spec.axis2->values() : std::vector<double>{};
    const std::size_t inner = spec.axis2 ? v2.size() : 1;

    SweepResult result;
    result.coord_names.push_back(spec.axis1.name);
    if (spec.axis2) result.coord_names.push_back(spec.axis2->name);
    for (auto o : spec.observables)
        for (auto& c : column_names(o)) result.value_names.push_back(c);

    const std::size_t total = v1.size() * inner;
    result.coords.resize(total);
    result.points.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
        result.coords[i].push_back(v1[i / inner]);
        if (spec.axis2) result.coords[i].push_back(v2[i % inner]);
    }

    parallel_for(total, threads, [&](std::size_t i) {
        const auto& c = result.coords[i];
        std::optional<double> second;
        if (spec.axis2) second = c[1];
        try {
            const Params p = spec.params_at(c[0], second);
            result.points[i] = run_point(p, spec.n_max, spec.observables, spec.solver, spec.tau);
        } catch (const Error& e) {
            // Locks can fail (e.g. J = 0 has no optimal U).
            PointResult failed;
            failed.values.assign(result.value_names.size(), std::nullopt);
            failed.status = PointStatus::solver_failure;
            failed.message = e.what();
            result.points[i] = std::move(failed);
        }
    });

    result.provenance = base_provenance(spec.fixed, spec.n_max, spec.solver);
    auto axis_text = [](const SweepAxis& a) {
        return a.name + ":" + format_number(a.min) + ":" + format_number(a.max) + ":" +
               std::to_string(a.count);
    };
    result.provenance.emplace_back("axis1", axis_text(spec.axis1));
    if (spec.axis2) result.provenance.emplace_back("axis2", axis_text(*spec.axis2));
    std::string obs;
    for (auto o : spec.observables) {
        if (!obs.empty()) obs += ",";
        obs += to_string(o);
    }
    result.provenance.emplace_back("observables", obs);
    result.provenance.emplace_back("lock_delta", std::string(to_string(spec.delta_lock)));
    result.provenance.emplace_back("lock_u", std::string(to_string(spec.u_lock)));
    result.provenance.emplace_back("tau", format_number(spec.tau));
    if (spec.kappa_hz) result.provenance.emplace_back("kappa_hz", format_number(*spec.kappa_hz));
    return result;
}

std::string format_number(double v) {
    if (v == 0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

void emit_csv(const SweepResult& result, std::ostream& out) {
    for (const auto& [k, v] : result.provenance) out << "# " << k << '=' << v << '\n';
    bool first = true;
    auto cell = [&](const std::string& s) {
        if (!first) out << ',';
        out << s;
        first = false;
    };
    for (const auto& n : result.coord_names) cell(n);
    for (const auto& n : result.value_names) cell(n);
    cell("status");
    out << '\n';
    for (std::size_t i = 0; i < result.points.size(); ++i) {
        first = true;
        for (double c : result.coords[i]) cell(format_number(c));
        for (const auto& v : result.points[i].values) cell(v ? format_number(*v) : std::string());
        cell(std::string(to_string(result.points[i].status)));
        out << '\n';
    }
}

void emit_csv(const SweepResult& result, const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    emit_csv(result, file);
    file.flush();
    if (!file) throw std::runtime_error("failed writing '" + path.string() + "'");
}

} // namespace phmol
