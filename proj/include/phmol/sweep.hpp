#pragma once

// Single-point pipeline, parameter sweeps and CSV emission.

#include "phmol/model.hpp"
#include "phmol/solvers.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace phmol {

inline constexpr std::string_view version = "0.1.0";

using Params = SystemParams<double>;
using Config = SolverConfig<double>;

enum class Observable { g2_plus_zero, g2_minus_zero, g2_plus_tau, g2_minus_tau, occupations };

Observable parse_observable(std::string_view s);
std::string_view to_string(Observable o);
std::vector<std::string> column_names(Observable o);

enum class PointStatus { ok, vacuum_occupation, solver_failure };

std::string_view to_string(PointStatus s);

// Ties applied after axis values are assigned.
enum class DeltaLock { none, minus_j, plus_j };
enum class ULock { none, optimal_plus, optimal_minus };

DeltaLock parse_delta_lock(std::string_view s);
ULock parse_u_lock(std::string_view s);
std::string_view to_string(DeltaLock l);
std::string_view to_string(ULock l);

struct SweepAxis {
    std::string name; // a SystemParams field or "delta" (sets delta_a = delta_b)
    double min = 0;
    double max = 0;
    int count = 2;

    // Evenly spaced values; symmetric ranges hit 0 exactly.
    std::vector<double> values() const;
};

// Parses "name:min:max:count".
SweepAxis parse_axis(std::string_view text);

// Sets one named parameter; "delta" sets both detunings.
void set_parameter(Params& p, std::string_view name, double value);
bool is_parameter_name(std::string_view name);

struct SweepSpec {
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    Params fixed;
    std::vector<Observable> observables{Observable::g2_plus_zero};
    int n_max = 5;
    double tau = 0; // delay used by the *_tau observables
    DeltaLock delta_lock = DeltaLock::none;
    ULock u_lock = ULock::none;
    std::optional<double> kappa_hz; // reference rate in s^-1, provenance only for sweeps
    Config solver;

    void validate() const;
    Params params_at(double v1, std::optional<double> v2) const;
};

struct PointResult {
    std::vector<std::optional<double>> values; // one per value column
    PointStatus status = PointStatus::ok;
    std::string message;
};

struct SweepResult {
    std::vector<std::string> coord_names;
    std::vector<std::vector<double>> coords; // one row per point
    std::vector<std::string> value_names;
    std::vector<PointResult> points;
    std::vector<std::pair<std::string, std::string>> provenance;

    bool all_ok() const;
};

// basis -> Hamiltonian -> Liouvillian -> steady state -> observables. Errors
// from the library land in the status; nothing here throws phmol::Error.
PointResult run_point(const Params& params, int n_max, const std::vector<Observable>& observables,
                      const Config& cfg = Config{}, double tau = 0);

// Points are evaluated on `threads` workers; ordering is row-major over
// (axis1, axis2) regardless of scheduling.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1);

// Provenance entries shared by every output: version, parameters, tolerances.
std::vector<std::pair<std::string, std::string>> base_provenance(const Params& p, int n_max,
                                                                 const Config& cfg);

// Numbers are written with 12 significant digits, lines end in '\n'.
std::string format_number(double v);
void emit_csv(const SweepResult& result, std::ostream& out);
void emit_csv(const SweepResult& result, const std::filesystem::path& path);

// Calls fn(i) for i in [0, count) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn);

} // namespace phmol

#include "phmol/detail/parallel.hpp"
