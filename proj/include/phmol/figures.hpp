#pragma once

// Delay scans and the pre-baked parameter sets behind each figure.

#include "phmol/fock.hpp"
#include "phmol/sweep.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace phmol {

inline constexpr double two_pi = 6.283185307179586476925286766559;

struct G2TauSpec {
    Params params;
    Mode mode = Mode::plus;
    double tau_max = 20; // in 1/kappa
    int tau_steps = 2000;
    int n_max = 5;
    std::optional<double> kappa_hz; // adds a tau_s column (tau / kappa_hz)
    Config solver;

    void validate() const;
};

// Solver step used for a delay scan: at most 50 samples per period 2 pi / (2J).
Config delay_scan_config(const Params& p, Config cfg);

SweepResult run_g2tau(const G2TauSpec& spec);

struct FigurePanel {
    std::string suffix; // empty for single-panel figures
    SweepSpec spec;
};

struct FigureSpec {
    std::string id;
    std::vector<FigurePanel> panels;
    std::optional<G2TauSpec> delay_scan;
};

const std::vector<std::string>& figure_ids();

// `resolution` overrides the point count of every continuous axis.
FigureSpec figure(std::string_view id, std::optional<int> resolution = std::nullopt,
                  int n_max = 5);

struct FigureOutput {
    std::vector<std::filesystem::path> files;
    bool all_ok = true;
};

// Writes fig<id>[_<suffix>].csv files into `dir`.
FigureOutput write_figure(const FigureSpec& fig, const std::filesystem::path& dir,
                          unsigned threads = 1);

} // namespace phmol
