#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "spinbath/config.hpp"
#include "spinbath/dephasing.hpp"
#include "spinbath/experiments.hpp"
#include "spinbath/table.hpp"

// Table-producing front ends of the command-line tool.
namespace spinbath {

inline OutputTable cmd_channel(const ExperimentConfig& cfg, double b_tesla, int dot = 0) {
    const auto& d = cfg.dots.at(static_cast<std::size_t>(dot));
    const auto trace =
        compute_channel(sector_weights(d.n_spins), d.box_coupling(), b_tesla, cfg.grid.times(), cfg.constants, cfg.material);
    OutputTable table({"t_ns", "q", "re_phi", "im_phi"}, true);
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const auto& s = trace.snapshots[i];
        table.add_row({trace.times[i], s.q, s.phi.real(), s.phi.imag()});
    }
    return table;
}

inline OutputTable cmd_concurrence(const ExperimentConfig& cfg, double b_tesla) {
    const auto tr = entanglement_trace(cfg, b_tesla, cfg.grid.times());
    OutputTable table({"t_ns", "C", "W"}, true);
    for (std::size_t i = 0; i < tr.times.size(); ++i) table.add_row({tr.times[i], tr.concurrence[i], tr.witness[i]});
    return table;
}

inline std::vector<double> field_grid(double b_min, double b_max, std::size_t steps) {
    if (steps < 1) throw std::invalid_argument("field grid needs at least one step");
    if (steps == 1) return {b_min};
    if (!(b_max > b_min)) throw std::invalid_argument("field grid: b_max must exceed b_min");
    std::vector<double> b(steps);
    for (std::size_t i = 0; i < steps; ++i)
        b[i] = b_min + (b_max - b_min) * static_cast<double>(i) / static_cast<double>(steps - 1);
    return b;
}

inline OutputTable sweep_table(const SweepResult& sweep) {
    OutputTable table({"B_T", "t_sd_ns", "witness_zero_ns", "revivals", "max_leak"}, true);
    const double nan = std::nan("");
    for (const auto& r : sweep.records)
        table.add_row({r.b_tesla, r.death.t_sd.value_or(nan), r.death.witness_zero.value_or(nan),
                       r.error.empty() ? static_cast<double>(r.death.revival_count) : nan,
                       r.error.empty() ? r.max_occupation_leak : nan});
    return table;
}

inline OutputTable cmd_sweep(const ExperimentConfig& cfg, double b_min, double b_max, std::size_t steps, unsigned threads = 1) {
    return sweep_table(sweep_b(cfg, field_grid(b_min, b_max, steps), threads));
}

enum class DephasingMode { Uniform, Realistic };

struct DephasingReport {
    OutputTable table{{"t_ns", "abs_phi", "phase_phi"}, true};
    T2Fit fit;
    double closed_form_t2_star_ns = 0.0;
    std::size_t n_nuclei = 0;
    double a_total_uev = 0.0;
};

inline DephasingReport cmd_dephasing(const ExperimentConfig& cfg, DephasingMode mode, int dot = 0) {
    const auto& d = cfg.dots.at(static_cast<std::size_t>(dot));
    const CouplingSet couplings = mode == DephasingMode::Uniform ? uniform_couplings(d.a_total_uev, d.geometry.n_cells)
                                                                 : generate_couplings(cfg.material, d.geometry);
    const auto trace = dephasing_factor(couplings, cfg.grid.times(), cfg.constants);
    DephasingReport rep;
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        rep.table.add_row({trace.times[i], std::abs(trace.phi[i]), std::arg(trace.phi[i])});
    rep.fit = fit_t2star(trace);
    rep.n_nuclei = couplings.size();
    rep.a_total_uev = couplings.a_total_uev;
    rep.closed_form_t2_star_ns = t2star_closed_form(d.physical_nuclei(), couplings.a_total_uev, cfg.constants);
    return rep;
}

}  // namespace spinbath
