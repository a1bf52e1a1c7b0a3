// Command-line front end: channel, concurrence, sweep, dephasing, config.
//
// Exit codes: 0 success, 1 numeric failure, 2 usage or configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "spinbath.hpp"

namespace {

constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

unsigned thread_count() {
    if (const char* env = std::getenv("SPINBATH_THREADS")) {
        try {
            const long n = std::stol(env);
            if (n >= 1) return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring SPINBATH_THREADS='" << env << "'\n";
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

struct FieldOption {
    std::optional<double> tesla;
    std::optional<double> millitesla;

    void attach(CLI::App* cmd, const std::string& name, const std::string& what) {
        auto* t = cmd->add_option("--" + name, tesla, what + " in T");
        auto* m = cmd->add_option("--" + name + "-mt", millitesla, what + " in mT");
        t->excludes(m);
    }
    double value(double fallback) const {
        if (tesla) return *tesla;
        if (millitesla) return *millitesla * 1e-3;
        return fallback;
    }
    bool given() const { return tesla || millitesla; }
};

void emit(const spinbath::OutputTable& table, const std::string& out_path) {
    if (out_path.empty()) {
        table.write(std::cout);
        return;
    }
    std::ofstream os(out_path);
    if (!os) throw spinbath::ConfigError("cannot open output file " + out_path);
    table.write(os);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Electron-spin qubit decoherence by unpolarized nuclear baths and two-qubit entanglement decay"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    app.add_option("-c,--config", config_path, "run configuration (JSON)")->check(CLI::ExistingFile);
    app.add_option("-o,--out", out_path, "write the table to this file instead of stdout");

    auto* channel = app.add_subcommand("channel", "single-dot channel q(t), φ(t) in the box model");
    FieldOption channel_b;
    channel_b.attach(channel, "b", "magnetic field");
    int channel_dot = 1;
    channel->add_option("--dot", channel_dot, "dot index (1 or 2)")->check(CLI::Range(1, 2));

    auto* concurrence = app.add_subcommand("concurrence", "two-qubit concurrence C(t) and witness W(t)");
    FieldOption conc_b;
    conc_b.attach(concurrence, "b", "magnetic field");
    std::string bell;
    concurrence->add_option("--bell", bell, "initial Bell state: psi-plus, psi-minus, phi-plus, phi-minus");

    auto* sweep = app.add_subcommand("sweep", "sudden-death time and witness zero versus magnetic field");
    FieldOption b_min;
    FieldOption b_max;
    b_min.attach(sweep, "b-min", "lowest field");
    b_max.attach(sweep, "b-max", "highest field");
    std::size_t b_steps = 100;
    sweep->add_option("--b-steps", b_steps, "number of field values")->check(CLI::PositiveNumber);
    std::string sweep_bell;
    sweep->add_option("--bell", sweep_bell, "initial Bell state for the witness");

    auto* dephasing = app.add_subcommand("dephasing", "high-field pure dephasing and Gaussian T2* fit");
    std::string mode = "uniform";
    dephasing->add_option("--mode", mode, "coupling set: uniform or realistic")
        ->check(CLI::IsMember({"uniform", "realistic"}));
    int deph_dot = 1;
    dephasing->add_option("--dot", deph_dot, "dot index (1 or 2)")->check(CLI::Range(1, 2));

    auto* config_cmd = app.add_subcommand("config", "print the effective configuration as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        spinbath::ExperimentConfig cfg = config_path.empty() ? spinbath::ExperimentConfig{} : spinbath::load_config(config_path);

        if (*config_cmd) {
            std::cout << spinbath::config_to_json(cfg).dump(2) << '\n';
        } else if (*channel) {
            emit(spinbath::cmd_channel(cfg, channel_b.value(0.0), channel_dot - 1), out_path);
        } else if (*concurrence) {
            if (!bell.empty()) cfg.bell = spinbath::parse_bell_label(bell);
            emit(spinbath::cmd_concurrence(cfg, conc_b.value(0.0)), out_path);
        } else if (*sweep) {
            if (!sweep_bell.empty()) cfg.bell = spinbath::parse_bell_label(sweep_bell);
            const double lo = b_min.value(5e-3);
            const double hi = b_max.value(30e-3);
            const auto table = spinbath::cmd_sweep(cfg, lo, hi, b_steps, thread_count());
            emit(table, out_path);
        } else if (*dephasing) {
            const auto m = mode == "realistic" ? spinbath::DephasingMode::Realistic : spinbath::DephasingMode::Uniform;
            const auto rep = spinbath::cmd_dephasing(cfg, m, deph_dot - 1);
            emit(rep.table, out_path);
            std::cerr << "mode=" << mode << " n_nuclei=" << rep.n_nuclei
                      << " a_total_uev=" << spinbath::OutputTable::format(rep.a_total_uev)
                      << " t2_star_ns=" << spinbath::OutputTable::format(rep.fit.t2_star_ns)
                      << " rms_residual=" << spinbath::OutputTable::format(rep.fit.rms_residual)
                      << " fit_points=" << rep.fit.points
                      << " closed_form_t2_star_ns=" << spinbath::OutputTable::format(rep.closed_form_t2_star_ns) << '\n';
        }
    } catch (const spinbath::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
