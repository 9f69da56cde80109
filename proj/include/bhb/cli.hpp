#ifndef BHB_CLI_HPP
#define BHB_CLI_HPP

// Command-line runner: `bhb <subcommand> [--config file.json] [overrides]`.
// Exit codes: 0 success (possibly with flagged rows), 1 configuration error,
// 2 numerical-consistency error, 3 oracle disagreement.

#include <bhb/charging.hpp>
#include <bhb/config.hpp>
#include <bhb/errors.hpp>
#include <bhb/exact.hpp>
#include <bhb/report.hpp>
#include <bhb/scrambling.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace bhb::cli {

namespace fs = std::filesystem;

inline const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names{"charge", "sweep", "otoc", "nested", "size-scan", "regularized",
                                                "oracle"};
    return names;
}

/// Command-line values that take precedence over the config file.
struct Overrides {
    std::optional<std::string> config;
    std::optional<int> sites;
    std::optional<double> spacing, mu, tau, t_max, dt, x_h0, x_ht;
    std::optional<std::string> anchor, probe, output;
    std::optional<std::vector<double>> x_h0_grid, x_ht_grid, otoc_x_h, nested_x_ht;
    std::optional<std::vector<int>> size_grid;
    std::optional<int> source, offset, k_max, audit, workers;
    std::optional<double> d_lo, d_hi, otoc_t_max, otoc_dt;
    bool regularize = false;
};

inline void add_options(CLI::App& app, Overrides& o)
{
    app.add_option("--config", o.config, "JSON experiment configuration");
    app.add_option("--L", o.sites, "number of sites");
    app.add_option("--d", o.spacing, "lattice spacing");
    app.add_option("--mu", o.mu, "on-site potential");
    app.add_option("--anchor", o.anchor, "bond coordinates from \"origin\" or \"horizon\"");
    app.add_option("--tau", o.tau, "switch-off time (defaults to t_max)");
    app.add_option("--tmax", o.t_max, "total simulated time");
    app.add_option("--dt", o.dt, "sampling step");
    app.add_option("--xh0", o.x_h0, "battery scrambling parameter (charge, oracle; fixed x_h0 of scans)");
    app.add_option("--xht", o.x_ht, "charging scrambling parameter (charge, oracle)");
    app.add_option("--xh0-grid", o.x_h0_grid, "comma-separated x_h0 list")->delimiter(',');
    app.add_option("--xht-grid", o.x_ht_grid, "comma-separated x_ht list")->delimiter(',');
    app.add_option("--L-grid", o.size_grid, "comma-separated size list")->delimiter(',');
    app.add_option("--otoc-xh", o.otoc_x_h, "comma-separated x_h list for the OTOC scan")->delimiter(',');
    app.add_option("--probe", o.probe, "OTOC probe: \"propagator\" or \"spread\"");
    app.add_option("--source", o.source, "OTOC source site (negative: first exterior site)");
    app.add_option("--offset", o.offset, "propagator probe distance");
    app.add_option("--d-lo", o.d_lo, "lower fit threshold");
    app.add_option("--d-hi", o.d_hi, "upper fit threshold");
    app.add_option("--otoc-tmax", o.otoc_t_max, "OTOC time range");
    app.add_option("--otoc-dt", o.otoc_dt, "OTOC sampling step");
    app.add_option("--nested-xht", o.nested_x_ht, "comma-separated x_ht list for commutator ladders")
        ->delimiter(',');
    app.add_option("--kmax", o.k_max, "deepest nested commutator");
    app.add_flag("--regularize", o.regularize, "divide the charging Hamiltonian by its many-body norm");
    app.add_option("--audit", o.audit, "explicit state-audit checkpoints per trajectory");
    app.add_option("--out", o.output, "output directory");
    app.add_option("--workers", o.workers, "worker threads (0: BHB_WORKERS or all cores)");
}

inline ExperimentConfig resolve(const Overrides& o)
{
    ExperimentConfig c = o.config ? load_config(*o.config) : ExperimentConfig{};
    const bool tau_tracks_t_max = c.schedule.tau == c.schedule.t_max;
    if (o.sites) c.chain.sites = *o.sites;
    if (o.spacing) c.chain.spacing = *o.spacing;
    if (o.mu) c.chain.mu = *o.mu;
    if (o.anchor) {
        try {
            c.chain.anchor = site_anchor_from_string(*o.anchor);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("--anchor: ") + e.what());
        }
    }
    if (o.t_max) {
        c.schedule.t_max = *o.t_max;
        if (tau_tracks_t_max)
            c.schedule.tau = *o.t_max;
    }
    if (o.tau) c.schedule.tau = *o.tau;
    if (o.dt) c.schedule.dt = *o.dt;
    if (o.x_h0) c.x_h0 = *o.x_h0;
    if (o.x_ht) c.x_ht = *o.x_ht;
    if (o.x_h0_grid) c.x_h0_grid = *o.x_h0_grid;
    if (o.x_ht_grid) c.x_ht_grid = *o.x_ht_grid;
    if (o.size_grid) c.size_grid = *o.size_grid;
    if (o.otoc_x_h) c.otoc_x_h = *o.otoc_x_h;
    if (o.probe) {
        try {
            c.otoc.probe = otoc_probe_from_string(*o.probe);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("--probe: ") + e.what());
        }
        if (c.otoc.probe == OtocProbe::spread && !o.d_lo && !o.d_hi) {
            c.otoc.d_lo = 1.0;
            c.otoc.d_hi = 16.0;
        }
    }
    if (o.source) c.otoc.source = *o.source;
    if (o.offset) c.otoc.offset = *o.offset;
    if (o.d_lo) c.otoc.d_lo = *o.d_lo;
    if (o.d_hi) c.otoc.d_hi = *o.d_hi;
    if (o.otoc_t_max) c.otoc.t_max = *o.otoc_t_max;
    if (o.otoc_dt) c.otoc.dt = *o.otoc_dt;
    if (o.nested_x_ht) c.nested_x_ht = *o.nested_x_ht;
    if (o.k_max) c.k_max = *o.k_max;
    if (o.regularize) c.regularize = true;
    if (o.audit) c.audit_checkpoints = *o.audit;
    if (o.output) c.output = *o.output;
    if (o.workers) c.workers = *o.workers;
    c.validate();
    return c;
}

namespace detail {

inline std::string flag(bool b) { return b ? "1" : "0"; }

inline nlohmann::json metrics_json(const ChargeMetrics& m)
{
    return {{"e_max_norm", m.e_max}, {"p_max_norm", m.p_max}, {"tau_star", m.tau_star}};
}

struct Outcome {
    std::vector<std::string> artifacts;
    std::size_t warnings = 0;
    int code = 0;
};

inline Outcome run_charge(const ExperimentConfig& c, const fs::path& out, std::ostream& log)
{
    ChargeOptions opt;
    opt.regularize = c.regularize;
    opt.audit_checkpoints = c.audit_checkpoints;
    const ChargeResult r = charge_once(c.x_h0, c.x_ht, c.chain, c.schedule, opt);
    CsvTable t({"t", "delta_e", "delta_e_norm"});
    for (std::size_t k = 0; k < r.trajectory.size(); ++k)
        t.add({format_number(r.trajectory.times[k]), format_number(r.trajectory.energy[k]),
               format_number(r.trajectory.energy_norm[k])});
    t.write(out / "charge_trajectory.csv");
    nlohmann::json j = metrics_json(r.metrics);
    j["x_h0"] = c.x_h0;
    j["x_ht"] = c.x_ht;
    j["bandwidth"] = r.trajectory.bandwidth;
    j["boundary_flag"] = r.boundary_flag;
    j["boundary_time"] = r.boundary_time ? nlohmann::json(*r.boundary_time) : nlohmann::json(nullptr);
    j["regularization_scale"] = r.scale;
    if (r.audit) {
        j["audit"] = {{"purity", r.audit->purity},           {"eig_min", r.audit->eig_min},
                      {"eig_max", r.audit->eig_max},         {"trace_drift", r.audit->trace_drift},
                      {"post_switch_drift", r.audit->post_switch_drift},
                      {"kernel_mismatch", r.audit->kernel_mismatch}};
    }
    write_json(out / "charge_metrics.json", j);
    log << "E_max=" << format_number(r.metrics.e_max) << " P_max=" << format_number(r.metrics.p_max)
        << " tau*=" << format_number(r.metrics.tau_star) << '\n';
    return {{"charge_trajectory.csv", "charge_metrics.json"}, 0, 0};
}

inline Outcome run_sweep(const ExperimentConfig& c, const fs::path& out, std::ostream& log)
{
    ChargeOptions opt;
    opt.regularize = c.regularize;
    opt.audit_checkpoints = c.audit_checkpoints;
    const SweepResult r = sweep_grid(c.x_h0_grid, c.x_ht_grid, c.chain, c.schedule, opt, c.workers);
    CsvTable t({"x_h0", "x_ht", "e_max_norm", "p_max_norm", "tau_star", "boundary_flag"});
    for (const auto& row : r.rows) {
        const double nan = std::nan("");
        t.add({format_number(row.x_h0), format_number(row.x_ht), format_number(row.ok() ? row.metrics.e_max : nan),
               format_number(row.ok() ? row.metrics.p_max : nan),
               format_number(row.ok() ? row.metrics.tau_star : nan), flag(row.boundary_flag)});
        if (!row.ok())
            log << "warning: cell (" << row.x_h0 << ", " << row.x_ht << ") failed: " << row.error << '\n';
    }
    t.write(out / "sweep.csv");
    return {{"sweep.csv"}, r.failures(), 0};
}

inline Outcome run_otoc(const ExperimentConfig& c, const fs::path& out, std::ostream& log)
{
    const LyapunovScan scan = lyapunov_scan(c.otoc_x_h, c.chain, c.otoc, c.workers);
    CsvTable t({"x_h", "lambda_fit", "lambda_stderr", "window_lo", "window_hi"});
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& cell : scan.cells) {
        const double nan = std::nan("");
        const auto& f = cell.fit;
        t.add({format_number(cell.x_h), format_number(f ? f->lambda : nan), format_number(f ? f->std_error : nan),
               format_number(f ? f->t_lo : nan), format_number(f ? f->t_hi : nan)});
        cells.push_back({{"x_h", cell.x_h},
                         {"bound", 0.5 * cell.x_h},
                         {"within_bound", cell.within_bound},
                         {"error", cell.error}});
        if (!cell.ok())
            log << "warning: x_h = " << cell.x_h << " flagged: " << cell.error << '\n';
    }
    t.write(out / "otoc.csv");
    nlohmann::json summary{{"cells", cells}};
    if (scan.regression) {
        summary["regression"] = {{"slope", scan.regression->slope},
                                 {"intercept", scan.regression->intercept},
                                 {"slope_stderr", scan.regression->slope_stderr},
                                 {"r2", scan.regression->r2}};
        log << "slope a=" << format_number(scan.regression->slope) << '\n';
    } else {
        summary["regression"] = nullptr;
    }
    write_json(out / "otoc_summary.json", summary);
    return {{"otoc.csv", "otoc_summary.json"}, scan.flagged(), 0};
}

inline Outcome run_nested(const ExperimentConfig& c, const fs::path& out, std::ostream&)
{
    const auto rows = nested_scan(c.nested_x_ht, c.chain, c.k_max, c.workers);
    CsvTable t({"x_ht", "k", "norm"});
    for (const auto& r : rows)
        t.add({format_number(r.x_ht), std::to_string(r.k), format_number(r.norm)});
    t.write(out / "nested.csv");
    return {{"nested.csv"}, 0, 0};
}

inline Outcome run_size_scan(const ExperimentConfig& c, const fs::path& out, std::ostream& log)
{
    ChargeOptions opt;
    opt.regularize = c.regularize;
    opt.audit_checkpoints = c.audit_checkpoints;
    const auto rows = size_scan(c.size_grid, c.x_h0, c.x_ht_grid, c.chain, c.schedule, opt, c.workers);
    CsvTable t({"L", "x_ht", "p_max_norm", "tau_star"});
    std::size_t failed = 0;
    for (const auto& r : rows) {
        const double nan = std::nan("");
        t.add({std::to_string(r.sites), format_number(r.x_ht), format_number(r.ok() ? r.metrics.p_max : nan),
               format_number(r.ok() ? r.metrics.tau_star : nan)});
        if (!r.ok()) {
            ++failed;
            log << "warning: cell (L=" << r.sites << ", x_ht=" << r.x_ht << ") failed: " << r.error << '\n';
        }
    }
    t.write(out / "size_scan.csv");
    return {{"size_scan.csv"}, failed, 0};
}

inline Outcome run_regularized(const ExperimentConfig& c, const fs::path& out, std::ostream& log)
{
    ChargeOptions opt;
    opt.audit_checkpoints = c.audit_checkpoints;
    const auto rows = regularized_charge_scan(c.x_h0, c.x_ht_grid, c.chain, c.schedule, opt, c.workers);
    CsvTable t({"x_ht_eff", "p_max_norm", "tau_star", "t_max"});
    std::size_t failed = 0;
    for (const auto& r : rows) {
        const double nan = std::nan("");
        t.add({format_number(r.ok() ? r.x_ht_eff : nan), format_number(r.ok() ? r.metrics.p_max : nan),
               format_number(r.ok() ? r.metrics.tau_star : nan), format_number(r.t_max)});
        if (!r.ok()) {
            ++failed;
            log << "warning: x_ht = " << r.x_ht << " failed: " << r.error << '\n';
        }
    }
    t.write(out / "regularized.csv");
    log << "note: x_ht_eff = regularization scale * x_ht\n";
    return {{"regularized.csv"}, failed, 0};
}

inline Outcome run_oracle(const ExperimentConfig& c, const fs::path& out, std::ostream& log)
{
    if (c.chain.sites > max_dense_sites)
        throw ConfigError("chain.L: oracle supports at most " + std::to_string(max_dense_sites) + " sites");
    const QuenchPair q = make_quench_pair(c.x_h0, c.x_ht, c.chain);
    const ChargeResult fr = charge_pair(q, c.schedule);
    const ExactTrajectory ex = exact_trajectory(q.k0, q.k1, c.chain, c.schedule);
    const ChargeMetrics em = charge_metrics(ex.trajectory);
    double diff = 0.0;
    for (std::size_t k = 0; k < fr.trajectory.size(); ++k)
        diff = std::max(diff, std::abs(fr.trajectory.energy[k] - ex.trajectory.energy[k]));
    double spectrum_dev = std::nan("");
    if (c.chain.sites <= max_operator_sites) {
        const Eigen::VectorXd dense = dense_spectrum(build_many_body(q.k0, c.chain));
        const std::vector<double> sums = subset_sums(spectral_data(q.h0).energies);
        spectrum_dev = 0.0;
        for (Eigen::Index k = 0; k < dense.size(); ++k)
            spectrum_dev = std::max(spectrum_dev, std::abs(dense[k] - sums[static_cast<std::size_t>(k)]));
    }
    const double dt = c.schedule.dt;
    const bool agree = diff <= 1e-8 && std::abs(em.e_max - fr.metrics.e_max) <= 1e-8 &&
                       std::abs(em.p_max - fr.metrics.p_max) <= 1e-8 &&
                       std::abs(em.tau_star - fr.metrics.tau_star) <= dt * (1.0 + 1e-9) &&
                       (!(spectrum_dev == spectrum_dev) || spectrum_dev <= 1e-8);
    nlohmann::json j{{"x_h0", c.x_h0},
                     {"x_ht", c.x_ht},
                     {"max_abs_diff", diff},
                     {"spectrum_max_dev", spectrum_dev == spectrum_dev ? nlohmann::json(spectrum_dev) : nlohmann::json(nullptr)},
                     {"degeneracy", ex.degeneracy},
                     {"particles", ex.particles},
                     {"norm_drift", ex.norm_drift},
                     {"free", metrics_json(fr.metrics)},
                     {"exact", metrics_json(em)},
                     {"agree", agree}};
    write_json(out / "oracle.json", j);
    log << "max |dE_free - dE_exact| = " << format_number(diff) << (agree ? " (agree)" : " (DISAGREE)") << '\n';
    return {{"oracle.json"}, 0, agree ? 0 : 3};
}

} // namespace detail

/// Executes one subcommand on a validated config and writes its manifest.
inline int run_command(const std::string& name, const ExperimentConfig& c, std::ostream& log = std::cerr)
{
    const fs::path out(c.output);
    fs::create_directories(out);
    detail::Outcome o;
    if (name == "charge") o = detail::run_charge(c, out, log);
    else if (name == "sweep") o = detail::run_sweep(c, out, log);
    else if (name == "otoc") o = detail::run_otoc(c, out, log);
    else if (name == "nested") o = detail::run_nested(c, out, log);
    else if (name == "size-scan") o = detail::run_size_scan(c, out, log);
    else if (name == "regularized") o = detail::run_regularized(c, out, log);
    else if (name == "oracle") o = detail::run_oracle(c, out, log);
    else throw ConfigError("unknown subcommand \"" + name + "\"");
    std::string base = name;
    write_json(out / (base + ".manifest.json"), manifest(name, to_json(c), o.artifacts, o.warnings));
    if (o.warnings)
        log << o.warnings << " warning(s)\n";
    return o.code;
}

inline int run(int argc, char** argv, std::ostream& log = std::cerr)
{
    CLI::App app{"Quantum-battery charging on a curved-spacetime hopping chain"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1, 1);
    Overrides o;
    for (const auto& name : subcommands())
        add_options(*app.add_subcommand(name), o);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    const std::string name = app.get_subcommands().front()->get_name();
    try {
        return run_command(name, resolve(o), log);
    } catch (const ConfigError& e) {
        log << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const DomainError& e) {
        log << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const SizeError& e) {
        log << "configuration error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace bhb::cli

#endif // BHB_CLI_HPP
