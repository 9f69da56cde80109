#ifndef BHB_CONFIG_HPP
#define BHB_CONFIG_HPP

// Experiment configuration. Files are JSON objects with nested sections; every key
// is optional, unknown keys are rejected with their full path.
//
// {
//   "chain":     {"L": 250, "d": 1.0, "mu": 0.0, "anchor": "origin"},
//   "schedule":  {"tau": 10.0, "t_max": 10.0, "dt": 0.01},
//   "cell":      {"x_h0": 0.0, "x_ht": 1.0},
//   "grids":     {"x_h0": [...], "x_ht": [...], "L": [...]},
//   "otoc":      {"x_h": [...], "probe": "propagator", "source": -1, "offset": 10,
//                 "d_lo": 1e-6, "d_hi": 1e-2, "t_max": 30.0, "dt": 0.005},
//   "nested":    {"x_ht": [...], "k_max": 6},
//   "regularize": false,
//   "audit_checkpoints": 0,
//   "output": "out",
//   "workers": 0
// }
//
// "schedule.tau" defaults to "schedule.t_max". When "otoc.probe" is "spread" and the
// thresholds are omitted they default to [1, 16] sites^2.

#include <bhb/errors.hpp>
#include <bhb/lattice.hpp>
#include <bhb/schedule.hpp>
#include <bhb/scrambling.hpp>

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace bhb {

struct ExperimentConfig {
    ChainConfig chain;
    QuenchSchedule schedule;
    double x_h0 = 0.0;
    double x_ht = 1.0;
    std::vector<double> x_h0_grid{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<double> x_ht_grid{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
    std::vector<int> size_grid{50, 100, 150, 200, 250};
    std::vector<double> otoc_x_h{0.5, 1.0, 1.5, 2.0, 2.5, 3.0};
    OtocSettings otoc{OtocProbe::propagator, -1, 10, 1e-6, 1e-2, 30.0, 0.005};
    std::vector<double> nested_x_ht{1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    int k_max = 6;
    bool regularize = false;
    int audit_checkpoints = 0;
    std::string output = "out";
    int workers = 0; // 0: BHB_WORKERS or hardware concurrency

    void validate() const
    {
        auto wrap = [](const std::string& path, auto&& check) {
            try {
                check();
            } catch (const std::exception& e) {
                throw ConfigError(path + ": " + e.what());
            }
        };
        wrap("chain", [&] { chain.validate(); });
        wrap("schedule", [&] { schedule.validate(); });
        wrap("otoc", [&] { otoc.validate(); });
        auto non_negative = [](const std::string& path, const std::vector<double>& v) {
            if (v.empty())
                throw ConfigError(path + ": list must be non-empty");
            for (double x : v)
                if (!(x >= 0.0) || !std::isfinite(x))
                    throw ConfigError(path + ": scrambling parameters must be finite and >= 0");
        };
        if (!(x_h0 >= 0.0) || !(x_ht >= 0.0))
            throw ConfigError("cell: scrambling parameters must be >= 0");
        non_negative("grids.x_h0", x_h0_grid);
        non_negative("grids.x_ht", x_ht_grid);
        non_negative("otoc.x_h", otoc_x_h);
        non_negative("nested.x_ht", nested_x_ht);
        if (size_grid.empty())
            throw ConfigError("grids.L: list must be non-empty");
        for (int l : size_grid)
            if (l < 2)
                throw ConfigError("grids.L: every size must be >= 2");
        if (k_max < 1)
            throw ConfigError("nested.k_max: must be >= 1");
        if (audit_checkpoints < 0)
            throw ConfigError("audit_checkpoints: must be >= 0");
        if (workers < 0)
            throw ConfigError("workers: must be >= 0");
        if (output.empty())
            throw ConfigError("output: must be a non-empty path");
    }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& j, const std::string& path, const std::set<std::string>& allowed)
{
    if (!j.is_object())
        throw ConfigError((path.empty() ? std::string("<root>") : path) + ": expected an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError((path.empty() ? "" : path + ".") + it.key() + ": unknown key");
}

template <class T>
void read(const json& j, const std::string& section, const char* key, T& out)
{
    if (!j.contains(key))
        return;
    const std::string path = section.empty() ? key : section + "." + key;
    try {
        if constexpr (std::is_same_v<T, int>) {
            if (!j.at(key).is_number_integer())
                throw ConfigError("expected an integer");
        } else if constexpr (std::is_same_v<T, double>) {
            if (!j.at(key).is_number())
                throw ConfigError("expected a number");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!j.at(key).is_boolean())
                throw ConfigError("expected true or false");
        }
        out = j.at(key).get<T>();
    } catch (const std::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j)
{
    using detail::read;
    ExperimentConfig c;
    detail::reject_unknown(j, "", {"chain", "schedule", "cell", "grids", "otoc", "nested", "regularize",
                                   "audit_checkpoints", "output", "workers"});
    if (j.contains("chain")) {
        const auto& s = j["chain"];
        detail::reject_unknown(s, "chain", {"L", "d", "mu", "anchor"});
        read(s, "chain", "L", c.chain.sites);
        read(s, "chain", "d", c.chain.spacing);
        read(s, "chain", "mu", c.chain.mu);
        std::string anchor = to_string(c.chain.anchor);
        read(s, "chain", "anchor", anchor);
        try {
            c.chain.anchor = site_anchor_from_string(anchor);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("chain.anchor: ") + e.what());
        }
    }
    bool tau_given = false;
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        detail::reject_unknown(s, "schedule", {"tau", "t_max", "dt"});
        read(s, "schedule", "t_max", c.schedule.t_max);
        read(s, "schedule", "dt", c.schedule.dt);
        tau_given = s.contains("tau");
        read(s, "schedule", "tau", c.schedule.tau);
    }
    if (!tau_given)
        c.schedule.tau = c.schedule.t_max;
    if (j.contains("cell")) {
        const auto& s = j["cell"];
        detail::reject_unknown(s, "cell", {"x_h0", "x_ht"});
        read(s, "cell", "x_h0", c.x_h0);
        read(s, "cell", "x_ht", c.x_ht);
    }
    if (j.contains("grids")) {
        const auto& s = j["grids"];
        detail::reject_unknown(s, "grids", {"x_h0", "x_ht", "L"});
        read(s, "grids", "x_h0", c.x_h0_grid);
        read(s, "grids", "x_ht", c.x_ht_grid);
        read(s, "grids", "L", c.size_grid);
    }
    if (j.contains("otoc")) {
        const auto& s = j["otoc"];
        detail::reject_unknown(s, "otoc", {"x_h", "probe", "source", "offset", "d_lo", "d_hi", "t_max", "dt"});
        read(s, "otoc", "x_h", c.otoc_x_h);
        std::string probe = to_string(c.otoc.probe);
        read(s, "otoc", "probe", probe);
        try {
            c.otoc.probe = otoc_probe_from_string(probe);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("otoc.probe: ") + e.what());
        }
        if (c.otoc.probe == OtocProbe::spread) {
            c.otoc.d_lo = 1.0;
            c.otoc.d_hi = 16.0;
        }
        read(s, "otoc", "source", c.otoc.source);
        read(s, "otoc", "offset", c.otoc.offset);
        read(s, "otoc", "d_lo", c.otoc.d_lo);
        read(s, "otoc", "d_hi", c.otoc.d_hi);
        read(s, "otoc", "t_max", c.otoc.t_max);
        read(s, "otoc", "dt", c.otoc.dt);
    }
    if (j.contains("nested")) {
        const auto& s = j["nested"];
        detail::reject_unknown(s, "nested", {"x_ht", "k_max"});
        read(s, "nested", "x_ht", c.nested_x_ht);
        read(s, "nested", "k_max", c.k_max);
    }
    read(j, "", "regularize", c.regularize);
    read(j, "", "audit_checkpoints", c.audit_checkpoints);
    read(j, "", "output", c.output);
    read(j, "", "workers", c.workers);
    return c;
}

/// Inverse of config_from_json; config_from_json(to_json(c)) reproduces c.
inline nlohmann::json to_json(const ExperimentConfig& c)
{
    nlohmann::json j;
    j["chain"] = {{"L", c.chain.sites}, {"d", c.chain.spacing}, {"mu", c.chain.mu},
                  {"anchor", to_string(c.chain.anchor)}};
    j["schedule"] = {{"tau", c.schedule.tau}, {"t_max", c.schedule.t_max}, {"dt", c.schedule.dt}};
    j["cell"] = {{"x_h0", c.x_h0}, {"x_ht", c.x_ht}};
    j["grids"] = {{"x_h0", c.x_h0_grid}, {"x_ht", c.x_ht_grid}, {"L", c.size_grid}};
    j["otoc"] = {{"x_h", c.otoc_x_h},       {"probe", to_string(c.otoc.probe)},
                 {"source", c.otoc.source}, {"offset", c.otoc.offset},
                 {"d_lo", c.otoc.d_lo},     {"d_hi", c.otoc.d_hi},
                 {"t_max", c.otoc.t_max},   {"dt", c.otoc.dt}};
    j["nested"] = {{"x_ht", c.nested_x_ht}, {"k_max", c.k_max}};
    j["regularize"] = c.regularize;
    j["audit_checkpoints"] = c.audit_checkpoints;
    j["output"] = c.output;
    j["workers"] = c.workers;
    return j;
}

inline ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<string>")
{
    nlohmann::json j = nlohmann::json::object();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos)
        return config_from_json(j);
    try {
        j = nlohmann::json::parse(text, nullptr, true, true);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(origin + ": malformed JSON: " + e.what());
    }
    return config_from_json(j);
}

inline ExperimentConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

} // namespace bhb

#endif // BHB_CONFIG_HPP
