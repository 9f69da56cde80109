#ifndef BHB_CHARGING_HPP
#define BHB_CHARGING_HPP

// Quench-charging protocol: two metrics, one step quench, performance metrics and
// the grid and size scans built on top of them.

#include <bhb/errors.hpp>
#include <bhb/gaussian.hpp>
#include <bhb/lattice.hpp>
#include <bhb/parallel.hpp>
#include <bhb/schedule.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace bhb {

struct QuenchPair {
    SingleParticleHamiltonian h0; // battery (non-charging) Hamiltonian
    SingleParticleHamiltonian h1; // charging Hamiltonian
    HoppingProfile k0;
    HoppingProfile k1;
};

inline QuenchPair make_quench_pair(double x_h0, double x_ht, const ChainConfig& c)
{
    const MetricProfile m0(x_h0), m1(x_ht);
    QuenchPair q;
    q.k0 = build_hoppings(m0, c);
    q.k1 = build_hoppings(m1, c);
    q.h0 = build_hamiltonian(q.k0, c);
    q.h1 = build_hamiltonian(q.k1, c);
    return q;
}

struct ChargeMetrics {
    double e_max = 0.0;    // max_t dE(t)/Eb
    double p_max = 0.0;    // max_tau dE(tau)/(Eb tau)
    double tau_star = 0.0; // earliest maximizer of the power
    std::size_t tau_index = 0;
};

/// Relative tolerance under which two power samples count as tied.
inline constexpr double power_tie_tolerance = 1e-12;

inline ChargeMetrics charge_metrics(const ChargeTrajectory& traj)
{
    if (traj.size() < 2 || traj.energy_norm.size() != traj.size())
        throw SizeError("trajectory needs at least two normalized samples");
    ChargeMetrics m;
    m.e_max = traj.energy_norm[0];
    for (double e : traj.energy_norm)
        m.e_max = std::max(m.e_max, e);

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> power(traj.size(), 0.0);
    for (std::size_t k = 1; k < traj.size(); ++k) {
        power[k] = traj.energy_norm[k] / traj.times[k];
        best = std::max(best, power[k]);
    }
    const double slack = power_tie_tolerance * std::abs(best);
    for (std::size_t k = 1; k < traj.size(); ++k)
        if (power[k] >= best - slack) {
            m.tau_index = k;
            m.tau_star = traj.times[k];
            m.p_max = power[k];
            break;
        }
    return m;
}

/// Divide by the many-body maximum singular value max(sum eps>0, -sum eps<0).
struct Regularized {
    SingleParticleHamiltonian h;
    double scale = 1.0;
};

inline Regularized regularize(const SingleParticleHamiltonian& h, const Spectrum& s)
{
    if (!(s.norm > 0.0))
        throw NumericalError("Hamiltonian has zero many-body norm; cannot regularize");
    Regularized r;
    r.scale = 1.0 / s.norm;
    r.h.h = h.h * r.scale;
    return r;
}

inline Regularized regularize(const SingleParticleHamiltonian& h) { return regularize(h, spectral_data(h)); }

/// Scaling H by s is a rescaling of time by s, so growth rates, and the horizon
/// parameter they are read against, scale by s.
inline double effective_scrambling(double x_ht, double scale)
{
    if (!(scale > 0.0))
        throw DomainError("regularization scale must be > 0");
    return scale * x_ht;
}

struct ChargeOptions {
    bool regularize = false;
    double boundary_threshold = 1e-3;
    int audit_checkpoints = 0; // 0 disables the explicit state audit
};

struct ChargeResult {
    ChargeTrajectory trajectory;
    ChargeMetrics metrics;
    double scale = 1.0;
    std::optional<double> boundary_time; // first arrival at the last site under h1
    bool boundary_flag = false;          // t_max reaches past the boundary arrival
    std::optional<GaussianAudit> audit;
};

inline ChargeResult charge_pair(const QuenchPair& q, const QuenchSchedule& sched, const ChargeOptions& opt = {})
{
    sched.validate();
    const Spectrum s0 = spectral_data(q.h0);
    Spectrum s1 = spectral_data(q.h1);
    ChargeResult r;
    SingleParticleHamiltonian h1 = q.h1;
    if (opt.regularize) {
        const Regularized reg = regularize(q.h1, s1);
        h1 = reg.h;
        r.scale = reg.scale;
        s1 = spectral_data(h1);
    }
    r.trajectory = delta_energy_series(q.h0, s0, s1, sched);
    r.metrics = charge_metrics(r.trajectory);
    r.boundary_time =
        boundary_arrival_time(s1, first_exterior_site(q.k1), sched.dt, sched.t_max, opt.boundary_threshold);
    r.boundary_flag = r.boundary_time.has_value();
    if (opt.audit_checkpoints > 0) {
        // always probe past switch-off, even when the schedule itself ends at tau
        r.audit = audit_quench(q.h0, s0, s1, sched.tau, sched.tau + sched.t_max, opt.audit_checkpoints);
        if (sched.t_max > sched.tau) {
            std::size_t at_tau = 0;
            while (at_tau + 1 < r.trajectory.size() && r.trajectory.times[at_tau + 1] <= sched.tau * (1.0 + 1e-12))
                ++at_tau;
            double drift = 0.0;
            for (std::size_t k = at_tau + 1; k < r.trajectory.size(); ++k)
                drift = std::max(drift, std::abs(r.trajectory.energy[k] - r.trajectory.energy[at_tau]));
            r.audit->post_switch_drift = std::max(r.audit->post_switch_drift, drift);
        }
    }
    return r;
}

inline ChargeResult charge_once(double x_h0, double x_ht, const ChainConfig& c, const QuenchSchedule& sched,
                                const ChargeOptions& opt = {})
{
    return charge_pair(make_quench_pair(x_h0, x_ht, c), sched, opt);
}

struct SweepRow {
    double x_h0 = 0.0;
    double x_ht = 0.0;
    ChargeMetrics metrics;
    bool boundary_flag = false;
    std::optional<GaussianAudit> audit;
    std::string error; // empty on success
    bool ok() const noexcept { return error.empty(); }
};

struct SweepResult {
    std::vector<SweepRow> rows; // x_h0 major, x_ht minor
    std::size_t failures() const
    {
        std::size_t n = 0;
        for (const auto& r : rows)
            n += r.ok() ? 0 : 1;
        return n;
    }
};

inline SweepResult sweep_grid(const std::vector<double>& x_h0_list, const std::vector<double>& x_ht_list,
                              const ChainConfig& c, const QuenchSchedule& sched, const ChargeOptions& opt = {},
                              int workers = 0)
{
    if (x_h0_list.empty() || x_ht_list.empty())
        throw ConfigError("sweep grids must be non-empty");
    const std::size_t nt = x_ht_list.size();
    SweepResult out;
    out.rows = parallel_map<SweepRow>(
        x_h0_list.size() * nt,
        [&](std::size_t k) {
            SweepRow row;
            row.x_h0 = x_h0_list[k / nt];
            row.x_ht = x_ht_list[k % nt];
            try {
                const ChargeResult r = charge_once(row.x_h0, row.x_ht, c, sched, opt);
                row.metrics = r.metrics;
                row.boundary_flag = r.boundary_flag;
                row.audit = r.audit;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        },
        workers);
    return out;
}

struct SizeScanRow {
    int sites = 0;
    double x_ht = 0.0;
    ChargeMetrics metrics;
    bool boundary_flag = false;
    std::optional<GaussianAudit> audit;
    std::string error;
    bool ok() const noexcept { return error.empty(); }
};

/// One cell per (L, x_ht), L major. `base` supplies spacing, mu and anchor.
inline std::vector<SizeScanRow> size_scan(const std::vector<int>& sizes, double x_h0,
                                          const std::vector<double>& x_ht_list, const ChainConfig& base,
                                          const QuenchSchedule& sched, const ChargeOptions& opt = {},
                                          int workers = 0)
{
    if (sizes.empty() || x_ht_list.empty())
        throw ConfigError("size scan lists must be non-empty");
    for (int l : sizes)
        if (l < 2)
            throw SizeError("size scan needs L >= 2, got " + std::to_string(l));
    const std::size_t nt = x_ht_list.size();
    return parallel_map<SizeScanRow>(
        sizes.size() * nt,
        [&](std::size_t k) {
            SizeScanRow row;
            row.sites = sizes[k / nt];
            row.x_ht = x_ht_list[k % nt];
            try {
                ChainConfig c = base;
                c.sites = row.sites;
                const ChargeResult r = charge_once(x_h0, row.x_ht, c, sched, opt);
                row.metrics = r.metrics;
                row.boundary_flag = r.boundary_flag;
                row.audit = r.audit;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        },
        workers);
}

struct RegularizedRow {
    double x_ht = 0.0;
    double x_ht_eff = 0.0;
    double scale = 1.0;
    ChargeMetrics metrics;
    double t_max = 0.0;
    std::optional<GaussianAudit> audit;
    std::string error;
    bool ok() const noexcept { return error.empty(); }
};

inline std::vector<RegularizedRow> regularized_charge_scan(double x_h0, const std::vector<double>& x_ht_list,
                                                           const ChainConfig& c, const QuenchSchedule& sched,
                                                           ChargeOptions opt = {}, int workers = 0)
{
    if (x_ht_list.empty())
        throw ConfigError("regularized scan needs a non-empty x_ht list");
    opt.regularize = true;
    return parallel_map<RegularizedRow>(
        x_ht_list.size(),
        [&](std::size_t k) {
            RegularizedRow row;
            row.x_ht = x_ht_list[k];
            row.t_max = sched.t_max;
            try {
                const ChargeResult r = charge_once(x_h0, row.x_ht, c, sched, opt);
                row.scale = r.scale;
                row.x_ht_eff = effective_scrambling(row.x_ht, r.scale);
                row.metrics = r.metrics;
                row.audit = r.audit;
            } catch (const std::exception& e) {
                row.error = e.what();
            }
            return row;
        },
        workers);
}

} // namespace bhb

#endif // BHB_CHARGING_HPP
